//! Named groups of oracle checks with a serializable report.

use std::collections::BTreeSet;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::calc::{calc_inequality_sweep, default_grid};
use super::chain::{standard_chains, submartingale_sim};
use super::generate::{planted_ksat, random_assignment, random_ksat, random_one_in_three};
use super::{
    brute_force_ip, brute_force_projection, cutting_plane_strategy, vertex_submartingale_check,
    OracleError,
};
use crate::csp::{
    all_tuples, basic_lp, find_polymorphism_violation, ksat_to_lp,
    prepare, verify_assignment, CspTemplate, Encoder, Relation, ThresholdScheme,
};
use crate::domain::{fmt_rational, Rational};
use crate::walk::strategy::worst_response;
use crate::walk::{
    feasibility_probe, init_state, restart_rng, solve_strategy, step, Probe, WalkContext,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Calc,
    Chain,
    Strategy,
    Encoding,
    Polymorphism,
    All,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "calc" => Suite::Calc,
            "chain" => Suite::Chain,
            "strategy" => Suite::Strategy,
            "encoding" => Suite::Encoding,
            "polymorphism" => Suite::Polymorphism,
            "all" => Suite::All,
            other => return Err(format!("unknown suite `{other}`")),
        })
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub n: usize,
    pub instances: usize,
    pub seed: u64,
    pub trials: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            n: 8,
            instances: 20,
            seed: 0x5eed,
            trials: 100_000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
            counterexample: None,
        }
    }

    fn with_counterexample(mut self, c: Option<String>) -> Self {
        self.counterexample = c;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn report(suite: &str, checks: Vec<Check>) -> SuiteReport {
    SuiteReport {
        suite: suite.into(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn fmt_point(x: &[Rational]) -> String {
    x.iter().map(fmt_rational).collect::<Vec<_>>().join(",")
}

pub fn calc_suite() -> SuiteReport {
    let (taus, epss) = default_grid();
    let points = calc_inequality_sweep(&taus, &epss);
    let failed = points.iter().find(|p| !p.holds);
    let equality = points
        .iter()
        .filter(|p| p.tau == Rational::from_integer(1.into()))
        .all(|p| p.is_equality());
    let rechecked = points.iter().filter(|p| p.bits > 256).count();
    report(
        "calc",
        vec![
            Check::new(
                "inequality_holds_on_grid",
                failed.is_none(),
                format!("{} points, {} rechecked at higher precision", points.len(), rechecked),
            )
            .with_counterexample(failed.map(|p| p.describe())),
            Check::new("equality_at_tau_one", equality, "margin is exactly zero at tau = 1"),
        ],
    )
}

pub fn chain_suite(opts: &VerifyOptions) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let checks = standard_chains()
        .iter()
        .map(|c| {
            let res = submartingale_sim(c, opts.trials, &mut rng);
            let boost = c.boost_holds();
            Check::new(
                c.name,
                res.passes() && boost,
                format!(
                    "T={} estimate={:.5} se={:.5} bound={:.5} boost={}",
                    res.horizon, res.estimate, res.std_err, res.bound, boost
                ),
            )
        })
        .collect();
    report("chain", checks)
}

/// Selections where the walk needs a strategy, gathered by walking with the
/// duality solver from random starts.
pub fn strategy_states(ctx: &WalkContext, seed: u64, limit: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut restart = 0;
    while out.len() < limit && restart < 4 * limit as u64 {
        let mut state = init_state(ctx, restart_rng(seed, restart));
        restart += 1;
        for _ in 0..ctx.budget() {
            if out.len() >= limit {
                break;
            }
            match feasibility_probe(ctx, &state.sigma) {
                Ok(Probe::Blocked(_)) => {}
                _ => break,
            }
            out.push(state.sigma.clone());
            match solve_strategy(ctx, &state.sigma) {
                Ok(p) => {
                    step(&mut state, &p);
                }
                Err(_) => break,
            }
        }
    }
    out
}

pub fn strategy_suite(opts: &VerifyOptions) -> Result<SuiteReport, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let scheme = ThresholdScheme::ksat(3)?;
    let mut states = 0usize;
    let mut failures = Vec::new();
    let mut infeasible = 0usize;
    for inst_idx in 0..opts.instances {
        let planted = random_assignment(&mut rng, opts.n);
        let m = (opts.n * 4).max(1);
        let inst = planted_ksat(&mut rng, &planted, m, 3.min(opts.n));
        let (ctx, _) = prepare(&inst, &scheme, &Encoder::Direct { k: 3 })?;
        for sigma in strategy_states(&ctx, rng.gen(), 5) {
            states += 1;
            let dual = solve_strategy(&ctx, &sigma);
            let cp = cutting_plane_strategy(&ctx, &sigma);
            let (dual, cp) = match (dual, cp) {
                (Ok(d), Ok(c)) => (d, c.strategy),
                _ => {
                    infeasible += 1;
                    continue;
                }
            };
            for (label, p) in [("duality", &dual), ("cutting_plane", &cp)] {
                let (worst, x) = worst_response(&ctx, &sigma, p.moves())?;
                if worst < Rational::from_integer(1.into()) {
                    failures.push(format!(
                        "instance {inst_idx} {label} sigma={sigma:?} x={}",
                        fmt_point(&x)
                    ));
                }
                if let Some(x) = vertex_submartingale_check(&ctx, &sigma, p.moves())? {
                    failures.push(format!(
                        "instance {inst_idx} {label} vertex sigma={sigma:?} x={}",
                        fmt_point(&x)
                    ));
                }
            }
        }
    }
    Ok(report(
        "strategy",
        vec![
            Check::new(
                "both_solvers_sound",
                failures.is_empty() && states > 0,
                format!("{states} states over {} instances", opts.instances),
            )
            .with_counterexample(failures.first().cloned()),
            Check::new(
                "no_strategy_infeasible",
                infeasible == 0,
                format!("{infeasible} infeasible solves"),
            ),
        ],
    ))
}

pub fn encoding_suite(opts: &VerifyOptions) -> Result<SuiteReport, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut ksat_bad = None;
    for i in 0..opts.instances {
        let n = rng.gen_range(3..=12);
        let m = rng.gen_range(1..=5 * n);
        let inst = random_ksat(&mut rng, n, m, 3);
        let lp = ksat_to_lp(&inst, 3)?;
        let from_lp: BTreeSet<Vec<bool>> = brute_force_ip(&lp)?.into_iter().collect();
        let direct: BTreeSet<Vec<bool>> = (0u32..1 << n)
            .map(|b| (0..n).map(|j| b >> j & 1 == 1).collect::<Vec<bool>>())
            .filter(|a| verify_assignment(&inst, a))
            .collect();
        if from_lp != direct && ksat_bad.is_none() {
            ksat_bad = Some(format!("3-SAT instance {i} (n={n}, m={m})"));
        }
    }
    let mut basic_bad = None;
    for i in 0..opts.instances {
        let n = rng.gen_range(3..=10);
        let m = rng.gen_range(1..=n);
        let (inst, template) = random_one_in_three(&mut rng, n, m);
        let lp = basic_lp(&inst, &template)?;
        let proj: BTreeSet<Vec<bool>> = brute_force_projection(&lp, n)?.into_iter().collect();
        let direct: BTreeSet<Vec<bool>> = (0u32..1 << n)
            .map(|b| (0..n).map(|j| b >> j & 1 == 1).collect::<Vec<bool>>())
            .filter(|a| verify_assignment(&inst, a))
            .collect();
        if proj != direct && basic_bad.is_none() {
            basic_bad = Some(format!("1-in-3 instance {i} (n={n}, m={m})"));
        }
    }
    Ok(report(
        "encoding",
        vec![
            Check::new("direct_encoding_exact", ksat_bad.is_none(), "0-1 points equal satisfying assignments")
                .with_counterexample(ksat_bad),
            Check::new("basic_lp_projection_exact", basic_bad.is_none(), "projection equals satisfying assignments")
                .with_counterexample(basic_bad),
        ],
    ))
}

/// Exactly three of four arguments true; the threshold rounding sends
/// a stack of all four tuples to `1111`.
pub fn three_of_four() -> Relation {
    Relation::new("three_of_four", 4, all_tuples(4).filter(|t| t.iter().filter(|&&b| b).count() == 3))
        .expect("four tuples of arity 4")
}

pub fn polymorphism_suite() -> Result<SuiteReport, OracleError> {
    let mut checks = Vec::new();
    for (k, l) in [(3usize, 4usize), (3, 5), (4, 5)] {
        let scheme = ThresholdScheme::ksat(k)?;
        let v = find_polymorphism_violation(&CspTemplate::ksat(k), &scheme, l)?;
        checks.push(
            Check::new(format!("ksat_k{k}_L{l}_preserved"), v.is_none(), "exhaustive over multisets")
                .with_counterexample(v.map(|v| format!("{} {:?} -> {}", v.relation, v.rows, v.image))),
        );
    }
    let scheme = ThresholdScheme::ksat(3)?;
    let v = find_polymorphism_violation(&CspTemplate::new([three_of_four()]), &scheme, 4)
        ?;
    checks.push(
        Check::new("three_of_four_broken", v.is_some(), "negative control")
            .with_counterexample(v.map(|v| format!("{:?} -> {}", v.rows, v.image))),
    );
    Ok(report("polymorphism", checks))
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<Vec<SuiteReport>, OracleError> {
    Ok(match suite {
        Suite::Calc => vec![calc_suite()],
        Suite::Chain => vec![chain_suite(opts)],
        Suite::Strategy => vec![strategy_suite(opts)?],
        Suite::Encoding => vec![encoding_suite(opts)?],
        Suite::Polymorphism => vec![polymorphism_suite()?],
        Suite::All => vec![
            calc_suite(),
            chain_suite(opts),
            strategy_suite(opts)?,
            encoding_suite(opts)?,
            polymorphism_suite()?,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names() {
        assert_eq!("calc".parse::<Suite>(), Ok(Suite::Calc));
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn small_suites_pass() {
        let opts = VerifyOptions {
            n: 5,
            instances: 3,
            trials: 2_000,
            ..VerifyOptions::default()
        };
        let s = strategy_suite(&opts).unwrap();
        assert!(s.passed, "{s:?}");
        assert!(encoding_suite(&opts).unwrap().passed);
        assert!(polymorphism_suite().unwrap().passed);
        assert!(chain_suite(&opts).passed);
    }
}
