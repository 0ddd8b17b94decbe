//! Maximizing `cᵀx` by bisection on a threshold row `cᵀx ≥ M'`.

use num_traits::{Signed, Zero};

use super::{solve, WalkConfig, WalkContext, WalkError, WalkStatus};
use crate::domain::{BoxRegion, LinearProgram, Rational, Row};
use crate::lp::{self, LpOutcome};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObjectiveMode {
    /// Stop once the bracket is no wider than the tolerance.
    Tolerance(Rational),
    /// Integer objective; thresholds range over integers.
    Integral,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimizeOutcome {
    /// `cᵀy` of the best witness.
    pub value: Rational,
    pub witness: Vec<Rational>,
    pub probes: usize,
    pub restarts_used: u64,
    pub steps_used: u64,
}

fn with_threshold(lp: &LinearProgram, c: &[Rational], m: &Rational) -> LinearProgram {
    let mut out = lp.clone();
    let row = Row::new(c.iter().cloned().map(|v| -v).enumerate(), -m.clone());
    out.add_row(row).expect("objective has program dimension");
    out
}

/// Best point of the witness's own box, so each success is as strong as it can be.
fn polish(lp: &LinearProgram, c: &[Rational], y: Vec<Rational>) -> Vec<Rational> {
    let sigma: Vec<usize> = y
        .iter()
        .enumerate()
        .map(|(i, v)| {
            lp.var_set(i)
                .locate(v)
                .ok()
                .flatten()
                .expect("witness lies in its interval set")
        })
        .collect();
    let region = BoxRegion::from_selection(lp.var_sets(), &sigma);
    let neg: Vec<Rational> = c.iter().map(|v| -v.clone()).collect();
    match lp::minimize(lp, &neg, &region) {
        Ok(LpOutcome::Optimal { primal, .. }) => primal,
        _ => y,
    }
}

/// Largest `cᵀy` found over witnesses `y ∈ E^n` with `Ay ≤ b`.
///
/// Returns `Ok(None)` when even the unthresholded program yields no witness.
pub fn optimize(
    lp: &LinearProgram,
    c: &[Rational],
    mode: &ObjectiveMode,
    config: &WalkConfig,
) -> Result<Option<OptimizeOutcome>, WalkError> {
    if c.len() != lp.n() {
        return Err(WalkError::DimensionMismatch {
            expected: lp.n(),
            got: c.len(),
        });
    }
    if *mode == ObjectiveMode::Integral && c.iter().any(|v| !v.is_integer()) {
        return Err(WalkError::NonIntegralObjective);
    }
    let neg: Vec<Rational> = c.iter().map(|v| -v.clone()).collect();
    let upper = match lp::minimize(lp, &neg, &BoxRegion::unit(lp.n()))? {
        LpOutcome::Optimal { value, .. } => -value,
        _ => return Err(WalkError::RelaxationInfeasible),
    };

    let mut probes = 0usize;
    let mut restarts_used = 0u64;
    let mut steps_used = 0u64;
    let mut attempt = |program: LinearProgram| -> Result<Option<Vec<Rational>>, WalkError> {
        probes += 1;
        let out = match solve(&WalkContext::new(program)?, config) {
            Err(WalkError::RelaxationInfeasible) => return Ok(None),
            other => other?,
        };
        restarts_used += out.restarts_used;
        steps_used += out.steps_used;
        Ok(match out.status {
            WalkStatus::Solved(y) => Some(polish(lp, c, y)),
            WalkStatus::Exhausted => None,
        })
    };

    let Some(first) = attempt(lp.clone())? else {
        return Ok(None);
    };
    let mut best_value = lp::dot(c, &first);
    let mut best = first;
    match mode {
        ObjectiveMode::Integral => {
            // invariant: threshold `lo` is met, thresholds above `hi` are not
            let mut lo = best_value.floor();
            let mut hi = upper.floor();
            while lo < hi {
                let mid = ((&lo + &hi + Rational::from_integer(1.into())) / Rational::from_integer(2.into())).floor();
                match attempt(with_threshold(lp, c, &mid))? {
                    Some(y) => {
                        let v = lp::dot(c, &y);
                        lo = v.floor().max(mid);
                        if v > best_value {
                            best_value = v;
                            best = y;
                        }
                    }
                    None => hi = mid - Rational::from_integer(1.into()),
                }
            }
        }
        ObjectiveMode::Tolerance(tol) => {
            assert!(tol.is_positive(), "tolerance must be positive");
            let mut lo = best_value.clone();
            let mut hi = upper;
            while &hi - &lo > *tol {
                let mid = (&lo + &hi) / Rational::from_integer(2.into());
                match attempt(with_threshold(lp, c, &mid))? {
                    Some(y) => {
                        let v = lp::dot(c, &y);
                        lo = v.clone().max(mid);
                        if v > best_value {
                            best_value = v;
                            best = y;
                        }
                    }
                    None => hi = mid,
                }
            }
        }
    }
    debug_assert!(lp.is_relaxed_solution(&best));
    debug_assert!(!best.is_empty() || best_value.is_zero());
    Ok(Some(OptimizeOutcome {
        value: best_value,
        witness: best,
        probes,
        restarts_used,
        steps_used,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::rational::{frac, int};
    use crate::domain::IntervalSet;

    fn e3_lp(n: usize) -> LinearProgram {
        LinearProgram::new(n).with_uniform_set(IntervalSet::ksat(3).unwrap())
    }

    fn cfg() -> WalkConfig {
        WalkConfig {
            restarts: 50,
            ..WalkConfig::default()
        }
    }

    #[test]
    fn capped_variable() {
        let mut lp = e3_lp(1);
        lp.push(vec![(0, int(1))], int(0)).unwrap();
        let tol = ObjectiveMode::Tolerance(frac(1, 64));
        let out = optimize(&lp, &[int(1)], &tol, &cfg()).unwrap().unwrap();
        assert!(out.witness[0] <= frac(1, 3));
        assert_eq!(out.value, out.witness[0]);
    }

    #[test]
    fn unconstrained_reaches_one() {
        let lp = e3_lp(1);
        for mode in [ObjectiveMode::Integral, ObjectiveMode::Tolerance(frac(1, 8))] {
            let out = optimize(&lp, &[int(1)], &mode, &cfg()).unwrap().unwrap();
            assert_eq!(out.witness, vec![int(1)]);
            assert_eq!(out.value, int(1));
        }
    }

    #[test]
    fn integral_probe_count() {
        // maximize x1 + 2x2 + 4x3 with x1 + x2 + x3 ≤ 2: optimum 6
        let mut lp = e3_lp(3);
        lp.push(vec![(0, int(1)), (1, int(1)), (2, int(1))], int(2)).unwrap();
        let c = [int(1), int(2), int(4)];
        let out = optimize(&lp, &c, &ObjectiveMode::Integral, &cfg()).unwrap().unwrap();
        assert!(out.value >= int(6));
        // range is at most 7, so at most ⌈log₂ 7⌉ + 1 probes
        assert!(out.probes <= 4, "{} probes", out.probes);
        assert!(lp.is_relaxed_solution(&out.witness));
    }

    #[test]
    fn integral_mode_rejects_fractions() {
        let lp = e3_lp(1);
        assert_eq!(
            optimize(&lp, &[frac(1, 2)], &ObjectiveMode::Integral, &cfg()),
            Err(WalkError::NonIntegralObjective)
        );
    }
}
