//! The randomized interval walk.
//!
//! Each variable `i` carries an interval set `E_i`; the walk keeps one
//! interval index per variable. At every step it asks the LP whether the
//! selected box already contains a solution. If not, it solves for a move
//! distribution under which the potential of every relaxed solution is a
//! submartingale, and applies one sampled single-coordinate move.

mod optimize;
pub mod sample;
pub mod strategy;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::domain::{BoxRegion, IntervalSet, LinearProgram, Rational};
use crate::lp::{self, LpError, LpOutcome};
use crate::potential::{self, PotentialError, PotentialTable};

pub use optimize::{optimize, ObjectiveMode, OptimizeOutcome};
pub use strategy::{solve_strategy, Move, StrategyDistribution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("the relaxation {{Ax <= b, 0 <= x <= 1}} is empty")]
    RelaxationInfeasible,
    #[error("no valid move distribution at selection {sigma:?}")]
    StrategyInfeasible { sigma: Vec<usize> },
    #[error("move distribution fails the submartingale check at selection {sigma:?}")]
    StrategyUnsound { sigma: Vec<usize> },
    #[error("move distribution is not a legal probability vector")]
    InvalidStrategy,
    #[error("restart budget {needed} exceeds the cap {cap}")]
    RestartBudgetTooLarge { needed: String, cap: u64 },
    #[error("objective must have integer coefficients in integral mode")]
    NonIntegralObjective,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A program together with everything the walk precomputes for it.
#[derive(Clone, Debug)]
pub struct WalkContext {
    lp: LinearProgram,
    tables: Vec<Arc<PotentialTable>>,
    walking: Vec<usize>,
    budget: u64,
    visits: Arc<Mutex<HashMap<Vec<usize>, Visit>>>,
}

/// Selections remembered per context; later selections are recomputed.
const VISIT_CACHE_LIMIT: usize = 1 << 16;

/// What the walk learns at one selection; a pure function of the selection.
#[derive(Clone, Debug)]
enum Visit {
    Witness(Vec<Rational>),
    Blocked {
        strategy: Arc<StrategyDistribution>,
        verified: bool,
    },
}

impl WalkContext {
    /// Builds one potential table per distinct interval set.
    pub fn new(lp: LinearProgram) -> Result<Self, WalkError> {
        let mut cache: HashMap<IntervalSet, Arc<PotentialTable>> = HashMap::new();
        let tables: Vec<Arc<PotentialTable>> = lp
            .var_sets()
            .iter()
            .map(|e| {
                cache
                    .entry((**e).clone())
                    .or_insert_with(|| Arc::new(PotentialTable::build(e)))
                    .clone()
            })
            .collect();
        let walking: Vec<usize> = (0..lp.n()).filter(|&i| tables[i].k() >= 2).collect();
        let budget = match walking.first() {
            None => 1,
            Some(_) => {
                let gamma = walking.iter().map(|&i| tables[i].quanta()).min().cloned();
                let tau = walking
                    .iter()
                    .map(|&i| tables[i].traction())
                    .collect::<Result<Vec<_>, _>>()?
                    .into_iter()
                    .min()
                    .cloned();
                let (gamma, tau) = (gamma.expect("nonempty"), tau.expect("nonempty"));
                potential::iteration_budget_for(walking.len(), &gamma, &tau)?
            }
        };
        Ok(Self {
            lp,
            tables,
            walking,
            budget,
            visits: Arc::default(),
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn lp(&self) -> &LinearProgram {
        &self.lp
    }

    pub fn table(&self, i: usize) -> &PotentialTable {
        &self.tables[i]
    }

    pub fn tables(&self) -> Vec<&PotentialTable> {
        self.tables.iter().map(|t| t.as_ref()).collect()
    }

    /// Variables with at least two intervals, in index order.
    pub fn walking(&self) -> &[usize] {
        &self.walking
    }

    /// Steps per restart.
    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// `n_w · Π (2 - meas(E_i))` over walking variables, the expected number
    /// of restarts up to polynomial factors.
    pub fn restart_scale(&self) -> Rational {
        let two = Rational::from_integer(2.into());
        let prod = self
            .walking
            .iter()
            .fold(Rational::one(), |acc, &i| acc * (&two - self.lp.var_set(i).measure()));
        prod * Rational::from_integer(self.walking.len().into())
    }

    fn visit(&self, sigma: &[usize], verify: bool) -> Result<Visit, WalkError> {
        let cached = self.visits.lock().expect("visit cache").get(sigma).cloned();
        let strategy = match cached {
            Some(Visit::Blocked { verified: false, strategy }) if verify => strategy,
            Some(hit) => return Ok(hit),
            None => match feasibility_probe(self, sigma)? {
                Probe::Witness(y) => {
                    let visit = Visit::Witness(y);
                    self.remember(sigma, &visit);
                    return Ok(visit);
                }
                Probe::Blocked(_) => Arc::new(solve_strategy(self, sigma)?),
            },
        };
        if verify {
            let (worst, _) = strategy::worst_response(self, sigma, strategy.moves())?;
            if worst < Rational::one() {
                return Err(WalkError::StrategyUnsound {
                    sigma: sigma.to_vec(),
                });
            }
        }
        let visit = Visit::Blocked {
            strategy,
            verified: verify,
        };
        self.remember(sigma, &visit);
        Ok(visit)
    }

    fn remember(&self, sigma: &[usize], visit: &Visit) {
        let mut visits = self.visits.lock().expect("visit cache");
        if visits.len() < VISIT_CACHE_LIMIT || visits.contains_key(sigma) {
            visits.insert(sigma.to_vec(), visit.clone());
        }
    }

    pub fn auto_restarts(&self, cap: u64) -> Result<u64, WalkError> {
        let scale = self.restart_scale();
        let needed = scale.ceil().to_integer().max(1.into());
        match u64::try_from(&needed) {
            Ok(r) if r <= cap => Ok(r),
            _ => Err(WalkError::RestartBudgetTooLarge {
                needed: needed.to_string(),
                cap,
            }),
        }
    }
}

pub struct WalkState {
    pub sigma: Vec<usize>,
    pub step: u64,
    pub rng: ChaCha8Rng,
}

/// Fresh state: each σ_i drawn independently from its canonical distribution.
pub fn init_state(ctx: &WalkContext, mut rng: ChaCha8Rng) -> WalkState {
    let mut sigma = vec![0; ctx.lp().n()];
    for &i in ctx.walking() {
        sigma[i] = sample::sample_index(ctx.table(i).q_canonical(), &mut rng);
    }
    WalkState {
        sigma,
        step: 0,
        rng,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Probe {
    Witness(Vec<Rational>),
    /// Farkas multipliers proving the selected box misses `Ax ≤ b`.
    Blocked(Vec<Rational>),
}

pub fn feasibility_probe(ctx: &WalkContext, sigma: &[usize]) -> Result<Probe, WalkError> {
    if sigma.len() != ctx.lp().n() {
        return Err(WalkError::DimensionMismatch {
            expected: ctx.lp().n(),
            got: sigma.len(),
        });
    }
    let region = BoxRegion::from_selection(ctx.lp().var_sets(), sigma);
    match lp::check_feasible(ctx.lp(), &region)? {
        LpOutcome::Feasible { witness } => {
            assert!(
                ctx.lp().is_relaxed_solution(&witness),
                "probe witness fails exact verification"
            );
            Ok(Probe::Witness(witness))
        }
        LpOutcome::Infeasible { farkas } => Ok(Probe::Blocked(farkas)),
        other => unreachable!("feasibility has no objective: {other:?}"),
    }
}

/// Applies one sampled move in place and returns it.
pub fn step(state: &mut WalkState, p: &StrategyDistribution) -> Move {
    let idx = sample::sample_index(&p.probabilities(), &mut state.rng);
    let mv = p.moves()[idx].0;
    state.sigma[mv.var] = mv.interval;
    state.step += 1;
    mv
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WalkStatus {
    Solved(Vec<Rational>),
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkOutcome {
    pub status: WalkStatus,
    pub steps_used: u64,
    pub restarts_used: u64,
    pub per_restart_steps: Vec<u64>,
}

impl WalkOutcome {
    pub fn witness(&self) -> Option<&[Rational]> {
        match &self.status {
            WalkStatus::Solved(y) => Some(y),
            WalkStatus::Exhausted => None,
        }
    }
}

/// One iteration as seen by an observer.
pub struct StepRecord<'a> {
    pub step: u64,
    pub sigma: &'a [usize],
    pub strategy: Option<&'a StrategyDistribution>,
    pub taken: Option<Move>,
}

#[derive(Clone, Debug)]
pub struct WalkConfig {
    pub seed: u64,
    pub restarts: u64,
    pub jobs: usize,
    /// Re-solve the inner minimization for every strategy.
    pub verify_strategies: bool,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            restarts: 1,
            jobs: 1,
            verify_strategies: true,
        }
    }
}

/// The RNG for restart `index`: a fixed seed with one stream per restart.
pub fn restart_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One restart of at most `ctx.budget()` iterations.
pub fn run_walk(
    ctx: &WalkContext,
    rng: ChaCha8Rng,
    verify: bool,
    mut observe: impl FnMut(&StepRecord),
) -> Result<WalkOutcome, WalkError> {
    let mut state = init_state(ctx, rng);
    for t in 1..=ctx.budget() {
        let p = match ctx.visit(&state.sigma, verify)? {
            Visit::Witness(y) => {
                observe(&StepRecord {
                    step: t,
                    sigma: &state.sigma,
                    strategy: None,
                    taken: None,
                });
                return Ok(WalkOutcome {
                    status: WalkStatus::Solved(y),
                    steps_used: t,
                    restarts_used: 1,
                    per_restart_steps: vec![t],
                });
            }
            Visit::Blocked { strategy, .. } => strategy,
        };
        let before = state.sigma.clone();
        let mv = step(&mut state, &p);
        observe(&StepRecord {
            step: t,
            sigma: &before,
            strategy: Some(&p),
            taken: Some(mv),
        });
    }
    Ok(WalkOutcome {
        status: WalkStatus::Exhausted,
        steps_used: ctx.budget(),
        restarts_used: 1,
        per_restart_steps: vec![ctx.budget()],
    })
}

/// Up to `config.restarts` independent restarts.
///
/// The reported restart is the lowest-indexed one that succeeds, so the
/// outcome does not depend on `config.jobs`.
pub fn solve(ctx: &WalkContext, config: &WalkConfig) -> Result<WalkOutcome, WalkError> {
    if !lp::relaxation_feasible(ctx.lp()) {
        return Err(WalkError::RelaxationInfeasible);
    }
    let jobs = config.jobs.max(1);
    let pool = if jobs > 1 {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build().ok()
    } else {
        None
    };
    let run_one = |index: u64| {
        run_walk(
            ctx,
            restart_rng(config.seed, index),
            config.verify_strategies,
            |_| {},
        )
    };

    let mut per_restart_steps = Vec::new();
    let mut next = 0u64;
    while next < config.restarts {
        let end = config.restarts.min(next + jobs as u64);
        let batch: Vec<Result<WalkOutcome, WalkError>> = match &pool {
            Some(pool) => pool.install(|| (next..end).into_par_iter().map(run_one).collect()),
            None => (next..end).map(run_one).collect(),
        };
        for outcome in batch {
            let outcome = outcome?;
            per_restart_steps.push(outcome.steps_used);
            if let WalkStatus::Solved(y) = outcome.status {
                return Ok(WalkOutcome {
                    status: WalkStatus::Solved(y),
                    steps_used: per_restart_steps.iter().sum(),
                    restarts_used: per_restart_steps.len() as u64,
                    per_restart_steps,
                });
            }
        }
        next = end;
    }
    Ok(WalkOutcome {
        status: WalkStatus::Exhausted,
        steps_used: per_restart_steps.iter().sum(),
        restarts_used: per_restart_steps.len() as u64,
        per_restart_steps,
    })
}

/// Is `sigma` a valid selection for `ctx`?
pub fn valid_selection(ctx: &WalkContext, sigma: &[usize]) -> bool {
    sigma.len() == ctx.lp().n() && sigma.iter().enumerate().all(|(i, &s)| s < ctx.table(i).k())
}
