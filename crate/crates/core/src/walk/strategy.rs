//! Move distributions that keep the potential a submartingale.
//!
//! For the current selection σ and a move distribution `p` over
//! `(variable i, interval j ≠ σ_i)`, the response against a point `x` is
//!
//! ```text
//! f(x, p) = Σ_ij p_ij [ (1 - x_i) U₀(j)/U₀(σ_i) + x_i U₁(j)/U₁(σ_i) ]
//!         = h(p) + g(p)ᵀx
//! ```
//!
//! A valid distribution has `min_{x ∈ K} f(x, p) ≥ 1` over the relaxation
//! `K = {Ax ≤ b, 0 ≤ x ≤ 1}`. Dualizing the inner minimization turns this
//! robust constraint into ordinary linear rows in `(p, y, v)`:
//! `g(p) + Aᵀy + v ≥ 0`, `h(p) - bᵀy - 1ᵀv ≥ 1`, `y, v ≥ 0`.

use num_traits::{One, Zero};

use super::{WalkContext, WalkError};
use crate::domain::{BoxRegion, Rational};
use crate::lp::simplex::{self, Constraint, Relation, StandardLp, StandardOutcome};
use crate::lp::{self, LpOutcome};
use crate::potential::Bit;

/// Move variable `var` into interval `interval`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub var: usize,
    pub interval: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyDistribution {
    moves: Vec<(Move, Rational)>,
}

impl StrategyDistribution {
    /// Keeps positive entries; checks they are legal for `sigma` and sum to one.
    pub fn new(
        ctx: &WalkContext,
        sigma: &[usize],
        moves: Vec<(Move, Rational)>,
    ) -> Result<Self, WalkError> {
        let moves: Vec<(Move, Rational)> =
            moves.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        let total = moves.iter().fold(Rational::zero(), |acc, (_, p)| acc + p);
        let legal = moves.iter().all(|(mv, p)| {
            p > &Rational::zero()
                && mv.var < sigma.len()
                && mv.interval < ctx.table(mv.var).k()
                && mv.interval != sigma[mv.var]
        });
        if !legal || !total.is_one() {
            return Err(WalkError::InvalidStrategy);
        }
        Ok(Self { moves })
    }

    pub fn moves(&self) -> &[(Move, Rational)] {
        &self.moves
    }

    pub fn probabilities(&self) -> Vec<Rational> {
        self.moves.iter().map(|(_, p)| p.clone()).collect()
    }
}

/// Legal moves from `sigma`, in `(var, interval)` order.
pub fn legal_moves(ctx: &WalkContext, sigma: &[usize]) -> Vec<Move> {
    let mut out = Vec::new();
    for &var in ctx.walking() {
        for interval in 0..ctx.table(var).k() {
            if interval != sigma[var] {
                out.push(Move { var, interval });
            }
        }
    }
    out
}

/// `(U₀(j)/U₀(σ_i), U₁(j)/U₁(σ_i))` for one move.
pub fn move_ratios(ctx: &WalkContext, sigma: &[usize], mv: Move) -> (Rational, Rational) {
    let t = ctx.table(mv.var);
    let s = sigma[mv.var];
    (
        t.u(Bit::Zero, mv.interval) / t.u(Bit::Zero, s),
        t.u(Bit::One, mv.interval) / t.u(Bit::One, s),
    )
}

/// `h(p)` and `g(p)` with `f(x, p) = h + gᵀx`.
pub fn affine_response(
    ctx: &WalkContext,
    sigma: &[usize],
    moves: &[(Move, Rational)],
) -> (Rational, Vec<Rational>) {
    let mut h = Rational::zero();
    let mut g = vec![Rational::zero(); ctx.lp().n()];
    for (mv, p) in moves {
        let (r0, r1) = move_ratios(ctx, sigma, *mv);
        g[mv.var] += p * (&r1 - &r0);
        h += p * r0;
    }
    (h, g)
}

/// `f(x, p)` at a specific point.
pub fn response_at(
    ctx: &WalkContext,
    sigma: &[usize],
    moves: &[(Move, Rational)],
    x: &[Rational],
) -> Rational {
    let (h, g) = affine_response(ctx, sigma, moves);
    h + lp::dot(&g, x)
}

/// `min_{x ∈ K} f(x, p)` by one exact LP solve, with the minimizing point.
pub fn worst_response(
    ctx: &WalkContext,
    sigma: &[usize],
    moves: &[(Move, Rational)],
) -> Result<(Rational, Vec<Rational>), WalkError> {
    let (h, g) = affine_response(ctx, sigma, moves);
    match lp::minimize(ctx.lp(), &g, &BoxRegion::unit(ctx.lp().n()))? {
        LpOutcome::Optimal { value, primal, .. } => Ok((h + value, primal)),
        _ => Err(WalkError::RelaxationInfeasible),
    }
}

/// Solves the Step-4 system as a single LP.
///
/// Among feasible distributions the one minimizing `Σ rank(i, j)·p_ij` is
/// returned, ranks increasing in `(i, j)` order.
pub fn solve_strategy(
    ctx: &WalkContext,
    sigma: &[usize],
) -> Result<StrategyDistribution, WalkError> {
    let lp_in = ctx.lp();
    let n = lp_in.n();
    let m = lp_in.m();
    let moves = legal_moves(ctx, sigma);
    let np = moves.len();
    if np == 0 {
        return Err(WalkError::StrategyInfeasible {
            sigma: sigma.to_vec(),
        });
    }
    // columns: p (np), then y (m), then v (n)
    let y0 = np;
    let v0 = np + m;
    let mut std = StandardLp::with_columns(np + m + n);

    let mut per_var: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    let mut h_terms = Vec::with_capacity(np + m + n);
    for (col, mv) in moves.iter().enumerate() {
        let (r0, r1) = move_ratios(ctx, sigma, *mv);
        let g = &r1 - &r0;
        if !g.is_zero() {
            per_var[mv.var].push((col, g));
        }
        h_terms.push((col, r0));
    }
    for (r, row) in lp_in.rows().iter().enumerate() {
        for (i, a) in row.coeffs() {
            per_var[*i].push((y0 + r, a.clone()));
        }
        if !row.rhs().is_zero() {
            h_terms.push((y0 + r, -row.rhs().clone()));
        }
    }
    for (i, mut terms) in per_var.into_iter().enumerate() {
        terms.push((v0 + i, Rational::one()));
        std.rows.push(Constraint::new(terms, Relation::Ge, Rational::zero()));
    }
    for i in 0..n {
        h_terms.push((v0 + i, -Rational::one()));
    }
    std.rows.push(Constraint::new(h_terms, Relation::Ge, Rational::one()));
    std.rows.push(Constraint::new(
        (0..np).map(|c| (c, Rational::one())).collect(),
        Relation::Eq,
        Rational::one(),
    ));
    for (col, c) in std.cost.iter_mut().enumerate().take(np) {
        *c = Rational::from_integer((col + 1).into());
    }

    match simplex::solve(&std) {
        StandardOutcome::Optimal { x, .. } => {
            let chosen = moves.into_iter().zip(x).collect();
            StrategyDistribution::new(ctx, sigma, chosen)
        }
        _ => Err(WalkError::StrategyInfeasible {
            sigma: sigma.to_vec(),
        }),
    }
}
