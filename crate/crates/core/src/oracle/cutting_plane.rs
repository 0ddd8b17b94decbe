//! Move distributions by separation instead of duality.
//!
//! A finite set `X` of responses is grown one point at a time. The master LP
//! picks `p` maximizing `min_{x ∈ X} f(x, p)`; the separation step minimizes
//! `f(·, p)` over the relaxation. A minimum `M < 1` at `x*` yields the
//! hyperplane `f(x*, ·) = (M + 1)/2`, which has `p` strictly below it and
//! every valid distribution strictly above, so `x*` joins `X`.

use num_traits::{One, Zero};

use super::OracleError;
use crate::domain::{BoxRegion, Rational};
use crate::lp::simplex::{self, Constraint, Relation, StandardLp, StandardOutcome};
use crate::lp::{self, LpOutcome};
use crate::walk::strategy::{legal_moves, move_ratios, response_at, worst_response};
use crate::walk::{Move, StrategyDistribution, WalkContext, WalkError};

#[derive(Clone, Debug)]
pub struct CuttingPlaneOutcome {
    pub strategy: StrategyDistribution,
    /// Responses added to `X`, in order.
    pub responses: Vec<Vec<Rational>>,
}

fn master(
    ctx: &WalkContext,
    sigma: &[usize],
    moves: &[Move],
    responses: &[Vec<Rational>],
) -> Option<(Rational, Vec<(Move, Rational)>)> {
    let np = moves.len();
    let t = np;
    let mut std = StandardLp::with_columns(np + 1);
    let ratios: Vec<(Rational, Rational)> =
        moves.iter().map(|&mv| move_ratios(ctx, sigma, mv)).collect();
    for x in responses {
        let mut terms: Vec<(usize, Rational)> = moves
            .iter()
            .zip(&ratios)
            .enumerate()
            .map(|(col, (mv, (r0, r1)))| {
                let xi = &x[mv.var];
                (col, (Rational::one() - xi) * r0 + xi * r1)
            })
            .collect();
        terms.push((t, -Rational::one()));
        std.rows.push(Constraint::new(terms, Relation::Ge, Rational::zero()));
    }
    std.rows.push(Constraint::new(
        (0..np).map(|c| (c, Rational::one())).collect(),
        Relation::Eq,
        Rational::one(),
    ));
    std.cost[t] = -Rational::one();
    match simplex::solve(&std) {
        StandardOutcome::Optimal { x, .. } => {
            let value = x[t].clone();
            Some((value, moves.iter().copied().zip(x).take(np).collect()))
        }
        _ => None,
    }
}

/// Solves the same system as [`crate::walk::solve_strategy`] by cutting planes.
pub fn cutting_plane_strategy(
    ctx: &WalkContext,
    sigma: &[usize],
) -> Result<CuttingPlaneOutcome, OracleError> {
    let infeasible = || WalkError::StrategyInfeasible {
        sigma: sigma.to_vec(),
    };
    let moves = legal_moves(ctx, sigma);
    if moves.is_empty() {
        return Err(infeasible().into());
    }
    let start = match lp::check_feasible(ctx.lp(), &BoxRegion::unit(ctx.lp().n()))? {
        LpOutcome::Feasible { witness } => witness,
        _ => return Err(WalkError::RelaxationInfeasible.into()),
    };
    let mut responses = vec![start];
    loop {
        let (value, p) = master(ctx, sigma, &moves, &responses).ok_or_else(infeasible)?;
        if value < Rational::one() {
            return Err(infeasible().into());
        }
        let (m, x_star) = worst_response(ctx, sigma, &p)?;
        if m >= Rational::one() {
            let strategy = StrategyDistribution::new(ctx, sigma, p)?;
            return Ok(CuttingPlaneOutcome {
                strategy,
                responses,
            });
        }
        let threshold = (&m + Rational::one()) / Rational::from_integer(2.into());
        assert!(
            response_at(ctx, sigma, &p, &x_star) < threshold,
            "separating hyperplane must cut off the current distribution"
        );
        assert!(
            !responses.contains(&x_star),
            "a response already in X cannot be violated once the master value is at least 1"
        );
        responses.push(x_star);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::rational::int;
    use crate::domain::{IntervalSet, LinearProgram};
    use crate::oracle::vertex_submartingale_check;
    use crate::walk::solve_strategy;

    fn e3_ctx(lp: LinearProgram) -> WalkContext {
        WalkContext::new(lp.with_uniform_set(IntervalSet::ksat(3).unwrap())).unwrap()
    }

    #[test]
    fn forced_move_matches_duality_solver() {
        let mut lp = LinearProgram::new(1);
        lp.push(vec![(0, int(1))], int(0)).unwrap();
        let ctx = e3_ctx(lp);
        let cp = cutting_plane_strategy(&ctx, &[1]).unwrap();
        let dual = solve_strategy(&ctx, &[1]).unwrap();
        assert_eq!(cp.strategy.moves(), dual.moves());
    }

    #[test]
    fn two_variable_strategy_is_valid() {
        let mut lp = LinearProgram::new(2);
        lp.push(vec![(0, int(1)), (1, int(1))], int(0)).unwrap();
        let ctx = e3_ctx(lp);
        let cp = cutting_plane_strategy(&ctx, &[1, 1]).unwrap();
        let (worst, _) = worst_response(&ctx, &[1, 1], cp.strategy.moves()).unwrap();
        assert!(worst >= int(1));
        assert_eq!(
            vertex_submartingale_check(&ctx, &[1, 1], cp.strategy.moves()).unwrap(),
            None
        );
    }
}
