//! Exact feasibility and minimization of `Ax ≤ b` over a box.
//!
//! Every outcome carries a certificate that can be checked by substitution:
//! a witness point, a Farkas multiplier vector, or a dual vector whose bound
//! equals the optimum.

pub mod simplex;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::domain::{BoxRegion, LinearProgram, Rational};
use simplex::{Constraint, Relation, StandardLp, StandardOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("dimension mismatch: program has {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Feasible {
        witness: Vec<Rational>,
    },
    /// `farkas ≥ 0` with `min_{x ∈ box} (farkasᵀA)x > farkasᵀb`.
    Infeasible {
        farkas: Vec<Rational>,
    },
    /// `dual ≥ 0` is a row-multiplier vector whose [`dual_bound`] equals `value`.
    Optimal {
        value: Rational,
        primal: Vec<Rational>,
        dual: Vec<Rational>,
    },
    Unbounded,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible { .. } | LpOutcome::Optimal { .. })
    }
}

/// Is there `y` in `region` with `Ay ≤ b`?
pub fn check_feasible(lp: &LinearProgram, region: &BoxRegion) -> Result<LpOutcome, LpError> {
    let out = solve_boxed(lp, None, region)?;
    Ok(match out {
        LpOutcome::Optimal { primal, .. } => LpOutcome::Feasible { witness: primal },
        other => other,
    })
}

/// `min objectiveᵀx` over `{Ax ≤ b} ∩ region`.
pub fn minimize(
    lp: &LinearProgram,
    objective: &[Rational],
    region: &BoxRegion,
) -> Result<LpOutcome, LpError> {
    if objective.len() != lp.n() {
        return Err(LpError::DimensionMismatch {
            expected: lp.n(),
            got: objective.len(),
        });
    }
    solve_boxed(lp, Some(objective), region)
}

/// Feasibility of the plain relaxation `{Ax ≤ b, 0 ≤ x ≤ 1}`.
pub fn relaxation_feasible(lp: &LinearProgram) -> bool {
    check_feasible(lp, &BoxRegion::unit(lp.n()))
        .map(|o| o.is_feasible())
        .unwrap_or(false)
}

fn solve_boxed(
    lp: &LinearProgram,
    objective: Option<&[Rational]>,
    region: &BoxRegion,
) -> Result<LpOutcome, LpError> {
    if region.dim() != lp.n() {
        return Err(LpError::DimensionMismatch {
            expected: lp.n(),
            got: region.dim(),
        });
    }
    let bounds = region.bounds();
    // shift x = lo + x' so every column starts at zero
    let mut std = StandardLp::with_columns(lp.n());
    std.upper = bounds.iter().map(|(lo, hi)| Some(hi - lo)).collect();
    if let Some(c) = objective {
        std.cost = c.to_vec();
    }
    std.rows = lp
        .rows()
        .iter()
        .map(|row| {
            let shift = row
                .coeffs()
                .iter()
                .fold(Rational::zero(), |acc, (j, a)| acc + a * &bounds[*j].0);
            Constraint::new(row.coeffs().to_vec(), Relation::Le, row.rhs() - shift)
        })
        .collect();

    let outcome = match simplex::solve(&std) {
        StandardOutcome::Optimal { x, duals, .. } => {
            let primal: Vec<Rational> = x
                .into_iter()
                .zip(bounds)
                .map(|(v, (lo, _))| v + lo)
                .collect();
            let dual: Vec<Rational> = duals.into_iter().map(|y| -y).collect();
            let value = match objective {
                Some(c) => dot(c, &primal),
                None => Rational::zero(),
            };
            debug_assert!(lp.rows().iter().all(|r| r.holds(&primal)) && region.contains(&primal));
            debug_assert_eq!(dual_bound(lp, objective, region, &dual).as_ref(), Some(&value));
            LpOutcome::Optimal {
                value,
                primal,
                dual,
            }
        }
        StandardOutcome::Infeasible { duals } => {
            let farkas: Vec<Rational> = duals.into_iter().map(|y| -y).collect();
            debug_assert!(verify_farkas(lp, region, &farkas));
            LpOutcome::Infeasible { farkas }
        }
        StandardOutcome::Unbounded => unreachable!("box-bounded programs cannot be unbounded"),
    };
    Ok(outcome)
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Weak-duality lower bound on `min cᵀx` over `{Ax ≤ b} ∩ region` from the
/// multipliers `lambda ≥ 0`: `-bᵀλ + Σ_j min_{x_j ∈ [lo_j, hi_j]} (c + Aᵀλ)_j x_j`.
///
/// `None` if any multiplier is negative or the length is wrong.
pub fn dual_bound(
    lp: &LinearProgram,
    objective: Option<&[Rational]>,
    region: &BoxRegion,
    lambda: &[Rational],
) -> Option<Rational> {
    if lambda.len() != lp.m() || lambda.iter().any(|l| l.is_negative()) {
        return None;
    }
    let mut reduced: Vec<Rational> = match objective {
        Some(c) => c.to_vec(),
        None => vec![Rational::zero(); lp.n()],
    };
    let mut bound = Rational::zero();
    for (row, l) in lp.rows().iter().zip(lambda) {
        if l.is_zero() {
            continue;
        }
        bound -= row.rhs() * l;
        for (j, a) in row.coeffs() {
            reduced[*j] += a * l;
        }
    }
    for (r, (lo, hi)) in reduced.iter().zip(region.bounds()) {
        bound += if r.is_positive() { r * lo } else { r * hi };
    }
    Some(bound)
}

/// Does `farkas` prove `{Ax ≤ b} ∩ region` empty?
pub fn verify_farkas(lp: &LinearProgram, region: &BoxRegion, farkas: &[Rational]) -> bool {
    dual_bound(lp, None, region, farkas).is_some_and(|b| b.is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::rational::{frac, int};

    fn single_row(coeffs: Vec<(usize, Rational)>, rhs: Rational, n: usize) -> LinearProgram {
        let mut lp = LinearProgram::new(n);
        lp.push(coeffs, rhs).unwrap();
        lp
    }

    fn boxed(bounds: &[(Rational, Rational)]) -> BoxRegion {
        BoxRegion::new(bounds.to_vec()).unwrap()
    }

    #[test]
    fn feasible_at_zero() {
        let lp = single_row(vec![(0, int(1))], int(0), 1);
        let out = check_feasible(&lp, &boxed(&[(int(0), frac(1, 3))])).unwrap();
        assert_eq!(out, LpOutcome::Feasible { witness: vec![int(0)] });
    }

    #[test]
    fn infeasible_upper_box() {
        let lp = single_row(vec![(0, int(1))], int(0), 1);
        let region = boxed(&[(frac(2, 3), int(1))]);
        match check_feasible(&lp, &region).unwrap() {
            LpOutcome::Infeasible { farkas } => assert!(verify_farkas(&lp, &region, &farkas)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn clause_in_low_box() {
        let lp = single_row(vec![(0, int(-1)), (1, int(-1)), (2, int(-1))], int(-1), 3);
        let third = (int(0), frac(1, 3));
        let region = boxed(&[third.clone(), third.clone(), third]);
        // the only point of the box meeting the clause is its top corner
        assert_eq!(
            check_feasible(&lp, &region).unwrap(),
            LpOutcome::Feasible {
                witness: vec![frac(1, 3); 3]
            }
        );
    }

    #[test]
    fn minimize_examples() {
        let free = LinearProgram::new(1);
        let unit = BoxRegion::unit(1);
        match minimize(&free, &[int(1)], &unit).unwrap() {
            LpOutcome::Optimal { value, primal, .. } => {
                assert_eq!(value, int(0));
                assert_eq!(primal, vec![int(0)]);
            }
            other => panic!("{other:?}"),
        }

        let cover = single_row(vec![(0, int(-1)), (1, int(-1))], int(-1), 2);
        match minimize(&cover, &[int(1), int(1)], &BoxRegion::unit(2)).unwrap() {
            LpOutcome::Optimal { value, dual, .. } => {
                assert_eq!(value, int(1));
                assert_eq!(dual, vec![int(1)]);
            }
            other => panic!("{other:?}"),
        }

        let half = single_row(vec![(0, int(2))], int(1), 1);
        match minimize(&half, &[int(-1)], &unit).unwrap() {
            LpOutcome::Optimal { value, primal, dual } => {
                assert_eq!(value, frac(-1, 2));
                assert_eq!(primal, vec![frac(1, 2)]);
                assert_eq!(dual_bound(&half, Some(&[int(-1)]), &unit, &dual), Some(value));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch() {
        let lp = LinearProgram::new(2);
        assert!(matches!(
            check_feasible(&lp, &BoxRegion::unit(3)),
            Err(LpError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            minimize(&lp, &[int(1)], &BoxRegion::unit(2)),
            Err(LpError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn empty_relaxation() {
        let lp = single_row(vec![(0, int(1))], int(-1), 1);
        assert!(!relaxation_feasible(&lp));
        assert!(relaxation_feasible(&LinearProgram::new(4)));
    }
}
