//! Independent ground truth: brute force, vertex enumeration, a cutting-plane
//! strategy solver, random-walk simulation and an inequality sweep.

pub mod calc;
pub mod chain;
mod cutting_plane;
pub mod generate;
pub mod suites;

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::domain::{LinearProgram, Rational};
use crate::lp::LpError;
use crate::walk::strategy::response_at;
use crate::walk::{Move, WalkContext, WalkError};

pub use cutting_plane::{cutting_plane_strategy, CuttingPlaneOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{n} variables exceeds the enumeration limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Csp(#[from] crate::csp::CspError),
    #[error(transparent)]
    Domain(#[from] crate::domain::DomainError),
}

pub const BRUTE_FORCE_LIMIT: usize = 20;
pub const VERTEX_LIMIT: usize = 4;

/// Every `x ∈ {0,1}^n` with `Ax ≤ b`, in binary counting order.
pub fn brute_force_ip(lp: &LinearProgram) -> Result<Vec<Vec<bool>>, OracleError> {
    let n = lp.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(OracleError::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut out = Vec::new();
    for bits in 0u32..1 << n {
        let x: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
        let ok = lp.rows().iter().all(|row| {
            let lhs = row
                .coeffs()
                .iter()
                .filter(|(i, _)| x[*i])
                .fold(Rational::zero(), |acc, (_, a)| acc + a);
            &lhs <= row.rhs()
        });
        if ok {
            out.push(x);
        }
    }
    Ok(out)
}

/// The distinct `x`-parts of 0-1 solutions, where `x` is the first `n_orig`
/// variables. Given `x`, the remaining variables split into blocks that share
/// no row; each block is enumerated on its own.
pub fn brute_force_projection(
    lp: &LinearProgram,
    n_orig: usize,
) -> Result<Vec<Vec<bool>>, OracleError> {
    if n_orig > BRUTE_FORCE_LIMIT {
        return Err(OracleError::TooLarge {
            n: n_orig,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    // union-find over auxiliary variables linked by rows
    let n = lp.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], v: usize) -> usize {
        let mut r = v;
        while parent[r] != r {
            r = parent[r];
        }
        parent[v] = r;
        r
    }
    for row in lp.rows() {
        let aux: Vec<usize> = row.coeffs().iter().map(|(i, _)| *i).filter(|&i| i >= n_orig).collect();
        for w in aux.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in n_orig..n {
        let root = find(&mut parent, v);
        blocks.entry(root).or_default().push(v);
    }
    let blocks: Vec<Vec<usize>> = blocks.into_values().collect();
    if let Some(big) = blocks.iter().find(|b| b.len() > BRUTE_FORCE_LIMIT) {
        return Err(OracleError::TooLarge {
            n: big.len(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let block_of = |row: &crate::domain::Row| {
        row.coeffs()
            .iter()
            .find(|(i, _)| *i >= n_orig)
            .map(|(i, _)| blocks.iter().position(|b| b.contains(i)).expect("every aux is in a block"))
    };
    let row_block: Vec<Option<usize>> = lp.rows().iter().map(block_of).collect();

    let mut out = Vec::new();
    for bits in 0u32..1 << n_orig {
        let mut full = vec![Rational::zero(); n];
        for (i, v) in full.iter_mut().enumerate().take(n_orig) {
            if bits >> i & 1 == 1 {
                *v = Rational::one();
            }
        }
        let direct_ok = lp
            .rows()
            .iter()
            .zip(&row_block)
            .filter(|(_, b)| b.is_none())
            .all(|(row, _)| row.holds(&full));
        if !direct_ok {
            continue;
        }
        let all_blocks = blocks.iter().enumerate().all(|(bi, block)| {
            let rows: Vec<&crate::domain::Row> = lp
                .rows()
                .iter()
                .zip(&row_block)
                .filter(|(_, b)| **b == Some(bi))
                .map(|(r, _)| r)
                .collect();
            (0u32..1 << block.len()).any(|wbits| {
                let mut point = full.clone();
                for (j, &v) in block.iter().enumerate() {
                    if wbits >> j & 1 == 1 {
                        point[v] = Rational::one();
                    }
                }
                rows.iter().all(|r| r.holds(&point))
            })
        });
        if all_blocks {
            out.push((0..n_orig).map(|i| bits >> i & 1 == 1).collect());
        }
    }
    Ok(out)
}

pub fn to_rationals(x: &[bool]) -> Vec<Rational> {
    x.iter()
        .map(|&b| if b { Rational::one() } else { Rational::zero() })
        .collect()
}

/// Solves the square system `M y = r` exactly; `None` if singular.
fn solve_square(mut m: Vec<Vec<Rational>>, mut r: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = r.len();
    for col in 0..n {
        let piv = (col..n).find(|&row| !m[row][col].is_zero())?;
        m.swap(col, piv);
        r.swap(col, piv);
        let inv = m[col][col].recip();
        for row in 0..n {
            if row == col || m[row][col].is_zero() {
                continue;
            }
            let f = &m[row][col] * &inv;
            for c in col..n {
                let delta = &f * &m[col][c];
                m[row][c] -= delta;
            }
            let delta = &f * &r[col];
            r[row] -= delta;
        }
    }
    Some((0..n).map(|i| &r[i] / &m[i][i]).collect())
}

/// Vertices of `{Ax ≤ b, 0 ≤ x ≤ 1}` by trying every set of `n` tight
/// constraints, for `n ≤ 4`.
pub fn vertices(lp: &LinearProgram) -> Result<Vec<Vec<Rational>>, OracleError> {
    let n = lp.n();
    if n > VERTEX_LIMIT {
        return Err(OracleError::TooLarge {
            n,
            limit: VERTEX_LIMIT,
        });
    }
    let mut planes: Vec<(Vec<Rational>, Rational)> = lp
        .rows()
        .iter()
        .map(|row| {
            let mut a = vec![Rational::zero(); n];
            for (i, v) in row.coeffs() {
                a[*i] = v.clone();
            }
            (a, row.rhs().clone())
        })
        .collect();
    for i in 0..n {
        let mut a = vec![Rational::zero(); n];
        a[i] = -Rational::one();
        planes.push((a.clone(), Rational::zero()));
        a[i] = Rational::one();
        planes.push((a, Rational::one()));
    }
    let mut found = BTreeSet::new();
    let mut pick: Vec<usize> = (0..n).collect();
    if n == 0 {
        return Ok(if lp.is_satisfied_by(&[]) { vec![vec![]] } else { vec![] });
    }
    loop {
        let m: Vec<Vec<Rational>> = pick.iter().map(|&p| planes[p].0.clone()).collect();
        let r: Vec<Rational> = pick.iter().map(|&p| planes[p].1.clone()).collect();
        if let Some(x) = solve_square(m, r) {
            let inside = planes
                .iter()
                .all(|(a, b)| crate::lp::dot(a, &x) <= *b);
            if inside {
                found.insert(x);
            }
        }
        // next n-subset in lexicographic order
        let total = planes.len();
        let Some(pos) = (0..n).rev().find(|&p| pick[p] < total - n + p) else {
            break;
        };
        pick[pos] += 1;
        for q in pos + 1..n {
            pick[q] = pick[q - 1] + 1;
        }
    }
    Ok(found.into_iter().collect())
}

/// First point where `f(x, p) < 1`, over all vertices of the relaxation for
/// `n ≤ 4` or all 0-1 solutions for larger `n`.
pub fn vertex_submartingale_check(
    ctx: &WalkContext,
    sigma: &[usize],
    moves: &[(Move, Rational)],
) -> Result<Option<Vec<Rational>>, OracleError> {
    let points = if ctx.lp().n() <= VERTEX_LIMIT {
        vertices(ctx.lp())?
    } else {
        brute_force_ip(ctx.lp())?
            .iter()
            .map(|x| to_rationals(x))
            .collect()
    };
    Ok(points
        .into_iter()
        .find(|x| response_at(ctx, sigma, moves, x) < Rational::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::rational::{frac, int};
    use crate::domain::IntervalSet;
    use crate::walk::solve_strategy;

    fn e3_ctx(lp: LinearProgram) -> WalkContext {
        WalkContext::new(lp.with_uniform_set(IntervalSet::ksat(3).unwrap())).unwrap()
    }

    #[test]
    fn brute_force_examples() {
        let mut lp = LinearProgram::new(1);
        lp.push(vec![(0, int(1))], int(0)).unwrap();
        assert_eq!(brute_force_ip(&lp).unwrap(), vec![vec![false]]);
        assert_eq!(brute_force_ip(&LinearProgram::new(2)).unwrap().len(), 4);
        assert!(matches!(
            brute_force_ip(&LinearProgram::new(21)),
            Err(OracleError::TooLarge { n: 21, .. })
        ));
    }

    #[test]
    fn vertices_of_a_triangle() {
        // x + y ≤ 1 inside the unit square
        let mut lp = LinearProgram::new(2);
        lp.push(vec![(0, int(1)), (1, int(1))], int(1)).unwrap();
        let v = vertices(&lp).unwrap();
        assert_eq!(
            v,
            vec![vec![int(0), int(0)], vec![int(0), int(1)], vec![int(1), int(0)]]
        );
        let mut half = LinearProgram::new(1);
        half.push(vec![(0, int(2))], int(1)).unwrap();
        assert_eq!(vertices(&half).unwrap(), vec![vec![int(0)], vec![frac(1, 2)]]);
        assert!(vertices(&LinearProgram::new(5)).is_err());
    }

    #[test]
    fn single_move_strategy_holds_at_vertices() {
        let mut lp = LinearProgram::new(1);
        lp.push(vec![(0, int(1))], int(0)).unwrap();
        let ctx = e3_ctx(lp);
        let p = solve_strategy(&ctx, &[1]).unwrap();
        assert_eq!(vertex_submartingale_check(&ctx, &[1], p.moves()).unwrap(), None);
    }

    #[test]
    fn misdirected_strategy_is_caught() {
        let mut lp = LinearProgram::new(2);
        lp.push(vec![(0, int(1))], int(0)).unwrap();
        let ctx = e3_ctx(lp);
        // x₁ must go down, but all mass pushes x₂ up
        let bad = vec![(Move { var: 1, interval: 1 }, int(1))];
        let witness = vertex_submartingale_check(&ctx, &[1, 0], &bad).unwrap();
        assert_eq!(witness, Some(vec![int(0), int(0)]));
    }

    #[test]
    fn unconstrained_walk_never_needs_a_strategy() {
        let ctx = e3_ctx(LinearProgram::new(2));
        let mut strategies = 0;
        let out = crate::walk::run_walk(&ctx, crate::walk::restart_rng(1, 0), true, |rec| {
            strategies += rec.strategy.is_some() as usize;
        })
        .unwrap();
        assert_eq!((out.steps_used, strategies), (1, 0));
    }
}
