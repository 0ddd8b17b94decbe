//! Random test instances with planted solutions.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;

use crate::csp::{CspInstance, CspTemplate, Relation};
use crate::domain::{IntervalSet, LinearProgram, Rational};

/// A valid set with `1 ≤ k ≤ max_k` intervals and endpoint denominators
/// at most `max_den`.
pub fn random_interval_set<R: Rng>(rng: &mut R, max_k: usize, max_den: i64) -> IntervalSet {
    let k = rng.gen_range(1..=max_k);
    let mut cuts = BTreeSet::new();
    while cuts.len() < 2 * k - 2 {
        let den = rng.gen_range(2..=max_den);
        let num = rng.gen_range(1..den);
        cuts.insert(Rational::new(num.into(), den.into()));
    }
    let mut points = vec![Rational::from_integer(0.into())];
    points.extend(cuts);
    points.push(Rational::from_integer(1.into()));
    let intervals = points
        .chunks(2)
        .map(|pair| (pair[0].clone(), pair[1].clone()))
        .collect();
    IntervalSet::new(intervals).expect("sorted distinct endpoints")
}

pub fn random_assignment<R: Rng>(rng: &mut R, n: usize) -> Vec<bool> {
    (0..n).map(|_| rng.gen_bool(0.5)).collect()
}

/// `m` random width-`k` clauses over distinct variables, each satisfied by
/// `planted`.
pub fn planted_ksat<R: Rng>(rng: &mut R, planted: &[bool], m: usize, k: usize) -> CspInstance {
    let n = planted.len();
    let mut inst = CspInstance::new(n);
    while inst.constraints().len() < m {
        let vars = sample(rng, n, k).into_vec();
        let negs: Vec<bool> = (0..k).map(|_| rng.gen_bool(0.5)).collect();
        if vars.iter().zip(&negs).any(|(&v, &neg)| planted[v] ^ neg) {
            let lits: Vec<i64> = vars
                .iter()
                .zip(&negs)
                .map(|(&v, &neg)| if neg { -(v as i64 + 1) } else { v as i64 + 1 })
                .collect();
            inst.add_clause(&lits).expect("literals in range");
        }
    }
    inst
}

/// `m` random width-`k` clauses with no promise of satisfiability.
pub fn random_ksat<R: Rng>(rng: &mut R, n: usize, m: usize, k: usize) -> CspInstance {
    let mut inst = CspInstance::new(n);
    for _ in 0..m {
        let lits: Vec<i64> = sample(rng, n, k)
            .into_iter()
            .map(|v| if rng.gen_bool(0.5) { -(v as i64 + 1) } else { v as i64 + 1 })
            .collect();
        inst.add_clause(&lits).expect("literals in range");
    }
    inst
}

pub fn one_in_three() -> Relation {
    Relation::new(
        "one_in_three",
        3,
        [vec![true, false, false], vec![false, true, false], vec![false, false, true]],
    )
    .expect("three tuples of arity 3")
}

/// `m` one-in-three constraints on random distinct triples.
pub fn random_one_in_three<R: Rng>(rng: &mut R, n: usize, m: usize) -> (CspInstance, CspTemplate) {
    let r = Arc::new(one_in_three());
    let mut inst = CspInstance::new(n);
    for _ in 0..m {
        inst.add(r.clone(), sample(rng, n, 3).into_vec(), None)
            .expect("arity matches");
    }
    (inst, CspTemplate::new([one_in_three()]))
}

/// Rows with coefficients in `-3..=3`, each satisfied by `planted` with
/// slack at most 2.
pub fn planted_lp<R: Rng>(rng: &mut R, planted: &[bool], m: usize) -> LinearProgram {
    let n = planted.len();
    let mut lp = LinearProgram::new(n);
    for _ in 0..m {
        let coeffs: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        let at: i64 = coeffs.iter().zip(planted).filter(|(_, &b)| b).map(|(c, _)| *c).sum();
        let rhs = at + rng.gen_range(0..=2);
        lp.push(
            coeffs
                .into_iter()
                .enumerate()
                .map(|(i, c)| (i, Rational::from_integer(c.into())))
                .collect::<Vec<_>>(),
            Rational::from_integer(rhs.into()),
        )
        .expect("indices in range");
    }
    lp
}
