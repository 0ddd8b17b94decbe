//! Interval potentials and the constants that govern the walk.
//!
//! For `E = [c_1, d_1] ∪ ... ∪ [c_k, d_k]` the potentials are anchored at
//! `U₀(1) = U₁(k) = 1` and obey
//!
//! ```text
//! U₀(i+1) / U₀(i) = (1 - c_{i+1}) / (1 - d_i)
//! U₁(i)   / U₁(i+1) = d_i / c_{i+1}
//! ```
//!
//! From them come the quanta γ (smallest single-coordinate potential), the
//! traction τ (smallest potential jump), the canonical starting distribution,
//! the optimal starting value β and the per-restart step budget.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::domain::{IntervalSet, Rational};
use crate::lp::simplex::{self, Constraint, Relation, StandardLp, StandardOutcome};
use crate::precise::Enclosure;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PotentialError {
    #[error("traction is undefined for a single interval")]
    SingleIntervalNoTraction,
    #[error("interval index {index} out of range for a set of {k} intervals")]
    IndexOutOfRange { index: usize, k: usize },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("variable count must be positive")]
    ZeroVariables,
}

/// Which hidden bit the potential is measured against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bit {
    Zero,
    One,
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialTable {
    source: IntervalSet,
    u0: Vec<Rational>,
    u1: Vec<Rational>,
    gamma: Rational,
    tau: Option<Rational>,
    q_canonical: Vec<Rational>,
    beta: Rational,
    beta_q: Vec<Rational>,
}

impl PotentialTable {
    pub fn build(e: &IntervalSet) -> Self {
        let k = e.len();
        let one = Rational::one();

        let mut u0 = Vec::with_capacity(k);
        u0.push(one.clone());
        for i in 0..k - 1 {
            let next = &u0[i] * (&one - e.lo(i + 1)) / (&one - e.hi(i));
            u0.push(next);
        }
        let mut u1 = vec![one.clone(); k];
        for i in (0..k - 1).rev() {
            u1[i] = &u1[i + 1] * e.hi(i) / e.lo(i + 1);
        }

        let gamma = (&u0[k - 1]).min(&u1[0]).clone();
        let tau = (0..k - 1)
            .flat_map(|i| [&u0[i] / &u0[i + 1], &u1[i + 1] / &u1[i]])
            .min();
        let q_canonical = canonical_q(e);
        let (beta, beta_q) = optimal_start(&u0, &u1);
        Self {
            source: e.clone(),
            u0,
            u1,
            gamma,
            tau,
            q_canonical,
            beta,
            beta_q,
        }
    }

    pub fn source(&self) -> &IntervalSet {
        &self.source
    }

    pub fn k(&self) -> usize {
        self.u0.len()
    }

    pub fn u0(&self) -> &[Rational] {
        &self.u0
    }

    pub fn u1(&self) -> &[Rational] {
        &self.u1
    }

    pub fn u(&self, bit: Bit, i: usize) -> &Rational {
        match bit {
            Bit::Zero => &self.u0[i],
            Bit::One => &self.u1[i],
        }
    }

    /// γ(E) = min over a, i of U_a(i) = min(U₀(k), U₁(1)).
    pub fn quanta(&self) -> &Rational {
        &self.gamma
    }

    /// τ(E), the smallest ratio `U_a(i)/U_a(j) ≥ 1` with `i ≠ j`.
    pub fn traction(&self) -> Result<&Rational, PotentialError> {
        self.tau
            .as_ref()
            .ok_or(PotentialError::SingleIntervalNoTraction)
    }

    pub fn q_canonical(&self) -> &[Rational] {
        &self.q_canonical
    }

    /// β(E) = max_q min(E_q[U₀], E_q[U₁]).
    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    /// The lexicographically smallest distribution attaining β(E).
    pub fn beta_q(&self) -> &[Rational] {
        &self.beta_q
    }

    pub fn expected(&self, bit: Bit, q: &[Rational]) -> Rational {
        q.iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (i, w)| acc + w * self.u(bit, i))
    }
}

/// `q_j = (c_{j+1} - d_{j-1}) / (2 - meas(E))` with `d_0 = 0`, `c_{k+1} = 1`.
pub fn canonical_q(e: &IntervalSet) -> Vec<Rational> {
    let k = e.len();
    let norm = Rational::from_integer(2.into()) - e.measure();
    (0..k)
        .map(|j| {
            let next_c = if j + 1 < k { e.lo(j + 1).clone() } else { Rational::one() };
            let prev_d = if j > 0 { e.hi(j - 1).clone() } else { Rational::zero() };
            (next_c - prev_d) / &norm
        })
        .collect()
}

/// Solves `max t` s.t. `Σ q_i U₀(i) ≥ t`, `Σ q_i U₁(i) ≥ t`, `Σ q = 1`, `q ≥ 0`,
/// then fixes `t` and minimizes `q_1, q_2, ...` in turn.
fn optimal_start(u0: &[Rational], u1: &[Rational]) -> (Rational, Vec<Rational>) {
    let k = u0.len();
    let t = k;
    let mut lp = StandardLp::with_columns(k + 1);
    for u in [u0, u1] {
        let mut terms: Vec<(usize, Rational)> = u.iter().cloned().enumerate().collect();
        terms.push((t, -Rational::one()));
        lp.rows.push(Constraint::new(terms, Relation::Ge, Rational::zero()));
    }
    lp.rows.push(Constraint::new(
        (0..k).map(|i| (i, Rational::one())).collect(),
        Relation::Eq,
        Rational::one(),
    ));
    lp.cost[t] = -Rational::one();
    let beta = match simplex::solve(&lp) {
        StandardOutcome::Optimal { value, .. } => -value,
        other => unreachable!("the start-distribution LP is feasible and bounded: {other:?}"),
    };

    lp.rows.push(Constraint::new(vec![(t, Rational::one())], Relation::Ge, beta.clone()));
    lp.cost[t] = Rational::zero();
    let mut q = Vec::with_capacity(k);
    for i in 0..k {
        lp.cost = vec![Rational::zero(); k + 1];
        lp.cost[i] = Rational::one();
        let x = match simplex::solve(&lp) {
            StandardOutcome::Optimal { x, .. } => x,
            other => unreachable!("fixing earlier coordinates keeps the LP feasible: {other:?}"),
        };
        q.push(x[i].clone());
        lp.rows.push(Constraint::new(vec![(i, Rational::one())], Relation::Eq, x[i].clone()));
    }
    (beta, q)
}

const BUDGET_BITS: u32 = 256;

/// `T = ⌈(n+1) ln(1/γ) / ln(1 + (1/2n)(1 - 1/τ)²) + 2⌉`, from a rigorous upper
/// bound on the real-valued expression.
pub fn iteration_budget_for(
    n: usize,
    gamma: &Rational,
    tau: &Rational,
) -> Result<u64, PotentialError> {
    if n == 0 {
        return Err(PotentialError::ZeroVariables);
    }
    let one = Rational::one();
    let n_r = Rational::from_integer(n.into());
    let numer = Enclosure::exact(gamma.recip())
        .ln(BUDGET_BITS)
        .scale(&(&n_r + &one));
    let gap = &one - tau.recip();
    let inner = &one + &gap * &gap / (Rational::from_integer(2.into()) * &n_r);
    let denom = Enclosure::exact(inner).ln(BUDGET_BITS);
    let value = numer
        .div(&denom)
        .add(&Enclosure::exact(Rational::from_integer(2.into())));
    let hi = value.hi().ceil().to_integer();
    u64::try_from(hi).map_err(|_| PotentialError::LengthMismatch("budget overflows u64".into()))
}

pub fn iteration_budget(n: usize, table: &PotentialTable) -> Result<u64, PotentialError> {
    iteration_budget_for(n, table.quanta(), table.traction()?)
}

/// `U_x(σ) = Π_i U_{x_i}(σ_i)`, each coordinate against its own table.
pub fn potential_of(
    tables: &[&PotentialTable],
    x: &[bool],
    sigma: &[usize],
) -> Result<Rational, PotentialError> {
    if tables.len() != x.len() || x.len() != sigma.len() {
        return Err(PotentialError::LengthMismatch(format!(
            "{} tables, {} bits, {} indices",
            tables.len(),
            x.len(),
            sigma.len()
        )));
    }
    let mut prod = Rational::one();
    for ((t, &bit), &s) in tables.iter().zip(x).zip(sigma) {
        if s >= t.k() {
            return Err(PotentialError::IndexOutOfRange { index: s, k: t.k() });
        }
        prod *= t.u(bit.into(), s);
    }
    Ok(prod)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::rational::{frac, int};

    fn table(text: &str) -> PotentialTable {
        PotentialTable::build(&text.parse().unwrap())
    }

    #[test]
    fn three_set_table() {
        let t = table("0,1/3;2/3,1");
        assert_eq!(t.u0(), &[int(1), frac(1, 2)]);
        assert_eq!(t.u1(), &[frac(1, 2), int(1)]);
        assert_eq!(t.quanta(), &frac(1, 2));
        assert_eq!(t.traction().unwrap(), &int(2));
        assert_eq!(t.q_canonical(), &[frac(1, 2), frac(1, 2)]);
        assert_eq!(t.beta(), &frac(3, 4));
        assert_eq!(t.beta_q(), &[frac(1, 2), frac(1, 2)]);
    }

    #[test]
    fn fifths_table() {
        let t = table("0,1/5;2/5,3/5;4/5,1");
        assert_eq!(t.u0(), &[int(1), frac(3, 4), frac(3, 8)]);
        assert_eq!(t.u1(), &[frac(3, 8), frac(3, 4), int(1)]);
        // min(U₀(3), U₁(1)) by direct recurrence evaluation
        assert_eq!(t.quanta(), &frac(3, 8));
        assert_eq!(t.traction().unwrap(), &frac(4, 3));
        assert_eq!(t.q_canonical(), &[frac(2, 7), frac(3, 7), frac(2, 7)]);
        // always choosing the middle interval is optimal here
        assert_eq!(t.beta(), &frac(3, 4));
        assert_eq!(t.beta_q(), &[int(0), int(1), int(0)]);
    }

    #[test]
    fn full_interval_table() {
        let t = table("0,1");
        assert_eq!(t.u0(), &[int(1)]);
        assert_eq!(t.u1(), &[int(1)]);
        assert_eq!(t.quanta(), &int(1));
        assert_eq!(t.traction(), Err(PotentialError::SingleIntervalNoTraction));
        assert_eq!(t.q_canonical(), &[int(1)]);
        assert_eq!(t.beta(), &int(1));
        assert_eq!(iteration_budget(1, &t), Err(PotentialError::SingleIntervalNoTraction));
    }

    #[test]
    fn ksat_traction_is_k_minus_one() {
        for k in 3..=9u32 {
            let t = PotentialTable::build(&IntervalSet::ksat(k).unwrap());
            assert_eq!(t.traction().unwrap(), &int(k as i64 - 1));
            // Schöning's rate k/(2k-2)
            let e = IntervalSet::ksat(k).unwrap();
            let rate = (int(2) - e.measure()).recip();
            assert_eq!(rate, frac(k as i64, 2 * k as i64 - 2));
        }
    }

    #[test]
    fn budget_for_three_set() {
        let t = table("0,1/3;2/3,1");
        // ⌈6 ln 2 / ln(1 + 1/40) + 2⌉ = ⌈170.43...⌉
        assert_eq!(iteration_budget(5, &t).unwrap(), 171);
        assert!(iteration_budget(10, &t).unwrap() > 171);
        assert_eq!(iteration_budget(0, &t), Err(PotentialError::ZeroVariables));
    }

    #[test]
    fn budget_agrees_with_float_evaluation() {
        let t = table("0,1/5;2/5,3/5;4/5,1");
        for n in [1usize, 3, 8, 20] {
            let g = 3.0f64 / 8.0;
            let tau = 4.0f64 / 3.0;
            let nf = n as f64;
            let v = (nf + 1.0) * (1.0 / g).ln() / (1.0 + (1.0 - 1.0 / tau).powi(2) / (2.0 * nf)).ln() + 2.0;
            assert_eq!(iteration_budget(n, &t).unwrap(), v.ceil() as u64);
        }
    }

    #[test]
    fn potential_products() {
        let t = table("0,1/3;2/3,1");
        let ts = [&t, &t];
        assert_eq!(potential_of(&ts, &[false, false], &[0, 0]).unwrap(), int(1));
        assert_eq!(potential_of(&ts, &[false, true], &[1, 0]).unwrap(), frac(1, 4));
        assert_eq!(potential_of(&[&t], &[true], &[1]).unwrap(), int(1));
        assert_eq!(
            potential_of(&[&t], &[true], &[2]),
            Err(PotentialError::IndexOutOfRange { index: 2, k: 2 })
        );
        assert!(potential_of(&ts, &[true], &[1]).is_err());
    }
}
