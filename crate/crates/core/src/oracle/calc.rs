//! Grid check of the two-sided power inequality
//!
//! ```text
//! min(τ^{-(1+ε)} - (1+ε)/τ + ε,  τ^{1+ε} - (1+ε)τ + ε) ≥ (ε/2)(1 - 1/τ)²
//! ```
//!
//! evaluated with rigorous enclosures.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::domain::{fmt_rational, Rational};
use crate::precise::Enclosure;

const BITS: u32 = 256;
const RECHECK_BITS: u32 = 512;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepPoint {
    pub tau: Rational,
    pub eps: Rational,
    /// Enclosure of `min(lhs) - rhs`.
    pub margin: Enclosure,
    pub bits: u32,
    pub holds: bool,
}

impl SweepPoint {
    pub fn is_equality(&self) -> bool {
        self.margin.lo().is_zero() && self.margin.hi().is_zero()
    }

    pub fn describe(&self) -> String {
        format!(
            "tau={} eps={} margin>={}",
            fmt_rational(&self.tau),
            fmt_rational(&self.eps),
            crate::domain::rational::to_f64(self.margin.lo())
        )
    }
}

fn margin(tau: &Rational, eps: &Rational, bits: u32) -> Enclosure {
    let one = Rational::one();
    let p = &one + eps;
    let base = Enclosure::exact(tau.clone());
    let up = base.powf(&Enclosure::exact(p.clone()), bits);
    let down = Enclosure::new(up.hi().recip(), up.lo().recip()).rounded(bits);
    let a = down.add(&Enclosure::exact(eps - &p / tau));
    let b = up.add(&Enclosure::exact(eps - &p * tau));
    let lhs = Enclosure::new(a.lo().min(b.lo()).clone(), a.hi().min(b.hi()).clone());
    let gap = &one - tau.recip();
    let rhs = eps * &gap * &gap / Rational::from_integer(2.into());
    lhs.sub(&Enclosure::exact(rhs))
}

/// One grid point; an undecided result close to zero is redone at higher precision.
pub fn check_point(tau: &Rational, eps: &Rational) -> SweepPoint {
    assert!(tau >= &Rational::one() && eps.is_positive(), "need τ ≥ 1 and ε > 0");
    let mut bits = BITS;
    let mut m = margin(tau, eps, bits);
    let near = Rational::new(BigInt::one(), BigInt::one() << 128usize);
    if m.lo().is_negative() && -m.lo().clone() < near {
        bits = RECHECK_BITS;
        m = margin(tau, eps, bits);
    }
    let holds = !m.lo().is_negative();
    SweepPoint {
        tau: tau.clone(),
        eps: eps.clone(),
        margin: m,
        bits,
        holds,
    }
}

/// `τ ∈ {1 + i/10 : 0 ≤ i ≤ 90}`, `ε ∈ {j/10 : 1 ≤ j ≤ 20}`.
pub fn default_grid() -> (Vec<Rational>, Vec<Rational>) {
    let tenth = |i: i64| Rational::new(i.into(), 10.into());
    (
        (0..=90).map(|i| Rational::one() + tenth(i)).collect(),
        (1..=20).map(tenth).collect(),
    )
}

pub fn calc_inequality_sweep(taus: &[Rational], epss: &[Rational]) -> Vec<SweepPoint> {
    taus.iter()
        .flat_map(|t| epss.iter().map(move |e| check_point(t, e)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::rational::{frac, int};

    #[test]
    fn equality_at_tau_one() {
        for e in [frac(1, 10), int(1), int(2)] {
            let p = check_point(&int(1), &e);
            assert!(p.holds && p.is_equality());
        }
    }

    #[test]
    fn tau_two_eps_one() {
        // min(1/4 - 1 + 1, 4 - 4 + 1) - 1/8 = 1/8, exactly representable
        let p = check_point(&int(2), &int(1));
        assert!(p.holds);
        assert!(p.margin.lo() <= &frac(1, 8) && &frac(1, 8) <= p.margin.hi());
        assert!(p.margin.width() < frac(1, 1 << 40));
    }

    #[test]
    fn grid_shape() {
        let (t, e) = default_grid();
        assert_eq!((t.len(), e.len()), (91, 20));
        assert_eq!(t[90], int(10));
    }
}
