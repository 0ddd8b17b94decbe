//! Rigorous real-number enclosures with dyadic outward rounding.
//!
//! An [`Enclosure`] is a closed interval `[lo, hi]` of rationals that is
//! guaranteed to contain the real value it stands for. Arithmetic on
//! enclosures is exact; [`Enclosure::rounded`] trims endpoints outward to a
//! multiple of `2^-bits` so sizes stay bounded. `ln` and `exp` use series with
//! explicit tail bounds, so every result is a proof-grade bracket.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::domain::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: Rational,
    hi: Rational,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn round_down(r: &Rational, bits: u32) -> Rational {
    let scale = pow2(bits);
    let scaled = r * Rational::from_integer(scale.clone());
    Rational::new(scaled.numer().div_floor(scaled.denom()), scale)
}

fn round_up(r: &Rational, bits: u32) -> Rational {
    let scale = pow2(bits);
    let scaled = r * Rational::from_integer(scale.clone());
    Rational::new(-((-scaled.numer()).div_floor(scaled.denom())), scale)
}

impl Enclosure {
    pub fn exact(v: Rational) -> Self {
        Self { lo: v.clone(), hi: v }
    }

    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "empty enclosure");
        Self { lo, hi }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn rounded(&self, bits: u32) -> Self {
        Self {
            lo: round_down(&self.lo, bits),
            hi: round_up(&self.hi, bits),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().expect("nonempty").clone();
        let hi = c.iter().max().expect("nonempty").clone();
        Self { lo, hi }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        self.mul(&Self::exact(k.clone()))
    }

    /// Division by an enclosure that excludes zero.
    pub fn div(&self, o: &Self) -> Self {
        assert!(
            o.lo.is_positive() || o.hi.is_negative(),
            "division by an enclosure containing zero"
        );
        let inv = Self {
            lo: o.hi.recip(),
            hi: o.lo.recip(),
        };
        self.mul(&inv)
    }

    /// Natural logarithm of a positive enclosure.
    pub fn ln(&self, bits: u32) -> Self {
        assert!(self.lo.is_positive(), "ln of a non-positive enclosure");
        Self {
            lo: ln_rational(&self.lo, bits).lo,
            hi: ln_rational(&self.hi, bits).hi,
        }
    }

    pub fn exp(&self, bits: u32) -> Self {
        Self {
            lo: exp_rational(&self.lo, bits).lo,
            hi: exp_rational(&self.hi, bits).hi,
        }
    }

    /// `self^exponent` for a positive base.
    pub fn powf(&self, exponent: &Self, bits: u32) -> Self {
        exponent.mul(&self.ln(bits + 16)).rounded(bits + 16).exp(bits)
    }
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// `[lo, hi] / 2^w` as an enclosure.
fn from_fixed(lo: BigInt, hi: BigInt, w: u32) -> Enclosure {
    Enclosure {
        lo: Rational::new(lo, pow2(w)),
        hi: Rational::new(hi, pow2(w)),
    }
}

/// `2·atanh(z) = Σ 2 z^{2i+1}/(2i+1)` for `0 ≤ z < 1`, summed in fixed point
/// with `w` fractional bits.
///
/// `P_i = ⌊P_{i-1} z²⌋` underestimates `z^{2i+1} 2^w` by less than `i + 1`
/// units, and once `P_K = 0` the tail is at most
/// `2 (K + 1) / ((2K + 1)(1 - z²))` units.
fn two_atanh(z: &Rational, bits: u32) -> Enclosure {
    if z.is_zero() {
        return Enclosure::exact(Rational::zero());
    }
    let w = bits + 32;
    let z2 = z * z;
    let (a, b) = (z2.numer().clone(), z2.denom().clone());
    let mut p = (z.numer() << w as usize).div_floor(z.denom());
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    let mut i: u64 = 0;
    while !p.is_zero() {
        let d = BigInt::from(2 * i + 1);
        lo += (&p << 1usize).div_floor(&d);
        hi += ceil_div(&((&p + BigInt::from(i + 1)) << 1usize), &d);
        p = (&p * &a).div_floor(&b);
        i += 1;
    }
    let tail = ceil_div(
        &(BigInt::from(2 * (i + 1)) * &b),
        &(BigInt::from(2 * i + 1) * (&b - &a)),
    );
    hi += tail;
    from_fixed(lo, hi, w).rounded(bits)
}

fn ln2(bits: u32) -> Enclosure {
    two_atanh(&Rational::new(1.into(), 3.into()), bits)
}

/// `ln x` for rational `x > 0`.
pub fn ln_rational(x: &Rational, bits: u32) -> Enclosure {
    assert!(x.is_positive(), "ln of a non-positive number");
    if x.is_one() {
        return Enclosure::exact(Rational::zero());
    }
    // x = 2^m · y with y in [1, 2)
    let mut m: i64 = x.numer().bits() as i64 - x.denom().bits() as i64;
    let shifted = |m: i64| {
        if m >= 0 {
            x / Rational::from_integer(pow2(m as u32))
        } else {
            x * Rational::from_integer(pow2((-m) as u32))
        }
    };
    let mut y = shifted(m);
    while y >= Rational::from_integer(2.into()) {
        m += 1;
        y = shifted(m);
    }
    while y < Rational::one() {
        m -= 1;
        y = shifted(m);
    }
    let guard = bits + 8 + (64 - m.unsigned_abs().leading_zeros());
    let z = (&y - Rational::one()) / (&y + Rational::one());
    let mut out = two_atanh(&z, guard);
    if m != 0 {
        out = out.add(&ln2(guard).scale(&Rational::from_integer(m.into())));
    }
    out.rounded(bits)
}

/// `e^x` for rational `x`.
pub fn exp_rational(x: &Rational, bits: u32) -> Enclosure {
    if x.is_zero() {
        return Enclosure::exact(Rational::one());
    }
    if x.is_negative() {
        let pos = exp_rational(&-x, bits + 8);
        return Enclosure {
            lo: pos.hi.recip(),
            hi: pos.lo.recip(),
        }
        .rounded(bits);
    }
    // e^x = (e^{x/2^j})^{2^j} with x/2^j ≤ 1/2
    let half = Rational::new(1.into(), 2.into());
    let mut j: u32 = 0;
    let mut s = x.clone();
    while s > half {
        s /= Rational::from_integer(2.into());
        j += 1;
    }
    // magnitude of the result adds integer bits that squaring amplifies
    let mag = {
        use num_traits::ToPrimitive;
        (x.to_f64().unwrap_or(f64::MAX) * std::f64::consts::LOG2_E).ceil() as u32
    };
    let work = bits + 32 + 2 * j + mag;
    // T_k = ⌊T_{k-1} s / k⌋ underestimates s^k/k! 2^w by at most 2 units;
    // once T_K = 0 the remaining terms add at most 4 units since s/k ≤ 1/2
    let (a, b) = (s.numer().clone(), s.denom().clone());
    let mut t = pow2(work);
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    let mut k: u64 = 0;
    while !t.is_zero() {
        lo += &t;
        hi += &t + BigInt::from(2);
        k += 1;
        t = (&t * &a).div_floor(&(&b * BigInt::from(k)));
    }
    hi += BigInt::from(4);
    for _ in 0..j {
        lo = (&lo * &lo) >> work as usize;
        hi = ceil_div(&(&hi * &hi), &pow2(work));
    }
    let out = from_fixed(lo, hi, work);
    out.rounded(bits)
}
