use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use super::rational::{fmt_rational, parse_rational, Rational};
use super::DomainError;

/// A closed target set `E = [c_1, d_1] ∪ ... ∪ [c_k, d_k] ⊂ [0, 1]`.
///
/// Endpoints satisfy `0 = c_1 < d_1 < c_2 < ... < c_k < d_k = 1`. The single
/// interval `[0, 1]` is also accepted; it marks a coordinate that the walk
/// never moves. Interval indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalSet {
    intervals: Vec<(Rational, Rational)>,
}

impl IntervalSet {
    pub fn new(intervals: Vec<(Rational, Rational)>) -> Result<Self, DomainError> {
        let (first, last) = match (intervals.first(), intervals.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(DomainError::MissingEndpoint),
        };
        if !first.0.is_zero() || !last.1.is_one() {
            return Err(DomainError::MissingEndpoint);
        }
        let mut prev: Option<&Rational> = None;
        for (c, d) in &intervals {
            if let Some(p) = prev {
                if c <= p {
                    return Err(DomainError::OrderViolation);
                }
            }
            if c >= d {
                return Err(DomainError::OrderViolation);
            }
            prev = Some(d);
        }
        Ok(Self { intervals })
    }

    /// The whole unit interval `[0, 1]`.
    pub fn full() -> Self {
        Self {
            intervals: vec![(Rational::zero(), Rational::one())],
        }
    }

    /// `[0, 1/k] ∪ [1 - 1/k, 1]`, the closed k-SAT set.
    pub fn ksat(k: u32) -> Result<Self, DomainError> {
        let inv = Rational::new(1.into(), k.into());
        Self::new(vec![
            (Rational::zero(), inv.clone()),
            (Rational::one() - &inv, Rational::one()),
        ])
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.intervals.len() == 1
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn lo(&self, i: usize) -> &Rational {
        &self.intervals[i].0
    }

    pub fn hi(&self, i: usize) -> &Rational {
        &self.intervals[i].1
    }

    pub fn measure(&self) -> Rational {
        self.intervals
            .iter()
            .fold(Rational::zero(), |acc, (c, d)| acc + (d - c))
    }

    /// Index of the interval containing `v`, or `None` if `v` sits in a gap.
    pub fn locate(&self, v: &Rational) -> Result<Option<usize>, DomainError> {
        if v.is_negative() || v > &Rational::one() {
            return Err(DomainError::OutOfUnitRange(fmt_rational(v)));
        }
        let idx = self.intervals.partition_point(|(_, d)| d < v);
        Ok(self
            .intervals
            .get(idx)
            .filter(|(c, _)| c <= v)
            .map(|_| idx))
    }

    pub fn contains(&self, v: &Rational) -> bool {
        matches!(self.locate(v), Ok(Some(_)))
    }

    pub fn min_length(&self) -> Rational {
        self.intervals
            .iter()
            .map(|(c, d)| d - c)
            .min()
            .expect("interval sets are nonempty")
    }

    /// Smallest gap between consecutive intervals; `None` when `k = 1`.
    pub fn min_gap(&self) -> Option<Rational> {
        self.intervals
            .windows(2)
            .map(|w| &w[1].0 - &w[0].1)
            .min()
    }

    /// `E_δ`: every interior endpoint pulled inward by `delta`, keeping 0 and 1.
    pub fn shrink(&self, delta: &Rational) -> Result<Self, DomainError> {
        if delta.is_negative() {
            return Err(DomainError::NegativeShrink);
        }
        let two = Rational::from_integer(2.into());
        let limit_ok = |x: Rational| delta * &two < x;
        if delta.is_zero() {
            return Ok(self.clone());
        }
        if !limit_ok(self.min_length()) || !self.min_gap().map_or(true, limit_ok) {
            return Err(DomainError::DeltaTooLarge);
        }
        let last = self.intervals.len() - 1;
        let intervals = self
            .intervals
            .iter()
            .enumerate()
            .map(|(i, (c, d))| {
                let c = if i == 0 { c.clone() } else { c + delta };
                let d = if i == last { d.clone() } else { d - delta };
                (c, d)
            })
            .collect();
        Self::new(intervals)
    }
}

impl FromStr for IntervalSet {
    type Err = DomainError;

    /// `c1,d1;c2,d2;...`
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut intervals = Vec::new();
        for piece in text.trim().split(';') {
            let (c, d) = piece
                .split_once(',')
                .ok_or_else(|| DomainError::MalformedRational(piece.trim().to_string()))?;
            intervals.push((parse_rational(c)?, parse_rational(d)?));
        }
        Self::new(intervals)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, d)) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{},{}", fmt_rational(c), fmt_rational(d))?;
        }
        Ok(())
    }
}
