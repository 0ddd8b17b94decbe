//! Exact sampling from distributions with rational weights.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::RngCore;

use crate::domain::Rational;

/// Uniform integer in `[0, bound)` by rejection from 64-bit draws.
pub fn uniform_below<R: RngCore + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    assert!(!bound.is_zero(), "empty range");
    let bits = bound.bits();
    let words = bits.div_ceil(64) as usize;
    let top_bits = bits - 64 * (words as u64 - 1);
    let mask = if top_bits == 64 { u64::MAX } else { (1u64 << top_bits) - 1 };
    loop {
        let mut digits: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
        if let Some(top) = digits.last_mut() {
            *top &= mask;
        }
        let draw = BigUint::from_slice(
            &digits
                .iter()
                .flat_map(|d| [*d as u32, (*d >> 32) as u32])
                .collect::<Vec<u32>>(),
        );
        if &draw < bound {
            return draw;
        }
    }
}

/// Draws index `i` with probability `weights[i] / Σ weights`.
///
/// Weights are scaled by their common denominator so every probability is
/// realized exactly.
pub fn sample_index<R: RngCore + ?Sized>(weights: &[Rational], rng: &mut R) -> usize {
    assert!(!weights.is_empty(), "no outcomes to sample");
    assert!(weights.iter().all(|w| !w.is_negative()), "negative weight");
    let denom = weights
        .iter()
        .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let scaled: Vec<BigInt> = weights
        .iter()
        .map(|w| w.numer() * (&denom / w.denom()))
        .collect();
    let total: BigInt = scaled.iter().sum();
    let total = total.to_biguint().expect("positive total weight");
    let mut draw = BigInt::from(uniform_below(&total, rng));
    for (i, w) in scaled.iter().enumerate() {
        if &draw < w {
            return i;
        }
        draw -= w;
    }
    unreachable!("draw below total weight")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::rational::frac;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_below_stays_in_range_and_covers() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bound = BigUint::from(7u32);
        let mut seen = [0usize; 7];
        for _ in 0..7000 {
            let v = uniform_below(&bound, &mut rng);
            seen[usize::try_from(&v).unwrap()] += 1;
        }
        assert!(seen.iter().all(|&c| (850..1150).contains(&c)), "{seen:?}");

        let huge = BigUint::one() << 130usize;
        for _ in 0..100 {
            assert!(uniform_below(&huge, &mut rng) < huge);
        }
    }

    #[test]
    fn point_mass_is_certain() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = [frac(0, 1), frac(1, 1), frac(0, 1)];
        for _ in 0..100 {
            assert_eq!(sample_index(&w, &mut rng), 1);
        }
    }

    #[test]
    fn frequencies_follow_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = [frac(2, 7), frac(3, 7), frac(2, 7)];
        let trials = 70_000;
        let mut counts = [0f64; 3];
        for _ in 0..trials {
            counts[sample_index(&w, &mut rng)] += 1.0;
        }
        for (c, p) in counts.iter().zip([2.0 / 7.0, 3.0 / 7.0, 2.0 / 7.0]) {
            let se = (p * (1.0 - p) / trials as f64).sqrt();
            assert!((c / trials as f64 - p).abs() < 4.0 * se);
        }
    }
}
