//! Monte-Carlo check of the hitting bound for multiplicative submartingales.
//!
//! Chains live on the lattice `X = τ^{-j}`: level 0 is `X = 1`, a floor level
//! drops to the absorbing state `X = 0`. Interior levels step up (×τ) with
//! probability `p ≥ 1/(τ+1)` and down (÷τ) otherwise, which makes `X` a
//! submartingale whose ratios avoid `(1/τ, τ)`.

use num_traits::{One, Zero};
use rand::Rng;

use crate::domain::rational::to_f64;
use crate::domain::Rational;
use crate::precise::Enclosure;
use crate::walk::sample::sample_index;

const BITS: u32 = 256;

#[derive(Clone, Debug)]
pub struct ChainSpec {
    pub name: &'static str,
    /// Integer ratio `τ > 1`.
    pub tau: u32,
    pub eps: Rational,
    /// `(level j, probability)` pairs for `X₁ = τ^{-j}`.
    pub start: Vec<(u32, Rational)>,
    pub p_up: Rational,
    /// Deepest level; its down move goes to 0.
    pub floor: u32,
}

#[derive(Clone, Debug)]
pub struct SimResult {
    pub horizon: u64,
    pub trials: u64,
    pub estimate: f64,
    pub std_err: f64,
    /// `½ E[X₁^{1+ε}]`, rounded down.
    pub bound: f64,
}

impl SimResult {
    /// Estimate at least the bound minus three standard errors.
    pub fn passes(&self) -> bool {
        self.estimate >= self.bound - 3.0 * self.std_err
    }
}

impl ChainSpec {
    fn tau_r(&self) -> Rational {
        Rational::from_integer(self.tau.into())
    }

    /// Up-probability at the floor, where the down move lands on 0.
    fn floor_up(&self) -> Rational {
        self.p_up.clone().max(self.tau_r().recip())
    }

    /// Submartingale and traction conditions, checked exactly.
    pub fn is_valid(&self) -> bool {
        let tau = self.tau_r();
        let total = self.start.iter().fold(Rational::zero(), |a, (_, p)| a + p);
        let interior = &self.p_up * &tau + (Rational::one() - &self.p_up) / &tau;
        self.tau >= 2
            && total.is_one()
            && self.start.iter().all(|(j, p)| *j <= self.floor && p >= &Rational::zero())
            && self.p_up <= Rational::one()
            && interior >= Rational::one()
            && self.floor_up() * &tau >= Rational::one()
    }

    /// `E[X₁^{1+ε}]` as an enclosure.
    pub fn moment(&self) -> Enclosure {
        let exponent = Enclosure::exact(Rational::one() + &self.eps);
        self.start.iter().fold(Enclosure::exact(Rational::zero()), |acc, (j, p)| {
            let x = Rational::new(1.into(), num_bigint::BigInt::from(self.tau).pow(*j));
            let term = if *j == 0 {
                Enclosure::exact(Rational::one())
            } else {
                Enclosure::exact(x).powf(&exponent, BITS)
            };
            acc.add(&term.scale(p))
        })
    }

    /// Smallest integer `T ≥ log(1/E[X₁^{1+ε}]) / log(1 + (ε/2)(1 - 1/τ)²) + 2`.
    pub fn horizon(&self) -> u64 {
        let one = Rational::one();
        let m = self.moment();
        let numer = Enclosure::new(m.hi().recip(), m.lo().recip()).ln(BITS);
        let gap = &one - self.tau_r().recip();
        let inner = &one + &self.eps * &gap * &gap / Rational::from_integer(2.into());
        let denom = Enclosure::exact(inner).ln(BITS);
        let t = numer.div(&denom).add(&Enclosure::exact(Rational::from_integer(2.into())));
        let hi = t.hi().ceil().to_integer();
        u64::try_from(hi).expect("horizon fits in u64").max(1)
    }

    /// Does `E[Y_{t+1}] ≥ Y_t (1 + (ε/2)(1 - 1/τ)²)` hold for `Y = X^{1+ε}`
    /// at every non-absorbed level?
    pub fn boost_holds(&self) -> bool {
        let one = Rational::one();
        let tau = self.tau_r();
        let gap = &one - tau.recip();
        let target = &one + &self.eps * &gap * &gap / Rational::from_integer(2.into());
        let up = Enclosure::exact(tau.clone()).powf(&Enclosure::exact(&one + &self.eps), BITS);
        let down = Enclosure::exact(tau.recip()).powf(&Enclosure::exact(&one + &self.eps), BITS);
        let interior = up
            .scale(&self.p_up)
            .add(&down.scale(&(&one - &self.p_up)));
        let floor = up.scale(&self.floor_up());
        interior.lo() >= &target && floor.lo() >= &target
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Level(u32),
    Zero,
}

/// Estimates `Q_T = Pr[X_T = 1]` at the lemma's horizon.
pub fn submartingale_sim<R: Rng>(spec: &ChainSpec, trials: u64, rng: &mut R) -> SimResult {
    assert!(spec.is_valid(), "chain {} violates the lemma's conditions", spec.name);
    let horizon = spec.horizon();
    let p_up = to_f64(&spec.p_up);
    let floor_up = to_f64(&spec.floor_up());
    let weights: Vec<Rational> = spec.start.iter().map(|(_, p)| p.clone()).collect();
    let mut hits = 0u64;
    for _ in 0..trials {
        let mut s = State::Level(spec.start[sample_index(&weights, rng)].0);
        for _ in 1..horizon {
            s = match s {
                State::Level(0) | State::Zero => s,
                State::Level(j) if j == spec.floor => {
                    if rng.gen_bool(floor_up) {
                        State::Level(j - 1)
                    } else {
                        State::Zero
                    }
                }
                State::Level(j) => {
                    if rng.gen_bool(p_up) {
                        State::Level(j - 1)
                    } else {
                        State::Level(j + 1)
                    }
                }
            };
        }
        if s == State::Level(0) {
            hits += 1;
        }
    }
    let estimate = hits as f64 / trials as f64;
    let std_err = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    let bound = to_f64(spec.moment().lo()) / 2.0;
    SimResult {
        horizon,
        trials,
        estimate,
        std_err,
        bound,
    }
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// The three reference chains.
pub fn standard_chains() -> Vec<ChainSpec> {
    vec![
        ChainSpec {
            name: "tau2_eps1_half_drift",
            tau: 2,
            eps: r(1, 1),
            start: vec![(1, r(1, 1))],
            p_up: r(1, 2),
            floor: 40,
        },
        ChainSpec {
            name: "tau2_eps1_quarter_fair",
            tau: 2,
            eps: r(1, 1),
            start: vec![(2, r(1, 1))],
            p_up: r(1, 3),
            floor: 40,
        },
        ChainSpec {
            name: "tau3_eps_half_mixed_fair",
            tau: 3,
            eps: r(1, 2),
            start: vec![(1, r(1, 2)), (2, r(1, 2))],
            p_up: r(1, 4),
            floor: 30,
        },
    ]
}
