use num_traits::{One, Zero};

use super::{CspError, CspInstance, CspTemplate};
use crate::domain::{IntervalSet, LinearProgram, Rational, Row};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Encoder {
    /// One row per clause, no auxiliary variables.
    Direct { k: usize },
    /// Tuple weights with marginal consistency, for any explicit relations.
    Basic(CspTemplate),
}

impl Encoder {
    pub fn encode(&self, instance: &CspInstance) -> Result<LinearProgram, CspError> {
        match self {
            Encoder::Direct { k } => ksat_to_lp(instance, *k),
            Encoder::Basic(template) => basic_lp(instance, template),
        }
    }
}

/// Clause `∨ ℓ_j` becomes `Σ ℓ_j ≥ 1` with `¬x = 1 - x`, stored as
/// `-Σ(±x) ≤ -1 + #negated`.
pub fn ksat_to_lp(instance: &CspInstance, k: usize) -> Result<LinearProgram, CspError> {
    let mut lp = LinearProgram::new(instance.n());
    for (index, c) in instance.constraints().iter().enumerate() {
        if !c.relation.is_or() {
            return Err(CspError::NotAClause { index });
        }
        if c.vars.len() > k {
            return Err(CspError::ClauseTooWide {
                width: c.vars.len(),
                k,
            });
        }
        let negs = c.negated.iter().filter(|&&n| n).count() as i64;
        let terms = c.vars.iter().zip(&c.negated).map(|(&v, &neg)| {
            (v, Rational::from_integer(if neg { 1 } else { -1 }.into()))
        });
        lp.add_row(Row::new(terms, Rational::from_integer((negs - 1).into())))?;
    }
    Ok(lp)
}

fn push_eq(lp: &mut LinearProgram, terms: Vec<(usize, Rational)>, rhs: Rational) -> Result<(), CspError> {
    let neg: Vec<(usize, Rational)> = terms.iter().map(|(i, a)| (*i, -a.clone())).collect();
    lp.add_row(Row::new(terms, rhs.clone()))?;
    lp.add_row(Row::new(neg, -rhs))?;
    Ok(())
}

/// Basic LP: per constraint, weights `w_z ≥ 0` over tuples `z ∈ R` with
/// `Σ w_z = 1` and `ℓ_j = Σ_z w_z z_j` for each argument literal `ℓ_j`.
///
/// Variables `0..n` are the instance's; weights follow in constraint order.
/// Every variable starts with the set `[0, 1]`.
pub fn basic_lp(instance: &CspInstance, template: &CspTemplate) -> Result<LinearProgram, CspError> {
    for c in instance.constraints() {
        if !template.contains(&c.relation) {
            return Err(CspError::UnknownRelation(c.relation.name().to_string()));
        }
    }
    let weights: usize = instance
        .constraints()
        .iter()
        .map(|c| c.relation.tuples().len())
        .sum();
    let mut lp = LinearProgram::new(instance.n() + weights);
    let one = Rational::one();
    let mut next = instance.n();
    for c in instance.constraints() {
        let tuples: Vec<&Vec<bool>> = c.relation.tuples().iter().collect();
        let cols: Vec<usize> = (next..next + tuples.len()).collect();
        next += tuples.len();
        push_eq(&mut lp, cols.iter().map(|&w| (w, one.clone())).collect(), one.clone())?;
        for (j, (&v, &neg)) in c.vars.iter().zip(&c.negated).enumerate() {
            // x - Σ w_z z_j = 0, or (1 - x) - Σ w_z z_j = 0 when negated
            let mut terms = vec![(v, if neg { -one.clone() } else { one.clone() })];
            terms.extend(
                cols.iter()
                    .zip(&tuples)
                    .filter(|(_, z)| z[j])
                    .map(|(&w, _)| (w, -one.clone())),
            );
            let rhs = if neg { -one.clone() } else { Rational::zero() };
            push_eq(&mut lp, terms, rhs)?;
        }
    }
    Ok(lp)
}

/// `δ = min(1/(4kn), minlen/4, mingap/4)` with `k` the number of intervals.
pub fn shrink_delta(e: &IntervalSet, n: usize) -> Rational {
    let four = Rational::from_integer(4.into());
    let kn = Rational::from_integer((e.len() * n.max(1)).into());
    let mut delta = (&four * kn).recip();
    delta = delta.min(e.min_length() / &four);
    if let Some(gap) = e.min_gap() {
        delta = delta.min(gap / &four);
    }
    delta
}
