//! Boolean CSPs: instances, LP encodings and threshold rounding.

mod dimacs;
mod encode;
mod files;
mod polymorphism;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::domain::{fmt_rational, DomainError, IntervalSet, Rational};
use crate::walk::{self, WalkConfig, WalkContext, WalkError, WalkOutcome, WalkStatus};

pub use dimacs::{parse_dimacs, to_dimacs};
pub use encode::{basic_lp, ksat_to_lp, shrink_delta, Encoder};
pub use files::{parse_instance_json, parse_scheme, parse_template_json};
pub use polymorphism::{find_polymorphism_violation, partial_polymorphism_check, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CspError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("literal {literal} out of range for {n} variables")]
    LiteralOutOfRange { literal: i64, n: usize },
    #[error("clause not terminated by 0")]
    UnterminatedClause,
    #[error("empty clause")]
    EmptyClause,
    #[error("clause of width {width} exceeds k = {k}")]
    ClauseTooWide { width: usize, k: usize },
    #[error("constraint {index} is not a disjunction")]
    NotAClause { index: usize },
    #[error("relation `{0}` is not in the template")]
    UnknownRelation(String),
    #[error("coordinate {index} = {value} lies in a gap of E")]
    CoordinateInGap { index: usize, value: String },
    #[error("L = {0} makes an interior endpoint of E integral after scaling")]
    EndpointIntegral(usize),
    #[error("invalid relation `{name}`: {msg}")]
    BadRelation { name: String, msg: String },
    #[error("invalid constraint {index}: {msg}")]
    BadConstraint { index: usize, msg: String },
    #[error("invalid threshold scheme: {0}")]
    BadScheme(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("rounded assignment fails verification")]
    RoundingFailed,
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Walk(#[from] WalkError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    name: String,
    arity: usize,
    tuples: BTreeSet<Vec<bool>>,
}

impl Relation {
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<bool>>,
    ) -> Result<Self, CspError> {
        let name = name.into();
        let tuples: BTreeSet<Vec<bool>> = tuples.into_iter().collect();
        if tuples.is_empty() {
            return Err(CspError::BadRelation {
                name,
                msg: "no tuples".into(),
            });
        }
        if tuples.iter().any(|t| t.len() != arity) {
            return Err(CspError::BadRelation {
                name,
                msg: format!("tuple length differs from arity {arity}"),
            });
        }
        Ok(Self {
            name,
            arity,
            tuples,
        })
    }

    /// `x_1 ∨ ... ∨ x_arity`.
    pub fn or(arity: usize) -> Self {
        Self::all_but(format!("or{arity}"), &vec![false; arity])
    }

    /// Every tuple except `forbidden`.
    pub fn all_but(name: impl Into<String>, forbidden: &[bool]) -> Self {
        let arity = forbidden.len();
        let tuples = all_tuples(arity).filter(|t| t.as_slice() != forbidden);
        Self::new(name, arity, tuples).expect("arity is positive")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &BTreeSet<Vec<bool>> {
        &self.tuples
    }

    pub fn contains(&self, t: &[bool]) -> bool {
        self.tuples.contains(t)
    }

    /// Is this the disjunction of its arguments?
    pub fn is_or(&self) -> bool {
        self.arity > 0
            && self.tuples.len() + 1 == 1 << self.arity
            && !self.tuples.contains(&vec![false; self.arity])
    }
}

pub(crate) fn all_tuples(arity: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << arity).map(move |bits| (0..arity).map(|j| bits >> (arity - 1 - j) & 1 == 1).collect())
}

pub(crate) fn bits_to_string(t: &[bool]) -> String {
    t.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CspTemplate {
    relations: BTreeMap<String, Arc<Relation>>,
}

impl CspTemplate {
    pub fn new(relations: impl IntoIterator<Item = Relation>) -> Self {
        Self {
            relations: relations
                .into_iter()
                .map(|r| (r.name.clone(), Arc::new(r)))
                .collect(),
        }
    }

    /// All width-k clauses: one relation per forbidden tuple.
    pub fn ksat(k: usize) -> Self {
        Self::new(all_tuples(k).map(|f| Relation::all_but(format!("clause{}", bits_to_string(&f)), &f)))
    }

    pub fn relation(&self, name: &str) -> Option<&Arc<Relation>> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = &Arc<Relation>> {
        self.relations.values()
    }

    pub fn contains(&self, r: &Relation) -> bool {
        self.relations.get(&r.name).is_some_and(|own| **own == *r)
    }
}

/// A relation applied to variables, each optionally negated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub relation: Arc<Relation>,
    pub vars: Vec<usize>,
    pub negated: Vec<bool>,
}

impl Constraint {
    /// The tuple the constraint sees under assignment `a`.
    pub fn induced(&self, a: &[bool]) -> Vec<bool> {
        self.vars
            .iter()
            .zip(&self.negated)
            .map(|(&v, &neg)| a[v] ^ neg)
            .collect()
    }

    pub fn holds(&self, a: &[bool]) -> bool {
        self.relation.contains(&self.induced(a))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CspInstance {
    n: usize,
    constraints: Vec<Constraint>,
}

impl CspInstance {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            constraints: Vec::new(),
        }
    }

    pub fn add(
        &mut self,
        relation: Arc<Relation>,
        vars: Vec<usize>,
        negated: Option<Vec<bool>>,
    ) -> Result<(), CspError> {
        let index = self.constraints.len();
        let negated = negated.unwrap_or_else(|| vec![false; vars.len()]);
        if vars.len() != relation.arity() || negated.len() != vars.len() {
            return Err(CspError::BadConstraint {
                index,
                msg: format!("arity of `{}` is {}", relation.name(), relation.arity()),
            });
        }
        if let Some(&v) = vars.iter().find(|&&v| v >= self.n) {
            return Err(CspError::BadConstraint {
                index,
                msg: format!("variable {} out of range", v + 1),
            });
        }
        self.constraints.push(Constraint {
            relation,
            vars,
            negated,
        });
        Ok(())
    }

    /// Adds the clause `∨ literals`, DIMACS style (1-indexed, sign = polarity).
    pub fn add_clause(&mut self, literals: &[i64]) -> Result<(), CspError> {
        if literals.is_empty() {
            return Err(CspError::EmptyClause);
        }
        let mut vars = Vec::with_capacity(literals.len());
        let mut negated = Vec::with_capacity(literals.len());
        for &lit in literals {
            let v = lit.unsigned_abs() as usize;
            if lit == 0 || v > self.n {
                return Err(CspError::LiteralOutOfRange {
                    literal: lit,
                    n: self.n,
                });
            }
            vars.push(v - 1);
            negated.push(lit < 0);
        }
        self.add(Arc::new(Relation::or(literals.len())), vars, Some(negated))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }
}

/// Does `a` satisfy every constraint?
pub fn verify_assignment(instance: &CspInstance, a: &[bool]) -> bool {
    a.len() == instance.n() && instance.constraints().iter().all(|c| c.holds(a))
}

/// A set `E` with a 0-1 label per interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdScheme {
    e: IntervalSet,
    eta: Vec<bool>,
}

impl ThresholdScheme {
    pub fn new(e: IntervalSet, eta: Vec<bool>) -> Result<Self, CspError> {
        if eta.len() != e.len() {
            return Err(CspError::BadScheme(format!(
                "{} labels for {} intervals",
                eta.len(),
                e.len()
            )));
        }
        if eta[0] || !eta[eta.len() - 1] {
            return Err(CspError::BadScheme(
                "the interval at 0 must map to 0 and the interval at 1 to 1".into(),
            ));
        }
        Ok(Self { e, eta })
    }

    /// `[0, 1/k] ∪ [1 - 1/k, 1]` labelled `(0, 1)`, for `3 ≤ k ≤ 9`.
    pub fn ksat(k: usize) -> Result<Self, CspError> {
        if !(3..=9).contains(&k) {
            return Err(CspError::BadScheme(format!(
                "built-in k-SAT schemes cover 3 <= k <= 9, got {k}"
            )));
        }
        Self::new(IntervalSet::ksat(k as u32)?, vec![false, true])
    }

    pub fn e(&self) -> &IntervalSet {
        &self.e
    }

    pub fn eta(&self) -> &[bool] {
        &self.eta
    }

    pub fn label(&self, v: &Rational) -> Result<Option<bool>, DomainError> {
        Ok(self.e.locate(v)?.map(|i| self.eta[i]))
    }
}

impl fmt::Display for ThresholdScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.e)?;
        writeln!(f, "{}", bits_to_string(&self.eta))
    }
}

/// `η` applied coordinatewise.
pub fn round(y: &[Rational], scheme: &ThresholdScheme) -> Result<Vec<bool>, CspError> {
    y.iter()
        .enumerate()
        .map(|(index, v)| {
            scheme.label(v)?.ok_or_else(|| CspError::CoordinateInGap {
                index,
                value: fmt_rational(v),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CspStatus {
    Solved(Vec<bool>),
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CspOutcome {
    pub status: CspStatus,
    pub walk: WalkOutcome,
    pub delta: Rational,
}

/// The encoded program with original variables restricted to `E_δ`.
pub fn prepare(
    instance: &CspInstance,
    scheme: &ThresholdScheme,
    encoder: &Encoder,
) -> Result<(WalkContext, Rational), CspError> {
    let mut lp = encoder.encode(instance)?;
    let delta = shrink_delta(scheme.e(), instance.n());
    let shrunk = Arc::new(scheme.e().shrink(&delta)?);
    for i in 0..instance.n() {
        lp.set_var_set(i, shrunk.clone());
    }
    Ok((WalkContext::new(lp)?, delta))
}

/// Rounds a walk outcome back to the instance; only verified assignments pass.
pub fn finish(
    instance: &CspInstance,
    scheme: &ThresholdScheme,
    walk: WalkOutcome,
    delta: Rational,
) -> Result<CspOutcome, CspError> {
    let status = match &walk.status {
        WalkStatus::Solved(y) => {
            let a = round(&y[..instance.n()], scheme)?;
            if !verify_assignment(instance, &a) {
                return Err(CspError::RoundingFailed);
            }
            CspStatus::Solved(a)
        }
        WalkStatus::Exhausted => CspStatus::Exhausted,
    };
    Ok(CspOutcome {
        status,
        walk,
        delta,
    })
}

/// Encode, walk over `E_δ`, round and verify.
pub fn solve_csp(
    instance: &CspInstance,
    scheme: &ThresholdScheme,
    encoder: &Encoder,
    config: &WalkConfig,
) -> Result<CspOutcome, CspError> {
    let (ctx, delta) = prepare(instance, scheme, encoder)?;
    let walk = walk::solve(&ctx, config)?;
    finish(instance, scheme, walk, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::rational::{frac, int};

    fn one_in_three() -> Relation {
        Relation::new(
            "one_in_three",
            3,
            [vec![true, false, false], vec![false, true, false], vec![false, false, true]],
        )
        .unwrap()
    }

    #[test]
    fn relation_validation() {
        assert!(Relation::new("r", 2, Vec::<Vec<bool>>::new()).is_err());
        assert!(Relation::new("r", 2, [vec![true]]).is_err());
        assert!(Relation::or(3).is_or());
        assert_eq!(Relation::or(2).tuples().len(), 3);
        assert!(!one_in_three().is_or());
    }

    #[test]
    fn verify_examples() {
        let mut inst = CspInstance::new(2);
        inst.add_clause(&[1, -2]).unwrap();
        assert!(verify_assignment(&inst, &[false, false]));
        let mut inst = CspInstance::new(2);
        inst.add_clause(&[1, 2]).unwrap();
        assert!(!verify_assignment(&inst, &[false, false]));
        let mut inst = CspInstance::new(3);
        inst.add(Arc::new(one_in_three()), vec![0, 1, 2], None).unwrap();
        assert!(!verify_assignment(&inst, &[true, true, false]));
        assert!(verify_assignment(&inst, &[false, true, false]));
        assert!(!verify_assignment(&inst, &[false, true]));
    }

    #[test]
    fn constraint_shape_checks() {
        let mut inst = CspInstance::new(2);
        assert!(inst.add(Arc::new(one_in_three()), vec![0, 1], None).is_err());
        assert!(inst.add(Arc::new(Relation::or(2)), vec![0, 2], None).is_err());
        assert!(matches!(
            inst.add_clause(&[3]),
            Err(CspError::LiteralOutOfRange { literal: 3, n: 2 })
        ));
    }

    #[test]
    fn round_examples() {
        let s = ThresholdScheme::ksat(3).unwrap();
        assert_eq!(round(&[int(0), int(1)], &s).unwrap(), vec![false, true]);
        assert_eq!(round(&[frac(1, 6)], &s).unwrap(), vec![false]);
        assert!(matches!(
            round(&[frac(1, 2)], &s),
            Err(CspError::CoordinateInGap { index: 0, .. })
        ));
    }

    #[test]
    fn scheme_validation() {
        let e = IntervalSet::ksat(3).unwrap();
        assert!(ThresholdScheme::new(e.clone(), vec![true, true]).is_err());
        assert!(ThresholdScheme::new(e.clone(), vec![false]).is_err());
        assert!(ThresholdScheme::new(e, vec![false, true]).is_ok());
        assert!(ThresholdScheme::ksat(2).is_err());
        assert!(ThresholdScheme::ksat(10).is_err());
        for k in 3..=9 {
            assert!(ThresholdScheme::ksat(k).is_ok());
        }
    }

    #[test]
    fn single_clause_solves_to_true() {
        let mut inst = CspInstance::new(1);
        inst.add_clause(&[1]).unwrap();
        let out = solve_csp(
            &inst,
            &ThresholdScheme::ksat(3).unwrap(),
            &Encoder::Direct { k: 3 },
            &WalkConfig {
                restarts: 20,
                ..WalkConfig::default()
            },
        )
        .unwrap();
        assert_eq!(out.status, CspStatus::Solved(vec![true]));
    }

    #[test]
    fn unsatisfiable_instance_is_exhausted_or_infeasible() {
        let mut inst = CspInstance::new(1);
        inst.add_clause(&[1]).unwrap();
        inst.add_clause(&[-1]).unwrap();
        let res = solve_csp(
            &inst,
            &ThresholdScheme::ksat(3).unwrap(),
            &Encoder::Direct { k: 3 },
            &WalkConfig {
                restarts: 3,
                ..WalkConfig::default()
            },
        );
        match res {
            Ok(out) => assert_eq!(out.status, CspStatus::Exhausted),
            Err(e) => assert_eq!(e, CspError::Walk(WalkError::RelaxationInfeasible)),
        }
    }
}
