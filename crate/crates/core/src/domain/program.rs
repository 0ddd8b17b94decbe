use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::interval::IntervalSet;
use super::rational::{fmt_rational, parse_rational, Rational};
use super::DomainError;

/// One inequality `Σ coeffs[j]·x_j ≤ rhs`, with sorted, merged, nonzero terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    coeffs: Vec<(usize, Rational)>,
    rhs: Rational,
}

impl Row {
    pub fn new(terms: impl IntoIterator<Item = (usize, Rational)>, rhs: Rational) -> Self {
        let mut merged: BTreeMap<usize, Rational> = BTreeMap::new();
        for (j, a) in terms {
            *merged.entry(j).or_insert_with(Rational::zero) += a;
        }
        let coeffs = merged.into_iter().filter(|(_, a)| !a.is_zero()).collect();
        Self { coeffs, rhs }
    }

    pub fn coeffs(&self) -> &[(usize, Rational)] {
        &self.coeffs
    }

    pub fn rhs(&self) -> &Rational {
        &self.rhs
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .fold(Rational::zero(), |acc, (j, a)| acc + a * &x[*j])
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        self.lhs(x) <= self.rhs
    }
}

/// `Ax ≤ b` over `0 ≤ x ≤ 1`, with an interval set attached to every variable.
///
/// Variables are 0-based here; the text format is 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    n: usize,
    rows: Vec<Row>,
    var_sets: Vec<Arc<IntervalSet>>,
}

impl LinearProgram {
    /// An unconstrained program; every variable carries `[0, 1]`.
    pub fn new(n: usize) -> Self {
        let full = Arc::new(IntervalSet::full());
        Self {
            n,
            rows: Vec::new(),
            var_sets: vec![full; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn add_row(&mut self, row: Row) -> Result<(), DomainError> {
        if let Some((j, _)) = row.coeffs.iter().find(|(j, _)| *j >= self.n) {
            return Err(DomainError::VariableOutOfRange {
                index: j + 1,
                n: self.n,
            });
        }
        self.rows.push(row);
        Ok(())
    }

    /// Adds `Σ terms ≤ rhs`.
    pub fn push(
        &mut self,
        terms: impl IntoIterator<Item = (usize, Rational)>,
        rhs: Rational,
    ) -> Result<(), DomainError> {
        self.add_row(Row::new(terms, rhs))
    }

    pub fn var_set(&self, i: usize) -> &Arc<IntervalSet> {
        &self.var_sets[i]
    }

    pub fn var_sets(&self) -> &[Arc<IntervalSet>] {
        &self.var_sets
    }

    pub fn set_var_set(&mut self, i: usize, e: Arc<IntervalSet>) {
        self.var_sets[i] = e;
    }

    pub fn with_uniform_set(mut self, e: IntervalSet) -> Self {
        let e = Arc::new(e);
        self.var_sets = vec![e; self.n];
        self
    }

    /// `Ax ≤ b` and `0 ≤ x ≤ 1`, exactly.
    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.n
            && x.iter().all(|v| !v.is_negative() && v <= &Rational::one())
            && self.rows.iter().all(|r| r.holds(x))
    }

    /// Additionally every `x_i` lies in its own interval set.
    pub fn is_relaxed_solution(&self, x: &[Rational]) -> bool {
        self.is_satisfied_by(x) && x.iter().zip(&self.var_sets).all(|(v, e)| e.contains(v))
    }

    pub fn parse(text: &str) -> Result<Self, DomainError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line: usize, msg: &str| DomainError::MalformedLp {
            line,
            msg: msg.to_string(),
        };
        let (hline, header) = lines.next().ok_or_else(|| err(1, "missing `lp <n> <m>` header"))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let (n, m) = match parts.as_slice() {
            ["lp", n, m] => (
                n.parse::<usize>().map_err(|_| err(hline, "bad variable count"))?,
                m.parse::<usize>().map_err(|_| err(hline, "bad constraint count"))?,
            ),
            _ => return Err(err(hline, "expected `lp <n> <m>`")),
        };
        let mut lp = LinearProgram::new(n);
        for (lineno, line) in lines {
            let (rhs, terms) = line
                .split_once(':')
                .ok_or_else(|| err(lineno, "expected `<rhs> : <terms>`"))?;
            let rhs = parse_rational(rhs).map_err(|e| err(lineno, &e.to_string()))?;
            let mut parsed = Vec::new();
            for tok in terms.split_whitespace() {
                parsed.push(parse_term(tok).map_err(|m| err(lineno, &m))?);
            }
            lp.push(parsed, rhs).map_err(|e| err(lineno, &e.to_string()))?;
        }
        if lp.m() != m {
            return Err(err(
                hline,
                &format!("header declares {m} constraints, found {}", lp.m()),
            ));
        }
        Ok(lp)
    }
}

/// `coeff*x<idx>`, `x<idx>` or `-x<idx>`, 1-indexed.
fn parse_term(tok: &str) -> Result<(usize, Rational), String> {
    let (coeff, var) = match tok.rsplit_once('*') {
        Some((c, v)) => (parse_rational(c).map_err(|e| e.to_string())?, v),
        None => match tok.strip_prefix('-') {
            Some(v) => (-Rational::one(), v),
            None => (Rational::one(), tok.strip_prefix('+').unwrap_or(tok)),
        },
    };
    let idx: usize = var
        .strip_prefix('x')
        .and_then(|d| d.parse().ok())
        .filter(|&i| i >= 1)
        .ok_or_else(|| format!("bad variable `{var}`"))?;
    Ok((idx - 1, coeff))
}

impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lp {} {}", self.n, self.m())?;
        for row in &self.rows {
            write!(f, "{} :", fmt_rational(&row.rhs))?;
            for (j, a) in &row.coeffs {
                write!(f, " {}*x{}", fmt_rational(a), j + 1)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A product of closed intervals `Π [lo_i, hi_i] ⊆ [0, 1]^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxRegion {
    bounds: Vec<(Rational, Rational)>,
}

impl BoxRegion {
    pub fn new(bounds: Vec<(Rational, Rational)>) -> Result<Self, DomainError> {
        for (lo, hi) in &bounds {
            if lo.is_negative() || hi > &Rational::one() || lo > hi {
                return Err(DomainError::BadBox);
            }
        }
        Ok(Self { bounds })
    }

    pub fn unit(n: usize) -> Self {
        Self {
            bounds: vec![(Rational::zero(), Rational::one()); n],
        }
    }

    /// The box selected by one interval index per variable.
    pub fn from_selection(sets: &[Arc<IntervalSet>], sigma: &[usize]) -> Self {
        let bounds = sets
            .iter()
            .zip(sigma)
            .map(|(e, &j)| (e.lo(j).clone(), e.hi(j).clone()))
            .collect();
        Self { bounds }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(Rational, Rational)] {
        &self.bounds
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.bounds.len()
            && x.iter().zip(&self.bounds).all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    pub fn lower_corner(&self) -> Vec<Rational> {
        self.bounds.iter().map(|(lo, _)| lo.clone()).collect()
    }
}
