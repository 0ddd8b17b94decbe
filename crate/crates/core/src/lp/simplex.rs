//! Two-phase primal simplex over exact rationals.
//!
//! Problems are in the form `minimize cᵀx` subject to sparse rows with a
//! relation (`≤`, `≥`, `=`) and column bounds `0 ≤ x_j ≤ u_j` (`u_j` may be
//! absent). Upper bounds are handled inside the ratio test instead of as extra
//! rows. Entering and leaving choices follow Bland's rule, so the method
//! terminates on degenerate problems.

use num_traits::{One, Signed, Zero};

use crate::domain::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub terms: Vec<(usize, Rational)>,
    pub rel: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(terms: Vec<(usize, Rational)>, rel: Relation, rhs: Rational) -> Self {
        Self { terms, rel, rhs }
    }
}

#[derive(Clone, Debug, Default)]
pub struct StandardLp {
    pub cost: Vec<Rational>,
    pub upper: Vec<Option<Rational>>,
    pub rows: Vec<Constraint>,
}

impl StandardLp {
    /// `ncols` nonnegative, unbounded-above columns with zero cost.
    pub fn with_columns(ncols: usize) -> Self {
        Self {
            cost: vec![Rational::zero(); ncols],
            upper: vec![None; ncols],
            rows: Vec::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.cost.len()
    }
}

/// Row duals are reported in the orientation the rows were given, as
/// `y = c_Bᵀ B⁻¹`: for a minimization they are `≤ 0` on `≤` rows and `≥ 0` on
/// `≥` rows. For `Infeasible` they are the phase-one duals.
#[derive(Clone, Debug)]
pub enum StandardOutcome {
    Optimal {
        x: Vec<Rational>,
        value: Rational,
        duals: Vec<Rational>,
    },
    Infeasible {
        duals: Vec<Rational>,
    },
    Unbounded,
}

struct Tableau {
    /// `B⁻¹ A` over all columns (structural, slack/surplus, artificial).
    body: Vec<Vec<Rational>>,
    /// Current value of the basic variable of each row.
    value: Vec<Rational>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    at_upper: Vec<bool>,
    upper: Vec<Option<Rational>>,
    blocked: Vec<bool>,
    /// Column that held `+e_i` initially; its current contents are `B⁻¹ e_i`.
    identity_col: Vec<usize>,
    reduced: Vec<Rational>,
}

impl Tableau {
    fn ncols(&self) -> usize {
        self.upper.len()
    }

    fn load_costs(&mut self, cost: &[Rational]) {
        let mut reduced = cost.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in self.body[r].iter().enumerate() {
                if !a.is_zero() {
                    reduced[j] -= cb * a;
                }
            }
        }
        self.reduced = reduced;
    }

    fn entering(&self) -> Option<usize> {
        (0..self.ncols()).find(|&j| {
            if self.is_basic[j] || self.blocked[j] {
                return false;
            }
            let d = &self.reduced[j];
            if self.at_upper[j] {
                d.is_positive()
            } else {
                d.is_negative()
            }
        })
    }

    /// Runs simplex iterations for the loaded costs. Returns `false` if unbounded.
    fn optimize(&mut self) -> bool {
        while let Some(e) = self.entering() {
            // dir = +1 when increasing from the lower bound, -1 when decreasing from upper
            let increasing = !self.at_upper[e];
            let mut best: Option<(Rational, usize)> = None;
            for r in 0..self.body.len() {
                let a = &self.body[r][e];
                if a.is_zero() {
                    continue;
                }
                let alpha = if increasing { a.clone() } else { -a };
                let b = self.basis[r];
                let ratio = if alpha.is_positive() {
                    &self.value[r] / &alpha
                } else {
                    match &self.upper[b] {
                        Some(u) => (u - &self.value[r]) / (-alpha),
                        None => continue,
                    }
                };
                let better = match &best {
                    None => true,
                    Some((t, r0)) => ratio < *t || (ratio == *t && b < self.basis[*r0]),
                };
                if better {
                    best = Some((ratio, r));
                }
            }
            let flip = self.upper[e].clone();
            match (best, flip) {
                (None, None) => return false,
                (Some((theta, r)), Some(u)) if theta < u => self.pivot(r, e, theta, increasing),
                (Some((theta, r)), None) => self.pivot(r, e, theta, increasing),
                (_, Some(u)) => self.bound_flip(e, u, increasing),
            }
        }
        true
    }

    fn shift_basics(&mut self, e: usize, theta: &Rational, increasing: bool) {
        if theta.is_zero() {
            return;
        }
        for r in 0..self.body.len() {
            let a = &self.body[r][e];
            if a.is_zero() {
                continue;
            }
            let delta = a * theta;
            if increasing {
                self.value[r] -= delta;
            } else {
                self.value[r] += delta;
            }
        }
    }

    fn bound_flip(&mut self, e: usize, range: Rational, increasing: bool) {
        self.shift_basics(e, &range, increasing);
        self.at_upper[e] = increasing;
    }

    fn pivot(&mut self, r: usize, e: usize, theta: Rational, increasing: bool) {
        self.shift_basics(e, &theta, increasing);
        let entering_value = if increasing {
            theta
        } else {
            self.upper[e].clone().expect("decreasing from an upper bound") - theta
        };
        let leaving = self.basis[r];
        // the leaving variable stops at whichever bound it reached
        let alpha = if increasing {
            self.body[r][e].clone()
        } else {
            -self.body[r][e].clone()
        };
        self.at_upper[leaving] = !alpha.is_positive();
        self.is_basic[leaving] = false;
        self.is_basic[e] = true;
        self.at_upper[e] = false;
        self.basis[r] = e;
        self.value[r] = entering_value;

        let piv = self.body[r][e].clone();
        if !piv.is_one() {
            for a in self.body[r].iter_mut() {
                if !a.is_zero() {
                    *a /= &piv;
                }
            }
        }
        let support: Vec<usize> = (0..self.ncols())
            .filter(|&j| !self.body[r][j].is_zero())
            .collect();
        let pivot_row = std::mem::take(&mut self.body[r]);
        for (i, row) in self.body.iter_mut().enumerate() {
            if i == r || row[e].is_zero() {
                continue;
            }
            let factor = row[e].clone();
            for &j in &support {
                row[j] -= &factor * &pivot_row[j];
            }
        }
        let d = self.reduced[e].clone();
        if !d.is_zero() {
            for &j in &support {
                self.reduced[j] -= &d * &pivot_row[j];
            }
        }
        self.body[r] = pivot_row;
    }

    fn column_values(&self) -> Vec<Rational> {
        let mut x: Vec<Rational> = (0..self.ncols())
            .map(|j| {
                if self.at_upper[j] {
                    self.upper[j].clone().expect("at upper bound")
                } else {
                    Rational::zero()
                }
            })
            .collect();
        for (r, &b) in self.basis.iter().enumerate() {
            x[b] = self.value[r].clone();
        }
        x
    }

    fn duals(&self, cost: &[Rational]) -> Vec<Rational> {
        self.identity_col
            .iter()
            .map(|&col| {
                self.basis
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| !cost[b].is_zero())
                    .fold(Rational::zero(), |acc, (r, &b)| {
                        acc + &cost[b] * &self.body[r][col]
                    })
            })
            .collect()
    }
}

pub fn solve(lp: &StandardLp) -> StandardOutcome {
    let n = lp.ncols();
    let m = lp.rows.len();

    // Normalize each row to a nonnegative right-hand side; `flipped[i]` records
    // a negation. Zero-rhs `≥` rows become `≤` rows so they start with a slack.
    let mut flipped = vec![false; m];
    let mut rels = Vec::with_capacity(m);
    for (i, row) in lp.rows.iter().enumerate() {
        let flip = row.rhs.is_negative() || (row.rhs.is_zero() && row.rel == Relation::Ge);
        flipped[i] = flip;
        rels.push(match (row.rel, flip) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (rel, _) => rel,
        });
    }
    let slack_count = rels.iter().filter(|r| **r != Relation::Eq).count();
    let art_count = rels.iter().filter(|r| **r != Relation::Le).count();
    let total = n + slack_count + art_count;

    let mut body = vec![vec![Rational::zero(); total]; m];
    let mut value = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut identity_col = Vec::with_capacity(m);
    let mut upper: Vec<Option<Rational>> = lp.upper.clone();
    upper.resize(total, None);
    let mut artificial = vec![false; total];
    let mut next_slack = n;
    let mut next_art = n + slack_count;
    for (i, row) in lp.rows.iter().enumerate() {
        let sign = if flipped[i] { -Rational::one() } else { Rational::one() };
        for (j, a) in &row.terms {
            body[i][*j] += a * &sign;
        }
        value.push(&row.rhs * &sign);
        match rels[i] {
            Relation::Le => {
                body[i][next_slack] = Rational::one();
                basis.push(next_slack);
                identity_col.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                body[i][next_slack] = -Rational::one();
                next_slack += 1;
                body[i][next_art] = Rational::one();
                artificial[next_art] = true;
                basis.push(next_art);
                identity_col.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                body[i][next_art] = Rational::one();
                artificial[next_art] = true;
                basis.push(next_art);
                identity_col.push(next_art);
                next_art += 1;
            }
        }
    }
    let mut is_basic = vec![false; total];
    for &b in &basis {
        is_basic[b] = true;
    }
    // fixed columns (upper bound 0) can never move
    let blocked: Vec<bool> = upper
        .iter()
        .map(|u| u.as_ref().is_some_and(|u| u.is_zero()))
        .collect();
    let mut t = Tableau {
        body,
        value,
        basis,
        is_basic,
        at_upper: vec![false; total],
        upper,
        blocked,
        identity_col,
        reduced: Vec::new(),
    };

    let orient = |mut y: Vec<Rational>| {
        for (v, &f) in y.iter_mut().zip(&flipped) {
            if f {
                *v = -v.clone();
            }
        }
        y
    };

    if art_count > 0 {
        let phase1: Vec<Rational> = artificial
            .iter()
            .map(|&a| if a { Rational::one() } else { Rational::zero() })
            .collect();
        t.load_costs(&phase1);
        let bounded = t.optimize();
        debug_assert!(bounded, "phase one is bounded below by zero");
        let x = t.column_values();
        let infeasibility = artificial
            .iter()
            .zip(&x)
            .filter(|(a, _)| **a)
            .fold(Rational::zero(), |acc, (_, v)| acc + v);
        if infeasibility.is_positive() {
            return StandardOutcome::Infeasible {
                duals: orient(t.duals(&phase1)),
            };
        }
        for j in 0..total {
            if artificial[j] {
                t.upper[j] = Some(Rational::zero());
                t.blocked[j] = true;
            }
        }
    }

    let mut cost = lp.cost.clone();
    cost.resize(total, Rational::zero());
    t.load_costs(&cost);
    if !t.optimize() {
        return StandardOutcome::Unbounded;
    }
    let mut x = t.column_values();
    let duals = orient(t.duals(&cost));
    x.truncate(n);
    let value = x
        .iter()
        .zip(&lp.cost)
        .fold(Rational::zero(), |acc, (v, c)| acc + v * c);
    StandardOutcome::Optimal { x, value, duals }
}
