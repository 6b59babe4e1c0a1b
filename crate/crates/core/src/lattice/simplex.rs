//! Exact rational feasibility via the phase-one simplex method with Bland's rule.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `a . x >= b`
    Ge,
    /// `a . x <= b`
    Le,
    /// `a . x = b`
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coeffs: Vec<BigRational>,
    pub relation: Relation,
    pub rhs: BigRational,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<BigRational>, relation: Relation, rhs: BigRational) -> Self {
        LinearConstraint {
            coeffs,
            relation,
            rhs,
        }
    }

    pub fn from_ints(coeffs: &[BigInt], relation: Relation, rhs: i64) -> Self {
        LinearConstraint {
            coeffs: coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
            relation,
            rhs: BigRational::from_integer(rhs.into()),
        }
    }

    pub fn is_satisfied_by(&self, x: &[BigRational]) -> bool {
        let lhs: BigRational = self
            .coeffs
            .iter()
            .zip(x)
            .map(|(a, b)| a * b)
            .fold(BigRational::zero(), |s, t| s + t);
        match self.relation {
            Relation::Ge => lhs >= self.rhs,
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<BigRational>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn witness(&self) -> Option<&[BigRational]> {
        match self {
            Feasibility::Feasible(w) => Some(w),
            Feasibility::Infeasible => None,
        }
    }
}

/// A feasibility problem over `Q^m`; each variable is free or sign-constrained.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    nonnegative: Vec<bool>,
    constraints: Vec<LinearConstraint>,
}

impl LinearProgram {
    pub fn free(num_vars: usize) -> Self {
        LinearProgram {
            nonnegative: vec![false; num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn nonnegative(num_vars: usize) -> Self {
        LinearProgram {
            nonnegative: vec![true; num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.nonnegative.len()
    }

    pub fn push(&mut self, c: LinearConstraint) {
        assert_eq!(c.coeffs.len(), self.num_vars(), "constraint width mismatch");
        self.constraints.push(c);
    }

    pub fn solve(&self) -> Feasibility {
        // Column layout: one column per nonnegative variable, two (x+ and x-)
        // per free variable, then one slack per inequality.
        let mut var_cols = Vec::with_capacity(self.num_vars());
        let mut ncols = 0;
        for &nn in &self.nonnegative {
            var_cols.push(ncols);
            ncols += if nn { 1 } else { 2 };
        }
        let structural = ncols;
        let slack_count = self
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        ncols += slack_count;

        let m = self.constraints.len();
        let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(m);
        let mut rhs: Vec<BigRational> = Vec::with_capacity(m);
        let mut slack = structural;
        for c in &self.constraints {
            let mut row = vec![BigRational::zero(); ncols];
            for (v, a) in c.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                row[var_cols[v]] = a.clone();
                if !self.nonnegative[v] {
                    row[var_cols[v] + 1] = -a.clone();
                }
            }
            match c.relation {
                Relation::Ge => {
                    row[slack] = -BigRational::one();
                    slack += 1;
                }
                Relation::Le => {
                    row[slack] = BigRational::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            let mut b = c.rhs.clone();
            if b.is_negative() {
                for x in row.iter_mut() {
                    *x = -std::mem::take(x);
                }
                b = -b;
            }
            rows.push(row);
            rhs.push(b);
        }

        let values = match phase_one(rows, rhs, ncols) {
            Some(v) => v,
            None => return Feasibility::Infeasible,
        };
        let witness = self
            .nonnegative
            .iter()
            .zip(&var_cols)
            .map(|(&nn, &c)| {
                if nn {
                    values[c].clone()
                } else {
                    &values[c] - &values[c + 1]
                }
            })
            .collect();
        Feasibility::Feasible(witness)
    }
}

/// Minimizes the sum of artificial variables for `A x = b, x >= 0, b >= 0`.
/// Returns the values of the original columns when the optimum is zero.
fn phase_one(
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    ncols: usize,
) -> Option<Vec<BigRational>> {
    let m = rows.len();
    let total = ncols + m;
    // tableau rows: [A | I | b]
    let mut tab: Vec<Vec<BigRational>> = rows
        .into_iter()
        .zip(rhs)
        .enumerate()
        .map(|(i, (mut row, b))| {
            row.resize(total, BigRational::zero());
            row[ncols + i] = BigRational::one();
            row.push(b);
            row
        })
        .collect();
    let mut basis: Vec<usize> = (ncols..total).collect();

    // reduced costs of the phase-one objective: -(sum of rows) on original columns
    let mut cost = vec![BigRational::zero(); total + 1];
    for row in &tab {
        for j in 0..ncols {
            cost[j] -= &row[j];
        }
        cost[total] -= &row[total];
    }

    // Bland: lowest-index column with negative reduced cost
    while let Some(enter) = (0..total).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if !tab[i][enter].is_positive() {
                continue;
            }
            let ratio = &tab[i][total] / &tab[i][enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // phase one is bounded below by zero, so a leaving row always exists
        let (r, _) = leave.expect("phase-one objective is bounded");
        pivot(&mut tab, &mut cost, r, enter);
        basis[r] = enter;
    }

    if !cost[total].is_zero() {
        return None;
    }
    let mut values = vec![BigRational::zero(); ncols];
    for (i, &b) in basis.iter().enumerate() {
        if b < ncols {
            values[b] = tab[i][total].clone();
        }
    }
    Some(values)
}

fn pivot(tab: &mut [Vec<BigRational>], cost: &mut [BigRational], r: usize, c: usize) {
    let p = tab[r][c].clone();
    for x in tab[r].iter_mut() {
        *x = &*x / &p;
    }
    let pivot_row = tab[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (x, y) in row.iter_mut().zip(&pivot_row) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
    }
    if !cost[c].is_zero() {
        let f = cost[c].clone();
        for (x, y) in cost.iter_mut().zip(&pivot_row) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
    }
}

/// Feasibility of a system of rational constraints over free variables.
pub fn exact_lp_feasible(num_vars: usize, constraints: &[LinearConstraint]) -> Feasibility {
    let mut lp = LinearProgram::free(num_vars);
    for c in constraints {
        lp.push(c.clone());
    }
    lp.solve()
}

/// Is `target` a nonnegative combination of `generators`? Returns the coefficients.
pub fn cone_membership(generators: &[Vec<BigInt>], target: &[BigInt]) -> Feasibility {
    let mut lp = LinearProgram::nonnegative(generators.len());
    for (k, t) in target.iter().enumerate() {
        let coeffs = generators
            .iter()
            .map(|g| BigRational::from_integer(g[k].clone()))
            .collect();
        lp.push(LinearConstraint::new(
            coeffs,
            Relation::Eq,
            BigRational::from_integer(t.clone()),
        ));
    }
    lp.solve()
}
