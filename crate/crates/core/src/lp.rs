//! Dense two-phase simplex method over exact rationals.
//!
//! Pivoting follows Bland's rule (lowest-index entering column, lowest-index
//! leaving basic variable among ratio ties), so degenerate problems such as
//! the homogeneous obedience constraints of a correlated equilibrium cannot
//! cycle.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ratio::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    LessEq,
    Equal,
    GreaterEq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `maximize objective . x` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub value: Rational,
    pub x: Vec<Rational>,
}

struct Tableau {
    // Each row: coefficients for every column, then the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    columns: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        &self.rows[r][self.columns]
    }

    fn pivot(&mut self, row: usize, col: usize, objective: &mut [Rational]) {
        let inv = Rational::one() / &self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.rows[row].clone();
        for (r, other) in self.rows.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let factor = other[col].clone();
            for (v, p) in other.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        if !objective[col].is_zero() {
            let factor = objective[col].clone();
            for (v, p) in objective.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations on `reduced`, the row of reduced profits
    /// (`c_j - z_j`, last entry holds `-z`). Only columns in `allowed` may
    /// enter.
    fn optimize(&mut self, reduced: &mut [Rational], allowed: usize) -> Result<()> {
        loop {
            let Some(enter) = (0..allowed).find(|&j| reduced[j].is_positive()) else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &leave {
                    None => true,
                    Some((best_r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*best_r])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::Unbounded);
            };
            self.pivot(row, enter, reduced);
        }
    }
}

impl LinearProgram {
    pub fn solve(&self) -> Result<Solution> {
        let n = self.objective.len();
        let m = self.constraints.len();
        for c in &self.constraints {
            if c.coefficients.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.coefficients.len(),
                });
            }
        }
        let slack_count = self
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Equal)
            .count();
        let structural = n + slack_count;
        let columns = structural + m;

        let mut rows = Vec::with_capacity(m);
        let mut slack = n;
        for (i, c) in self.constraints.iter().enumerate() {
            let mut row = vec![Rational::zero(); columns + 1];
            row[..n].clone_from_slice(&c.coefficients);
            match c.relation {
                Relation::LessEq => {
                    row[slack] = Rational::one();
                    slack += 1;
                }
                Relation::GreaterEq => {
                    row[slack] = -Rational::one();
                    slack += 1;
                }
                Relation::Equal => {}
            }
            row[columns] = c.rhs.clone();
            if c.rhs.is_negative() {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
            }
            row[structural + i] = Rational::one();
            rows.push(row);
        }
        let mut tableau = Tableau {
            rows,
            basis: (structural..columns).collect(),
            columns,
        };

        // Phase one: maximize -(sum of artificials).
        let mut reduced = vec![Rational::zero(); columns + 1];
        for row in &tableau.rows {
            for j in 0..structural {
                reduced[j] += &row[j];
            }
            reduced[columns] += &row[columns];
        }
        tableau.optimize(&mut reduced, structural)?;
        if !reduced[columns].is_zero() {
            return Err(Error::Infeasible);
        }

        // Drive artificials out of the basis; rows where that is impossible
        // are redundant.
        let mut r = 0;
        while r < tableau.rows.len() {
            if tableau.basis[r] >= structural {
                match (0..structural).find(|&j| !tableau.rows[r][j].is_zero()) {
                    Some(col) => tableau.pivot(r, col, &mut reduced),
                    None => {
                        tableau.rows.remove(r);
                        tableau.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }

        // Phase two on the original objective.
        let mut reduced = vec![Rational::zero(); columns + 1];
        reduced[..n].clone_from_slice(&self.objective);
        for (r, &b) in tableau.basis.iter().enumerate() {
            if b < n && !self.objective[b].is_zero() {
                let cb = self.objective[b].clone();
                for (v, a) in reduced.iter_mut().zip(&tableau.rows[r]) {
                    *v -= &cb * a;
                }
            }
        }
        tableau.optimize(&mut reduced, structural)?;

        let mut x = vec![Rational::zero(); n];
        for (r, &b) in tableau.basis.iter().enumerate() {
            if b < n {
                x[b] = tableau.rhs(r).clone();
            }
        }
        let value = self
            .objective
            .iter()
            .zip(&x)
            .fold(Rational::zero(), |acc, (c, v)| acc + c * v);
        Ok(Solution { value, x })
    }
}
