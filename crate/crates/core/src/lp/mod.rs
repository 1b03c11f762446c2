//! Dense LP engine: equality-form programs with bounded variables, a
//! two-phase primal simplex, and depth-first branch-and-bound for binaries.
//!
//! Optimal LP solutions are vertices of the feasible region. When an LP has
//! alternative optima, the vertex returned is just one of them; in particular
//! the intensity vector of a RAM solve need not have maximal support.

mod branch;
mod simplex;

pub use branch::{solve_milp, solve_milp_with, MilpOptions, MilpStats};

use crate::data::Tolerances;
use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

/// `maximize c^T x` subject to `A x = b`, `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T> {
    pub objective: Vec<T>,
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub lower: Vec<T>,
    pub upper: Vec<Option<T>>,
}

impl<T: Scalar> LinearProgram<T> {
    /// A program over `num_vars` non-negative variables with a zero objective
    /// and no constraints.
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            objective: vec![T::zero(); num_vars],
            a: Vec::new(),
            b: Vec::new(),
            lower: vec![T::zero(); num_vars],
            upper: vec![None; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.a.len()
    }

    /// Appends the row `sum coeff_j x_j = rhs` given as `(column, coeff)`
    /// pairs; repeated columns accumulate.
    pub fn add_row(&mut self, terms: &[(usize, T)], rhs: T) {
        let mut row = vec![T::zero(); self.num_vars()];
        for &(j, v) in terms {
            row[j] = row[j] + v;
        }
        self.a.push(row);
        self.b.push(rhs);
    }

    pub fn add_dense_row(&mut self, row: Vec<T>, rhs: T) {
        self.a.push(row);
        self.b.push(rhs);
    }

    pub fn set_bounds(&mut self, j: usize, lower: T, upper: Option<T>) {
        self.lower[j] = lower;
        self.upper[j] = upper;
    }

    pub fn fix(&mut self, j: usize, value: T) {
        self.set_bounds(j, value, Some(value));
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} objective coefficients but {} lower / {} upper bounds",
                n,
                self.lower.len(),
                self.upper.len()
            )));
        }
        if self.b.len() != self.a.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} constraint rows but {} right-hand sides",
                self.a.len(),
                self.b.len()
            )));
        }
        if let Some((i, row)) = self.a.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has {} coefficients, expected {n}",
                row.len()
            )));
        }
        let finite = self.objective.iter().chain(&self.b).chain(&self.lower).all(|v| v.is_finite())
            && self.a.iter().flatten().all(|v| v.is_finite())
            && self.upper.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidArgument("non-finite LP data".into()));
        }
        Ok(())
    }

    /// `||A x - b||_inf`.
    pub fn residual(&self, x: &[T]) -> T {
        self.a
            .iter()
            .zip(&self.b)
            .fold(T::zero(), |acc, (row, bi)| acc.max((dot(row, x) - *bi).abs()))
    }

    /// Largest violation of a variable bound by `x`.
    pub fn bound_violation(&self, x: &[T]) -> T {
        x.iter()
            .enumerate()
            .fold(T::zero(), |acc, (j, v)| {
                let below = self.lower[j] - *v;
                let above = self.upper[j].map_or(T::zero(), |u| *v - u);
                acc.max(below).max(above)
            })
    }

    pub fn objective_at(&self, x: &[T]) -> T {
        dot(&self.objective, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    /// Primal point; empty unless `status` is `Optimal`.
    pub x: Vec<T>,
    /// Objective at `x`; zero unless `status` is `Optimal`.
    pub objective_value: T,
    pub iterations: usize,
}

impl<T: Scalar> LpSolution<T> {
    fn infeasible(iterations: usize) -> Self {
        LpSolution {
            status: LpStatus::Infeasible,
            x: Vec::new(),
            objective_value: T::zero(),
            iterations,
        }
    }

    fn unbounded(iterations: usize) -> Self {
        LpSolution {
            status: LpStatus::Unbounded,
            x: Vec::new(),
            objective_value: T::zero(),
            iterations,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Solves `lp` to a basic optimal solution.
///
/// Values within `feasibility_eps` of a bound are reported exactly at the
/// bound. A failure to reach a clean optimum is an error, never `Infeasible`.
pub fn solve_lp<T: Scalar>(lp: &LinearProgram<T>, tol: &Tolerances<T>) -> Result<LpSolution<T>> {
    simplex::solve(lp, tol)
}

/// A linear program in which some variables must take the value 0 or 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpSpec<T> {
    pub base: LinearProgram<T>,
    pub binary_indices: Vec<usize>,
}

impl<T: Scalar> MilpSpec<T> {
    /// Builds the spec, forcing `[0, 1]` bounds on the binary columns.
    pub fn new(mut base: LinearProgram<T>, binary_indices: Vec<usize>) -> Self {
        for &j in &binary_indices {
            if j < base.num_vars() {
                base.set_bounds(j, T::zero(), Some(T::one()));
            }
        }
        MilpSpec {
            base,
            binary_indices,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        for &j in &self.binary_indices {
            if j >= self.base.num_vars() {
                return Err(Error::DimensionMismatch(format!(
                    "binary index {j} out of range for {} variables",
                    self.base.num_vars()
                )));
            }
            if self.base.lower[j] != T::zero() || self.base.upper[j] != Some(T::one()) {
                return Err(Error::InvalidArgument(format!(
                    "binary variable {j} must have bounds [0, 1]"
                )));
            }
        }
        Ok(())
    }
}
