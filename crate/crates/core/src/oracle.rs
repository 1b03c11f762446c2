//! Brute-force reference answers for cross-checking the GRS pipeline and the
//! branch-and-bound engine. Only [`solve_lp`] is shared with the code under test.

use crate::data::Tolerances;
use crate::error::{Error, Result};
use crate::grs::OptimalSolutionSystem;
use crate::lp::{solve_lp, LinearProgram, LpSolution, LpStatus, MilpSpec};
use crate::scalar::Scalar;

/// Largest `|E|` the exhaustive oracles accept.
pub const MAX_ORACLE_UNITS: usize = 16;
/// Largest binary count [`brute_force_milp`] accepts.
pub const MAX_ORACLE_BINARIES: usize = 20;

fn system_program<T: Scalar>(sys: &OptimalSolutionSystem<T>) -> LinearProgram<T> {
    let mut lp = LinearProgram::new(sys.num_cols());
    for (row, b) in sys.rows.iter().zip(&sys.rhs) {
        lp.add_dense_row(row.clone(), *b);
    }
    lp
}

fn guard(size: usize, limit: usize) -> Result<()> {
    if size > limit {
        Err(Error::OracleSizeGuard {
            size,
            limit,
            hint: "use a smaller dataset or skip verification",
        })
    } else {
        Ok(())
    }
}

/// The union of supports over all optimal intensity vectors, found by
/// maximizing each `lambda_j` separately. Positions are within `E`.
pub fn oracle_support<T: Scalar>(sys: &OptimalSolutionSystem<T>, tol: &Tolerances<T>) -> Result<Vec<usize>> {
    guard(sys.k(), MAX_ORACLE_UNITS)?;
    let (support, _) = per_unit_maxima(sys, tol)?;
    Ok(support)
}

/// For each efficient unit `j`, the optimum of "maximize lambda_j over the
/// optimal-solution system" and the maximizing point `[lambda; s-; s+]`.
/// Returns the positions whose maximum exceeds `support_eps` and all maximizers.
pub fn per_unit_maxima<T: Scalar>(
    sys: &OptimalSolutionSystem<T>,
    tol: &Tolerances<T>,
) -> Result<(Vec<usize>, Vec<Vec<T>>)> {
    let base = system_program(sys);
    let mut support = Vec::new();
    let mut points = Vec::with_capacity(sys.k());
    for j in 0..sys.k() {
        let mut lp = base.clone();
        lp.objective[j] = T::one();
        let sol = solve_lp(&lp, tol)?;
        if !sol.is_optimal() {
            return Err(Error::Internal(format!(
                "maximizing intensity {j} over the optimal-solution system reported {:?}",
                sol.status
            )));
        }
        if sol.objective_value > tol.support_eps() {
            support.push(j);
        }
        points.push(sol.x);
    }
    Ok((support, points))
}

/// Best objective of the mixed 0-1 program and an `(alpha, gamma)` pattern
/// attaining it, found by testing every pattern for feasibility.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternOptimum<T> {
    pub objective: T,
    pub alpha: Vec<bool>,
    pub gamma: bool,
}

/// Enumerates all `2^(|E|+1)` binary patterns. A pattern is feasible when the
/// homogeneous system admits `lambda_j >= 1` wherever `alpha_j = 1` and
/// `delta >= 1` when `gamma = 1`. Patterns with no more ones than the best
/// feasible pattern so far are skipped without a solve.
pub fn brute_force_model8<T: Scalar>(
    sys: &OptimalSolutionSystem<T>,
    tol: &Tolerances<T>,
) -> Result<PatternOptimum<T>> {
    let k = sys.k();
    guard(k, MAX_ORACLE_UNITS)?;
    let cols = sys.num_cols();
    let delta = cols;
    let mut base = LinearProgram::new(cols + 1);
    for (row, b) in sys.rows.iter().zip(&sys.rhs) {
        let mut dense = row.clone();
        dense.push(-*b);
        base.add_dense_row(dense, T::zero());
    }

    let mut best = PatternOptimum {
        objective: T::zero(),
        alpha: vec![false; k],
        gamma: false,
    };
    let mut best_count = 0usize;
    for mask in 1u64..(1u64 << (k + 1)) {
        let count = mask.count_ones() as usize;
        if count <= best_count {
            continue;
        }
        let mut lp = base.clone();
        for j in 0..k {
            if mask & (1 << j) != 0 {
                lp.set_bounds(j, T::one(), None);
            }
        }
        let gamma = mask & (1 << k) != 0;
        if gamma {
            lp.set_bounds(delta, T::one(), None);
        }
        if solve_lp(&lp, tol)?.status == LpStatus::Optimal {
            best_count = count;
            best = PatternOptimum {
                objective: T::from_usize(count).expect("count fits scalar"),
                alpha: (0..k).map(|j| mask & (1 << j) != 0).collect(),
                gamma,
            };
        }
    }
    Ok(best)
}

/// Solves a mixed 0-1 program by fixing every binary assignment and solving
/// the continuous remainder.
pub fn brute_force_milp<T: Scalar>(spec: &MilpSpec<T>, tol: &Tolerances<T>) -> Result<LpSolution<T>> {
    spec.validate()?;
    let nb = spec.binary_indices.len();
    guard(nb, MAX_ORACLE_BINARIES)?;
    let mut best: Option<LpSolution<T>> = None;
    for mask in 0u64..(1u64 << nb) {
        let mut lp = spec.base.clone();
        for (k, &j) in spec.binary_indices.iter().enumerate() {
            lp.fix(j, if mask & (1 << k) != 0 { T::one() } else { T::zero() });
        }
        let sol = solve_lp(&lp, tol)?;
        match sol.status {
            LpStatus::Infeasible => {}
            LpStatus::Unbounded => return Ok(sol),
            LpStatus::Optimal => {
                if best.as_ref().is_none_or(|b| sol.objective_value > b.objective_value) {
                    best = Some(sol);
                }
            }
        }
    }
    Ok(best.unwrap_or(LpSolution {
        status: LpStatus::Infeasible,
        x: Vec::new(),
        objective_value: T::zero(),
        iterations: 0,
    }))
}
