//! Depth-first branch-and-bound over binary variables.

use crate::data::Tolerances;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{solve_lp, LpSolution, LpStatus, MilpSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MilpOptions {
    pub node_limit: usize,
}

impl Default for MilpOptions {
    fn default() -> Self {
        MilpOptions {
            node_limit: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MilpStats {
    pub nodes: usize,
    pub lp_solves: usize,
}

/// Solves `spec` with the default node limit.
pub fn solve_milp<T: Scalar>(spec: &MilpSpec<T>, tol: &Tolerances<T>) -> Result<LpSolution<T>> {
    solve_milp_with(spec, tol, &MilpOptions::default()).map(|(sol, _)| sol)
}

/// Branches on the most fractional binary (lowest index on ties), exploring
/// the child nearest the relaxed value first. Integral nodes are polished by
/// re-solving with every binary fixed, so reported binaries are exactly 0 or 1.
pub fn solve_milp_with<T: Scalar>(
    spec: &MilpSpec<T>,
    tol: &Tolerances<T>,
    opts: &MilpOptions,
) -> Result<(LpSolution<T>, MilpStats)> {
    spec.validate()?;
    let feas = tol.feasibility_eps();
    let half = T::lit(0.5);
    let mut stats = MilpStats::default();
    let mut incumbent: Option<LpSolution<T>> = None;
    let mut iterations = 0;

    // Each node is a list of (binary position, fixed value).
    let mut stack: Vec<Vec<(usize, bool)>> = vec![Vec::new()];
    while let Some(fixings) = stack.pop() {
        stats.nodes += 1;
        if stats.nodes > opts.node_limit {
            return Err(Error::NodeLimit(opts.node_limit));
        }
        let mut lp = spec.base.clone();
        for &(k, v) in &fixings {
            lp.fix(spec.binary_indices[k], if v { T::one() } else { T::zero() });
        }
        let relaxed = solve_lp(&lp, tol)?;
        stats.lp_solves += 1;
        iterations += relaxed.iterations;
        match relaxed.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                let mut sol = relaxed;
                sol.iterations = iterations;
                return Ok((sol, stats));
            }
            LpStatus::Optimal => {}
        }
        if let Some(inc) = &incumbent {
            if relaxed.objective_value <= inc.objective_value + tol.objective_eps() {
                continue;
            }
        }

        let mut branch: Option<(usize, T)> = None;
        for (k, &j) in spec.binary_indices.iter().enumerate() {
            let v = relaxed.x[j];
            let frac = (v - v.round()).abs();
            if frac > feas && branch.is_none_or(|(_, f)| frac > f) {
                branch = Some((k, frac));
            }
        }

        match branch {
            None => {
                for &j in &spec.binary_indices {
                    lp.fix(j, relaxed.x[j].round());
                }
                let polished = solve_lp(&lp, tol)?;
                stats.lp_solves += 1;
                iterations += polished.iterations;
                let candidate = if polished.is_optimal() {
                    polished
                } else {
                    log::debug!("polish re-solve {:?}; keeping relaxed point", polished.status);
                    let mut sol = relaxed;
                    for &j in &spec.binary_indices {
                        sol.x[j] = sol.x[j].round();
                    }
                    sol.objective_value = spec.base.objective_at(&sol.x);
                    sol
                };
                let improves = incumbent
                    .as_ref()
                    .is_none_or(|inc| candidate.objective_value > inc.objective_value);
                if improves {
                    incumbent = Some(candidate);
                }
            }
            Some((k, _)) => {
                let up_first = relaxed.x[spec.binary_indices[k]] >= half;
                for v in [!up_first, up_first] {
                    let mut child = fixings.clone();
                    child.push((k, v));
                    stack.push(child);
                }
            }
        }
    }

    let mut sol = incumbent.unwrap_or_else(|| LpSolution::infeasible(0));
    sol.iterations = iterations;
    Ok((sol, stats))
}
