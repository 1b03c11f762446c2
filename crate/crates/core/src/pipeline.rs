//! End-to-end evaluation: range weights, RAM scores for every unit, the
//! efficient set, then one GRS identification per evaluated unit.

use std::time::{Duration, Instant};

use crate::data::{Dataset, Tolerances};
use crate::error::Result;
use crate::grs::{
    build_system, check_exactness, extract_grs, lift_to_model8, membership, recover_lambda_max,
    solve_model10, solve_model6, solve_model8, support_of, GrsMethod, GrsResult,
};
use crate::oracle::{brute_force_model8, per_unit_maxima, MAX_ORACLE_UNITS};
use crate::ram::{classify_efficient, compute_range_weights, EfficientSet, RangeWeights};
use crate::scalar::Scalar;
use crate::Error;

/// Dataset-wide state shared by every per-unit evaluation.
#[derive(Debug, Clone)]
pub struct Prepared<T> {
    pub weights: RangeWeights<T>,
    pub efficient: EfficientSet<T>,
    pub classify_time: Duration,
}

pub fn prepare<T: Scalar>(ds: &Dataset<T>, tol: &Tolerances<T>) -> Result<Prepared<T>> {
    let start = Instant::now();
    let weights = compute_range_weights(ds);
    let efficient = classify_efficient(ds, &weights, tol)?;
    Ok(Prepared {
        weights,
        efficient,
        classify_time: start.elapsed(),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub classify: Duration,
    pub system: Duration,
    pub model: Duration,
    pub recover: Duration,
    /// Only for [`GrsMethod::Milp`], whose optimum is checked against the relaxation.
    pub cross_check: Option<Duration>,
}

#[derive(Debug, Clone)]
pub struct Evaluation<T> {
    pub method: GrsMethod,
    pub grs: GrsResult<T>,
    pub objective: T,
    pub timings: PhaseTimings,
}

pub fn evaluate_unit<T: Scalar>(
    ds: &Dataset<T>,
    prep: &Prepared<T>,
    o: usize,
    method: GrsMethod,
    tol: &Tolerances<T>,
) -> Result<Evaluation<T>> {
    ds.check_index(o)?;
    evaluate_inner(ds, prep, o, method, tol).map_err(|e| e.at_dmu(&ds.record(o).id))
}

fn evaluate_inner<T: Scalar>(
    ds: &Dataset<T>,
    prep: &Prepared<T>,
    o: usize,
    method: GrsMethod,
    tol: &Tolerances<T>,
) -> Result<Evaluation<T>> {
    let mut timings = PhaseTimings {
        classify: prep.classify_time,
        ..PhaseTimings::default()
    };
    let eff = &prep.efficient;

    let t = Instant::now();
    let sys = build_system(ds, eff, o, &eff.ram[o], &prep.weights, tol)?;
    timings.system = t.elapsed();

    let (maximal, objective) = match method {
        GrsMethod::RelaxedLp => {
            let t = Instant::now();
            let sol = solve_model10(&sys, tol)?;
            timings.model = t.elapsed();
            let t = Instant::now();
            let maximal = recover_lambda_max(&sys, &sol, tol)?;
            timings.recover = t.elapsed();
            (maximal, sol.objective)
        }
        GrsMethod::Milp => {
            let t = Instant::now();
            let sol = solve_model8(&sys, tol)?;
            timings.model = t.elapsed();
            let t = Instant::now();
            check_exactness(&sol, &solve_model10(&sys, tol)?, tol)?;
            timings.cross_check = Some(t.elapsed());
            let t = Instant::now();
            let maximal = recover_lambda_max(&sys, &sol, tol)?;
            timings.recover = t.elapsed();
            (maximal, sol.objective)
        }
        GrsMethod::SplitLp => {
            let t = Instant::now();
            let sol = solve_model6(&sys, tol)?;
            timings.model = t.elapsed();
            (sol.maximal, sol.objective)
        }
    };

    Ok(Evaluation {
        method,
        grs: extract_grs(ds, &sys, maximal),
        objective,
        timings,
    })
}

/// One named pass/fail outcome of [`verify_unit`].
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Verification<T> {
    pub dmu: String,
    pub efficient_count: usize,
    pub checks: Vec<Check>,
    pub max_objective_gap: T,
    pub max_membership_residual: T,
    /// Support of the relaxed-program maximal element, as dataset ids.
    pub grs: Vec<String>,
}

impl<T> Verification<T> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

/// Runs every GRS program and both brute-force oracles on unit `o` and
/// compares their answers.
pub fn verify_unit<T: Scalar>(
    ds: &Dataset<T>,
    prep: &Prepared<T>,
    o: usize,
    tol: &Tolerances<T>,
) -> Result<Verification<T>> {
    ds.check_index(o)?;
    let eff = &prep.efficient;
    if eff.len() > MAX_ORACLE_UNITS {
        return Err(Error::OracleSizeGuard {
            size: eff.len(),
            limit: MAX_ORACLE_UNITS,
            hint: "verification enumerates 2^(|E|+1) patterns; use evaluate instead",
        });
    }
    let run = || -> Result<Verification<T>> {
        let sys = build_system(ds, eff, o, &eff.ram[o], &prep.weights, tol)?;
        let ten = solve_model10(&sys, tol)?;
        let eight = solve_model8(&sys, tol)?;
        let six = solve_model6(&sys, tol)?;
        let max10 = recover_lambda_max(&sys, &ten, tol)?;
        let max8 = recover_lambda_max(&sys, &eight, tol)?;
        let (oracle, maximizers) = per_unit_maxima(&sys, tol)?;
        let pattern = brute_force_model8(&sys, tol)?;

        let mut checks = Vec::new();
        let obj_eps = tol.objective_eps();
        let gap = (ten.objective - eight.objective).abs();
        let brute_gap = (pattern.objective - ten.objective).abs();
        checks.push(check(
            "milp_equals_relaxation",
            gap <= obj_eps,
            format!("relaxed {} vs mixed 0-1 {}", ten.objective, eight.objective),
        ));
        checks.push(check(
            "brute_force_equals_relaxation",
            brute_gap <= obj_eps,
            format!("enumeration {} vs relaxed {}", pattern.objective, ten.objective),
        ));
        let feas = tol.feasibility_eps();
        let integral = ten.gamma >= T::one() - feas
            && ten.alpha.iter().all(|a| a.min(T::one() - *a) <= feas);
        checks.push(check(
            "relaxed_optimum_integral",
            integral,
            format!("gamma* = {}", ten.gamma),
        ));
        let supports_agree =
            max10.support == max8.support && max10.support == six.maximal.support && max10.support == oracle;
        checks.push(check(
            "supports_agree",
            supports_agree,
            format!(
                "relaxed {:?}, mixed 0-1 {:?}, split {:?}, oracle {:?}",
                max10.support, max8.support, six.maximal.support, oracle
            ),
        ));
        let count = T::from_usize(oracle.len() + 1).expect("count fits scalar");
        checks.push(check(
            "oracle_count_matches",
            (pattern.objective - count).abs() <= obj_eps,
            format!("|oracle support| + 1 = {count}, enumeration {}", pattern.objective),
        ));

        let sum: T = max10.lambda_max.iter().copied().sum();
        let residual = [max10.residual, max8.residual, six.maximal.residual]
            .into_iter()
            .fold(T::zero(), |a, r| a.max(r));
        checks.push(check(
            "lambda_max_member",
            (sum - T::one()).abs() <= feas,
            format!("sum = {sum}, residual {:e}", residual.as_f64()),
        ));

        // Each per-unit maximizer and their average are members; lift them all.
        let (k, m) = (sys.k(), sys.m);
        let mut members: Vec<Vec<T>> = maximizers.clone();
        if !maximizers.is_empty() {
            let scale = T::one() / T::from_usize(maximizers.len()).expect("count fits scalar");
            let mut avg = vec![T::zero(); sys.num_cols()];
            for p in &maximizers {
                for (a, v) in avg.iter_mut().zip(p) {
                    *a = *a + *v * scale;
                }
            }
            members.push(avg);
        }
        let mut lift_ok = true;
        let mut subset_ok = true;
        for p in &members {
            let (lam, rest) = p.split_at(k);
            let (sm, sp) = rest.split_at(m);
            let lifted = lift_to_model8(&sys, lam, sm, sp, tol)?;
            lift_ok &= lifted.objective <= eight.objective + obj_eps;
            subset_ok &= support_of(lam, tol.support_eps())
                .iter()
                .all(|j| max10.support.contains(j));
            subset_ok &= membership(&sys, lam, tol)?.member;
        }
        checks.push(check(
            "lifting_bounded_by_optimum",
            lift_ok,
            format!("{} sampled members lifted", members.len()),
        ));
        checks.push(check(
            "support_maximality",
            subset_ok,
            format!("{} sampled members checked", members.len()),
        ));

        Ok(Verification {
            dmu: ds.record(o).id.clone(),
            efficient_count: eff.len(),
            checks,
            max_objective_gap: gap.max(brute_gap),
            max_membership_residual: residual,
            grs: max10.support.iter().map(|&p| ds.record(sys.efficient[p]).id.clone()).collect(),
        })
    };
    run().map_err(|e| e.at_dmu(&ds.record(o).id))
}
