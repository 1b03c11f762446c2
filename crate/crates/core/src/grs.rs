//! Global reference set identification.
//!
//! The optimal RAM solutions of unit `o` are exactly the non-negative
//! solutions `(lambda, s-, s+)` of the linear system
//!
//! ```text
//! [ X_E  I   0 ] [lambda]   [ x_o              ]
//! [ Y_E  0  -I ] [  s-  ] = [ y_o              ]
//! [ 1^T  0   0 ] [  s+  ]   [ 1                ]
//! [ 0   R-^T R+^T]          [ (m+s)(1 - rho_o) ]
//! ```
//!
//! with intensities restricted to the RAM-efficient units `E`. The set of
//! their intensity vectors is convex, so it contains an element whose support
//! is the union of all supports. That maximal element is found from the
//! optimum `(lambda*, delta*)` of the homogenized program
//!
//! ```text
//! max 1^T a + g   s.t.  A [lambda; s] - rhs * delta = 0,  a <= lambda,  g <= delta,
//!                       a in [0,1]^|E| (or binary),  g in [0,1] (or binary)
//! ```
//!
//! as `lambda* / delta*`. With binary `a`, `g` this is a mixed 0-1 program;
//! its LP relaxation has the same optimum and is integral there, so the pure
//! LP is the default method. A second, equivalent LP writes `lambda = a + b`
//! and `delta = g + nu`.

use std::fmt;
use std::str::FromStr;

use crate::data::{Dataset, Tolerances};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, solve_milp, LinearProgram, LpSolution, LpStatus, MilpSpec};
use crate::ram::{EfficientSet, RamResult, RangeWeights};
use crate::scalar::{dot, Scalar};

/// Linear system whose non-negative solutions are the optimal RAM solutions
/// of one evaluated unit. Columns are `[lambda (|E|) | s- (m) | s+ (s)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalSolutionSystem<T> {
    pub o: usize,
    /// Dataset indices of the efficient units, i.e. the lambda columns.
    pub efficient: Vec<usize>,
    pub m: usize,
    pub s: usize,
    pub x_o: Vec<T>,
    pub y_o: Vec<T>,
    pub rho: T,
    /// `(m+s)(1 - rho_o)`, taken from the RAM optimum.
    pub rhs_inefficiency: T,
    pub weights: RangeWeights<T>,
    pub rows: Vec<Vec<T>>,
    pub rhs: Vec<T>,
    /// False when every weight is zero and the weighted-slack row was dropped.
    pub has_slack_row: bool,
    /// Non-efficient units carrying intensity in the RAM vertex, as
    /// `(dataset index, weight)`.
    pub off_frontier: Vec<(usize, T)>,
}

impl<T: Scalar> OptimalSolutionSystem<T> {
    pub fn k(&self) -> usize {
        self.efficient.len()
    }

    pub fn num_cols(&self) -> usize {
        self.k() + self.m + self.s
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Acceptable absolute residual of row `i`. The weighted-slack row carries
    /// error from the earlier RAM solve and gets ten times the slack.
    pub fn row_tolerance(&self, i: usize, tol: &Tolerances<T>) -> T {
        let base = tol.feasibility_eps() * T::one().max(self.rhs[i].abs());
        if self.has_slack_row && i == self.rows.len() - 1 {
            base * T::lit(10.0)
        } else {
            base
        }
    }

    /// Signed residuals `A z - rhs` for `z = [lambda; s-; s+]`.
    pub fn residuals(&self, z: &[T]) -> Vec<T> {
        self.rows.iter().zip(&self.rhs).map(|(row, b)| dot(row, z) - *b).collect()
    }

    /// Whether `(lambda, s-, s+)` solves the system within tolerance.
    pub fn is_solution(&self, lambda: &[T], s_minus: &[T], s_plus: &[T], tol: &Tolerances<T>) -> bool {
        if lambda.len() != self.k() || s_minus.len() != self.m || s_plus.len() != self.s {
            return false;
        }
        let z: Vec<T> = lambda.iter().chain(s_minus).chain(s_plus).copied().collect();
        let nonneg = z.iter().all(|v| *v >= -tol.feasibility_eps());
        nonneg
            && self
                .residuals(&z)
                .iter()
                .enumerate()
                .all(|(i, r)| r.abs() <= self.row_tolerance(i, tol))
    }

    fn check_lambda_len(&self, lambda: &[T]) -> Result<()> {
        if lambda.len() == self.k() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "intensity vector of length {}, expected |E| = {}",
                lambda.len(),
                self.k()
            )))
        }
    }
}

/// Assembles the optimal-solution system of unit `o` from its RAM solve.
pub fn build_system<T: Scalar>(
    ds: &Dataset<T>,
    eff: &EfficientSet<T>,
    o: usize,
    ram: &RamResult<T>,
    w: &RangeWeights<T>,
    tol: &Tolerances<T>,
) -> Result<OptimalSolutionSystem<T>> {
    ds.check_index(o)?;
    if ram.o != o {
        return Err(Error::InvalidArgument(format!(
            "RAM result belongs to unit {}, not {o}",
            ram.o
        )));
    }
    let (m, s) = (ds.m(), ds.s());
    let k = eff.len();
    let cols = k + m + s;
    let mut rows = Vec::with_capacity(m + s + 2);
    let mut rhs = Vec::with_capacity(m + s + 2);

    for i in 0..m {
        let mut row = vec![T::zero(); cols];
        row[..k].copy_from_slice(&eff.x_e[i]);
        row[k + i] = T::one();
        rows.push(row);
        rhs.push(ds.x(i, o));
    }
    for r in 0..s {
        let mut row = vec![T::zero(); cols];
        row[..k].copy_from_slice(&eff.y_e[r]);
        row[k + m + r] = -T::one();
        rows.push(row);
        rhs.push(ds.y(r, o));
    }
    let mut ones = vec![T::zero(); cols];
    ones[..k].iter_mut().for_each(|v| *v = T::one());
    rows.push(ones);
    rhs.push(T::one());

    let mut rhs_inefficiency = ram.weighted_slack.max(T::zero());
    if rhs_inefficiency <= tol.feasibility_eps() {
        rhs_inefficiency = T::zero();
    }
    let has_slack_row = !w.all_degenerate();
    if has_slack_row {
        let mut row = vec![T::zero(); cols];
        row[k..k + m].copy_from_slice(&w.r_minus);
        row[k + m..].copy_from_slice(&w.r_plus);
        rows.push(row);
        rhs.push(rhs_inefficiency);
    } else {
        log::warn!(
            "every data column is constant; dropping the vacuous weighted-slack row for {}",
            ds.record(o).id
        );
    }

    let off_frontier: Vec<(usize, T)> = ram
        .lambda
        .iter()
        .enumerate()
        .filter(|(j, v)| **v > tol.support_eps() && !eff.contains(*j))
        .map(|(j, v)| (j, *v))
        .collect();
    for (j, v) in &off_frontier {
        log::warn!(
            "RAM vertex of {} puts weight {} on non-efficient unit {}",
            ds.record(o).id,
            v,
            ds.record(*j).id
        );
    }

    Ok(OptimalSolutionSystem {
        o,
        efficient: eff.indices.clone(),
        m,
        s,
        x_o: ds.input_column(o).to_vec(),
        y_o: ds.output_column(o).to_vec(),
        rho: ram.rho,
        rhs_inefficiency,
        weights: w.clone(),
        rows,
        rhs,
        has_slack_row,
        off_frontier,
    })
}

/// Outcome of testing an intensity vector for membership in the optimal set.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership<T> {
    pub member: bool,
    /// Largest absolute row violation left after choosing the best slacks.
    pub residual: T,
    pub s_minus: Vec<T>,
    pub s_plus: Vec<T>,
}

/// Fixes `lambda` and minimizes the (tolerance-weighted) L1 violation of the
/// system over the slacks.
pub fn membership<T: Scalar>(
    sys: &OptimalSolutionSystem<T>,
    lambda: &[T],
    tol: &Tolerances<T>,
) -> Result<Membership<T>> {
    sys.check_lambda_len(lambda)?;
    let (k, m, s) = (sys.k(), sys.m, sys.s);
    let nr = sys.num_rows();
    let ns = m + s;
    // Columns: [s- (m) | s+ (s) | over (nr) | under (nr)].
    let mut lp = LinearProgram::new(ns + 2 * nr);
    let row_tol: Vec<T> = (0..nr).map(|i| sys.row_tolerance(i, tol)).collect();
    let min_tol = row_tol.iter().fold(T::infinity(), |a, b| a.min(*b));
    for i in 0..nr {
        let weight = min_tol / row_tol[i];
        lp.objective[ns + i] = -weight;
        lp.objective[ns + nr + i] = -weight;
        let fixed = dot(&sys.rows[i][..k], lambda);
        let mut row: Vec<(usize, T)> = (0..ns).map(|c| (c, sys.rows[i][k + c])).collect();
        row.push((ns + i, T::one()));
        row.push((ns + nr + i, -T::one()));
        lp.add_row(&row, sys.rhs[i] - fixed);
    }
    let sol = solve_lp(&lp, tol)?;
    if !sol.is_optimal() {
        return Err(Error::Internal(format!(
            "membership program reported {:?}; it is always feasible and bounded",
            sol.status
        )));
    }
    let deviation: Vec<T> = (0..nr).map(|i| sol.x[ns + i] + sol.x[ns + nr + i]).collect();
    let residual = deviation.iter().fold(T::zero(), |a, d| a.max(*d));
    let nonneg = lambda.iter().all(|v| *v >= -tol.feasibility_eps());
    let member = nonneg && deviation.iter().zip(&row_tol).all(|(d, t)| *d <= *t);
    Ok(Membership {
        member,
        residual,
        s_minus: sol.x[..m].to_vec(),
        s_plus: sol.x[m..ns].to_vec(),
    })
}

/// True iff some slacks make `(lambda, s-, s+)` an optimal RAM solution.
pub fn check_omega_membership<T: Scalar>(
    sys: &OptimalSolutionSystem<T>,
    lambda: &[T],
    tol: &Tolerances<T>,
) -> Result<bool> {
    membership(sys, lambda, tol).map(|r| r.member)
}

/// Optimum of the homogenized program, binary-relaxed or not.
#[derive(Debug, Clone, PartialEq)]
pub struct Model10Solution<T> {
    pub lambda: Vec<T>,
    pub s_minus: Vec<T>,
    pub s_plus: Vec<T>,
    pub delta: T,
    pub alpha: Vec<T>,
    pub gamma: T,
    pub objective: T,
}

struct HomogeneousLayout {
    k: usize,
    m: usize,
    s: usize,
}

impl HomogeneousLayout {
    fn of<T: Scalar>(sys: &OptimalSolutionSystem<T>) -> Self {
        HomogeneousLayout {
            k: sys.k(),
            m: sys.m,
            s: sys.s,
        }
    }
    fn delta(&self) -> usize {
        self.k + self.m + self.s
    }
    fn alpha(&self, j: usize) -> usize {
        self.delta() + 1 + j
    }
    fn gamma(&self) -> usize {
        self.delta() + 1 + self.k
    }
    fn alpha_gap(&self, j: usize) -> usize {
        self.gamma() + 1 + j
    }
    fn gamma_gap(&self) -> usize {
        self.gamma() + 1 + self.k
    }
    fn width(&self) -> usize {
        self.gamma_gap() + 1
    }
}

/// The relaxed program over `[lambda | s- | s+ | delta | a | g | a-gap | g-gap]`,
/// where the gap columns turn `a <= lambda` and `g <= delta` into equalities.
pub fn model10_program<T: Scalar>(sys: &OptimalSolutionSystem<T>) -> LinearProgram<T> {
    let lay = HomogeneousLayout::of(sys);
    let cols = sys.num_cols();
    let mut lp = LinearProgram::new(lay.width());
    for (row, b) in sys.rows.iter().zip(&sys.rhs) {
        let mut dense = vec![T::zero(); lay.width()];
        dense[..cols].copy_from_slice(row);
        dense[lay.delta()] = -*b;
        lp.add_dense_row(dense, T::zero());
    }
    for j in 0..lay.k {
        lp.add_row(&[(lay.alpha(j), T::one()), (j, -T::one()), (lay.alpha_gap(j), T::one())], T::zero());
        lp.objective[lay.alpha(j)] = T::one();
        lp.set_bounds(lay.alpha(j), T::zero(), Some(T::one()));
    }
    lp.add_row(
        &[(lay.gamma(), T::one()), (lay.delta(), -T::one()), (lay.gamma_gap(), T::one())],
        T::zero(),
    );
    lp.objective[lay.gamma()] = T::one();
    lp.set_bounds(lay.gamma(), T::zero(), Some(T::one()));
    lp
}

/// The mixed 0-1 program: [`model10_program`] with `a` and `g` binary.
pub fn model8_spec<T: Scalar>(sys: &OptimalSolutionSystem<T>) -> MilpSpec<T> {
    let lay = HomogeneousLayout::of(sys);
    let binaries = (0..lay.k).map(|j| lay.alpha(j)).chain([lay.gamma()]).collect();
    MilpSpec::new(model10_program(sys), binaries)
}

fn unpack_homogeneous<T: Scalar>(sys: &OptimalSolutionSystem<T>, sol: &LpSolution<T>) -> Model10Solution<T> {
    let lay = HomogeneousLayout::of(sys);
    let x = &sol.x;
    Model10Solution {
        lambda: x[..lay.k].to_vec(),
        s_minus: x[lay.k..lay.k + lay.m].to_vec(),
        s_plus: x[lay.k + lay.m..lay.delta()].to_vec(),
        delta: x[lay.delta()],
        alpha: (0..lay.k).map(|j| x[lay.alpha(j)]).collect(),
        gamma: x[lay.gamma()],
        objective: sol.objective_value,
    }
}

/// Packs a homogeneous point into [`model10_program`]'s column layout.
pub fn pack_homogeneous<T: Scalar>(sys: &OptimalSolutionSystem<T>, p: &Model10Solution<T>) -> Vec<T> {
    let lay = HomogeneousLayout::of(sys);
    let mut x = vec![T::zero(); lay.width()];
    x[..lay.k].copy_from_slice(&p.lambda);
    x[lay.k..lay.k + lay.m].copy_from_slice(&p.s_minus);
    x[lay.k + lay.m..lay.delta()].copy_from_slice(&p.s_plus);
    x[lay.delta()] = p.delta;
    for j in 0..lay.k {
        x[lay.alpha(j)] = p.alpha[j];
        x[lay.alpha_gap(j)] = p.lambda[j] - p.alpha[j];
    }
    x[lay.gamma()] = p.gamma;
    x[lay.gamma_gap()] = p.delta - p.gamma;
    x
}

fn expect_optimal<T: Scalar>(sol: &LpSolution<T>, what: &str) -> Result<()> {
    match sol.status {
        LpStatus::Optimal => Ok(()),
        status => Err(Error::Internal(format!(
            "{what} reported {status:?}; the zero point is feasible and the objective is bounded"
        ))),
    }
}

/// Checks the integrality the relaxation is guaranteed to have at its optimum.
fn check_integral_optimum<T: Scalar>(sol: &Model10Solution<T>, tol: &Tolerances<T>, what: &str) -> Result<()> {
    let feas = tol.feasibility_eps();
    if sol.delta <= feas {
        return Err(Error::TheoremViolation(format!(
            "{what}: delta* = {} is not positive",
            sol.delta
        )));
    }
    if sol.gamma < T::one() - feas {
        return Err(Error::TheoremViolation(format!("{what}: gamma* = {} < 1", sol.gamma)));
    }
    if let Some((j, a)) = sol
        .alpha
        .iter()
        .enumerate()
        .find(|(_, a)| a.min(T::one() - **a) > feas)
    {
        return Err(Error::TheoremViolation(format!(
            "{what}: alpha*[{j}] = {a} is fractional"
        )));
    }
    Ok(())
}

/// Solves the LP relaxation and checks that its optimum is integral.
pub fn solve_model10<T: Scalar>(sys: &OptimalSolutionSystem<T>, tol: &Tolerances<T>) -> Result<Model10Solution<T>> {
    let sol = solve_lp(&model10_program(sys), tol)?;
    expect_optimal(&sol, "relaxed program")?;
    let out = unpack_homogeneous(sys, &sol);
    check_integral_optimum(&out, tol, "relaxed program")?;
    Ok(out)
}

/// Solves the mixed 0-1 program by branch-and-bound.
///
/// Use [`check_exactness`] to compare the result with [`solve_model10`].
pub fn solve_model8<T: Scalar>(sys: &OptimalSolutionSystem<T>, tol: &Tolerances<T>) -> Result<Model10Solution<T>> {
    let sol = solve_milp(&model8_spec(sys), tol)?;
    expect_optimal(&sol, "mixed 0-1 program")?;
    let out = unpack_homogeneous(sys, &sol);
    check_integral_optimum(&out, tol, "mixed 0-1 program")?;
    Ok(out)
}

/// Errors unless the mixed 0-1 and relaxed optima agree within `objective_eps`.
pub fn check_exactness<T: Scalar>(
    milp: &Model10Solution<T>,
    relaxed: &Model10Solution<T>,
    tol: &Tolerances<T>,
) -> Result<()> {
    let gap = (milp.objective - relaxed.objective).abs();
    if gap > tol.objective_eps() {
        return Err(Error::TheoremViolation(format!(
            "mixed 0-1 optimum {} differs from relaxed optimum {}",
            milp.objective, relaxed.objective
        )));
    }
    Ok(())
}

/// A maximal-support member of the optimal intensity set.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalElement<T> {
    /// Indexed over `E`.
    pub lambda_max: Vec<T>,
    /// Positions within `E` where `lambda_max > support_eps`.
    pub support: Vec<usize>,
    pub cardinality: usize,
    /// Membership residual found when re-verifying `lambda_max`.
    pub residual: T,
}

pub fn support_of<T: Scalar>(v: &[T], eps: T) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| **x > eps)
        .map(|(j, _)| j)
        .collect()
}

fn verified_maximal<T: Scalar>(
    sys: &OptimalSolutionSystem<T>,
    lambda_max: Vec<T>,
    tol: &Tolerances<T>,
) -> Result<MaximalElement<T>> {
    let check = membership(sys, &lambda_max, tol)?;
    if !check.member {
        return Err(Error::NumericalBreakdown(format!(
            "recovered intensity vector fails the membership check (residual {:e})",
            check.residual.as_f64()
        )));
    }
    let support = support_of(&lambda_max, tol.support_eps());
    Ok(MaximalElement {
        cardinality: support.len(),
        support,
        lambda_max,
        residual: check.residual,
    })
}

/// `lambda_max = lambda* / delta*`, thresholded after the division.
pub fn recover_lambda_max<T: Scalar>(
    sys: &OptimalSolutionSystem<T>,
    sol: &Model10Solution<T>,
    tol: &Tolerances<T>,
) -> Result<MaximalElement<T>> {
    sys.check_lambda_len(&sol.lambda)?;
    if sol.delta <= tol.feasibility_eps() {
        return Err(Error::TheoremViolation(format!(
            "delta* = {} is not positive",
            sol.delta
        )));
    }
    let lambda_max: Vec<T> = sol.lambda.iter().map(|v| *v / sol.delta).collect();
    let maximal = verified_maximal(sys, lambda_max, tol)?;
    let selected = sol.alpha.iter().filter(|a| **a > T::lit(0.5)).count();
    if selected != maximal.cardinality {
        return Err(Error::TheoremViolation(format!(
            "{} binary indicators set but lambda* / delta* has {} positive components",
            selected, maximal.cardinality
        )));
    }
    Ok(maximal)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model6Solution<T> {
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    pub s_minus: Vec<T>,
    pub s_plus: Vec<T>,
    pub gamma: T,
    pub nu: T,
    pub objective: T,
    pub maximal: MaximalElement<T>,
}

/// The split program over `[a (|E|) | b (|E|) | s- | s+ | g | nu]`:
/// `max 1^T a + g` s.t. `A [a + b; s] - rhs (g + nu) = 0`, `a, g in [0, 1]`.
pub fn model6_program<T: Scalar>(sys: &OptimalSolutionSystem<T>) -> LinearProgram<T> {
    let (k, m, s) = (sys.k(), sys.m, sys.s);
    let gamma = 2 * k + m + s;
    let nu = gamma + 1;
    let mut lp = LinearProgram::new(nu + 1);
    for (row, b) in sys.rows.iter().zip(&sys.rhs) {
        let mut dense = vec![T::zero(); nu + 1];
        dense[..k].copy_from_slice(&row[..k]);
        dense[k..2 * k].copy_from_slice(&row[..k]);
        dense[2 * k..gamma].copy_from_slice(&row[k..]);
        dense[gamma] = -*b;
        dense[nu] = -*b;
        lp.add_dense_row(dense, T::zero());
    }
    for j in 0..k {
        lp.objective[j] = T::one();
        lp.set_bounds(j, T::zero(), Some(T::one()));
    }
    lp.objective[gamma] = T::one();
    lp.set_bounds(gamma, T::zero(), Some(T::one()));
    lp
}

/// Maps a homogeneous point to the split layout via `b = lambda - a`,
/// `nu = delta - g`.
pub fn split_point<T: Scalar>(sys: &OptimalSolutionSystem<T>, p: &Model10Solution<T>) -> Vec<T> {
    let k = sys.k();
    let mut x: Vec<T> = p.alpha.clone();
    x.extend(p.lambda.iter().zip(&p.alpha).map(|(l, a)| *l - *a));
    x.extend(&p.s_minus);
    x.extend(&p.s_plus);
    x.push(p.gamma);
    x.push(p.delta - p.gamma);
    debug_assert_eq!(x.len(), 2 * k + sys.m + sys.s + 2);
    x
}

/// Solves the split LP and recovers `lambda_max = (a* + b*) / (1 + nu*)`.
pub fn solve_model6<T: Scalar>(sys: &OptimalSolutionSystem<T>, tol: &Tolerances<T>) -> Result<Model6Solution<T>> {
    let (k, m, s) = (sys.k(), sys.m, sys.s);
    let sol = solve_lp(&model6_program(sys), tol)?;
    expect_optimal(&sol, "split program")?;
    let x = &sol.x;
    let gamma = x[2 * k + m + s];
    let nu = x[2 * k + m + s + 1];
    if gamma < T::one() - tol.feasibility_eps() {
        return Err(Error::TheoremViolation(format!("split program: gamma* = {gamma} < 1")));
    }
    let alpha = x[..k].to_vec();
    let beta = x[k..2 * k].to_vec();
    let scale = T::one() + nu;
    let lambda_max: Vec<T> = alpha.iter().zip(&beta).map(|(a, b)| (*a + *b) / scale).collect();
    let maximal = verified_maximal(sys, lambda_max, tol)?;
    Ok(Model6Solution {
        alpha,
        beta,
        s_minus: x[2 * k..2 * k + m].to_vec(),
        s_plus: x[2 * k + m..2 * k + m + s].to_vec(),
        gamma,
        nu,
        objective: sol.objective_value,
        maximal,
    })
}

/// Lifts a member of the optimal set to a feasible point of the mixed 0-1
/// program with `1^T a = n+(lambda)`.
///
/// `a <= lambda` with binary `a` needs every positive intensity to be at
/// least 1, so the whole point is scaled by `1 / min_{lambda_j > 0} lambda_j`;
/// the constraints are homogeneous, so feasibility is preserved.
pub fn lift_to_model8<T: Scalar>(
    sys: &OptimalSolutionSystem<T>,
    lambda: &[T],
    s_minus: &[T],
    s_plus: &[T],
    tol: &Tolerances<T>,
) -> Result<Model10Solution<T>> {
    if !sys.is_solution(lambda, s_minus, s_plus, tol) {
        return Err(Error::InvalidArgument(
            "point does not solve the optimal-solution system".into(),
        ));
    }
    let eps = tol.support_eps();
    let smallest = lambda
        .iter()
        .filter(|v| **v > eps)
        .fold(T::infinity(), |a, v| a.min(*v));
    if !smallest.is_finite() {
        return Err(Error::InvalidArgument("intensity vector has no positive component".into()));
    }
    let scale = T::one() / smallest;
    let alpha: Vec<T> = lambda
        .iter()
        .map(|v| if *v > eps { T::one() } else { T::zero() })
        .collect();
    let lifted = Model10Solution {
        lambda: lambda.iter().map(|v| *v * scale).collect(),
        s_minus: s_minus.iter().map(|v| *v * scale).collect(),
        s_plus: s_plus.iter().map(|v| *v * scale).collect(),
        delta: scale,
        objective: alpha.iter().copied().sum::<T>() + T::one(),
        alpha,
        gamma: T::one(),
    };

    // Homogeneous rows are the system rows scaled by delta.
    let spec = model8_spec(sys);
    let x = pack_homogeneous(sys, &lifted);
    let row_tol = (0..sys.num_rows()).fold(T::zero(), |a, i| a.max(sys.row_tolerance(i, tol)));
    let resid = spec.base.residual(&x);
    let bound = spec.base.bound_violation(&x);
    if resid > row_tol * scale || bound > tol.feasibility_eps() * scale {
        return Err(Error::NumericalBreakdown(format!(
            "lifted point violates the mixed 0-1 program (residual {:e}, bound {:e})",
            resid.as_f64(),
            bound.as_f64()
        )));
    }
    Ok(lifted)
}

/// Which program identifies the maximal element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[derive(Default)]
pub enum GrsMethod {
    /// LP relaxation of the mixed 0-1 program (default).
    #[default]
    RelaxedLp,
    /// The mixed 0-1 program, by branch-and-bound.
    Milp,
    /// The split LP in `lambda = a + b`, `delta = g + nu` variables.
    SplitLp,
}

impl GrsMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            GrsMethod::RelaxedLp => "relaxed-lp",
            GrsMethod::Milp => "milp",
            GrsMethod::SplitLp => "mehdiloozad-lp",
        }
    }
}


impl fmt::Display for GrsMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GrsMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relaxed-lp" => Ok(GrsMethod::RelaxedLp),
            "milp" => Ok(GrsMethod::Milp),
            "mehdiloozad-lp" => Ok(GrsMethod::SplitLp),
            other => Err(Error::InvalidArgument(format!(
                "unknown method `{other}`; expected relaxed-lp, milp or mehdiloozad-lp"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrsResult<T> {
    pub evaluated_id: String,
    pub evaluated: usize,
    /// Dataset indices of the reference units, in dataset order.
    pub reference_indices: Vec<usize>,
    pub reference_ids: Vec<String>,
    /// `(id, weight)` for every efficient unit, in dataset order.
    pub lambda_max: Vec<(String, T)>,
    pub maximal: MaximalElement<T>,
    pub rho: T,
}

/// Maps the support of `maximal` back to dataset ids.
pub fn extract_grs<T: Scalar>(
    ds: &Dataset<T>,
    sys: &OptimalSolutionSystem<T>,
    maximal: MaximalElement<T>,
) -> GrsResult<T> {
    let reference_indices: Vec<usize> = maximal.support.iter().map(|&k| sys.efficient[k]).collect();
    GrsResult {
        evaluated_id: ds.record(sys.o).id.clone(),
        evaluated: sys.o,
        reference_ids: reference_indices.iter().map(|&j| ds.record(j).id.clone()).collect(),
        reference_indices,
        lambda_max: sys
            .efficient
            .iter()
            .zip(&maximal.lambda_max)
            .map(|(&j, v)| (ds.record(j).id.clone(), *v))
            .collect(),
        rho: sys.rho,
        maximal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{default_tolerances, DmuRecord};
    use crate::ram::{classify_efficient, compute_range_weights};

    fn dataset(rows: &[(&str, &[f64], &[f64])]) -> Dataset<f64> {
        Dataset::new(
            rows.iter()
                .map(|(id, x, y)| DmuRecord::new(*id, x.to_vec(), y.to_vec()))
                .collect(),
            (0..rows[0].1.len()).map(|i| format!("x{i}")).collect(),
            (0..rows[0].2.len()).map(|r| format!("y{r}")).collect(),
        )
        .unwrap()
    }

    fn three() -> Dataset<f64> {
        dataset(&[("A", &[1.0], &[1.0]), ("B", &[3.0], &[3.0]), ("C", &[2.0], &[1.0])])
    }

    fn two() -> Dataset<f64> {
        dataset(&[("DMU1", &[1.0], &[2.0]), ("DMU2", &[2.0], &[1.0])])
    }

    fn system(d: &Dataset<f64>, o: usize) -> OptimalSolutionSystem<f64> {
        let tol = default_tolerances();
        let w = compute_range_weights(d);
        let eff = classify_efficient(d, &w, &tol).unwrap();
        build_system(d, &eff, o, &eff.ram[o], &w, &tol).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
    }

    #[test]
    fn system_rhs_for_inefficient_unit() {
        let sys = system(&three(), 2);
        assert!(close(&sys.rhs, &[2.0, 1.0, 1.0, 0.5]));
        assert_eq!(sys.efficient, vec![0, 1]);
        assert!(sys.has_slack_row);
        assert!(sys.off_frontier.is_empty());
    }

    #[test]
    fn efficient_unit_has_zero_rhs_inefficiency() {
        let sys = system(&three(), 0);
        assert_eq!(sys.rhs_inefficiency, 0.0);
    }

    #[test]
    fn ram_vertex_restricted_to_frontier_solves_system() {
        let d = three();
        let tol = default_tolerances();
        let w = compute_range_weights(&d);
        let eff = classify_efficient(&d, &w, &tol).unwrap();
        for o in 0..d.n() {
            let sys = build_system(&d, &eff, o, &eff.ram[o], &w, &tol).unwrap();
            let ram = &eff.ram[o];
            let lambda: Vec<f64> = eff.indices.iter().map(|&j| ram.lambda[j]).collect();
            assert!(sys.is_solution(&lambda, &ram.s_minus, &ram.s_plus, &tol));
        }
    }

    #[test]
    fn build_system_rejects_mismatched_unit() {
        let d = three();
        let tol = default_tolerances();
        let w = compute_range_weights(&d);
        let eff = classify_efficient(&d, &w, &tol).unwrap();
        assert!(matches!(
            build_system(&d, &eff, 5, &eff.ram[0], &w, &tol),
            Err(Error::DmuIndexOutOfRange { .. })
        ));
        assert!(matches!(
            build_system(&d, &eff, 1, &eff.ram[0], &w, &tol),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn membership_on_the_optimal_face() {
        let sys = system(&three(), 2);
        let tol = default_tolerances();
        assert!(check_omega_membership(&sys, &[1.0, 0.0], &tol).unwrap());
        assert!(!check_omega_membership(&sys, &[0.0, 1.0], &tol).unwrap());
        assert!(check_omega_membership(&sys, &[0.5, 0.5], &tol).unwrap());
        assert!(!check_omega_membership(&sys, &[0.4, 0.6], &tol).unwrap());
        assert!(!check_omega_membership(&sys, &[0.5, 0.4], &tol).unwrap());
        let r = membership(&sys, &[0.75, 0.25], &tol).unwrap();
        assert!(r.member && r.residual < 1e-12);
        assert!(close(&r.s_minus, &[0.5]) && close(&r.s_plus, &[0.5]));
        assert!(matches!(
            check_omega_membership(&sys, &[1.0], &tol),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn relaxed_program_on_worked_examples() {
        let tol = default_tolerances();
        let sys = system(&three(), 2);
        let sol = solve_model10(&sys, &tol).unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-9);
        assert!(close(&sol.alpha, &[1.0, 1.0]));
        assert!((sol.gamma - 1.0).abs() < 1e-12);
        let max = recover_lambda_max(&sys, &sol, &tol).unwrap();
        assert_eq!(max.support, vec![0, 1]);
        assert!((max.lambda_max.iter().sum::<f64>() - 1.0).abs() < 1e-9);

        let sys = system(&three(), 0);
        let sol = solve_model10(&sys, &tol).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-9);
        let max = recover_lambda_max(&sys, &sol, &tol).unwrap();
        assert_eq!(max.support, vec![0]);
        assert!(close(&max.lambda_max, &[1.0, 0.0]));

        let sys = system(&two(), 1);
        let sol = solve_model10(&sys, &tol).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-9);
        assert_eq!(recover_lambda_max(&sys, &sol, &tol).unwrap().support, vec![0]);
    }

    #[test]
    fn recovery_divides_by_delta() {
        let tol = default_tolerances();
        let sys = system(&three(), 2);
        let sol = Model10Solution {
            lambda: vec![3.0, 1.0],
            s_minus: vec![2.0],
            s_plus: vec![2.0],
            delta: 4.0,
            alpha: vec![1.0, 1.0],
            gamma: 1.0,
            objective: 3.0,
        };
        let max = recover_lambda_max(&sys, &sol, &tol).unwrap();
        assert_eq!(max.lambda_max, vec![0.75, 0.25]);
        assert_eq!(max.support, vec![0, 1]);

        let sys = system(&three(), 0);
        let sol = Model10Solution {
            lambda: vec![2.0, 0.0],
            s_minus: vec![0.0],
            s_plus: vec![0.0],
            delta: 2.0,
            alpha: vec![1.0, 0.0],
            gamma: 1.0,
            objective: 2.0,
        };
        let max = recover_lambda_max(&sys, &sol, &tol).unwrap();
        assert_eq!(max.lambda_max, vec![1.0, 0.0]);
        assert_eq!(max.cardinality, 1);

        let bad = Model10Solution { delta: 0.0, ..sol };
        assert!(matches!(
            recover_lambda_max(&sys, &bad, &tol),
            Err(Error::TheoremViolation(_))
        ));
    }

    #[test]
    fn identity_recovery_for_singleton() {
        let tol = default_tolerances();
        let d = dataset(&[("A", &[2.0], &[3.0])]);
        let sys = system(&d, 0);
        assert!(!sys.has_slack_row);
        let sol = Model10Solution {
            lambda: vec![1.0],
            s_minus: vec![0.0],
            s_plus: vec![0.0],
            delta: 1.0,
            alpha: vec![1.0],
            gamma: 1.0,
            objective: 2.0,
        };
        assert_eq!(recover_lambda_max(&sys, &sol, &tol).unwrap().lambda_max, vec![1.0]);
        let solved = solve_model10(&sys, &tol).unwrap();
        assert!((solved.objective - 2.0).abs() < 1e-9);
    }

    #[test]
    fn mixed_program_matches_relaxation() {
        let tol = default_tolerances();
        for (d, o, expect) in [(three(), 2, 3.0), (three(), 0, 2.0), (three(), 1, 2.0), (two(), 1, 2.0)] {
            let sys = system(&d, o);
            let milp = solve_model8(&sys, &tol).unwrap();
            let lp = solve_model10(&sys, &tol).unwrap();
            assert!((milp.objective - expect).abs() < 1e-9);
            check_exactness(&milp, &lp, &tol).unwrap();
            assert!(milp.alpha.iter().all(|a| *a == 0.0 || *a == 1.0));
            assert_eq!(
                recover_lambda_max(&sys, &milp, &tol).unwrap().support,
                recover_lambda_max(&sys, &lp, &tol).unwrap().support
            );
        }
    }

    #[test]
    fn exactness_check_flags_gaps() {
        let tol = default_tolerances();
        let a = Model10Solution {
            lambda: vec![1.0],
            s_minus: vec![],
            s_plus: vec![],
            delta: 1.0,
            alpha: vec![1.0],
            gamma: 1.0,
            objective: 2.0,
        };
        let b = Model10Solution { objective: 3.0, ..a.clone() };
        assert!(matches!(check_exactness(&a, &b, &tol), Err(Error::TheoremViolation(_))));
    }

    #[test]
    fn split_program_agrees() {
        let tol = default_tolerances();
        let sys = system(&three(), 2);
        let six = solve_model6(&sys, &tol).unwrap();
        assert_eq!(six.maximal.support, vec![0, 1]);
        assert!((six.objective - 3.0).abs() < 1e-9);

        let sys = system(&three(), 0);
        let six = solve_model6(&sys, &tol).unwrap();
        assert!(close(&six.maximal.lambda_max, &[1.0, 0.0]));
    }

    #[test]
    fn change_of_variables_preserves_feasibility() {
        let tol = default_tolerances();
        for o in 0..3 {
            let sys = system(&three(), o);
            let ten = solve_model10(&sys, &tol).unwrap();
            let prog = model6_program(&sys);
            let x = split_point(&sys, &ten);
            assert!(prog.residual(&x) < 1e-9);
            assert!(prog.bound_violation(&x) <= 1e-12);
            assert!((prog.objective_at(&x) - ten.objective).abs() < 1e-12);
        }
    }

    #[test]
    fn lifting_examples() {
        let tol = default_tolerances();
        let sys = system(&three(), 2);
        let p = lift_to_model8(&sys, &[0.75, 0.25], &[0.5], &[0.5], &tol).unwrap();
        assert_eq!(p.alpha, vec![1.0, 1.0]);
        assert_eq!(p.objective, 3.0);
        let p = lift_to_model8(&sys, &[1.0, 0.0], &[1.0], &[0.0], &tol).unwrap();
        assert_eq!(p.alpha, vec![1.0, 0.0]);
        assert_eq!(p.objective, 2.0);

        let sys = system(&three(), 0);
        let p = lift_to_model8(&sys, &[1.0, 0.0], &[0.0], &[0.0], &tol).unwrap();
        assert_eq!(p.alpha, vec![1.0, 0.0]);
        assert_eq!(p.objective, 2.0);

        assert!(matches!(
            lift_to_model8(&sys, &[0.0, 1.0], &[0.0], &[0.0], &tol),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn grs_ids() {
        let tol = default_tolerances();
        let d = three();
        for (o, expect) in [(2usize, vec!["A", "B"]), (0, vec!["A"]), (1, vec!["B"])] {
            let sys = system(&d, o);
            let max = recover_lambda_max(&sys, &solve_model10(&sys, &tol).unwrap(), &tol).unwrap();
            let g = extract_grs(&d, &sys, max);
            assert_eq!(g.reference_ids, expect);
            assert_eq!(g.lambda_max.len(), 2);
        }
        let d = two();
        let sys = system(&d, 1);
        let max = recover_lambda_max(&sys, &solve_model10(&sys, &tol).unwrap(), &tol).unwrap();
        assert_eq!(extract_grs(&d, &sys, max).reference_ids, vec!["DMU1"]);
    }

    #[test]
    fn method_names_round_trip() {
        for m in [GrsMethod::RelaxedLp, GrsMethod::Milp, GrsMethod::SplitLp] {
            assert_eq!(m.as_str().parse::<GrsMethod>().unwrap(), m);
        }
        assert!("simplex".parse::<GrsMethod>().is_err());
        assert_eq!(GrsMethod::default(), GrsMethod::RelaxedLp);
    }
}
