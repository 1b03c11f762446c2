//! Two-phase primal simplex on a dense tableau with bounded variables.
//!
//! Every variable is shifted so that its lower bound is zero. Nonbasic
//! variables sit at either bound; the ratio test accounts for upper bounds of
//! both the entering and the basic variables, so bound flips happen without a
//! pivot. Phase 1 maximizes the negated sum of one artificial per row.
//!
//! The artificial block of the tableau always holds the current basis
//! inverse, which is used to recompute basic values from the original data
//! periodically and at the end of each phase.

use crate::data::Tolerances;
use crate::error::{Error, Result};
use crate::scalar::{max_abs, Scalar};

use super::{LinearProgram, LpSolution, LpStatus};

const REFRESH_EVERY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PivotRule {
    Dantzig,
    Bland,
}

enum Step {
    Optimal,
    Unbounded,
    Moved,
}

struct Tableau<T> {
    rows: usize,
    nv: usize,
    cols: usize,
    /// `B^-1 [A | I]`, row-major.
    t: Vec<T>,
    /// Sign-adjusted original `[A | I]`, row-major.
    orig: Vec<T>,
    /// Sign-adjusted, bound-shifted right-hand side.
    b: Vec<T>,
    beta: Vec<T>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    at_upper: Vec<bool>,
    upper: Vec<T>,
    may_enter: Vec<bool>,
    cost: Vec<T>,
    rule: PivotRule,
    degenerate: usize,
    degenerate_limit: usize,
    iterations: usize,
    iteration_limit: usize,
    /// No pivot since the tableau was last rebuilt from the original data.
    clean: bool,
    pivot_eps: T,
    dual_eps: T,
}

impl<T: Scalar> Tableau<T> {
    fn new(lp: &LinearProgram<T>) -> Self {
        let rows = lp.num_rows();
        let nv = lp.num_vars();
        let cols = nv + rows;
        let mut orig = vec![T::zero(); rows * cols];
        let mut b = vec![T::zero(); rows];
        for i in 0..rows {
            let shift: T = (0..nv).map(|j| lp.a[i][j] * lp.lower[j]).sum();
            let r = lp.b[i] - shift;
            let sign = if r < T::zero() { -T::one() } else { T::one() };
            b[i] = r * sign;
            for j in 0..nv {
                orig[i * cols + j] = lp.a[i][j] * sign;
            }
            orig[i * cols + nv + i] = T::one();
        }
        let mut upper = vec![T::infinity(); cols];
        for j in 0..nv {
            if let Some(u) = lp.upper[j] {
                upper[j] = u - lp.lower[j];
            }
        }
        let mut is_basic = vec![false; cols];
        let basis: Vec<usize> = (nv..cols).collect();
        for &k in &basis {
            is_basic[k] = true;
        }
        let size = rows + cols;
        Tableau {
            rows,
            nv,
            cols,
            t: orig.clone(),
            beta: b.clone(),
            orig,
            b,
            basis,
            is_basic,
            at_upper: vec![false; cols],
            upper,
            may_enter: (0..cols).map(|j| j < nv).collect(),
            cost: vec![T::zero(); cols],
            rule: PivotRule::Dantzig,
            degenerate: 0,
            degenerate_limit: 5 * size,
            iterations: 0,
            clean: true,
            iteration_limit: 200 * size + 10_000,
            pivot_eps: T::pivot_eps(),
            dual_eps: T::pivot_eps() * T::lit(10.0),
        }
    }

    fn at(&self, i: usize, j: usize) -> T {
        self.t[i * self.cols + j]
    }

    fn nonbasic_value(&self, j: usize) -> T {
        if self.at_upper[j] {
            self.upper[j]
        } else {
            T::zero()
        }
    }

    fn value(&self, j: usize) -> T {
        if self.is_basic[j] {
            let r = self.basis.iter().position(|&k| k == j).expect("basic column in basis");
            self.beta[r]
        } else {
            self.nonbasic_value(j)
        }
    }

    /// Recomputes basic values as `B^-1 (b - N x_N)` from the original data.
    fn refresh(&mut self) {
        let mut r = self.b.clone();
        for j in 0..self.cols {
            if !self.is_basic[j] && self.at_upper[j] {
                let u = self.upper[j];
                for (i, ri) in r.iter_mut().enumerate() {
                    *ri = *ri - self.orig[i * self.cols + j] * u;
                }
            }
        }
        for i in 0..self.rows {
            let row = &self.t[i * self.cols + self.nv..i * self.cols + self.cols];
            self.beta[i] = row.iter().zip(&r).map(|(a, v)| *a * *v).sum();
        }
    }

    /// Rebuilds `B^-1 [A | I]` from the original columns by Gauss-Jordan
    /// elimination with partial pivoting, then refreshes the basic values.
    fn reinvert(&mut self) -> Result<()> {
        let (rows, cols) = (self.rows, self.cols);
        let mut b = vec![T::zero(); rows * rows];
        for (c, &k) in self.basis.iter().enumerate() {
            for i in 0..rows {
                b[i * rows + c] = self.orig[i * cols + k];
            }
        }
        let mut t = self.orig.clone();
        for c in 0..rows {
            let p = (c..rows)
                .max_by(|&i, &j| b[i * rows + c].abs().partial_cmp(&b[j * rows + c].abs()).expect("finite"))
                .expect("non-empty range");
            let pv = b[p * rows + c];
            if pv.abs() <= self.pivot_eps {
                return Err(Error::NumericalBreakdown(format!(
                    "basis became singular (pivot {:e})",
                    pv.as_f64()
                )));
            }
            if p != c {
                for j in 0..rows {
                    b.swap(p * rows + j, c * rows + j);
                }
                for j in 0..cols {
                    t.swap(p * cols + j, c * cols + j);
                }
            }
            for j in 0..rows {
                b[c * rows + j] = b[c * rows + j] / pv;
            }
            for j in 0..cols {
                t[c * cols + j] = t[c * cols + j] / pv;
            }
            for i in 0..rows {
                let f = b[i * rows + c];
                if i == c || f == T::zero() {
                    continue;
                }
                for j in 0..rows {
                    b[i * rows + j] = b[i * rows + j] - f * b[c * rows + j];
                }
                for j in 0..cols {
                    t[i * cols + j] = t[i * cols + j] - f * t[c * cols + j];
                }
            }
        }
        self.t = t;
        self.refresh();
        Ok(())
    }

    fn reduced_costs(&self) -> Vec<T> {
        let mut d = self.cost.clone();
        for i in 0..self.rows {
            let cb = self.cost[self.basis[i]];
            if cb == T::zero() {
                continue;
            }
            let row = &self.t[i * self.cols..(i + 1) * self.cols];
            for (dj, a) in d.iter_mut().zip(row) {
                *dj = *dj - cb * *a;
            }
        }
        d
    }

    fn choose_entering(&self, d: &[T]) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for j in 0..self.cols {
            if self.is_basic[j] || !self.may_enter[j] || self.upper[j] <= T::zero() {
                continue;
            }
            let gain = if self.at_upper[j] { -d[j] } else { d[j] };
            if gain <= self.dual_eps {
                continue;
            }
            match self.rule {
                PivotRule::Bland => return Some(j),
                PivotRule::Dantzig => {
                    if best.is_none_or(|(_, g)| gain > g) {
                        best = Some((j, gain));
                    }
                }
            }
        }
        best.map(|(j, _)| j)
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let cols = self.cols;
        let p = self.t[r * cols + q];
        for v in &mut self.t[r * cols..(r + 1) * cols] {
            *v = *v / p;
        }
        let (before, rest) = self.t.split_at_mut(r * cols);
        let (prow, after) = rest.split_at_mut(cols);
        for row in before.chunks_mut(cols).chain(after.chunks_mut(cols)) {
            let f = row[q];
            if f == T::zero() {
                continue;
            }
            for (v, pv) in row.iter_mut().zip(prow.iter()) {
                *v = *v - f * *pv;
            }
        }
        let leaving = self.basis[r];
        self.is_basic[leaving] = false;
        self.is_basic[q] = true;
        self.at_upper[q] = false;
        self.basis[r] = q;
    }

    fn step(&mut self) -> Result<Step> {
        let d = self.reduced_costs();
        let q = match self.choose_entering(&d) {
            Some(q) => q,
            None => return Ok(Step::Optimal),
        };
        let increasing = !self.at_upper[q];
        let dir = if increasing { T::one() } else { -T::one() };

        // Rows tied (within `pivot_eps`) for the smallest step are resolved by
        // the pivot rule, ignoring pivots negligible next to the largest tied
        // one. A bound flip of the entering variable wins ties.
        let mut limits: Vec<(usize, T, T)> = Vec::new();
        for i in 0..self.rows {
            let alpha = dir * self.at(i, q);
            let bi = self.basis[i];
            let limit = if alpha > self.pivot_eps {
                self.beta[i].max(T::zero()) / alpha
            } else if alpha < -self.pivot_eps && self.upper[bi].is_finite() {
                (self.upper[bi] - self.beta[i]).max(T::zero()) / -alpha
            } else {
                continue;
            };
            limits.push((i, limit, alpha.abs()));
        }
        let row_min = limits.iter().fold(T::infinity(), |a, (_, l, _)| a.min(*l));
        let (theta, row) = if self.upper[q] <= row_min {
            if !self.upper[q].is_finite() {
                return Ok(Step::Unbounded);
            }
            (self.upper[q], None)
        } else {
            let tie = self.pivot_eps;
            let tied: Vec<&(usize, T, T)> = limits.iter().filter(|(_, l, _)| *l <= row_min + tie).collect();
            let biggest = tied.iter().fold(T::zero(), |a, (_, _, al)| a.max(*al));
            let pick = match self.rule {
                PivotRule::Dantzig => tied.iter().find(|(_, _, al)| *al >= biggest),
                PivotRule::Bland => tied
                    .iter()
                    .filter(|(_, _, al)| *al >= biggest * T::lit(1e-3))
                    .min_by_key(|(i, _, _)| self.basis[*i]),
            };
            let &&(i, limit, _) = pick.expect("tied set is non-empty");
            (limit, Some(i))
        };

        self.iterations += 1;
        if theta <= self.pivot_eps {
            self.degenerate += 1;
            if self.degenerate > self.degenerate_limit && self.rule == PivotRule::Dantzig {
                log::debug!("switching to Bland's rule after {} degenerate pivots", self.degenerate);
                self.rule = PivotRule::Bland;
            }
        }

        for i in 0..self.rows {
            let alpha = dir * self.at(i, q);
            if alpha != T::zero() {
                self.beta[i] = self.beta[i] - alpha * theta;
            }
        }
        let entering_value = if increasing {
            theta
        } else {
            self.upper[q] - theta
        };
        match row {
            None => self.at_upper[q] = !self.at_upper[q],
            Some(r) => {
                let leaving = self.basis[r];
                let alpha = dir * self.at(r, q);
                if self.at(r, q).abs() < self.pivot_eps {
                    return Err(Error::NumericalBreakdown(format!(
                        "pivot {:e} below threshold",
                        self.at(r, q).as_f64()
                    )));
                }
                self.pivot(r, q);
                self.at_upper[leaving] = alpha < T::zero();
                self.beta[r] = entering_value;
            }
        }
        if self.iterations.is_multiple_of(REFRESH_EVERY) {
            self.reinvert()?;
        }
        Ok(Step::Moved)
    }

    fn run(&mut self) -> Result<bool> {
        loop {
            if self.iterations >= self.iteration_limit {
                return Err(Error::IterationLimit(self.iteration_limit));
            }
            match self.step()? {
                Step::Moved => self.clean = false,
                Step::Optimal => {
                    if self.clean {
                        self.refresh();
                        return Ok(true);
                    }
                    self.reinvert()?;
                    self.clean = true;
                }
                Step::Unbounded => return Ok(false),
            }
        }
    }

    /// Pivots basic artificials out wherever a structural column allows it.
    fn drive_out_artificials(&mut self) {
        let threshold = self.pivot_eps.sqrt() * T::lit(1e-2);
        for r in 0..self.rows {
            if self.basis[r] < self.nv {
                continue;
            }
            let mut best: Option<(usize, T)> = None;
            for j in 0..self.nv {
                if self.is_basic[j] {
                    continue;
                }
                let a = self.at(r, j).abs();
                if a > threshold && best.is_none_or(|(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                let v = self.nonbasic_value(j);
                self.pivot(r, j);
                self.beta[r] = v;
                self.clean = false;
            }
        }
        self.refresh();
    }
}

pub(super) fn solve<T: Scalar>(lp: &LinearProgram<T>, tol: &Tolerances<T>) -> Result<LpSolution<T>> {
    lp.validate()?;
    let nv = lp.num_vars();
    let feas = tol.feasibility_eps();
    for j in 0..nv {
        if let Some(u) = lp.upper[j] {
            if u < lp.lower[j] - feas {
                return Ok(LpSolution::infeasible(0));
            }
        }
    }

    let mut tab = Tableau::new(lp);
    let scale = T::one().max(max_abs(&tab.b));

    for j in nv..tab.cols {
        tab.cost[j] = -T::one();
    }
    tab.run()?;
    let infeasibility: T = (nv..tab.cols).map(|j| tab.value(j).max(T::zero())).sum();
    if infeasibility > feas * scale {
        return Ok(LpSolution::infeasible(tab.iterations));
    }

    tab.drive_out_artificials();
    for j in 0..tab.cols {
        if j >= nv {
            tab.upper[j] = T::zero();
            tab.may_enter[j] = false;
            tab.cost[j] = T::zero();
        } else {
            tab.cost[j] = lp.objective[j];
        }
    }
    if !tab.run()? {
        return Ok(LpSolution::unbounded(tab.iterations));
    }

    let mut x = vec![T::zero(); nv];
    for (j, xj) in x.iter_mut().enumerate() {
        let mut v = tab.value(j);
        let u = tab.upper[j];
        if v.abs() <= feas {
            v = T::zero();
        } else if u.is_finite() && (v - u).abs() <= feas {
            v = u;
        }
        if v < -feas || (u.is_finite() && v > u + feas) {
            return Err(Error::NumericalBreakdown(format!(
                "variable {j} ends at {:e}, outside its bounds",
                v.as_f64()
            )));
        }
        *xj = lp.lower[j] + v;
    }

    let residual = lp.residual(&x);
    if residual > feas * T::one().max(max_abs(&lp.b)) {
        return Err(Error::NumericalBreakdown(format!(
            "constraint residual {:e} exceeds tolerance",
            residual.as_f64()
        )));
    }
    let objective_value = lp.objective_at(&x);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective_value,
        iterations: tab.iterations,
    })
}
