//! Range-adjusted measure (RAM) of efficiency.
//!
//! For unit `o`, the model maximizes the range-weighted slack sum
//! `R-^T s- + R+^T s+` over convex combinations of all units, subject to
//! `X lambda + s- = x_o`, `Y lambda - s+ = y_o` and `1^T lambda = 1`. The score
//! is `rho = 1 - (weighted slack) / (m + s)`.
//!
//! A column whose observed range is zero gets weight 0. Its constraint row is
//! still part of the model, so it keeps restricting feasibility.

use crate::data::{Dataset, Tolerances};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct RangeWeights<T> {
    pub r_minus: Vec<T>,
    pub r_plus: Vec<T>,
    pub degenerate_inputs: Vec<usize>,
    pub degenerate_outputs: Vec<usize>,
}

impl<T: Scalar> RangeWeights<T> {
    /// True when every weight is zero, i.e. every data column is constant.
    pub fn all_degenerate(&self) -> bool {
        self.r_minus.iter().chain(&self.r_plus).all(|w| *w == T::zero())
    }
}

fn reciprocal_range<T: Scalar>(values: impl Iterator<Item = T>) -> Option<T> {
    let (lo, hi) = values.fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    (range > T::zero()).then(|| T::one() / range)
}

pub fn compute_range_weights<T: Scalar>(ds: &Dataset<T>) -> RangeWeights<T> {
    let mut w = RangeWeights {
        r_minus: Vec::with_capacity(ds.m()),
        r_plus: Vec::with_capacity(ds.s()),
        degenerate_inputs: Vec::new(),
        degenerate_outputs: Vec::new(),
    };
    for i in 0..ds.m() {
        match reciprocal_range((0..ds.n()).map(|j| ds.x(i, j))) {
            Some(r) => w.r_minus.push(r),
            None => {
                w.r_minus.push(T::zero());
                w.degenerate_inputs.push(i);
            }
        }
    }
    for r in 0..ds.s() {
        match reciprocal_range((0..ds.n()).map(|j| ds.y(r, j))) {
            Some(v) => w.r_plus.push(v),
            None => {
                w.r_plus.push(T::zero());
                w.degenerate_outputs.push(r);
            }
        }
    }
    w
}

#[derive(Debug, Clone, PartialEq)]
pub struct RamResult<T> {
    pub o: usize,
    pub rho: T,
    /// Optimal `R-^T s- + R+^T s+`, equal to `(m + s)(1 - rho)` before clamping.
    pub weighted_slack: T,
    pub lambda: Vec<T>,
    pub s_minus: Vec<T>,
    pub s_plus: Vec<T>,
}

/// Column layout of the RAM program: `[lambda (n) | s- (m) | s+ (s)]`.
pub(crate) fn ram_program<T: Scalar>(ds: &Dataset<T>, o: usize, w: &RangeWeights<T>) -> LinearProgram<T> {
    let (n, m, s) = (ds.n(), ds.m(), ds.s());
    let mut lp = LinearProgram::new(n + m + s);
    for i in 0..m {
        lp.objective[n + i] = w.r_minus[i];
        let mut row: Vec<(usize, T)> = (0..n).map(|j| (j, ds.x(i, j))).collect();
        row.push((n + i, T::one()));
        lp.add_row(&row, ds.x(i, o));
    }
    for r in 0..s {
        lp.objective[n + m + r] = w.r_plus[r];
        let mut row: Vec<(usize, T)> = (0..n).map(|j| (j, ds.y(r, j))).collect();
        row.push((n + m + r, -T::one()));
        lp.add_row(&row, ds.y(r, o));
    }
    let ones: Vec<(usize, T)> = (0..n).map(|j| (j, T::one())).collect();
    lp.add_row(&ones, T::one());
    lp
}

/// Solves the RAM model for unit `o` against every unit of `ds`.
pub fn solve_ram<T: Scalar>(
    ds: &Dataset<T>,
    o: usize,
    w: &RangeWeights<T>,
    tol: &Tolerances<T>,
) -> Result<RamResult<T>> {
    ds.check_index(o)?;
    if w.r_minus.len() != ds.m() || w.r_plus.len() != ds.s() {
        return Err(Error::DimensionMismatch("range weights do not match the dataset".into()));
    }
    let (n, m, s) = (ds.n(), ds.m(), ds.s());
    let lp = ram_program(ds, o, w);
    let sol = solve_lp(&lp, tol)?;
    match sol.status {
        LpStatus::Optimal => {}
        status => {
            return Err(Error::Internal(format!(
                "RAM program reported {status:?}, but lambda = e_o is always feasible"
            )))
        }
    }
    let weighted_slack = sol.objective_value.max(T::zero());
    let rho = (T::one() - weighted_slack / T::from_usize(m + s).expect("count fits scalar"))
        .max(T::zero())
        .min(T::one());
    Ok(RamResult {
        o,
        rho,
        weighted_slack,
        lambda: sol.x[..n].to_vec(),
        s_minus: sol.x[n..n + m].to_vec(),
        s_plus: sol.x[n + m..].to_vec(),
    })
}

/// The RAM-efficient units, their data blocks, and every unit's RAM solve.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficientSet<T> {
    pub indices: Vec<usize>,
    /// `m x |E|`.
    pub x_e: Vec<Vec<T>>,
    /// `s x |E|`.
    pub y_e: Vec<Vec<T>>,
    /// RAM solution of every unit, in dataset order.
    pub ram: Vec<RamResult<T>>,
}

impl<T: Scalar> EfficientSet<T> {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.binary_search(&j).is_ok()
    }

    /// Dataset index of the `k`-th efficient unit.
    pub fn dataset_index(&self, k: usize) -> usize {
        self.indices[k]
    }

    /// Position of dataset unit `j` within `E`, if efficient.
    pub fn position(&self, j: usize) -> Option<usize> {
        self.indices.binary_search(&j).ok()
    }
}

pub fn is_efficient<T: Scalar>(res: &RamResult<T>, tol: &Tolerances<T>) -> bool {
    res.rho >= T::one() - tol.efficiency_eps()
}

/// Assembles `E`, `X_E`, `Y_E` from RAM solves already computed for every unit.
pub fn efficient_set_from<T: Scalar>(
    ds: &Dataset<T>,
    ram: Vec<RamResult<T>>,
    tol: &Tolerances<T>,
) -> Result<EfficientSet<T>> {
    if ram.len() != ds.n() || ram.iter().enumerate().any(|(j, r)| r.o != j) {
        return Err(Error::DimensionMismatch("one RAM result per unit, in dataset order".into()));
    }
    let indices: Vec<usize> = (0..ds.n()).filter(|&j| is_efficient(&ram[j], tol)).collect();
    if indices.is_empty() {
        return Err(Error::Internal("no RAM-efficient unit found".into()));
    }
    let x_e = (0..ds.m())
        .map(|i| indices.iter().map(|&j| ds.x(i, j)).collect())
        .collect();
    let y_e = (0..ds.s())
        .map(|r| indices.iter().map(|&j| ds.y(r, j)).collect())
        .collect();
    Ok(EfficientSet {
        indices,
        x_e,
        y_e,
        ram,
    })
}

/// Solves the RAM model once per unit and keeps those scoring at least
/// `1 - efficiency_eps`.
pub fn classify_efficient<T: Scalar>(
    ds: &Dataset<T>,
    w: &RangeWeights<T>,
    tol: &Tolerances<T>,
) -> Result<EfficientSet<T>> {
    let ram = (0..ds.n())
        .map(|j| solve_ram(ds, j, w, tol).map_err(|e| e.at_dmu(&ds.record(j).id)))
        .collect::<Result<Vec<_>>>()?;
    efficient_set_from(ds, ram, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{default_tolerances, DmuRecord};
    use proptest::prelude::*;

    pub(crate) fn ds(rows: &[(&str, &[f64], &[f64])]) -> Dataset<f64> {
        let m = rows[0].1.len();
        let s = rows[0].2.len();
        Dataset::new(
            rows.iter()
                .map(|(id, x, y)| DmuRecord::new(*id, x.to_vec(), y.to_vec()))
                .collect(),
            (0..m).map(|i| format!("x{i}")).collect(),
            (0..s).map(|r| format!("y{r}")).collect(),
        )
        .unwrap()
    }

    fn three() -> Dataset<f64> {
        ds(&[("A", &[1.0], &[1.0]), ("B", &[3.0], &[3.0]), ("C", &[2.0], &[1.0])])
    }

    fn two() -> Dataset<f64> {
        ds(&[("DMU1", &[1.0], &[2.0]), ("DMU2", &[2.0], &[1.0])])
    }

    #[test]
    fn range_weights_by_hand() {
        let w = compute_range_weights(&three());
        assert_eq!(w.r_minus, vec![0.5]);
        assert_eq!(w.r_plus, vec![0.5]);
        assert!(w.degenerate_inputs.is_empty() && w.degenerate_outputs.is_empty());

        let w = compute_range_weights(&ds(&[("A", &[5.0], &[1.0]), ("B", &[5.0], &[2.0]), ("C", &[5.0], &[4.0])]));
        assert_eq!(w.r_minus, vec![0.0]);
        assert_eq!(w.degenerate_inputs, vec![0]);
        assert_eq!(w.r_plus, vec![1.0 / 3.0]);
        assert!(!w.all_degenerate());
    }

    #[test]
    fn single_unit_is_efficient() {
        let d = ds(&[("A", &[2.0, 3.0], &[4.0])]);
        let w = compute_range_weights(&d);
        assert!(w.all_degenerate());
        let res = solve_ram(&d, 0, &w, &default_tolerances()).unwrap();
        assert_eq!(res.rho, 1.0);
        assert_eq!(res.lambda, vec![1.0]);
        assert!(res.s_minus.iter().chain(&res.s_plus).all(|v| *v == 0.0));
        let eff = classify_efficient(&d, &w, &default_tolerances()).unwrap();
        assert_eq!(eff.indices, vec![0]);
    }

    #[test]
    fn two_unit_example() {
        let d = two();
        let w = compute_range_weights(&d);
        assert_eq!((w.r_minus[0], w.r_plus[0]), (1.0, 1.0));
        let res = solve_ram(&d, 1, &w, &default_tolerances()).unwrap();
        assert!(res.rho.abs() < 1e-12);
        assert!((res.lambda[0] - 1.0).abs() < 1e-12 && res.lambda[1] == 0.0);
        assert!((res.s_minus[0] - 1.0).abs() < 1e-12 && (res.s_plus[0] - 1.0).abs() < 1e-12);
        let eff = classify_efficient(&d, &w, &default_tolerances()).unwrap();
        assert_eq!(eff.indices, vec![0]);
    }

    #[test]
    fn three_unit_example() {
        let d = three();
        let w = compute_range_weights(&d);
        let tol = default_tolerances();
        let c = solve_ram(&d, 2, &w, &tol).unwrap();
        assert!((c.rho - 0.75).abs() < 1e-12);
        assert!((c.weighted_slack - 0.5).abs() < 1e-12);
        let eff = classify_efficient(&d, &w, &tol).unwrap();
        assert_eq!(eff.indices, vec![0, 1]);
        assert_eq!(eff.x_e, vec![vec![1.0, 3.0]]);
        assert_eq!(eff.y_e, vec![vec![1.0, 3.0]]);
        assert!(eff.contains(1) && !eff.contains(2));
        assert_eq!(eff.position(1), Some(1));
    }

    #[test]
    fn single_precision_three_unit_example() {
        let d = Dataset::<f32>::new(
            vec![
                DmuRecord::new("A", vec![1.0], vec![1.0]),
                DmuRecord::new("B", vec![3.0], vec![3.0]),
                DmuRecord::new("C", vec![2.0], vec![1.0]),
            ],
            vec!["x".into()],
            vec!["y".into()],
        )
        .unwrap();
        let tol = Tolerances::<f32>::new(1e-4, 1e-4, 1e-4, 1e-4).unwrap();
        let w = compute_range_weights(&d);
        let c = solve_ram(&d, 2, &w, &tol).unwrap();
        assert!((c.rho - 0.75).abs() < 1e-5);
    }

    #[test]
    fn out_of_range_unit() {
        let d = three();
        let w = compute_range_weights(&d);
        assert!(matches!(
            solve_ram(&d, 7, &w, &default_tolerances()),
            Err(Error::DmuIndexOutOfRange { index: 7, n: 3 })
        ));
    }

    fn random_dataset() -> impl Strategy<Value = Dataset<f64>> {
        (1usize..=8, 1usize..=3, 1usize..=2).prop_flat_map(|(n, m, s)| {
            proptest::collection::vec(
                (proptest::collection::vec(1u8..=20, m), proptest::collection::vec(1u8..=20, s)),
                n,
            )
            .prop_map(move |rows| {
                Dataset::new(
                    rows.into_iter()
                        .enumerate()
                        .map(|(j, (x, y))| {
                            DmuRecord::new(
                                format!("U{j}"),
                                x.into_iter().map(f64::from).collect(),
                                y.into_iter().map(f64::from).collect(),
                            )
                        })
                        .collect(),
                    (0..m).map(|i| format!("x{i}")).collect(),
                    (0..s).map(|r| format!("y{r}")).collect(),
                )
                .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn scores_are_valid_and_frontier_nonempty(d in random_dataset()) {
            let tol = default_tolerances();
            let w = compute_range_weights(&d);
            let eff = classify_efficient(&d, &w, &tol).unwrap();
            prop_assert!(!eff.is_empty());
            let (m, s) = (d.m(), d.s());
            for res in &eff.ram {
                prop_assert!(res.rho >= 0.0 && res.rho <= 1.0);
                let o = res.o;
                for i in 0..m {
                    let lhs: f64 = (0..d.n()).map(|j| d.x(i, j) * res.lambda[j]).sum::<f64>() + res.s_minus[i];
                    prop_assert!((lhs - d.x(i, o)).abs() <= 1e-7 * 20.0);
                }
                for r in 0..s {
                    let lhs: f64 = (0..d.n()).map(|j| d.y(r, j) * res.lambda[j]).sum::<f64>() - res.s_plus[r];
                    prop_assert!((lhs - d.y(r, o)).abs() <= 1e-7 * 20.0);
                }
                prop_assert!((res.lambda.iter().sum::<f64>() - 1.0).abs() <= 1e-7);
                let slack: f64 = w.r_minus.iter().zip(&res.s_minus).map(|(a, b)| a * b).sum::<f64>()
                    + w.r_plus.iter().zip(&res.s_plus).map(|(a, b)| a * b).sum::<f64>();
                prop_assert!((res.rho - (1.0 - slack / (m + s) as f64)).abs() <= 1e-6);
            }
        }

        #[test]
        fn scaling_an_input_leaves_scores_unchanged(d in random_dataset(), k in 1u32..=50, col in 0usize..3) {
            let tol = default_tolerances();
            let i = col % d.m();
            let factor = f64::from(k) / 7.0;
            let scaled = Dataset::new(
                d.records().iter().map(|r| {
                    let mut x = r.inputs.clone();
                    x[i] *= factor;
                    DmuRecord::new(r.id.clone(), x, r.outputs.clone())
                }).collect(),
                d.input_labels().to_vec(),
                d.output_labels().to_vec(),
            ).unwrap();
            let a = classify_efficient(&d, &compute_range_weights(&d), &tol).unwrap();
            let b = classify_efficient(&scaled, &compute_range_weights(&scaled), &tol).unwrap();
            for (ra, rb) in a.ram.iter().zip(&b.ram) {
                prop_assert!((ra.rho - rb.rho).abs() <= 10.0 * 1e-6);
            }
        }
    }
}
