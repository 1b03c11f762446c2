//! Seeded synthetic datasets for benchmarks and sweeps.

use rand::Rng;

use crate::data::{Dataset, DmuRecord};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `n` units with every input and output drawn uniformly from `[lo, hi]`.
/// Ids are `D1..Dn`; labels are `x1..xm` and `y1..ys`.
pub fn uniform_dataset<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
    s: usize,
    lo: f64,
    hi: f64,
) -> Result<Dataset<T>> {
    if n == 0 || m + s == 0 || !(lo <= hi) {
        return Err(Error::InvalidArgument(format!(
            "cannot generate n = {n}, m = {m}, s = {s} on [{lo}, {hi}]"
        )));
    }
    let mut draw = |len: usize| -> Vec<T> { (0..len).map(|_| T::lit(rng.random_range(lo..=hi))).collect() };
    let records = (1..=n)
        .map(|j| {
            let x = draw(m);
            let y = draw(s);
            DmuRecord::new(format!("D{j}"), x, y)
        })
        .collect();
    Dataset::new(
        records,
        (1..=m).map(|i| format!("x{i}")).collect(),
        (1..=s).map(|r| format!("y{r}")).collect(),
    )
}

/// Like [`uniform_dataset`] but with integer values in `[lo, hi]`.
pub fn integer_dataset<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
    s: usize,
    lo: u32,
    hi: u32,
) -> Result<Dataset<T>> {
    if n == 0 || m + s == 0 || lo > hi {
        return Err(Error::InvalidArgument(format!(
            "cannot generate n = {n}, m = {m}, s = {s} on [{lo}, {hi}]"
        )));
    }
    let mut draw =
        |len: usize| -> Vec<T> { (0..len).map(|_| T::lit(f64::from(rng.random_range(lo..=hi)))).collect() };
    let records = (1..=n)
        .map(|j| {
            let x = draw(m);
            let y = draw(s);
            DmuRecord::new(format!("D{j}"), x, y)
        })
        .collect();
    Dataset::new(
        records,
        (1..=m).map(|i| format!("x{i}")).collect(),
        (1..=s).map(|r| format!("y{r}")).collect(),
    )
}
