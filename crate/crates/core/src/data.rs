//! DMU records, datasets and the numeric tolerances shared by every model.
//!
//! Datasets are read from a CSV dialect whose header names the role of each
//! column: the first column is literally `dmu`, input columns are `in:<label>`,
//! output columns are `out:<label>`, and all inputs come before all outputs.

use std::collections::HashSet;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const ID_COLUMN: &str = "dmu";
const INPUT_PREFIX: &str = "in:";
const OUTPUT_PREFIX: &str = "out:";

#[derive(Debug, Clone, PartialEq)]
pub struct DmuRecord<T> {
    pub id: String,
    pub inputs: Vec<T>,
    pub outputs: Vec<T>,
}

impl<T: Scalar> DmuRecord<T> {
    pub fn new(id: impl Into<String>, inputs: Vec<T>, outputs: Vec<T>) -> Self {
        DmuRecord {
            id: id.into(),
            inputs,
            outputs,
        }
    }
}

/// A validated, immutable set of `n` units with `m` inputs and `s` outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    records: Vec<DmuRecord<T>>,
    input_labels: Vec<String>,
    output_labels: Vec<String>,
}

impl<T: Scalar> Dataset<T> {
    /// Validates `records` against the labels. Rows are numbered as they
    /// would appear in a CSV file (header is row 1) in error messages.
    pub fn new(
        records: Vec<DmuRecord<T>>,
        input_labels: Vec<String>,
        output_labels: Vec<String>,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let m = input_labels.len();
        let s = output_labels.len();
        if m + s == 0 {
            return Err(Error::BadHeader {
                column: 2,
                message: "at least one input or output column is required".into(),
            });
        }
        let mut seen = HashSet::new();
        for (k, rec) in records.iter().enumerate() {
            let row = k + 2;
            if rec.id.trim().is_empty() {
                return Err(Error::BadValue {
                    row,
                    column: ID_COLUMN.into(),
                    message: "empty id".into(),
                });
            }
            if !seen.insert(rec.id.as_str()) {
                return Err(Error::DuplicateId {
                    id: rec.id.clone(),
                    row,
                });
            }
            if rec.inputs.len() != m || rec.outputs.len() != s {
                return Err(Error::RaggedRow {
                    row,
                    expected: 1 + m + s,
                    found: 1 + rec.inputs.len() + rec.outputs.len(),
                });
            }
            let labelled = rec
                .inputs
                .iter()
                .zip(&input_labels)
                .map(|(v, l)| (v, INPUT_PREFIX, l))
                .chain(
                    rec.outputs
                        .iter()
                        .zip(&output_labels)
                        .map(|(v, l)| (v, OUTPUT_PREFIX, l)),
                );
            for (v, prefix, label) in labelled {
                let message = if !v.is_finite() {
                    "non-finite value"
                } else if *v < T::zero() {
                    "negative value"
                } else {
                    continue;
                };
                return Err(Error::BadValue {
                    row,
                    column: format!("{prefix}{label}"),
                    message: message.into(),
                });
            }
        }
        Ok(Dataset {
            records,
            input_labels,
            output_labels,
        })
    }

    pub fn n(&self) -> usize {
        self.records.len()
    }

    pub fn m(&self) -> usize {
        self.input_labels.len()
    }

    pub fn s(&self) -> usize {
        self.output_labels.len()
    }

    pub fn records(&self) -> &[DmuRecord<T>] {
        &self.records
    }

    pub fn record(&self, j: usize) -> &DmuRecord<T> {
        &self.records[j]
    }

    pub fn input_labels(&self) -> &[String] {
        &self.input_labels
    }

    pub fn output_labels(&self) -> &[String] {
        &self.output_labels
    }

    /// Input `i` of unit `j`, i.e. entry (i, j) of X.
    pub fn x(&self, i: usize, j: usize) -> T {
        self.records[j].inputs[i]
    }

    /// Output `r` of unit `j`, i.e. entry (r, j) of Y.
    pub fn y(&self, r: usize, j: usize) -> T {
        self.records[j].outputs[r]
    }

    pub fn input_column(&self, j: usize) -> &[T] {
        &self.records[j].inputs
    }

    pub fn output_column(&self, j: usize) -> &[T] {
        &self.records[j].outputs
    }

    /// Input matrix X as `m` rows of length `n`.
    pub fn input_matrix(&self) -> Vec<Vec<T>> {
        (0..self.m())
            .map(|i| (0..self.n()).map(|j| self.x(i, j)).collect())
            .collect()
    }

    /// Output matrix Y as `s` rows of length `n`.
    pub fn output_matrix(&self) -> Vec<Vec<T>> {
        (0..self.s())
            .map(|r| (0..self.n()).map(|j| self.y(r, j)).collect())
            .collect()
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.records
            .iter()
            .position(|r| r.id == id)
            .ok_or_else(|| Error::UnknownDmu(id.to_string()))
    }

    pub fn check_index(&self, o: usize) -> Result<()> {
        if o < self.n() {
            Ok(())
        } else {
            Err(Error::DmuIndexOutOfRange {
                index: o,
                n: self.n(),
            })
        }
    }

    /// Writes the dataset in the same CSV dialect [`load_dataset`] reads.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header = std::iter::once(ID_COLUMN.to_string())
            .chain(self.input_labels.iter().map(|l| format!("{INPUT_PREFIX}{l}")))
            .chain(self.output_labels.iter().map(|l| format!("{OUTPUT_PREFIX}{l}")));
        w.write_record(header)?;
        for rec in &self.records {
            let row = std::iter::once(rec.id.clone()).chain(
                rec.inputs
                    .iter()
                    .chain(&rec.outputs)
                    .map(|v| v.to_string()),
            );
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn parse_header(header: &csv::StringRecord) -> Result<(Vec<String>, Vec<String>)> {
    let mut fields = header.iter();
    match fields.next() {
        Some(f) if f.trim() == ID_COLUMN => {}
        None => return Err(Error::MissingHeader),
        Some(f) => {
            return Err(Error::BadHeader {
                column: 1,
                message: format!("expected `{ID_COLUMN}`, found `{f}`"),
            })
        }
    }
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    for (k, f) in fields.enumerate() {
        let column = k + 2;
        let f = f.trim();
        if let Some(label) = f.strip_prefix(INPUT_PREFIX) {
            if !outputs.is_empty() {
                return Err(Error::BadHeader {
                    column,
                    message: format!("input column `{f}` after an output column"),
                });
            }
            inputs.push(label.to_string());
        } else if let Some(label) = f.strip_prefix(OUTPUT_PREFIX) {
            outputs.push(label.to_string());
        } else {
            return Err(Error::BadHeader {
                column,
                message: format!("`{f}` is neither `in:<label>` nor `out:<label>`"),
            });
        }
    }
    Ok((inputs, outputs))
}

/// Reads and validates a dataset, preserving row order.
pub fn load_dataset<T: Scalar, R: Read>(source: R) -> Result<Dataset<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut rows = reader.records();
    let header = match rows.next() {
        Some(h) => h?,
        None => return Err(Error::MissingHeader),
    };
    let (input_labels, output_labels) = parse_header(&header)?;
    let m = input_labels.len();
    let width = header.len();

    let mut records = Vec::new();
    for (k, row) in rows.enumerate() {
        let row = row?;
        let line = k + 2;
        if row.len() != width {
            return Err(Error::RaggedRow {
                row: line,
                expected: width,
                found: row.len(),
            });
        }
        let mut values = Vec::with_capacity(width - 1);
        for (c, field) in row.iter().enumerate().skip(1) {
            let v: T = field.trim().parse().map_err(|_| Error::BadValue {
                row: line,
                column: header[c].trim().to_string(),
                message: format!("unparseable number `{field}`"),
            })?;
            values.push(v);
        }
        let outputs = values.split_off(m);
        records.push(DmuRecord::new(row[0].trim(), values, outputs));
    }
    Dataset::new(records, input_labels, output_labels)
}

/// Numeric thresholds used throughout the pipeline. Every field lies in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    feasibility_eps: T,
    support_eps: T,
    efficiency_eps: T,
    objective_eps: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        default_tolerances()
    }
}

/// `feasibility_eps = 1e-7`, `support_eps = 1e-7`, `efficiency_eps = 1e-6`,
/// `objective_eps = 1e-6`. These suit `f64`; `f32` callers should loosen them.
pub fn default_tolerances<T: Scalar>() -> Tolerances<T> {
    Tolerances {
        feasibility_eps: T::lit(1e-7),
        support_eps: T::lit(1e-7),
        efficiency_eps: T::lit(1e-6),
        objective_eps: T::lit(1e-6),
    }
}

fn check_tol<T: Scalar>(name: &'static str, value: T) -> Result<T> {
    if value > T::zero() && value < T::one() {
        Ok(value)
    } else {
        Err(Error::InvalidTolerance {
            name,
            value: value.as_f64(),
        })
    }
}

impl<T: Scalar> Tolerances<T> {
    pub fn new(feasibility_eps: T, support_eps: T, efficiency_eps: T, objective_eps: T) -> Result<Self> {
        Ok(Tolerances {
            feasibility_eps: check_tol("feasibility_eps", feasibility_eps)?,
            support_eps: check_tol("support_eps", support_eps)?,
            efficiency_eps: check_tol("efficiency_eps", efficiency_eps)?,
            objective_eps: check_tol("objective_eps", objective_eps)?,
        })
    }

    pub fn feasibility_eps(&self) -> T {
        self.feasibility_eps
    }

    pub fn support_eps(&self) -> T {
        self.support_eps
    }

    pub fn efficiency_eps(&self) -> T {
        self.efficiency_eps
    }

    pub fn objective_eps(&self) -> T {
        self.objective_eps
    }

    pub fn with_feasibility_eps(mut self, v: T) -> Result<Self> {
        self.feasibility_eps = check_tol("feasibility_eps", v)?;
        Ok(self)
    }

    pub fn with_support_eps(mut self, v: T) -> Result<Self> {
        self.support_eps = check_tol("support_eps", v)?;
        Ok(self)
    }

    pub fn with_efficiency_eps(mut self, v: T) -> Result<Self> {
        self.efficiency_eps = check_tol("efficiency_eps", v)?;
        Ok(self)
    }

    pub fn with_objective_eps(mut self, v: T) -> Result<Self> {
        self.objective_eps = check_tol("objective_eps", v)?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn load(text: &str) -> Result<Dataset<f64>> {
        load_dataset(text.as_bytes())
    }

    #[test]
    fn parses_three_unit_example() {
        let ds = load("dmu,in:x1,out:y1\nA,1,1\nB,3,3\nC,2,1\n").unwrap();
        assert_eq!((ds.n(), ds.m(), ds.s()), (3, 1, 1));
        assert_eq!(ds.record(2).id, "C");
        assert_eq!(ds.input_matrix(), vec![vec![1.0, 3.0, 2.0]]);
        assert_eq!(ds.output_matrix(), vec![vec![1.0, 3.0, 1.0]]);
    }

    #[test]
    fn negative_value_reports_location() {
        let err = load("dmu,in:x1,out:y1\nA,-1,1\n").unwrap_err();
        assert_eq!(err.to_string(), "negative value at row 2, column in:x1");
    }

    #[test]
    fn duplicate_id_named() {
        let err = load("dmu,in:x1,out:y1\nA,1,1\nA,2,2\n").unwrap_err();
        assert!(matches!(&err, Error::DuplicateId { id, row: 3 } if id == "A"), "{err}");
        assert!(err.to_string().contains('A'));
    }

    #[test]
    fn rejects_ragged_and_bad_headers() {
        assert!(matches!(
            load("dmu,in:x1,out:y1\nA,1\n").unwrap_err(),
            Error::RaggedRow { row: 2, expected: 3, found: 2 }
        ));
        assert!(matches!(load("").unwrap_err(), Error::MissingHeader));
        assert!(matches!(
            load("id,in:x,out:y\nA,1,1\n").unwrap_err(),
            Error::BadHeader { column: 1, .. }
        ));
        assert!(matches!(
            load("dmu,out:y,in:x\nA,1,1\n").unwrap_err(),
            Error::BadHeader { column: 3, .. }
        ));
        assert!(matches!(
            load("dmu,in:x,out:y\n").unwrap_err(),
            Error::EmptyDataset
        ));
    }

    #[test]
    fn rejects_non_finite_and_garbage() {
        let err = load("dmu,in:x1,out:y1\nA,1,inf\n").unwrap_err();
        assert_eq!(err.to_string(), "non-finite value at row 2, column out:y1");
        let err = load("dmu,in:x1,out:y1\nA,1,abc\n").unwrap_err();
        assert!(err.to_string().contains("row 2, column out:y1"));
    }

    #[test]
    fn zeros_are_allowed() {
        let ds = load("dmu,in:x1,out:y1\nA,0,0\n").unwrap();
        assert_eq!(ds.x(0, 0), 0.0);
    }

    #[test]
    fn unknown_id_lookup() {
        let ds = load("dmu,in:x1,out:y1\nA,1,1\n").unwrap();
        assert_eq!(ds.index_of("A").unwrap(), 0);
        assert_eq!(ds.index_of("Z").unwrap_err().to_string(), "unknown DMU id Z");
    }

    #[test]
    fn tolerance_defaults_and_overrides() {
        let t: Tolerances<f64> = default_tolerances();
        assert_eq!(
            (t.feasibility_eps(), t.support_eps(), t.efficiency_eps(), t.objective_eps()),
            (1e-7, 1e-7, 1e-6, 1e-6)
        );
        let u = t.with_support_eps(1e-5).unwrap();
        assert_eq!(
            (u.feasibility_eps(), u.support_eps(), u.efficiency_eps(), u.objective_eps()),
            (1e-7, 1e-5, 1e-6, 1e-6)
        );
        assert!(matches!(
            t.with_feasibility_eps(0.0).unwrap_err(),
            Error::InvalidTolerance { name: "feasibility_eps", .. }
        ));
        assert!(t.with_objective_eps(1.0).is_err());
        assert!(Tolerances::new(1e-7, 1e-7, -1.0, 1e-6).is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip(
            rows in proptest::collection::vec(
                (proptest::collection::vec(0u32..100_000, 2), proptest::collection::vec(0u32..100_000, 1)),
                1..8,
            )
        ) {
            let records: Vec<DmuRecord<f64>> = rows
                .iter()
                .enumerate()
                .map(|(k, (i, o))| DmuRecord::new(
                    format!("U{k}"),
                    i.iter().map(|v| *v as f64 / 100.0).collect(),
                    o.iter().map(|v| *v as f64 / 8.0).collect(),
                ))
                .collect();
            let ds = Dataset::new(records, vec!["a".into(), "b".into()], vec!["c".into()]).unwrap();
            let mut buf = Vec::new();
            ds.write_csv(&mut buf).unwrap();
            let back: Dataset<f64> = load_dataset(buf.as_slice()).unwrap();
            prop_assert_eq!(&back, &ds);
            for j in 0..ds.n() {
                let col: Vec<f64> = ds.input_matrix().iter().map(|row| row[j]).collect();
                prop_assert_eq!(col.as_slice(), ds.record(j).inputs.as_slice());
            }
        }
    }
}
