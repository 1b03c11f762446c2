//! Range-adjusted measure (RAM) efficiency scores and identification of the
//! global reference set (GRS) of each decision-making unit.
//!
//! Everything is generic over the [`Scalar`] type (`f32` or `f64`); the
//! aliases below fix it to one of those.

pub mod data;
pub mod error;
pub mod grs;
pub mod lp;
pub mod oracle;
pub mod pipeline;
pub mod ram;
pub mod scalar;
pub mod synth;

pub use data::{default_tolerances, load_dataset, Dataset, DmuRecord, Tolerances};
pub use error::{Error, ErrorKind, Result};
pub use grs::{GrsMethod, GrsResult, MaximalElement, OptimalSolutionSystem};
pub use lp::{solve_lp, solve_milp, LinearProgram, LpSolution, LpStatus, MilpSpec};
pub use pipeline::{evaluate_unit, prepare, verify_unit, Evaluation, PhaseTimings, Prepared, Verification};
pub use ram::{EfficientSet, RamResult, RangeWeights};
pub use scalar::Scalar;

pub type DatasetF64 = Dataset<f64>;
pub type TolerancesF64 = Tolerances<f64>;
pub type LinearProgramF64 = LinearProgram<f64>;
pub type LpSolutionF64 = LpSolution<f64>;
pub type MilpSpecF64 = MilpSpec<f64>;
pub type RamResultF64 = RamResult<f64>;
pub type EfficientSetF64 = EfficientSet<f64>;
pub type OptimalSolutionSystemF64 = OptimalSolutionSystem<f64>;
pub type MaximalElementF64 = MaximalElement<f64>;
pub type GrsResultF64 = GrsResult<f64>;
pub type EvaluationF64 = Evaluation<f64>;

pub type DatasetF32 = Dataset<f32>;
pub type TolerancesF32 = Tolerances<f32>;
pub type GrsResultF32 = GrsResult<f32>;
