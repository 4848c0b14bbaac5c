//! Exact simulation of Grover's search together with numerical checks of
//! the inequality chain that proves it optimal: divergence sums, the crude
//! and arc-improved bounds, the state-discrimination ceiling, parallel
//! oracles, and the restart strategy.

pub mod algorithm;
pub mod analytic;
pub mod bounds;
pub mod discrimination;
pub mod error;
pub mod grover;
pub mod linalg;
pub mod parallel;
pub mod roots;
pub mod verify;

pub use algorithm::{InterStep, QueryAlgorithm, QueryLayout, QueryTrace};
pub use analytic::{AngleModel, ContinuumRestart, OptimalIterations, RestartPlan};
pub use bounds::{ArcCheck, ArcPath, BoundKind, BoundReport, ChainTerms};
pub use discrimination::{MeasurementOutcome, MeasurementScheme, StateFamily};
pub use error::{LabError, Result};
pub use grover::{OracleSpec, QState, ReducedState};
pub use linalg::DenseUnitary;
pub use parallel::{MultiQueryState, PartitionStats};
