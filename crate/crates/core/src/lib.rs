//! Monotone quantum Fisher metrics and generalized covariances indexed by
//! operator monotone standard functions, with numerical checkers for the
//! determinant uncertainty inequalities they satisfy and for monotonicity
//! under coarse-graining.
//!
//! The main entry points are [`MetricContext`] (the forms `γ_D^f`, `qCov_D^f`
//! and the superoperator `J_D`), [`StandardFunction`] (the function catalog),
//! the checks in [`inequalities`] and [`channels`].

pub mod channels;
pub mod error;
pub mod functions;
pub mod inequalities;
pub mod json;
pub mod linalg;
pub mod metrics;
pub mod state;

pub use channels::{KrausChannel, Subsystem};
pub use error::{Error, Result};
pub use functions::{FunctionGrid, PositiveFunction, Probe, StandardFunction};
pub use inequalities::{GramPair, InequalityVerdict};
pub use linalg::{CMatrix, HermitianMatrix, RMatrix, SpectralDecomposition};
pub use metrics::MetricContext;
pub use state::{DensityMatrix, Observable, RngStream};
