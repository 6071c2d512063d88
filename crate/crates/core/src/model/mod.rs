//! Matrices, factors, alphabets and distributions, plus the distortion
//! metrics every solver reports.

mod alphabet;
mod assignment;
mod distribution;
mod instance;
mod metrics;

pub use alphabet::DiscreteAlphabet;
pub use assignment::FactorAssignment;
pub use distribution::FactorDistribution;
pub use instance::{column_count, dot, GroundTruthInstance};
pub use metrics::{
    fit_and_prediction_error, observed_rmse, rmse, DenseMatrix, DistortionReport, MatrixView,
};
pub(crate) use metrics::cross_gram;
