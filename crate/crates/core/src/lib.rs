//! Reconstruction of random low-rank matrices from `O(n)` revealed entries.
//!
//! * [`model`]: factor alphabets and laws, ground-truth instances, RMSE.
//! * [`graph`]: uniform sampling of revealed entries, the bipartite
//!   observation graph and its giant component.
//! * [`rank1`]: exact recursive completion for rank one.
//! * [`walkrank`]: stochastic local search over finite factor alphabets.
//! * [`als`]: regularized alternating ridge descent.
//! * [`bounds`]: analytic upper and lower distortion bounds.
//! * [`harness`]: rating-file ingestion, sweeps and CSV output.

pub mod als;
pub mod bounds;
pub mod clock;
pub mod error;
pub mod graph;
pub mod harness;
pub mod model;
mod par;
pub mod rank1;
pub mod rng;
pub mod walkrank;

pub use error::{Error, Result};
