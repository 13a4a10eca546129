//! Higher-order interaction (HOI) measures for networks of jointly Gaussian
//! stationary processes described by linear vector autoregressions.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! - [`numerics`]: dense matrices, Cholesky log-determinants, the discrete
//!   Lyapunov solver and spectral radius.
//! - [`var`]: VAR models, simulation, least-squares identification, order
//!   selection and the five-node star benchmark.
//! - [`lagcov`]: lagged covariances of the full process and restricted
//!   (subset) models derived from them.
//! - [`measures`]: entropy rate, mutual information rate, O-information rate,
//!   its gradient and its local (link-wise) form.
//! - [`significance`]: percentile confidence bounds and test verdicts.
//! - [`netout`]: the node/link/network representation of the measures.
//!
//! All logarithms are natural; measures are in nats per time step.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
mod math;
pub mod lagcov;
pub mod measures;
pub mod netout;
pub mod numerics;
pub mod significance;
pub mod var;

pub use error::{Error, Result};
pub use lagcov::{process_covariances, restricted_model, LagCovarianceSet, RestrictedModel, SubsetIndex};
pub use measures::{analyze, analyze_covariances, HoiEngine, HoiValues};
pub use netout::{assemble, HoiNetwork, Metadata, SourceKind, SynergyRedundancyClass};
pub use numerics::DenseMatrix;
pub use significance::{SignificanceConfig, SignificanceMethod, SignificanceResult};
pub use var::{StarConfig, StarVariant, TimeSeries, VarModel};

/// Default order of the restricted models.
pub const DEFAULT_RESTRICTED_LAG: usize = 20;
