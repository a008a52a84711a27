//! Hausdorff and second-order Hausdorff distances between discretized continua
//! on model surfaces (interval, circle, flat torus, pillowcase), finite
//! approximations of distinguished hypercontinua such as foliation closures,
//! and numerical probes of the dynamics of the linear Anosov torus map and its
//! pillowcase quotient.
//!
//! The building blocks:
//!
//! - [`spaces`]: the four model spaces with their geodesic metrics, cone-point
//!   data and canonical coordinates.
//! - [`continua`]: polyline arcs represented in the universal cover, with
//!   subarc extraction, resampling and geometric measurements.
//! - [`metrics`]: Hausdorff distance, the second-order (subcontinuum-wise)
//!   Hausdorff distance, and distances between finite families of continua.
//!   Every optimized routine has a brute-force counterpart kept in the public
//!   API as an oracle.
//! - [`hyper`]: finite families approximating hypercontinua (stable/unstable
//!   foliation closures, marked hypercircles, the interval triangle model).
//! - [`dynamics`]: hyperbolic toral automorphisms, arc iteration and the
//!   arc-translation construction, plus the double-cover quotient to the
//!   pillowcase.
//! - [`leaf`]: exact closed-form distance kernels for straight leaf segments
//!   and circle arcs, used to accelerate the experiment drivers.
//! - [`experiments`]: scripted verification runs (convergence of iterated
//!   stable arcs, covering radii, mixing, separation, density) producing
//!   series with explicit error budgets.

pub mod config;
pub mod continua;
pub mod dynamics;
pub mod experiments;
pub mod geom;
pub mod hyper;
pub mod leaf;
pub mod metrics;
pub mod report;
pub mod spaces;

pub use continua::{Continuum, PolylineArc, SampledContinuum};
pub use hyper::FiniteHyperFamily;
pub use metrics::ErrorBudget;
pub use spaces::{Point, Space};

/// Library version string.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Errors shared by the whole crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("space mismatch: {0:?} vs {1:?}")]
    SpaceMismatch(Space, Space),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("precision budget exceeded: {0}")]
    PrecisionBudget(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
