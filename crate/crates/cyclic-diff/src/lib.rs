//! The cyclic vector-difference dynamical system: `n` labelled points evolve
//! by `p_l -> p_(l+1 mod n) - p_l` per step, independently in each coordinate
//! axis. Starting from random positions the system self-organizes: for even
//! `n` the even- and odd-labelled points converge (up to an alternating sign
//! and exponential growth) to two antipodal clusters, for odd `n` every point
//! approaches a common ellipse.
//!
//! The crate evaluates the evolution by three independent routes
//! ([`evolve_iterative`], [`evolve_binomial`], [`evolve_closed_form`]),
//! predicts the limit behavior from the initial data alone
//! ([`AsymptoticModel`]), and ships a seeded experiment harness with CSV,
//! JSON and SVG export plus quantitative convergence diagnostics.

pub mod asymptotics;
pub mod cloud;
pub mod error;
pub mod evolve;
pub mod harness;
pub mod spectral;
pub mod verify;

pub use asymptotics::{
    dominant_rate, ellipse_residual, growth_rate, parity_separation, second_rate_even,
    AsymptoticModel, DominantCoefficients, EllipseQuadratic, Parity, ParitySeparation, Prediction,
    SecondOrder,
};
pub use cloud::{PointCloud, ScaledState};
pub use error::{Error, Result};
pub use evolve::{evolve_binomial, evolve_iterative, step, BINOMIAL_MAX_STEPS};
pub use harness::{
    initial_cloud, run, Distribution, ExportTarget, Route, RunConfig, RunRecord, Snapshot,
    SnapshotDiagnostics, SplitMix64, ROUTE_TOLERANCE,
};
pub use spectral::{
    dft, eigenvalues, evolve_closed_form, idft, spectral_radius, SpectrumView,
    CONJUGATE_SYMMETRY_TOL,
};
