//! Average vacuum force on a small dipole oscillator that rotates in a
//! periodicity-modified classical zero-point field, and the self-consistent
//! orbit it supports.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`] and [`kinematics`]: dimensionless rotation state, tetrad, field transforms.
//! * [`quadrature`] and [`regularization`]: integration and Abel–Plana mode sums.
//! * [`correlators`] and [`response`]: renormalized field correlators and the
//!   oscillator's selectivity functions.
//! * [`forces`] and [`selfconsistency`]: force components, harmonic assemblies and the orbit solve.
//! * [`mc`]: random-phase Monte Carlo oracle for the discrete correlators.
//! * [`verify`]: the acceptance suite shared by the CLI and the test harness.

pub mod correlators;
pub mod error;
pub mod forces;
pub mod kinematics;
pub mod mc;
pub mod params;
pub mod quadrature;
pub mod regularization;
pub mod response;
pub mod selfconsistency;
pub mod special;
pub mod verify;

pub use correlators::{BoseEval, CorrelatorKind, CorrelatorSample, LagPhase};
pub use error::{Error, Result};
pub use forces::{Assembly, ForceBreakdown};
pub use kinematics::{FieldTriple, Tetrad};
pub use mc::{EnsembleEstimate, ModeRealization, NodeRule};
pub use params::{make_config, PhysicalConstants, RotationConfig, DEFAULT_INV_ALPHA};
pub use quadrature::{QuadratureResult, QuadratureSpec};
pub use regularization::RegularizedSum;
pub use response::HarmonicResponse;
pub use selfconsistency::{RegimeReport, SelfConsistentSolution};
pub use verify::{CheckOutcome, VerifyOptions};

/// Crate version, embedded in output manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
