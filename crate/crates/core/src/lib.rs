//! Numerical laboratory for concentration of measure on the classical compact
//! Lie groups: root-system volumes, Killing-form constants, Haar and
//! coordinate-measure sampling, and worked concentration experiments.

pub mod concentration;
pub mod error;
pub mod experiments;
pub mod liealg;
pub mod numeric;
pub mod rng;
pub mod rootdata;
pub mod sampling;
pub mod stats;

pub use concentration::{ConcentrationReport, ObservableSpec, ScaledFamily, TrendVerdict};
pub use error::{Error, Result};
pub use experiments::{ActionSpec, CircleFamilyY, CircleFamilyZ, PushforwardEstimate, TargetSet};
pub use liealg::{KillingReport, LieBasis, MatrixAlgebra, StructureConstants};
pub use rng::RandomStream;
pub use rootdata::{GroupSpec, LogVolume, RootSystem, SeriesTag};
pub use sampling::{CpnAngles, HaarGroup, HaarSample};

/// Crate version string embedded in every emitted record.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
