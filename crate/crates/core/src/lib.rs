//! Numerical solvers for the singular boundary value problem
//! `u'' = u²/(8t²) + λ/2` on `(0, 1/2]`, `u(0) = 0`, which arises from radial
//! stationary states of an epitaxial growth equation.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix `f64`.

pub mod adm;
mod bracket;
pub mod error;
pub mod greens;
pub mod lambda_scan;
pub mod monotone;
pub mod powerseries;
pub mod problem;
pub mod quadrature;
pub mod radial;
pub mod scalar;

pub use adm::{AdmBranch, AdmConfig, BranchLabel};
pub use error::{Error, Result};
pub use greens::{GreensKernel, SignReport};
pub use lambda_scan::{CriticalReport, ExistenceRow};
pub use monotone::{BoundKind, IterationTrace, MonotoneConfig, SeedFunction};
pub use powerseries::PowerSeries;
pub use problem::{ProblemKind, RadialCondition};
pub use quadrature::UniformGrid;
pub use radial::RadialProfile;
pub use scalar::Scalar;

pub type Series64 = PowerSeries<f64>;
pub type Branch64 = AdmBranch<f64>;
pub type Config64 = AdmConfig<f64>;
pub type Kernel64 = GreensKernel<f64>;
pub type Trace64 = IterationTrace<f64>;
pub type Profile64 = RadialProfile<f64>;
pub type Critical64 = CriticalReport<f64>;
