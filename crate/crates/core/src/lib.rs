pub mod backlund;
pub mod catalog;
pub mod density;
pub mod elliptic;
pub mod error;
pub mod hierarchy;
pub mod jet;
pub mod numeric;
pub mod ode;
pub mod onegap;
pub mod real;
pub mod spectral;
pub mod tol;
pub mod twogap;
pub mod yfunc;
pub mod verify;

pub use density::{Branch, Family, Smoothness};
pub use elliptic::{HalfPeriod, LatticeParams};
pub use error::{Error, Result};
pub use tol::Tolerances;
pub use verify::{run_verify, CheckKind, CheckRecord, VerificationReport, VerifyConfig};

pub type Lattice = LatticeParams<f64>;
pub type Density = density::Density<f64>;
pub type Potential = hierarchy::PotentialSpec<f64>;
pub type Operator = spectral::PeriodicOperator<f64>;
