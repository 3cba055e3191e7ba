//! Exact p-adic arithmetic, cells and balls over Q_p, prepared power-law
//! functions, and Lipschitz extension constructions with exhaustive and
//! sampled certification.

pub mod error;
pub mod extension;
pub mod functions;
pub mod geometry;
mod modarith;
mod pairs;
pub mod padic;
pub mod rational;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use modarith::is_prime;
pub use padic::{AngularClass, ApproxNum, CosetSpec, Norm, PadicScalar, Qp, Valuation};
pub use rational::Rational;
