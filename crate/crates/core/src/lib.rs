//! Radial singular solutions of `-Δu = u^α |log u|^β` near an isolated
//! singularity in `R^n`, for `n/(n-2) < α < (n+2)/(n-2)` and any real `β`.
//!
//! The crate evaluates the closed-form quantities of the problem (the
//! singular constant `A`, the Emden–Fowler coefficients and their limits,
//! Lambert W), integrates the radial equation in the physical and the
//! Emden–Fowler frame, classifies trajectories as removable-type or
//! singular-type and checks the asymptotic constants, rates and identities
//! numerically.

pub mod analysis;
pub mod classifier;
pub mod cli;
pub mod error;
pub mod ode;
pub mod params;
pub mod transform;

pub use error::{Error, Result};
pub use params::{constant_a, limit_coefficients, Exponents, LimitCoefficients};
pub use transform::{PsiState, RadialState};
