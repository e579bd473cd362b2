//! Tomography of a fixed spin-1/2 target through 1D scattering of a probe
//! qubit off a delta-shaped Heisenberg coupling.
//!
//! The crate provides:
//! - exact transmission/reflection operators and detection probabilities
//!   ([`scattering`]), built on a small complex linear algebra layer
//!   ([`spin_algebra`]);
//! - two linear-inversion tomography strategies ([`tomography`]): tuning the
//!   probe spin orientations at fixed momentum, or mixing transmission and
//!   reflection data at two momenta with fixed orientations;
//! - sensitivity figures of merit and their minimization over incident wave
//!   numbers ([`optimize`]);
//! - multinomial shot-noise simulation of the experiments ([`montecarlo`]).
//!
//! All momenta are dimensionless, κ = ħ²k/(mg), and the interaction strength
//! is Ω = 1/κ.

// indexed loops read better than iterator chains in the small matrix kernels
#![allow(clippy::needless_range_loop)]

mod error;
pub mod montecarlo;
pub mod optimize;
pub mod scattering;
pub mod spin_algebra;
pub mod tomography;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
