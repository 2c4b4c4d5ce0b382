//! Gaussian wave-packet dynamics for damped quantum systems.
//!
//! The crate solves the complex Riccati equation for the inverse width of a
//! Gaussian packet, its real Ermakov counterpart, and the classical mean
//! trajectory, in closed form for every damping regime. Derived observables
//! (uncertainties, energies, the Ermakov invariant), the Wigner function and
//! independent numerical integrators for cross-checking live alongside.

pub mod error;
pub mod model;
mod numeric;
pub mod observables;
pub mod oracle;
pub mod phase_space;
pub mod run;
pub mod trajectories;
pub mod width;

pub use error::{Error, Result};
pub use model::{
    Branch, DampingRegime, InitialState, Moments, Representation, RiccatiValue, Scenario, SystemParams, WidthState,
};
