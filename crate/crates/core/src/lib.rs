//! Typical distributions of weighted sums `⟨X, θ⟩` over random directions θ
//! on the sphere: the sphere marginal law, moment functionals of X,
//! Kolmogorov distances, characteristic-function bounds and rate sweeps.
//!
//! Every Monte Carlo routine takes an explicit seed and derives per-task
//! streams from it, so results do not depend on the thread count.

pub mod charfn;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod functionals;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod sphere_law;
pub mod stats;
pub mod systems;

pub use error::{Error, Result};
