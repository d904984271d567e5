//! Rotationally symmetric, asymptotically flat Ricci flow on `R^n`.
//!
//! The metric is written in area-radius gauge, `g = f(t,r)^2 dr^2 + r^2 g_can`,
//! so the whole flow reduces to one scalar parabolic equation for `f`. This
//! crate integrates that equation on a stretched radial grid and evaluates the
//! geometric quantities that control it: sectional curvatures, scalar
//! curvature, barrier functions, Brown-York quasi-local mass and ADM mass,
//! together with the a-priori constants that bound them in terms of the
//! initial data.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and parameter sweeps live in the `radflow` crate.
//!
//! Module map:
//!
//! - [`grid`]: radial grids and nonuniform three-point stencils.
//! - [`profile`]: initial metric profiles and their admissibility checks.
//! - [`flow`]: the master equation, time steppers and trajectories.
//! - [`diagnostics`]: curvature, mass, barrier functions, bound ledger,
//!   decay verification and PDE residuals.
//! - [`weighted`]: weighted Lebesgue/Sobolev norms, dyadic decomposition and
//!   the mollifier.
//! - [`cartesian`]: a small 3-D Hamilton-DeTurck solver used as a
//!   cross-check of the radial reduction (feature `cartesian`).

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod interp;
mod quadrature;

pub mod diagnostics;
pub mod flow;
pub mod grid;
pub mod profile;
pub mod weighted;

#[cfg(feature = "cartesian")]
pub mod cartesian;

pub use error::{Error, Result};
pub use interp::MonotoneCubic;
pub use quadrature::{gauss_legendre, sphere_volume, three_point_weights};

pub use flow::{evolve, BoundaryMode, Event, EventKind, SolverConfig, Stepper, Trajectory};
pub use grid::{GridSpec, RadialGrid, StencilSet, Stretching};
pub use profile::{MetricProfile, ProfileFamily, ProfileSpec};
