//! Semi-analytic solver and verification suite for the stationary Stokes
//! equations on an infinite planar wedge with Navier-slip boundary
//! conditions.
//!
//! The solver works in log-polar coordinates (s, φ) = (log r, φ) and is
//! organized around the Mellin transform, which turns the scaling operator
//! r∂_r into multiplication by the spectral parameter λ. The crate provides:
//!
//! - grids, fields, polar differential operators, and weighted Sobolev
//!   norms ([`grid`], [`ops`], [`norms`]);
//! - the numerical Mellin transform and its operator calculus ([`mellin`]);
//! - the Helmholtz projection onto divergence-free tangent fields
//!   ([`helmholtz`]);
//! - closed-form Green's-function mode solvers for the free-slip system
//!   ([`freeslip`]) and the polynomial tip recursion ([`polynomial`]);
//! - the variational (coercivity/boundedness) audit machinery
//!   ([`variational`]);
//! - the Navier-slip fixed-point solver ([`navier`]);
//! - independent oracles: collocation BVP and finite differences
//!   ([`oracle`]).

pub mod analytic;
pub mod config;
pub mod cutoff;
pub mod error;
pub mod freeslip;
pub mod grid;
pub mod helmholtz;
pub mod inequalities;
pub mod mellin;
pub mod norms;
pub mod ops;
pub mod polynomial;
pub mod trig;
pub mod variational;

pub use config::WedgeConfig;
pub use error::{Error, Result};
pub use grid::{BoundaryData, Grid, GridSpec, ScalarField, VectorField};
