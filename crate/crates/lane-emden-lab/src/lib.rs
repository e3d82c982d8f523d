//! A numerical laboratory for the planar Lane-Emden problem
//!
//!     -Δu = u^p,  u > 0 in Ω,  u = 0 on ∂Ω,
//!
//! on bounded planar domains, with machinery for following solution branches
//! as the exponent p grows large and for measuring the concentration
//! phenomena that emerge in that limit: peaks of height near √e, energy
//! quantization in units of 8πe, rescaled profiles approaching the Liouville
//! bubble, and peak locations governed by a Green-function balance system.
//!
//! The crate is organized as a library with one thin CLI (`lelab`). Each
//! major capability has a runnable example under `examples/`; start with
//! `radial_limits` and `disk_continuation`.

pub mod concentration;
pub mod constants;
pub mod diagnostics;
pub mod domain;
pub mod field;
pub mod green;
pub mod grid;
pub mod io;
pub mod linsolve;
pub mod liouville;
pub mod radial;
pub mod runner;
pub mod solver;
pub mod sparse;

pub use domain::DomainSpec;
pub use field::Field;
pub use grid::Grid;
