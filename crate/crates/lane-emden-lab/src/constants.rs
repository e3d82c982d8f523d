//! Reference constants used across solvers, diagnostics, and tests.
//!
//! Every tolerance that an acceptance check depends on lives here with a short
//! note on where it comes from, so changing one is a visible decision.

use std::f64::consts::PI;

/// √e, the limiting peak height of Lane-Emden solutions as p → ∞.
pub const SQRT_E: f64 = 1.648_721_270_700_128_2;

/// 8π, the mass of the Liouville bubble: ∫_{ℝ²} e^U = 8π.
pub const EIGHT_PI: f64 = 8.0 * PI;

/// 8πe, the energy quantum: p‖∇u_p‖² → 8πe·k for a k-peak family.
pub const EIGHT_PI_E: f64 = 8.0 * PI * std::f64::consts::E;

/// 12π·log 2, the log-moment of the bubble: ∫_{ℝ²} log|z| e^{U(z)} dz.
pub const TWELVE_PI_LN2: f64 = 12.0 * PI * std::f64::consts::LN_2;

/// First positive zero of the Bessel function J₀; the radial shooting
/// problem at p = 1 reduces to it.
pub const BESSEL_J0_ZERO: f64 = 2.404_825_557_695_773;

/// Default Newton residual tolerance (max-norm, relative to the residual
/// scale max(1, ‖u‖∞^p); an absolute 1e-10 sits below the rounding floor
/// ‖u‖·(4/h²)·ε_mach already at h = 2/256).
pub const NEWTON_TOL: f64 = 1e-10;

/// Default relative residual tolerance for inner Krylov solves.
pub const LINSOLVE_TOL: f64 = 1e-10;

/// A converged Newton iterate with ‖u‖∞ below this is the trivial solution.
pub const ZERO_SOLUTION_FLOOR: f64 = 1e-8;

/// Nodes with |signed distance| below this multiple of h are treated as
/// lying on ∂Ω (classification is deterministic under perturbation).
pub const ON_BOUNDARY_TOL: f64 = 1e-9;

/// Condition-number ceiling for the extrapolation least-squares fit.
pub const FIT_COND_LIMIT: f64 = 1e12;
