//! The limit profile of the rescaled peaks: the radial Liouville bubble
//! U(z) = −2·log(1 + |z|²/8), normalized so U(0) = 0 and ΔU + e^U = 0.
//!
//! Everything here has a closed form, which makes the module a fixed point
//! the rest of the crate can be measured against: total mass ∫e^U = 8π, half
//! of it inside |z| ≤ √8, and log-moment ∫e^U log|z| = 12π·log 2.

use crate::constants::{EIGHT_PI, TWELVE_PI_LN2};

/// U at radius s ≥ 0.
pub fn eval_u_radial(s: f64) -> f64 {
    -2.0 * (1.0 + s * s / 8.0).ln()
}

/// U at a point of the plane.
pub fn eval_u(z: [f64; 2]) -> f64 {
    eval_u_radial((z[0] * z[0] + z[1] * z[1]).sqrt())
}

/// e^{U(s)} = (1 + s²/8)^{−2}.
pub fn density(s: f64) -> f64 {
    let q = 1.0 + s * s / 8.0;
    1.0 / (q * q)
}

/// Closed forms for the mass and log-moment of e^U inside |z| ≤ r, with the
/// tails to infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassIntegrals {
    pub mass: f64,
    pub log_moment: f64,
    pub mass_tail: f64,
    pub log_moment_tail: f64,
}

/// ∫_{|z|≤r} e^U dz = 8π·t/(1+t) with t = r²/8.
pub fn mass_inside(r: f64) -> f64 {
    assert!(r >= 0.0);
    let t = r * r / 8.0;
    EIGHT_PI * t / (1.0 + t)
}

/// ∫_{|z|≤r} e^U log|z| dz. Substituting t = r²/8 and integrating by parts:
/// 4π·[log 8·t/(1+t) + t·log t/(1+t) − log(1+t)].
pub fn log_moment_inside(r: f64) -> f64 {
    assert!(r >= 0.0);
    if r == 0.0 {
        return 0.0;
    }
    let t = r * r / 8.0;
    let pi4 = 0.5 * EIGHT_PI;
    pi4 * (8.0f64.ln() * t / (1.0 + t) + t * t.ln() / (1.0 + t) - (1.0 + t).ln())
}

pub fn mass_integrals(r: f64) -> MassIntegrals {
    let mass = mass_inside(r);
    let log_moment = log_moment_inside(r);
    MassIntegrals {
        mass,
        log_moment,
        mass_tail: EIGHT_PI - mass,
        log_moment_tail: TWELVE_PI_LN2 - log_moment,
    }
}
