//! High-precision shooting solver for the radial Lane-Emden ODE on the unit
//! disk. On a ball the positive solution is radial, so this module is the
//! trusted reference for every disk-domain check.
//!
//! The normalized profile solves v″ + v′/r + v₊ᵖ = 0, v(0) = 1, v′(0) = 0,
//! integrated until its first zero r₀. The unit-disk solution is recovered
//! exactly by scaling: u(r) = M·v(r₀ r) with M = r₀^{2/(p−1)}. Two identities
//! fall out of that scaling and are used throughout:
//!
//!   ε = [p·M^{p−1}]^{−1/2} = 1/(√p·r₀),
//!   w_p(s) = p(u(εs) − M)/M = p(v(s/√p) − 1).
//!
//! Energies come from quadrature states carried along with the integration:
//! E = 2πp·M²·∫v′²s ds, cross-checked against 2πp·M²·∫v^{p+1}s ds (equal by
//! integration by parts since v(r₀) = 0).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RadialError {
    #[error("p must be ≥ 1, got {0}")]
    BadExponent(f64),
    #[error("tolerance must be in (0, 1e-8], got {0}")]
    BadTolerance(f64),
    #[error("no zero of v found up to r = {0:.3e}; integrator misconfigured")]
    NoZeroFound(f64),
    #[error("step limit exceeded at r = {0:.3e}")]
    StepLimit(f64),
}

/// v₊ᵖ in log space; 0 for v ≤ 0.
fn pow_pos(v: f64, p: f64) -> f64 {
    if v <= 0.0 {
        0.0
    } else {
        let e = p * v.ln();
        if e < -745.0 {
            0.0
        } else {
            e.exp()
        }
    }
}

/// State: [v, v′, ∫v′²s ds, ∫v₊^{p+1}s ds].
fn rhs(p: f64, t: f64, y: &[f64; 4]) -> [f64; 4] {
    let vp = pow_pos(y[0], p);
    [y[1], -y[1] / t - vp, y[1] * y[1] * t, vp * y[0].max(0.0) * t]
}

/// One stored Dormand-Prince step with its dense-output coefficients.
#[derive(Debug, Clone)]
struct Segment {
    t0: f64,
    h: f64,
    cont: [[f64; 4]; 5],
}

impl Segment {
    fn eval(&self, t: f64) -> [f64; 4] {
        let th = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let th1 = 1.0 - th;
        let mut out = [0.0; 4];
        for c in 0..4 {
            out[c] = self.cont[0][c]
                + th
                    * (self.cont[1][c]
                        + th1
                            * (self.cont[2][c]
                                + th * (self.cont[3][c] + th1 * self.cont[4][c])));
        }
        out
    }
}

/// The solved radial profile and every scalar derived from it.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub p: f64,
    /// First zero of v: the blow-up scale of the normalized problem.
    pub r0: f64,
    /// ‖u_p‖∞ on the unit disk: M = r₀^{2/(p−1)} (NaN at p = 1).
    pub m: f64,
    /// Peak scale ε = 1/(√p·r₀).
    pub eps: f64,
    /// p‖∇u_p‖²_{L²} on the unit disk.
    pub energy: f64,
    /// Relative gap between the two energy quadratures.
    pub energy_cross_rel: f64,
    series_end: f64,
    segments: Vec<Segment>,
}

impl RadialSolution {
    /// Series used near the origin: v = 1 − r²/4 + p·r⁴/64 + O(r⁶).
    fn series(&self, r: f64) -> f64 {
        1.0 - r * r / 4.0 + self.p * r.powi(4) / 64.0
    }

    /// The normalized profile v(r), for r ∈ [0, r₀].
    pub fn v(&self, r: f64) -> f64 {
        if r <= self.series_end {
            return self.series(r);
        }
        let r = r.min(self.r0);
        let k = self
            .segments
            .partition_point(|s| s.t0 + s.h < r)
            .min(self.segments.len() - 1);
        self.segments[k].eval(r)[0]
    }

    /// The unit-disk solution u(r) = M·v(r₀ r), r ∈ [0, 1].
    pub fn u(&self, r: f64) -> f64 {
        self.m * self.v(self.r0 * r)
    }

    /// Rescaled peak profile w_p(s) = p(v(s/√p) − 1); w_p(0) = 0 and
    /// w_p → U pointwise as p → ∞.
    pub fn w(&self, s: f64) -> f64 {
        self.p * (self.v(s / self.p.sqrt()) - 1.0)
    }
}

/// Integrates the radial problem to the first zero of v.
///
/// `tol` is the relative accuracy of r₀; it is split evenly between the step
/// error and the root bisection. The search is capped at r = e^p.
pub fn shoot(p: f64, tol: f64) -> Result<RadialSolution, RadialError> {
    if !(p >= 1.0) {
        return Err(RadialError::BadExponent(p));
    }
    if !(tol > 0.0 && tol <= 1e-8) {
        return Err(RadialError::BadTolerance(tol));
    }
    shoot_unchecked(p, tol)
}

/// Same as `shoot` but without the tolerance-range guard; internal callers
/// use tighter tolerances than the public contract admits.
pub(crate) fn shoot_unchecked(p: f64, tol: f64) -> Result<RadialSolution, RadialError> {
    let rtol = 0.5 * tol;
    let atol = 1e-14;
    let cap = (p.min(690.0)).exp();
    let t_start = 1e-8;

    let mut t: f64 = t_start;
    let mut y = [
        1.0 - t * t / 4.0 + p * t.powi(4) / 64.0,
        -t / 2.0 + p * t.powi(3) / 16.0,
        0.0,
        0.0,
    ];
    let mut h: f64 = 1e-4;
    let mut k1 = rhs(p, t, &y);
    let mut segments: Vec<Segment> = Vec::new();
    let mut rejected = false;

    const MAX_STEPS: usize = 500_000;
    for _ in 0..MAX_STEPS {
        if t >= cap {
            return Err(RadialError::NoZeroFound(cap));
        }
        h = h.min(cap - t + h.min(1.0));

        // Dormand-Prince 5(4) stages
        let stage = |c: &[f64; 4], ks: &[[f64; 4]], a: &[f64]| -> [f64; 4] {
            let mut out = *c;
            for (kv, av) in ks.iter().zip(a) {
                for i in 0..4 {
                    out[i] += h * av * kv[i];
                }
            }
            out
        };
        let k2 = rhs(p, t + 0.2 * h, &stage(&y, &[k1], &[0.2]));
        let k3 = rhs(p, t + 0.3 * h, &stage(&y, &[k1, k2], &[3.0 / 40.0, 9.0 / 40.0]));
        let k4 = rhs(
            p,
            t + 0.8 * h,
            &stage(&y, &[k1, k2, k3], &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0]),
        );
        let k5 = rhs(
            p,
            t + 8.0 / 9.0 * h,
            &stage(
                &y,
                &[k1, k2, k3, k4],
                &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
            ),
        );
        let k6 = rhs(
            p,
            t + h,
            &stage(
                &y,
                &[k1, k2, k3, k4, k5],
                &[
                    9017.0 / 3168.0,
                    -355.0 / 33.0,
                    46732.0 / 5247.0,
                    49.0 / 176.0,
                    -5103.0 / 18656.0,
                ],
            ),
        );
        let b = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
        let mut y1 = y;
        for (kv, bv) in [k1, k2, k3, k4, k5, k6].iter().zip(&b) {
            for i in 0..4 {
                y1[i] += h * bv * kv[i];
            }
        }
        let k7 = rhs(p, t + h, &y1);

        let e = [
            71.0 / 57600.0,
            0.0,
            -71.0 / 16695.0,
            71.0 / 1920.0,
            -17253.0 / 339200.0,
            22.0 / 525.0,
            -1.0 / 40.0,
        ];
        let mut err2 = 0.0;
        for i in 0..4 {
            let ei: f64 = [k1, k2, k3, k4, k5, k6, k7]
                .iter()
                .zip(&e)
                .map(|(kv, ev)| ev * kv[i])
                .sum();
            let sc = atol + rtol * y[i].abs().max(y1[i].abs());
            err2 += (h * ei / sc).powi(2);
        }
        let err = (err2 / 4.0).sqrt();

        if err <= 1.0 {
            // dense output (Hairer's contd5 layout)
            let d = [
                -12715105075.0 / 11282082432.0,
                0.0,
                87487479700.0 / 32700410799.0,
                -10690763975.0 / 1880347072.0,
                701980252875.0 / 199316789632.0,
                -1453857185.0 / 822651844.0,
                69997945.0 / 29380423.0,
            ];
            let mut cont = [[0.0; 4]; 5];
            for i in 0..4 {
                let dy = y1[i] - y[i];
                let bspl = h * k1[i] - dy;
                cont[0][i] = y[i];
                cont[1][i] = dy;
                cont[2][i] = bspl;
                cont[3][i] = dy - h * k7[i] - bspl;
                cont[4][i] = h * [k1, k2, k3, k4, k5, k6, k7]
                    .iter()
                    .zip(&d)
                    .map(|(kv, dv)| dv * kv[i])
                    .sum::<f64>();
            }
            let seg = Segment { t0: t, h, cont };

            if y[0] > 0.0 && y1[0] <= 0.0 {
                // first zero inside this step: bisect the dense output
                let (mut a, mut bb) = (0.0f64, 1.0f64);
                for _ in 0..80 {
                    let mid = 0.5 * (a + bb);
                    if seg.eval(t + mid * h)[0] > 0.0 {
                        a = mid;
                    } else {
                        bb = mid;
                    }
                    if (bb - a) * h <= 0.5 * tol * (t + a * h) {
                        break;
                    }
                }
                let r0 = t + 0.5 * (a + bb) * h;
                let at_root = seg.eval(r0);
                segments.push(seg);
                return Ok(finish(p, r0, at_root, t_start, segments));
            }

            segments.push(seg);
            t += h;
            y = y1;
            k1 = k7;
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, if rejected { 1.0 } else { 5.0 });
            h *= fac;
            rejected = false;
        } else {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            rejected = true;
        }
    }
    Err(RadialError::StepLimit(t))
}

fn finish(
    p: f64,
    r0: f64,
    at_root: [f64; 4],
    series_end: f64,
    segments: Vec<Segment>,
) -> RadialSolution {
    let m = if p > 1.0 { (2.0 / (p - 1.0) * r0.ln()).exp() } else { f64::NAN };
    let eps = 1.0 / (p.sqrt() * r0);
    let i1 = at_root[2];
    let i2 = at_root[3];
    let energy = 2.0 * std::f64::consts::PI * p * m * m * i1;
    let energy_alt = 2.0 * std::f64::consts::PI * p * m * m * i2;
    let energy_cross_rel = if energy != 0.0 { ((energy - energy_alt) / energy).abs() } else { 0.0 };
    RadialSolution { p, r0, m, eps, energy, energy_cross_rel, series_end, segments }
}

/// ‖u_p‖∞ and p‖∇u_p‖² on the unit disk.
pub fn disk_quantities(p: f64) -> Result<(f64, f64), RadialError> {
    if !(p > 1.0) {
        return Err(RadialError::BadExponent(p));
    }
    let sol = shoot_unchecked(p, 1e-12)?;
    Ok((sol.m, sol.energy))
}

/// Samples w_p(s) = p(v(s/√p) − 1) at the given radii.
pub fn rescaled_profile(p: f64, radii: &[f64]) -> Result<Vec<f64>, RadialError> {
    let sol = shoot_unchecked(p, 1e-12)?;
    Ok(radii.iter().map(|s| sol.w(*s)).collect())
}

/// The Green-representation decomposition of the peak height, computed from
/// the radial profile; see `diagnostics::decomposition_check` for the
/// grid-field variant and the meaning of the terms.
#[derive(Debug, Clone, Copy)]
pub struct RadialDecomposition {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub mass: f64,
    pub m_est: f64,
    pub log_eps: f64,
    /// Green-formula remainder over Ω∖B_r (zero when the ball is the disk).
    pub tail: f64,
    /// |u(0) − (A + B + C + tail)|.
    pub identity_gap: f64,
}

/// Decomposes u_p(0) = A + B + C + tail over the ball B_r(0), r ∈ (0, 1].
///
/// In rescaled coordinates z = x/ε the three integrals reduce to radial
/// quadratures of v^p against 1, log|z|, and H(0, εz); on the unit disk
/// H(0, ·) ≡ 0 so A vanishes identically. The peak-mass estimator inverts
/// the C-term asymptotics at finite p: m_est = exp(πp / ((−log ε)·Mass)).
pub fn radial_decomposition(sol: &RadialSolution, r_ball: f64) -> RadialDecomposition {
    assert!(r_ball > 0.0 && r_ball <= 1.0, "ball must sit inside the closed unit disk");
    let p = sol.p;
    let sqrt_p = p.sqrt();
    let z_max = r_ball * sqrt_p * sol.r0;

    // ∫ f(z)·v(z/√p)^p·z dz over [0, z_max]: bump region directly, far tail
    // in the log variable (the integrand underflows quickly past the bump,
    // but a single huge interval would hide the bump from the quadrature)
    let vp = |z: f64| pow_pos(sol.v(z / sqrt_p), p);
    let z_split = 40.0f64.min(z_max);
    let quad = |f: &dyn Fn(f64) -> f64| -> f64 {
        let bump = adaptive_simpson(&|z| if z == 0.0 { 0.0 } else { f(z) * vp(z) * z }, 0.0, z_split, 1e-13, 56);
        let tail = if z_max > z_split {
            adaptive_simpson(
                &|tau: f64| {
                    let z = tau.exp();
                    f(z) * vp(z) * z * z
                },
                z_split.ln(),
                z_max.ln(),
                1e-13,
                56,
            )
        } else {
            0.0
        };
        bump + tail
    };

    let mass = 2.0 * std::f64::consts::PI * quad(&|_| 1.0);
    let log_int = 2.0 * std::f64::consts::PI * quad(&|z: f64| z.ln());
    let h_int = 2.0 * std::f64::consts::PI * quad(&|z: f64| disk_regular_part_center(sol.eps * z));

    let log_eps = -0.5 * (p - 1.0) * sol.m.ln() - 0.5 * p.ln();
    let a = sol.m / p * h_int;
    let b = -sol.m / (2.0 * std::f64::consts::PI * p) * log_int;
    let c = -sol.m * log_eps / (2.0 * std::f64::consts::PI * p) * mass;

    // remainder of the Green formula over the annulus r_ball < |x| < 1
    let tail = if r_ball < 1.0 {
        let f = |rho: f64| -> f64 {
            let u = sol.m * sol.v(sol.r0 * rho);
            -rho.ln() * pow_pos(u, p) * rho
        };
        adaptive_simpson(&f, r_ball, 1.0, 1e-13, 48)
    } else {
        0.0
    };

    let m_est = (std::f64::consts::PI * p / ((-log_eps) * mass)).exp();
    let identity_gap = (sol.m - (a + b + c + tail)).abs();
    RadialDecomposition { a, b, c, mass, m_est, log_eps, tail, identity_gap }
}

/// H(0, x) on the unit disk, as a function of |x|. Identically zero; kept as
/// a function so the decomposition quadrature has the same shape as the
/// general grid version.
fn disk_regular_part_center(_rho: f64) -> f64 {
    0.0
}

/// Plain adaptive Simpson; enough for smooth radial integrands.
pub(crate) fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    let c = 0.5 * (a + b);
    let (fa, fb, fc) = (f(a), f(b), f(c));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    simpson_rec(f, a, b, fa, fb, fc, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fc: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let c = 0.5 * (a + b);
    let (l, r) = (0.5 * (a + c), 0.5 * (c + b));
    let (fl, fr) = (f(l), f(r));
    let left = (c - a) / 6.0 * (fa + 4.0 * fl + fc);
    let right = (b - c) / 6.0 * (fc + 4.0 * fr + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, c, fa, fc, fl, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, c, b, fc, fb, fr, right, 0.5 * tol, depth - 1)
    }
}
