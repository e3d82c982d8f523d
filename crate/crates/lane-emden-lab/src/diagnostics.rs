//! Theorem-checking measurements on computed solutions.
//!
//! Everything here takes a solved `Field` and extracts the quantities whose
//! limits are known: peak locations and heights, the concentration scales
//! ε_i = [p·u(y_i)^{p−1}]^{−1/2}, the Dirichlet energy against the 8πe·k
//! quantum, rescaled profiles against the Liouville bubble, off-peak decay of
//! √p·u and of p·u against the Green superposition, the decay-bound
//! constants, and the A + B + C + tail split of the peak height. The radial
//! oracle in [`crate::radial`] computes the same quantities from the ODE, so
//! every check here has an independent counterpart.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::constants::{EIGHT_PI_E, FIT_COND_LIMIT, SQRT_E};
use crate::domain::{dist, Point};
use crate::field::Field;
use crate::green::{GreenError, GreenFn};
use crate::liouville;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("no strict local maximum exceeds the height floor {floor}")]
    NoPeaks { floor: f64 },
    #[error("cluster radius {radius:.3e} must exceed 4h = {min:.3e}")]
    ClusterTooSmall { radius: f64, min: f64 },
    #[error("off-peak test set is empty at δ = {delta}")]
    EmptyTestSet { delta: f64 },
    #[error("ball of radius {r} around peak {peak} leaves Ω or meets another peak ball")]
    BallOverlap { peak: usize, r: f64 },
    #[error("peak scale ε = {eps:.3e} below the 4h = {min:.3e} quadrature floor")]
    QuadratureUnresolved { eps: f64, min: f64 },
    #[error("need at least 4 distinct samples to extrapolate, got {got}")]
    TooFewSamples { got: usize },
    #[error("extrapolation basis is ill-conditioned (estimate {cond:.3e})")]
    IllConditionedFit { cond: f64 },
    #[error(transparent)]
    Green(#[from] GreenError),
}

/// One detected concentration peak.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Peak {
    /// Sub-grid refined location.
    pub location: Point,
    /// Height at the refined location (quadratic fit over the 3×3 stencil).
    pub height: f64,
    /// ε = [p·height^{p−1}]^{−1/2}; underflows to 0 for large p, use
    /// `log_eps` in that regime.
    pub eps: f64,
    /// log ε = −((p−1)/2)·log height − (1/2)·log p, computed directly so it
    /// survives the underflow of `eps`.
    pub log_eps: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
    pub cluster_radius: f64,
}

impl PeakSet {
    pub fn k(&self) -> usize {
        self.peaks.len()
    }

    pub fn locations(&self) -> Vec<Point> {
        self.peaks.iter().map(|pk| pk.location).collect()
    }
}

/// Strict local maxima of `u` above `height_floor`, greedily thinned so that
/// accepted peaks stay more than twice the cluster radius apart, each
/// location refined by a least-squares quadratic on its 3×3 stencil.
///
/// The default floor 1.0 sits below √e, the common limit of all peak
/// heights, so genuine peaks always clear it once p is moderately large.
pub fn detect_peaks(
    u: &Field,
    p: f64,
    height_floor: f64,
    cluster_radius: f64,
) -> Result<PeakSet, DiagnosticsError> {
    let grid = &u.grid;
    let h = grid.h;
    if cluster_radius <= 4.0 * h {
        return Err(DiagnosticsError::ClusterTooSmall { radius: cluster_radius, min: 4.0 * h });
    }

    let at = |i: i64, j: i64| -> f64 {
        grid.unknown_at(i, j).map_or(0.0, |q| u.values[q as usize])
    };

    // strict maxima over the 8 lattice neighbours; exterior nodes count as 0
    let mut candidates: Vec<(f64, usize)> = Vec::new();
    for q in 0..grid.n_unknowns() {
        let v = u.values[q];
        if v <= height_floor {
            continue;
        }
        let (i, j) = grid.node_ij(q);
        let (i, j) = (i as i64, j as i64);
        let mut is_max = true;
        for dj in -1..=1i64 {
            for di in -1..=1i64 {
                if di == 0 && dj == 0 {
                    continue;
                }
                if at(i + di, j + dj) >= v {
                    is_max = false;
                }
            }
        }
        if is_max {
            candidates.push((v, q));
        }
    }
    if candidates.is_empty() {
        return Err(DiagnosticsError::NoPeaks { floor: height_floor });
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut peaks: Vec<Peak> = Vec::new();
    for (v, q) in candidates {
        let x = grid.node_point(q);
        if peaks.iter().any(|pk| dist(pk.location, x) <= 2.0 * cluster_radius) {
            continue;
        }
        let (i, j) = grid.node_ij(q);
        let (location, height) = refine_quadratic(&at, x, (i as i64, j as i64), h, v);
        let log_eps = -0.5 * (p - 1.0) * height.ln() - 0.5 * p.ln();
        peaks.push(Peak { location, height, eps: log_eps.exp(), log_eps });
    }
    Ok(PeakSet { peaks, cluster_radius })
}

/// Least-squares quadratic over the 3×3 stencil in the orthogonal basis
/// {1, x, y, x²−2/3, y²−2/3, xy}; returns the fitted stationary point and
/// value, falling back to the node itself when the fit is not concave or the
/// offset leaves the stencil.
fn refine_quadratic(
    at: &dyn Fn(i64, i64) -> f64,
    x: Point,
    (i, j): (i64, i64),
    h: f64,
    node_value: f64,
) -> (Point, f64) {
    let (mut c0, mut cx, mut cy, mut cxx, mut cyy, mut cxy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for dj in -1..=1i64 {
        for di in -1..=1i64 {
            let f = at(i + di, j + dj);
            let (dx, dy) = (di as f64, dj as f64);
            c0 += f / 9.0;
            cx += dx * f / 6.0;
            cy += dy * f / 6.0;
            cxx += (dx * dx - 2.0 / 3.0) * f / 2.0;
            cyy += (dy * dy - 2.0 / 3.0) * f / 2.0;
            cxy += dx * dy * f / 4.0;
        }
    }
    let det = 4.0 * cxx * cyy - cxy * cxy;
    if det <= 0.0 || cxx >= 0.0 {
        return (x, node_value);
    }
    let ox = (-cx * 2.0 * cyy + cy * cxy) / det;
    let oy = (-cy * 2.0 * cxx + cx * cxy) / det;
    if ox.abs() > 1.0 || oy.abs() > 1.0 {
        return (x, node_value);
    }
    let fitted = c0
        + cx * ox
        + cy * oy
        + cxx * (ox * ox - 2.0 / 3.0)
        + cyy * (oy * oy - 2.0 / 3.0)
        + cxy * ox * oy;
    ([x[0] + h * ox, x[1] + h * oy], fitted.max(node_value))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyCheck {
    /// p·Σ_h |∇_h u|², the discrete Dirichlet energy scaled by p.
    pub e: f64,
    /// e / (8πe); tends to the peak count.
    pub ratio: f64,
    /// e / (8πe·k) for the supplied k.
    pub per_peak: f64,
    /// |e − p·Σ_h u^{p+1}| / e; near zero for converged solutions, since the
    /// discrete problem pairs u against −Δ_h u = u^p exactly.
    pub cross_rel: f64,
    /// |u·(A u) − edge form| · p·h², the summation-by-parts gap. Rounding
    /// noise only; anything above ~1e−10·e means the pairing is broken.
    pub sbp_gap: f64,
}

/// Discrete energy p‖∇u‖² via the quadratic form of the system matrix, with
/// the summation-by-parts rearrangement as a self-check and the u^{p+1} sum
/// as a cross-check.
pub fn energy_check(u: &Field, p: f64, k: usize) -> EnergyCheck {
    let h2 = u.grid.h * u.grid.h;
    let (pairing, edge_form) = u.grid.matrix().quadratic_form_both(&u.values);
    let e = p * h2 * pairing;
    let power_sum: f64 = u
        .values
        .iter()
        .map(|&v| if v > 0.0 { (p + 1.0) * v.ln() } else { f64::NEG_INFINITY })
        .map(|l| if l.is_finite() { l.exp() } else { 0.0 })
        .sum();
    let cross = p * h2 * power_sum;
    EnergyCheck {
        e,
        ratio: e / EIGHT_PI_E,
        per_peak: e / (EIGHT_PI_E * k.max(1) as f64),
        cross_rel: (e - cross).abs() / e.abs().max(f64::MIN_POSITIVE),
        sbp_gap: p * h2 * (pairing - edge_form).abs(),
    }
}

/// Per peak, sup over |z| ≤ r_compare of |w(z) − U(z)| where
/// w(z) = p·(u(y + εz) − u(y))/u(y) is the rescaled solution read through
/// bilinear interpolation and U is the Liouville bubble. `None` marks a peak
/// whose scale the grid cannot resolve (r_compare·ε < 4h); w(0) = 0 exactly
/// because the interpolated height at the stored location normalizes itself.
pub fn profile_check(u: &Field, p: f64, peaks: &PeakSet, r_compare: f64) -> Vec<Option<f64>> {
    let h = u.grid.h;
    peaks
        .peaks
        .iter()
        .map(|pk| {
            let eps = pk.log_eps.exp();
            if !(r_compare * eps >= 4.0 * h) {
                return None;
            }
            let center = u.interp(pk.location);
            if center <= 0.0 {
                return None;
            }
            let w_of = |z: Point| -> f64 {
                let x = [pk.location[0] + eps * z[0], pk.location[1] + eps * z[1]];
                p * (u.interp(x) - center) / center
            };
            let mut sup: f64 = 0.0;
            let (n_r, n_th) = (32, 32);
            for jr in 0..=n_r {
                let r = r_compare * jr as f64 / n_r as f64;
                let samples = if jr == 0 { 1 } else { n_th };
                for jt in 0..samples {
                    // stagger rings so samples don't align on lattice axes
                    let th = 2.0 * PI * (jt as f64 + 0.382 * jr as f64) / samples as f64;
                    let z = [r * th.cos(), r * th.sin()];
                    let err = (w_of(z) - liouville::eval_u_radial(r)).abs();
                    sup = sup.max(err);
                }
            }
            Some(sup)
        })
        .collect()
}

/// Sups over grid nodes outside every B_δ(y_i): of √p·u, and of
/// |p·u − 8π√e Σ_i G(·, y_i)|. Both tend to zero away from the peaks.
pub fn off_peak_checks(
    u: &Field,
    p: f64,
    peaks: &PeakSet,
    delta: f64,
    g: &GreenFn,
) -> Result<(f64, f64), DiagnosticsError> {
    let grid = &u.grid;
    let mut test: Vec<usize> = Vec::new();
    for q in 0..grid.n_unknowns() {
        let x = grid.node_point(q);
        if peaks.peaks.iter().all(|pk| dist(x, pk.location) >= delta) {
            test.push(q);
        }
    }
    if test.is_empty() {
        return Err(DiagnosticsError::EmptyTestSet { delta });
    }

    // accumulate the superposition one source at a time: the collocation
    // backend caches its layer per source point
    let mut green_sum = vec![0.0; test.len()];
    for pk in &peaks.peaks {
        for (slot, &q) in test.iter().enumerate() {
            green_sum[slot] += g.green(grid.node_point(q), pk.location)?;
        }
    }

    let sqrt_p = p.sqrt();
    let mut sqrtp_sup: f64 = 0.0;
    let mut green_sup: f64 = 0.0;
    for (slot, &q) in test.iter().enumerate() {
        let v = u.values[q];
        sqrtp_sup = sqrtp_sup.max((sqrt_p * v).abs());
        green_sup = green_sup.max((p * v - 8.0 * PI * SQRT_E * green_sum[slot]).abs());
    }
    Ok((sqrtp_sup, green_sup))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundCheck {
    pub gamma: f64,
    /// Inner radius R_γ of the sampled annulus, in rescaled units.
    pub r_inner: f64,
    /// Outer radius r/ε.
    pub r_outer: f64,
    /// Minimal C̃ with w(z) ≤ (4−γ)·log(1/|z|) + C̃ on the annulus.
    pub c_tilde: f64,
    /// Minimal C with (1 + w/p)^p ≤ C·|z|^{−(4−γ)} on the annulus.
    pub c_big: f64,
    /// (1 + w/p)^p ≤ 1 held at every sample with w ≤ 0.
    pub pow_within_unit: bool,
    /// w > −p at every sample, i.e. the base of the power stayed positive.
    pub w_above_neg_p: bool,
}

/// Fits the minimal decay-bound constants per peak on the rescaled annulus
/// R_γ ≤ |z| ≤ r/ε, with r taken as large as the peak's free surroundings
/// allow. `None` when the annulus is empty.
pub fn bound_checks(u: &Field, p: f64, peaks: &PeakSet, gamma: f64) -> Vec<Option<BoundCheck>> {
    assert!(gamma > 0.0 && gamma < 2.0, "γ must lie in (0, 2)");
    const R_INNER: f64 = 2.0;
    let spec = &u.grid.spec;

    peaks
        .peaks
        .iter()
        .enumerate()
        .map(|(i, pk)| {
            let eps = pk.log_eps.exp();
            let mut r = -spec.signed_distance(pk.location);
            for (l, other) in peaks.peaks.iter().enumerate() {
                if l != i {
                    r = r.min(0.5 * dist(pk.location, other.location));
                }
            }
            r *= 0.9;
            let r_outer = r / eps;
            if !(r_outer > 2.0 * R_INNER) || eps <= 0.0 {
                return None;
            }

            let center = u.interp(pk.location);
            let mut c_tilde = f64::NEG_INFINITY;
            let mut c_big = f64::NEG_INFINITY;
            let mut pow_within_unit = true;
            let mut w_above_neg_p = true;
            let (n_r, n_th) = (160, 24);
            let ratio = (r_outer / R_INNER).ln();
            for jr in 0..=n_r {
                let z_abs = R_INNER * (ratio * jr as f64 / n_r as f64).exp();
                for jt in 0..n_th {
                    let th = 2.0 * PI * (jt as f64 + 0.382 * jr as f64) / n_th as f64;
                    let x = [
                        pk.location[0] + eps * z_abs * th.cos(),
                        pk.location[1] + eps * z_abs * th.sin(),
                    ];
                    let w = p * (u.interp(x) - center) / center;
                    if w <= -p {
                        w_above_neg_p = false;
                        continue;
                    }
                    // (1 + w/p)^p through the log, so huge p cannot overflow
                    let pow = (p * (w / p).ln_1p()).exp();
                    if w <= 0.0 && pow > 1.0 {
                        pow_within_unit = false;
                    }
                    c_tilde = c_tilde.max(w + (4.0 - gamma) * z_abs.ln());
                    c_big = c_big.max(pow * z_abs.powf(4.0 - gamma));
                }
            }
            Some(BoundCheck {
                gamma,
                r_inner: R_INNER,
                r_outer,
                c_tilde,
                c_big,
                pow_within_unit,
                w_above_neg_p,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecompositionCheck {
    /// (u(y)/p) ∫ H(y, y+εz) (1+w/p)^p dz over the rescaled ball.
    pub a: f64,
    /// −(u(y)/2πp) ∫ log|z| (1+w/p)^p dz.
    pub b: f64,
    /// −(u(y)·log ε/2πp) ∫ (1+w/p)^p dz.
    pub c: f64,
    /// ∫ (1+w/p)^p dz; tends to the bubble mass 8π.
    pub mass: f64,
    /// Green-formula remainder ∫_{Ω∖B_r(y)} G(y,·) u^p.
    pub tail: f64,
    /// a + b + c + tail; the Green representation says this is u(y).
    pub total: f64,
    pub height: f64,
    pub identity_gap: f64,
    /// Finite-p inversion of the C-term limit: exp(πp/((−log ε)·mass)).
    pub m_est: f64,
}

/// Splits the peak height by the Green representation over B_r(y): in
/// rescaled coordinates u(y) = A + B + C + tail with the three integrals and
/// the remainder computed from the stored field by midpoint quadrature on
/// the grid. The identity gap measures discretization plus interpolation
/// error; it does not vanish with Newton's residual.
pub fn decomposition_check(
    u: &Field,
    p: f64,
    peaks: &PeakSet,
    peak: usize,
    g: &GreenFn,
    r: f64,
) -> Result<DecompositionCheck, DiagnosticsError> {
    let grid = &u.grid;
    let h = grid.h;
    let pk = &peaks.peaks[peak];
    let y = pk.location;

    let inset = -grid.spec.signed_distance(y);
    if inset <= r {
        return Err(DiagnosticsError::BallOverlap { peak, r });
    }
    for (l, other) in peaks.peaks.iter().enumerate() {
        if l != peak && dist(y, other.location) <= 2.0 * r {
            return Err(DiagnosticsError::BallOverlap { peak, r });
        }
    }
    let eps = pk.log_eps.exp();
    if !(eps >= 4.0 * h) {
        return Err(DiagnosticsError::QuadratureUnresolved { eps, min: 4.0 * h });
    }

    let m = pk.height;
    let h2 = h * h;
    let mut mass_phys = 0.0;
    let mut h_phys = 0.0;
    let mut log_phys = 0.0;
    let mut tail = 0.0;
    for q in 0..grid.n_unknowns() {
        let x = grid.node_point(q);
        let v = u.values[q];
        if v <= 0.0 {
            continue;
        }
        let d = dist(x, y);
        if d < r {
            let t = (p * (v / m).ln()).exp();
            mass_phys += t * h2;
            h_phys += g.regular_part(y, x)? * t * h2;
            // a node landing on y would put ln(0) in the quadrature; the
            // cell average of log|x| over that one cell is ~ln(0.3h)
            log_phys += d.max(0.3 * h).ln() * t * h2;
        } else {
            tail += g.green(y, x)? * (p * v.ln()).exp() * h2;
        }
    }

    let eps2 = eps * eps;
    let mass = mass_phys / eps2;
    let a = m / p * h_phys / eps2;
    let b = -m / (2.0 * PI * p) * (log_phys - pk.log_eps * mass_phys) / eps2;
    let c = -m * pk.log_eps / (2.0 * PI * p) * mass;
    let total = a + b + c + tail;
    let m_est = (PI * p / ((-pk.log_eps) * mass)).exp();
    Ok(DecompositionCheck {
        a,
        b,
        c,
        mass,
        tail,
        total,
        height: m,
        identity_gap: (m - total).abs(),
        m_est,
    })
}

/// Least-squares fit of samples (p, value) to a + b·log p/p + c/p; returns
/// (a, RMS residual). This is the model the peak quantities follow in p, so
/// the constant term estimates their limit.
pub fn extrapolate(values: &[(f64, f64)]) -> Result<(f64, f64), DiagnosticsError> {
    let mut ps: Vec<f64> = values.iter().map(|s| s.0).collect();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    if values.len() < 4 || ps.len() < 4 {
        return Err(DiagnosticsError::TooFewSamples { got: ps.len().min(values.len()) });
    }

    let n = values.len();
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, 3);
    let mut rhs = nalgebra::DVector::<f64>::zeros(n);
    for (row, &(p, val)) in values.iter().enumerate() {
        m[(row, 0)] = 1.0;
        m[(row, 1)] = p.ln() / p;
        m[(row, 2)] = 1.0 / p;
        rhs[row] = val;
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if cond > FIT_COND_LIMIT {
        return Err(DiagnosticsError::IllConditionedFit { cond });
    }
    let coeffs = svd.solve(&rhs, 0.0).expect("svd computed both factors");
    let resid = (&m * &coeffs) - &rhs;
    let rms = (resid.norm_squared() / n as f64).sqrt();
    Ok((coeffs[0], rms))
}

/// Everything the runner records per accepted solution, in one bundle.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub p: f64,
    pub k: usize,
    pub peaks: Vec<Peak>,
    pub cluster_radius: f64,
    pub energy: EnergyCheck,
    pub max_norm: f64,
    pub sqrtp_off_peak: f64,
    pub green_off_peak: f64,
    pub profile_errors: Vec<Option<f64>>,
    pub bounds: Vec<Option<BoundCheck>>,
    pub decomposition: Vec<Option<DecompositionCheck>>,
    /// Sup norm of the balance-system residual evaluated at the detected
    /// peaks with their heights as masses.
    pub system_residual: f64,
}

/// Knobs for [`full_report`]; the defaults suit unit-scale domains.
#[derive(Debug, Clone, Serialize)]
pub struct ReportSettings {
    pub height_floor: f64,
    pub cluster_radius: f64,
    pub r_compare: f64,
    pub delta: f64,
    pub gamma: f64,
    pub ball_radius: f64,
}

impl Default for ReportSettings {
    fn default() -> Self {
        ReportSettings {
            height_floor: 1.0,
            cluster_radius: 0.15,
            r_compare: 5.0,
            delta: 0.3,
            gamma: 1.0,
            ball_radius: 0.25,
        }
    }
}

/// Runs every check against one solution. Unresolvable sub-checks degrade to
/// `None` entries; only a missing peak set or an empty test set is fatal.
pub fn full_report(
    u: &Field,
    p: f64,
    g: &GreenFn,
    settings: &ReportSettings,
) -> Result<DiagnosticsReport, DiagnosticsError> {
    let peaks = detect_peaks(u, p, settings.height_floor, settings.cluster_radius)?;
    let energy = energy_check(u, p, peaks.k());
    let (sqrtp_off_peak, green_off_peak) = off_peak_checks(u, p, &peaks, settings.delta, g)?;
    let profile_errors = profile_check(u, p, &peaks, settings.r_compare);
    let bounds = bound_checks(u, p, &peaks, settings.gamma);
    let decomposition: Vec<Option<DecompositionCheck>> = (0..peaks.k())
        .map(|i| decomposition_check(u, p, &peaks, i, g, settings.ball_radius).ok())
        .collect();

    let masses: Vec<f64> = peaks.peaks.iter().map(|pk| pk.height).collect();
    let residuals = crate::concentration::system_residual(g, &peaks.locations(), &masses)?;
    let system_residual = residuals
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));

    Ok(DiagnosticsReport {
        p,
        k: peaks.k(),
        cluster_radius: peaks.cluster_radius,
        energy,
        max_norm: u.max_norm(),
        sqrtp_off_peak,
        green_off_peak,
        profile_errors,
        bounds,
        decomposition,
        system_residual,
        peaks: peaks.peaks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use crate::grid::build_grid;
    use crate::radial;
    use std::sync::Arc;

    fn disk_grid(h: f64) -> Arc<crate::grid::Grid> {
        Arc::new(build_grid(&DomainSpec::unit_disk(), h).unwrap())
    }

    fn oracle_field(grid: &Arc<crate::grid::Grid>, p: f64) -> (Field, radial::RadialSolution) {
        let sol = radial::shoot(p, 1e-10).unwrap();
        let f = Field::from_fn(grid.clone(), |x| sol.u((x[0] * x[0] + x[1] * x[1]).sqrt()));
        (f, sol)
    }

    #[test]
    fn finds_single_synthetic_peak() {
        let grid = disk_grid(2.0 / 64.0);
        let u = Field::from_fn(grid.clone(), |x| {
            2.0 * (-(x[0] * x[0] + x[1] * x[1]) / 0.02).exp()
        });
        let peaks = detect_peaks(&u, 10.0, 1.0, 0.2).unwrap();
        assert_eq!(peaks.k(), 1);
        let pk = &peaks.peaks[0];
        assert!(dist(pk.location, [0.0, 0.0]) < grid.h);
        assert!((pk.height - 2.0).abs() < 0.01);
        // ε consistency with the stored height
        let check = -0.5 * 9.0 * pk.height.ln() - 0.5 * 10.0f64.ln();
        assert!((pk.log_eps - check).abs() < 1e-14);
        assert!((pk.eps.ln() - pk.log_eps).abs() < 1e-12);

        let floored = detect_peaks(&u, 10.0, 3.0, 0.2);
        assert!(matches!(floored, Err(DiagnosticsError::NoPeaks { .. })));
    }

    #[test]
    fn separates_two_bumps_and_orders_by_height() {
        let grid = disk_grid(2.0 / 64.0);
        let bump = |x: Point, c: Point, a: f64| {
            let d2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2);
            a * (-d2 / 0.01).exp()
        };
        let u = Field::from_fn(grid.clone(), |x| {
            bump(x, [0.5, 0.0], 1.5) + bump(x, [-0.5, 0.0], 1.8)
        });
        let peaks = detect_peaks(&u, 50.0, 1.0, 0.15).unwrap();
        assert_eq!(peaks.k(), 2);
        assert!(peaks.peaks[0].height > peaks.peaks[1].height);
        assert!(dist(peaks.peaks[0].location, [-0.5, 0.0]) < grid.h);
        assert!(dist(peaks.peaks[1].location, [0.5, 0.0]) < grid.h);

        // a cluster radius swallowing both keeps only the taller one
        let merged = detect_peaks(&u, 50.0, 1.0, 0.6).unwrap();
        assert_eq!(merged.k(), 1);
        assert!((merged.peaks[0].height - 1.8).abs() < 0.01);
    }

    #[test]
    fn energy_of_oracle_field_matches_radial_energy() {
        let p = 10.0;
        let grid = disk_grid(2.0 / 128.0);
        let (u, _) = oracle_field(&grid, p);
        let (_, e_oracle) = radial::disk_quantities(p).unwrap();
        let ec = energy_check(&u, p, 1);
        assert!(
            (ec.e - e_oracle).abs() / e_oracle < 0.02,
            "grid energy {} vs radial {}",
            ec.e,
            e_oracle
        );
        assert!(ec.sbp_gap < 1e-10 * ec.e);
        assert!(ec.cross_rel < 0.05);
        assert!((ec.ratio - ec.per_peak).abs() < 1e-15);
    }

    #[test]
    fn oracle_profile_approaches_bubble() {
        let p = 10.0;
        let grid = disk_grid(2.0 / 256.0);
        let (u, _) = oracle_field(&grid, p);
        let peaks = detect_peaks(&u, p, 1.0, 0.2).unwrap();
        let errs = profile_check(&u, p, &peaks, 3.0);
        let sup = errs[0].expect("ε(10) ≈ 0.0195 is resolvable at h = 2/256");
        assert!(sup < 1.0, "sup |w − U| = {sup}");
        assert!(sup > 1e-4, "suspiciously exact; interpolation noise alone exceeds this");

        // w(0) = 0 exactly: the error at z = 0 is |U(0)| = 0
        let center = u.interp(peaks.peaks[0].location);
        assert!(center > 0.0);

        // at p = 20 on the same grid the scale drops below the guard
        let (u20, _) = oracle_field(&grid, 20.0);
        let peaks20 = detect_peaks(&u20, 20.0, 1.0, 0.2).unwrap();
        assert!(profile_check(&u20, 20.0, &peaks20, 3.0)[0].is_none());
    }

    #[test]
    fn exact_superposition_passes_green_comparator() {
        let p = 60.0;
        let grid = disk_grid(2.0 / 64.0);
        let g = GreenFn::for_domain(&DomainSpec::unit_disk());
        let scale = 8.0 * PI * SQRT_E / p;
        let u = Field::from_fn(grid.clone(), |x| {
            if x == [0.0, 0.0] {
                3.0
            } else {
                scale * g.green(x, [0.0, 0.0]).unwrap()
            }
        });
        let peaks = detect_peaks(&u, p, 1.0, 0.2).unwrap();
        let (sqrtp, green_sup) = off_peak_checks(&u, p, &peaks, 0.3, &g).unwrap();
        assert!(green_sup < 1e-10, "comparator should be exact on its own field, got {green_sup}");
        assert!(sqrtp > 0.0 && sqrtp < 2.0);

        let too_wide = off_peak_checks(&u, p, &peaks, 10.0, &g);
        assert!(matches!(too_wide, Err(DiagnosticsError::EmptyTestSet { .. })));
    }

    #[test]
    fn bounds_hold_on_oracle_field() {
        let p = 10.0;
        let grid = disk_grid(2.0 / 256.0);
        let (u, _) = oracle_field(&grid, p);
        let peaks = detect_peaks(&u, p, 1.0, 0.2).unwrap();
        let bc = bound_checks(&u, p, &peaks, 1.0)[0].expect("annulus resolvable");
        assert!(bc.pow_within_unit);
        assert!(bc.w_above_neg_p);
        assert!(bc.c_tilde.is_finite() && bc.c_big.is_finite());
        assert!(bc.c_big > 0.0);
    }

    #[test]
    fn decomposition_matches_radial_oracle() {
        let p = 10.0;
        let grid = disk_grid(2.0 / 512.0);
        let (u, sol) = oracle_field(&grid, p);
        let g = GreenFn::for_domain(&DomainSpec::unit_disk());
        let peaks = detect_peaks(&u, p, 1.0, 0.2).unwrap();
        let r = 0.5;
        let dc = decomposition_check(&u, p, &peaks, 0, &g, r).unwrap();
        let oracle = radial::radial_decomposition(&sol, r);

        assert!((dc.mass - oracle.mass).abs() / oracle.mass < 0.02);
        assert!((dc.b - oracle.b).abs() < 0.02 * oracle.b.abs().max(1.0));
        assert!((dc.c - oracle.c).abs() / oracle.c < 0.02);
        assert!((dc.tail - oracle.tail).abs() < 0.02 * oracle.tail.abs().max(0.1));
        assert!(dc.a.abs() < 0.01, "H(0,·) vanishes on the disk, got A = {}", dc.a);
        assert!((dc.m_est - oracle.m_est).abs() / oracle.m_est < 0.02);
        assert!(dc.identity_gap / dc.height < 0.05);

        let tight = decomposition_check(&u, p, &peaks, 0, &g, 1.5);
        assert!(matches!(tight, Err(DiagnosticsError::BallOverlap { .. })));
    }

    #[test]
    fn unresolved_scale_is_reported() {
        let p = 40.0;
        let grid = disk_grid(2.0 / 128.0);
        let (u, _) = oracle_field(&grid, p);
        let peaks = detect_peaks(&u, p, 1.0, 0.2).unwrap();
        let out = decomposition_check(&u, p, &peaks, 0, &GreenFn::for_domain(&DomainSpec::unit_disk()), 0.3);
        assert!(matches!(out, Err(DiagnosticsError::QuadratureUnresolved { .. })));
    }

    #[test]
    fn extrapolation_recovers_exact_model() {
        let (a, b, c) = (1.648, -2.1, 0.7);
        let samples: Vec<(f64, f64)> = [50.0, 100.0, 200.0, 400.0, 800.0]
            .iter()
            .map(|&p: &f64| (p, a + b * p.ln() / p + c / p))
            .collect();
        let (limit, rms) = extrapolate(&samples).unwrap();
        assert!((limit - a).abs() < 1e-10);
        assert!(rms < 1e-12);

        assert!(matches!(
            extrapolate(&samples[..3]),
            Err(DiagnosticsError::TooFewSamples { .. })
        ));
        let dup: Vec<(f64, f64)> = vec![(50.0, 1.0); 5];
        assert!(matches!(extrapolate(&dup), Err(DiagnosticsError::TooFewSamples { .. })));
    }

    #[test]
    fn oracle_peak_heights_extrapolate_to_sqrt_e() {
        let samples: Vec<(f64, f64)> = [50.0, 100.0, 200.0, 400.0]
            .iter()
            .map(|&p| {
                let (m, _) = radial::disk_quantities(p).unwrap();
                (p, m)
            })
            .collect();
        let (limit, _) = extrapolate(&samples).unwrap();
        assert!((limit - SQRT_E).abs() < 0.02, "extrapolated {limit}");

        let energies: Vec<(f64, f64)> = [50.0, 100.0, 200.0, 400.0]
            .iter()
            .map(|&p| {
                let (_, e) = radial::disk_quantities(p).unwrap();
                (p, e)
            })
            .collect();
        let (e_limit, _) = extrapolate(&energies).unwrap();
        assert!((e_limit - EIGHT_PI_E).abs() < 1.5, "extrapolated energy {e_limit}");
    }
}
