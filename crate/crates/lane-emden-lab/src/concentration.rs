//! Critical points of the k-peak interaction energy
//! Ψ(x₁,…,x_k) = Σᵢ mᵢ²·H(xᵢ,xᵢ) + Σ_{i≠ℓ} mᵢm_ℓ·G(xᵢ,x_ℓ),
//! the configurations at which concentrating families can place their peaks.
//!
//! The stationarity system, per peak and after dividing by 2mᵢ:
//!
//!   rᵢ = mᵢ·∇₁H(xᵢ,xᵢ) + Σ_{ℓ≠i} m_ℓ·∇₁G(xᵢ,x_ℓ) = 0.
//!
//! Roots are hunted by damped Newton with a finite-difference Jacobian from
//! many seeded random starts; starts that wander to the boundary, collide
//! two peaks, or fail to converge are discarded, and the survivors are
//! deduplicated up to re-labelling of the peaks.

use crate::domain::Point;
use crate::green::{GreenError, GreenFn};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConcentrationError {
    #[error("no critical configuration found for k = {k} after {starts} starts")]
    NoSolutionFound { k: usize, starts: usize },
    #[error(transparent)]
    Green(#[from] GreenError),
}

/// One critical configuration, peaks in canonical (lexicographic) order.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Configuration {
    pub points: Vec<Point>,
    pub masses: Vec<f64>,
    /// Sup norm of the stationarity residual at the returned points.
    pub residual: f64,
}

/// The stacked residuals rᵢ of the stationarity system.
pub fn system_residual(
    green: &GreenFn,
    points: &[Point],
    masses: &[f64],
) -> Result<Vec<Point>, GreenError> {
    assert_eq!(points.len(), masses.len());
    let mut out = Vec::with_capacity(points.len());
    for (i, xi) in points.iter().enumerate() {
        let gh = green.grad_x_regular_part(*xi, *xi)?;
        let mut r = [masses[i] * gh[0], masses[i] * gh[1]];
        for (l, xl) in points.iter().enumerate() {
            if l == i {
                continue;
            }
            let gg = green.grad_x_green(*xi, *xl)?;
            r[0] += masses[l] * gg[0];
            r[1] += masses[l] * gg[1];
        }
        out.push(r);
    }
    Ok(out)
}

fn flat_residual(green: &GreenFn, z: &[f64], masses: &[f64]) -> Result<Vec<f64>, ConcentrationError> {
    let pts: Vec<Point> = z.chunks(2).map(|c| [c[0], c[1]]).collect();
    let r = system_residual(green, &pts, masses)?;
    Ok(r.into_iter().flatten().collect())
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

#[derive(Debug, Clone, Copy)]
pub struct SearchSettings {
    pub starts: usize,
    pub max_newton: usize,
    pub tol: f64,
    /// Peaks may not come within this fraction of the diameter of ∂Ω or of
    /// each other while iterating.
    pub margin: f64,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings { starts: 40, max_newton: 60, tol: 1e-10, margin: 0.02 }
    }
}

/// All distinct critical configurations of k equal-mass peaks found from
/// `settings.starts` seeded random starts, best residual first.
pub fn solve_system(
    green: &GreenFn,
    k: usize,
    seed: u64,
    settings: &SearchSettings,
) -> Result<Vec<Configuration>, ConcentrationError> {
    assert!(k >= 1);
    let spec = green.domain().clone();
    let diam = spec.diameter();
    let masses = vec![1.0; k];
    let (lo, hi) = spec.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut found: Vec<Configuration> = Vec::new();
    for _ in 0..settings.starts {
        // rejection-sample an interior start, peaks pairwise separated
        let mut z = Vec::with_capacity(2 * k);
        let mut guard = 0;
        while z.len() < 2 * k && guard < 10_000 {
            guard += 1;
            let cand = [
                rng.random_range(lo[0]..hi[0]),
                rng.random_range(lo[1]..hi[1]),
            ];
            if spec.signed_distance(cand) > -settings.margin * diam {
                continue;
            }
            if z.chunks(2).any(|c: &[f64]| {
                ((c[0] - cand[0]).powi(2) + (c[1] - cand[1]).powi(2)).sqrt()
                    < 4.0 * settings.margin * diam
            }) {
                continue;
            }
            z.push(cand[0]);
            z.push(cand[1]);
        }
        if z.len() < 2 * k {
            continue;
        }

        if let Some(cfg) = newton_hunt(green, &spec, z, &masses, diam, settings)? {
            let dup = found.iter().any(|f| same_configuration(&f.points, &cfg.points, 1e-6 * diam));
            if !dup {
                found.push(cfg);
            }
        }
    }

    if found.is_empty() {
        return Err(ConcentrationError::NoSolutionFound { k, starts: settings.starts });
    }
    found.sort_by(|a, b| a.residual.partial_cmp(&b.residual).unwrap());
    Ok(found)
}

fn newton_hunt(
    green: &GreenFn,
    spec: &crate::domain::DomainSpec,
    mut z: Vec<f64>,
    masses: &[f64],
    diam: f64,
    settings: &SearchSettings,
) -> Result<Option<Configuration>, ConcentrationError> {
    let n = z.len();
    let fd = 1e-6 * diam;

    let ok_position = |z: &[f64]| -> bool {
        let pts: Vec<Point> = z.chunks(2).map(|c| [c[0], c[1]]).collect();
        for (i, p) in pts.iter().enumerate() {
            if spec.signed_distance(*p) > -0.5 * settings.margin * diam {
                return false;
            }
            for q in pts.iter().skip(i + 1) {
                if ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt() < settings.margin * diam {
                    return false;
                }
            }
        }
        true
    };

    if !ok_position(&z) {
        return Ok(None);
    }
    let mut r = flat_residual(green, &z, masses)?;

    for _ in 0..settings.max_newton {
        if sup(&r) <= settings.tol {
            let mut points: Vec<Point> = z.chunks(2).map(|c| [c[0], c[1]]).collect();
            points.sort_by(|a, b| (a[0], a[1]).partial_cmp(&(b[0], b[1])).unwrap());
            return Ok(Some(Configuration {
                points,
                masses: masses.to_vec(),
                residual: sup(&r),
            }));
        }

        // finite-difference Jacobian, column by column
        let mut jac = vec![vec![0.0; n]; n];
        for col in 0..n {
            let mut zp = z.clone();
            zp[col] += fd;
            let mut zm = z.clone();
            zm[col] -= fd;
            if !ok_position(&zp) || !ok_position(&zm) {
                return Ok(None);
            }
            let rp = flat_residual(green, &zp, masses)?;
            let rm = flat_residual(green, &zm, masses)?;
            for row in 0..n {
                jac[row][col] = (rp[row] - rm[row]) / (2.0 * fd);
            }
        }

        let Some(step) = solve_dense(&mut jac, &r) else {
            return Ok(None);
        };

        let mut lambda = 1.0;
        let mut advanced = false;
        while lambda >= 1.0 / 64.0 {
            let zt: Vec<f64> = z.iter().zip(&step).map(|(zi, si)| zi - lambda * si).collect();
            if ok_position(&zt) {
                let rt = flat_residual(green, &zt, masses)?;
                if sup(&rt) < sup(&r) || sup(&rt) <= settings.tol {
                    z = zt;
                    r = rt;
                    advanced = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !advanced {
            return Ok(None);
        }
    }
    Ok(None)
}

/// Gaussian elimination with partial pivoting; the systems here are 2k×2k
/// with k at most a handful.
fn solve_dense(a: &mut [Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut x = b.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        x.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            x[row] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        x[col] /= a[col][col];
        for row in 0..col {
            x[row] -= a[row][col] * x[col];
        }
    }
    Some(x)
}

fn same_configuration(a: &[Point], b: &[Point], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    // both are in canonical order already
    a.iter()
        .zip(b)
        .all(|(p, q)| (p[0] - q[0]).abs() < tol && (p[1] - q[1]).abs() < tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;

    #[test]
    fn single_peak_on_disk_sits_at_center() {
        let green = GreenFn::for_domain(&DomainSpec::unit_disk());
        let cfgs = solve_system(&green, 1, 7, &SearchSettings::default()).unwrap();
        let p = cfgs[0].points[0];
        assert!(p[0].abs() < 1e-8 && p[1].abs() < 1e-8, "got {p:?}");
        assert!(cfgs[0].residual < 1e-10);
    }

    #[test]
    fn single_peak_on_square_sits_at_center() {
        let spec = DomainSpec::Rectangle { corner_min: [0.0, 0.0], corner_max: [1.0, 1.0] };
        let green = GreenFn::for_domain(&spec);
        let cfgs = solve_system(&green, 1, 3, &SearchSettings::default()).unwrap();
        let p = cfgs[0].points[0];
        assert!((p[0] - 0.5).abs() < 1e-7 && (p[1] - 0.5).abs() < 1e-7, "got {p:?}");
    }

    #[test]
    fn disk_pair_has_no_equilibrium() {
        // along the symmetric family (a, 0), (−a, 0) the radial residual
        // component keeps one sign, so the hunt must come back empty
        let green = GreenFn::for_domain(&DomainSpec::unit_disk());
        for a in [0.05, 0.2, 0.4, 0.6, 0.8, 0.95] {
            let r = system_residual(&green, &[[a, 0.0], [-a, 0.0]], &[1.0, 1.0]).unwrap();
            assert!(r[0][0] < 0.0, "radial component flipped sign at a = {a}");
        }
        let settings = SearchSettings { starts: 25, ..SearchSettings::default() };
        assert!(matches!(
            solve_system(&green, 2, 11, &settings),
            Err(ConcentrationError::NoSolutionFound { .. })
        ));
    }

    #[test]
    fn annulus_pair_radius_frozen() {
        let spec = DomainSpec::Annulus { center: [0.0, 0.0], r_inner: 0.3, r_outer: 1.0 };
        let green = GreenFn::for_domain(&spec);
        // antipodal two-peak configuration: radius frozen from two
        // independent root searches
        let f = |rho: f64| -> f64 {
            let r = system_residual(&green, &[[rho, 0.0], [-rho, 0.0]], &[1.0, 1.0]).unwrap();
            r[0][0]
        };
        let (mut a, mut b) = (0.45f64, 0.85f64);
        assert!(f(a) > 0.0 && f(b) < 0.0);
        for _ in 0..50 {
            let m = 0.5 * (a + b);
            if f(m) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        let rho = 0.5 * (a + b);
        assert!((rho - 0.630_036_07).abs() < 1e-6, "rho* = {rho:.10}");

        let cfgs = solve_system(&green, 2, 5, &SearchSettings::default()).unwrap();
        let best = cfgs
            .iter()
            .find(|c| {
                let r0 = (c.points[0][0].powi(2) + c.points[0][1].powi(2)).sqrt();
                let r1 = (c.points[1][0].powi(2) + c.points[1][1].powi(2)).sqrt();
                let d = ((c.points[0][0] - c.points[1][0]).powi(2)
                    + (c.points[0][1] - c.points[1][1]).powi(2))
                .sqrt();
                (r0 - rho).abs() < 1e-5 && (r1 - rho).abs() < 1e-5 && (d - 2.0 * rho).abs() < 1e-5
            })
            .expect("antipodal configuration among the roots");
        assert!(best.residual < 1e-9);
    }
}
