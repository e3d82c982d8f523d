//! Iterative linear solvers for the grid operators.
//!
//! The Shortley-Weller Laplacian is nonsymmetric at cut nodes, and the Newton
//! systems subtract a nonnegative diagonal from it, so the workhorse is
//! BiCGStab with Jacobi scaling. Plain CG is kept for the symmetric case
//! (grid-aligned rectangles). Both contracts are on the relative residual
//! only, never on the iteration path.

use crate::sparse::Csr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinSolveError {
    #[error("{method} did not reach rtol {rtol:e} in {iters} iterations (achieved {achieved:e})")]
    NotConverged { method: &'static str, rtol: f64, iters: usize, achieved: f64 },
}

/// Iteration telemetry returned alongside every solution.
#[derive(Debug, Clone, Copy)]
pub struct SolveStats {
    pub iters: usize,
    pub rel_residual: f64,
    pub restarts: usize,
}

/// The diagonal of `a` plus a shift, inverted for use as a Jacobi scaler.
/// Magnitudes are used so a strongly indefinite shift cannot flip signs into
/// the preconditioner.
fn jacobi_inverse(a: &Csr, diag_shift: &[f64]) -> Vec<f64> {
    let mut d = a.diagonal();
    for (di, s) in d.iter_mut().zip(diag_shift) {
        let m = (*di + s).abs();
        *di = if m > 0.0 { 1.0 / m } else { 1.0 };
    }
    d
}

fn apply_shifted(a: &Csr, shift: &[f64], x: &[f64], out: &mut [f64]) {
    a.matvec(x, out);
    for i in 0..x.len() {
        out[i] += shift[i] * x[i];
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves (A + diag(shift)) x = b by preconditioned BiCGStab.
///
/// `shift` lets Newton pass its diagonal Jacobian term without forming a new
/// matrix. Near-zero right-hand sides short-circuit to x = 0: they arise at
/// already-converged Newton iterates where the residual is rounding noise.
/// On a breakdown (|ρ| collapsing) the method restarts from the current
/// iterate instead of failing.
pub fn bicgstab(
    a: &Csr,
    shift: &[f64],
    b: &[f64],
    rtol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveStats), LinSolveError> {
    let n = b.len();
    let bnorm = norm2(b);
    if bnorm == 0.0 || bnorm < f64::MIN_POSITIVE / rtol {
        return Ok((vec![0.0; n], SolveStats { iters: 0, rel_residual: 0.0, restarts: 0 }));
    }
    let prec = jacobi_inverse(a, shift);

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut r_hat = r.clone();
    let mut rho = 1.0f64;
    let mut alpha = 1.0f64;
    let mut omega = 1.0f64;
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut ph = vec![0.0; n];
    let mut sh = vec![0.0; n];
    let mut restarts = 0usize;
    let mut rel = 1.0;

    for it in 1..=max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new.abs() < 1e-300 * bnorm * bnorm || omega == 0.0 {
            // breakdown: restart with the current residual as shadow vector
            r_hat.copy_from_slice(&r);
            rho = dot(&r_hat, &r);
            p.copy_from_slice(&r);
            restarts += 1;
            if rho == 0.0 {
                break;
            }
        } else {
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
        }
        for i in 0..n {
            ph[i] = prec[i] * p[i];
        }
        apply_shifted(a, shift, &ph, &mut v);
        let denom = dot(&r_hat, &v);
        if denom == 0.0 {
            restarts += 1;
            r_hat.copy_from_slice(&r);
            continue;
        }
        alpha = rho / denom;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm2(&s) <= rtol * bnorm {
            for i in 0..n {
                x[i] += alpha * ph[i];
            }
            let stats = SolveStats { iters: it, rel_residual: norm2(&s) / bnorm, restarts };
            return Ok((x, stats));
        }
        for i in 0..n {
            sh[i] = prec[i] * s[i];
        }
        apply_shifted(a, shift, &sh, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += alpha * ph[i] + omega * sh[i];
            r[i] = s[i] - omega * t[i];
        }
        rel = norm2(&r) / bnorm;
        if rel <= rtol {
            return Ok((x, SolveStats { iters: it, rel_residual: rel, restarts }));
        }
    }
    Err(LinSolveError::NotConverged { method: "bicgstab", rtol, iters: max_iter, achieved: rel })
}

/// Conjugate gradients with Jacobi scaling, for symmetric positive-definite
/// operators only (the caller asserts symmetry; see `Grid::is_symmetric`).
pub fn cg(
    a: &Csr,
    b: &[f64],
    rtol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveStats), LinSolveError> {
    let n = b.len();
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], SolveStats { iters: 0, rel_residual: 0.0, restarts: 0 }));
    }
    let prec = jacobi_inverse(a, &vec![0.0; n]);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&prec).map(|(ri, pi)| ri * pi).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut rel = 1.0;

    for it in 1..=max_iter {
        a.matvec(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = norm2(&r) / bnorm;
        if rel <= rtol {
            return Ok((x, SolveStats { iters: it, rel_residual: rel, restarts: 0 }));
        }
        for i in 0..n {
            z[i] = prec[i] * r[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(LinSolveError::NotConverged { method: "cg", rtol, iters: max_iter, achieved: rel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use crate::grid::build_grid;

    fn residual_norm(a: &Csr, shift: &[f64], x: &[f64], b: &[f64]) -> f64 {
        let mut ax = vec![0.0; b.len()];
        apply_shifted(a, shift, x, &mut ax);
        ax.iter().zip(b).map(|(l, r)| (l - r).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn bicgstab_solves_disk_poisson() {
        let g = build_grid(&DomainSpec::unit_disk(), 2.0 / 64.0).unwrap();
        let n = g.n_unknowns();
        let b = vec![4.0; n];
        let shift = vec![0.0; n];
        let (x, stats) = bicgstab(g.matrix(), &shift, &b, 1e-11, 20_000).unwrap();
        assert!(stats.rel_residual <= 1e-11);
        // −Δ(1−|x|²) = 4, so x should match 1−|x|² up to O(h²)
        let mut worst = 0.0f64;
        for q in 0..n {
            let p = g.node_point(q);
            let exact = 1.0 - p[0] * p[0] - p[1] * p[1];
            worst = worst.max((x[q] - exact).abs());
        }
        assert!(worst < 5e-4, "sup error {worst}");
    }

    #[test]
    fn bicgstab_zero_rhs_short_circuits() {
        let g = build_grid(&DomainSpec::unit_disk(), 2.0 / 32.0).unwrap();
        let n = g.n_unknowns();
        let (x, stats) = bicgstab(g.matrix(), &vec![0.0; n], &vec![0.0; n], 1e-10, 100).unwrap();
        assert_eq!(stats.iters, 0);
        assert!(x.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn bicgstab_handles_indefinite_shift() {
        let g = build_grid(&DomainSpec::unit_disk(), 2.0 / 48.0).unwrap();
        let n = g.n_unknowns();
        // a Newton-like negative diagonal, strong enough to be indefinite
        let shift: Vec<f64> = (0..n).map(|q| if q % 7 == 0 { -50.0 } else { -1.0 }).collect();
        let b: Vec<f64> = (0..n).map(|q| (q as f64 * 0.37).sin()).collect();
        let (x, _) = bicgstab(g.matrix(), &shift, &b, 1e-10, 50_000).unwrap();
        let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(residual_norm(g.matrix(), &shift, &x, &b) <= 1e-9 * bn);
    }

    #[test]
    fn cg_matches_bicgstab_on_rectangle() {
        let spec = DomainSpec::Rectangle { corner_min: [0.0, 0.0], corner_max: [1.0, 1.0] };
        let g = build_grid(&spec, 1.0 / 32.0).unwrap();
        assert!(g.is_symmetric());
        let n = g.n_unknowns();
        let b: Vec<f64> = (0..n).map(|q| 1.0 + (q as f64 * 0.11).cos()).collect();
        let (x1, _) = cg(g.matrix(), &b, 1e-12, 10_000).unwrap();
        let (x2, _) = bicgstab(g.matrix(), &vec![0.0; n], &b, 1e-12, 10_000).unwrap();
        let diff = x1
            .iter()
            .zip(&x2)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(diff < 1e-8, "solver mismatch {diff}");
    }

    #[test]
    fn not_converged_is_reported() {
        let g = build_grid(&DomainSpec::unit_disk(), 2.0 / 64.0).unwrap();
        let n = g.n_unknowns();
        let b = vec![1.0; n];
        let err = bicgstab(g.matrix(), &vec![0.0; n], &b, 1e-14, 3);
        assert!(matches!(err, Err(LinSolveError::NotConverged { .. })));
    }
}
