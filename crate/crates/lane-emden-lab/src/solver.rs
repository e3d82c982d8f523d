//! Damped Newton solver for the discrete problem A·u = u₊ᵖ and continuation
//! of its positive branch in p.
//!
//! Residuals are judged against tol·max(1, ‖u₊‖∞ᵖ) because the nonlinear
//! term grows by dozens of orders of magnitude along the branch; an absolute
//! test would either over-resolve small p or never pass at large p. The
//! Jacobian A − p·diag(u₊^{p−1}) is indefinite once the branch turns, so the
//! linear solves use preconditioned BiCGStab rather than CG.

use crate::constants::{LINSOLVE_TOL, NEWTON_TOL, SQRT_E, ZERO_SOLUTION_FLOOR};
use crate::domain::Point;
use crate::field::Field;
use crate::grid::Grid;
use crate::linsolve::{self, LinSolveError};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("newton stalled after {iters} iterations, residual {residual:.3e}")]
    NewtonStalled { iters: usize, residual: f64 },
    #[error("newton converged to the zero solution")]
    ConvergedToZero,
    #[error("principal eigenpair did not converge, residual {residual:.3e}")]
    EigSolveFailed { residual: f64 },
    #[error("bubble center ({0:.4}, {1:.4}) lies outside the domain")]
    CenterOutside(f64, f64),
    #[error(transparent)]
    LinSolve(#[from] LinSolveError),
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub backtrack_min: f64,
    pub lin_tol: f64,
    pub lin_max_iter: usize,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        NewtonSettings {
            tol: NEWTON_TOL,
            max_iter: 50,
            backtrack_min: 1e-4,
            lin_tol: LINSOLVE_TOL,
            lin_max_iter: 6000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonInfo {
    pub iters: usize,
    pub residual: f64,
    pub lin_iters: usize,
}

/// u₊ᵖ elementwise, evaluated in log space so huge powers neither overflow
/// nor lose the tiny entries.
fn pow_clip(values: &[f64], p: f64) -> Vec<f64> {
    values
        .iter()
        .map(|&v| {
            if v <= 0.0 {
                0.0
            } else {
                let e = p * v.ln();
                if e < -745.0 {
                    0.0
                } else if e > 709.0 {
                    f64::MAX
                } else {
                    e.exp()
                }
            }
        })
        .collect()
}

/// F(u) = A·u − u₊ᵖ on the unknowns.
pub fn residual(grid: &Grid, u: &[f64], p: f64) -> Vec<f64> {
    let mut r = grid.matrix().matvec_alloc(u);
    for (ri, s) in r.iter_mut().zip(pow_clip(u, p)) {
        *ri -= s;
    }
    r
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Residual scale max(1, ‖u₊‖∞ᵖ).
fn residual_scale(u: &[f64], p: f64) -> f64 {
    let m = u.iter().cloned().fold(0.0f64, f64::max);
    if m <= 0.0 {
        return 1.0;
    }
    let e = p * m.ln();
    if e <= 0.0 {
        1.0
    } else if e > 690.0 {
        1e300
    } else {
        e.exp().max(1.0)
    }
}

pub fn newton_solve(
    u0: &Field,
    p: f64,
    settings: &NewtonSettings,
) -> Result<(Field, NewtonInfo), SolverError> {
    let grid = &u0.grid;
    let a = grid.matrix();
    let mut u = u0.values.clone();
    let mut lin_total = 0usize;

    let mut r = residual(grid, &u, p);
    let mut rnorm = max_norm(&r);

    for it in 0..settings.max_iter {
        if rnorm <= settings.tol * residual_scale(&u, p) {
            if max_norm(&u) < ZERO_SOLUTION_FLOOR {
                return Err(SolverError::ConvergedToZero);
            }
            let field = Field { grid: Arc::clone(&u0.grid), values: u };
            return Ok((field, NewtonInfo { iters: it, residual: rnorm, lin_iters: lin_total }));
        }

        // J = A − p·diag(u₊^{p−1}); the shift vector feeds the same matrix
        // to the solver without reassembly
        let shift: Vec<f64> = u
            .iter()
            .map(|&v| {
                if v <= 0.0 {
                    0.0
                } else {
                    let e = (p - 1.0) * v.ln();
                    if e < -745.0 {
                        0.0
                    } else {
                        -p * e.exp()
                    }
                }
            })
            .collect();
        let neg_r: Vec<f64> = r.iter().map(|x| -x).collect();
        let (d, stats) = linsolve::bicgstab(a, &shift, &neg_r, settings.lin_tol, settings.lin_max_iter)?;
        lin_total += stats.iters;

        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(&d).map(|(ui, di)| ui + lambda * di).collect();
            let r_trial = residual(grid, &trial, p);
            let rt = max_norm(&r_trial);
            if rt < rnorm || rt <= settings.tol * residual_scale(&trial, p) {
                u = trial;
                r = r_trial;
                rnorm = rt;
                break;
            }
            lambda *= 0.5;
            if lambda < settings.backtrack_min {
                return Err(SolverError::NewtonStalled { iters: it + 1, residual: rnorm });
            }
        }

        if max_norm(&u) < ZERO_SOLUTION_FLOOR {
            return Err(SolverError::ConvergedToZero);
        }
    }

    if rnorm <= settings.tol * residual_scale(&u, p) {
        if max_norm(&u) < ZERO_SOLUTION_FLOOR {
            return Err(SolverError::ConvergedToZero);
        }
        let iters = settings.max_iter;
        let field = Field { grid: Arc::clone(&u0.grid), values: u };
        return Ok((field, NewtonInfo { iters, residual: rnorm, lin_iters: lin_total }));
    }
    Err(SolverError::NewtonStalled { iters: settings.max_iter, residual: rnorm })
}

/// Principal Dirichlet eigenpair of A by inverse power iteration.
pub fn principal_eigenpair(grid: &Arc<Grid>) -> Result<(f64, Field), SolverError> {
    let a = grid.matrix();
    let n = a.n;
    let no_shift = vec![0.0; n];
    let mut x = vec![1.0; n];
    let nrm = (x.iter().map(|v| v * v).sum::<f64>()).sqrt();
    for v in &mut x {
        *v /= nrm;
    }
    let mut lambda = 0.0;
    for _ in 0..200 {
        let y = if grid.is_symmetric() {
            linsolve::cg(a, &x, 1e-12, 20_000)?.0
        } else {
            linsolve::bicgstab(a, &no_shift, &x, 1e-12, 20_000)?.0
        };
        let ynrm = (y.iter().map(|v| v * v).sum::<f64>()).sqrt();
        // with ‖x‖₂ = 1 and y = A⁻¹x, the Rayleigh quotient is xᵀx/xᵀy
        let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        lambda = 1.0 / xy;
        x = y.iter().map(|v| v / ynrm).collect();

        let ax = a.matvec_alloc(&x);
        let res = ax
            .iter()
            .zip(&x)
            .fold(0.0f64, |m, (axi, xi)| m.max((axi - lambda * xi).abs()));
        if res < 1e-8 * lambda.abs() * max_norm(&x).max(1e-300) {
            let mut phi = x;
            // sign convention: the ground state is taken positive
            let (mut mx, mut mi) = (f64::MIN, f64::MAX);
            for v in &phi {
                mx = mx.max(*v);
                mi = mi.min(*v);
            }
            let flip = if mx.abs() >= mi.abs() { 1.0 } else { -1.0 };
            let sup = mx.abs().max(mi.abs());
            for v in &mut phi {
                *v *= flip / sup;
            }
            let field = Field { grid: Arc::clone(grid), values: phi };
            return Ok((lambda, field));
        }
    }
    let ax = a.matvec_alloc(&x);
    let res = ax
        .iter()
        .zip(&x)
        .fold(0.0f64, |m, (axi, xi)| m.max((axi - lambda * xi).abs()));
    Err(SolverError::EigSolveFailed { residual: res })
}

/// Starting iterate α·φ₁ with α = λ₁^{1/(p0−1)}: for small p0 the branch
/// bifurcates from the principal eigenfunction at exactly this amplitude.
pub fn initial_guess(grid: &Arc<Grid>, p0: f64) -> Result<Field, SolverError> {
    assert!(p0 > 1.0, "guess amplitude needs p0 > 1");
    let (lambda, phi) = principal_eigenpair(grid)?;
    let alpha = lambda.powf(1.0 / (p0 - 1.0));
    let values = phi.values.iter().map(|v| alpha * v).collect();
    Ok(Field { grid: Arc::clone(grid), values })
}

/// Sum of Liouville bubbles at amplitude √e, for seeding sharply peaked
/// solutions directly at large p.
///
/// Each requested center is snapped to the nearest unknown node first: at
/// large p the profile tip is narrower than a cell, and a tip sampled
/// between nodes evaluates to zero everywhere, which sends Newton straight
/// to the trivial solution. Snapping keeps the tip on a sampled point.
pub fn multi_bubble_guess(
    grid: &Arc<Grid>,
    centers: &[Point],
    p: f64,
) -> Result<Field, SolverError> {
    let mut snapped = Vec::with_capacity(centers.len());
    for c in centers {
        if !grid.spec.contains(*c) {
            return Err(SolverError::CenterOutside(c[0], c[1]));
        }
        snapped.push(grid.node_point(grid.nearest_unknown(*c)));
    }

    let m = SQRT_E;
    // ε = [p·m^{p−1}]^{−1/2} in logs; underflows to 0 near p ≈ 1400, at
    // which point only the snapped tip survives anyway
    let log_eps = -0.5 * (p.ln() + (p - 1.0) * 0.5);
    let mut values = vec![0.0; grid.n_unknowns()];
    for (idx, val) in values.iter_mut().enumerate() {
        let x = grid.node_point(idx);
        let mut s = 0.0;
        for c in &snapped {
            let d2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2);
            // U(z) = −2·log(1 + |z|²/8) with |z|² = d²/ε², via logs
            let u_val = if d2 == 0.0 {
                0.0
            } else {
                let x_log = d2.ln() - 8.0f64.ln() - 2.0 * log_eps;
                if x_log > 40.0 {
                    -2.0 * x_log
                } else {
                    -2.0 * f64::ln_1p(x_log.exp())
                }
            };
            s += (m * (1.0 + u_val / p)).max(0.0);
        }
        *val = s;
    }
    Ok(Field { grid: Arc::clone(grid), values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    Stalled,
}

#[derive(Debug, Clone, Copy)]
pub struct ContinuationSettings {
    pub dp0: f64,
    pub dp_max: f64,
    pub dp_floor: f64,
    pub newton: NewtonSettings,
}

impl Default for ContinuationSettings {
    fn default() -> Self {
        ContinuationSettings {
            dp0: 0.5,
            dp_max: 25.0,
            dp_floor: 1e-3,
            newton: NewtonSettings::default(),
        }
    }
}

pub struct ContinuationRun {
    pub status: RunStatus,
    /// Largest p at which a solution was accepted.
    pub p_final: f64,
    pub solution: Field,
    /// Solutions captured exactly at the requested report values of p.
    pub snapshots: Vec<(f64, Field, NewtonInfo)>,
    pub newton_iters_total: usize,
}

/// Follows the branch from a converged (or convergible) state at `p_start`
/// up to `p_end`, capturing snapshots at `targets`. The step doubles after
/// an easy solve (≤ 4 Newton iterations), halves on failure, and the run is
/// declared stalled once it is pinned at the floor twice in a row.
pub fn continue_in_p(
    u_start: &Field,
    p_start: f64,
    p_end: f64,
    targets: &[f64],
    settings: &ContinuationSettings,
) -> Result<ContinuationRun, SolverError> {
    assert!(p_end >= p_start);
    let mut wanted: Vec<f64> = targets
        .iter()
        .copied()
        .filter(|t| *t > p_start && *t <= p_end)
        .collect();
    wanted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    wanted.dedup();
    wanted.push(p_end);
    wanted.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let (mut u, info0) = newton_solve(u_start, p_start, &settings.newton)?;
    let mut total = info0.iters;
    let mut snapshots = Vec::new();
    if targets.iter().any(|t| (*t - p_start).abs() < 1e-12) {
        snapshots.push((p_start, u.clone(), info0));
    }

    let mut p = p_start;
    let mut dp = settings.dp0;
    let mut floored_twice = 0u32;

    while p < p_end - 1e-12 {
        let next_target = wanted
            .iter()
            .copied()
            .find(|t| *t > p + 1e-12)
            .unwrap_or(p_end);
        let p_try = (p + dp).min(next_target);

        match newton_solve(&u, p_try, &settings.newton) {
            Ok((u_new, info)) => {
                total += info.iters;
                u = u_new;
                p = p_try;
                floored_twice = 0;
                if wanted.iter().any(|t| (*t - p).abs() < 1e-12)
                    && targets.iter().any(|t| (*t - p).abs() < 1e-12)
                {
                    snapshots.push((p, u.clone(), info));
                }
                if info.iters <= 4 {
                    dp = (dp * 2.0).min(settings.dp_max);
                }
            }
            Err(SolverError::LinSolve(e)) => {
                log::debug!("linear solve failed at p = {p_try}: {e}");
                dp *= 0.5;
                if dp < settings.dp_floor {
                    dp = settings.dp_floor;
                    floored_twice += 1;
                    if floored_twice >= 2 {
                        return Ok(ContinuationRun {
                            status: RunStatus::Stalled,
                            p_final: p,
                            solution: u,
                            snapshots,
                            newton_iters_total: total,
                        });
                    }
                }
            }
            Err(SolverError::NewtonStalled { .. }) | Err(SolverError::ConvergedToZero) => {
                dp *= 0.5;
                if dp < settings.dp_floor {
                    dp = settings.dp_floor;
                    floored_twice += 1;
                    if floored_twice >= 2 {
                        return Ok(ContinuationRun {
                            status: RunStatus::Stalled,
                            p_final: p,
                            solution: u,
                            snapshots,
                            newton_iters_total: total,
                        });
                    }
                }
            }
            Err(e) => return Err(e),
        }
    }

    Ok(ContinuationRun {
        status: RunStatus::Completed,
        p_final: p,
        solution: u,
        snapshots,
        newton_iters_total: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::BESSEL_J0_ZERO;
    use crate::domain::DomainSpec;
    use crate::grid::build_grid;
    use crate::radial;

    fn disk_grid(n: u32) -> Arc<Grid> {
        Arc::new(build_grid(&DomainSpec::unit_disk(), 2.0 / n as f64).unwrap())
    }

    #[test]
    fn eigenpair_matches_bessel() {
        let grid = disk_grid(64);
        let (lambda, phi) = principal_eigenpair(&grid).unwrap();
        let j0sq = BESSEL_J0_ZERO * BESSEL_J0_ZERO;
        assert!((lambda - j0sq).abs() / j0sq < 5e-3, "λ1 = {lambda}");
        assert!(phi.values.iter().all(|v| *v > -1e-12));
        assert!((phi.max_value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn newton_converges_on_rectangle() {
        let spec = DomainSpec::Rectangle { corner_min: [0.0, 0.0], corner_max: [1.0, 1.0] };
        let grid = Arc::new(build_grid(&spec, 1.0 / 40.0).unwrap());
        let u0 = initial_guess(&grid, 3.0).unwrap();
        let (u, info) = newton_solve(&u0, 3.0, &NewtonSettings::default()).unwrap();
        assert!(info.iters <= 12);
        assert!(u.min_value() >= 0.0);
        // symmetry of the square solution
        let a = u.interp([0.3, 0.5]);
        let b = u.interp([0.7, 0.5]);
        let c = u.interp([0.5, 0.3]);
        assert!((a - b).abs() < 1e-9 && (a - c).abs() < 1e-9);
    }

    #[test]
    fn continuation_tracks_radial_oracle() {
        let grid = disk_grid(64);
        let u0 = initial_guess(&grid, 2.0).unwrap();
        let run = continue_in_p(&u0, 2.0, 5.0, &[5.0], &ContinuationSettings::default()).unwrap();
        assert_eq!(run.status, RunStatus::Completed);
        assert_eq!(run.snapshots.len(), 1);
        let (m_exact, _) = radial::disk_quantities(5.0).unwrap();
        let m_grid = run.solution.max_value();
        assert!((m_grid - m_exact).abs() < 0.02, "M = {m_grid} vs {m_exact}");
    }

    #[test]
    fn tiny_start_collapses_to_zero() {
        let grid = disk_grid(32);
        let mut u0 = initial_guess(&grid, 3.0).unwrap();
        for v in &mut u0.values {
            *v *= 1e-3;
        }
        match newton_solve(&u0, 3.0, &NewtonSettings::default()) {
            Err(SolverError::ConvergedToZero) => {}
            other => panic!("expected collapse to zero, got {:?}", other.map(|(_, i)| i)),
        }
    }

    #[test]
    fn bubble_guess_snaps_to_grid() {
        let grid = disk_grid(64);
        // requested center deliberately off-lattice
        let req = [0.301, 0.0021];
        let guess = multi_bubble_guess(&grid, &[req], 60.0).unwrap();
        let peak = guess.argmax();
        let snapped = grid.nearest_unknown(req);
        assert_eq!(peak, snapped);
        assert!((guess.max_value() - SQRT_E).abs() < 0.02);
        assert!(guess.min_value() >= 0.0);
    }

    #[test]
    fn bubble_center_outside_rejected() {
        let grid = disk_grid(32);
        match multi_bubble_guess(&grid, &[[1.2, 0.0]], 50.0) {
            Err(SolverError::CenterOutside(_, _)) => {}
            _ => panic!("expected CenterOutside"),
        }
    }

    #[test]
    fn coarse_grid_cannot_hold_the_peak() {
        // at h = 1/16 the peak width passes below the mesh around p ≈ 7;
        // past that point continuation either stalls or slides onto the
        // mesh-pinned branch, whose amplitude sits far below √e
        let grid = disk_grid(32);
        let u0 = initial_guess(&grid, 2.0).unwrap();
        let settings = ContinuationSettings {
            dp0: 0.5,
            dp_max: 8.0,
            ..ContinuationSettings::default()
        };
        let run = continue_in_p(&u0, 2.0, 100.0, &[], &settings).unwrap();
        let m = run.solution.max_value();
        match run.status {
            RunStatus::Stalled => {
                assert!(run.p_final < 20.0, "stall should come early, got p = {}", run.p_final);
            }
            RunStatus::Completed => {
                assert!(
                    (m - SQRT_E).abs() > 0.3,
                    "a coarse grid must not reproduce the √e plateau, got M = {m}"
                );
            }
        }
        assert!(m > 0.5);
    }
}
