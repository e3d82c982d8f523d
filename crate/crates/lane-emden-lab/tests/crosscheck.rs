//! Agreement checks between independent computational routes: the 2-D grid
//! pipeline against the radial shooting solver, the two ways of starting a
//! branch, and randomized identities the Green functions must satisfy.

use std::sync::{Arc, OnceLock};

use approx::assert_relative_eq;
use proptest::prelude::*;

use lane_emden_lab::diagnostics::{decomposition_check, detect_peaks, energy_check};
use lane_emden_lab::domain::DomainSpec;
use lane_emden_lab::field::Field;
use lane_emden_lab::green::GreenFn;
use lane_emden_lab::grid::{build_grid, Grid};
use lane_emden_lab::radial::{radial_decomposition, shoot};
use lane_emden_lab::solver::{
    continue_in_p, initial_guess, multi_bubble_guess, newton_solve, ContinuationSettings,
    NewtonSettings, RunStatus,
};

/// Disk solution at p = 5 on h = 2/128, continued from the eigenfunction
/// start; ε(5) spans five mesh cells, so everything here is resolved.
fn disk_p5() -> &'static (Arc<Grid>, Field) {
    static SOL: OnceLock<(Arc<Grid>, Field)> = OnceLock::new();
    SOL.get_or_init(|| {
        let grid = Arc::new(build_grid(&DomainSpec::unit_disk(), 2.0 / 128.0).expect("grid"));
        let u0 = initial_guess(&grid, 2.0).expect("eigen start");
        let run = continue_in_p(&u0, 2.0, 5.0, &[5.0], &ContinuationSettings::default())
            .expect("continuation");
        assert_eq!(run.status, RunStatus::Completed);
        let (_, u, _) = run.snapshots.into_iter().next_back().expect("snapshot");
        (grid, u)
    })
}

#[test]
fn grid_decomposition_matches_radial() {
    let p = 5.0;
    let (_, u) = disk_p5();
    let g = GreenFn::for_domain(&DomainSpec::unit_disk());
    let peaks = detect_peaks(u, p, 1.0, 0.15).expect("peaks");
    let dc = decomposition_check(u, p, &peaks, 0, &g, 0.25).expect("grid decomposition");

    let sol = shoot(p, 1e-12).expect("radial");
    let rd = radial_decomposition(&sol, 0.25);

    // the grid route integrates the solved field against the collocation
    // Green function; the radial route integrates the shot profile against
    // the closed form, so agreement exercises every layer at once
    assert_relative_eq!(dc.height, sol.m, max_relative = 2e-3);
    assert_relative_eq!(dc.b, rd.b, max_relative = 0.03);
    assert_relative_eq!(dc.c, rd.c, max_relative = 0.01);
    assert_relative_eq!(dc.mass, rd.mass, max_relative = 0.01);
    assert_relative_eq!(dc.tail, rd.tail, max_relative = 0.04);
    assert_relative_eq!(dc.m_est, rd.m_est, max_relative = 0.01);

    // |A| has no scale of its own on the disk (it vanishes in the limit of
    // exact centering), so it is compared against the peak height
    assert!(dc.a.abs() < 1e-3 * dc.height);
    assert!(rd.a.abs() < 1e-15);

    // the radial identity closes to quadrature accuracy, the grid identity
    // to discretization accuracy
    assert!(rd.identity_gap < 1e-11);
    assert!(dc.identity_gap < 5e-3);
}

#[test]
fn bubble_and_eigen_routes_agree() {
    let p = 5.0;
    let (grid, u_eigen) = disk_p5();

    let center = grid.node_point(grid.nearest_unknown([0.0, 0.0]));
    let guess = multi_bubble_guess(grid, &[center], p).expect("bubble guess");
    let (u_bubble, _) = newton_solve(&guess, p, &NewtonSettings::default()).expect("newton");

    let sup = u_eigen
        .values
        .iter()
        .zip(&u_bubble.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max)
        ;
    assert!(sup < 1e-9, "routes disagree: sup diff {sup:.3e}");

    let ee = energy_check(u_eigen, p, 1);
    let eb = energy_check(&u_bubble, p, 1);
    assert_relative_eq!(ee.e, eb.e, max_relative = 1e-10);
    assert!(ee.cross_rel < 1e-8);
    assert!(ee.sbp_gap < 1e-10 * ee.e);
}

#[test]
fn two_peak_branch_is_symmetric() {
    let spec = DomainSpec::Annulus { center: [0.0, 0.0], r_inner: 0.3, r_outer: 1.0 };
    let h = 2.0 / 128.0;
    let grid = Arc::new(build_grid(&spec, h).expect("grid"));
    let rho = 0.63;
    let guess = multi_bubble_guess(&grid, &[[rho, 0.0], [-rho, 0.0]], 50.0).expect("guess");
    let mut settings = ContinuationSettings::default();
    settings.newton.max_iter = 250;
    let run = continue_in_p(&guess, 50.0, 100.0, &[100.0], &settings).expect("continuation");
    assert_eq!(run.status, RunStatus::Completed);
    let (p, u, _) = run.snapshots.into_iter().next_back().expect("snapshot");

    let peaks = detect_peaks(&u, p, 0.5, 0.3).expect("peaks");
    assert_eq!(peaks.k(), 2);
    let a = &peaks.peaks[0];
    let b = &peaks.peaks[1];

    // the configuration is antipodal: equal heights, opposite locations
    assert_relative_eq!(a.height, b.height, max_relative = 1e-6);
    assert!((a.location[0] + b.location[0]).abs() < 1e-4);
    assert!((a.location[1] + b.location[1]).abs() < 1e-4);
    let ra = (a.location[0].powi(2) + a.location[1].powi(2)).sqrt();
    let rb = (b.location[0].powi(2) + b.location[1].powi(2)).sqrt();
    assert!((ra - rb).abs() < 1e-6);
    assert!((ra - rho).abs() < 3.0 * h);

    // both peaks carry the same share of the energy
    let ec = energy_check(&u, p, 2);
    assert!(ec.cross_rel < 1e-8);
    assert!(ec.sbp_gap < 1e-10 * ec.e);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// The disk Green function is symmetric and positive at separated
    /// interior pairs, and its regular part is symmetric too.
    #[test]
    fn disk_green_symmetry(
        x0 in -0.7f64..0.7, x1 in -0.7f64..0.7,
        y0 in -0.7f64..0.7, y1 in -0.7f64..0.7,
    ) {
        let x = [x0, x1];
        let y = [y0, y1];
        prop_assume!(x0.hypot(x1) < 0.85 && y0.hypot(y1) < 0.85);
        prop_assume!(((x0 - y0).powi(2) + (x1 - y1).powi(2)).sqrt() > 0.05);

        let g = GreenFn::for_domain(&DomainSpec::unit_disk());
        let gxy = g.green(x, y).unwrap();
        let gyx = g.green(y, x).unwrap();
        prop_assert!(gxy > 0.0);
        prop_assert!((gxy - gyx).abs() <= 1e-12 * gxy.abs().max(1.0));

        let hxy = g.regular_part(x, y).unwrap();
        let hyx = g.regular_part(y, x).unwrap();
        prop_assert!((hxy - hyx).abs() <= 1e-10);
    }

    /// Bilinear interpolation reproduces affine functions exactly wherever
    /// the stencil stays interior.
    #[test]
    fn interp_is_exact_on_affine_fields(
        a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0,
        px in -0.6f64..0.6, py in -0.6f64..0.6,
    ) {
        prop_assume!(px.hypot(py) < 0.6);
        static GRID: OnceLock<Arc<Grid>> = OnceLock::new();
        let grid = GRID.get_or_init(|| {
            Arc::new(build_grid(&DomainSpec::unit_disk(), 2.0 / 32.0).expect("grid"))
        });
        let f = Field::from_fn(Arc::clone(grid), |q| a + b * q[0] + c * q[1]);
        let exact = a + b * px + c * py;
        let scale = 1.0 + exact.abs();
        prop_assert!((f.interp([px, py]) - exact).abs() <= 1e-12 * scale);
    }
}
