//! Second-order convergence of the grid solver against the radial oracle at
//! p = 10: halving h should cut the sup-norm error by about 4.

use std::sync::Arc;

use lane_emden_lab::grid::build_grid;
use lane_emden_lab::radial;
use lane_emden_lab::solver::{continue_in_p, initial_guess, ContinuationSettings};
use lane_emden_lab::DomainSpec;

fn main() {
    let p = 10.0;
    let sol = radial::shoot(p, 1e-12).expect("oracle");
    println!("oracle: M({p}) = {:.12}", sol.m);
    println!();
    println!("{:>12} {:>10} {:>14} {:>8}", "h", "unknowns", "sup error", "ratio");

    let mut last_err: Option<f64> = None;
    for n in [64, 128, 256] {
        let h = 2.0 / n as f64;
        let grid = Arc::new(build_grid(&DomainSpec::unit_disk(), h).expect("grid"));
        let u0 = initial_guess(&grid, 2.0).expect("eigen start");
        let run = continue_in_p(&u0, 2.0, p, &[p], &ContinuationSettings::default())
            .expect("continuation");
        let field = &run.solution;

        let mut err: f64 = 0.0;
        for q in 0..grid.n_unknowns() {
            let x = grid.node_point(q);
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            err = err.max((field.values[q] - sol.u(r)).abs());
        }

        match last_err {
            Some(prev) => println!("{:>12.6} {:>10} {:>14.4e} {:>8.2}", h, grid.n_unknowns(), err, prev / err),
            None => println!("{:>12.6} {:>10} {:>14.4e} {:>8}", h, grid.n_unknowns(), err, "-"),
        }
        last_err = Some(err);
    }
    println!("\nthe first ratio is inflated: eps(10) ~ 0.02 sits below the coarsest h,");
    println!("so that grid is pre-asymptotic; the finer pair shows the O(h^2) factor of 4");
}
