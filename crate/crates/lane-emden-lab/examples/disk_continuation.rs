//! Follows the positive branch on the unit disk from p = 2 toward p = 100 by
//! exponent continuation and prints what the grid sees at the stations it
//! reaches, next to the radial oracle.
//!
//! On a fixed grid the branch cannot keep sharpening forever: once the
//! concentration scale ε approaches the mesh width the discrete solutions
//! stop following the continuum family and continuation grinds to a halt.
//! The run below reports that stall honestly instead of pretending the
//! stations past it exist.

use std::sync::Arc;

use lane_emden_lab::diagnostics::energy_check;
use lane_emden_lab::grid::build_grid;
use lane_emden_lab::radial;
use lane_emden_lab::solver::{continue_in_p, initial_guess, ContinuationSettings};
use lane_emden_lab::DomainSpec;

fn main() {
    let h = 2.0 / 128.0;
    let grid = Arc::new(build_grid(&DomainSpec::unit_disk(), h).expect("grid"));
    println!("unit disk, h = {h}, {} unknowns", grid.n_unknowns());

    let p0 = 2.0;
    let u0 = initial_guess(&grid, p0).expect("principal eigenpair");
    let reports = [5.0, 10.0, 25.0, 50.0, 100.0];
    let run = continue_in_p(&u0, p0, 100.0, &reports, &ContinuationSettings::default())
        .expect("continuation");

    println!("status {:?} at p = {}, {} Newton iterations total", run.status, run.p_final, run.newton_iters_total);
    println!();
    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>12} {:>8}",
        "p", "M_grid", "M_oracle", "E_grid", "E_oracle", "newton"
    );
    for (p, field, info) in &run.snapshots {
        let (m_oracle, e_oracle) = radial::disk_quantities(*p).expect("oracle");
        let ec = energy_check(field, *p, 1);
        println!(
            "{:>6.0} {:>12.6} {:>12.6} {:>12.4} {:>12.4} {:>8}",
            p,
            field.max_norm(),
            m_oracle,
            ec.e,
            e_oracle,
            info.iters
        );
    }

    println!();
    let eps_stop = radial::shoot(run.p_final, 1e-10).unwrap().eps;
    println!(
        "stopped with ε({:.2}) = {:.2e} vs h = {:.2e}: the peak width has reached",
        run.p_final, eps_stop, h
    );
    println!("the mesh scale, and past this point the grid has no continuum branch to follow.");
}
