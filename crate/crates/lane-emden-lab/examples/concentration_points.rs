//! Where can peaks sit? Solves the stationarity system
//!
//!     m_i ∇₁H(x_i, x_i) + Σ_{l≠i} m_l ∇₁G(x_i, x_l) = 0
//!
//! on three domains, with equal masses √e.

use lane_emden_lab::concentration::{solve_system, system_residual, SearchSettings};
use lane_emden_lab::constants::SQRT_E;
use lane_emden_lab::green::GreenFn;
use lane_emden_lab::DomainSpec;

fn main() {
    let settings = SearchSettings::default();

    let disk = DomainSpec::unit_disk();
    let g = GreenFn::for_domain(&disk);
    println!("unit disk, k = 1:");
    for c in solve_system(&g, 1, 7, &settings).expect("center exists") {
        println!("  point ({:+.2e}, {:+.2e})  residual {:.1e}", c.points[0][0], c.points[0][1], c.residual);
    }

    println!();
    println!("unit disk, k = 2:");
    match solve_system(&g, 2, 7, &settings) {
        Ok(cs) => println!("  unexpectedly found {} configurations", cs.len()),
        Err(e) => println!("  {e}"),
    }
    // why: along the symmetric family (a,0),(-a,0) the radial residual
    // component never vanishes
    println!("  radial residual along the antipodal family (never zero):");
    for a in [0.2, 0.4, 0.6, 0.8] {
        let r = system_residual(&g, &[[a, 0.0], [-a, 0.0]], &[SQRT_E, SQRT_E]).unwrap();
        println!("    a = {a:.1}: r_x = {:+.6}", r[0][0]);
    }

    let annulus = DomainSpec::Annulus { center: [0.0, 0.0], r_inner: 0.3, r_outer: 1.0 };
    let ga = GreenFn::for_domain(&annulus);
    println!();
    println!("annulus (0.3, 1.0), k = 2:");
    for c in solve_system(&ga, 2, 7, &settings).expect("antipodal pair exists") {
        let rho0 = (c.points[0][0].powi(2) + c.points[0][1].powi(2)).sqrt();
        let rho1 = (c.points[1][0].powi(2) + c.points[1][1].powi(2)).sqrt();
        println!(
            "  radii {:.8}, {:.8}  residual {:.1e}",
            rho0, rho1, c.residual
        );
    }

    let square = DomainSpec::Rectangle { corner_min: [0.0, 0.0], corner_max: [1.0, 1.0] };
    let gs = GreenFn::for_domain(&square);
    println!();
    println!("unit square, k = 1:");
    for c in solve_system(&gs, 1, 7, &settings).expect("center exists") {
        println!("  point ({:.8}, {:.8})  residual {:.1e}", c.points[0][0], c.points[0][1], c.residual);
    }
}
