//! The Green function backends side by side: the disk closed form, the
//! rectangle image series, and the method-of-fundamental-solutions fallback
//! that covers every other domain.

use lane_emden_lab::green::GreenFn;
use lane_emden_lab::DomainSpec;

fn main() {
    let disk = DomainSpec::unit_disk();
    let exact = GreenFn::for_domain(&disk);
    let mfs = GreenFn::collocation(&disk, 192);

    println!("unit disk: closed form vs collocation (192 charges)");
    println!("{:>8} {:>14} {:>14} {:>12}", "x", "G exact", "G mfs", "diff");
    let y = [0.4, 0.1];
    for t in [-0.6, -0.2, 0.0, 0.3, 0.7] {
        let x = [t, -0.25];
        let ge = exact.green(x, y).unwrap();
        let gm = mfs.green(x, y).unwrap();
        println!("{:>8.2} {:>14.10} {:>14.10} {:>12.2e}", t, ge, gm, (ge - gm).abs());
    }
    println!("collocation boundary misfit: {:.2e}", mfs.fit_residual(y).unwrap());

    println!();
    println!("Robin function h(x) = H(x,x) along a disk radius");
    println!("{:>8} {:>14} {:>14} {:>14}", "|x|", "robin", "grad (exact)", "grad (mfs)");
    for a in [0.0, 0.2, 0.4, 0.6, 0.8] {
        let x = [a, 0.0];
        let r = exact.robin(x).unwrap();
        let ge = exact.grad_robin(x).unwrap();
        let gm = mfs.grad_robin(x).unwrap();
        println!("{:>8.2} {:>14.10} {:>14.10} {:>14.10}", a, r, ge[0], gm[0]);
    }

    let rect = DomainSpec::Rectangle { corner_min: [0.0, 0.0], corner_max: [2.0, 1.0] };
    let series = GreenFn::for_domain(&rect);
    println!();
    println!("2x1 rectangle, image series:");
    let c = [1.0, 0.5];
    println!("  robin at center       = {:.10}", series.robin(c).unwrap());
    let g = series.grad_robin(c).unwrap();
    println!("  grad robin at center  = [{:.2e}, {:.2e}]  (critical point)", g[0], g[1]);
    // G vanishes on the walls
    let gb = series.green([1.0, 1e-12], c).unwrap();
    println!("  G just off the bottom wall = {gb:.2e}");
}
