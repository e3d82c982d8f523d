//! The Liouville bubble U(z) = -2 log(1 + |z|²/8) in closed form: profile
//! values, mass, and log-moment against their exact limits.

use lane_emden_lab::constants::{EIGHT_PI, TWELVE_PI_LN2};
use lane_emden_lab::liouville;

fn main() {
    println!("bubble profile and density");
    println!("{:>8} {:>14} {:>14}", "|z|", "U", "e^U");
    for s in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
        println!("{:>8.2} {:>14.8} {:>14.3e}", s, liouville::eval_u_radial(s), liouville::density(s));
    }

    println!();
    println!("mass and log-moment inside |z| <= r");
    println!("{:>10} {:>16} {:>16}", "r", "mass", "log-moment");
    for r in [1.0, 4.0, 16.0, 64.0, 256.0, 1024.0] {
        let m = liouville::mass_integrals(r);
        println!("{:>10.1} {:>16.10} {:>16.10}", r, m.mass, m.log_moment);
    }

    let far = liouville::mass_integrals(1e8);
    println!();
    println!("totals at r = 1e8:");
    println!("  mass       = {:.12}   (8π       = {:.12})", far.mass, EIGHT_PI);
    println!("  log-moment = {:.12}   (12π·ln 2 = {:.12})", far.log_moment, TWELVE_PI_LN2);
    println!("  mass defect       {:.3e}", (far.mass - EIGHT_PI).abs());
    println!("  log-moment defect {:.3e}", (far.log_moment - TWELVE_PI_LN2).abs());
}
