//! Upper bounds for the Mañé critical value of the hyperbolic magnetic
//! system and the two dynamical regimes on either side of ½.

use vcontact::magnetic::{first_return, magnetic_flow, mane_upper_bound, MagneticSystem};

fn main() -> vcontact::Result<()> {
    let sys = MagneticSystem::hyperbolic();
    for r in [0.5, 0.9, 0.99, 0.999] {
        println!("r_max = {r:<6} bound {:.7}", mane_upper_bound(&sys, r, 256)?);
    }
    for k in [0.1, 0.3, 0.45] {
        let p = sys.momentum_for_energy([0.0, 0.0], [1.0, 0.0], k)?;
        match first_return(&sys, [0.0, 0.0, p[0], p[1]], 50.0, 1e-10)? {
            Some(c) => println!("k = {k}: closed orbit, period {:.6}, residual {:.1e}", c.period, c.residual),
            None => println!("k = {k}: no return before T = 50"),
        }
    }
    let p = sys.momentum_for_energy([0.0, 0.0], [1.0, 0.0], 1.0)?;
    for t in [1.0, 2.5, 5.0] {
        let tr = magnetic_flow(&sys, [0.0, 0.0, p[0], p[1]], t, 1e-10)?;
        println!(
            "k = 1, T = {t}: displacement {:.4}, energy drift {:.1e}",
            tr.max_displacement(),
            tr.energy_drift()
        );
    }
    Ok(())
}
