//! Characteristic foliation of the overtwisted disk `t = εr²`, `r ≤ r*`, and
//! of a flat disk for comparison.

use vcontact::hyperbolic::genus2_generators;
use vcontact::lutz::{lutz_form, LutzData};
use vcontact::verifier::{characteristic_foliation, DiskSurface};

fn main() -> vcontact::Result<()> {
    let data = LutzData::defaults();
    let group = genus2_generators()?;
    let lam = lutz_form(&data, &group, 3)?;
    for (name, surface) in [
        ("overtwisted", DiskSurface::overtwisted(&data)),
        ("flat", DiskSurface::flat(data.delta / 2.0)),
    ] {
        let rep = characteristic_foliation(&surface, &lam, 64)?;
        println!("{name}: boundary radius {:.6}", rep.boundary_radius);
        for sp in &rep.singular_points {
            println!(
                "  singular point ({:+.2e}, {:+.2e}) {} eigenvalues {:.4} and {:.4}",
                sp.u,
                sp.v,
                sp.kind.name(),
                sp.eigenvalues[0],
                sp.eigenvalues[1]
            );
        }
        println!(
            "  boundary residual {:.2e}, max |λ(v)| {:.1e}, {} leaves, overtwisted disk: {}",
            rep.boundary_legendrian_residual,
            rep.max_lambda_residual,
            rep.leaves.len(),
            rep.is_overtwisted_disk()
        );
    }
    Ok(())
}
