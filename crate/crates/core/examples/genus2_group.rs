//! Build the genus-two deck group from the regular octagon and inspect it.

use num_complex::Complex64;
use vcontact::hyperbolic::{enumerate_words, genus2_generators, hyperbolic_distance, DiskPoint};

fn main() -> vcontact::Result<()> {
    let group = genus2_generators()?;
    let oct = group.octagon().expect("genus-two group carries its octagon");
    println!("octagon vertex radius {:.6}", oct.vertices[0].norm());
    println!("surface relation residual {:.2e}", group.relation_residual());
    for depth in 0..=3 {
        println!("words of length <= {depth}: {}", enumerate_words(&group, depth).len());
    }

    let p = DiskPoint::from_xy(0.1, 0.2)?;
    let q = DiskPoint::from_xy(-0.3, 0.05)?;
    let g = group.generators()[0];
    println!(
        "d(p, q) = {:.12}, d(gp, gq) = {:.12}",
        hyperbolic_distance(p, q),
        hyperbolic_distance(g.apply_point(p), g.apply_point(q))
    );

    let z = Complex64::new(0.93, -0.2);
    if let Some((h, w)) = group.reduce(z, 200) {
        println!("{z} reduces to {w:.6} (in domain: {}), |h(0)| = {:.6}", group.in_fundamental_domain(w), h.apply(Complex64::new(0.0, 0.0)).norm());
    }
    Ok(())
}
