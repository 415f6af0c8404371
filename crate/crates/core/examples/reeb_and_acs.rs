//! Reeb vector, compatible complex structure and cylinder data of the twisted
//! form at a few points.

use vcontact::forms::{compatible_acs, contact_volume, cylinder_acs, ContactFrame, CoverPoint, ProductMetric};
use vcontact::hyperbolic::genus2_generators;
use vcontact::lutz::{lutz_form, LutzData};

fn main() -> vcontact::Result<()> {
    let group = genus2_generators()?;
    let lam = lutz_form(&LutzData::defaults(), &group, 3)?;
    for (t, x, y) in [(0.0, 0.0, 0.0), (0.2, 0.15, 0.0), (0.5, 0.1, -0.2), (0.7, 0.5, 0.3)] {
        let p = CoverPoint::from_txy(t, x, y)?;
        let frame = ContactFrame::at(&lam, &ProductMetric, &p)?;
        let j = compatible_acs(&frame)?;
        let jt = cylinder_acs(&frame, &j);
        println!(
            "p = ({t}, {x}, {y}): vol {:+.4e}, Reeb ({:+.4}, {:+.4}, {:+.4}), |J²+1| {:.1e}, |J̃²+1| {:.1e}",
            contact_volume(&lam, &p),
            frame.reeb[0],
            frame.reeb[1],
            frame.reeb[2],
            j.square_defect(),
            (jt * jt + nalgebra::Matrix4::identity()).abs().max()
        );
    }
    Ok(())
}
