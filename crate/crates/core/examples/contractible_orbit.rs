//! Newton search for the contractible periodic orbit of the Reeb-like field
//! and the non-contractible `t`-circles of the untwisted field.

use vcontact::dynamics::{expected_period, find_periodic_orbit, ConstantField, OrbitSearch, Section};
use vcontact::forms::{CoverPoint, VectorValue};
use vcontact::hyperbolic::genus2_generators;
use vcontact::lutz::{lutz_form, smooth_profiles, LutzData, LutzStructure};
use std::sync::Arc;

fn main() -> vcontact::Result<()> {
    let data = LutzData::defaults();
    let group = genus2_generators()?;
    let field = lutz_form(&data, &group, 3)?;
    let seed = CoverPoint::from_txy(0.0, 0.16, 0.0)?;
    let (rec, tr) = find_periodic_orbit(&field, Section::TubeAngle { winding: 0 }, &seed, OrbitSearch::default())?;
    println!(
        "twisted: radius {:.9}, period {:.9} (closed form {:.9}), closure {:.1e}, winding {}, contractible {}, {} steps",
        rec.seed[1].hypot(rec.seed[2]),
        rec.period,
        expected_period(data.delta, data.eps),
        rec.closure_residual,
        rec.t_winding,
        rec.contractible,
        tr.accepted
    );

    let smoothed = LutzStructure::new(Arc::new(smooth_profiles(&data, 32)?), Arc::new(group), 3)?;
    let (rec, _) = find_periodic_orbit(&smoothed, Section::TubeAngle { winding: 0 }, &seed, OrbitSearch::default())?;
    println!("smoothed n = 32: period {:.9}, contractible {}", rec.period, rec.contractible);

    let untwisted = ConstantField(VectorValue::x());
    let (rec, _) = find_periodic_orbit(&untwisted, Section::TimeSlice { t0: 0.0 }, &seed, OrbitSearch::default())?;
    println!("untwisted: period {:.9}, winding {}, contractible {}", rec.period, rec.t_winding, rec.contractible);
    Ok(())
}
