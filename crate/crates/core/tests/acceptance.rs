//! Acceptance suite. Runs every criterion in sequence, prints one PASS/FAIL
//! line each and exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::{Matrix4, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vcontact::cli::{cmd_foliate, cmd_mane, cmd_orbits, cmd_verify, RunConfig};
use vcontact::dynamics::{expected_period, find_periodic_orbit, OrbitSearch, Section};
use vcontact::forms::{
    compatible_acs, cr_residual, cylinder_acs, cylinder_metric, energy_density, hofer_select, metric_inner,
    push_forward, ContactFrame, CoverPoint, Jet, MetricField, ProductMetric, Pullback,
};
use vcontact::hyperbolic::{enumerate_words, genus2_generators, hyperbolic_distance, DiskPoint};
use vcontact::lutz::{base_alpha, case_minima, lutz_form, smooth_profiles, LutzData, LutzStructure, Region};
use vcontact::magnetic::{first_return, magnetic_flow, mane_upper_bound, MagneticSystem};
use vcontact::verifier::{characteristic_foliation, orbit_infimum, DiskSurface, SamplingGrid};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_disk_point(rng: &mut ChaCha8Rng, r_max: f64) -> Complex64 {
    let r = r_max * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

fn criterion_1() -> Outcome {
    let group = genus2_generators().map_err(|e| e.to_string())?;
    let residual = group.relation_residual();
    check(residual < 1e-9, || format!("relation residual {residual:e}"))?;
    let words = enumerate_words(&group, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let g = &words[rng.gen_range(0..words.len())].isometry;
        let p = random_disk_point(&mut rng, 0.6);
        let q = random_disk_point(&mut rng, 0.6);
        let d0 = hyperbolic_distance(DiskPoint::new(p).unwrap(), DiskPoint::new(q).unwrap());
        let d1 = hyperbolic_distance(g.apply_point(DiskPoint::new(p).unwrap()), g.apply_point(DiskPoint::new(q).unwrap()));
        worst = worst.max((d1 - d0).abs());
    }
    check(worst < 1e-10, || format!("distance defect {worst:e}"))?;
    Ok(format!("relation residual {residual:.1e}, distance defect {worst:.1e}"))
}

fn criterion_2() -> Outcome {
    let data = LutzData::defaults();
    let minima = case_minima(&data, 10_000);
    let expected = [
        (Region::CaseI, 0.02625),
        (Region::CaseII, 11.3137085),
        (Region::CaseIII, 9.4280904),
    ];
    let mut parts = Vec::new();
    for (region, stated) in expected {
        let m = minima
            .iter()
            .find(|m| m.region == region)
            .ok_or_else(|| format!("no minimum for {}", region.name()))?;
        check((m.bound - stated).abs() < 5e-8, || {
            format!("{} bound {} differs from {stated}", region.name(), m.bound)
        })?;
        check(m.value >= m.bound, || {
            format!("{} minimum {} below bound {}", region.name(), m.value, m.bound)
        })?;
        parts.push(format!("{} {:.7} >= {:.7}", region.name(), m.value, m.bound));
    }
    Ok(parts.join(", "))
}

fn criterion_3() -> Outcome {
    let group = genus2_generators().map_err(|e| e.to_string())?;
    let s = lutz_form(&LutzData::defaults(), &group, 3).map_err(|e| e.to_string())?;
    let inf = orbit_infimum(&s, SamplingGrid::new(200, 200, 16)).map_err(|e| e.to_string())?;
    check(inf.value > 0.0, || format!("infimum {} not positive", inf.value))?;
    check(inf.value >= inf.analytic_bound - 1e-6, || {
        format!("infimum {} below bound {}", inf.value, inf.analytic_bound)
    })?;
    for r in &inf.regions {
        check(r.sampled_min >= r.bound - 1e-6, || {
            format!("{}: {} below {}", r.region.name(), r.sampled_min, r.bound)
        })?;
    }
    check(inf.outside_deviation <= 4.0 * f64::EPSILON, || {
        format!("outside deviation {:e}", inf.outside_deviation)
    })?;
    check(inf.cross_check < 1e-9, || format!("route mismatch {:e}", inf.cross_check))?;
    Ok(format!(
        "inf {:.9} (bound {:.9}) over {} words, outside deviation {:.1e}",
        inf.value, inf.analytic_bound, inf.words, inf.outside_deviation
    ))
}

fn criterion_4() -> Outcome {
    let data = LutzData::defaults();
    let group = genus2_generators().map_err(|e| e.to_string())?;
    let s = lutz_form(&data, &group, 3).map_err(|e| e.to_string())?;
    let rep = characteristic_foliation(&DiskSurface::overtwisted(&data), &s, 64).map_err(|e| e.to_string())?;
    check(rep.singular_points.len() == 1, || {
        format!("{} singular points", rep.singular_points.len())
    })?;
    let kind = rep.singular_points[0].kind.name();
    check(kind == "elliptic", || format!("singular point is {kind}"))?;
    check(rep.boundary_legendrian_residual < 1e-9, || {
        format!("boundary residual {:e}", rep.boundary_legendrian_residual)
    })?;
    let flat = characteristic_foliation(&DiskSurface::flat(data.delta / 2.0), &s, 64).map_err(|e| e.to_string())?;
    check(!flat.is_overtwisted_disk(), || "flat control passed".into())?;
    Ok(format!(
        "1 elliptic point, boundary residual {:.1e}, flat control residual {:.3}",
        rep.boundary_legendrian_residual, flat.boundary_legendrian_residual
    ))
}

fn criterion_5() -> Outcome {
    let data = LutzData::defaults();
    let group = genus2_generators().map_err(|e| e.to_string())?;
    let s = lutz_form(&data, &group, 3).map_err(|e| e.to_string())?;
    let seed = CoverPoint::from_txy(0.0, 0.16, 0.0).map_err(|e| e.to_string())?;
    let (rec, _) = find_periodic_orbit(&s, Section::TubeAngle { winding: 0 }, &seed, OrbitSearch::default())
        .map_err(|e| e.to_string())?;
    check(rec.closure_residual < 1e-8, || format!("closure {:e}", rec.closure_residual))?;
    check(rec.t_winding == 0, || format!("winding {}", rec.t_winding))?;
    check(rec.contractible, || "orbit not certified contractible".into())?;
    let closed_form = expected_period(data.delta, data.eps);
    check((closed_form - 0.8011061).abs() < 1e-7, || format!("closed form {closed_form}"))?;
    check((rec.period - 0.8011061).abs() < 1e-6, || format!("period {}", rec.period))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = RunConfig {
        untwisted: true,
        out: dir.path().to_path_buf(),
        ..Default::default()
    };
    let control = cmd_orbits(&cfg).map_err(|e| e.to_string())?;
    check(control.code == 1, || format!("untwisted control: {}", control.summary))?;
    Ok(format!(
        "period {:.9}, closure {:.1e}, winding 0; untwisted control: {}",
        rec.period, rec.closure_residual, control.summary
    ))
}

fn criterion_6() -> Outcome {
    let data = LutzData::defaults();
    let group = genus2_generators().map_err(|e| e.to_string())?;
    let s = lutz_form(&data, &group, 3).map_err(|e| e.to_string())?;
    let words = enumerate_words(&group, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut j2, mut jt2, mut krel, mut mk, mut inv): (f64, f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..100 {
        let z = random_disk_point(&mut rng, 0.6);
        let p = CoverPoint::from_txy(rng.gen(), z.re, z.im).map_err(|e| e.to_string())?;
        let frame = ContactFrame::at(&s, &ProductMetric, &p).map_err(|e| e.to_string())?;
        let j = compatible_acs(&frame).map_err(|e| e.to_string())?;
        j2 = j2.max(j.square_defect());
        let jt = cylinder_acs(&frame, &j);
        jt2 = jt2.max((jt * jt + Matrix4::identity()).abs().max());
        let gm = cylinder_metric(&frame);
        inv = inv.max((jt.transpose() * gm * jt - gm).abs().max());

        // pullback of the base form by a generator
        let g = words[1 + rng.gen_range(0..8)].isometry;
        let pulled = Pullback { inner: base_alpha(), g };
        let fp = ContactFrame::at(&pulled, &ProductMetric, &p).map_err(|e| e.to_string())?;
        let jp = compatible_acs(&fp).map_err(|e| e.to_string())?;
        let gp = p.mapped(&g);
        let fq = ContactFrame::at(&base_alpha(), &ProductMetric, &gp).map_err(|e| e.to_string())?;
        let jq = compatible_acs(&fq).map_err(|e| e.to_string())?;
        let u = fp.project(&Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let v = fp.project(&Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let lhs = jp.apply(&fp, &v);
        let rhs = push_forward(&g.inverse(), gp.z().z(), &jq.apply(&fq, &push_forward(&g, z, &v)));
        krel = krel.max((lhs - rhs).norm() / v.norm().max(1e-300));

        let m_p = metric_inner(&fp.metric, &u, &v);
        let via_dlam = fp.dlam.apply(&u, &(jp.apply(&fp, &v) * jp.scale));
        let m_q = metric_inner(&ProductMetric.eval(&gp), &push_forward(&g, z, &u), &push_forward(&g, z, &v));
        let scale = m_p.abs().max(1e-3);
        mk = mk.max((m_p - via_dlam).abs() / scale).max((m_p - m_q).abs() / scale);
    }
    check(j2 < 1e-10, || format!("J² defect {j2:e}"))?;
    check(jt2 < 1e-10, || format!("J̃² defect {jt2:e}"))?;
    check(krel < 1e-8, || format!("pullback compatibility {krel:e}"))?;
    check(mk < 1e-8, || format!("metric identity {mk:e}"))?;
    check(inv < 1e-8, || format!("cylinder metric invariance {inv:e}"))?;
    Ok(format!(
        "J² {j2:.1e}, J̃² {jt2:.1e}, pullback {krel:.1e}, metric {mk:.1e}, J̃-invariance {inv:.1e}"
    ))
}

fn criterion_7() -> Outcome {
    let data = LutzData::defaults();
    let group = genus2_generators().map_err(|e| e.to_string())?;
    let s = lutz_form(&data, &group, 3).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut frames = Vec::new();
    for _ in 0..50 {
        let z = random_disk_point(&mut rng, 0.6);
        let p = CoverPoint::from_txy(rng.gen(), z.re, z.im).map_err(|e| e.to_string())?;
        frames.push(ContactFrame::at(&s, &ProductMetric, &p).map_err(|e| e.to_string())?);
    }
    let mut min_density = f64::INFINITY;
    for _ in 0..10_000 {
        let frame = &frames[rng.gen_range(0..frames.len())];
        let mut vec3 = || Vector3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (u_s, u_t) = (vec3(), vec3());
        let jet = Jet {
            a_s: rng.gen_range(-2.0..2.0),
            a_t: rng.gen_range(-2.0..2.0),
            u_s,
            u_t,
        };
        let e = energy_density(frame, rng.gen_range(0.0..3.0), rng.gen_range(0.0..=1.0), &jet).map_err(|e| e.to_string())?;
        min_density = min_density.min(e.integrand).min(e.diamond).min(e.star);
    }
    check(min_density >= 0.0, || format!("negative density {min_density:e}"))?;

    let mut worst_cr: f64 = 0.0;
    for frame in &frames {
        let j = compatible_acs(frame).map_err(|e| e.to_string())?;
        let jet = Jet::trivial_cylinder(frame, rng.gen_range(0.1..3.0));
        worst_cr = worst_cr.max(cr_residual(frame, &j, &jet));
    }
    check(worst_cr <= 1e-12, || format!("trivial cylinder residual {worst_cr:e}"))?;

    for _ in 0..100 {
        let pts: Vec<[f64; 2]> = (0..200).map(|_| [rng.gen(), rng.gen()]).collect();
        let (cx, cy, w) = (rng.gen::<f64>(), rng.gen::<f64>(), rng.gen_range(0.01..0.2));
        let r = move |p: &[f64; 2]| 1.0 + 50.0 * (-((p[0] - cx).powi(2) + (p[1] - cy).powi(2)) / (w * w)).exp();
        let dist = |a: &[f64; 2], b: &[f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]);
        let x0 = rng.gen_range(0..pts.len());
        let eps0 = rng.gen_range(0.05..0.5);
        let sel = hofer_select(&pts, dist, r, x0, eps0).map_err(|e| e.to_string())?;
        let x = &pts[sel.index];
        check(dist(x, &pts[x0]) <= 2.0 * eps0, || "selection moved too far".into())?;
        check(sel.eps > 0.0 && sel.eps <= eps0, || format!("radius {}", sel.eps))?;
        check(r(&pts[x0]) * eps0 <= r(x) * sel.eps * (1.0 + 1e-12), || "R(x0)ε0 > R(x)ε".into())?;
        check(
            pts.iter().filter(|y| dist(x, y) <= sel.eps).all(|y| r(y) <= 2.0 * r(x)),
            || "R exceeds 2R(x) on the selected ball".into(),
        )?;
    }
    Ok(format!(
        "min density {min_density:.3e}, trivial cylinder residual {worst_cr:.1e}, 100 Hofer selections verified"
    ))
}

fn criterion_8() -> Outcome {
    let data = LutzData::defaults();
    let mut previous = f64::INFINITY;
    let mut errors = Vec::new();
    for n in [8, 16, 32, 64] {
        let sm = smooth_profiles(&data, n).map_err(|e| e.to_string())?;
        let (e1, e2) = sm.c1_errors(20_000);
        let e = e1.max(e2);
        check(e < previous, || format!("C¹ error {e:e} at n = {n} does not decrease"))?;
        previous = e;
        errors.push(format!("{e:.2e}"));
    }
    let group = Arc::new(genus2_generators().map_err(|e| e.to_string())?);
    let grid = SamplingGrid::new(100, 100, 4);
    let base = orbit_infimum(&lutz_form(&data, &group, 3).map_err(|e| e.to_string())?, grid)
        .map_err(|e| e.to_string())?
        .value;
    let mut values = Vec::new();
    for n in [16, 32, 64] {
        let sm = Arc::new(smooth_profiles(&data, n).map_err(|e| e.to_string())?);
        let st = LutzStructure::new(sm, group.clone(), 3).map_err(|e| e.to_string())?;
        let v = orbit_infimum(&st, grid).map_err(|e| e.to_string())?.value;
        check(v > 0.0, || format!("smoothed infimum {v} at n = {n}"))?;
        check((v - base).abs() <= 0.1 * base, || format!("smoothed infimum {v} vs {base} at n = {n}"))?;
        values.push(format!("{v:.6}"));
    }
    Ok(format!(
        "C¹ errors {} ; smoothed infima {} vs {base:.6}",
        errors.join(" > "),
        values.join(", ")
    ))
}

fn criterion_9() -> Outcome {
    let sys = MagneticSystem::hyperbolic();
    let mut ladder = Vec::new();
    for (r, v) in [(0.5, 0.125), (0.9, 0.405), (0.999, 0.4990005)] {
        let b = mane_upper_bound(&sys, r, 256).map_err(|e| e.to_string())?;
        check((b - v).abs() < 1e-6, || format!("bound {b} at r_max = {r}"))?;
        ladder.push(format!("{b:.7}"));
    }
    let p = sys.momentum_for_energy([0.2, 0.1], [0.3, 1.0], 0.3).map_err(|e| e.to_string())?;
    let tr = magnetic_flow(&sys, [0.2, 0.1, p[0], p[1]], 20.0, 1e-10).map_err(|e| e.to_string())?;
    let drift = tr.energy_drift();
    check(drift < 1e-8, || format!("energy drift {drift:e}"))?;

    let p = sys.momentum_for_energy([0.0, 0.0], [1.0, 0.0], 0.1).map_err(|e| e.to_string())?;
    let closure = first_return(&sys, [0.0, 0.0, p[0], p[1]], 50.0, 1e-10)
        .map_err(|e| e.to_string())?
        .ok_or("low-energy orbit did not return")?;
    check(closure.residual < 1e-6, || format!("closure {:e}", closure.residual))?;
    let p = sys.momentum_for_energy([0.0, 0.0], [1.0, 0.0], 1.0).map_err(|e| e.to_string())?;
    let high = magnetic_flow(&sys, [0.0, 0.0, p[0], p[1]], 5.0, 1e-10).map_err(|e| e.to_string())?;
    let shorter = magnetic_flow(&sys, [0.0, 0.0, p[0], p[1]], 2.5, 1e-10).map_err(|e| e.to_string())?;
    let d = high.max_displacement();
    check(d > 1.0 && d > shorter.max_displacement(), || format!("displacement {d}"))?;
    Ok(format!(
        "ladder {}, drift {drift:.1e}, k = 0.1 closes at T = {:.6} (residual {:.1e}), k = 1 displacement {d:.3}",
        ladder.join(" / "),
        closure.period,
        closure.residual
    ))
}

fn criterion_10() -> Outcome {
    let run = || -> Result<Vec<(String, Vec<u8>)>, String> {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let cfg = RunConfig {
            grid: Some(80),
            seed: 11,
            out: dir.path().to_path_buf(),
            ..Default::default()
        };
        cmd_verify(&cfg).map_err(|e| e.to_string())?;
        cmd_foliate(&cfg).map_err(|e| e.to_string())?;
        cmd_orbits(&cfg).map_err(|e| e.to_string())?;
        cmd_mane(&cfg).map_err(|e| e.to_string())?;
        let mut files = Vec::new();
        for name in ["verify_report.csv", "foliation.csv", "orbits.csv", "mane.csv"] {
            let bytes = std::fs::read(dir.path().join(name)).map_err(|e| e.to_string())?;
            files.push((name.to_string(), bytes));
        }
        Ok(files)
    };
    let a = run()?;
    let b = run()?;
    for ((name, x), (_, y)) in a.iter().zip(&b) {
        check(x == y, || format!("{name} differs between runs"))?;
    }
    Ok(format!("{} CSV files byte-identical", a.len()))
}

fn main() -> ExitCode {
    type Criterion = (usize, &'static str, Option<Duration>, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        (1, "fuchsian fidelity", Some(Duration::from_secs(1)), criterion_1),
        (2, "case bounds of L", Some(Duration::from_secs(5)), criterion_2),
        (3, "virtual contact certification", Some(Duration::from_secs(60)), criterion_3),
        (4, "overtwisted disk", Some(Duration::from_secs(5)), criterion_4),
        (5, "contractible periodic orbit", Some(Duration::from_secs(10)), criterion_5),
        (6, "almost complex structures and pullbacks", None, criterion_6),
        (7, "energy, Cauchy-Riemann residual, Hofer selection", None, criterion_7),
        (8, "smoothing", None, criterion_8),
        (9, "Mañé bound and magnetic flow", None, criterion_9),
        (10, "determinism", None, criterion_10),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(l)) if elapsed > l => Err(format!("runtime {:.2} s exceeds {} s", elapsed.as_secs_f64(), l.as_secs())),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("criterion {id:>2} PASS [{name}] {detail} ({:.2} s)", elapsed.as_secs_f64()),
            Err(reason) => {
                failed += 1;
                println!("criterion {id:>2} FAIL [{name}] {reason} ({:.2} s)", elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
