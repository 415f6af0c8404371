//! Batch front end: configuration, the `verify`, `foliate`, `orbits` and
//! `mane` commands, and their CSV/SVG output.
//!
//! Exit codes are 0 on success, 1 when a certification or search fails and
//! 2 on configuration errors.

use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dynamics::{find_periodic_orbit, ConstantField, OrbitRecord, OrbitSearch, Section, Trajectory, VectorField};
use crate::forms::{CoverPoint, VectorValue};
use crate::hyperbolic::genus2_generators;
use crate::lutz::{smooth_profiles, LutzData, LutzStructure, Twist};
use crate::magnetic::{mane_upper_bound, MagneticSystem};
use crate::verifier::{characteristic_foliation, orbit_infimum, DiskSurface, SamplingGrid};

mod config;
pub mod output;

pub use config::RunConfig;
use output::{Cell, Csv, Svg};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "VCONTACT_THREADS";

pub const DEFAULT_VERIFY_GRID: usize = 200;
pub const DEFAULT_FOLIATION_GRID: usize = 64;
pub const DEFAULT_MANE_GRID: usize = 256;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot write {0}: {1}")]
    Io(String, std::io::Error),
    #[error(transparent)]
    Compute(#[from] crate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(..) | CliError::Compute(_) => 1,
        }
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// 0 on success, 1 on a failed check.
    pub code: i32,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

/// Reads the thread cap from the environment; `None` when unset.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_ENV} = {v:?} is not a positive integer"))),
        },
    }
}

/// Installs the global thread pool, honouring the environment cap.
pub fn init_threads() -> Result<(), CliError> {
    if let Some(n) = threads_from_env()? {
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn lutz_data(cfg: &RunConfig) -> Result<LutzData, CliError> {
    cfg.validate()?;
    LutzData::new(cfg.delta, cfg.eps, cfg.c).map_err(|e| CliError::Config(e.to_string()))
}

fn prepare_out(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::Io(cfg.out.display().to_string(), e))
}

fn structure<T: Twist>(twist: T, depth: usize) -> Result<LutzStructure<T>, CliError> {
    let group = genus2_generators()?;
    Ok(LutzStructure::new(Arc::new(twist), Arc::new(group), depth)?)
}

/// Certifies the twisted structure and writes `verify_report.csv`.
pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let data = lutz_data(cfg)?;
    prepare_out(cfg)?;
    let n = cfg.grid.unwrap_or(DEFAULT_VERIFY_GRID);
    let grid = SamplingGrid::new(n, n, cfg.t_slices);
    if cfg.smoothing > 0 {
        let s = structure(smooth_profiles(&data, cfg.smoothing)?, cfg.depth)?;
        verify_with(cfg, &s, grid)
    } else {
        let s = structure(data, cfg.depth)?;
        verify_with(cfg, &s, grid)
    }
}

fn verify_with<T: Twist + 'static>(cfg: &RunConfig, s: &LutzStructure<T>, grid: SamplingGrid) -> Result<Outcome, CliError> {
    let inf = orbit_infimum(s, grid)?;
    let mut csv = Csv::new(&["region", "r_min", "r_max", "sampled_min_pairing", "analytic_bound", "margin"]);
    for r in &inf.regions {
        csv.row(&[
            Cell::Text(r.region.name()),
            Cell::Num(r.r_min),
            Cell::Num(r.r_max),
            Cell::Num(r.sampled_min),
            Cell::Num(r.bound),
            Cell::Num(r.margin()),
        ]);
    }
    let path = cfg.out.join("verify_report.csv");
    csv.write(&path)?;
    let ok = inf.regions.iter().all(|r| r.margin() >= 0.0) && inf.value > 0.0;
    let summary = format!(
        "verify: {} inf pairing {} over {} words, {} evaluations, outside deviation {:e}",
        if ok { "PASS" } else { "FAIL" },
        output::sig9(inf.value),
        inf.words,
        inf.evaluations,
        inf.outside_deviation
    );
    Ok(Outcome {
        code: if ok { 0 } else { 1 },
        summary,
        files: vec![path],
    })
}

/// Computes the characteristic foliation of the overtwisted disk (or the flat
/// control) and writes `foliation.csv` and `foliation.svg`.
pub fn cmd_foliate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let data = lutz_data(cfg)?;
    prepare_out(cfg)?;
    let surface = if cfg.flat_control {
        DiskSurface::flat(data.delta / 2.0)
    } else {
        DiskSurface::overtwisted(&data)
    };
    let lam = structure(data, cfg.depth)?;
    let rep = characteristic_foliation(&surface, &lam, cfg.grid.unwrap_or(DEFAULT_FOLIATION_GRID))?;

    let mut csv = Csv::new(&["kind", "u", "v", "du", "dv", "lambda_residual"]);
    for sp in &rep.singular_points {
        csv.row(&[
            Cell::Text(sp.kind.name()),
            Cell::Num(sp.u),
            Cell::Num(sp.v),
            Cell::Num(0.0),
            Cell::Num(0.0),
            Cell::Num(0.0),
        ]);
    }
    for g in &rep.grid {
        csv.row(&[
            Cell::Text("regular"),
            Cell::Num(g.u),
            Cell::Num(g.v),
            Cell::Num(g.du),
            Cell::Num(g.dv),
            Cell::Num(g.lambda_residual),
        ]);
    }
    let csv_path = cfg.out.join("foliation.csv");
    csv.write(&csv_path)?;

    let mut svg = Svg::new();
    svg.circle(0.0, 0.0, 1.0, "#999999", "none");
    svg.circle(0.0, 0.0, rep.boundary_radius, "black", "none");
    for leaf in &rep.leaves {
        svg.polyline(leaf, "#1f5fa8");
    }
    for sp in &rep.singular_points {
        svg.circle(sp.u, sp.v, 0.006, "#c0392b", "#c0392b");
    }
    let svg_path = cfg.out.join("foliation.svg");
    svg.write(&svg_path)?;

    let ok = rep.is_overtwisted_disk();
    let reason = if !rep.boundary_is_legendrian() {
        format!("boundary not Legendrian (residual {:e})", rep.boundary_legendrian_residual)
    } else if !ok {
        format!(
            "expected one elliptic singular point, found {} singular points ({} elliptic)",
            rep.singular_points.len(),
            rep.elliptic_count()
        )
    } else {
        format!(
            "overtwisted disk: 1 elliptic singular point, boundary residual {:e}",
            rep.boundary_legendrian_residual
        )
    };
    Ok(Outcome {
        code: if ok { 0 } else { 1 },
        summary: format!("foliate: {} {reason}", if ok { "PASS" } else { "FAIL" }),
        files: vec![csv_path, svg_path],
    })
}

/// Orbit seeds drawn from the run seed: radii in `[δ/2 − ε, δ/2 + ε]`, on the
/// positive `x` axis, at random heights.
pub fn orbit_seeds(cfg: &RunConfig) -> Vec<CoverPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.seeds.max(1))
        .filter_map(|_| {
            let r = rng.gen_range(cfg.delta / 2.0 - cfg.eps..=cfg.delta / 2.0 + cfg.eps);
            let t = rng.gen_range(0.0..1.0);
            CoverPoint::from_txy(t, r, 0.0).ok()
        })
        .collect()
}

fn search<F: VectorField + ?Sized>(field: &F, seeds: &[CoverPoint], tol: f64) -> Vec<(OrbitRecord, Trajectory)> {
    let opts = OrbitSearch { tol, ..Default::default() };
    let mut found: Vec<(OrbitRecord, Trajectory)> = Vec::new();
    for seed in seeds {
        let hit = find_periodic_orbit(field, Section::TubeAngle { winding: 0 }, seed, opts)
            .or_else(|_| find_periodic_orbit(field, Section::TimeSlice { t0: seed.t() }, seed, opts));
        let Ok((rec, tr)) = hit else { continue };
        let r = rec.seed[1].hypot(rec.seed[2]);
        let duplicate = found.iter().any(|(o, _)| {
            o.t_winding == rec.t_winding
                && o.contractible == rec.contractible
                && (o.seed[1].hypot(o.seed[2]) - r).abs() < 1e-6
        });
        if !duplicate {
            found.push((rec, tr));
        }
    }
    found
}

/// Searches for periodic orbits and writes `orbits.csv` and `orbit.svg`.
pub fn cmd_orbits(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let data = lutz_data(cfg)?;
    prepare_out(cfg)?;
    let seeds = orbit_seeds(cfg);
    let found = if cfg.untwisted {
        search(&ConstantField(VectorValue::x()), &seeds, cfg.tol)
    } else if cfg.smoothing > 0 {
        let s = structure(smooth_profiles(&data, cfg.smoothing)?, cfg.depth)?;
        search(&s, &seeds, cfg.tol)
    } else {
        let s = structure(data.clone(), cfg.depth)?;
        search(&s, &seeds, cfg.tol)
    };

    let mut csv = Csv::new(&[
        "seed_t",
        "seed_x",
        "seed_y",
        "period",
        "closure_residual",
        "t_winding",
        "contractible",
    ]);
    for (rec, _) in &found {
        csv.row(&[
            Cell::Num(rec.seed[0]),
            Cell::Num(rec.seed[1]),
            Cell::Num(rec.seed[2]),
            Cell::Num(rec.period),
            Cell::Num(rec.closure_residual),
            Cell::Int(rec.t_winding),
            Cell::Bool(rec.contractible),
        ]);
    }
    let csv_path = cfg.out.join("orbits.csv");
    csv.write(&csv_path)?;

    let mut svg = Svg::new();
    svg.circle(0.0, 0.0, 1.0, "#999999", "none");
    svg.circle(0.0, 0.0, data.delta, "black", "none");
    for (rec, tr) in &found {
        let pts: Vec<(f64, f64)> = tr.states.iter().map(|s| (s[1], s[2])).collect();
        let colour = if rec.contractible { "#c0392b" } else { "#1f5fa8" };
        svg.polyline(&pts, colour);
        svg.circle(rec.seed[1], rec.seed[2], 0.005, colour, colour);
    }
    let svg_path = cfg.out.join("orbit.svg");
    svg.write(&svg_path)?;

    let contractible = found.iter().filter(|(r, _)| r.contractible).count();
    let ok = contractible > 0;
    Ok(Outcome {
        code: if ok { 0 } else { 1 },
        summary: format!(
            "orbits: {} {} periodic orbits, {contractible} contractible",
            if ok { "PASS" } else { "FAIL" },
            found.len()
        ),
        files: vec![csv_path, svg_path],
    })
}

/// Writes `mane.csv` with the upper bound at each ladder radius.
pub fn cmd_mane(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    prepare_out(cfg)?;
    let sys = MagneticSystem::hyperbolic().with_constant_potential(cfg.potential);
    let n = cfg.grid.unwrap_or(DEFAULT_MANE_GRID);
    let mut csv = Csv::new(&["r_max", "upper_bound"]);
    let mut values = Vec::new();
    for &r in &cfg.ladder {
        let v = mane_upper_bound(&sys, r, n)?;
        values.push(output::sig9(v));
        csv.row(&[Cell::Num(r), Cell::Num(v)]);
    }
    let path = cfg.out.join("mane.csv");
    csv.write(&path)?;
    Ok(Outcome {
        code: 0,
        summary: format!("mane: upper bounds {}", values.join(" ")),
        files: vec![path],
    })
}

/// The four verbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Foliate,
    Orbits,
    Mane,
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cmd {
        Command::Verify => cmd_verify(cfg),
        Command::Foliate => cmd_foliate(cfg),
        Command::Orbits => cmd_orbits(cfg),
        Command::Mane => cmd_mane(cfg),
    }
}
