//! Run configuration: a flat `key = value` file plus command-line overrides.

use std::path::{Path, PathBuf};

use super::CliError;

/// Settings shared by all commands. `grid` is command-specific when unset.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub delta: f64,
    pub eps: f64,
    pub c: f64,
    pub depth: usize,
    pub grid: Option<usize>,
    pub t_slices: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// Local integration tolerance for orbit search.
    pub tol: f64,
    /// Smoothing resolution for the profiles; 0 keeps the piecewise profiles.
    pub smoothing: usize,
    /// Use the untwisted structure `λ = dt`.
    pub untwisted: bool,
    /// Replace the overtwisted disk by a flat disk of radius `δ/2`.
    pub flat_control: bool,
    /// Number of random orbit seeds in the tube.
    pub seeds: usize,
    /// Constant potential added to the magnetic Hamiltonian.
    pub potential: f64,
    /// Radii at which the Mañé upper bound is reported.
    pub ladder: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            delta: 0.3,
            eps: 0.03,
            c: std::f64::consts::SQRT_2,
            depth: 3,
            grid: None,
            t_slices: 16,
            seed: 0,
            out: PathBuf::from("out"),
            tol: 1e-12,
            smoothing: 0,
            untwisted: false,
            flat_control: false,
            seeds: 4,
            potential: 0.0,
            ladder: vec![0.5, 0.9, 0.999],
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("cannot parse {key} = {value:?}")))
}

impl RunConfig {
    /// Sets one key. Unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key.trim() {
            "delta" => self.delta = parse(key, value)?,
            "eps" => self.eps = parse(key, value)?,
            "c" => self.c = parse(key, value)?,
            "depth" => self.depth = parse(key, value)?,
            "grid" => self.grid = Some(parse(key, value)?),
            "t_slices" => self.t_slices = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "out" => self.out = PathBuf::from(value.trim()),
            "tol" => self.tol = parse(key, value)?,
            "smoothing" => self.smoothing = parse(key, value)?,
            "untwisted" => self.untwisted = parse(key, value)?,
            "flat_control" => self.flat_control = parse(key, value)?,
            "seeds" => self.seeds = parse(key, value)?,
            "potential" => self.potential = parse(key, value)?,
            "ladder" => {
                self.ladder = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse(key, s))
                    .collect::<Result<_, _>>()?
            }
            other => return Err(CliError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_str(&mut self, text: &str) -> Result<(), CliError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::default();
        cfg.parse_str(&text)?;
        Ok(cfg)
    }

    /// Checks the admissible ranges.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.delta > 0.0 && self.delta <= 1.0 / 3.0) {
            return bad(format!("delta = {} must lie in (0, 1/3]", self.delta));
        }
        if !(self.eps > 0.0 && self.eps <= self.delta / 10.0 * (1.0 + 1e-12)) {
            return bad(format!("eps = {} must lie in (0, delta/10]", self.eps));
        }
        if !(self.c >= 1.0 && self.c.is_finite()) {
            return bad(format!("c = {} must be at least 1", self.c));
        }
        if self.depth < 1 {
            return bad("depth must be at least 1".into());
        }
        if matches!(self.grid, Some(g) if g < 2) {
            return bad("grid must be at least 2".into());
        }
        if self.t_slices < 1 {
            return bad("t_slices must be at least 1".into());
        }
        if !(self.tol > 0.0 && self.tol < 1e-3) {
            return bad(format!("tol = {} must lie in (0, 1e-3)", self.tol));
        }
        if !self.potential.is_finite() {
            return bad("potential must be finite".into());
        }
        if self.ladder.is_empty() {
            return bad("ladder is empty".into());
        }
        if let Some(r) = self.ladder.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return bad(format!("ladder radius {r} must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides() {
        let mut c = RunConfig::default();
        c.parse_str("# run\ndelta = 0.25\n\neps=0.02 # small\nladder = 0.5, 0.7\nuntwisted = true\n")
            .unwrap();
        assert_eq!(c.delta, 0.25);
        assert_eq!(c.eps, 0.02);
        assert_eq!(c.ladder, vec![0.5, 0.7]);
        assert!(c.untwisted);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        let mut c = RunConfig::default();
        assert!(matches!(c.parse_str("colour = red"), Err(CliError::Config(_))));
        assert!(matches!(c.parse_str("delta"), Err(CliError::Config(_))));
        assert!(matches!(c.parse_str("depth = -1"), Err(CliError::Config(_))));
        let mut c = RunConfig::default();
        c.eps = c.delta;
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.ladder.clear();
        assert!(c.validate().is_err());
    }
}
