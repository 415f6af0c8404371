//! CSV and SVG writers. CSV files have a header row, LF line endings and
//! floats with nine significant digits; SVG files use an 800×800 view box
//! onto the unit disk.

use std::fmt::Write as _;
use std::path::Path;

use super::CliError;

/// Decimal rendering with nine significant digits.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (8 - mag).clamp(0, 30) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit
    let digits = s.chars().filter(|c| c.is_ascii_digit()).skip_while(|c| *c == '0').count();
    if digits > 9 && decimals > 0 {
        let d = decimals - 1;
        format!("{x:.d$}")
    } else {
        s
    }
}

#[derive(Debug, Default)]
pub struct Csv {
    body: String,
}

pub enum Cell<'a> {
    Text(&'a str),
    Num(f64),
    Int(i64),
    Bool(bool),
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut body = header.join(",");
        body.push('\n');
        Self { body }
    }

    pub fn row(&mut self, cells: &[Cell<'_>]) {
        let line: Vec<String> = cells
            .iter()
            .map(|c| match c {
                Cell::Text(s) => (*s).to_string(),
                Cell::Num(x) => sig9(*x),
                Cell::Int(i) => i.to_string(),
                Cell::Bool(b) => b.to_string(),
            })
            .collect();
        self.body.push_str(&line.join(","));
        self.body.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.body
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, &self.body).map_err(|e| CliError::Io(path.display().to_string(), e))
    }
}

const SCALE: f64 = 380.0;

fn map(x: f64, y: f64) -> (f64, f64) {
    (400.0 + SCALE * x, 400.0 - SCALE * y)
}

/// An SVG document over the unit disk.
#[derive(Debug)]
pub struct Svg {
    body: String,
}

impl Default for Svg {
    fn default() -> Self {
        Self::new()
    }
}

impl Svg {
    pub fn new() -> Self {
        let mut body = String::from(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 800\" width=\"800\" height=\"800\">\n",
        );
        body.push_str("<rect width=\"800\" height=\"800\" fill=\"white\"/>\n");
        Self { body }
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, stroke: &str, fill: &str) {
        let (x, y) = map(cx, cy);
        let _ = writeln!(
            self.body,
            "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{:.3}\" stroke=\"{stroke}\" fill=\"{fill}\" stroke-width=\"1\"/>",
            SCALE * r
        );
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str) {
        if pts.len() < 2 {
            return;
        }
        let coords: Vec<String> = pts
            .iter()
            .map(|&(u, v)| {
                let (x, y) = map(u, v);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            self.body,
            "<polyline points=\"{}\" stroke=\"{stroke}\" fill=\"none\" stroke-width=\"1\"/>",
            coords.join(" ")
        );
    }

    pub fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }

    pub fn write(self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.finish()).map_err(|e| CliError::Io(path.display().to_string(), e))
    }
}
