//! `key=value` run configuration.

use std::f64::consts::TAU;
use std::path::PathBuf;

use sympcrit::presets::{GridSpec, Preset};
use sympcrit::surface::MIN_AXIS;
use sympcrit::DomainMode;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid value for '{field}': {msg}")]
    Validation { field: &'static str, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub domain_mode: DomainMode,
    pub preset: String,
    pub eps: f64,
    pub eps_g: f64,
    pub kx: u32,
    pub ky: u32,
    pub slope_f: f64,
    pub slope_g: f64,
    pub power: u32,
    pub amplitude: f64,
    pub carrier: f64,
    pub file: Option<PathBuf>,
    pub dt_factor: f64,
    pub t_end: f64,
    pub record_every: usize,
    pub tol_converged: f64,
    pub out: PathBuf,
    pub seed: u64,
    pub samples: usize,
}

pub const PRESETS: [&str; 6] = [
    "flat",
    "perturbed_torus",
    "sheared_plane",
    "holomorphic_patch",
    "random_fourier",
    "from_file",
];

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            nx: 64,
            ny: 64,
            hx: TAU / 64.0,
            hy: TAU / 64.0,
            domain_mode: DomainMode::PeriodicTorus,
            preset: "flat".into(),
            eps: 0.05,
            eps_g: 0.0,
            kx: 1,
            ky: 1,
            slope_f: 1.0,
            slope_g: 0.0,
            power: 2,
            amplitude: 0.2,
            carrier: 0.0,
            file: None,
            dt_factor: 0.1,
            t_end: 1.0,
            record_every: 10,
            tol_converged: 1e-8,
            out: PathBuf::from("out"),
            seed: 1,
            samples: 10_000,
        }
    }
}

impl RunConfig {
    pub fn grid(&self) -> GridSpec {
        GridSpec { nx: self.nx, ny: self.ny, hx: self.hx, hy: self.hy, mode: self.domain_mode }
    }

    /// Same grid with every axis multiplied by `factor` and spacings divided by it.
    pub fn refined_grid(&self, factor: usize) -> GridSpec {
        let g = self.grid();
        let k = factor as f64;
        match g.mode {
            DomainMode::PeriodicTorus => GridSpec { nx: g.nx * factor, ny: g.ny * factor, hx: g.hx / k, hy: g.hy / k, ..g },
            // keep the physical rectangle
            DomainMode::OpenPatch => GridSpec {
                nx: (g.nx - 1) * factor + 1,
                ny: (g.ny - 1) * factor + 1,
                hx: g.hx / k,
                hy: g.hy / k,
                ..g
            },
        }
    }

    pub fn preset(&self) -> Preset {
        match self.preset.as_str() {
            "flat" => Preset::Flat,
            "perturbed_torus" => Preset::PerturbedTorus { eps: self.eps, eps_g: self.eps_g, kx: self.kx, ky: self.ky },
            "sheared_plane" => Preset::ShearedPlane { slope_f: self.slope_f, slope_g: self.slope_g },
            "holomorphic_patch" => Preset::HolomorphicPatch { power: self.power },
            "random_fourier" => Preset::RandomFourier { amplitude: self.amplitude, carrier: self.carrier, seed: self.seed },
            "from_file" => Preset::FromFile(self.file.clone().unwrap_or_default()),
            other => unreachable!("preset '{other}' passed validation"),
        }
    }
}

fn parse_value<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::Parse { line, msg: format!("cannot parse '{value}' for '{key}'") })
}

/// Parses `key=value` lines. Blank lines and `#` comments are ignored;
/// omitted keys take their defaults. Spacings default to `2π/n` on the torus
/// and `1/(n − 1)` on a patch.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut c = RunConfig::default();
    let mut hx = None;
    let mut hy = None;
    let mut seen = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| ConfigError::Parse { line, msg: format!("expected key=value, got '{body}'") })?;
        let (key, value) = (key.trim(), value.trim());
        if seen.iter().any(|k: &String| k == key) {
            return Err(ConfigError::Parse { line, msg: format!("duplicate key '{key}'") });
        }
        seen.push(key.to_string());
        match key {
            "nx" => c.nx = parse_signed_count(line, "nx", value)?,
            "ny" => c.ny = parse_signed_count(line, "ny", value)?,
            "hx" => hx = Some(parse_value(line, key, value)?),
            "hy" => hy = Some(parse_value(line, key, value)?),
            "domain_mode" => {
                c.domain_mode = value.parse().map_err(|e: String| ConfigError::Parse { line, msg: e })?
            }
            "preset" => c.preset = value.to_string(),
            "eps" => c.eps = parse_value(line, key, value)?,
            "eps_g" => c.eps_g = parse_value(line, key, value)?,
            "kx" => c.kx = parse_value(line, key, value)?,
            "ky" => c.ky = parse_value(line, key, value)?,
            "slope_f" => c.slope_f = parse_value(line, key, value)?,
            "slope_g" => c.slope_g = parse_value(line, key, value)?,
            "power" => c.power = parse_value(line, key, value)?,
            "amplitude" => c.amplitude = parse_value(line, key, value)?,
            "carrier" => c.carrier = parse_value(line, key, value)?,
            "file" => c.file = Some(PathBuf::from(value)),
            "dt_factor" => c.dt_factor = parse_value(line, key, value)?,
            "t_end" => c.t_end = parse_value(line, key, value)?,
            "record_every" => c.record_every = parse_signed_count(line, "record_every", value)?,
            "tol_converged" => c.tol_converged = parse_value(line, key, value)?,
            "out" => c.out = PathBuf::from(value),
            "seed" => c.seed = parse_value(line, key, value)?,
            "samples" => c.samples = parse_signed_count(line, "samples", value)?,
            other => return Err(ConfigError::Parse { line, msg: format!("unknown key '{other}'") }),
        }
    }
    let default_h = |n: usize| match c.domain_mode {
        DomainMode::PeriodicTorus => TAU / n as f64,
        DomainMode::OpenPatch => 1.0 / (n.max(2) - 1) as f64,
    };
    c.hx = hx.unwrap_or_else(|| default_h(c.nx));
    c.hy = hy.unwrap_or_else(|| default_h(c.ny));
    validate(&c)?;
    Ok(c)
}

// a negative count is a validation error on the field, not a syntax error
fn parse_signed_count(line: usize, key: &'static str, value: &str) -> Result<usize, ConfigError> {
    let v: i64 = parse_value(line, key, value)?;
    usize::try_from(v).map_err(|_| invalid(key, format!("must be positive, got {v}")))
}

fn invalid(field: &'static str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Validation { field, msg: msg.into() }
}

fn positive(field: &'static str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive, got {v}")))
    }
}

fn nonnegative(field: &'static str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be nonnegative, got {v}")))
    }
}

pub fn validate(c: &RunConfig) -> Result<(), ConfigError> {
    if c.nx < MIN_AXIS {
        return Err(invalid("nx", format!("need at least {MIN_AXIS} nodes, got {}", c.nx)));
    }
    if c.ny < MIN_AXIS {
        return Err(invalid("ny", format!("need at least {MIN_AXIS} nodes, got {}", c.ny)));
    }
    positive("hx", c.hx)?;
    positive("hy", c.hy)?;
    if !PRESETS.contains(&c.preset.as_str()) {
        return Err(invalid("preset", format!("'{}' is not one of {}", c.preset, PRESETS.join(", "))));
    }
    nonnegative("eps", c.eps)?;
    nonnegative("eps_g", c.eps_g)?;
    if c.kx == 0 {
        return Err(invalid("kx", "must be positive"));
    }
    if c.ky == 0 {
        return Err(invalid("ky", "must be positive"));
    }
    if !c.slope_f.is_finite() {
        return Err(invalid("slope_f", "must be finite"));
    }
    if !c.slope_g.is_finite() {
        return Err(invalid("slope_g", "must be finite"));
    }
    if c.power == 0 {
        return Err(invalid("power", "must be positive"));
    }
    nonnegative("amplitude", c.amplitude)?;
    nonnegative("carrier", c.carrier)?;
    if c.preset == "from_file" && c.file.is_none() {
        return Err(invalid("file", "required by preset from_file"));
    }
    positive("dt_factor", c.dt_factor)?;
    positive("t_end", c.t_end)?;
    if c.record_every == 0 {
        return Err(invalid("record_every", "must be positive"));
    }
    positive("tol_converged", c.tol_converged)?;
    if c.samples == 0 {
        return Err(invalid("samples", "must be positive"));
    }
    Ok(())
}
