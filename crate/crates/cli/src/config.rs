//! Flat `key=value` run configuration.

use std::path::PathBuf;
use std::str::FromStr;

use qaperture_core::{BeamModel, DipolePolicy, MapGrid, ScanConfig};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config key `{key}`: {reason}")]
pub struct ConfigError {
    pub key: String,
    pub reason: String,
}

fn err(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.to_string(),
        reason: reason.into(),
    }
}

/// Every setting of a run. Lengths are in wavelengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub lambda_nm: f64,
    /// Natural linewidth in rad/s.
    pub gamma: f64,
    /// Laser detuning in rad/s.
    pub detuning: f64,
    pub f: f64,
    pub z_in: f64,
    pub model: BeamModel,
    pub policy: DipolePolicy,
    pub radius: f64,
    pub phi_min: f64,
    pub phi_max: f64,
    pub phi_steps: usize,
    pub omega_over_gamma: f64,
    pub map_x_min: f64,
    pub map_x_max: f64,
    pub map_nx: usize,
    pub map_z_min: f64,
    pub map_z_max: f64,
    pub map_nz: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub optimize: bool,
    pub z_in_min: f64,
    pub z_in_max: f64,
    pub opt_tol: f64,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let scan = ScanConfig::default();
        let map = MapGrid::default();
        Self {
            lambda_nm: 852.0,
            gamma: std::f64::consts::TAU * 5e6,
            detuning: 0.0,
            f: 500.0,
            z_in: 6e4,
            model: BeamModel::Exact,
            policy: DipolePolicy::Aligned,
            radius: scan.radius,
            phi_min: scan.phi_min,
            phi_max: scan.phi_max,
            phi_steps: scan.count,
            omega_over_gamma: scan.omega_over_gamma,
            map_x_min: map.x_min,
            map_x_max: map.x_max,
            map_nx: map.nx,
            map_z_min: map.z_min,
            map_z_max: map.z_max,
            map_nz: map.nz,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            optimize: false,
            z_in_min: 125.0,
            z_in_max: 5e5,
            opt_tol: 1e-4,
            out: PathBuf::from("."),
        }
    }
}

pub const KEYS: [&str; 25] = [
    "lambda_nm",
    "gamma",
    "detuning",
    "f",
    "z_in",
    "model",
    "policy",
    "radius",
    "phi_min",
    "phi_max",
    "phi_steps",
    "omega_over_gamma",
    "map_x_min",
    "map_x_max",
    "map_nx",
    "map_z_min",
    "map_z_max",
    "map_nz",
    "rel_tol",
    "abs_tol",
    "optimize",
    "z_in_min",
    "z_in_max",
    "opt_tol",
    "out",
];

fn parse<V: FromStr>(key: &str, value: &str) -> Result<V, ConfigError> {
    value
        .parse()
        .map_err(|_| err(key, format!("cannot parse {value:?}")))
}

impl RunConfig {
    /// Defaults, then the file text, then the overrides; validated.
    pub fn resolve(text: &str, overrides: &[(&str, String)]) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(line, format!("line {} is not key=value", n + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        for (key, value) in overrides {
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "lambda_nm" => self.lambda_nm = parse(key, value)?,
            "gamma" => self.gamma = parse(key, value)?,
            "detuning" => self.detuning = parse(key, value)?,
            "f" => self.f = parse(key, value)?,
            "z_in" => self.z_in = parse(key, value)?,
            "model" => self.model = parse(key, value)?,
            "policy" => self.policy = parse(key, value)?,
            "radius" => self.radius = parse(key, value)?,
            "phi_min" => self.phi_min = parse(key, value)?,
            "phi_max" => self.phi_max = parse(key, value)?,
            "phi_steps" => self.phi_steps = parse(key, value)?,
            "omega_over_gamma" => self.omega_over_gamma = parse(key, value)?,
            "map_x_min" => self.map_x_min = parse(key, value)?,
            "map_x_max" => self.map_x_max = parse(key, value)?,
            "map_nx" => self.map_nx = parse(key, value)?,
            "map_z_min" => self.map_z_min = parse(key, value)?,
            "map_z_max" => self.map_z_max = parse(key, value)?,
            "map_nz" => self.map_nz = parse(key, value)?,
            "rel_tol" => self.rel_tol = parse(key, value)?,
            "abs_tol" => self.abs_tol = parse(key, value)?,
            "optimize" => self.optimize = parse(key, value)?,
            "z_in_min" => self.z_in_min = parse(key, value)?,
            "z_in_max" => self.z_in_max = parse(key, value)?,
            "opt_tol" => self.opt_tol = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            _ => return Err(err(key, "unknown key")),
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("lambda_nm", self.lambda_nm),
            ("gamma", self.gamma),
            ("f", self.f),
            ("z_in", self.z_in),
            ("radius", self.radius),
            ("rel_tol", self.rel_tol),
            ("z_in_min", self.z_in_min),
            ("z_in_max", self.z_in_max),
            ("opt_tol", self.opt_tol),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(err(key, format!("{v} must be positive and finite")));
            }
        }
        let finite = [
            ("detuning", self.detuning),
            ("phi_min", self.phi_min),
            ("phi_max", self.phi_max),
            ("map_x_min", self.map_x_min),
            ("map_x_max", self.map_x_max),
            ("map_z_min", self.map_z_min),
            ("map_z_max", self.map_z_max),
        ];
        for (key, v) in finite {
            if !v.is_finite() {
                return Err(err(key, "must be finite"));
            }
        }
        if !(self.abs_tol >= 0.0 && self.abs_tol.is_finite()) {
            return Err(err("abs_tol", "must be non-negative"));
        }
        if !(self.omega_over_gamma >= 0.0 && self.omega_over_gamma.is_finite()) {
            return Err(err("omega_over_gamma", "must be non-negative"));
        }
        if self.z_in_min >= self.z_in_max {
            return Err(err("z_in_max", "must exceed z_in_min"));
        }
        self.scan().validate().map_err(core_key)?;
        self.map().validate().map_err(core_key)?;
        Ok(())
    }

    pub fn scan(&self) -> ScanConfig {
        ScanConfig {
            radius: self.radius,
            phi_min: self.phi_min,
            phi_max: self.phi_max,
            count: self.phi_steps,
            omega_over_gamma: self.omega_over_gamma,
        }
    }

    pub fn map(&self) -> MapGrid {
        MapGrid {
            x_min: self.map_x_min,
            x_max: self.map_x_max,
            nx: self.map_nx,
            z_min: self.map_z_min,
            z_max: self.map_z_max,
            nz: self.map_nz,
        }
    }

    /// `key=value` pairs in the order of [`KEYS`], readable back by
    /// [`RunConfig::resolve`].
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let values = [
            self.lambda_nm.to_string(),
            self.gamma.to_string(),
            self.detuning.to_string(),
            self.f.to_string(),
            self.z_in.to_string(),
            self.model.as_str().to_string(),
            self.policy.as_str().to_string(),
            self.radius.to_string(),
            self.phi_min.to_string(),
            self.phi_max.to_string(),
            self.phi_steps.to_string(),
            self.omega_over_gamma.to_string(),
            self.map_x_min.to_string(),
            self.map_x_max.to_string(),
            self.map_nx.to_string(),
            self.map_z_min.to_string(),
            self.map_z_max.to_string(),
            self.map_nz.to_string(),
            self.rel_tol.to_string(),
            self.abs_tol.to_string(),
            self.optimize.to_string(),
            self.z_in_min.to_string(),
            self.z_in_max.to_string(),
            self.opt_tol.to_string(),
            self.out.display().to_string(),
        ];
        KEYS.into_iter().zip(values).collect()
    }
}

/// Constraint violations found by the core carry the parameter name, which
/// matches the config key.
fn core_key(e: qaperture_core::Error) -> ConfigError {
    match e.root() {
        qaperture_core::Error::InvalidParameter { name, reason } => err(name, reason.clone()),
        other => err("config", other.to_string()),
    }
}
