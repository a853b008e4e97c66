mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use qaperture_core::coupling::{coupling_report, optimize_zin};
use qaperture_core::diagnostics;
use qaperture_core::focusing::find_focus;
use qaperture_core::numerics::QuadratureSpec;
use qaperture_core::observables::{angular_scan, focal_map};
use qaperture_core::{AtomSpec, BeamSpec, CouplingReport, FocusedBeam, Scene};
use serde::Serialize;

use config::{ConfigError, RunConfig};
use output::Artifacts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    FocalMap,
    AngularScan,
    Coupling,
    Check,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::FocalMap => "focal-map",
            Command::AngularScan => "angular-scan",
            Command::Coupling => "coupling",
            Command::Check => "check",
        }
    }
}

/// Focused vector beams driving a single atom: focal maps, angular scans of
/// intensity and g2, coupling efficiency.
#[derive(Debug, Parser)]
#[command(name = "qaperture", version)]
struct Cli {
    command: Command,
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Focal length in wavelengths.
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    /// Input beam Rayleigh range in wavelengths.
    #[arg(long, allow_hyphen_values = true)]
    z_in: Option<String>,
    /// exact or paraxial.
    #[arg(long)]
    model: Option<String>,
    /// Detector distance from the atom in wavelengths.
    #[arg(long, allow_hyphen_values = true)]
    radius: Option<String>,
    /// Number of detector angles.
    #[arg(long, allow_hyphen_values = true)]
    phi_steps: Option<String>,
    /// Maximize the scattering ratio over z_in (coupling only).
    #[arg(long)]
    optimize: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(qaperture_core::Error),
    #[error("{failed} invariant check(s) failed")]
    Checks { failed: usize },
}

impl From<qaperture_core::Error> for CliError {
    fn from(e: qaperture_core::Error) -> Self {
        match e.root() {
            qaperture_core::Error::InvalidParameter { name, reason } => CliError::Config(ConfigError {
                key: name.to_string(),
                reason: reason.clone(),
            }),
            _ => CliError::Numerical(e),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Checks { .. } => 1,
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| ConfigError {
            key: "config".into(),
            reason: format!("{}: {e}", path.display()),
        })?,
        None => String::new(),
    };
    let mut overrides = Vec::new();
    let flags = [
        ("f", &cli.f),
        ("z_in", &cli.z_in),
        ("model", &cli.model),
        ("radius", &cli.radius),
        ("phi_steps", &cli.phi_steps),
        ("out", &cli.out),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            overrides.push((key, v.clone()));
        }
    }
    if cli.optimize {
        overrides.push(("optimize", "true".into()));
    }
    RunConfig::resolve(&text, &overrides)
}

fn beam(cfg: &RunConfig) -> Result<FocusedBeam, CliError> {
    let spec = BeamSpec::new(cfg.f, cfg.z_in, cfg.model)?;
    Ok(FocusedBeam::with_quadrature(spec, QuadratureSpec::new(cfg.rel_tol, cfg.abs_tol))?)
}

fn atom(cfg: &RunConfig) -> AtomSpec {
    AtomSpec {
        lambda_nm: cfg.lambda_nm,
        gamma: cfg.gamma,
        detuning: cfg.detuning,
        position: [0.0; 3],
    }
}

#[derive(Serialize)]
struct CouplingOutput {
    report: CouplingReport,
    optimized: bool,
    at_boundary: Option<bool>,
}

fn run(command: Command, cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let out = Artifacts::new(command.name(), cfg)?;
    match command {
        Command::FocalMap => {
            let beam = beam(cfg)?;
            let cells = focal_map(&beam, &cfg.map())?;
            let spot = find_focus(&beam, None)?;
            let rows = cells.iter().map(|c| [c.x, c.z_rel, c.plus, c.total]);
            out.csv("focal_map", &["x", "z_rel", "I_plus", "I_total"], rows, &spot)
        }
        Command::AngularScan => {
            let scene = Scene::at_focus(beam(cfg)?, atom(cfg), cfg.omega_over_gamma)?;
            let res = angular_scan(&scene, &cfg.scan())?;
            let rows = res
                .rows
                .iter()
                .map(|r| [r.phi, r.i_laser, r.i_dipole, r.i_interference, r.i_total, r.g2]);
            out.csv(
                "angular_scan",
                &["phi_rad", "I_L", "I_d", "I_int", "I_total", "g2"],
                rows,
                &res.summary,
            )
        }
        Command::Coupling => {
            let atom = atom(cfg);
            let (z_in, at_boundary) = if cfg.optimize {
                let best = optimize_zin(cfg.f, (cfg.z_in_min, cfg.z_in_max), cfg.opt_tol, cfg.model, cfg.policy)?;
                (best.report.z_in, Some(best.at_boundary))
            } else {
                (cfg.z_in, None)
            };
            let spec = BeamSpec::new(cfg.f, z_in, cfg.model)?;
            let report = coupling_report(spec, cfg.policy, Some((&atom, cfg.omega_over_gamma)))?;
            let result = CouplingOutput {
                report,
                optimized: cfg.optimize,
                at_boundary,
            };
            println!("R_s = {} at f = {}, z_in = {}", report.r_s, report.f, report.z_in);
            out.json("coupling", &result)
        }
        Command::Check => {
            let spec = BeamSpec::new(cfg.f, cfg.z_in, cfg.model)?;
            let checks = diagnostics::run_all(&spec)?;
            for c in &checks {
                println!(
                    "{} {}: {:e} (tolerance {:e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.tolerance
                );
            }
            let paths = out.json("check", &checks)?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(CliError::Checks { failed });
            }
            Ok(paths)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = resolve(&cli)
        .map_err(CliError::from)
        .and_then(|cfg| run(cli.command, &cfg));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
