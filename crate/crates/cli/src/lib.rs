//! Front end for the `sympcrit` binary: configuration, output files and the
//! check suites behind each subcommand.

pub mod config;
pub mod output;
pub mod suites;

use std::io::Write;
use std::path::{Path, PathBuf};

use sympcrit::flow::{run, FlowConfig, StopReason};
use sympcrit::{GeomError, GraphSurface};
use thiserror::Error;

pub use config::{parse_config, ConfigError, RunConfig};
pub use output::{emit_csv, emit_heatmap, HeatmapField, OutputError, CSV_HEADER};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    Ok(parse_config(&text)?)
}

pub fn initial_surface(cfg: &RunConfig) -> Result<GraphSurface, CliError> {
    Ok(cfg.preset().build(&cfg.grid())?)
}

fn stdout_err(source: std::io::Error) -> CliError {
    CliError::Io { path: PathBuf::from("<stdout>"), source }
}

/// Runs the flow and writes `diagnostics.csv`, `final.kaf` and one heatmap
/// per field of the final surface into `cfg.out`.
pub fn run_command(cfg: &RunConfig, out: &mut impl Write) -> Result<(), CliError> {
    let s = initial_surface(cfg)?;
    let flow_cfg = FlowConfig {
        dt_factor: cfg.dt_factor,
        t_end: cfg.t_end,
        record_every: cfg.record_every,
        tol_converged: cfg.tol_converged,
    };
    let result = run(s, &flow_cfg)?;
    std::fs::create_dir_all(&cfg.out).map_err(|source| CliError::Io { path: cfg.out.clone(), source })?;

    let csv = cfg.out.join("diagnostics.csv");
    emit_csv(&result.records, &csv)?;
    let grid_path = cfg.out.join("final.kaf");
    let file = std::fs::File::create(&grid_path).map_err(|source| CliError::Io { path: grid_path.clone(), source })?;
    result
        .final_state
        .surface
        .write_grid(std::io::BufWriter::new(file))
        .map_err(|source| CliError::Io { path: grid_path.clone(), source })?;

    let last = result.records.last().expect("run always records the final state");
    let stop = match result.stop {
        StopReason::ReachedEnd => "reached t_end",
        StopReason::Converged => "converged",
    };
    writeln!(
        out,
        "{} steps, dt {:e}, {stop} at t = {}; L = {}, min cos alpha = {}",
        result.final_state.step_count, result.dt, last.t, last.l, last.min_cos_alpha
    )
    .map_err(stdout_err)?;
    writeln!(out, "wrote {}", csv.display()).map_err(stdout_err)?;
    writeln!(out, "wrote {}", grid_path.display()).map_err(stdout_err)?;
    for field in HeatmapField::ALL {
        let path = cfg.out.join(format!("{field}.ppm"));
        let (lo, hi) = emit_heatmap(&result.final_state.surface, field, &path)?;
        writeln!(out, "wrote {} (min {lo}, max {hi})", path.display()).map_err(stdout_err)?;
    }
    Ok(())
}

pub fn check_identities_command(cfg: &RunConfig, out: &mut impl Write) -> Result<bool, CliError> {
    let s = initial_surface(cfg)?;
    let checks = suites::check_identities(cfg, &s)?;
    suites::report(&checks, out).map_err(stdout_err)
}

pub fn check_ellipticity_command(cfg: &RunConfig, out: &mut impl Write) -> Result<bool, CliError> {
    let st = suites::ellipticity_sampling(cfg.samples, cfg.seed)?;
    let pass = st.min_det > 0.0 && st.max_gap <= 1e-9;
    writeln!(
        out,
        "{} samples, seed {}: max relative |direct - closed form| = {:.3e} (tol 1e-9)",
        cfg.samples, cfg.seed, st.max_gap
    )
    .map_err(stdout_err)?;
    writeln!(out, "min det σ = {:.6e}, {}", st.min_det, if pass { "PASS" } else { "FAIL" }).map_err(stdout_err)?;
    Ok(pass)
}

pub fn convergence_order_command(cfg: &RunConfig, out: &mut impl Write) -> Result<bool, CliError> {
    let studies = suites::convergence_studies(cfg)?;
    let grids: Vec<String> = suites::REFINEMENTS
        .iter()
        .map(|&k| {
            let g = cfg.refined_grid(k);
            format!("{}x{}", g.nx, g.ny)
        })
        .collect();
    writeln!(out, "preset {} on grids {}", cfg.preset, grids.join(", ")).map_err(stdout_err)?;
    let checks: Vec<_> = studies.iter().map(|s| s.check()).collect();
    suites::report(&checks, out).map_err(stdout_err)
}
