//! The `simulate` command.
//!
//! Exit status: 0 when the run finished (a detected blow-up counts as a
//! result), 2 for usage, parse, validation or experiment errors, 3 for
//! solver or numerical failures, 4 for I/O failures.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde_json::json;

use crate::config::{parse_config, Mode, RunConfig};
use crate::dynamics::Simulation;
use crate::error::{Error, Result};
use crate::experiments::{ar_crosscheck, threshold_map, transient_growth, viscosity_vanishing};
use crate::model::m1;
use crate::output;

#[derive(Debug, Parser)]
#[command(name = "simulate", version, about = "Chemotaxis finite-volume simulator")]
pub struct Args {
    /// Run configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweep modes (overrides SIM_WORKERS).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Suppress the summary line.
    #[arg(long)]
    pub quiet: bool,
}

/// Worker count: `--workers`, then `SIM_WORKERS`, then `sweep.workers`, then 1.
pub fn resolve_workers(flag: Option<usize>, env: Option<&str>, cfg: &RunConfig) -> Result<usize> {
    let n = match (flag, env) {
        (Some(n), _) => n,
        (None, Some(raw)) => raw
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Validation(format!("SIM_WORKERS must be a positive integer, got `{raw}`")))?,
        (None, None) => cfg.sweep.workers.unwrap_or(1),
    };
    if n == 0 {
        return Err(Error::Validation("worker count must be at least 1".into()));
    }
    Ok(n)
}

/// Runs `cfg`, writing every result file into `out`. Returns a one-line summary.
pub fn execute(cfg: &RunConfig, out: &Path, workers: usize) -> Result<String> {
    output::ensure_dir(out)?;
    output::write_header(out, cfg)?;
    match cfg.mode {
        Mode::Single => run_single(cfg, out),
        Mode::Viscosity => {
            let mut spec = cfg.sweep_spec(workers)?;
            spec.workers = workers;
            let res = viscosity_vanishing(&spec)?;
            output::write_sweep(out, &res.sweep.rows, true)?;
            output::write_verdict(
                out,
                &json!({
                    "mode": "viscosity",
                    "gaps": res.gaps,
                    "nonincreasing": res.nonincreasing,
                    "strictly_decreasing": res.strictly_decreasing,
                    "reference": res.reference,
                }),
            )?;
            Ok(format!(
                "viscosity: {} rows, gaps strictly decreasing: {}",
                res.sweep.rows.len(),
                res.strictly_decreasing
            ))
        }
        Mode::Threshold => {
            let mut spec = cfg.sweep_spec(workers)?;
            spec.workers = workers;
            let res = threshold_map(&spec)?;
            output::write_sweep(out, &res.sweep.rows, false)?;
            output::write_verdict(
                out,
                &json!({
                    "mode": "threshold",
                    "highest_completed": res.highest_completed,
                    "lowest_blowup": res.lowest_blowup,
                    "monotone": res.monotone,
                }),
            )?;
            Ok(format!(
                "threshold: highest completed {:?}, lowest blow-up {:?}, monotone: {}",
                res.highest_completed, res.lowest_blowup, res.monotone
            ))
        }
        Mode::Transient => {
            let mut spec = cfg.sweep_spec(workers)?;
            spec.workers = workers;
            let threshold = match (cfg.sweep.m, cfg.sweep.m_factor) {
                (Some(m), _) => m,
                (None, Some(f)) => f * spec.row_input(spec.values[0], 0)?.1.max(),
                (None, None) => unreachable!("validated"),
            };
            let res = transient_growth(&spec, threshold)?;
            output::write_sweep(out, &res.sweep.rows, false)?;
            output::write_verdict(
                out,
                &json!({
                    "mode": "transient",
                    "threshold": res.threshold,
                    "eps0": res.eps0,
                    "persists": res.persists,
                    "peak_monotone": res.peak_monotone,
                }),
            )?;
            Ok(format!(
                "transient: M = {:.6e}, eps0 = {:?}, persists: {}",
                res.threshold, res.eps0, res.persists
            ))
        }
        Mode::ArCheck => {
            let arp = cfg.ar_params().expect("validated");
            let u0 = cfg.initial_density(0)?;
            let res = ar_crosscheck(&arp, &u0, cfg.t_end, &cfg.step, &cfg.solve)?;
            output::write_verdict(
                out,
                &json!({
                    "mode": "ar_check",
                    "compatible": arp.validate().is_ok(),
                    "reduced_alpha": arp.reduced_alpha(),
                    "max_deviation": res.max_deviation,
                    "steps": res.steps,
                    "terminal_time": res.terminal_time,
                    "verdict": res.verdict,
                }),
            )?;
            Ok(format!("ar_check: max deviation {:.3e} over {} steps", res.max_deviation, res.steps))
        }
    }
}

fn run_single(cfg: &RunConfig, out: &Path) -> Result<String> {
    let u0 = cfg.initial_density(0)?;
    let bound = m1(&cfg.params, &u0)?;
    let mut sim = Simulation::new(u0, &cfg.params, &cfg.step, &cfg.solve, &cfg.diag)?;
    let every = cfg.output.snapshot_every;
    if every > 0 {
        output::write_snapshot(out, 0, &sim.state().u)?;
    }
    let mut snap_err = None;
    sim.advance_to_with(cfg.t_end, |s| {
        if snap_err.is_none() && every > 0 && s.step_count % every == 0 {
            snap_err = output::write_snapshot(out, s.step_count, &s.u).err();
        }
    })?;
    if let Some(e) = snap_err {
        return Err(e);
    }
    let report = sim.finish();
    if every > 0 && report.steps % every != 0 {
        output::write_snapshot(out, report.steps, &report.final_state.u)?;
    }
    output::write_diagnostics(out, &report.records)?;
    output::write_verdict(
        out,
        &json!({
            "mode": "single",
            "verdict": report.verdict,
            "terminal_time": report.terminal_time,
            "terminal_umax": report.terminal_umax,
            "peak_umax": report.peak.umax,
            "peak_time": report.peak.t,
            "peak_cell": report.peak.cell,
            "steps": report.steps,
            "m1": bound,
            "mean_bound_ok": crate::diagnostics::check_mean_bound(&report.records, bound),
            "min_u": report.min_u,
            "max_mass_id_err": report.max_mass_id_err,
        }),
    )?;
    Ok(format!(
        "{} at t = {:.6e} after {} steps (max u = {:.6e})",
        report.verdict, report.terminal_time, report.steps, report.terminal_umax
    ))
}

fn run_args(args: &Args, env_workers: Option<&str>) -> Result<String> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| Error::io(&args.config, e))?;
    let cfg = parse_config(&text)?;
    let workers = resolve_workers(args.workers, env_workers, &cfg)?;
    let out = args.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
    execute(&cfg, &out, workers)
}

/// Entry point shared by the binary and the tests; returns the exit status.
pub fn main_with<I, T>(argv: I, env_workers: Option<&str>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_args(&args, env_workers) {
        Ok(summary) => {
            if !args.quiet {
                println!("{summary}");
            }
            0
        }
        Err(e) => {
            eprintln!("simulate: {e}");
            e.exit_code()
        }
    }
}
