//! Result files: `run.cfg`, `diagnostics.csv`, `verdict.json`, `sweep.csv`
//! and `u_<step>.csv` snapshots.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which parses
//! back to the identical double.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::experiments::SweepRow;
use crate::model::Field;

pub const DIAGNOSTICS_HEADER: &str = "t,mass,mean,umax,ltheta,w1q,mass_id_err,dt";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn diagnostics_csv(records: &[DiagnosticsRecord]) -> String {
    let mut s = String::with_capacity(64 + records.len() * 200);
    s.push_str(DIAGNOSTICS_HEADER);
    s.push('\n');
    for r in records {
        let cols = [r.t, r.mass, r.mean, r.umax, r.ltheta, r.w1q, r.mass_id_err, r.dt];
        let line: Vec<String> = cols.iter().map(|&x| fmt_f64(x)).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

pub fn write_diagnostics(dir: &Path, records: &[DiagnosticsRecord]) -> Result<PathBuf> {
    let path = dir.join("diagnostics.csv");
    write_text(&path, &diagnostics_csv(records))?;
    Ok(path)
}

/// Parses a `diagnostics.csv` body back into records.
pub fn parse_diagnostics_csv(text: &str) -> Result<Vec<DiagnosticsRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == DIAGNOSTICS_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "missing diagnostics header".into(),
            })
        }
    }
    lines
        .map(|(n, line)| {
            let v: Vec<f64> = line
                .split(',')
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    line: n + 1,
                    msg: format!("{e}"),
                })?;
            if v.len() != 8 {
                return Err(Error::Parse {
                    line: n + 1,
                    msg: format!("expected 8 columns, found {}", v.len()),
                });
            }
            Ok(DiagnosticsRecord {
                t: v[0],
                mass: v[1],
                mean: v[2],
                umax: v[3],
                ltheta: v[4],
                w1q: v[5],
                mass_id_err: v[6],
                dt: v[7],
            })
        })
        .collect()
}

/// One grid row per line, `i` running along each line.
pub fn snapshot_csv(u: &Field) -> String {
    let nx = u.grid().nx();
    let mut s = String::new();
    for row in u.values().chunks(nx) {
        let line: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

pub fn write_snapshot(dir: &Path, step: usize, u: &Field) -> Result<()> {
    write_text(&dir.join(format!("u_{step}.csv")), &snapshot_csv(u))
}

/// Config echo with version and grid stamp; it parses as a config file.
pub fn header_text(cfg: &RunConfig) -> String {
    let g = &cfg.grid;
    let mut s = String::new();
    let _ = writeln!(s, "# {}", crate::VERSION);
    if g.dim() == 1 {
        let _ = writeln!(s, "# grid 1d nx={} lx={} hx={}", g.nx(), g.lx(), g.hx());
    } else {
        let _ = writeln!(
            s,
            "# grid 2d nx={} ny={} lx={} ly={} hx={} hy={}",
            g.nx(),
            g.ny(),
            g.lx(),
            g.ly(),
            g.hx(),
            g.hy()
        );
    }
    s.push_str(&cfg.to_text());
    s
}

pub fn write_header(dir: &Path, cfg: &RunConfig) -> Result<()> {
    write_text(&dir.join("run.cfg"), &header_text(cfg))
}

pub fn write_verdict(dir: &Path, verdict: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(verdict).expect("json values always serialize");
    text.push('\n');
    write_text(&dir.join("verdict.json"), &text)
}

pub fn sweep_csv(rows: &[SweepRow], with_sup_err: bool) -> String {
    let mut s = String::from(
        "value,seed,verdict,terminal_time,peak_umax,peak_time,peak_cell,final_mass,final_mean,final_umax,final_ltheta,m1,mean_bound_ok,min_u,max_mass_id_err",
    );
    if with_sup_err {
        s.push_str(",sup_err");
    }
    s.push('\n');
    for r in rows {
        let f = r.final_record;
        let pick = |g: fn(&DiagnosticsRecord) -> f64| f.as_ref().map_or(f64::NAN, g);
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.value),
            r.seed,
            r.verdict,
            fmt_f64(r.terminal_time),
            fmt_f64(r.peak.umax),
            fmt_f64(r.peak.t),
            r.peak.cell,
            fmt_f64(pick(|d| d.mass)),
            fmt_f64(pick(|d| d.mean)),
            fmt_f64(pick(|d| d.umax)),
            fmt_f64(pick(|d| d.ltheta)),
            fmt_f64(r.m1),
            r.mean_bound_ok,
            fmt_f64(r.min_u),
            fmt_f64(r.max_mass_id_err),
        );
        if with_sup_err {
            let _ = write!(s, ",{}", fmt_f64(r.sup_err.unwrap_or(f64::NAN)));
        }
        s.push('\n');
    }
    s
}

pub fn write_sweep(dir: &Path, rows: &[SweepRow], with_sup_err: bool) -> Result<()> {
    write_text(&dir.join("sweep.csv"), &sweep_csv(rows, with_sup_err))
}
