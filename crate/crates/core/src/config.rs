//! Run configuration files.
//!
//! The format is flat `section.key = value` lines; `#` starts a comment and
//! blank lines are ignored. Every key is optional except `grid.nx`, and
//! unknown or repeated keys are rejected. Defaults:
//!
//! | key | default |
//! |---|---|
//! | `run.mode` | `single` (`viscosity`, `threshold`, `transient`, `ar_check`) |
//! | `run.t_end` | `1` |
//! | `params.*` | `eps = 0`, `theta = 2`, every other coefficient `1` |
//! | `grid.dim` / `nx` / `ny` / `lx` / `ly` | `2` / required / `nx` / `1` / `1` |
//! | `u0.kind` | `uniform` (`bump`) |
//! | `u0.value` | `1` |
//! | `u0.center_x`, `u0.center_y` | domain center |
//! | `u0.width` | `0.15` (support radius) |
//! | `u0.target_ltheta` | `1` (`∫u0^theta`) |
//! | `step.cfl` / `dt_max` / `dt_min` / `blowup_cutoff` | `0.4` / `1e-2` / `1e-12` / `1e6` |
//! | `solve.rel_tol` / `max_iter` / `preconditioner` | `1e-10` / `20 (nx + ny)` / `spectral` |
//! | `diag.q` / `diag.theta` / `diag.cadence` | `4` / `params.theta` / `1` |
//! | `sweep.variable` | implied by the mode |
//! | `sweep.values` | none (comma separated, required by sweep modes) |
//! | `sweep.t_end` | `run.t_end` |
//! | `sweep.seeds` / `sweep.workers` | `1` / `SIM_WORKERS` or `1` |
//! | `sweep.m`, `sweep.m_factor` | transient threshold, absolute or in units of `max u0` |
//! | `ar.chi`, `ar.xi` | required by `ar_check` |
//! | `output.dir` / `output.snapshot_every` | `out` / `0` (no snapshots) |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::diagnostics::DiagnosticsConfig;
use crate::dynamics::StepConfig;
use crate::elliptic::{Preconditioner, SolveConfig};
use crate::error::{Error, Result};
use crate::experiments::{SweepSpec, SweepVariable, U0Spec};
use crate::model::{ARParams, Grid, Params};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Single,
    Viscosity,
    Threshold,
    Transient,
    ArCheck,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Single => "single",
            Mode::Viscosity => "viscosity",
            Mode::Threshold => "threshold",
            Mode::Transient => "transient",
            Mode::ArCheck => "ar_check",
        }
    }

    pub fn is_sweep(&self) -> bool {
        matches!(self, Mode::Viscosity | Mode::Threshold | Mode::Transient)
    }

    fn sweep_variable(&self) -> Option<SweepVariable> {
        match self {
            Mode::Viscosity | Mode::Transient => Some(SweepVariable::Eps),
            Mode::Threshold => Some(SweepVariable::LthetaNorm),
            _ => None,
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "single" => Mode::Single,
            "viscosity" => Mode::Viscosity,
            "threshold" => Mode::Threshold,
            "transient" => Mode::Transient,
            "ar_check" => Mode::ArCheck,
            _ => return Err(format!("unknown mode `{s}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepBlock {
    pub variable: Option<SweepVariable>,
    pub values: Vec<f64>,
    pub t_end: Option<f64>,
    pub seeds: usize,
    pub workers: Option<usize>,
    pub m: Option<f64>,
    pub m_factor: Option<f64>,
}

impl Default for SweepBlock {
    fn default() -> Self {
        SweepBlock {
            variable: None,
            values: Vec::new(),
            t_end: None,
            seeds: 1,
            workers: None,
            m: None,
            m_factor: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputBlock {
    pub dir: PathBuf,
    /// Write `u_<step>.csv` every this many steps; `0` disables snapshots.
    pub snapshot_every: usize,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            dir: PathBuf::from("out"),
            snapshot_every: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub t_end: f64,
    pub params: Params,
    pub grid: Grid,
    pub u0: U0Spec,
    pub step: StepConfig,
    pub solve: SolveConfig,
    pub diag: DiagnosticsConfig,
    pub sweep: SweepBlock,
    pub ar: Option<(f64, f64)>,
    pub output: OutputBlock,
}

struct Entry {
    line: usize,
    value: String,
    used: bool,
}

struct Entries(BTreeMap<String, Entry>);

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.0.get_mut(key).map(|e| {
            e.used = true;
            (e.line, e.value.clone())
        })
    }

    fn parsed<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.take(key) {
            None => Ok(None),
            Some((line, raw)) => raw.parse::<T>().map(Some).map_err(|e| Error::Parse {
                line,
                msg: format!("bad value `{raw}` for `{key}`: {e}"),
            }),
        }
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.parsed::<f64>(key)?.unwrap_or(default))
    }

    fn list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, raw)) => raw
                .split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|e| Error::Parse {
                        line,
                        msg: format!("bad list entry `{}` for `{key}`: {e}", s.trim()),
                    })
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    fn line_of(&self, key: &str) -> usize {
        self.0.get(key).map_or(0, |e| e.line)
    }
}

const KNOWN_KEYS: &[&str] = &[
    "run.mode",
    "run.t_end",
    "params.eps",
    "params.r",
    "params.mu",
    "params.theta",
    "params.d1",
    "params.d2",
    "params.alpha",
    "params.beta",
    "params.gamma",
    "params.delta",
    "grid.dim",
    "grid.nx",
    "grid.ny",
    "grid.lx",
    "grid.ly",
    "u0.kind",
    "u0.value",
    "u0.center_x",
    "u0.center_y",
    "u0.width",
    "u0.target_ltheta",
    "step.cfl",
    "step.dt_max",
    "step.dt_min",
    "step.blowup_cutoff",
    "solve.rel_tol",
    "solve.max_iter",
    "solve.preconditioner",
    "diag.q",
    "diag.theta",
    "diag.cadence",
    "sweep.variable",
    "sweep.values",
    "sweep.t_end",
    "sweep.seeds",
    "sweep.workers",
    "sweep.m",
    "sweep.m_factor",
    "ar.chi",
    "ar.xi",
    "output.dir",
    "output.snapshot_every",
];

fn tokenize(text: &str) -> Result<Entries> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected `section.key = value`, found `{body}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::Parse {
                line,
                msg: format!("unknown key `{key}`"),
            });
        }
        if value.is_empty() {
            return Err(Error::Parse {
                line,
                msg: format!("missing value for `{key}`"),
            });
        }
        if map.contains_key(key) {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate key `{key}`"),
            });
        }
        map.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
                used: false,
            },
        );
    }
    Ok(Entries(map))
}

fn invalid(e: Error) -> Error {
    match e {
        Error::Domain(msg) | Error::Experiment(msg) => Error::Validation(msg),
        other => other,
    }
}

/// Parses and validates a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut e = tokenize(text)?;

    let mode = e.parsed::<Mode>("run.mode")?.unwrap_or(Mode::Single);
    let t_end = e.f64_or("run.t_end", 1.0)?;

    let d = Params::default();
    let params = Params {
        eps: e.f64_or("params.eps", d.eps)?,
        r: e.f64_or("params.r", d.r)?,
        mu: e.f64_or("params.mu", d.mu)?,
        theta: e.f64_or("params.theta", d.theta)?,
        d1: e.f64_or("params.d1", d.d1)?,
        d2: e.f64_or("params.d2", d.d2)?,
        alpha: e.f64_or("params.alpha", d.alpha)?,
        beta: e.f64_or("params.beta", d.beta)?,
        gamma: e.f64_or("params.gamma", d.gamma)?,
        delta: e.f64_or("params.delta", d.delta)?,
    };

    let dim = e.parsed::<usize>("grid.dim")?.unwrap_or(2);
    let nx = e
        .parsed::<usize>("grid.nx")?
        .ok_or_else(|| Error::Validation("grid.nx is required".into()))?;
    let lx = e.f64_or("grid.lx", 1.0)?;
    let grid = match dim {
        1 => {
            for key in ["grid.ny", "grid.ly"] {
                if e.take(key).is_some() {
                    return Err(Error::Parse {
                        line: e.line_of(key),
                        msg: format!("`{key}` is not used by a 1D grid"),
                    });
                }
            }
            Grid::new_1d(nx, lx)
        }
        2 => {
            let ny = e.parsed::<usize>("grid.ny")?.unwrap_or(nx);
            let ly = e.f64_or("grid.ly", 1.0)?;
            Grid::new_2d(nx, ny, lx, ly)
        }
        _ => return Err(Error::Validation("grid.dim must be 1 or 2".into())),
    }
    .map_err(invalid)?;

    let kind = e.take("u0.kind").map(|(_, v)| v);
    let u0 = match kind.as_deref().unwrap_or("uniform") {
        "uniform" => U0Spec::Uniform {
            value: e.f64_or("u0.value", 1.0)?,
        },
        "bump" => U0Spec::Bump {
            center: (
                e.f64_or("u0.center_x", 0.5 * grid.lx())?,
                e.f64_or("u0.center_y", 0.5 * grid.ly())?,
            ),
            width: e.f64_or("u0.width", 0.15)?,
            target_ltheta: e.f64_or("u0.target_ltheta", 1.0)?,
        },
        other => {
            return Err(Error::Parse {
                line: e.line_of("u0.kind"),
                msg: format!("unknown u0.kind `{other}` (uniform or bump)"),
            })
        }
    };

    let sd = StepConfig::default();
    let step = StepConfig {
        cfl: e.f64_or("step.cfl", sd.cfl)?,
        dt_max: e.f64_or("step.dt_max", sd.dt_max)?,
        dt_min: e.f64_or("step.dt_min", sd.dt_min)?,
        blowup_cutoff: e.f64_or("step.blowup_cutoff", sd.blowup_cutoff)?,
    };

    let ed = SolveConfig::default();
    let solve = SolveConfig {
        rel_tol: e.f64_or("solve.rel_tol", ed.rel_tol)?,
        max_iter: e.parsed::<usize>("solve.max_iter")?.or(ed.max_iter),
        preconditioner: e
            .parsed::<Preconditioner>("solve.preconditioner")?
            .unwrap_or(ed.preconditioner),
    };

    let dd = DiagnosticsConfig::for_params(&params);
    let diag = DiagnosticsConfig {
        q: e.f64_or("diag.q", dd.q)?,
        theta: e.f64_or("diag.theta", dd.theta)?,
        cadence: e.parsed::<usize>("diag.cadence")?.unwrap_or(dd.cadence),
    };

    let sweep = SweepBlock {
        variable: e.parsed::<SweepVariable>("sweep.variable")?,
        values: e.list("sweep.values")?.unwrap_or_default(),
        t_end: e.parsed::<f64>("sweep.t_end")?,
        seeds: e.parsed::<usize>("sweep.seeds")?.unwrap_or(1),
        workers: e.parsed::<usize>("sweep.workers")?,
        m: e.parsed::<f64>("sweep.m")?,
        m_factor: e.parsed::<f64>("sweep.m_factor")?,
    };

    let ar = match (e.parsed::<f64>("ar.chi")?, e.parsed::<f64>("ar.xi")?) {
        (Some(chi), Some(xi)) => Some((chi, xi)),
        (None, None) => None,
        _ => return Err(Error::Validation("ar.chi and ar.xi must be given together".into())),
    };

    let od = OutputBlock::default();
    let output = OutputBlock {
        dir: e.take("output.dir").map_or(od.dir, |(_, v)| PathBuf::from(v)),
        snapshot_every: e.parsed::<usize>("output.snapshot_every")?.unwrap_or(0),
    };

    // Keys valid in general but meaningless for the selected u0 kind.
    if let Some((key, entry)) = e.0.iter().find(|(_, en)| !en.used) {
        return Err(Error::Parse {
            line: entry.line,
            msg: format!("`{key}` does not apply to this configuration"),
        });
    }

    let cfg = RunConfig {
        mode,
        t_end,
        params,
        grid,
        u0,
        step,
        solve,
        diag,
        sweep,
        ar,
        output,
    };
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate().map_err(invalid)?;
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Validation("run.t_end must be positive".into()));
        }
        self.step.validate().map_err(invalid)?;
        self.solve.validate().map_err(invalid)?;
        self.diag.validate(self.grid.dim()).map_err(invalid)?;
        if self.output.dir.as_os_str().is_empty() {
            return Err(Error::Validation("output.dir must not be empty".into()));
        }
        if self.mode.is_sweep() {
            self.validate_sweep()?;
        } else {
            self.initial_density(0).map_err(invalid)?;
        }
        if self.mode == Mode::ArCheck {
            let arp = self
                .ar_params()
                .ok_or_else(|| Error::Validation("ar_check mode needs ar.chi and ar.xi".into()))?;
            arp.validate_basic().map_err(invalid)?;
        }
        Ok(())
    }

    fn validate_sweep(&self) -> Result<()> {
        let implied = self.mode.sweep_variable();
        if let (Some(v), Some(implied)) = (self.sweep.variable, implied) {
            if v != implied {
                return Err(Error::Validation(format!(
                    "{} mode sweeps `{implied}`, not `{v}`",
                    self.mode.as_str()
                )));
            }
        }
        if self.sweep.values.is_empty() {
            return Err(Error::Validation("sweep.values must not be empty".into()));
        }
        if self.sweep.workers == Some(0) {
            return Err(Error::Validation("sweep.workers must be at least 1".into()));
        }
        if self.mode == Mode::Transient {
            match (self.sweep.m, self.sweep.m_factor) {
                (Some(m), None) | (None, Some(m)) if m > 0.0 && m.is_finite() => {}
                (None, None) => {
                    return Err(Error::Validation(
                        "transient mode needs sweep.m or sweep.m_factor".into(),
                    ))
                }
                (Some(_), Some(_)) => {
                    return Err(Error::Validation(
                        "sweep.m and sweep.m_factor are mutually exclusive".into(),
                    ))
                }
                _ => return Err(Error::Validation("transient threshold must be positive".into())),
            }
        }
        if self.mode == Mode::Threshold && !matches!(self.u0, U0Spec::Bump { .. }) {
            return Err(Error::Validation("threshold mode needs u0.kind = bump".into()));
        }
        let spec = self.sweep_spec(1)?;
        spec.validate().map_err(invalid)?;
        for &v in &spec.values {
            spec.row_input(v, 0).map_err(invalid)?;
        }
        Ok(())
    }

    pub fn initial_density(&self, seed: u64) -> Result<crate::model::Field> {
        self.u0.build(&self.grid, self.params.theta, seed)
    }

    pub fn ar_params(&self) -> Option<ARParams> {
        self.ar.map(|(chi, xi)| ARParams {
            chi,
            xi,
            params: self.params,
        })
    }

    /// Horizon of the run: `sweep.t_end` if set in a sweep mode, else `run.t_end`.
    pub fn horizon(&self) -> f64 {
        match self.sweep.t_end {
            Some(t) if self.mode.is_sweep() => t,
            _ => self.t_end,
        }
    }

    /// Sweep specification; `workers` applies when `sweep.workers` is unset.
    pub fn sweep_spec(&self, workers: usize) -> Result<SweepSpec> {
        let variable = self
            .sweep
            .variable
            .or(self.mode.sweep_variable())
            .ok_or_else(|| Error::Validation("sweep.variable is required".into()))?;
        Ok(SweepSpec {
            grid: self.grid,
            base_params: self.params,
            base_u0: self.u0,
            variable,
            values: self.sweep.values.clone(),
            t_end: self.horizon(),
            seeds: self.sweep.seeds,
            step: self.step,
            solve: self.solve,
            diag: self.diag,
            workers: self.sweep.workers.unwrap_or(workers),
        })
    }

    /// Canonical text form; parsing it yields an equal configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: &dyn std::fmt::Display| {
            let _ = writeln!(s, "{k} = {v}");
        };
        let p = &self.params;
        kv("run.mode", &self.mode.as_str());
        kv("run.t_end", &self.t_end);
        kv("params.eps", &p.eps);
        kv("params.r", &p.r);
        kv("params.mu", &p.mu);
        kv("params.theta", &p.theta);
        kv("params.d1", &p.d1);
        kv("params.d2", &p.d2);
        kv("params.alpha", &p.alpha);
        kv("params.beta", &p.beta);
        kv("params.gamma", &p.gamma);
        kv("params.delta", &p.delta);
        let g = &self.grid;
        kv("grid.dim", &g.dim());
        kv("grid.nx", &g.nx());
        kv("grid.lx", &g.lx());
        if g.dim() == 2 {
            kv("grid.ny", &g.ny());
            kv("grid.ly", &g.ly());
        }
        match self.u0 {
            U0Spec::Uniform { value } => {
                kv("u0.kind", &"uniform");
                kv("u0.value", &value);
            }
            U0Spec::Bump {
                center,
                width,
                target_ltheta,
            } => {
                kv("u0.kind", &"bump");
                kv("u0.center_x", &center.0);
                kv("u0.center_y", &center.1);
                kv("u0.width", &width);
                kv("u0.target_ltheta", &target_ltheta);
            }
        }
        let st = &self.step;
        kv("step.cfl", &st.cfl);
        kv("step.dt_max", &st.dt_max);
        kv("step.dt_min", &st.dt_min);
        kv("step.blowup_cutoff", &st.blowup_cutoff);
        kv("solve.rel_tol", &self.solve.rel_tol);
        if let Some(m) = self.solve.max_iter {
            kv("solve.max_iter", &m);
        }
        kv("solve.preconditioner", &self.solve.preconditioner);
        kv("diag.q", &self.diag.q);
        kv("diag.theta", &self.diag.theta);
        kv("diag.cadence", &self.diag.cadence);
        let sw = &self.sweep;
        if let Some(v) = sw.variable {
            kv("sweep.variable", &v);
        }
        if !sw.values.is_empty() {
            let list: Vec<String> = sw.values.iter().map(f64::to_string).collect();
            kv("sweep.values", &list.join(", "));
        }
        if let Some(t) = sw.t_end {
            kv("sweep.t_end", &t);
        }
        kv("sweep.seeds", &sw.seeds);
        if let Some(w) = sw.workers {
            kv("sweep.workers", &w);
        }
        if let Some(m) = sw.m {
            kv("sweep.m", &m);
        }
        if let Some(m) = sw.m_factor {
            kv("sweep.m_factor", &m);
        }
        if let Some((chi, xi)) = self.ar {
            kv("ar.chi", &chi);
            kv("ar.xi", &xi);
        }
        kv("output.dir", &self.output.dir.display());
        kv("output.snapshot_every", &self.output.snapshot_every);
        s
    }
}
