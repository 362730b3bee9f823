//! Parameter sweeps: vanishing viscosity, blow-up threshold maps, transient
//! growth and the attraction-repulsion cross-check.
//!
//! Rows of a sweep are independent runs. They execute on a private rayon pool
//! and are sorted by `(value, seed)` before they are returned, so the output
//! does not depend on the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{check_mean_bound, DiagnosticsConfig, DiagnosticsRecord};
use crate::dynamics::{advance, step_capped, Peak, RunReport, RunVerdict, SimState, Simulation, StepConfig, StepVerdict};
use crate::elliptic::SolveConfig;
use crate::error::{Error, Result};
use crate::model::{make_bump, m1, ARParams, Field, Grid, Params};

/// Initial density recipe; `seed > 0` jitters the bump center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum U0Spec {
    Uniform { value: f64 },
    Bump { center: (f64, f64), width: f64, target_ltheta: f64 },
}

impl U0Spec {
    pub fn build(&self, grid: &Grid, theta: f64, seed: u64) -> Result<Field> {
        match *self {
            U0Spec::Uniform { value } => {
                if !(value.is_finite() && value > 0.0) {
                    return Err(Error::domain("uniform initial value must be positive"));
                }
                Ok(Field::constant(*grid, value))
            }
            U0Spec::Bump {
                center,
                width,
                target_ltheta,
            } => {
                let center = if seed == 0 {
                    center
                } else {
                    jitter(grid, center, width, seed)
                };
                make_bump(grid, center, width, target_ltheta, theta)
            }
        }
    }
}

fn jitter(grid: &Grid, center: (f64, f64), width: f64, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shift = |c: f64, len: f64| {
        let s: f64 = rng.random_range(-0.5..0.5) * width;
        (c + s).clamp(0.0, len)
    };
    let x = shift(center.0, grid.lx());
    let y = if grid.dim() == 2 {
        shift(center.1, grid.ly())
    } else {
        center.1
    };
    (x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Eps,
    LthetaNorm,
    Theta,
}

impl std::str::FromStr for SweepVariable {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "eps" => Ok(SweepVariable::Eps),
            "ltheta_norm" => Ok(SweepVariable::LthetaNorm),
            "theta" => Ok(SweepVariable::Theta),
            other => Err(format!("unknown sweep variable `{other}`")),
        }
    }
}

impl std::fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepVariable::Eps => "eps",
            SweepVariable::LthetaNorm => "ltheta_norm",
            SweepVariable::Theta => "theta",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub grid: Grid,
    pub base_params: Params,
    pub base_u0: U0Spec,
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub t_end: f64,
    pub seeds: usize,
    pub step: StepConfig,
    pub solve: SolveConfig,
    pub diag: DiagnosticsConfig,
    pub workers: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Validation("sweep.values must not be empty".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("sweep.values must be finite".into()));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Validation("sweep t_end must be positive".into()));
        }
        if self.seeds == 0 {
            return Err(Error::Validation("sweep.seeds must be at least 1".into()));
        }
        self.base_params.validate()?;
        self.step.validate()?;
        self.solve.validate()?;
        Ok(())
    }

    /// Parameters and initial density of row `(value, seed)`.
    pub fn row_input(&self, value: f64, seed: u64) -> Result<(Params, Field)> {
        let mut p = self.base_params;
        let mut u0 = self.base_u0;
        match self.variable {
            SweepVariable::Eps => p.eps = value,
            SweepVariable::Theta => p.theta = value,
            SweepVariable::LthetaNorm => match &mut u0 {
                U0Spec::Bump { target_ltheta, .. } => *target_ltheta = value,
                U0Spec::Uniform { .. } => {
                    return Err(Error::Experiment(
                        "an ltheta_norm sweep needs a bump initial density".into(),
                    ))
                }
            },
        }
        p.validate()?;
        let field = u0.build(&self.grid, p.theta, seed)?;
        Ok((p, field))
    }

    fn diag_for(&self, p: &Params) -> DiagnosticsConfig {
        DiagnosticsConfig {
            theta: p.theta,
            ..self.diag
        }
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers.max(1))
            .build()
            .map_err(|e| Error::Experiment(format!("cannot start worker pool: {e}")))
    }

    /// Sorted `(value, seed)` pairs.
    fn row_keys(&self) -> Vec<(f64, u64)> {
        let mut values = self.values.clone();
        values.sort_by(f64::total_cmp);
        values
            .into_iter()
            .flat_map(|v| (0..self.seeds as u64).map(move |s| (v, s)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub seed: u64,
    pub verdict: RunVerdict,
    pub terminal_time: f64,
    /// Largest `max u` over the run, with its cell and time.
    pub peak: Peak,
    pub final_record: Option<DiagnosticsRecord>,
    pub m1: f64,
    pub mean_bound_ok: bool,
    pub min_u: f64,
    pub max_mass_id_err: f64,
    /// `max_t ‖u_eps − u_0‖_∞`, viscosity sweeps only.
    pub sup_err: Option<f64>,
}

impl SweepRow {
    fn from_report(value: f64, seed: u64, m1: f64, report: &RunReport) -> Self {
        SweepRow {
            value,
            seed,
            verdict: report.verdict,
            terminal_time: report.terminal_time,
            peak: report.peak,
            final_record: report.records.last().copied(),
            m1,
            mean_bound_ok: check_mean_bound(&report.records, m1),
            min_u: report.min_u,
            max_mass_id_err: report.max_mass_id_err,
            sup_err: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub variable: SweepVariable,
    pub rows: Vec<SweepRow>,
}

/// Runs a single row of `spec`; the sweep functions call this per row.
pub fn run_row(spec: &SweepSpec, value: f64, seed: u64) -> Result<(SweepRow, RunReport)> {
    let (p, u0) = spec.row_input(value, seed)?;
    let bound = m1(&p, &u0)?;
    let mut sim = Simulation::new(u0, &p, &spec.step, &spec.solve, &spec.diag_for(&p))?;
    sim.advance_to(spec.t_end)?;
    let report = sim.finish();
    Ok((SweepRow::from_report(value, seed, bound, &report), report))
}

/// Runs every `(value, seed)` row.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let keys = spec.row_keys();
    let rows = spec.pool()?.install(|| {
        keys.par_iter()
            .map(|&(v, s)| run_row(spec, v, s).map(|(row, _)| row))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SweepResult {
        variable: spec.variable,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViscosityResult {
    pub sweep: SweepResult,
    /// Reference (`eps = 0`) rows, one per seed.
    pub reference: Vec<SweepRow>,
    /// `(eps_j, e_j)` for seed 0 in decreasing eps order.
    pub gaps: Vec<(f64, f64)>,
    pub nonincreasing: bool,
    pub strictly_decreasing: bool,
    pub sample_times: Vec<f64>,
}

const VISCOSITY_SAMPLES: usize = 50;

/// Snapshots of `u` at `times`, or `None` if the run stops early.
fn sampled_run(
    spec: &SweepSpec,
    p: &Params,
    u0: Field,
    times: &[f64],
) -> Result<(Vec<Field>, RunReport, bool)> {
    let mut sim = Simulation::new(u0, p, &spec.step, &spec.solve, &spec.diag_for(p))?;
    let mut snaps = vec![sim.state().u.clone()];
    let mut stopped = false;
    for &t in &times[1..] {
        if sim.advance_to(t)?.is_some() {
            stopped = true;
            break;
        }
        snaps.push(sim.state().u.clone());
    }
    Ok((snaps, sim.finish(), stopped))
}

/// Compares the `eps > 0` family against the `eps = 0` run on a common set of
/// sample times (each run lands exactly on them).
pub fn viscosity_vanishing(spec: &SweepSpec) -> Result<ViscosityResult> {
    spec.validate()?;
    if spec.variable != SweepVariable::Eps {
        return Err(Error::Experiment("viscosity sweep must vary eps".into()));
    }
    if spec.values.iter().any(|&e| e <= 0.0) {
        return Err(Error::Experiment("viscosity sweep needs eps > 0".into()));
    }
    let times: Vec<f64> = (0..=VISCOSITY_SAMPLES)
        .map(|k| spec.t_end * k as f64 / VISCOSITY_SAMPLES as f64)
        .collect();
    let pool = spec.pool()?;

    let references = pool.install(|| {
        (0..spec.seeds as u64)
            .into_par_iter()
            .map(|seed| -> Result<(SweepRow, Vec<Field>)> {
                let (p, u0) = spec.row_input(0.0, seed)?;
                let bound = m1(&p, &u0)?;
                let (snaps, report, stopped) = sampled_run(spec, &p, u0, &times)?;
                if stopped {
                    return Err(Error::Experiment(format!(
                        "reference run (eps = 0, seed {seed}) stopped with {} at t = {} before t_end = {}",
                        report.verdict, report.terminal_time, spec.t_end
                    )));
                }
                Ok((SweepRow::from_report(0.0, seed, bound, &report), snaps))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let keys = spec.row_keys();
    let rows = pool.install(|| {
        keys.par_iter()
            .map(|&(eps, seed)| -> Result<SweepRow> {
                let (p, u0) = spec.row_input(eps, seed)?;
                let bound = m1(&p, &u0)?;
                let (snaps, report, stopped) = sampled_run(spec, &p, u0, &times)?;
                let reference = &references[seed as usize].1;
                let mut err = snaps
                    .iter()
                    .zip(reference)
                    .fold(0.0, |m, (a, b)| f64::max(m, a.max_abs_diff(b)));
                if stopped {
                    err = f64::INFINITY;
                }
                let mut row = SweepRow::from_report(eps, seed, bound, &report);
                row.sup_err = Some(err);
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut gaps: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.seed == 0)
        .map(|r| (r.value, r.sup_err.unwrap_or(f64::INFINITY)))
        .collect();
    gaps.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut nonincreasing = true;
    let mut strictly_decreasing = true;
    for seed in 0..spec.seeds as u64 {
        let mut errs: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.seed == seed)
            .map(|r| (r.value, r.sup_err.unwrap_or(f64::INFINITY)))
            .collect();
        errs.sort_by(|a, b| b.0.total_cmp(&a.0));
        for pair in errs.windows(2) {
            nonincreasing &= pair[1].1 <= pair[0].1;
            strictly_decreasing &= pair[1].1 < pair[0].1;
        }
    }
    Ok(ViscosityResult {
        sweep: SweepResult {
            variable: SweepVariable::Eps,
            rows,
        },
        reference: references.into_iter().map(|(row, _)| row).collect(),
        gaps,
        nonincreasing,
        strictly_decreasing,
        sample_times: times,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub sweep: SweepResult,
    pub highest_completed: Option<f64>,
    pub lowest_blowup: Option<f64>,
    /// No completed row lies above the lowest blow-up row.
    pub monotone: bool,
}

/// Maps verdicts against the `L^theta` size of the initial bump (`eps = 0`).
pub fn threshold_map(spec: &SweepSpec) -> Result<ThresholdResult> {
    if spec.variable != SweepVariable::LthetaNorm {
        return Err(Error::Experiment("threshold map must vary ltheta_norm".into()));
    }
    let p = &spec.base_params;
    if p.eps != 0.0 {
        return Err(Error::Experiment("threshold map runs the eps = 0 system".into()));
    }
    if !(p.theta > 1.0 && p.theta <= 2.0) {
        return Err(Error::Experiment("threshold map needs theta in (1, 2]".into()));
    }
    let sweep = run_sweep(spec)?;
    let highest_completed = sweep
        .rows
        .iter()
        .filter(|r| !r.verdict.is_blowup())
        .map(|r| r.value)
        .reduce(f64::max);
    let lowest_blowup = sweep
        .rows
        .iter()
        .filter(|r| r.verdict.is_blowup())
        .map(|r| r.value)
        .reduce(f64::min);
    let monotone = match (highest_completed, lowest_blowup) {
        (Some(c), Some(b)) => c < b,
        (None, None) => {
            return Err(Error::Experiment(
                "degenerate threshold sweep: no row completed and none blew up".into(),
            ))
        }
        _ => true,
    };
    Ok(ThresholdResult {
        sweep,
        highest_completed,
        lowest_blowup,
        monotone,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransientResult {
    pub sweep: SweepResult,
    pub threshold: f64,
    /// Largest tested eps whose runs (every seed) exceed the threshold.
    pub eps0: Option<f64>,
    /// Every tested eps below `eps0` also exceeds the threshold.
    pub persists: bool,
    /// Observed only: run peak is nondecreasing as eps decreases.
    pub peak_monotone: bool,
}

impl TransientResult {
    pub fn exceeds(&self, row: &SweepRow) -> bool {
        row.peak.umax > self.threshold
    }
}

/// For each eps: does the run ever exceed `threshold` somewhere?
pub fn transient_growth(spec: &SweepSpec, threshold: f64) -> Result<TransientResult> {
    if spec.variable != SweepVariable::Eps {
        return Err(Error::Experiment("transient growth sweep must vary eps".into()));
    }
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::Experiment("threshold M must be positive".into()));
    }
    let sweep = run_sweep(spec)?;
    let mut eps_desc: Vec<f64> = spec.values.clone();
    eps_desc.sort_by(|a, b| b.total_cmp(a));
    eps_desc.dedup();
    let qualifies = |eps: f64| {
        sweep
            .rows
            .iter()
            .filter(|r| r.value == eps)
            .all(|r| r.peak.umax > threshold)
    };
    let flags: Vec<bool> = eps_desc.iter().map(|&e| qualifies(e)).collect();
    let first = flags.iter().position(|&f| f);
    let eps0 = first.map(|k| eps_desc[k]);
    let persists = first.is_some_and(|k| flags[k..].iter().all(|&f| f));
    let mut peak_monotone = true;
    for seed in 0..spec.seeds as u64 {
        let peaks: Vec<f64> = eps_desc
            .iter()
            .filter_map(|&e| {
                sweep
                    .rows
                    .iter()
                    .find(|r| r.value == e && r.seed == seed)
                    .map(|r| r.peak.umax)
            })
            .collect();
        peak_monotone &= peaks.windows(2).all(|w| w[1] >= w[0]);
    }
    Ok(TransientResult {
        sweep,
        threshold,
        eps0,
        persists,
        peak_monotone,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckResult {
    /// `max_t ‖u_AR − u_reduced‖_∞`
    pub max_deviation: f64,
    pub steps: usize,
    pub terminal_time: f64,
    pub verdict: RunVerdict,
}

/// Runs the attraction-repulsion system and its reduced form side by side
/// with the step sizes chosen by the reduced run.
///
/// Compatibility `xi gamma = chi alpha` is deliberately not enforced here,
/// so that violated parameter sets can serve as a negative control.
pub fn ar_crosscheck(
    arp: &ARParams,
    u0: &Field,
    t_end: f64,
    scfg: &StepConfig,
    ecfg: &SolveConfig,
) -> Result<CrosscheckResult> {
    scfg.validate()?;
    ecfg.validate()?;
    let reduced = arp.reduce_unchecked()?;
    let mut red = SimState::new(u0.clone(), &reduced, ecfg)?;
    let mut ar = SimState::with_model(u0.clone(), arp, ecfg)?;
    let mut max_deviation = ar.u.max_abs_diff(&red.u);
    let mut verdict = RunVerdict::Completed;
    while t_end - red.t > scfg.dt_min {
        let outcome = step_capped(&red, &reduced, scfg, ecfg, t_end - red.t)?;
        if outcome.verdict == StepVerdict::StepUnderflow {
            verdict = RunVerdict::StepUnderflow;
            break;
        }
        red = outcome.state;
        ar = advance(&ar, &arp.params, red.dt_last, ecfg, arp)?;
        max_deviation = max_deviation.max(ar.u.max_abs_diff(&red.u));
        if outcome.verdict == StepVerdict::BlowupDetected {
            verdict = RunVerdict::BlowupDetected;
            break;
        }
    }
    Ok(CrosscheckResult {
        max_deviation,
        steps: red.step_count,
        terminal_time: red.t,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Strong aggregation, weak quadratic damping: concentrated bumps collapse
    /// to the grid scale quickly on a 64² mesh.
    pub(crate) fn aggregating() -> Params {
        Params {
            eps: 0.0,
            r: 1.0,
            mu: 0.1,
            theta: 2.0,
            d1: 1.0,
            d2: 1e-3,
            alpha: 20.0,
            beta: 1.0,
            gamma: 1.0,
            delta: 1.0,
        }
    }

    fn spec(grid: Grid, p: Params, variable: SweepVariable, values: Vec<f64>, t_end: f64) -> SweepSpec {
        SweepSpec {
            grid,
            base_params: p,
            base_u0: U0Spec::Bump {
                center: (0.5, 0.5),
                width: 0.15,
                target_ltheta: 1.0,
            },
            variable,
            values,
            t_end,
            seeds: 1,
            step: StepConfig::default(),
            solve: SolveConfig::default(),
            diag: DiagnosticsConfig {
                cadence: 10,
                ..DiagnosticsConfig::for_params(&p)
            },
            workers: 2,
        }
    }

    #[test]
    fn uniform_state_is_viscosity_independent() {
        let g = Grid::unit(2, 16).unwrap();
        let mut s = spec(g, Params::default(), SweepVariable::Eps, vec![0.1, 0.05], 0.5);
        s.base_u0 = U0Spec::Uniform { value: 2.0 };
        let res = viscosity_vanishing(&s).unwrap();
        for (_, e) in &res.gaps {
            // different dt sequences only
            assert!(*e < 1e-2 * 0.5, "{e}");
        }
    }

    #[test]
    fn viscosity_gaps_shrink_with_eps() {
        let g = Grid::unit(2, 32).unwrap();
        let mut s = spec(g, Params::default(), SweepVariable::Eps, vec![0.1, 0.05, 0.025, 0.0125], 0.3);
        s.base_u0 = U0Spec::Bump {
            center: (0.5, 0.5),
            width: 0.3,
            target_ltheta: 20.0,
        };
        let res = viscosity_vanishing(&s).unwrap();
        assert!(res.strictly_decreasing, "{:?}", res.gaps);
        let e: Vec<f64> = res.gaps.iter().map(|g| g.1).collect();
        for j in 0..e.len() - 2 {
            assert!(e[j] < 5.0 * e[j + 2]);
        }
        assert!(res.reference[0].mean_bound_ok);
    }

    #[test]
    fn viscosity_rejects_blowing_reference() {
        let g = Grid::unit(2, 64).unwrap();
        let mut s = spec(g, aggregating(), SweepVariable::Eps, vec![0.01], 0.05);
        s.step.blowup_cutoff = 1e4;
        s.base_u0 = U0Spec::Bump {
            center: (0.5, 0.5),
            width: 0.15,
            target_ltheta: 5000.0,
        };
        assert!(matches!(viscosity_vanishing(&s), Err(Error::Experiment(_))));
    }

    #[test]
    fn threshold_map_has_monotone_band() {
        let g = Grid::unit(2, 64).unwrap();
        let p = aggregating();
        let smallest = 0.1 * (p.r / p.mu).powf(p.theta / (p.theta - 1.0)) * g.measure();
        let mut s = spec(g, p, SweepVariable::LthetaNorm, vec![smallest, 1.0, 5000.0, 1e4], 0.5);
        s.step.blowup_cutoff = 1e4;
        let res = threshold_map(&s).unwrap();
        assert!(res.monotone, "{:?}", res);
        let first = &res.sweep.rows[0];
        assert_eq!(first.verdict, RunVerdict::Completed);
        let last = res.sweep.rows.last().unwrap();
        assert_eq!(last.verdict, RunVerdict::BlowupDetected);
        assert!(last.terminal_time < s.t_end);
        for row in &res.sweep.rows {
            assert!(row.mean_bound_ok, "{row:?}");
            assert!(row.min_u >= 0.0);
        }
    }

    #[test]
    fn threshold_map_requires_hyperbolic_subquadratic_setup() {
        let g = Grid::unit(2, 8).unwrap();
        let p = Params {
            eps: 0.1,
            ..Params::default()
        };
        let s = spec(g, p, SweepVariable::LthetaNorm, vec![1.0], 0.1);
        assert!(threshold_map(&s).is_err());
        let p = Params {
            theta: 2.5,
            ..Params::default()
        };
        let s = spec(g, p, SweepVariable::LthetaNorm, vec![1.0], 0.1);
        assert!(threshold_map(&s).is_err());
    }

    #[test]
    fn sweep_rows_are_reproducible_and_sorted() {
        let g = Grid::unit(2, 16).unwrap();
        let mut s = spec(g, Params::default(), SweepVariable::Eps, vec![0.05, 0.01], 0.2);
        s.seeds = 2;
        s.workers = 3;
        let res = run_sweep(&s).unwrap();
        let keys: Vec<(f64, u64)> = res.rows.iter().map(|r| (r.value, r.seed)).collect();
        assert_eq!(keys, vec![(0.01, 0), (0.01, 1), (0.05, 0), (0.05, 1)]);
        for row in &res.rows {
            let (again, _) = run_row(&s, row.value, row.seed).unwrap();
            assert_eq!(&again, row);
        }
        // jittered seeds move the bump
        assert_ne!(res.rows[0].peak.cell, res.rows[1].peak.cell);
        s.workers = 1;
        assert_eq!(run_sweep(&s).unwrap(), res);
    }

    #[test]
    fn transient_threshold_below_initial_peak() {
        let g = Grid::unit(2, 16).unwrap();
        let s = spec(g, Params::default(), SweepVariable::Eps, vec![0.1, 0.01], 0.1);
        let u0 = s.row_input(0.1, 0).unwrap().1;
        let res = transient_growth(&s, u0.max() / 2.0).unwrap();
        assert_eq!(res.eps0, Some(0.1));
        assert!(res.persists);
    }

    #[test]
    fn transient_growth_in_aggregating_regime() {
        let g = Grid::unit(2, 64).unwrap();
        let mut s = spec(g, aggregating(), SweepVariable::Eps, vec![0.1, 0.01, 1e-3, 1e-4], 0.02);
        s.step.blowup_cutoff = 1e4;
        s.base_u0 = U0Spec::Bump {
            center: (0.5, 0.5),
            width: 0.15,
            target_ltheta: 5000.0,
        };
        let u0 = s.row_input(0.1, 0).unwrap().1;
        let res = transient_growth(&s, 10.0 * u0.max()).unwrap();
        assert!(res.eps0.is_some(), "{:?}", res.sweep.rows);
        assert!(res.persists);
    }

    #[test]
    fn ar_reduction_crosscheck() {
        let g = Grid::unit(2, 16).unwrap();
        let base = Params {
            eps: 0.01,
            gamma: 2.0,
            alpha: 1.0,
            delta: 3.0,
            ..Params::default()
        };
        let arp = ARParams {
            chi: 2.0,
            xi: 1.0,
            params: base,
        };
        let scfg = StepConfig::default();
        let ecfg = SolveConfig::default();

        let uniform = Field::constant(g, 1.5);
        let res = ar_crosscheck(&arp, &uniform, 0.5, &scfg, &ecfg).unwrap();
        assert!(res.max_deviation <= 1e-12, "{res:?}");

        let u0 = make_bump(&g, (0.4, 0.5), 0.3, 5.0, 2.0).unwrap();
        let exact = ar_crosscheck(&arp, &u0, 0.5, &scfg, &ecfg).unwrap();
        assert!(exact.max_deviation <= 1e-8, "{exact:?}");
        assert!(exact.max_deviation <= 10.0 * ecfg.rel_tol * exact.steps as f64);

        let violated = ARParams { xi: 1.1, ..arp };
        let off = ar_crosscheck(&violated, &u0, 0.5, &scfg, &ecfg).unwrap();
        assert!(off.max_deviation > 100.0 * exact.max_deviation, "{off:?} vs {exact:?}");
    }
}
