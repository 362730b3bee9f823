//! Time stepping for the density equation.
//!
//! One step: explicit first-order upwind transport `−∇·(u∇v)` plus optional
//! `eps Δu`, then the reaction `r u − mu u^theta` with growth explicit and
//! damping lagged-implicit, then a fresh solve of the signal chain. The step
//! size keeps the total outflow fraction of every cell at most `cfl`, which
//! together with the reaction form makes every accepted state nonnegative.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{mass_identity_error, record, DiagnosticsConfig, DiagnosticsRecord};
use crate::elliptic::{solve_signals, SolveConfig};
use crate::error::{Error, Result};
use crate::model::{ARParams, Field, Grid, Params};
use crate::stencil::{for_each_face, laplacian};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    pub cfl: f64,
    pub dt_max: f64,
    pub dt_min: f64,
    /// `max u` above this value is reported as blow-up.
    pub blowup_cutoff: f64,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig {
            cfl: 0.4,
            dt_max: 1e-2,
            dt_min: 1e-12,
            blowup_cutoff: 1e6,
        }
    }
}

impl StepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 0.9) {
            return Err(Error::Validation("step.cfl must lie in (0, 0.9]".into()));
        }
        if !(self.dt_min > 0.0 && self.dt_min < self.dt_max && self.dt_max.is_finite()) {
            return Err(Error::Validation(
                "step.dt_min must be positive and below step.dt_max".into(),
            ));
        }
        if !(self.blowup_cutoff > 0.0) {
            return Err(Error::Validation("step.blowup_cutoff must be positive".into()));
        }
        Ok(())
    }
}

/// Produces the transport potential and the intermediate signal from the density.
pub trait SignalModel {
    /// Returns `(v, w)`: `u` is advected by `∇v`, `w` is carried along for diagnostics.
    fn solve_signals(&self, u: &Field, cfg: &SolveConfig) -> Result<(Field, Field)>;
}

impl SignalModel for Params {
    fn solve_signals(&self, u: &Field, cfg: &SolveConfig) -> Result<(Field, Field)> {
        solve_signals(u, self, cfg)
    }
}

/// Attraction-repulsion signals: `v = chi z − xi w` with
/// `0 = d1 Δz − beta z + alpha u` and `0 = d2 Δw − delta w + gamma u`.
impl SignalModel for ARParams {
    fn solve_signals(&self, u: &Field, cfg: &SolveConfig) -> Result<(Field, Field)> {
        use crate::elliptic::{solve_helmholtz, HelmholtzProblem};
        let p = &self.params;
        let z = solve_helmholtz(&HelmholtzProblem::new(p.d1, p.beta, u.scaled(p.alpha))?, cfg)?;
        let w = solve_helmholtz(&HelmholtzProblem::new(p.d2, p.delta, u.scaled(p.gamma))?, cfg)?;
        let v = z
            .values()
            .iter()
            .zip(w.values())
            .map(|(zi, wi)| self.chi * zi - self.xi * wi)
            .collect();
        Ok((Field::from_parts_unchecked(*u.grid(), v), w))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub u: Field,
    pub v: Field,
    pub w: Field,
    pub t: f64,
    pub dt_last: f64,
    pub step_count: usize,
}

impl SimState {
    /// Initial state at `t = 0` with signals solved from `u0`.
    pub fn new(u0: Field, p: &Params, cfg: &SolveConfig) -> Result<Self> {
        Self::with_model(u0, p, cfg)
    }

    pub fn with_model(u0: Field, model: &impl SignalModel, cfg: &SolveConfig) -> Result<Self> {
        if let Some((cell, value)) = u0.first_negative() {
            return Err(Error::domain(format!(
                "initial density is negative ({value}) in cell {cell}"
            )));
        }
        let (v, w) = model.solve_signals(&u0, cfg)?;
        Ok(SimState {
            u: u0,
            v,
            w,
            t: 0.0,
            dt_last: 0.0,
            step_count: 0,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepVerdict {
    Advanced,
    BlowupDetected,
    StepUnderflow,
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: SimState,
    pub verdict: StepVerdict,
    /// Step size demanded by the stability rule before any capping to a target time.
    pub dt_rule: f64,
}

/// Discrete `−∇·(u∇v)`: face velocity `(v_R − v_L)/h`, donor-cell face
/// density, zero flux on boundary faces.
pub fn advection_divergence(u: &Field, v: &Field, grid: &Grid) -> Field {
    let mut out = vec![0.0; grid.len()];
    let (uu, vv) = (u.values(), v.values());
    for_each_face(grid, |l, r, h| {
        let a = (vv[r] - vv[l]) / h;
        let flux = if a > 0.0 { a * uu[l] } else { a * uu[r] };
        out[l] -= flux / h;
        out[r] += flux / h;
    });
    Field::from_parts_unchecked(*grid, out)
}

/// `u⁺ = (u + dt r u) / (1 + dt mu u^{theta−1})` per cell.
pub fn reaction_update(u: &Field, p: &Params, dt: f64) -> Field {
    let vals = u
        .values()
        .iter()
        .map(|&x| reaction_cell(x, p, dt))
        .collect();
    Field::from_parts_unchecked(*u.grid(), vals)
}

fn reaction_cell(x: f64, p: &Params, dt: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    x * (1.0 + dt * p.r) / (1.0 + dt * p.mu * x.powf(p.theta - 1.0))
}

/// Largest step keeping each cell's outflow fraction (upwind transport plus
/// `eps` diffusion) below `cfl`; `f64::INFINITY` if nothing moves.
pub fn stable_dt(state: &SimState, eps: f64, cfl: f64) -> f64 {
    let grid = *state.grid();
    let v = state.v.values();
    let mut outflow = vec![0.0; grid.len()];
    for_each_face(&grid, |l, r, h| {
        let a = (v[r] - v[l]) / h;
        if a > 0.0 {
            outflow[l] += a / h;
        } else {
            outflow[r] -= a / h;
        }
    });
    let mut diffusion = 2.0 / (grid.hx() * grid.hx());
    if grid.dim() == 2 {
        diffusion += 2.0 / (grid.hy() * grid.hy());
    }
    let rate = outflow.iter().copied().fold(0.0, f64::max) + eps * diffusion;
    if rate > 0.0 {
        cfl / rate
    } else {
        f64::INFINITY
    }
}

/// Advances `state` by exactly `dt` under `model`'s signals. No step-size
/// control and no blow-up check; fails if a cell turns negative.
pub fn advance(
    state: &SimState,
    p: &Params,
    dt: f64,
    ecfg: &SolveConfig,
    model: &impl SignalModel,
) -> Result<SimState> {
    let grid = *state.grid();
    let transport = advection_divergence(&state.u, &state.v, &grid);
    let mut lap = vec![0.0; grid.len()];
    if p.eps > 0.0 {
        laplacian(&grid, state.u.values(), &mut lap);
    }
    let mut next = Vec::with_capacity(grid.len());
    for ((&u, &adv), &l) in state.u.values().iter().zip(transport.values()).zip(&lap) {
        let moved = u + dt * (adv + p.eps * l);
        next.push(reaction_cell(moved, p, dt));
    }
    let t = state.t + dt;
    let u = Field::from_parts_unchecked(grid, next);
    if let Some((cell, value)) = u.first_negative() {
        return Err(Error::NegativeDensity { cell, value, t });
    }
    let (v, w) = model.solve_signals(&u, ecfg)?;
    Ok(SimState {
        u,
        v,
        w,
        t,
        dt_last: dt,
        step_count: state.step_count + 1,
    })
}

/// One controlled step with `dt = min(dt_max, stable_dt)`, further capped by `dt_cap`.
pub fn step_capped(
    state: &SimState,
    p: &Params,
    scfg: &StepConfig,
    ecfg: &SolveConfig,
    dt_cap: f64,
) -> Result<StepOutcome> {
    let dt_rule = scfg.dt_max.min(stable_dt(state, p.eps, scfg.cfl));
    if dt_rule < scfg.dt_min {
        return Ok(StepOutcome {
            state: state.clone(),
            verdict: StepVerdict::StepUnderflow,
            dt_rule,
        });
    }
    let next = advance(state, p, dt_rule.min(dt_cap), ecfg, p)?;
    let verdict = if next.u.max() > scfg.blowup_cutoff {
        StepVerdict::BlowupDetected
    } else {
        StepVerdict::Advanced
    };
    Ok(StepOutcome {
        state: next,
        verdict,
        dt_rule,
    })
}

pub fn step(
    state: &SimState,
    p: &Params,
    scfg: &StepConfig,
    ecfg: &SolveConfig,
) -> Result<StepOutcome> {
    step_capped(state, p, scfg, ecfg, f64::INFINITY)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunVerdict {
    Completed,
    BlowupDetected,
    StepUnderflow,
}

impl RunVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunVerdict::Completed => "completed",
            RunVerdict::BlowupDetected => "blowup_detected",
            RunVerdict::StepUnderflow => "step_underflow",
        }
    }

    /// Either finite proxy of an unbounded sup norm.
    pub fn is_blowup(&self) -> bool {
        !matches!(self, RunVerdict::Completed)
    }
}

impl std::fmt::Display for RunVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Largest density seen during a run and where it occurred.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub umax: f64,
    pub cell: usize,
    pub t: f64,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub records: Vec<DiagnosticsRecord>,
    pub verdict: RunVerdict,
    pub terminal_time: f64,
    pub terminal_umax: f64,
    pub peak: Peak,
    /// Worst signal mass-identity defect over every accepted step.
    pub max_mass_id_err: f64,
    /// Smallest density value over every accepted step.
    pub min_u: f64,
    pub steps: usize,
    pub final_state: SimState,
}

/// A run in progress; [`run`] is the one-shot wrapper.
pub struct Simulation {
    p: Params,
    scfg: StepConfig,
    ecfg: SolveConfig,
    probes: DiagnosticsConfig,
    state: SimState,
    records: Vec<DiagnosticsRecord>,
    verdict: Option<RunVerdict>,
    peak: Peak,
    max_mass_id_err: f64,
    min_u: f64,
}

impl Simulation {
    pub fn new(
        u0: Field,
        p: &Params,
        scfg: &StepConfig,
        ecfg: &SolveConfig,
        probes: &DiagnosticsConfig,
    ) -> Result<Self> {
        p.validate()?;
        scfg.validate()?;
        ecfg.validate()?;
        probes.validate(u0.grid().dim())?;
        if !(u0.max() > 0.0) {
            return Err(Error::domain("initial density must be positive somewhere"));
        }
        let state = SimState::new(u0, p, ecfg)?;
        let (cell, umax) = state.u.argmax();
        let max_mass_id_err = mass_identity_error(&state.u, &state.v, &state.w, p);
        let min_u = state.u.min();
        Ok(Simulation {
            p: *p,
            scfg: *scfg,
            ecfg: *ecfg,
            probes: *probes,
            state,
            records: Vec::new(),
            verdict: None,
            peak: Peak { umax, cell, t: 0.0 },
            max_mass_id_err,
            min_u,
        })
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn params(&self) -> &Params {
        &self.p
    }

    /// `Some` once blow-up or step underflow stopped the run.
    pub fn stopped(&self) -> Option<RunVerdict> {
        self.verdict
    }

    pub fn records(&self) -> &[DiagnosticsRecord] {
        &self.records
    }

    /// Steps until `t_target` is reached (last step shortened to land on it)
    /// or the run stops. `observer` sees every accepted state.
    pub fn advance_to_with(
        &mut self,
        t_target: f64,
        mut observer: impl FnMut(&SimState),
    ) -> Result<Option<RunVerdict>> {
        if self.verdict.is_some() {
            return Ok(self.verdict);
        }
        if self.records.is_empty() && t_target > self.state.t {
            self.records.push(record(&self.state, &self.p, &self.probes));
        }
        while t_target - self.state.t > self.scfg.dt_min {
            let cap = t_target - self.state.t;
            let outcome = step_capped(&self.state, &self.p, &self.scfg, &self.ecfg, cap)?;
            if outcome.verdict == StepVerdict::StepUnderflow {
                self.verdict = Some(RunVerdict::StepUnderflow);
                self.push_record();
                break;
            }
            self.state = outcome.state;
            self.track();
            observer(&self.state);
            let done = t_target - self.state.t <= self.scfg.dt_min;
            if outcome.verdict == StepVerdict::BlowupDetected {
                self.verdict = Some(RunVerdict::BlowupDetected);
                self.push_record();
                break;
            }
            if done || self.state.step_count.is_multiple_of(self.probes.cadence) {
                self.push_record();
            }
        }
        Ok(self.verdict)
    }

    pub fn advance_to(&mut self, t_target: f64) -> Result<Option<RunVerdict>> {
        self.advance_to_with(t_target, |_| {})
    }

    fn track(&mut self) {
        let s = &self.state;
        let (cell, umax) = s.u.argmax();
        if umax > self.peak.umax {
            self.peak = Peak { umax, cell, t: s.t };
        }
        self.min_u = self.min_u.min(s.u.min());
        let err = mass_identity_error(&s.u, &s.v, &s.w, &self.p);
        self.max_mass_id_err = self.max_mass_id_err.max(err);
    }

    fn push_record(&mut self) {
        let last_t = self.records.last().map(|r| r.t);
        if last_t != Some(self.state.t) {
            self.records.push(record(&self.state, &self.p, &self.probes));
        }
    }

    pub fn finish(self) -> RunReport {
        RunReport {
            verdict: self.verdict.unwrap_or(RunVerdict::Completed),
            terminal_time: self.state.t,
            terminal_umax: self.state.u.max(),
            peak: self.peak,
            max_mass_id_err: self.max_mass_id_err,
            min_u: self.min_u,
            steps: self.state.step_count,
            records: self.records,
            final_state: self.state,
        }
    }
}

/// Runs from `u0` until `t_end` or until blow-up or step underflow is detected.
pub fn run(
    u0: Field,
    p: &Params,
    t_end: f64,
    scfg: &StepConfig,
    ecfg: &SolveConfig,
    probes: &DiagnosticsConfig,
) -> Result<RunReport> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::domain("t_end must be finite and nonnegative"));
    }
    let mut sim = Simulation::new(u0, p, scfg, ecfg, probes)?;
    sim.advance_to(t_end)?;
    Ok(sim.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_bump;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Closed-form solution of `y' = r y − mu y^theta`.
    pub(crate) fn bernoulli_ode(p: &Params, y0: f64, t: f64) -> f64 {
        let k = p.mu / p.r;
        let z = k + (y0.powf(1.0 - p.theta) - k) * (-(p.theta - 1.0) * p.r * t).exp();
        z.powf(-1.0 / (p.theta - 1.0))
    }

    #[test]
    fn constant_potential_does_not_transport() {
        let g = Grid::unit(2, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = Field::new(g, (0..36).map(|_| rng.random_range(0.0..3.0)).collect()).unwrap();
        let out = advection_divergence(&u, &Field::constant(g, 4.2), &g);
        assert!(out.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn transport_is_conservative() {
        let g = Grid::new_2d(9, 7, 1.0, 0.6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = Field::new(g, (0..63).map(|_| rng.random_range(0.0..3.0)).collect()).unwrap();
        let v = Field::new(g, (0..63).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let out = advection_divergence(&u, &v, &g);
        let scale: f64 = out.values().iter().map(|x| x.abs()).sum::<f64>() * g.cell_volume();
        assert!(out.integral().abs() <= 1e-13 * scale);
    }

    #[test]
    fn transport_matches_face_enumeration() {
        let g = Grid::new_1d(8, 2.0).unwrap();
        let h = 0.25;
        let u = [0.0, 1.0, 3.0, 2.5, 0.2, 4.0, 1.0, 0.5];
        let v = [0.3, 0.1, 0.9, 1.4, 1.0, 1.2, -0.5, 0.0];
        let field = |x: &[f64]| Field::new(g, x.to_vec()).unwrap();
        let out = advection_divergence(&field(&u), &field(&v), &g);
        for i in 0..8 {
            // flux through the face to the right of cell k, zero on the boundary
            let flux = |k: isize| -> f64 {
                if !(0..7).contains(&k) {
                    return 0.0;
                }
                let k = k as usize;
                let a = (v[k + 1] - v[k]) / h;
                let donor = if a > 0.0 { u[k] } else { u[k + 1] };
                a * donor
            };
            let expect = -(flux(i as isize) - flux(i as isize - 1)) / h;
            assert!((out.values()[i] - expect).abs() < 1e-12, "cell {i}");
        }
    }

    #[test]
    fn reaction_fixed_points() {
        let p = Params {
            r: 3.0,
            mu: 1.5,
            theta: 2.5,
            ..Params::default()
        };
        let g = Grid::unit(1, 4).unwrap();
        let zero = reaction_update(&Field::zeros(g), &p, 0.1);
        assert!(zero.values().iter().all(|&x| x == 0.0));
        let eq = p.logistic_equilibrium();
        let out = reaction_update(&Field::constant(g, eq), &p, 0.37);
        for &x in out.values() {
            assert!((x - eq).abs() <= 4.0 * f64::EPSILON * eq);
        }
    }

    #[test]
    fn reaction_tracks_bernoulli_solution() {
        let p = Params {
            r: 1.0,
            mu: 0.5,
            theta: 1.7,
            ..Params::default()
        };
        let g = Grid::unit(1, 4).unwrap();
        for dt in [1e-2, 5e-3] {
            let mut u = Field::constant(g, 0.2);
            let mut worst: f64 = 0.0;
            for n in 1..=((2.0 / dt) as usize) {
                u = reaction_update(&u, &p, dt);
                let exact = bernoulli_ode(&p, 0.2, n as f64 * dt);
                worst = worst.max((u.values()[0] - exact).abs());
            }
            assert!(worst < 2.0 * dt, "dt {dt}: {worst}");
        }
    }

    #[test]
    fn uniform_state_follows_logistic_law() {
        let g = Grid::unit(2, 8).unwrap();
        let p = Params {
            eps: 0.1,
            ..Params::default()
        };
        let state = SimState::new(Field::constant(g, 2.0), &p, &SolveConfig::default()).unwrap();
        let out = step(&state, &p, &StepConfig::default(), &SolveConfig::default()).unwrap();
        assert_eq!(out.verdict, StepVerdict::Advanced);
        let expect = 2.0 * (1.0 + out.state.dt_last) / (1.0 + out.state.dt_last * 2.0);
        for &x in out.state.u.values() {
            assert!((x - expect).abs() < 1e-13);
        }
        let w_exp = Field::constant(g, expect);
        assert!(out.state.w.max_abs_diff(&w_exp) < 1e-11);
        assert!(out.state.v.max_abs_diff(&w_exp) < 1e-11);
    }

    #[test]
    fn mass_balance_per_step_is_second_order() {
        let g = Grid::unit(2, 24).unwrap();
        let p = Params {
            eps: 0.02,
            ..Params::default()
        };
        let u0 = make_bump(&g, (0.45, 0.55), 0.3, 20.0, 2.0).unwrap();
        let cfg = SolveConfig::default();
        let state = SimState::new(u0, &p, &cfg).unwrap();
        let defect = |dt: f64| {
            let next = advance(&state, &p, dt, &cfg, &p).unwrap();
            let reaction = p.r * state.u.integral() - p.mu * state.u.lp_pow(p.theta);
            (next.u.integral() - state.u.integral() - dt * reaction).abs()
        };
        let dt = 0.5 * stable_dt(&state, p.eps, 0.4);
        let (d1, d2) = (defect(dt), defect(dt / 2.0));
        assert!(d1 / d2 > 3.5, "{d1} {d2}");
    }

    #[test]
    fn positivity_under_random_potentials() {
        let g = Grid::unit(2, 12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..20 {
            let u = Field::new(g, (0..144).map(|_| rng.random_range(0.0..5.0)).collect()).unwrap();
            let v = Field::new(g, (0..144).map(|_| rng.random_range(-3.0..3.0)).collect()).unwrap();
            let state = SimState {
                w: v.clone(),
                u,
                v,
                t: 0.0,
                dt_last: 0.0,
                step_count: 0,
            };
            let p = Params {
                eps: if trial % 2 == 0 { 0.0 } else { 0.05 },
                ..Params::default()
            };
            let dt = stable_dt(&state, p.eps, 0.9);
            // one transport+reaction update must stay nonnegative
            let next = advance(&state, &p, dt, &SolveConfig::default(), &p).unwrap();
            assert!(next.u.min() >= 0.0);
        }
    }

    #[test]
    fn detects_step_underflow() {
        let g = Grid::unit(1, 16).unwrap();
        let p = Params::default();
        let u0 = make_bump(&g, (0.5, 0.0), 0.3, 1.0, 2.0).unwrap();
        let state = SimState::new(u0, &p, &SolveConfig::default()).unwrap();
        let scfg = StepConfig {
            dt_min: 0.5,
            dt_max: 1.0,
            cfl: 1e-6,
            ..StepConfig::default()
        };
        let out = step(&state, &p, &scfg, &SolveConfig::default()).unwrap();
        assert_eq!(out.verdict, StepVerdict::StepUnderflow);
        assert_eq!(out.state, state);
    }

    #[test]
    fn zero_horizon_run_is_empty() {
        let g = Grid::unit(1, 16).unwrap();
        let p = Params::default();
        let rep = run(
            Field::constant(g, 1.0),
            &p,
            0.0,
            &StepConfig::default(),
            &SolveConfig::default(),
            &DiagnosticsConfig::for_params(&p),
        )
        .unwrap();
        assert!(rep.records.is_empty());
        assert_eq!(rep.verdict, RunVerdict::Completed);
        assert_eq!(rep.terminal_time, 0.0);
    }

    #[test]
    fn uniform_run_relaxes_to_equilibrium() {
        let g = Grid::unit(1, 16).unwrap();
        let p = Params::default();
        let rep = run(
            Field::constant(g, 2.0),
            &p,
            5.0,
            &StepConfig::default(),
            &SolveConfig::default(),
            &DiagnosticsConfig::for_params(&p),
        )
        .unwrap();
        assert_eq!(rep.verdict, RunVerdict::Completed);
        assert!((rep.terminal_time - 5.0).abs() < 1e-9);
        let last = rep.records.last().unwrap();
        // exact: 1 / (1 - 0.5 e^{-5}) = 1.00338...
        let exact = bernoulli_ode(&p, 2.0, 5.0);
        assert!((last.mean - exact).abs() < 1e-3);
        assert!((last.mean - 1.0).abs() < 5e-3);
    }

    #[test]
    fn rejects_invalid_initial_data() {
        let g = Grid::unit(1, 8).unwrap();
        let p = Params::default();
        let cfgs = (StepConfig::default(), SolveConfig::default(), DiagnosticsConfig::default());
        assert!(run(Field::zeros(g), &p, 1.0, &cfgs.0, &cfgs.1, &cfgs.2).is_err());
        let mut vals = vec![1.0; 8];
        vals[3] = -0.1;
        let u0 = Field::new(g, vals).unwrap();
        assert!(run(u0, &p, 1.0, &cfgs.0, &cfgs.1, &cfgs.2).is_err());
    }
}
