//! Run monitors: norms, signal mass identities, the mean bound, the fitted
//! Bernoulli envelope of the `W^{1,q}` monitor, and the blow-up time bound for
//! superlinear integral inequalities.

use serde::{Deserialize, Serialize};

use crate::dynamics::SimState;
use crate::error::{Error, Result};
use crate::model::{Field, Params};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsConfig {
    /// Sobolev exponent of the `W^{1,q}` monitor; must exceed the grid dimension.
    pub q: f64,
    /// Exponent of the `L^theta` monitor, normally `Params::theta`.
    pub theta: f64,
    /// Record every `cadence`-th accepted step.
    pub cadence: usize,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            q: 4.0,
            theta: 2.0,
            cadence: 1,
        }
    }
}

impl DiagnosticsConfig {
    pub fn for_params(p: &Params) -> Self {
        DiagnosticsConfig {
            theta: p.theta,
            ..Self::default()
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.q.is_finite() && self.q > dim as f64) {
            return Err(Error::Validation(format!(
                "diag.q must exceed the grid dimension {dim}"
            )));
        }
        if !(self.theta.is_finite() && self.theta > 0.0) {
            return Err(Error::Validation("diag.theta must be positive".into()));
        }
        if self.cadence == 0 {
            return Err(Error::Validation("diag.cadence must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// ∫u
    pub mass: f64,
    pub mean: f64,
    pub umax: f64,
    /// ∫u^theta
    pub ltheta: f64,
    /// `∫u^q + ∫|∇_h u|^q`, the q-th power of the discrete `W^{1,q}` norm.
    pub w1q: f64,
    /// Larger of the relative gaps `|beta∫v − alpha∫w|` and `|delta∫w − gamma∫u|`.
    pub mass_id_err: f64,
    pub dt: f64,
}

fn rel_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Relative defect of the integral identities `beta∫v = alpha∫w` and `delta∫w = gamma∫u`.
pub fn mass_identity_error(u: &Field, v: &Field, w: &Field, p: &Params) -> f64 {
    let (iu, iv, iw) = (u.integral(), v.integral(), w.integral());
    rel_gap(p.beta * iv, p.alpha * iw).max(rel_gap(p.delta * iw, p.gamma * iu))
}

/// `∫ |∇_h u|^q` with centered differences inside and one-sided ones at the boundary.
pub fn gradient_lq_pow(u: &Field, q: f64) -> f64 {
    let g = u.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let x = u.values();
    let diff = |lo: usize, hi: usize, span: f64| (x[hi] - x[lo]) / span;
    let mut acc = 0.0;
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            let gx = if i == 0 {
                diff(k, k + 1, g.hx())
            } else if i == nx - 1 {
                diff(k - 1, k, g.hx())
            } else {
                diff(k - 1, k + 1, 2.0 * g.hx())
            };
            let gy = if g.dim() == 1 {
                0.0
            } else if j == 0 {
                diff(k, k + nx, g.hy())
            } else if j == ny - 1 {
                diff(k - nx, k, g.hy())
            } else {
                diff(k - nx, k + nx, 2.0 * g.hy())
            };
            acc += (gx * gx + gy * gy).sqrt().powf(q);
        }
    }
    acc * g.cell_volume()
}

pub fn record(state: &SimState, p: &Params, cfg: &DiagnosticsConfig) -> DiagnosticsRecord {
    let u = &state.u;
    let mass = u.integral();
    DiagnosticsRecord {
        t: state.t,
        mass,
        mean: mass / u.grid().measure(),
        umax: u.max(),
        ltheta: u.lp_pow(cfg.theta),
        w1q: u.lp_pow(cfg.q) + gradient_lq_pow(u, cfg.q),
        mass_id_err: mass_identity_error(u, &state.v, &state.w, p),
        dt: state.dt_last,
    }
}

/// Hypotheses of the blow-up lemma for `y(t) >= a − b t + d ∫₀ᵗ y^kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupBoundInputs {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub kappa: f64,
}

impl BlowupBoundInputs {
    pub fn validate(&self) -> Result<()> {
        let BlowupBoundInputs { a, b, d, kappa } = *self;
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::domain("a must be positive"));
        }
        if !(b.is_finite() && b >= 0.0) {
            return Err(Error::domain("b must be nonnegative"));
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::domain("d must be positive"));
        }
        if !(kappa.is_finite() && kappa > 1.0) {
            return Err(Error::domain("kappa must exceed 1"));
        }
        let floor = (2.0 * b / d).powf(1.0 / kappa);
        if a <= floor {
            return Err(Error::domain(format!(
                "a = {a} must exceed (2b/d)^(1/kappa) = {floor}"
            )));
        }
        Ok(())
    }
}

/// Upper bound `2 / ((kappa − 1) a^{kappa−1} d)` on the existence time of any
/// nonnegative continuous solution of the integral inequality.
pub fn blowup_time_bound(inp: &BlowupBoundInputs) -> Result<f64> {
    inp.validate()?;
    Ok(2.0 / ((inp.kappa - 1.0) * inp.a.powf(inp.kappa - 1.0) * inp.d))
}

/// Fitted constant of `y' <= C (y + y^3)` and the horizon of its closed-form envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeFit {
    pub c: f64,
    /// `ln(y0^{-2} + 1) / (2C)`; `f64::INFINITY` when `C == 0`.
    pub valid_until: f64,
    pub t0: f64,
    pub y0: f64,
}

impl EnvelopeFit {
    /// `1 / sqrt(|(y0^{-2} + 1) e^{-2C(t − t0)} − 1|)`, the solution of
    /// `y' = C (y + y^3)` through `(t0, y0)`.
    pub fn envelope(&self, t: f64) -> f64 {
        let z0 = self.y0.powi(-2);
        let inner = (z0 + 1.0) * (-2.0 * self.c * (t - self.t0)).exp() - 1.0;
        1.0 / inner.abs().sqrt()
    }
}

/// Smallest `C >= 0` with `(y_{k+1} − y_k)/(t_{k+1} − t_k) <= C (y_k + y_k^3)`
/// over consecutive samples.
///
/// Using the left sample in the bound makes the discrete series a
/// sub-solution of the envelope ODE, so the envelope dominates every sample
/// before `valid_until`.
pub fn fit_bernoulli(points: &[(f64, f64)]) -> Result<EnvelopeFit> {
    let (t0, y0) = *points
        .first()
        .ok_or_else(|| Error::domain("envelope fit needs at least one sample"))?;
    if let Some(&(t, y)) = points.iter().find(|(_, y)| !(*y > 0.0)) {
        return Err(Error::domain(format!(
            "envelope fit needs positive samples, got y = {y} at t = {t}"
        )));
    }
    let mut c: f64 = 0.0;
    for pair in points.windows(2) {
        let ((ta, ya), (tb, yb)) = (pair[0], pair[1]);
        if !(tb > ta) {
            return Err(Error::domain("sample times must be strictly increasing"));
        }
        let ratio = (yb - ya) / (tb - ta) / (ya + ya * ya * ya);
        c = c.max(ratio);
    }
    let valid_until = if c > 0.0 {
        (y0.powi(-2) + 1.0).ln() / (2.0 * c)
    } else {
        f64::INFINITY
    };
    Ok(EnvelopeFit {
        c,
        valid_until,
        t0,
        y0,
    })
}

/// [`fit_bernoulli`] applied to the `w1q` monitor of a run.
pub fn bernoulli_envelope_fit(series: &[DiagnosticsRecord]) -> Result<EnvelopeFit> {
    let points: Vec<(f64, f64)> = series.iter().map(|r| (r.t, r.w1q)).collect();
    fit_bernoulli(&points)
}

/// True iff every recorded mean stays below `m1 (1 + 1e-6)`.
pub fn check_mean_bound(series: &[DiagnosticsRecord], m1: f64) -> bool {
    let limit = m1 * (1.0 + 1e-6);
    series.iter().all(|r| r.mean <= limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::SimState;
    use crate::elliptic::SolveConfig;
    use crate::model::Grid;

    #[test]
    fn uniform_unit_density() {
        let g = Grid::unit(2, 8).unwrap();
        let p = Params::default();
        let state = SimState::new(Field::constant(g, 1.0), &p, &SolveConfig::default()).unwrap();
        let rec = record(&state, &p, &DiagnosticsConfig::for_params(&p));
        assert!((rec.mass - 1.0).abs() < 1e-14);
        assert_eq!(rec.umax, 1.0);
        assert!((rec.ltheta - 1.0).abs() < 1e-14);
        assert_eq!(gradient_lq_pow(&state.u, 4.0), 0.0);
        assert!((rec.w1q - 1.0).abs() < 1e-14);
        assert!(rec.mass_id_err < 1e-12);
    }

    #[test]
    fn four_cell_field_by_hand() {
        // cells of width 0.25 on [0, 1]
        let g = Grid::new_1d(4, 1.0).unwrap();
        let vals = [1.0, 3.0, 2.0, 0.5];
        let u = Field::new(g, vals.to_vec()).unwrap();
        let p = Params {
            theta: 1.5,
            ..Params::default()
        };
        let state = SimState::new(u, &p, &SolveConfig::default()).unwrap();
        let cfg = DiagnosticsConfig {
            q: 3.0,
            theta: 1.5,
            cadence: 1,
        };
        let rec = record(&state, &p, &cfg);

        let h = 0.25;
        let mass = h * (1.0 + 3.0 + 2.0 + 0.5);
        assert!((rec.mass - mass).abs() < 1e-13);
        assert!((rec.mean - mass).abs() < 1e-13);
        assert_eq!(rec.umax, 3.0);
        let ltheta: f64 = h * vals.iter().map(|x: &f64| x.powf(1.5)).sum::<f64>();
        assert!((rec.ltheta - ltheta).abs() < 1e-13);
        let grads = [
            (3.0 - 1.0) / h,
            (2.0 - 1.0) / (2.0 * h),
            (0.5 - 3.0) / (2.0 * h),
            (0.5 - 2.0) / h,
        ];
        let w1q = h * vals.iter().map(|x: &f64| x.powi(3)).sum::<f64>()
            + h * grads.iter().map(|g: &f64| g.abs().powi(3)).sum::<f64>();
        assert!((rec.w1q - w1q).abs() < 1e-13 * w1q);
        assert!(rec.mass_id_err < 1e-9);
    }

    #[test]
    fn blowup_bound_examples() {
        let bound = |a, b, d, kappa| blowup_time_bound(&BlowupBoundInputs { a, b, d, kappa });
        assert!((bound(2.0, 0.0, 1.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        // y' = y^2, y(0) = 2 blows up at 1/2
        assert!(0.5 <= bound(2.0, 0.0, 1.0, 2.0).unwrap());
        assert!((bound(1.0, 0.0, 2.0, 3.0).unwrap() - 0.5).abs() < 1e-15);
        // y' = 2 y^3, y(0) = 1: y^-2 = 1 - 4t, blow-up at 1/4
        assert!(0.25 <= bound(1.0, 0.0, 2.0, 3.0).unwrap());
        assert!(matches!(bound(1.0, 1.0, 1.0, 2.0), Err(Error::Domain(_))));
        assert!(bound(1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn constant_series_has_zero_constant() {
        let pts: Vec<_> = (0..10).map(|k| (k as f64 * 0.1, 1.0)).collect();
        let fit = fit_bernoulli(&pts).unwrap();
        assert_eq!(fit.c, 0.0);
        assert!(fit.valid_until.is_infinite());
        assert_eq!(fit.envelope(5.0), 1.0);
    }

    #[test]
    fn fit_recovers_unit_constant() {
        // y' = y + y^3 integrated with small RK4 steps; y(0) = 0.5.
        let f = |y: f64| y + y * y * y;
        let (mut t, mut y) = (0.0, 0.5);
        let h = 1e-4;
        let mut pts = vec![(t, y)];
        for step in 1..=4000 {
            let k1 = f(y);
            let k2 = f(y + 0.5 * h * k1);
            let k3 = f(y + 0.5 * h * k2);
            let k4 = f(y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
            if step % 100 == 0 {
                pts.push((t, y));
            }
        }
        let fit = fit_bernoulli(&pts).unwrap();
        assert!((fit.c - 1.0).abs() < 0.05, "C = {}", fit.c);
        // declared horizon ln(5)/2 exceeds the sampled window
        assert!(fit.valid_until > t);
        for &(t, y) in &pts {
            assert!(fit.envelope(t) >= y * (1.0 - 1e-12));
        }
    }

    #[test]
    fn fit_rejects_bad_series() {
        assert!(fit_bernoulli(&[]).is_err());
        assert!(fit_bernoulli(&[(0.0, 1.0), (1.0, 0.0)]).is_err());
        assert!(fit_bernoulli(&[(0.0, 1.0), (0.0, 2.0)]).is_err());
    }

    #[test]
    fn time_scaling_halves_constant() {
        let pts = [(0.0, 1.0), (0.1, 1.3), (0.3, 1.4), (0.4, 2.0)];
        let stretched: Vec<_> = pts.iter().map(|&(t, y)| (2.0 * t, y)).collect();
        let a = fit_bernoulli(&pts).unwrap().c;
        let b = fit_bernoulli(&stretched).unwrap().c;
        assert!((a - 2.0 * b).abs() < 1e-12 * a);
    }

    fn rec(mean: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            t: 0.0,
            mass: mean,
            mean,
            umax: mean,
            ltheta: 0.0,
            w1q: 1.0,
            mass_id_err: 0.0,
            dt: 0.0,
        }
    }

    #[test]
    fn mean_bound_check() {
        let ok = [rec(2.0), rec(1.5), rec(1.0)];
        assert!(check_mean_bound(&ok, 2.0));
        let bad = [rec(2.0), rec(4.0)];
        assert!(!check_mean_bound(&bad, 2.0));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn mean_check_is_monotone_in_bound(
                means in prop::collection::vec(0.0..10.0f64, 1..20),
                m in 0.0..10.0f64,
                extra in 0.0..5.0f64,
            ) {
                let series: Vec<_> = means.iter().map(|&x| rec(x)).collect();
                if check_mean_bound(&series, m) {
                    prop_assert!(check_mean_bound(&series, m + extra));
                }
            }
        }
    }
}
