//! Domain types: model constants, the tensor grid, cell-averaged fields,
//! initial-data construction and the attraction-repulsion transform.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Model constants of
///
/// ```text
/// u_t = eps Δu − ∇·(u∇v) + r u − mu u^theta
///   0 = d1 Δv − beta v + alpha w
///   0 = d2 Δw − delta w + gamma u
/// ```
///
/// `eps = 0` selects the hyperbolic limit system; one integrator serves both.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub eps: f64,
    pub r: f64,
    pub mu: f64,
    pub theta: f64,
    pub d1: f64,
    pub d2: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            eps: 0.0,
            r: 1.0,
            mu: 1.0,
            theta: 2.0,
            d1: 1.0,
            d2: 1.0,
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            delta: 1.0,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        let strictly_positive = [
            ("r", self.r),
            ("mu", self.mu),
            ("d1", self.d1),
            ("d2", self.d2),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("delta", self.delta),
        ];
        if !self.eps.is_finite() {
            return Err(Error::domain("eps must be finite"));
        }
        if self.eps < 0.0 {
            return Err(Error::domain("eps must be nonnegative"));
        }
        for (name, value) in strictly_positive {
            if !value.is_finite() {
                return Err(Error::domain(format!("{name} must be finite")));
            }
            if value <= 0.0 {
                return Err(Error::domain(format!("{name} must be positive")));
            }
        }
        if !self.theta.is_finite() {
            return Err(Error::domain("theta must be finite"));
        }
        if self.theta <= 1.0 {
            return Err(Error::domain("theta must exceed 1"));
        }
        Ok(())
    }

    /// Positive homogeneous equilibrium of the logistic law, `(r/mu)^{1/(theta-1)}`.
    pub fn logistic_equilibrium(&self) -> f64 {
        (self.r / self.mu).powf(1.0 / (self.theta - 1.0))
    }
}

/// Returns `p` unchanged iff every sign and range constraint holds.
pub fn validate_params(p: Params) -> Result<Params> {
    p.validate()?;
    Ok(p)
}

/// Uniform cell-centered mesh on `[0, lx] x [0, ly]` (or `[0, lx]` in 1D).
///
/// Cells are stored row-major with x fastest: index `j * nx + i`.
/// In 1D `ny == 1` and `ly == hy == 1`, so `hx * hy * Σ` is the interval integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    hx: f64,
    hy: f64,
}

impl Grid {
    pub fn new_1d(nx: usize, lx: f64) -> Result<Self> {
        if nx < 2 {
            return Err(Error::domain("nx must be at least 2"));
        }
        check_length("lx", lx)?;
        Ok(Grid {
            dim: 1,
            nx,
            ny: 1,
            lx,
            ly: 1.0,
            hx: lx / nx as f64,
            hy: 1.0,
        })
    }

    pub fn new_2d(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::domain("nx and ny must be at least 2"));
        }
        check_length("lx", lx)?;
        check_length("ly", ly)?;
        Ok(Grid {
            dim: 2,
            nx,
            ny,
            lx,
            ly,
            hx: lx / nx as f64,
            hy: ly / ny as f64,
        })
    }

    /// The unit interval/square with `n` cells per axis.
    pub fn unit(dim: usize, n: usize) -> Result<Self> {
        match dim {
            1 => Self::new_1d(n, 1.0),
            2 => Self::new_2d(n, n, 1.0, 1.0),
            _ => Err(Error::domain("dim must be 1 or 2")),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn lx(&self) -> f64 {
        self.lx
    }
    pub fn ly(&self) -> f64 {
        self.ly
    }
    pub fn hx(&self) -> f64 {
        self.hx
    }
    pub fn hy(&self) -> f64 {
        self.hy
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.hx * self.hy
    }

    /// |Ω|
    pub fn measure(&self) -> f64 {
        self.lx * self.ly
    }

    /// Smallest cell width over the active axes.
    pub fn h_min(&self) -> f64 {
        if self.dim == 1 {
            self.hx
        } else {
            self.hx.min(self.hy)
        }
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Cell center of `(i, j)`; in 1D the y coordinate is 0.
    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        let x = (i as f64 + 0.5) * self.hx;
        let y = if self.dim == 1 {
            0.0
        } else {
            (j as f64 + 0.5) * self.hy
        };
        (x, y)
    }

    pub fn contains(&self, point: (f64, f64)) -> bool {
        let in_x = (0.0..=self.lx).contains(&point.0);
        in_x && (self.dim == 1 || (0.0..=self.ly).contains(&point.1))
    }
}

fn check_length(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite")))
    }
}

/// One scalar unknown stored as cell averages.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::domain(format!(
                "field has {} values but the grid has {} cells",
                values.len(),
                grid.len()
            )));
        }
        Ok(Field { grid, values })
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Field {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Samples `f` at the cell centers.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let (x, y) = grid.center(i, j);
                values.push(f(x, y));
            }
        }
        Field { grid, values }
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Field { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Discrete ∫Ω: `hx * hy * Σ values`.
    pub fn integral(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().sum::<f64>()
    }

    pub fn mean(&self) -> f64 {
        self.integral() / self.grid.measure()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Cell index and value of the maximum (first occurrence).
    pub fn argmax(&self) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (k, &value) in self.values.iter().enumerate() {
            if value > best.1 {
                best = (k, value);
            }
        }
        best
    }

    /// `∫ |f|^p` for finite p.
    pub fn lp_pow(&self, p: f64) -> f64 {
        self.grid.cell_volume() * self.values.iter().map(|x| x.abs().powf(p)).sum::<f64>()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            self.values.iter().fold(0.0, |acc, x| f64::max(acc, x.abs()))
        } else {
            self.lp_pow(p).powf(1.0 / p)
        }
    }

    pub fn first_negative(&self) -> Option<(usize, f64)> {
        self.values
            .iter()
            .enumerate()
            .find(|(_, &x)| x < 0.0 || x.is_nan())
            .map(|(k, &x)| (k, x))
    }

    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |acc, (a, b)| f64::max(acc, (a - b).abs()))
    }

    pub fn scaled(&self, factor: f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|x| factor * x).collect(),
        }
    }
}

/// `max{ mean(u0), (r/mu)^{1/(theta-1)} }`, the bound on the mean density.
pub fn m1(p: &Params, u0: &Field) -> Result<f64> {
    p.validate()?;
    if let Some((cell, value)) = u0.first_negative() {
        return Err(Error::domain(format!(
            "initial density is negative ({value}) in cell {cell}"
        )));
    }
    Ok(u0.mean().max(p.logistic_equilibrium()))
}

/// A cosine-squared bump `cos²(π ρ / (2 width))` for `ρ = |x - center| < width`,
/// rescaled so that `∫ u^theta = target_ltheta`.
///
/// `width` is the support radius. A width covering the whole domain
/// (`width >= max(lx, ly)`) yields the constant field with the requested norm.
pub fn make_bump(
    grid: &Grid,
    center: (f64, f64),
    width: f64,
    target_ltheta: f64,
    theta: f64,
) -> Result<Field> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::domain("bump width must be positive"));
    }
    if !(target_ltheta.is_finite() && target_ltheta > 0.0) {
        return Err(Error::domain("target L^theta norm must be positive"));
    }
    if !(theta.is_finite() && theta >= 1.0) {
        return Err(Error::domain("theta must be at least 1"));
    }
    if !grid.contains(center) {
        return Err(Error::domain("bump center lies outside the domain"));
    }

    let extent = if grid.dim() == 1 {
        grid.lx()
    } else {
        grid.lx().max(grid.ly())
    };
    if width >= extent {
        let level = (target_ltheta / grid.measure()).powf(1.0 / theta);
        return Ok(Field::constant(*grid, level));
    }

    let narrow_x = 2.0 * width < 4.0 * grid.hx();
    let narrow_y = grid.dim() == 2 && 2.0 * width < 4.0 * grid.hy();
    if narrow_x || narrow_y {
        return Err(Error::domain(
            "bump support is narrower than 4 cells and cannot be resolved",
        ));
    }

    let dim = grid.dim();
    let shape = Field::from_fn(*grid, |x, y| {
        let dx = x - center.0;
        let dy = if dim == 1 { 0.0 } else { y - center.1 };
        let rho = (dx * dx + dy * dy).sqrt();
        if rho < width {
            let c = (std::f64::consts::FRAC_PI_2 * rho / width).cos();
            c * c
        } else {
            0.0
        }
    });
    let norm = shape.lp_pow(theta);
    if norm <= 0.0 {
        return Err(Error::domain("bump does not cover any cell center"));
    }
    Ok(shape.scaled((target_ltheta / norm).powf(1.0 / theta)))
}

/// Attraction-repulsion model
///
/// ```text
/// u_t = eps Δu − chi ∇·(u∇z) + xi ∇·(u∇w) + r u − mu u^theta
///   0 = d1 Δz − beta z + alpha u
///   0 = d2 Δw − delta w + gamma u
/// ```
///
/// With `xi gamma = chi alpha` the combination `v = chi z − xi w` obeys the
/// indirect-production system with `alpha` replaced by `xi (d1 delta / d2 − beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ARParams {
    pub chi: f64,
    pub xi: f64,
    pub params: Params,
}

impl ARParams {
    /// Sign checks and `d1 delta != d2 beta`, without the compatibility condition.
    pub fn validate_basic(&self) -> Result<()> {
        self.params.validate()?;
        for (name, value) in [("chi", self.chi), ("xi", self.xi)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::domain(format!("{name} must be positive")));
            }
        }
        let p = &self.params;
        let a = p.d1 * p.delta;
        let b = p.d2 * p.beta;
        if (a - b).abs() <= 1e-9 * a.max(b) {
            return Err(Error::domain("d1*delta must differ from d2*beta"));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_basic()?;
        let lhs = self.xi * self.params.gamma;
        let rhs = self.chi * self.params.alpha;
        if (lhs - rhs).abs() > 1e-12 * lhs.abs().max(rhs.abs()) {
            return Err(Error::domain("compatibility xi*gamma = chi*alpha is violated"));
        }
        Ok(())
    }

    /// `xi (d1 delta / d2 − beta)`
    pub fn reduced_alpha(&self) -> f64 {
        let p = &self.params;
        self.xi * (p.d1 * p.delta / p.d2 - p.beta)
    }

    /// Applies the reduction formula without checking compatibility; used by
    /// the cross-check negative control.
    pub(crate) fn reduce_unchecked(&self) -> Result<Params> {
        self.validate_basic()?;
        let alpha = self.reduced_alpha();
        if alpha <= 0.0 {
            return Err(Error::domain(format!(
                "reduced alpha = {alpha} is not positive"
            )));
        }
        Ok(Params {
            alpha,
            ..self.params
        })
    }
}

/// Indirect-production parameters equivalent to `arp`.
///
/// The reduction is exact on the discrete level when additionally `d1 == d2`;
/// otherwise a residual source proportional to `chi alpha (d1/d2 − 1) u`
/// remains in the `v` equation.
pub fn ar_reduce(arp: &ARParams) -> Result<Params> {
    arp.validate()?;
    arp.reduce_unchecked()
}
