//! Zero-flux finite-volume stencils shared by the elliptic and transport code.
//!
//! Boundary cells see a mirrored ghost, so the boundary face flux vanishes
//! and every discrete divergence telescopes to zero over the domain.

use crate::model::Grid;

/// `out = Δ_h x` with the 2·dim+1 point Laplacian and mirrored ghosts.
pub(crate) fn laplacian(grid: &Grid, x: &[f64], out: &mut [f64]) {
    let (nx, ny) = (grid.nx(), grid.ny());
    let ihx2 = 1.0 / (grid.hx() * grid.hx());
    let ihy2 = 1.0 / (grid.hy() * grid.hy());
    let two_d = grid.dim() == 2;
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            let c = x[k];
            let mut acc = 0.0;
            if i > 0 {
                acc += (x[k - 1] - c) * ihx2;
            }
            if i + 1 < nx {
                acc += (x[k + 1] - c) * ihx2;
            }
            if two_d {
                if j > 0 {
                    acc += (x[k - nx] - c) * ihy2;
                }
                if j + 1 < ny {
                    acc += (x[k + nx] - c) * ihy2;
                }
            }
            out[k] = acc;
        }
    }
}

/// Visits every interior face once as `(left, right, spacing)`, x faces first.
pub(crate) fn for_each_face(grid: &Grid, mut f: impl FnMut(usize, usize, f64)) {
    let (nx, ny) = (grid.nx(), grid.ny());
    for j in 0..ny {
        for i in 0..nx - 1 {
            let k = j * nx + i;
            f(k, k + 1, grid.hx());
        }
    }
    if grid.dim() == 2 {
        for j in 0..ny - 1 {
            for i in 0..nx {
                let k = j * nx + i;
                f(k, k + nx, grid.hy());
            }
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
