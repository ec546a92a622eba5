//! Matrix-free 5-point operators `-Delta_h + diag`, preconditioned conjugate
//! gradients and the pencil eigensolver.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use super::grid::Grid2D;
use crate::error::{Error, Result};

/// `out = (-Delta_h + diag) x` on interior nodes, zero on the boundary.
pub(crate) fn apply(grid: &Grid2D, diag: &[f64], x: &[f64], out: &mut [f64]) {
    let n = grid.n;
    let inv = 1.0 / (grid.hg * grid.hg);
    out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        if i == 0 || i + 1 == n {
            row.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        row[0] = 0.0;
        row[n - 1] = 0.0;
        for j in 1..n - 1 {
            let k = i * n + j;
            let lap = 4.0 * x[k] - x[k - 1] - x[k + 1] - x[k - n] - x[k + n];
            row[j] = lap * inv + diag[k] * x[k];
        }
    });
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.par_iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned CG for `(-Delta_h + diag) x = rhs`. Fails on
/// negative curvature.
pub(crate) fn cg(
    grid: &Grid2D,
    diag: &[f64],
    rhs: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize)> {
    let len = grid.len();
    let inv = 1.0 / (grid.hg * grid.hg);
    let precond: Vec<f64> = (0..len)
        .map(|k| {
            if grid.is_interior(k) {
                let d = 4.0 * inv + diag[k];
                if d > 0.0 {
                    1.0 / d
                } else {
                    0.0
                }
            } else {
                0.0
            }
        })
        .collect();
    if (0..len).any(|k| grid.is_interior(k) && precond[k] == 0.0) {
        return Err(Error::Numeric("operator has a nonpositive diagonal".into()));
    }
    let mut x = x0.map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; len]);
    let mut ax = vec![0.0; len];
    apply(grid, diag, &x, &mut ax);
    let mut r: Vec<f64> = (0..len)
        .map(|k| {
            if grid.is_interior(k) {
                rhs[k] - ax[k]
            } else {
                0.0
            }
        })
        .collect();
    let bnorm = dot(rhs, rhs).sqrt();
    if bnorm == 0.0 {
        return Ok((vec![0.0; len], 0));
    }
    let mut z: Vec<f64> = r.iter().zip(&precond).map(|(a, b)| a * b).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; len];
    for it in 0..max_iter {
        if dot(&r, &r).sqrt() <= tol * bnorm {
            return Ok((x, it));
        }
        apply(grid, diag, &p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::Numeric(
                "negative curvature in conjugate gradients".into(),
            ));
        }
        let alpha = rz / pap;
        x.par_iter_mut()
            .zip(&p)
            .for_each(|(xi, pi)| *xi += alpha * pi);
        r.par_iter_mut()
            .zip(&ap)
            .for_each(|(ri, api)| *ri -= alpha * api);
        z.par_iter_mut()
            .zip(&r)
            .zip(&precond)
            .for_each(|((zi, ri), mi)| *zi = ri * mi);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.par_iter_mut()
            .zip(&z)
            .for_each(|(pi, zi)| *pi = zi + beta * *pi);
    }
    if dot(&r, &r).sqrt() <= tol * bnorm * 10.0 {
        return Ok((x, max_iter));
    }
    Err(Error::Numeric(format!(
        "conjugate gradients did not reach {tol:e} in {max_iter} iterations"
    )))
}

#[derive(Debug, Clone)]
pub struct PencilOptions {
    pub tol: f64,
    pub max_outer: usize,
    pub cg_tol: f64,
    pub cg_max: usize,
}

impl Default for PencilOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_outer: 400,
            cg_tol: 1e-12,
            cg_max: 20_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PencilEigen {
    pub value: f64,
    pub vector: Vec<f64>,
    pub outer: usize,
    pub inner: usize,
    /// `|A v - value B v| / (value |B v|)`.
    pub residual: f64,
}

/// Smallest eigenvalue of `(-Delta_h + a) v = value * b v` with `b >= 0`, by
/// inverse iteration with a shift continued towards the current Rayleigh
/// quotient.
pub(crate) fn smallest_pencil(
    grid: &Grid2D,
    a: &[f64],
    b: &[f64],
    start: Option<&[f64]>,
    opts: &PencilOptions,
) -> Result<PencilEigen> {
    let len = grid.len();
    let interior: Vec<bool> = (0..len).map(|k| grid.is_interior(k)).collect();
    let mut v: Vec<f64> = match start {
        Some(s) => s.to_vec(),
        None => interior
            .iter()
            .map(|&i| if i { 1.0 } else { 0.0 })
            .collect(),
    };
    if (0..len).all(|k| !interior[k] || b[k] == 0.0) {
        return Err(Error::Numeric(
            "right-hand weight vanishes on the grid".into(),
        ));
    }
    let mut av = vec![0.0; len];
    let bnorm = |v: &[f64]| -> f64 {
        v.par_iter()
            .zip(b)
            .map(|(x, w)| w * x * x)
            .sum::<f64>()
            .sqrt()
    };
    let rayleigh = |v: &[f64], av: &mut Vec<f64>| -> f64 {
        apply(grid, a, v, av);
        dot(v, av) / v.par_iter().zip(b).map(|(x, w)| w * x * x).sum::<f64>()
    };
    let nb = bnorm(&v);
    if nb == 0.0 {
        return Err(Error::Numeric("start vector has no weight".into()));
    }
    v.iter_mut().for_each(|x| *x /= nb);
    let mut value = rayleigh(&v, &mut av);
    let mut theta = 0.0_f64;
    let mut inner = 0;
    let mut prev = value;
    for outer in 1..=opts.max_outer {
        let tau = theta * value;
        let shifted: Vec<f64> = a.iter().zip(b).map(|(x, w)| x - tau * w).collect();
        let rhs: Vec<f64> = v.iter().zip(b).map(|(x, w)| x * w).collect();
        // v / (value - tau) solves the shifted system when v is converged
        let guess: Vec<f64> = v.iter().map(|x| x / (value - tau).max(1e-300)).collect();
        let (w, its) = match cg(grid, &shifted, &rhs, Some(&guess), opts.cg_tol, opts.cg_max) {
            Ok(r) => r,
            Err(_) if theta > 0.0 => {
                theta *= 0.5;
                continue;
            }
            Err(e) => return Err(e),
        };
        inner += its;
        let sum: f64 = w.iter().sum();
        let sign = if sum < 0.0 { -1.0 } else { 1.0 };
        let nw = bnorm(&w);
        if nw == 0.0 || !nw.is_finite() {
            return Err(Error::Numeric("inverse iteration collapsed".into()));
        }
        v = w.iter().map(|x| sign * x / nw).collect();
        value = rayleigh(&v, &mut av);
        let res: f64 = av
            .iter()
            .zip(&v)
            .zip(b)
            .map(|((ax, x), w)| {
                let d = ax - value * w * x;
                d * d
            })
            .sum::<f64>()
            .sqrt();
        let bv: f64 = v
            .iter()
            .zip(b)
            .map(|(x, w)| (w * x) * (w * x))
            .sum::<f64>()
            .sqrt();
        let residual = res / (value.abs() * bv).max(f64::MIN_POSITIVE);
        if residual < opts.tol {
            return Ok(PencilEigen {
                value,
                vector: v,
                outer,
                inner,
                residual,
            });
        }
        let change = ((value - prev) / value).abs();
        prev = value;
        theta = if change < 1e-6 {
            0.995
        } else if change < 1e-4 {
            theta.max(0.98)
        } else if change < 1e-2 {
            theta.max(0.9)
        } else {
            theta.max(0.5)
        };
    }
    Err(Error::Numeric(format!(
        "inverse iteration did not converge in {} steps",
        opts.max_outer
    )))
}

/// Dense oracle for small grids: smallest eigenvalue of the pencil with a
/// positive weight, via the symmetric eigensolver.
pub fn dense_smallest(grid: &Grid2D, a: &[f64], b: &[f64]) -> Result<f64> {
    let n = grid.n;
    let ni = n - 2;
    let size = ni * ni;
    if size > 4000 {
        return Err(Error::Input(format!(
            "dense oracle limited to 4000 unknowns, got {size}"
        )));
    }
    let idx = |i: usize, j: usize| (i - 1) * ni + (j - 1);
    let inv = 1.0 / (grid.hg * grid.hg);
    let mut m = DMatrix::<f64>::zeros(size, size);
    let mut scale = vec![0.0; size];
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            let w = b[i * n + j];
            if w <= 0.0 {
                return Err(Error::Input("dense oracle needs a positive weight".into()));
            }
            scale[idx(i, j)] = 1.0 / w.sqrt();
        }
    }
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            let r = idx(i, j);
            m[(r, r)] = (4.0 * inv + a[i * n + j]) * scale[r] * scale[r];
            let mut link = |ii: usize, jj: usize| {
                if ii >= 1 && ii < n - 1 && jj >= 1 && jj < n - 1 {
                    let c = idx(ii, jj);
                    m[(r, c)] = -inv * scale[r] * scale[c];
                }
            };
            link(i - 1, j);
            link(i + 1, j);
            link(i, j - 1);
            link(i, j + 1);
        }
    }
    let eig = SymmetricEigen::new(m);
    Ok(eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min))
}
