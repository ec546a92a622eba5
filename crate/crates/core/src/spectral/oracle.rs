//! Closed-form check: for a harmonic homogeneous `h`, `f = exp(-h^2/2)`
//! solves `-Delta f + (h^2 |grad h|^2 - |grad h|^2) f = 0`.

use rayon::prelude::*;
use serde::Serialize;

use super::potentials::planar;
use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::RatPoly;

#[derive(Debug, Clone, Serialize)]
pub struct ResidualLevel {
    pub hg: f64,
    pub linf: f64,
    pub l2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub h: String,
    pub q: String,
    pub p: String,
    pub lambda: f64,
    pub half_width: f64,
    pub levels: Vec<ResidualLevel>,
    /// Orders between consecutive levels, in the max norm.
    pub orders_linf: Vec<f64>,
    pub orders_l2: Vec<f64>,
    /// Order from the coarsest and finest levels.
    pub order: f64,
}

/// Symbolic potentials `(q, p) = (h^2 |grad h|^2, |grad h|^2)`.
pub fn oracle_potentials(h: &RatPoly) -> Result<(RatPoly, RatPoly)> {
    let h = planar(h)?;
    let g = h.gradient(0..2);
    let lap = g[0].derivative(0) + g[1].derivative(1);
    if !lap.is_zero() {
        return Err(Error::Input(format!(
            "h = {h} is not harmonic: Delta h = {lap}"
        )));
    }
    let grad2 = &g[0] * &g[0] + &g[1] * &g[1];
    let q = &(&h * &h) * &grad2;
    Ok((q, grad2))
}

/// Five-point residual of the closed form at `hg`, `hg/2`, `hg/4` on
/// `[-l, l]^2`.
pub fn oracle_residual(h: &RatPoly, l: f64, hg: f64) -> Result<OracleReport> {
    let (q, p) = oracle_potentials(h)?;
    let hp = planar(h)?;
    let hf: MultiPoly<f64> = hp.to_float();
    let qf: MultiPoly<f64> = q.to_float();
    let pf: MultiPoly<f64> = p.to_float();
    let ratio = l / hg;
    if (ratio - ratio.round()).abs() > 1e-9 {
        return Err(Error::Input(format!(
            "half-width {l} is not a multiple of {hg}"
        )));
    }
    let f = |x: f64, y: f64| {
        let v = hf.eval(&[x, y]);
        (-0.5 * v * v).exp()
    };
    let mut levels = Vec::new();
    for k in 0..3 {
        let step = hg / f64::from(1 << k);
        let n = (l / step).round() as i64;
        let (linf, sq) = (-n + 1..n)
            .into_par_iter()
            .map(|i| {
                let x = i as f64 * step;
                let mut linf = 0.0f64;
                let mut sq = 0.0;
                for j in -n + 1..n {
                    let y = j as f64 * step;
                    let c = f(x, y);
                    let lap = (f(x + step, y) + f(x - step, y) + f(x, y + step) + f(x, y - step)
                        - 4.0 * c)
                        / (step * step);
                    let r = -lap + (qf.eval(&[x, y]) - pf.eval(&[x, y])) * c;
                    linf = linf.max(r.abs());
                    sq += r * r;
                }
                (linf, sq)
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1 + b.1));
        levels.push(ResidualLevel {
            hg: step,
            linf,
            l2: (sq * step * step).sqrt(),
        });
    }
    let orders = |sel: fn(&ResidualLevel) -> f64| -> Vec<f64> {
        levels
            .windows(2)
            .map(|w| (sel(&w[0]) / sel(&w[1])).log2())
            .collect()
    };
    let orders_linf = orders(|r| r.linf);
    let orders_l2 = orders(|r| r.l2);
    let order = (levels[0].linf / levels[2].linf).log2() / 2.0;
    Ok(OracleReport {
        h: hp.to_string(),
        q: q.to_string(),
        p: p.to_string(),
        lambda: 1.0,
        half_width: l,
        levels,
        orders_linf,
        orders_l2,
        order,
    })
}
