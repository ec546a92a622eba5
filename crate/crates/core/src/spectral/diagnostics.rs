//! Measurements on a computed eigenfunction: Harnack ratios, the angular
//! average `F(r)`, polynomial growth and the weighted angular inequality.

use std::f64::consts::PI;

use serde::Serialize;

use super::potentials::PotentialPair;
use super::solve::SpectralSolution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct HarnackReport {
    pub center: (f64, f64),
    pub radius: f64,
    pub sup: f64,
    pub inf: f64,
    pub ratio: f64,
    /// `R * sup_{B_2R} |V|^{1/2}`.
    pub scale: f64,
    pub scale_bound: f64,
    pub scale_condition_met: bool,
    pub nodes: usize,
}

/// `sup f / inf f` over `B_R(center)` together with the scale quantity
/// `R sup |V|^{1/2}` over `B_2R`.
pub fn harnack_ratio(
    sol: &SpectralSolution,
    center: (f64, f64),
    radius: f64,
    scale_bound: f64,
) -> Result<HarnackReport> {
    let g = &sol.grid;
    let reach = center.0.abs().max(center.1.abs()) + 2.0 * radius;
    if reach > g.l - g.hg {
        return Err(Error::Input(format!(
            "ball of radius {} around ({}, {}) leaves the grid",
            2.0 * radius,
            center.0,
            center.1
        )));
    }
    let inner = g.ball(center, radius);
    if inner.is_empty() {
        return Err(Error::Input("ball contains no grid nodes".into()));
    }
    let sup = inner.iter().map(|&k| sol.f[k]).fold(0.0, f64::max);
    let inf = inner
        .iter()
        .map(|&k| sol.f[k])
        .fold(f64::INFINITY, f64::min);
    let vmax = g
        .ball(center, 2.0 * radius)
        .iter()
        .map(|&k| sol.potential(k).abs())
        .fold(0.0, f64::max);
    let scale = radius * vmax.sqrt();
    Ok(HarnackReport {
        center,
        radius,
        sup,
        inf,
        ratio: sup / inf,
        scale,
        scale_bound,
        scale_condition_met: scale <= scale_bound,
        nodes: inner.len(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AngularProfile {
    pub r: Vec<f64>,
    /// Angular mean of `f` on the circle of radius `r`.
    pub big_f: Vec<f64>,
    /// `int q1 f / int f`.
    pub a: Vec<f64>,
    /// `int p1 f / int f`.
    pub b: Vec<f64>,
    /// Residual of `-(F'' + F'/r) + (a r^{2m} - lambda phi_N b r^{2s}) F` at
    /// interior radii, relative to `max(|F''|, |potential term|)`.
    pub residual: Vec<f64>,
    pub max_residual: f64,
    pub f_max: f64,
    /// Radii of interior local maxima of `F`.
    pub local_maxima: Vec<f64>,
    /// Largest radius of a local maximum (0 when `F` is monotone).
    pub threshold_radius: f64,
    /// `F` is nonincreasing on the last quarter of the radii.
    pub decreasing_tail: bool,
}

/// Angular averages along rays by bilinear interpolation, for radii up to
/// `r_max` (default: 90% of the half-width).
pub fn angular_profile(
    sol: &SpectralSolution,
    pair: &PotentialPair,
    r_max: Option<f64>,
    nr: usize,
) -> Result<AngularProfile> {
    let g = &sol.grid;
    let r_max = r_max.unwrap_or(0.9 * g.l);
    if r_max > g.l {
        return Err(Error::Input(format!(
            "radius {r_max} exceeds the grid half-width {}",
            g.l
        )));
    }
    let nth = 512;
    let nr = nr.max(8);
    let dr = r_max / nr as f64;
    let q1: Vec<f64> = (0..nth)
        .map(|k| pair.q1(2.0 * PI * k as f64 / nth as f64))
        .collect();
    let p1: Vec<f64> = (0..nth)
        .map(|k| pair.p1(2.0 * PI * k as f64 / nth as f64))
        .collect();
    let mut r = Vec::with_capacity(nr + 1);
    let mut big_f = Vec::with_capacity(nr + 1);
    let mut a = Vec::with_capacity(nr + 1);
    let mut b = Vec::with_capacity(nr + 1);
    for i in 0..=nr {
        let rad = i as f64 * dr;
        let mut sf = 0.0;
        let mut sq = 0.0;
        let mut sp = 0.0;
        for k in 0..nth {
            let th = 2.0 * PI * k as f64 / nth as f64;
            let v = g
                .interpolate(&sol.f, rad * th.cos(), rad * th.sin())
                .ok_or_else(|| Error::Input("ray leaves the grid".into()))?;
            sf += v;
            sq += q1[k] * v;
            sp += p1[k] * v;
        }
        r.push(rad);
        big_f.push(sf / nth as f64);
        a.push(if sf > 0.0 { sq / sf } else { 0.0 });
        b.push(if sf > 0.0 { sp / sf } else { 0.0 });
    }
    let (m, s) = (pair.m as i32, pair.s as i32);
    let mut residual = vec![0.0; r.len()];
    for i in 1..nr {
        let d2 = (big_f[i + 1] - 2.0 * big_f[i] + big_f[i - 1]) / (dr * dr);
        let d1 = (big_f[i + 1] - big_f[i - 1]) / (2.0 * dr);
        let pot =
            a[i] * r[i].powi(2 * m) - sol.lambda * sol.cutoff.eval(r[i]) * b[i] * r[i].powi(2 * s);
        let lhs = -(d2 + d1 / r[i]) + pot * big_f[i];
        let scale = d2.abs().max((pot * big_f[i]).abs()).max(1e-300);
        residual[i] = (lhs / scale).abs();
    }
    let max_residual = residual.iter().cloned().fold(0.0, f64::max);
    let local_maxima: Vec<f64> = (1..nr)
        .filter(|&i| big_f[i] > big_f[i - 1] && big_f[i] >= big_f[i + 1])
        .map(|i| r[i])
        .collect();
    let tail = 3 * nr / 4;
    let decreasing_tail = (tail..nr).all(|i| big_f[i + 1] <= big_f[i] * (1.0 + 1e-12));
    Ok(AngularProfile {
        f_max: big_f.iter().cloned().fold(0.0, f64::max),
        threshold_radius: local_maxima.last().copied().unwrap_or(0.0),
        r,
        big_f,
        a,
        b,
        residual,
        max_residual,
        local_maxima,
        decreasing_tail,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub exponent: f64,
    /// `max f / (1 + |t|)^e` over the grid.
    pub sup: f64,
    pub location: (f64, f64),
}

pub fn growth_check(sol: &SpectralSolution, exponent: f64) -> GrowthReport {
    let g = &sol.grid;
    let mut best = (0.0, (0.0, 0.0));
    for k in 0..g.len() {
        let (x, y) = g.point(k);
        let v = sol.f[k] / (1.0 + x.hypot(y)).powf(exponent);
        if v > best.0 {
            best = (v, (x, y));
        }
    }
    GrowthReport {
        exponent,
        sup: best.0,
        location: best.1,
    }
}

/// Smallest `C2` with `f(t) <= C1 exp(C2 |t|^{s+1})` on the grid, `C1 = max(1, f)` near the origin.
pub fn growth_constant(sol: &SpectralSolution) -> (f64, f64) {
    let g = &sol.grid;
    let c1 = 1.0f64;
    let e = (sol.s + 1) as i32;
    let mut c2 = 0.0f64;
    for k in 0..g.len() {
        let (x, y) = g.point(k);
        let r = x.hypot(y);
        if r < g.hg || sol.f[k] <= c1 {
            continue;
        }
        c2 = c2.max((sol.f[k] / c1).ln() / r.powi(e));
    }
    (c1, c2)
}

#[derive(Debug, Clone, Serialize)]
pub struct AngularInequality {
    pub epsilon: f64,
    /// `eta = (2s - 2m + k)/k + s + eps/2 + eps/k`.
    pub eta: f64,
    /// `(r, c(r))` with `c(r) = r^{2s+eps} int f / int q1 r^{2m} f`.
    pub ratios: Vec<(f64, f64)>,
    /// `max c / min c` over the sampled radii.
    pub spread: f64,
}

/// Picks the largest `eps = 2^-k` with `eta <= 0` and samples the ratio in
/// the weighted angular inequality.
pub fn angular_inequality(
    sol: &SpectralSolution,
    pair: &PotentialPair,
    radii: &[f64],
) -> Result<Option<AngularInequality>> {
    if pair.j == 0 {
        return Ok(None);
    }
    let (s, m, k) = (pair.s as f64, pair.m as f64, pair.j as f64);
    let base = (2.0 * s - 2.0 * m + k) / k + s;
    let mut eps = 1.0;
    let mut found = None;
    for _ in 0..40 {
        let eta = base + eps / 2.0 + eps / k;
        if eta <= 0.0 {
            found = Some((eps, eta));
            break;
        }
        eps *= 0.5;
    }
    let Some((epsilon, eta)) = found else {
        return Ok(None);
    };
    let nth = 1024;
    let mut ratios = Vec::new();
    for &r in radii {
        let mut sf = 0.0;
        let mut sq = 0.0;
        for i in 0..nth {
            let th = 2.0 * PI * i as f64 / nth as f64;
            let v = sol
                .value(r * th.cos(), r * th.sin())
                .ok_or_else(|| Error::Input(format!("radius {r} leaves the grid")))?;
            sf += v;
            sq += pair.q1(th) * v;
        }
        let c = r.powf(2.0 * s + epsilon) * sf / (sq * r.powf(2.0 * m));
        ratios.push((r, c));
    }
    let hi = ratios.iter().map(|x| x.1).fold(0.0, f64::max);
    let lo = ratios.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    Ok(Some(AngularInequality {
        epsilon,
        eta,
        ratios,
        spread: hi / lo,
    }))
}
