//! The cutoff eigenproblem `(-Delta + q) v = lambda (p phi_N) v` on a grid,
//! by a direct pencil solve and by bisection on the top eigenvalue of
//! `(-Delta + V1)^{-1} V2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{Cutoff, Grid2D};
use super::linear::{apply, smallest_pencil, PencilEigen, PencilOptions};
use super::potentials::PotentialPair;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveRoute {
    Direct,
    Bisect,
    Both,
}

impl std::str::FromStr for SolveRoute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Self::Direct),
            "bisect" => Ok(Self::Bisect),
            "both" => Ok(Self::Both),
            _ => Err(Error::Input(format!(
                "unknown route {s:?} (direct, bisect, both)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Half-width of the box.
    #[serde(rename = "L")]
    pub l: f64,
    pub hg: f64,
    /// Cutoff radius.
    #[serde(rename = "N")]
    pub n: f64,
    /// Relative eigen-residual target.
    pub tol: f64,
    pub max_iter: usize,
    pub route: SolveRoute,
    /// Relative agreement required between the two routes.
    pub agreement: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            l: 8.0,
            hg: 1.0 / 16.0,
            n: 4.0,
            tol: 1e-10,
            max_iter: 400,
            route: SolveRoute::Both,
            agreement: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectReport {
    pub lambda: f64,
    pub outer_iterations: usize,
    pub cg_iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BisectReport {
    pub lambda: f64,
    /// `(lambda, mu_1(lambda))` at every evaluation, in order.
    pub mu_curve: Vec<(f64, f64)>,
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityProbe {
    pub delta: f64,
    pub mu_below: f64,
    pub mu_above: f64,
    /// `mu_1(lambda - delta) > 1 > mu_1(lambda + delta)`.
    pub brackets_one: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralSolution {
    pub grid: Grid2D,
    pub cutoff: Cutoff,
    pub lambda: f64,
    /// Nodal values, normalized so that `f(0) = 1`.
    #[serde(skip)]
    pub f: Vec<f64>,
    /// `ln f`, finite wherever `f > 0` even when `f` underflows.
    #[serde(skip)]
    pub log_f: Vec<f64>,
    #[serde(skip)]
    pub q: Vec<f64>,
    /// `p * phi_N` at the nodes.
    #[serde(skip)]
    pub weight: Vec<f64>,
    pub m: u32,
    pub s: u32,
    pub direct: Option<DirectReport>,
    pub bisect: Option<BisectReport>,
    pub route_gap: Option<f64>,
    pub monotonicity: Option<MonotonicityProbe>,
    /// `(int |grad f|^2 + q f^2) / int p phi_N f^2` by grid quadrature.
    pub rayleigh: f64,
    pub rayleigh_rel_error: f64,
    /// `max |(A - lambda B) f| / max |lambda B f|`.
    pub equation_residual: f64,
    pub positive: bool,
    pub min_log_f: f64,
    /// Nodes whose values were recomputed by the log-domain sweep.
    pub polished_nodes: usize,
}

impl SpectralSolution {
    pub fn value(&self, t1: f64, t2: f64) -> Option<f64> {
        self.grid.interpolate(&self.f, t1, t2)
    }

    /// `q - lambda_N p phi_N` at node `k`.
    pub fn potential(&self, k: usize) -> f64 {
        self.q[k] - self.lambda * self.weight[k]
    }

    /// Writes `t1,t2,f` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t1,t2,f\n");
        for k in 0..self.grid.len() {
            let (x, y) = self.grid.point(k);
            out.push_str(&format!("{x},{y},{:e}\n", self.f[k]));
        }
        out
    }
}

/// Splits `V = q - lambda w` into `V1 >= 1` and `V2 >= 0` with `V = V1 - V2`.
pub fn coercive_part(v: f64) -> f64 {
    if v >= 1.0 {
        v
    } else {
        1.0
    }
}

pub fn compact_part(v: f64) -> f64 {
    if v < 1.0 {
        1.0 - v
    } else {
        0.0
    }
}

struct Problem<'a> {
    grid: &'a Grid2D,
    q: Vec<f64>,
    w: Vec<f64>,
    opts: PencilOptions,
}

impl Problem<'_> {
    fn mu1(&self, lambda: f64, start: Option<&[f64]>) -> Result<PencilEigen> {
        let v: Vec<f64> = self
            .q
            .iter()
            .zip(&self.w)
            .map(|(q, w)| q - lambda * w)
            .collect();
        let v1: Vec<f64> = v.iter().map(|&x| coercive_part(x)).collect();
        let v2: Vec<f64> = v
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                if self.grid.is_interior(k) {
                    compact_part(x)
                } else {
                    0.0
                }
            })
            .collect();
        smallest_pencil(self.grid, &v1, &v2, start, &self.opts)
    }

    /// Illinois regula falsi on `ln mu_1(lambda) = 0`.
    fn bisect(&self, guess: Option<f64>) -> Result<(BisectReport, Vec<f64>)> {
        let mut curve = Vec::new();
        let mut start: Option<Vec<f64>> = None;
        let eval = |lambda: f64,
                    start: &mut Option<Vec<f64>>,
                    curve: &mut Vec<(f64, f64)>|
         -> Result<f64> {
            let e = self.mu1(lambda, start.as_deref())?;
            curve.push((lambda, e.value));
            *start = Some(e.vector);
            Ok(e.value.ln())
        };
        let mut lo = 0.0;
        let mut g_lo = eval(lo, &mut start, &mut curve)?;
        if g_lo <= 0.0 {
            return Err(Error::Numeric(format!(
                "mu_1(0) = {} is not above 1",
                g_lo.exp()
            )));
        }
        let mut hi = guess.filter(|g| *g > 0.0).map(|g| 1.05 * g).unwrap_or(1.0);
        let mut g_hi = eval(hi, &mut start, &mut curve)?;
        let mut expand = 0;
        while g_hi > 0.0 {
            lo = hi;
            g_lo = g_hi;
            hi *= 2.0;
            g_hi = eval(hi, &mut start, &mut curve)?;
            expand += 1;
            if expand > 60 {
                return Err(Error::Numeric("no lambda with mu_1 < 1 found".into()));
            }
        }
        let mut side = 0i8;
        let mut x = hi;
        for _ in 0..200 {
            x = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
            if !(x > lo && x < hi) {
                x = 0.5 * (lo + hi);
            }
            let gx = eval(x, &mut start, &mut curve)?;
            if gx.abs() < 1e-13 {
                break;
            }
            if gx > 0.0 {
                lo = x;
                g_lo = gx;
                if side == 1 {
                    g_hi *= 0.5;
                }
                side = 1;
            } else {
                hi = x;
                g_hi = gx;
                if side == -1 {
                    g_lo *= 0.5;
                }
                side = -1;
            }
            if hi - lo <= 1e-12 * hi {
                x = 0.5 * (lo + hi);
                break;
            }
        }
        let vec = start.unwrap_or_default();
        Ok((
            BisectReport {
                lambda: x,
                mu_curve: curve,
                bracket: (lo, hi),
            },
            vec,
        ))
    }
}

/// Solves the cutoff eigenproblem and assembles the solution with its
/// consistency measurements.
pub fn solve_lambda(pair: &PotentialPair, cfg: &SolverConfig) -> Result<SpectralSolution> {
    let grid = Grid2D::new(cfg.l, cfg.hg)?;
    let cutoff = Cutoff::new(cfg.n)?;
    let q = grid.sample(|x, y| pair.q_cell(x, y, cfg.hg));
    let w = grid.sample(|x, y| pair.p_at(x, y) * cutoff.at(x, y));
    let opts = PencilOptions {
        tol: cfg.tol,
        max_outer: cfg.max_iter,
        ..PencilOptions::default()
    };
    let problem = Problem {
        grid: &grid,
        q: q.clone(),
        w: w.clone(),
        opts,
    };

    let mut direct = None;
    let mut vector = None;
    if matches!(cfg.route, SolveRoute::Direct | SolveRoute::Both) {
        let e = smallest_pencil(&grid, &q, &w, None, &problem.opts)?;
        direct = Some(DirectReport {
            lambda: e.value,
            outer_iterations: e.outer,
            cg_iterations: e.inner,
            residual: e.residual,
        });
        vector = Some(e.vector);
    }
    let mut bisect = None;
    let mut monotonicity = None;
    if matches!(cfg.route, SolveRoute::Bisect | SolveRoute::Both) {
        let (report, v) = problem.bisect(direct.as_ref().map(|d| d.lambda))?;
        let delta = 1e-3 * report.lambda;
        let below = problem.mu1(report.lambda - delta, Some(&v))?.value;
        let above = problem.mu1(report.lambda + delta, Some(&v))?.value;
        monotonicity = Some(MonotonicityProbe {
            delta,
            mu_below: below,
            mu_above: above,
            brackets_one: below > 1.0 && above < 1.0,
        });
        if vector.is_none() {
            vector = Some(v);
        }
        bisect = Some(report);
    }
    let lambda = direct
        .as_ref()
        .map(|d| d.lambda)
        .or(bisect.as_ref().map(|b| b.lambda))
        .expect("at least one route ran");
    let route_gap = match (&direct, &bisect) {
        (Some(d), Some(b)) => Some(((d.lambda - b.lambda) / d.lambda).abs()),
        _ => None,
    };
    if let Some(gap) = route_gap {
        if gap > cfg.agreement {
            return Err(Error::Numeric(format!(
                "routes disagree: direct {} vs bisection {} (relative gap {gap:e})",
                direct.as_ref().unwrap().lambda,
                bisect.as_ref().unwrap().lambda
            )));
        }
    }
    if !(lambda > 0.0) {
        return Err(Error::Numeric(format!(
            "lambda_N = {lambda} is not positive"
        )));
    }

    let mut f = vector.expect("eigenvector present");
    let (log_f, polished) = polish(&grid, &q, &w, lambda, &mut f);
    let origin = grid.origin();
    let l0 = log_f[origin];
    let log_f: Vec<f64> = log_f.iter().map(|x| x - l0).collect();
    let f: Vec<f64> = log_f.iter().map(|x| x.exp()).collect();
    let interior: Vec<usize> = (0..grid.len()).filter(|&k| grid.is_interior(k)).collect();
    let min_log_f = interior
        .iter()
        .map(|&k| log_f[k])
        .fold(f64::INFINITY, f64::min);
    let positive = min_log_f.is_finite();
    if !positive {
        return Err(Error::Numeric("eigenfunction changes sign".into()));
    }

    // Quadrature: grid energy equals f^T A f h^2 for the 5-point stencil.
    let mut af = vec![0.0; grid.len()];
    apply(&grid, &q, &f, &mut af);
    let num: f64 = f.par_iter().zip(&af).map(|(x, y)| x * y).sum();
    let den: f64 = f.par_iter().zip(&w).map(|(x, y)| y * x * x).sum();
    let rayleigh = num / den;
    let rayleigh_rel_error = ((rayleigh - lambda) / lambda).abs();
    let res = interior
        .iter()
        .map(|&k| (af[k] - lambda * w[k] * f[k]).abs())
        .fold(0.0, f64::max);
    let scale = interior
        .iter()
        .map(|&k| (lambda * w[k] * f[k]).abs())
        .fold(0.0, f64::max);

    Ok(SpectralSolution {
        grid,
        cutoff,
        lambda,
        f,
        log_f,
        q,
        weight: w,
        m: pair.m,
        s: pair.s,
        direct,
        bisect,
        route_gap,
        monotonicity,
        rayleigh,
        rayleigh_rel_error,
        equation_residual: res / scale,
        positive,
        min_log_f,
        polished_nodes: polished,
    })
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Recomputes nodes below the solver's noise floor from the discrete equation
/// `f_i = sum_nbr f_j / (4 + hg^2 (q_i - lambda w_i))`, in log form, with the
/// remaining nodes held fixed. Returns `ln f` and the number of nodes swept.
fn polish(grid: &Grid2D, q: &[f64], w: &[f64], lambda: f64, f: &mut [f64]) -> (Vec<f64>, usize) {
    let n = grid.n;
    let max = f.iter().cloned().fold(0.0, f64::max);
    let floor = 1e-9 * max;
    let mut log_f: Vec<f64> = f
        .iter()
        .map(|&x| {
            if x > 0.0 {
                (x / max).ln()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let region: Vec<usize> = (0..grid.len())
        .filter(|&k| grid.is_interior(k) && f[k] <= floor)
        .collect();
    let h2 = grid.hg * grid.hg;
    let denom: Vec<f64> = region
        .iter()
        .map(|&k| 4.0 + h2 * (q[k] - lambda * w[k]))
        .collect();
    for &k in &region {
        log_f[k] = f64::NEG_INFINITY;
    }
    for sweep in 0..2000 {
        let mut change = 0.0f64;
        let order: Box<dyn Iterator<Item = usize>> = if sweep % 2 == 0 {
            Box::new(0..region.len())
        } else {
            Box::new((0..region.len()).rev())
        };
        for r in order {
            let k = region[r];
            if denom[r] <= 0.0 {
                continue;
            }
            let nb = [log_f[k - 1], log_f[k + 1], log_f[k - n], log_f[k + n]];
            let val = log_sum_exp(&nb) - denom[r].ln();
            let old = log_f[k];
            let d = if old.is_finite() {
                (val - old).abs()
            } else {
                f64::INFINITY
            };
            change = change.max(d);
            log_f[k] = val;
        }
        if change < 1e-13 {
            break;
        }
    }
    for (k, v) in f.iter_mut().enumerate() {
        *v = log_f[k].exp() * max;
    }
    let log_f = log_f.iter().map(|x| x + max.ln()).collect();
    (log_f, region.len())
}
