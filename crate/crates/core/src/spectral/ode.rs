//! The one-dimensional problem `-psi'' + z^{2m} psi = lambda psi` and the
//! separated planar solutions built from its ground state.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::potentials::PotentialPair;
use crate::error::{Error, Result};
use crate::scalar::rational_to_f64;

#[derive(Debug, Clone, Serialize)]
pub struct DecayCertificate {
    pub turning_point: f64,
    /// `psi(Z) / psi(0)` at the far boundary `Z`.
    pub tail_ratio: f64,
    /// `psi` is decreasing on `[turning_point, Z]`.
    pub monotone_tail: bool,
    /// Jump in `psi'/psi` where the outward and inward sweeps meet.
    pub matching_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OdeGroundState {
    pub m: u32,
    pub lambda0: f64,
    pub bracket: (f64, f64),
    pub boundary: f64,
    pub step: f64,
    /// Samples on `[0, Z]`; `psi` is even.
    pub z: Vec<f64>,
    pub psi: Vec<f64>,
    #[serde(skip)]
    pub dpsi: Vec<f64>,
    pub decay: DecayCertificate,
}

impl OdeGroundState {
    /// Cubic Hermite interpolation of `psi`, zero beyond the boundary.
    pub fn eval(&self, z: f64) -> f64 {
        let z = z.abs();
        if z >= self.boundary {
            return 0.0;
        }
        let h = self.step;
        let k = ((z / h) as usize).min(self.z.len() - 2);
        let t = (z - self.z[k]) / h;
        let (y0, y1) = (self.psi[k], self.psi[k + 1]);
        let (d0, d1) = (self.dpsi[k] * h, self.dpsi[k + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * d1
    }
}

fn potential(m: u32, z: f64) -> f64 {
    z.powi(2 * m as i32)
}

/// Radius beyond which the decaying solution has lost about `e^-36` relative
/// to the turning point.
fn far_boundary(m: u32, lambda: f64) -> f64 {
    let mut z = lambda.max(0.0).powf(0.5 / m as f64);
    let dz = 1e-3;
    let mut action = 0.0;
    while action < 36.0 {
        action += (potential(m, z) - lambda).max(0.0).sqrt() * dz;
        z += dz;
    }
    z
}

fn step_for(m: u32, z: f64) -> f64 {
    (0.02 / potential(m, z).max(1.0).sqrt()).min(5e-4)
}

/// RK4 for `(y, y')` over `steps` steps of size `h` (negative to go inward).
fn rk4(
    m: u32,
    lambda: f64,
    z0: f64,
    y: (f64, f64),
    h: f64,
    steps: usize,
    mut record: impl FnMut(f64, f64),
) -> (f64, f64) {
    let f = |z: f64, y: f64| (potential(m, z) - lambda) * y;
    let (mut u, mut v) = y;
    let mut z = z0;
    record(u, v);
    for _ in 0..steps {
        let k1u = v;
        let k1v = f(z, u);
        let k2u = v + 0.5 * h * k1v;
        let k2v = f(z + 0.5 * h, u + 0.5 * h * k1u);
        let k3u = v + 0.5 * h * k2v;
        let k3v = f(z + 0.5 * h, u + 0.5 * h * k2u);
        let k4u = v + h * k3v;
        let k4v = f(z + h, u + h * k3u);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        z += h;
        record(u, v);
    }
    (u, v)
}

/// Even shooting from `psi(0) = 1, psi'(0) = 0`: positive at `Z` below the
/// ground state, negative between it and the next even level.
fn shoot(m: u32, lambda: f64, z_max: f64, h: f64) -> f64 {
    let steps = (z_max / h).ceil() as usize;
    rk4(
        m,
        lambda,
        0.0,
        (1.0, 0.0),
        z_max / steps as f64,
        steps,
        |_, _| {},
    )
    .0
}

/// Ground state by shooting and bisection.
pub fn ode_ground_state(m: u32) -> Result<OdeGroundState> {
    if m == 0 {
        return Err(Error::Input("degree m must be at least 1".into()));
    }
    let scan = 0.25;
    let limit = 1e4_f64;
    let mut lo = 0.0;
    let mut hi = f64::NAN;
    let mut z_max = far_boundary(m, limit.min(64.0));
    let mut h = step_for(m, z_max);
    let mut lambda = scan;
    while lambda <= limit {
        let zb = far_boundary(m, lambda);
        if zb > z_max {
            z_max = zb;
            h = step_for(m, z_max);
        }
        if shoot(m, lambda, z_max, h) < 0.0 {
            hi = lambda;
            break;
        }
        lo = lambda;
        lambda += scan;
    }
    if hi.is_nan() {
        return Err(Error::Numeric(format!(
            "no ground-state bracket below {limit}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-13 * hi.max(1.0) {
            break;
        }
        if shoot(m, mid, z_max, h) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo > 1e-8 {
        return Err(Error::Numeric(format!("bisection stalled at [{lo}, {hi}]")));
    }
    let lambda0 = 0.5 * (lo + hi);
    build_state(m, lambda0, (lo, hi), z_max, h)
}

fn build_state(
    m: u32,
    lambda0: f64,
    bracket: (f64, f64),
    z_max: f64,
    h: f64,
) -> Result<OdeGroundState> {
    let steps = (z_max / h).ceil() as usize;
    let h = z_max / steps as f64;
    let turning = lambda0.powf(0.5 / m as f64);
    let km = ((turning / h).round() as usize).clamp(1, steps - 1);
    let mut psi = Vec::with_capacity(steps + 1);
    let mut dpsi = Vec::with_capacity(steps + 1);
    rk4(m, lambda0, 0.0, (1.0, 0.0), h, km, |u, v| {
        psi.push(u);
        dpsi.push(v);
    });
    let kappa = (potential(m, z_max) - lambda0).max(0.0).sqrt();
    let mut tail = Vec::with_capacity(steps - km + 1);
    rk4(m, lambda0, z_max, (1.0, -kappa), -h, steps - km, |u, v| {
        tail.push((u, v))
    });
    tail.reverse();
    let (um, vm) = tail[0];
    let scale = psi[km] / um;
    let matching_gap = (dpsi[km] / psi[km] - vm / um).abs();
    for &(u, v) in &tail[1..] {
        psi.push(u * scale);
        dpsi.push(v * scale);
    }
    if psi.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Numeric("ground state is not positive".into()));
    }
    let z: Vec<f64> = (0..=steps).map(|k| k as f64 * h).collect();
    let monotone_tail = psi[km..].windows(2).all(|w| w[1] <= w[0]);
    Ok(OdeGroundState {
        m,
        lambda0,
        bracket,
        boundary: z_max,
        step: h,
        decay: DecayCertificate {
            turning_point: turning,
            tail_ratio: psi[steps] / psi[0],
            monotone_tail,
            matching_gap,
        },
        z,
        psi,
        dpsi,
    })
}

/// Lowest eigenvalue of `-d^2/dz^2 + z^{2m}` from the Colbert-Miller sinc
/// discretization on a symmetric interval.
pub fn dvr_ground_state(m: u32, points: usize) -> Result<f64> {
    if m == 0 || points < 3 {
        return Err(Error::Input("need m >= 1 and at least 3 points".into()));
    }
    let half = (60.0 * (m + 1) as f64).powf(1.0 / (m + 1) as f64);
    let dz = 2.0 * half / (points + 1) as f64;
    let inv = 1.0 / (dz * dz);
    let mat = DMatrix::from_fn(points, points, |i, j| {
        if i == j {
            let z = -half + (i + 1) as f64 * dz;
            PI * PI / 3.0 * inv + potential(m, z)
        } else {
            let d = i as f64 - j as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            2.0 * sign * inv / (d * d)
        }
    });
    let eig = SymmetricEigen::new(mat);
    Ok(eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparatedKind {
    /// `q = 0`: `f = cos(sqrt(lambda) t1)`.
    Free,
    /// `lambda > lambda0`: `f = psi(t1) cos(mu t2)`.
    Oscillatory,
    /// `lambda <= lambda0`: `f = psi(t1) exp(mu t2)`.
    Exponential,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeparatedSolution {
    pub kind: SeparatedKind,
    pub m: u32,
    /// Spectral parameter after absorbing the constant `p`.
    pub lambda: f64,
    pub lambda0: Option<f64>,
    pub mu: f64,
    /// Variable carrying the well (0 for `t1`, 1 for `t2`).
    pub axis: usize,
    /// `|f(t)| <= e^{C |t|}`.
    pub growth_constant: f64,
    /// Largest `ln|f| / |t|` seen on the residual grid.
    pub measured_growth: f64,
    /// `(hg, max |(-Delta_h + q - lambda p) f| / max |(q + |lambda p|) f|)`.
    pub residuals: Vec<(f64, f64)>,
    pub order: f64,
    #[serde(skip)]
    pub ground: Option<OdeGroundState>,
    #[serde(skip)]
    well_scale: f64,
}

impl SeparatedSolution {
    pub fn eval(&self, t1: f64, t2: f64) -> f64 {
        let (a, b) = if self.axis == 0 { (t1, t2) } else { (t2, t1) };
        match self.kind {
            SeparatedKind::Free => (self.lambda.sqrt() * a).cos(),
            SeparatedKind::Oscillatory => self.well(a) * (self.mu * b).cos(),
            SeparatedKind::Exponential => self.well(a) * (self.mu * b).exp(),
        }
    }

    fn well(&self, z: f64) -> f64 {
        self.ground
            .as_ref()
            .map_or(0.0, |g| g.eval(self.well_scale * z))
    }
}

/// Separated solution of `-Delta f + (q - lambda p) f = 0` for `q = c t_i^{2m}`
/// or `q = 0` with constant `p`; `lambda` defaults to the ground-state level
/// of the well. Residuals are measured on `[-l, l]^2`.
pub fn separated_solution(
    pair: &PotentialPair,
    lambda: Option<f64>,
    l: f64,
    hg: f64,
) -> Result<SeparatedSolution> {
    let p = pair
        .p
        .as_constant()
        .map(|c| rational_to_f64(&c))
        .filter(|c| *c > 0.0)
        .ok_or_else(|| {
            Error::Input(format!(
                "separated solutions need constant p, got {}",
                pair.p
            ))
        })?;
    let (kind, m, axis, lambda0, mu, ground, well_scale) = if pair.q.is_zero() {
        let lam =
            lambda.ok_or_else(|| Error::Input("free case needs an explicit lambda".into()))? * p;
        if lam <= 0.0 {
            return Err(Error::Input("free case needs lambda > 0".into()));
        }
        (SeparatedKind::Free, 0, 0, None, lam.sqrt(), None, 1.0)
    } else {
        let terms: Vec<_> = pair.q.terms().collect();
        let [(e, c)] = terms.as_slice() else {
            return Err(Error::Input(format!(
                "q = {} is not a single power of one variable",
                pair.q
            )));
        };
        let axis = match (e[0], e[1]) {
            (a, 0) if a > 0 => 0,
            (0, b) if b > 0 => 1,
            _ => {
                return Err(Error::Input(format!(
                    "q = {} depends on both variables",
                    pair.q
                )))
            }
        };
        let m = pair.m;
        let c = rational_to_f64(c);
        // -psi'' + c z^{2m} psi: rescale z = c^{-1/(2m+2)} w.
        let well_scale = c.powf(1.0 / (2 * m + 2) as f64);
        let ground = ode_ground_state(m)?;
        let lambda0 = ground.lambda0 * well_scale * well_scale;
        let lam = lambda.map_or(lambda0, |x| x * p);
        let (kind, mu) = if lam > lambda0 {
            (SeparatedKind::Oscillatory, (lam - lambda0).sqrt())
        } else {
            (SeparatedKind::Exponential, (lambda0 - lam).sqrt())
        };
        (kind, m, axis, Some(lambda0), mu, Some(ground), well_scale)
    };
    let lam = match kind {
        SeparatedKind::Free => mu * mu,
        SeparatedKind::Oscillatory => lambda0.unwrap_or(0.0) + mu * mu,
        SeparatedKind::Exponential => lambda0.unwrap_or(0.0) - mu * mu,
    };
    let mut sol = SeparatedSolution {
        kind,
        m,
        lambda: lam,
        lambda0,
        mu,
        axis,
        growth_constant: if kind == SeparatedKind::Exponential {
            mu
        } else {
            0.0
        },
        measured_growth: 0.0,
        residuals: Vec::new(),
        order: f64::NAN,
        ground,
        well_scale,
    };
    for level in 0..3 {
        let h = hg / f64::from(1 << level);
        let (res, growth) = separated_residual(&sol, pair, l, h);
        sol.residuals.push((h, res));
        sol.measured_growth = sol.measured_growth.max(growth);
    }
    let r = &sol.residuals;
    sol.order = ((r[0].1 / r[2].1).ln() / 4f64.ln()).max(0.0);
    Ok(sol)
}

fn separated_residual(sol: &SeparatedSolution, pair: &PotentialPair, l: f64, h: f64) -> (f64, f64) {
    let n = (l / h).round() as i64;
    let mut res = 0.0f64;
    let mut scale = 0.0f64;
    let mut growth = f64::NEG_INFINITY;
    for i in -n + 1..n {
        for j in -n + 1..n {
            let (x, y) = (i as f64 * h, j as f64 * h);
            let f = sol.eval(x, y);
            let lap =
                (sol.eval(x + h, y) + sol.eval(x - h, y) + sol.eval(x, y + h) + sol.eval(x, y - h)
                    - 4.0 * f)
                    / (h * h);
            let r = -lap + (pair.q_at(x, y) - sol.lambda) * f;
            res = res.max(r.abs());
            scale = scale.max(((pair.q_at(x, y) + sol.lambda.abs()) * f).abs());
            let rad = x.hypot(y);
            if rad > 1.0 && f != 0.0 {
                growth = growth.max(f.abs().ln() / rad);
            }
        }
    }
    (res / scale, growth)
}
