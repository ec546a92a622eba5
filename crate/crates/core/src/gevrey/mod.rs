//! Gevrey analysis of the synthesized solution along the `a_{m+1}` axis:
//! moment integrals, derivative sequences and order fitting.

mod quad;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

pub use quad::{fornberg, integrate, Quadrature};

use crate::error::{Error, Result};
use crate::induction::CovectorPair;
use crate::scalar::{format_rational, Rational};

/// Applies the natural dilation to both covectors: `lambda1` scales by
/// `rho^{s+1}` and `lambda2` by `rho^{m+1}`.
pub fn dilate_covector(pair: &CovectorPair, rho: &Rational) -> CovectorPair {
    CovectorPair {
        lambda1: pair.lambda1.dilate(rho),
        lambda2: pair.lambda2.dilate(rho),
        s: pair.s,
        m: pair.m,
    }
}

/// A real number stored as sign and natural log of its magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogMagnitude {
    /// -1, 0 or 1.
    pub sign: i8,
    /// `ln |x|`, `-inf` when the value is zero.
    pub ln_abs: f64,
}

impl LogMagnitude {
    pub const ZERO: Self = Self {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn positive(ln_abs: f64) -> Self {
        Self { sign: 1, ln_abs }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn to_f64(&self) -> f64 {
        f64::from(self.sign) * self.ln_abs.exp()
    }
}

fn check_moment_args(k: f64, damping: f64) -> Result<()> {
    if !(k >= 0.0) || !(damping > 0.0) {
        return Err(Error::Input(format!(
            "moment needs K >= 0 and M > 0, got K = {k}, M = {damping}"
        )));
    }
    Ok(())
}

/// `ln int_0^inf rho^K exp(-M rho^{s+1}) d rho
///   = ln Gamma((K+1)/(s+1)) - ln(s+1) - ((K+1)/(s+1)) ln M`.
pub fn ln_moment(k: f64, damping: f64, s: u32) -> Result<f64> {
    check_moment_args(k, damping)?;
    let e = f64::from(s + 1);
    let z = (k + 1.0) / e;
    Ok(ln_gamma(z) - e.ln() - z * damping.ln())
}

/// The moment integral itself; overflows to infinity for large `K`.
pub fn moment_integral(k: f64, damping: f64, s: u32) -> Result<f64> {
    ln_moment(k, damping, s).map(f64::exp)
}

/// The same logarithm by adaptive quadrature of the integrand rescaled by
/// its peak value.
pub fn ln_moment_quadrature(k: f64, damping: f64, s: u32) -> Result<f64> {
    check_moment_args(k, damping)?;
    let e = f64::from(s + 1);
    let log_integrand = |r: f64| {
        let lr = if k == 0.0 { 0.0 } else { k * r.ln() };
        lr - damping * r.powf(e)
    };
    let peak = if k == 0.0 {
        0.0
    } else {
        (k / (damping * e)).powf(1.0 / e)
    };
    let top = log_integrand(peak.max(f64::MIN_POSITIVE));
    let top = if k == 0.0 { 0.0 } else { top };
    let mut end = peak.max(1.0);
    while log_integrand(end) - top > -60.0 {
        end *= 1.5;
    }
    let g = |r: f64| {
        if r <= 0.0 {
            if k == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            (log_integrand(r) - top).exp()
        }
    };
    let mut total = 0.0;
    let mut cuts = vec![0.0];
    if peak > 0.0 {
        cuts.push(peak);
    }
    cuts.push(end);
    for w in cuts.windows(2) {
        let q = integrate(g, w[0], w[1], 0.0, 1e-12);
        if !q.converged {
            return Err(Error::Numeric(format!(
                "moment quadrature on [{}, {}] did not converge (error {:e})",
                w[0], w[1], q.error
            )));
        }
        total += q.value;
    }
    Ok(top + total.ln())
}

#[derive(Debug, Clone, Serialize)]
pub struct GevreyParams {
    pub m: u32,
    pub s: u32,
    /// Damping constant `M`.
    pub damping: f64,
    pub f0: f64,
    /// `lambda_{m+1,beta}`.
    pub lambda: f64,
    pub sigma_max: u32,
}

impl GevreyParams {
    pub fn target(&self) -> Rational {
        Rational::new(i64::from(self.m + 1).into(), i64::from(self.s + 1).into())
    }
}

/// Damping `M = max(1, 2 C2)` from a growth certificate `|f| <= C1 exp(C2 |t|^{s+1})`.
pub fn damping_from_growth(c2: f64) -> f64 {
    (2.0 * c2).max(1.0)
}

/// `d_sigma = |f0| |lambda|^sigma moment((m+1) sigma, M, s)` for
/// `sigma = 0..=sigma_max`.
pub fn derivative_sequence(p: &GevreyParams) -> Result<Vec<LogMagnitude>> {
    if p.f0 == 0.0 {
        return Ok(vec![LogMagnitude::ZERO; p.sigma_max as usize + 1]);
    }
    if p.lambda == 0.0 {
        return Err(Error::Input("lambda_{m+1} must be nonzero".into()));
    }
    (0..=p.sigma_max)
        .map(|sigma| {
            let k = f64::from((p.m + 1) * sigma);
            let ln = p.f0.abs().ln()
                + f64::from(sigma) * p.lambda.abs().ln()
                + ln_moment(k, p.damping, p.s)?;
            Ok(LogMagnitude::positive(ln))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GevreyFit {
    pub order: f64,
    /// Two standard errors of the fitted order.
    pub band: f64,
    pub sigma_range: (u32, u32),
    /// Coefficients of `[sigma ln sigma, sigma, ln sigma, 1, 1/sigma]`.
    pub coefficients: [f64; 5],
    pub rms_residual: f64,
    /// Order from successive ratios at the top of the range.
    pub ratio_order: f64,
    /// Slope in `sigma` of `ln(d_{s+1}/d_s) - g ln s` over the upper half of
    /// the range; tends to zero for an exact order `g`.
    pub ratio_drift: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum GevreyOrder {
    Fitted(GevreyFit),
    VanishesToInfiniteOrder,
}

/// Least-squares fit of `ln d_sigma` on `[sigma ln sigma, sigma, ln sigma, 1, 1/sigma]`
/// over `sigma >= 2`. The last three columns absorb the Stirling corrections.
pub fn fit_gevrey_order(seq: &[LogMagnitude]) -> Result<GevreyOrder> {
    if seq.iter().all(LogMagnitude::is_zero) {
        return Ok(GevreyOrder::VanishesToInfiniteOrder);
    }
    let pts: Vec<(f64, f64)> = seq
        .iter()
        .enumerate()
        .skip(2)
        .filter(|(_, d)| !d.is_zero() && d.ln_abs.is_finite())
        .map(|(k, d)| (k as f64, d.ln_abs))
        .collect();
    if pts.len() < 10 {
        return Err(Error::Input(format!(
            "need at least 10 usable terms, got {}",
            pts.len()
        )));
    }
    let rows = pts.len();
    let a = DMatrix::from_fn(rows, 5, |i, j| {
        let s = pts[i].0;
        match j {
            0 => s * s.ln(),
            1 => s,
            2 => s.ln(),
            3 => 1.0,
            _ => 1.0 / s,
        }
    });
    let b = DVector::from_iterator(rows, pts.iter().map(|p| p.1));
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::Numeric(format!("least squares failed: {e}")))?;
    let resid = &b - &a * &x;
    let dof = (rows as f64 - 5.0).max(1.0);
    let s2 = resid.norm_squared() / dof;
    let cov = (a.transpose() * &a)
        .try_inverse()
        .ok_or_else(|| Error::Numeric("singular normal matrix".into()))?;
    let band = 2.0 * (s2 * cov[(0, 0)]).sqrt();
    let g = x[0];

    let diffs: Vec<(f64, f64)> = pts
        .windows(2)
        .filter(|w| w[1].0 == w[0].0 + 1.0)
        .map(|w| (w[0].0, w[1].1 - w[0].1))
        .collect();
    let ratio_order = match diffs.as_slice() {
        [.., (s0, d0), (s1, d1)] => (d1 - d0) / (s1.ln() - s0.ln()),
        _ => f64::NAN,
    };
    let upper: Vec<(f64, f64)> = diffs[diffs.len() / 2..]
        .iter()
        .map(|&(s, d)| (s, d - g * s.ln()))
        .collect();
    let ratio_drift = slope(&upper);
    Ok(GevreyOrder::Fitted(GevreyFit {
        order: g,
        band,
        sigma_range: (pts[0].0 as u32, pts[rows - 1].0 as u32),
        coefficients: [x[0], x[1], x[2], x[3], x[4]],
        rms_residual: (resid.norm_squared() / rows as f64).sqrt(),
        ratio_order,
        ratio_drift,
    }))
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if n < 2.0 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// `u(a) = f0 int_0^inf exp(i lambda rho^{m+1} a - M rho^{s+1}) d rho`,
/// integrated on panels of equal phase.
pub fn axis_solution(p: &GevreyParams, a: f64) -> Result<Complex64> {
    if !(p.damping > 0.0) {
        return Err(Error::Input("damping M must be positive".into()));
    }
    let e = f64::from(p.s + 1);
    let k = f64::from(p.m + 1);
    let end = (45.0 / p.damping).powf(1.0 / e);
    let phase_total = (p.lambda * a).abs() * end.powf(k);
    let panels = ((phase_total / std::f64::consts::PI).ceil() as usize).max(8);
    let scale = ln_moment(0.0, p.damping, p.s)?.exp();
    let mut re = 0.0;
    let mut im = 0.0;
    for j in 0..panels {
        let lo = end * (j as f64 / panels as f64).powf(1.0 / k);
        let hi = end * ((j + 1) as f64 / panels as f64).powf(1.0 / k);
        let phase = |r: f64| p.lambda * a * r.powf(k);
        let damp = |r: f64| (-p.damping * r.powf(e)).exp();
        for (acc, part) in [(&mut re, 0), (&mut im, 1)] {
            let q = integrate(
                |r| {
                    let ph = phase(r);
                    damp(r) * if part == 0 { ph.cos() } else { ph.sin() }
                },
                lo,
                hi,
                1e-16 * scale,
                1e-14,
            );
            if !q.converged {
                return Err(Error::Numeric(format!(
                    "axis quadrature on [{lo}, {hi}] did not converge (error {:e}, {} intervals)",
                    q.error, q.intervals
                )));
            }
            *acc += q.value;
        }
    }
    Ok(Complex64::new(re, im) * p.f0)
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivativeCheck {
    pub sigma: u32,
    pub finite_difference: (f64, f64),
    pub exact: (f64, f64),
    pub rel_error: f64,
}

/// Finite-difference derivatives of `axis_solution` at `a = 0` on a
/// 13-point stencil with spacing `delta`, against `(i lambda)^sigma f0 moment`.
pub fn derivative_check(
    p: &GevreyParams,
    sigma_max: u32,
    delta: f64,
) -> Result<Vec<DerivativeCheck>> {
    let half = 6i32;
    let nodes: Vec<f64> = (-half..=half).map(|j| f64::from(j) * delta).collect();
    let values: Vec<Complex64> = nodes
        .iter()
        .map(|&a| axis_solution(p, a))
        .collect::<Result<_>>()?;
    (1..=sigma_max)
        .map(|sigma| {
            let w = fornberg(sigma as usize, 0.0, &nodes);
            let fd: Complex64 = w.iter().zip(&values).map(|(w, v)| v * *w).sum();
            let k = f64::from((p.m + 1) * sigma);
            let mag = p.f0 * p.lambda.powi(sigma as i32) * moment_integral(k, p.damping, p.s)?;
            let exact = Complex64::i().powu(sigma) * mag;
            Ok(DerivativeCheck {
                sigma,
                finite_difference: (fd.re, fd.im),
                exact: (exact.re, exact.im),
                rel_error: (fd - exact).norm() / exact.norm(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadratureCheck {
    pub sigma: u32,
    pub power: f64,
    pub closed_form: f64,
    pub quadrature: f64,
    /// `|ln closed - ln quadrature|`.
    pub log_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GevreyReport {
    pub params: GevreyParams,
    pub target: String,
    pub target_value: f64,
    pub sequence: Vec<LogMagnitude>,
    pub order: GevreyOrder,
    pub quadrature: Vec<QuadratureCheck>,
    /// `u(0)` against `f0 moment(0, M, s)`.
    pub axis_at_zero: (f64, f64),
}

impl GevreyReport {
    pub fn is_infinite_order(&self) -> bool {
        matches!(self.order, GevreyOrder::VanishesToInfiniteOrder)
    }

    pub fn fitted_order(&self) -> Option<f64> {
        match &self.order {
            GevreyOrder::Fitted(f) => Some(f.order),
            GevreyOrder::VanishesToInfiniteOrder => None,
        }
    }

    /// Rows `sigma,log_d,model`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sigma,log_d,model\n");
        for (k, d) in self.sequence.iter().enumerate() {
            let model = match &self.order {
                GevreyOrder::Fitted(f) if k >= 1 => {
                    let s = k as f64;
                    let c = f.coefficients;
                    format!(
                        "{}",
                        c[0] * s * s.ln() + c[1] * s + c[2] * s.ln() + c[3] + c[4] / s
                    )
                }
                _ => String::new(),
            };
            out.push_str(&format!("{k},{},{model}\n", d.ln_abs));
        }
        out
    }
}

/// Sequence, fit and consistency checks for one parameter set.
pub fn gevrey_report(p: &GevreyParams) -> Result<GevreyReport> {
    let sequence = derivative_sequence(p)?;
    let order = fit_gevrey_order(&sequence)?;
    let mut quadrature = Vec::new();
    for sigma in [0, 1, p.sigma_max / 4, p.sigma_max / 2, p.sigma_max] {
        if quadrature
            .iter()
            .any(|q: &QuadratureCheck| q.sigma == sigma)
        {
            continue;
        }
        let k = f64::from((p.m + 1) * sigma);
        let closed = ln_moment(k, p.damping, p.s)?;
        let quad = ln_moment_quadrature(k, p.damping, p.s)?;
        quadrature.push(QuadratureCheck {
            sigma,
            power: k,
            closed_form: closed,
            quadrature: quad,
            log_gap: (closed - quad).abs(),
        });
    }
    let u0 = axis_solution(p, 0.0)?;
    let expected = p.f0 * moment_integral(0.0, p.damping, p.s)?;
    let target = p.target();
    Ok(GevreyReport {
        params: p.clone(),
        target: format_rational(&target),
        target_value: crate::scalar::rational_to_f64(&target),
        sequence,
        order,
        quadrature,
        axis_at_zero: (u0.re, expected),
    })
}
