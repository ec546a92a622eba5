//! Homogeneous potential pairs `(q, p)` on the plane: vanishing orders on the
//! unit circle, the growth condition and tube geometry.

use std::f64::consts::PI;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{MultiPoly, Registry, UniPoly};
use crate::scalar::{format_rational, rint, Rational};
use crate::RatPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialCase {
    /// `q` vanishes identically.
    Vanishing,
    /// `q > 0` on the unit circle (`j = 0`).
    Confining,
    /// `(2s - 2m + j)/j + s < 0`.
    Strict,
    /// `(2s - 2m + j)/j + s = 0`.
    Equality,
    /// The condition fails.
    Unsupported,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonnegativity {
    /// Sum of even monomials with positive coefficients.
    Structural,
    /// Checked on a dense sample of the unit circle.
    Sampled,
}

#[derive(Debug, Clone, Serialize)]
pub struct CircleZero {
    pub theta: f64,
    pub order: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct PotentialPair {
    #[serde(serialize_with = "ser_poly")]
    pub q: RatPoly,
    #[serde(serialize_with = "ser_poly")]
    pub p: RatPoly,
    pub m: u32,
    pub s: u32,
    pub zeros: Vec<CircleZero>,
    /// Maximal vanishing order of `q` on the unit circle.
    pub j: u32,
    /// `(2s - 2m + j)/j + s` when `j > 0`.
    #[serde(serialize_with = "ser_opt_rat")]
    pub condition: Option<Rational>,
    pub case: PotentialCase,
    pub q_nonnegative: Nonnegativity,
    pub p_nonnegative: Nonnegativity,
    pub warnings: Vec<String>,
    #[serde(skip)]
    qf: MultiPoly<f64>,
    #[serde(skip)]
    pf: MultiPoly<f64>,
}

fn ser_poly<S: serde::Serializer>(p: &RatPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

fn ser_opt_rat<S: serde::Serializer>(
    r: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&format_rational(r)),
        None => s.serialize_none(),
    }
}

impl PotentialPair {
    pub fn q_at(&self, t1: f64, t2: f64) -> f64 {
        self.qf.eval(&[t1, t2])
    }

    pub fn p_at(&self, t1: f64, t2: f64) -> f64 {
        self.pf.eval(&[t1, t2])
    }

    /// Mean of `q` over the square cell of side `h` centred at `(t1, t2)`.
    pub fn q_cell(&self, t1: f64, t2: f64, h: f64) -> f64 {
        self.qf
            .terms()
            .map(|(e, c)| c * cell_mean(t1, e[0], h) * cell_mean(t2, e[1], h))
            .sum()
    }

    /// `q(cos th, sin th)`.
    pub fn q1(&self, theta: f64) -> f64 {
        self.q_at(theta.cos(), theta.sin())
    }

    pub fn p1(&self, theta: f64) -> f64 {
        self.p_at(theta.cos(), theta.sin())
    }

    pub fn condition_f64(&self) -> Option<f64> {
        self.condition.as_ref().map(crate::scalar::rational_to_f64)
    }
}

/// Mean of `x^a` over `[c - h/2, c + h/2]`.
fn cell_mean(c: f64, a: u32, h: f64) -> f64 {
    if a == 0 {
        return 1.0;
    }
    let k = (a + 1) as i32;
    ((c + 0.5 * h).powi(k) - (c - 0.5 * h).powi(k)) / (k as f64 * h)
}

/// Moves a polynomial into the registry `t1, t2`, requiring it to use at
/// most two variables.
pub fn planar(poly: &RatPoly) -> Result<RatPoly> {
    let reg = poly.registry();
    let used: Vec<usize> = (0..reg.len()).filter(|&i| poly.depends_on(i)).collect();
    let target = Registry::ambient(2, "t");
    if reg.len() == 2 && reg.names() == target.names() {
        return Ok(poly.clone());
    }
    if used.len() > 2 {
        return Err(Error::Input(format!("{poly} is not bivariate")));
    }
    let mut map = vec![None; reg.len()];
    let by_name = |n: &str| target.index_of(n);
    let named: Vec<Option<usize>> = used.iter().map(|&i| by_name(reg.name(i))).collect();
    if named.iter().all(Option::is_some) {
        for (&i, t) in used.iter().zip(named) {
            map[i] = t;
        }
    } else {
        for (slot, &i) in used.iter().enumerate() {
            map[i] = Some(slot);
        }
    }
    Ok(poly.embed(&target, &map))
}

fn structurally_nonnegative(p: &RatPoly) -> bool {
    p.terms()
        .all(|(e, c)| c.is_positive() && e.iter().all(|k| k % 2 == 0))
}

/// `u(x) = q(x, 1)` as a univariate polynomial.
fn dehomogenize(q: &RatPoly, degree: u32) -> UniPoly {
    let mut coeffs = vec![Rational::zero(); degree as usize + 1];
    for (e, c) in q.terms() {
        coeffs[e[0] as usize] += c;
    }
    UniPoly::new(coeffs)
}

/// Zeros of a homogeneous `q` on the unit circle with their exact orders.
fn circle_zeros(q: &RatPoly, degree: u32) -> Vec<CircleZero> {
    let u = dehomogenize(q, degree);
    let mut out = Vec::new();
    for (mult, factor) in u.squarefree() {
        for x in factor.real_roots(1e-14) {
            // direction (x, 1) ~ angle atan2(1, x)
            let th = 1f64.atan2(x);
            out.push(CircleZero {
                theta: th,
                order: mult as u32,
            });
            out.push(CircleZero {
                theta: th + PI,
                order: mult as u32,
            });
        }
    }
    // direction (1, 0): order of t2 at the lowest power
    let at_axis = degree - u.degree().map(|d| d as u32).unwrap_or(0);
    if at_axis > 0 {
        out.push(CircleZero {
            theta: 0.0,
            order: at_axis,
        });
        out.push(CircleZero {
            theta: PI,
            order: at_axis,
        });
    }
    out.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    out
}

/// Classifies a homogeneous potential pair.
pub fn analyze_potentials(q: &RatPoly, p: &RatPoly) -> Result<PotentialPair> {
    let q = planar(q)?;
    let p = planar(p)?;
    if p.is_zero() {
        return Err(Error::Input("p vanishes identically".into()));
    }
    let reg = q.registry().clone();
    let vars = reg.t_block();
    let dq = if q.is_zero() {
        0
    } else {
        q.homogeneous_degree_in(vars.clone())
            .ok_or_else(|| Error::Input(format!("q = {q} is not homogeneous")))?
    };
    let dp = p
        .homogeneous_degree_in(vars)
        .ok_or_else(|| Error::Input(format!("p = {p} is not homogeneous")))?;
    if dq % 2 == 1 || dp % 2 == 1 {
        return Err(Error::Input("q and p must have even degree".into()));
    }
    let (m, s) = (dq / 2, dp / 2);
    let qf = q.to_float::<f64>();
    let pf = p.to_float::<f64>();

    let mut warnings = Vec::new();
    let mut nonneg = |poly: &RatPoly, f: &MultiPoly<f64>, name: &str| -> Result<Nonnegativity> {
        if poly.is_zero() || structurally_nonnegative(poly) {
            return Ok(Nonnegativity::Structural);
        }
        let samples = 8192;
        let vals: Vec<f64> = (0..samples)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / samples as f64;
                f.eval(&[th.cos(), th.sin()])
            })
            .collect();
        let max = vals.iter().fold(0f64, |a, v| a.max(v.abs()));
        let (k, min) =
            vals.iter().enumerate().fold(
                (0, f64::INFINITY),
                |acc, (k, &v)| if v < acc.1 { (k, v) } else { acc },
            );
        if min < -1e-12 * max {
            return Err(Error::Input(format!(
                "{name} is negative at angle {:.6}: {min:e}",
                2.0 * PI * k as f64 / samples as f64
            )));
        }
        warnings.push(format!("{name} nonnegativity checked by sampling only"));
        Ok(Nonnegativity::Sampled)
    };
    let q_nonnegative = nonneg(&q, &qf, "q")?;
    let p_nonnegative = nonneg(&p, &pf, "p")?;
    if !q.is_zero() && s >= m {
        warnings.push(format!("deg p = {} is not below deg q = {}", 2 * s, 2 * m));
    }

    let zeros = if q.is_zero() {
        Vec::new()
    } else {
        circle_zeros(&q, dq)
    };
    let j = zeros.iter().map(|z| z.order).max().unwrap_or(0);
    let condition = (j > 0).then(|| {
        let (s, m, j) = (rint(s as i64), rint(m as i64), rint(j as i64));
        (rint(2) * &s - rint(2) * &m + &j) / &j + s
    });
    let case = if q.is_zero() {
        PotentialCase::Vanishing
    } else {
        match &condition {
            None => PotentialCase::Confining,
            Some(c) if c.is_negative() => PotentialCase::Strict,
            Some(c) if c.is_zero() => PotentialCase::Equality,
            Some(_) => PotentialCase::Unsupported,
        }
    };
    Ok(PotentialPair {
        q,
        p,
        m,
        s,
        zeros,
        j,
        condition,
        case,
        q_nonnegative,
        p_nonnegative,
        warnings,
        qf,
        pf,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Tube {
    pub theta: f64,
    pub order: u32,
    /// `(2s - 2m + k)/k`.
    pub predicted_exponent: f64,
    /// Slope of log(cross-section) against log(r).
    pub fitted_exponent: f64,
    pub tapering: bool,
    /// `(r, half-width)` samples.
    pub widths: Vec<(f64, f64)>,
}

/// Cross-sections of `{q - lambda p < 1}` around each zero ray of `q` for
/// `|t|` between `r_min` and `r_max`.
pub fn tube_geometry(pair: &PotentialPair, lambda: f64, r_min: f64, r_max: f64) -> Vec<Tube> {
    let v = |t1: f64, t2: f64| pair.q_at(t1, t2) - lambda * pair.p_at(t1, t2);
    let samples = 9;
    let mut tubes = Vec::new();
    for z in &pair.zeros {
        let (u1, u2) = (z.theta.cos(), z.theta.sin());
        let (n1, n2) = (-u2, u1);
        let mut widths = Vec::new();
        for i in 0..samples {
            let r = r_min * (r_max / r_min).powf(i as f64 / (samples - 1) as f64);
            let at = |d: f64| v(r * u1 + d * n1, r * u2 + d * n2);
            if at(0.0) >= 1.0 {
                continue;
            }
            let side = |sign: f64| -> Option<f64> {
                let mut hi = 1e-300_f64.max(r * 1e-18);
                while at(sign * hi) < 1.0 {
                    hi *= 2.0;
                    if hi > r {
                        return None;
                    }
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if at(sign * mid) < 1.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-12 * hi {
                        break;
                    }
                }
                Some(0.5 * (lo + hi))
            };
            if let (Some(a), Some(b)) = (side(1.0), side(-1.0)) {
                widths.push((r, 0.5 * (a + b)));
            }
        }
        let k = z.order as f64;
        let predicted = (2.0 * pair.s as f64 - 2.0 * pair.m as f64 + k) / k;
        let fitted = slope(&widths);
        tubes.push(Tube {
            theta: z.theta,
            order: z.order,
            predicted_exponent: predicted,
            fitted_exponent: fitted,
            tapering: fitted < 0.0,
            widths,
        });
    }
    tubes
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
