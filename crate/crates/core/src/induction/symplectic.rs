//! Sampled probe of the characteristic set of a family of vector fields and
//! of the symplectic form restricted to it.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::PolyVectorField;
use crate::linalg::null_space;
use crate::poly::{MultiPoly, Registry};
use crate::scalar::{rat, Rational};
use crate::RatPoly;

#[derive(Debug, Clone)]
pub struct ProbeOptions {
    pub samples: usize,
    pub seed: u64,
    /// Relative singular-value threshold for numerical ranks.
    pub rank_tol: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            samples: 64,
            seed: 0,
            rank_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplePoint {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub tangent_dim: usize,
    pub form_rank: usize,
    pub poisson_rank: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymplecticReport {
    pub seed: u64,
    pub samples: usize,
    /// Symbols `sigma(X_i)(x, xi)` with the factor `i` dropped.
    pub symbols: Vec<String>,
    /// Nonzero brackets `{sigma_i, sigma_j}`, 1-based.
    pub poisson_brackets: Vec<(usize, usize, String)>,
    pub tangent_dim: (usize, usize),
    pub form_rank: (usize, usize),
    pub poisson_rank: (usize, usize),
    /// The restricted form is nondegenerate at every sample.
    pub symplectic: bool,
    /// The restricted form is degenerate at every sample.
    pub degenerate_everywhere: bool,
    pub points: Vec<SamplePoint>,
}

struct Phase {
    d: usize,
    symbols: Vec<MultiPoly<f64>>,
    jac: Vec<Vec<MultiPoly<f64>>>,
    poisson: Vec<Vec<MultiPoly<f64>>>,
}

impl Phase {
    fn residual(&self, z: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.symbols.len(), self.symbols.iter().map(|s| s.eval(z)))
    }

    fn jacobian(&self, z: &[f64]) -> DMatrix<f64> {
        let k = self.symbols.len();
        DMatrix::from_fn(k, 2 * self.d, |i, j| self.jac[i][j].eval(z))
    }

    /// Gauss-Newton with minimal-norm steps onto `sigma = 0`.
    fn project(&self, z: &[f64], unit_xi: bool) -> Option<Vec<f64>> {
        let mut z = z.to_vec();
        for _ in 0..400 {
            if unit_xi {
                normalize_xi(&mut z, self.d)?;
            }
            let r = self.residual(&z);
            if r.norm() < 1e-15 {
                return Some(z);
            }
            let j = self.jacobian(&z);
            let step = j.svd(true, true).solve(&r, 1e-12).ok()?;
            for (zi, si) in z.iter_mut().zip(step.iter()) {
                *zi -= si;
            }
            if z.iter().any(|v| !v.is_finite()) {
                return None;
            }
        }
        let r = self.residual(&z);
        (r.norm() < 1e-12).then_some(z)
    }
}

fn normalize_xi(z: &mut [f64], d: usize) -> Option<()> {
    let n = z[d..].iter().map(|v| v * v).sum::<f64>().sqrt();
    if n < 1e-8 {
        return None;
    }
    for v in &mut z[d..] {
        *v /= n;
    }
    Some(())
}

fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&v| v > tol * top.max(1.0)).count()
}

fn eval_rational(p: &RatPoly, point: &[Rational]) -> Rational {
    let mut total = Rational::zero();
    for (e, c) in p.terms() {
        let mut term = c.clone();
        for (v, &k) in point.iter().zip(e.iter()) {
            for _ in 0..k {
                term *= v;
            }
        }
        total += term;
    }
    total
}

/// Samples the characteristic set `{sigma(X_i) = 0, xi != 0}` and measures the
/// rank of the symplectic form restricted to its tangent space.
pub fn poisson_rank_probe(
    fields: &[PolyVectorField],
    opts: &ProbeOptions,
) -> Result<SymplecticReport> {
    let Some(first) = fields.first() else {
        return Err(Error::Input("no vector fields".into()));
    };
    let d = first.dim();
    let mut names: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    names.extend((1..=d).map(|i| format!("xi{i}")));
    let reg: Arc<Registry> = Registry::new::<String>(&names, &[], &[], false);
    let map: Vec<Option<usize>> = (0..d).map(Some).collect();

    let symbols: Vec<RatPoly> = fields
        .iter()
        .map(|f| {
            let mut s = MultiPoly::zero(&reg);
            for k in 0..d {
                s += &(&f.coeff(k).embed(&reg, &map) * &MultiPoly::var(&reg, d + k));
            }
            s
        })
        .collect();
    let pb = |f: &RatPoly, g: &RatPoly| -> RatPoly {
        let mut out = MultiPoly::zero(&reg);
        for k in 0..d {
            out += &(&f.derivative(d + k) * &g.derivative(k));
            out -= &(&f.derivative(k) * &g.derivative(d + k));
        }
        out
    };
    let k = symbols.len();
    let mut brackets = vec![vec![MultiPoly::zero(&reg); k]; k];
    let mut listed = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let b = pb(&symbols[i], &symbols[j]);
            if !b.is_zero() {
                listed.push((i + 1, j + 1, b.to_string()));
            }
            brackets[j][i] = -&b;
            brackets[i][j] = b;
        }
    }
    let phase = Phase {
        d,
        symbols: symbols.iter().map(|s| s.to_float()).collect(),
        jac: symbols
            .iter()
            .map(|s| s.gradient(0..2 * d).iter().map(|g| g.to_float()).collect())
            .collect(),
        poisson: brackets
            .iter()
            .map(|row| row.iter().map(|b| b.to_float()).collect())
            .collect(),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut points = Vec::new();
    let mut attempts = 0;
    while points.len() < opts.samples {
        attempts += 1;
        if attempts > 50 * opts.samples.max(1) {
            return Err(Error::Numeric(format!(
                "located only {} of {} points on the characteristic set",
                points.len(),
                opts.samples
            )));
        }
        let x: Vec<Rational> = (0..d).map(|_| rat(rng.gen_range(-16..=16), 8)).collect();
        // Exact attempt: xi in the kernel of the coefficient matrix at x.
        let rows: Vec<Vec<Rational>> = fields
            .iter()
            .map(|f| (0..d).map(|c| eval_rational(f.coeff(c), &x)).collect())
            .collect();
        let kernel = null_space(&rows, d);
        let mut z: Vec<f64> = x.iter().map(|v| v.to_f64().unwrap_or(0.0)).collect();
        if kernel.is_empty() {
            z.extend((0..d).map(|_| rng.gen_range(-1.0..1.0)));
            match phase.project(&z, true) {
                Some(p) => z = p,
                None => continue,
            }
        } else {
            let mut xi = vec![0.0; d];
            for v in &kernel {
                let c: f64 = rng.gen_range(-1.0..1.0);
                for (a, b) in xi.iter_mut().zip(v) {
                    *a += c * b.to_f64().unwrap_or(0.0);
                }
            }
            z.extend(xi);
            if normalize_xi(&mut z, d).is_none() {
                continue;
            }
        }
        if let Some(sample) = analyze_point(&phase, &z, &mut rng, opts.rank_tol) {
            points.push(sample);
        }
    }

    let range = |f: fn(&SamplePoint) -> usize| -> (usize, usize) {
        let lo = points.iter().map(f).min().unwrap_or(0);
        let hi = points.iter().map(f).max().unwrap_or(0);
        (lo, hi)
    };
    let symplectic = points.iter().all(|p| p.form_rank == p.tangent_dim);
    let degenerate_everywhere = points.iter().all(|p| p.form_rank < p.tangent_dim);
    Ok(SymplecticReport {
        seed: opts.seed,
        samples: points.len(),
        symbols: symbols.iter().map(|s| s.to_string()).collect(),
        poisson_brackets: listed,
        tangent_dim: range(|p| p.tangent_dim),
        form_rank: range(|p| p.form_rank),
        poisson_rank: range(|p| p.poisson_rank),
        symplectic,
        degenerate_everywhere,
        points,
    })
}

/// Estimates the tangent space at `z` from projected neighbours and ranks the
/// restricted form `B^T Omega B`.
fn analyze_point(phase: &Phase, z: &[f64], rng: &mut ChaCha8Rng, tol: f64) -> Option<SamplePoint> {
    let d = phase.d;
    let dim = 2 * d;
    let eps = 1e-4;
    let probes = 3 * dim;
    let mut diffs = DMatrix::<f64>::zeros(probes, dim);
    for row in 0..probes {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let start: Vec<f64> = z.iter().zip(&v).map(|(a, b)| a + eps * b).collect();
        let p = phase.project(&start, false)?;
        for c in 0..dim {
            diffs[(row, c)] = (p[c] - z[c]) / eps;
        }
    }
    let svd = diffs.svd(false, true);
    let vt = svd.v_t.as_ref()?;
    let top = svd.singular_values.max();
    let tangent_dim = svd
        .singular_values
        .iter()
        .filter(|&&s| s > 1e-2 * top)
        .count();
    // Take the right singular vectors of the largest singular values.
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let basis = DMatrix::from_fn(dim, tangent_dim, |r, c| vt[(order[c], r)]);
    let mut omega = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..d {
        omega[(k, d + k)] = 1.0;
        omega[(d + k, k)] = -1.0;
    }
    let restricted = basis.transpose() * &omega * &basis;
    let form_rank = numerical_rank(&restricted, tol);
    let k = phase.symbols.len();
    let pm = DMatrix::from_fn(k, k, |i, j| phase.poisson[i][j].eval(z));
    Some(SamplePoint {
        x: z[..d].to_vec(),
        xi: z[d..].to_vec(),
        tangent_dim,
        form_rank,
        poisson_rank: numerical_rank(&pm, 1e-9),
    })
}
