use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::algebra::{StratifiedAlgebra, StructureConstant, VerificationReport};
use crate::error::{Error, Result};
use crate::linalg::{solve_affine, SpanTracker, SparseVec};
use crate::poly::{parse_poly, same_registry, Monomial, MultiPoly, Registry};
use crate::scalar::{format_rational, rint, Rational};
use crate::RatPoly;

/// Polynomial vector field `sum_k c_k(x) d/dx_k` on `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyVectorField {
    reg: Arc<Registry>,
    coeffs: Vec<RatPoly>,
}

impl PolyVectorField {
    pub fn new(reg: &Arc<Registry>, coeffs: Vec<RatPoly>) -> Result<Self> {
        if coeffs.len() != reg.len() {
            return Err(Error::Input(format!(
                "vector field has {} coefficients on a {}-dimensional space",
                coeffs.len(),
                reg.len()
            )));
        }
        if coeffs.iter().any(|c| !same_registry(c.registry(), reg)) {
            return Err(Error::Registry(
                "vector field coefficient over a foreign registry".into(),
            ));
        }
        Ok(Self {
            reg: reg.clone(),
            coeffs,
        })
    }

    pub fn zero(reg: &Arc<Registry>) -> Self {
        Self {
            reg: reg.clone(),
            coeffs: vec![MultiPoly::zero(reg); reg.len()],
        }
    }

    /// `d/dx_k` (0-based `k`).
    pub fn partial(reg: &Arc<Registry>, k: usize) -> Self {
        let mut f = Self::zero(reg);
        f.coeffs[k] = MultiPoly::one(reg);
        f
    }

    /// Parses `(coordinate, literal)` pairs with 0-based coordinates over
    /// ambient variables `x1..xd`.
    pub fn parse(reg: &Arc<Registry>, entries: &[(usize, &str)]) -> Result<Self> {
        let mut f = Self::zero(reg);
        for (k, text) in entries {
            if *k >= reg.len() {
                return Err(Error::Input(format!(
                    "coordinate {} outside ambient dimension {}",
                    k + 1,
                    reg.len()
                )));
            }
            f.coeffs[*k] += &parse_poly(text, reg)?;
        }
        Ok(f)
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.reg
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[RatPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &RatPoly {
        &self.coeffs[k]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `X(f) = sum_k c_k df/dx_k`.
    pub fn apply(&self, f: &RatPoly) -> RatPoly {
        let mut out = MultiPoly::zero(&self.reg);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = f.derivative(k);
            if !d.is_zero() {
                out += &(c * &d);
            }
        }
        out
    }

    /// Commutator `[X, Y]_k = X(Y_k) - Y(X_k)`.
    pub fn bracket(&self, other: &Self) -> Self {
        Self {
            reg: self.reg.clone(),
            coeffs: (0..self.dim())
                .map(|k| &self.apply(&other.coeffs[k]) - &other.apply(&self.coeffs[k]))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            reg: self.reg.clone(),
            coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            reg: self.reg.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Flattened coefficients keyed by `(coordinate, exponents)`.
    pub fn to_sparse(&self) -> SparseVec<(usize, Monomial)> {
        let mut out = BTreeMap::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            for (e, v) in c.terms() {
                out.insert((k, e.clone()), v.clone());
            }
        }
        out
    }

    /// Returns `(g, Y)` with `self = g * Y`, `Y` having coprime integer
    /// coefficients and a positive first coefficient.
    pub fn primitive(&self) -> (Rational, Self) {
        let sparse = self.to_sparse();
        let Some(first) = sparse.values().next() else {
            return (Rational::one(), self.clone());
        };
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for v in sparse.values() {
            num_gcd = num_gcd.gcd(v.numer());
            den_lcm = den_lcm.lcm(v.denom());
        }
        let mut g = Rational::new(num_gcd, den_lcm);
        if first.is_negative() {
            g = -g;
        }
        (g.clone(), self.scale(&(Rational::one() / g)))
    }

    /// Degree under the dilation `x_i -> rho^{w_i} x_i` if every term agrees.
    pub fn dilation_degree(&self, weights: &[Rational]) -> Option<Rational> {
        let mut deg: Option<Rational> = None;
        for (k, c) in self.coeffs.iter().enumerate() {
            for (e, _) in c.terms() {
                let mut d = -weights[k].clone();
                for (i, &a) in e.iter().enumerate() {
                    d += &weights[i] * rint(a as i64);
                }
                match &deg {
                    None => deg = Some(d),
                    Some(d0) if *d0 != d => return None,
                    _ => {}
                }
            }
        }
        deg
    }
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = format!("d/d{}", self.reg.name(k));
            // Pull a leading minus sign out of single-term coefficients.
            let (neg, c) = match c.terms().next() {
                Some((_, v)) if c.len() == 1 && v.is_negative() => (true, -c),
                _ => (false, c.clone()),
            };
            let body = match c.as_constant() {
                Some(v) if v.is_one() => d,
                Some(v) => format!("{}*{d}", format_rational(&v)),
                None if c.len() == 1 => format!("{c}*{d}"),
                None => format!("({c})*{d}"),
            };
            match (out.is_empty(), neg) {
                (true, false) => out.push_str(&body),
                (true, true) => {
                    out.push('-');
                    out.push_str(&body);
                }
                (false, false) => {
                    out.push_str(" + ");
                    out.push_str(&body);
                }
                (false, true) => {
                    out.push_str(" - ");
                    out.push_str(&body);
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

/// Settings for [`algebra_from_vector_fields`].
#[derive(Debug, Clone)]
pub struct ClosureOptions {
    /// Hard cap on the closure depth.
    pub step_bound: usize,
    /// Dilation weights of the ambient coordinates; inferred when absent.
    pub dilation: Option<Vec<Rational>>,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        Self {
            step_bound: 12,
            dilation: None,
        }
    }
}

/// Algebra generated by concrete fields together with its realization.
#[derive(Debug, Clone)]
pub struct FieldAlgebra {
    pub algebra: StratifiedAlgebra,
    /// Concrete field for each abstract basis element.
    pub realization: Vec<PolyVectorField>,
    /// Bracket word producing each basis element, e.g. `[X1,[X1,X3]]`.
    pub words: Vec<String>,
    /// `word = factor * realization`.
    pub factors: Vec<Rational>,
    pub dilation: Option<Vec<Rational>>,
    pub homogeneous: bool,
    /// Stratum dimensions of the free nilpotent algebra with as many
    /// generators and the same step.
    pub free_dims: Vec<usize>,
    pub verification: VerificationReport,
}

impl FieldAlgebra {
    /// False when brackets of the concrete fields satisfy relations beyond
    /// those of the free nilpotent algebra.
    pub fn is_free(&self) -> bool {
        self.free_dims == self.algebra.strata()
    }

    pub fn summary(&self) -> FieldAlgebraSummary {
        FieldAlgebraSummary {
            strata: self.algebra.strata().to_vec(),
            basis: self
                .realization
                .iter()
                .zip(&self.words)
                .zip(self.algebra.labels())
                .map(|((f, w), l)| format!("{l} = {f}  ({w})"))
                .collect(),
            dilation: self
                .dilation
                .as_ref()
                .map(|w| w.iter().map(format_rational).collect()),
            homogeneous: self.homogeneous,
            free: self.is_free(),
            free_dims: self.free_dims.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldAlgebraSummary {
    pub strata: Vec<usize>,
    pub basis: Vec<String>,
    pub dilation: Option<Vec<String>>,
    pub homogeneous: bool,
    pub free: bool,
    pub free_dims: Vec<usize>,
}

/// Infers coordinate weights making every field homogeneous of degree -1.
pub fn infer_dilation(fields: &[PolyVectorField]) -> Option<Vec<Rational>> {
    let d = fields.first()?.dim();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for f in fields {
        for (k, c) in f.coeffs.iter().enumerate() {
            for (e, _) in c.terms() {
                let mut row: Vec<Rational> = e.iter().map(|&a| rint(a as i64)).collect();
                row[k] -= Rational::one();
                rows.push(row);
                rhs.push(-Rational::one());
            }
        }
    }
    if rows.is_empty() {
        return None;
    }
    let _ = d;
    solve_affine(&rows, &rhs, &Rational::one())
}

/// Closes the span of `fields` under brackets, level by level.
///
/// Level one is the given fields (which must be linearly independent);
/// level `k` adds brackets of level-one fields with level `k-1` that are
/// independent of everything found so far. Fields beyond level one are
/// stored in primitive form.
pub fn algebra_from_vector_fields(
    fields: &[PolyVectorField],
    opts: &ClosureOptions,
) -> Result<FieldAlgebra> {
    let Some(first) = fields.first() else {
        return Err(Error::Input("no vector fields given".into()));
    };
    let reg = first.reg.clone();
    if fields.iter().any(|f| !same_registry(&f.reg, &reg)) {
        return Err(Error::Registry(
            "vector fields over different ambient spaces".into(),
        ));
    }

    let mut span: SpanTracker<(usize, Monomial)> = SpanTracker::new();
    let mut basis: Vec<PolyVectorField> = Vec::new();
    let mut words: Vec<String> = Vec::new();
    let mut factors: Vec<Rational> = Vec::new();
    let mut strata: Vec<usize> = Vec::new();

    for (i, f) in fields.iter().enumerate() {
        if f.is_zero() || span.insert(&f.to_sparse()).is_none() {
            return Err(Error::Dependent(format!(
                "field X{} lies in the span of the preceding fields",
                i + 1
            )));
        }
        basis.push(f.clone());
        words.push(format!("X{}", i + 1));
        factors.push(Rational::one());
    }
    strata.push(fields.len());
    let p = fields.len();

    let mut prev = 0..p;
    loop {
        let mut added = 0;
        let start = basis.len();
        for a in 0..p {
            for b in prev.clone() {
                let br = basis[a].bracket(&basis[b]);
                if br.is_zero() {
                    continue;
                }
                let (g, prim) = br.primitive();
                if span.insert(&prim.to_sparse()).is_some() {
                    words.push(format!("[{},{}]", words[a], words[b]));
                    basis.push(prim);
                    factors.push(g);
                    added += 1;
                }
            }
        }
        if added == 0 {
            break;
        }
        if strata.len() + 1 > opts.step_bound {
            return Err(Error::StepBound {
                bound: opts.step_bound,
            });
        }
        strata.push(added);
        prev = start..basis.len();
    }

    let dim = basis.len();
    let mut constants = Vec::new();
    for i in 0..dim {
        for j in i + 1..dim {
            let br = basis[i].bracket(&basis[j]);
            if br.is_zero() {
                continue;
            }
            let coords = span.express(&br.to_sparse()).ok_or_else(|| {
                Error::Algebra(format!(
                    "bracket [{}, {}] leaves the span of the closure",
                    words[i], words[j]
                ))
            })?;
            for (k, c) in coords.into_iter().enumerate() {
                if !c.is_zero() {
                    constants.push(StructureConstant::new(i, j, k, c));
                }
            }
        }
    }
    let labels: Vec<String> = (1..=dim).map(|i| format!("X{i}")).collect();
    let algebra = StratifiedAlgebra::antisymmetric(strata.clone(), Some(labels), &constants)?;

    let dilation = match &opts.dilation {
        Some(w) => {
            if w.len() != reg.len() {
                return Err(Error::Input(format!(
                    "{} dilation weights for {} coordinates",
                    w.len(),
                    reg.len()
                )));
            }
            Some(w.clone())
        }
        None => infer_dilation(fields),
    };
    let homogeneous = match &dilation {
        Some(w) => basis
            .iter()
            .enumerate()
            .all(|(i, f)| f.dilation_degree(w) == Some(-rint(algebra.weight(i) as i64))),
        None => false,
    };
    let verification = algebra.verify_stratification();
    let free_dims = (1..=strata.len()).map(|k| witt(p, k)).collect();
    Ok(FieldAlgebra {
        algebra,
        realization: basis,
        words,
        factors,
        dilation,
        homogeneous,
        free_dims,
        verification,
    })
}

/// Dimension of degree-`k` component of the free Lie algebra on `p` letters.
fn witt(p: usize, k: usize) -> usize {
    let mut total: i128 = 0;
    for d in 1..=k {
        if k.is_multiple_of(d) {
            total += mobius(d) as i128 * (p as i128).pow((k / d) as u32);
        }
    }
    (total / k as i128) as usize
}

fn mobius(n: usize) -> i32 {
    let mut n = n;
    let mut result = 1;
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            n /= q;
            if n.is_multiple_of(q) {
                return 0;
            }
            result = -result;
        }
        q += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witt_dimensions() {
        assert_eq!(witt(2, 1), 2);
        assert_eq!(witt(2, 2), 1);
        assert_eq!(witt(2, 3), 2);
        assert_eq!(witt(2, 4), 3);
        assert_eq!(witt(3, 2), 3);
    }

    #[test]
    fn primitive_part() {
        let reg = Registry::ambient(2, "x");
        let f = PolyVectorField::parse(&reg, &[(0, "-4*x1"), (1, "6")]).unwrap();
        let (g, y) = f.primitive();
        assert_eq!(g, rint(-2));
        assert_eq!(y.to_string(), "2*x1*d/dx1 - 3*d/dx2");
    }
}
