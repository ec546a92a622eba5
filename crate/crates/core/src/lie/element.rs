use std::sync::Arc;

use super::StratifiedAlgebra;
use crate::error::{Error, Result};
use crate::poly::{same_registry, MultiPoly, Registry};
use crate::scalar::Rational;
use crate::RatPoly;

/// Element of a Lie algebra with polynomial coefficients over a registry.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    reg: Arc<Registry>,
    coeffs: Vec<RatPoly>,
}

impl AlgebraElement {
    pub fn zero(dim: usize, reg: &Arc<Registry>) -> Self {
        Self {
            reg: reg.clone(),
            coeffs: vec![MultiPoly::zero(reg); dim],
        }
    }

    pub fn basis(dim: usize, i: usize, reg: &Arc<Registry>) -> Self {
        let mut e = Self::zero(dim, reg);
        e.coeffs[i] = MultiPoly::one(reg);
        e
    }

    pub fn from_coeffs(reg: &Arc<Registry>, coeffs: Vec<RatPoly>) -> Result<Self> {
        if let Some(c) = coeffs.iter().find(|c| !same_registry(c.registry(), reg)) {
            return Err(Error::Registry(format!(
                "coefficient over {} in an element over {}",
                c.registry(),
                reg
            )));
        }
        Ok(Self {
            reg: reg.clone(),
            coeffs,
        })
    }

    pub fn from_rationals(reg: &Arc<Registry>, v: &[Rational]) -> Self {
        Self {
            reg: reg.clone(),
            coeffs: v
                .iter()
                .map(|c| MultiPoly::constant(reg, c.clone()))
                .collect(),
        }
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

    pub fn coeff(&self, i: usize) -> &RatPoly {
        &self.coeffs[i]
    }

    pub fn into_coeffs(self) -> Vec<RatPoly> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
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

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            reg: self.reg.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            reg: self.reg.clone(),
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            reg: self.reg.clone(),
            coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn mul_poly(&self, p: &RatPoly) -> Self {
        Self {
            reg: self.reg.clone(),
            coeffs: self.coeffs.iter().map(|a| a * p).collect(),
        }
    }

    /// Rational coordinates, if every coefficient is constant.
    pub fn to_rationals(&self) -> Option<Vec<Rational>> {
        self.coeffs.iter().map(|c| c.as_constant()).collect()
    }

    pub(crate) fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }
}

pub(crate) fn compatible(
    alg: &StratifiedAlgebra,
    x: &AlgebraElement,
    y: &AlgebraElement,
) -> Result<()> {
    if x.dim() != alg.dim() || y.dim() != alg.dim() {
        return Err(Error::Algebra(format!(
            "element dimensions {} and {} do not match algebra dimension {}",
            x.dim(),
            y.dim(),
            alg.dim()
        )));
    }
    if !same_registry(&x.reg, &y.reg) {
        return Err(Error::Registry(format!("{} vs {}", x.reg, y.reg)));
    }
    Ok(())
}

/// Lie bracket extended bilinearly to polynomial coefficients.
pub fn bracket(
    alg: &StratifiedAlgebra,
    x: &AlgebraElement,
    y: &AlgebraElement,
) -> Result<AlgebraElement> {
    compatible(alg, x, y)?;
    Ok(bracket_unchecked(alg, x, y))
}

pub(crate) fn bracket_unchecked(
    alg: &StratifiedAlgebra,
    x: &AlgebraElement,
    y: &AlgebraElement,
) -> AlgebraElement {
    let mut out = AlgebraElement::zero(alg.dim(), &x.reg);
    for (i, xi) in x.coeffs.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.coeffs.iter().enumerate() {
            let entries = alg.bracket_basis(i, j);
            if yj.is_zero() || entries.is_empty() {
                continue;
            }
            let prod = xi * yj;
            if prod.is_zero() {
                continue;
            }
            for (k, c) in entries {
                out.coeffs[*k] += &prod.scale(c);
            }
        }
    }
    out
}

/// Grading dilation: multiplies the stratum-`j` coefficients by `rho^j`.
pub fn dilate(alg: &StratifiedAlgebra, x: &AlgebraElement, rho: &RatPoly) -> AlgebraElement {
    let powers: Vec<RatPoly> = (0..=alg.step()).map(|j| rho.pow(j as u32)).collect();
    AlgebraElement {
        reg: x.reg.clone(),
        coeffs: x
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * &powers[alg.weight(i)])
            .collect(),
    }
}
