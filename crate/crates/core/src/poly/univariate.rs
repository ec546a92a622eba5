//! Dense univariate polynomials over the rationals: gcd, square-free
//! decomposition and Sturm-sequence root isolation.

use num_traits::{One, Signed, Zero};

use crate::scalar::{rational_to_f64, Rational};

/// Coefficients in ascending degree; no trailing zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial has none.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rational_to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer((k as i64).into()))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = Rational::zero();
        Self::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) - other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division `self = q*d + r`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.coeffs.len() - 1;
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&(Rational::one() / self.leading()))
    }

    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r;
        }
        x.monic()
    }

    /// Yun's algorithm: returns `(multiplicity, square-free factor)` pairs with
    /// nonconstant factors.
    pub fn squarefree(&self) -> Vec<(usize, UniPoly)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = Self::gcd(&f, &df);
        let mut b = f.div_rem(&a0).0;
        let mut c = df.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let a = Self::gcd(&b, &d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((i, a.clone()));
            }
            b = b.div_rem(&a).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Sturm sequence `p, p', -rem(p, p'), ...`.
    pub fn sturm_sequence(&self) -> Vec<UniPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&-Rational::one()));
        }
        seq
    }

    /// Number of distinct real roots in `(a, b]` of a square-free polynomial.
    pub fn count_roots(seq: &[UniPoly], a: &Rational, b: &Rational) -> usize {
        sign_changes(seq, a).saturating_sub(sign_changes(seq, b))
    }

    /// Cauchy bound on the absolute value of every root.
    pub fn root_bound(&self) -> Rational {
        let lead = self.leading().abs();
        let m = self
            .coeffs
            .iter()
            .take(self.coeffs.len().saturating_sub(1))
            .map(|c| c.abs() / &lead)
            .fold(Rational::zero(), |a, b| if b > a { b } else { a });
        m + Rational::one()
    }

    /// Real roots of a square-free polynomial, isolated exactly and refined
    /// by bisection to width `tol`. Returned as ascending midpoints.
    pub fn real_roots(&self, tol: f64) -> Vec<f64> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let seq = self.sturm_sequence();
        let bound = self.root_bound();
        let mut out = Vec::new();
        let mut stack = vec![(-bound.clone(), bound)];
        let tol_r = Rational::from_float(tol)
            .unwrap_or_else(|| Rational::new(1.into(), 1_000_000_000.into()));
        while let Some((a, b)) = stack.pop() {
            let n = Self::count_roots(&seq, &a, &b);
            if n == 0 {
                continue;
            }
            if n == 1 && &b - &a < tol_r {
                out.push(rational_to_f64(
                    &((&a + &b) / Rational::from_integer(2.into())),
                ));
                continue;
            }
            let mid = (&a + &b) / Rational::from_integer(2.into());
            stack.push((a, mid.clone()));
            stack.push((mid, b));
        }
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out
    }
}

fn sign_changes(seq: &[UniPoly], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rint;

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::new(c.iter().map(|&k| rint(k)).collect())
    }

    #[test]
    fn yun_multiplicities() {
        // (x-1)^3 (x+2)^2 x
        let f = p(&[-1, 1]).mul(&p(&[-1, 1])).mul(&p(&[-1, 1]));
        let f = f.mul(&p(&[2, 1])).mul(&p(&[2, 1])).mul(&p(&[0, 1]));
        let sf = f.squarefree();
        let mults: Vec<usize> = sf.iter().map(|(m, _)| *m).collect();
        assert_eq!(mults, vec![1, 2, 3]);
        assert_eq!(sf[0].1, p(&[0, 1]));
        assert_eq!(sf[1].1, p(&[2, 1]));
        assert_eq!(sf[2].1, p(&[-1, 1]));
    }

    #[test]
    fn sturm_isolates_roots() {
        // x^3 - 2x has roots 0, ±sqrt(2)
        let f = p(&[0, -2, 0, 1]);
        let r = f.real_roots(1e-12);
        assert_eq!(r.len(), 3);
        assert!((r[0] + 2f64.sqrt()).abs() < 1e-9);
        assert!(r[1].abs() < 1e-9);
        assert!((r[2] - 2f64.sqrt()).abs() < 1e-9);
        assert!(p(&[1, 0, 1]).real_roots(1e-9).is_empty());
    }
}
