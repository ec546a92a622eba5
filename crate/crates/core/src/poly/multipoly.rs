use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_traits::{One, Signed};

use super::registry::{same, Registry};
use crate::scalar::{format_rational, Coefficient, Rational, Real, ToReal};

/// Exponent vector, one entry per registry variable.
pub type Monomial = Vec<u32>;

/// Sparse multivariate polynomial with coefficients in `C`.
///
/// Zero coefficients are never stored. When the registry is a-truncated,
/// no stored term has a-degree above one.
#[derive(Clone, PartialEq)]
pub struct MultiPoly<C> {
    reg: Arc<Registry>,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coefficient> MultiPoly<C> {
    pub fn zero(reg: &Arc<Registry>) -> Self {
        Self {
            reg: reg.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(reg: &Arc<Registry>, c: C) -> Self {
        let mut p = Self::zero(reg);
        if !c.is_zero() {
            p.terms.insert(vec![0; reg.len()], c);
        }
        p
    }

    pub fn one(reg: &Arc<Registry>) -> Self {
        Self::constant(reg, C::one())
    }

    pub fn var(reg: &Arc<Registry>, i: usize) -> Self {
        assert!(i < reg.len(), "variable index {i} out of range");
        let mut e = vec![0; reg.len()];
        e[i] = 1;
        let mut p = Self::zero(reg);
        p.terms.insert(e, C::one());
        p
    }

    /// Single term `c * x^exps`; dropped if it violates a-truncation.
    pub fn monomial(reg: &Arc<Registry>, exps: Monomial, c: C) -> Self {
        assert_eq!(exps.len(), reg.len(), "monomial arity mismatch");
        let mut p = Self::zero(reg);
        if !c.is_zero() && !(reg.a_truncated() && reg.a_degree(&exps) > 1) {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(
        reg: &Arc<Registry>,
        terms: I,
    ) -> Self {
        let mut p = Self::zero(reg);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.reg
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, C)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    /// Value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub(crate) fn add_term(&mut self, exps: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        if self.reg.a_truncated() && self.reg.a_degree(&exps) > 1 {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check(&self, other: &Self) {
        assert!(
            same(&self.reg, &other.reg),
            "polynomial registries differ: {} vs {}",
            self.reg,
            other.reg
        );
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(&self.reg);
        }
        Self {
            reg: self.reg.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), v.clone() * c.clone()))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(&self.reg);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    /// Degree restricted to a subset of variables, per term.
    pub fn partial_degrees(&self, vars: std::ops::Range<usize>) -> Vec<u32> {
        self.terms
            .keys()
            .map(|e| e[vars.clone()].iter().sum())
            .collect()
    }

    /// If every term has the same degree in `vars`, that degree.
    /// The zero polynomial is homogeneous of any degree and yields `None`.
    pub fn homogeneous_degree_in(&self, vars: std::ops::Range<usize>) -> Option<u32> {
        let mut degs = self.partial_degrees(vars).into_iter();
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous_of(&self, vars: std::ops::Range<usize>, degree: u32) -> bool {
        self.partial_degrees(vars).into_iter().all(|d| d == degree)
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(&self.reg);
        for (e, c) in &self.terms {
            let k = e[var];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, c.clone() * times::<C>(k));
        }
        out
    }

    /// Coefficient of `x_var^power`, as a polynomial in the remaining variables.
    pub fn coefficient_of(&self, var: usize, power: u32) -> Self {
        let mut out = Self::zero(&self.reg);
        for (e, c) in &self.terms {
            if e[var] == power {
                let mut e2 = e.clone();
                e2[var] = 0;
                out.add_term(e2, c.clone());
            }
        }
        out
    }

    /// Part of the polynomial free of every variable in `vars`.
    pub fn free_of(&self, vars: std::ops::Range<usize>) -> Self {
        Self {
            reg: self.reg.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e[vars.clone()].iter().all(|&k| k == 0))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Replace variable `var` by the polynomial `value` (same registry).
    pub fn substitute(&self, var: usize, value: &Self) -> Self {
        self.check(value);
        let max = self.degree_in(var);
        let mut powers = vec![Self::one(&self.reg)];
        for k in 1..=max {
            let next = &powers[k as usize - 1] * value;
            powers.push(next);
        }
        let mut out = Self::zero(&self.reg);
        for (e, c) in &self.terms {
            let k = e[var];
            let mut e2 = e.clone();
            e2[var] = 0;
            let rest = Self::monomial(&self.reg, e2, c.clone());
            out += &(&rest * &powers[k as usize]);
        }
        out
    }

    /// Replace variable `var` by a constant.
    pub fn substitute_constant(&self, var: usize, value: &C) -> Self {
        let mut out = Self::zero(&self.reg);
        for (e, c) in &self.terms {
            let k = e[var];
            let mut e2 = e.clone();
            e2[var] = 0;
            let mut f = c.clone();
            for _ in 0..k {
                f = f * value.clone();
            }
            out.add_term(e2, f);
        }
        out
    }

    /// Re-express the polynomial in another registry. `map[i]` is the index
    /// of variable `i` in the target; variables mapped to `None` must not
    /// occur.
    pub fn embed(&self, target: &Arc<Registry>, map: &[Option<usize>]) -> Self {
        assert_eq!(map.len(), self.reg.len(), "embedding map arity");
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.len()];
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let j = map[i].unwrap_or_else(|| {
                    panic!("variable {} has no image in {}", self.reg.name(i), target)
                });
                e2[j] += k;
            }
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Embed by matching variable names; every occurring variable must exist
    /// in the target.
    pub fn embed_by_name(&self, target: &Arc<Registry>) -> Self {
        let map: Vec<Option<usize>> = self
            .reg
            .names()
            .iter()
            .map(|n| target.index_of(n))
            .collect();
        self.embed(target, &map)
    }

    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> MultiPoly<D> {
        let mut out = MultiPoly::<D>::zero(&self.reg);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Gradient with respect to the variables in `vars`.
    pub fn gradient(&self, vars: std::ops::Range<usize>) -> Vec<Self> {
        vars.map(|v| self.derivative(v)).collect()
    }
}

impl<C: Coefficient + ToReal> MultiPoly<C> {
    /// Evaluate at a point given for every registry variable.
    pub fn eval<T: Real>(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.reg.len(), "evaluation point arity");
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut v: T = c.to_real();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    v = v * x.powi(k as i32);
                }
            }
            acc = acc + v;
        }
        acc
    }

    pub fn to_float<T: Real + Coefficient>(&self) -> MultiPoly<T> {
        self.map_coefficients(|c| c.to_real::<T>())
    }
}

fn times<C: Coefficient>(k: u32) -> C {
    let mut out = C::zero();
    for _ in 0..k {
        out = out + C::one();
    }
    out
}

impl<'a, C: Coefficient> Add<&'a MultiPoly<C>> for &'a MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn add(self, rhs: &'a MultiPoly<C>) -> MultiPoly<C> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<C: Coefficient> Add for MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn add(mut self, rhs: MultiPoly<C>) -> MultiPoly<C> {
        self += &rhs;
        self
    }
}

impl<'a, C: Coefficient> AddAssign<&'a MultiPoly<C>> for MultiPoly<C> {
    fn add_assign(&mut self, rhs: &'a MultiPoly<C>) {
        self.check(rhs);
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), c.clone());
        }
    }
}

impl<'a, C: Coefficient> SubAssign<&'a MultiPoly<C>> for MultiPoly<C> {
    fn sub_assign(&mut self, rhs: &'a MultiPoly<C>) {
        self.check(rhs);
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), -c.clone());
        }
    }
}

impl<'a, C: Coefficient> Sub<&'a MultiPoly<C>> for &'a MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn sub(self, rhs: &'a MultiPoly<C>) -> MultiPoly<C> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<C: Coefficient> Sub for MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn sub(mut self, rhs: MultiPoly<C>) -> MultiPoly<C> {
        self -= &rhs;
        self
    }
}

impl<C: Coefficient> Neg for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn neg(self) -> MultiPoly<C> {
        MultiPoly {
            reg: self.reg.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl<C: Coefficient> Neg for MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn neg(self) -> MultiPoly<C> {
        -&self
    }
}

impl<'a, C: Coefficient> Mul<&'a MultiPoly<C>> for &'a MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn mul(self, rhs: &'a MultiPoly<C>) -> MultiPoly<C> {
        self.check(rhs);
        let reg = &self.reg;
        let trunc = reg.a_truncated();
        let a = reg.a_block();
        let mut out = MultiPoly::zero(reg);
        for (e1, c1) in &self.terms {
            let d1: u32 = if trunc { e1[a.clone()].iter().sum() } else { 0 };
            for (e2, c2) in &rhs.terms {
                if trunc && d1 + e2[a.clone()].iter().sum::<u32>() > 1 {
                    continue;
                }
                let e: Monomial = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                out.add_term(e, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<C: Coefficient> Mul for MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn mul(self, rhs: MultiPoly<C>) -> MultiPoly<C> {
        &self * &rhs
    }
}

/// Canonical display order: descending total degree, then descending
/// exponent vectors.
fn canonical_order(a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    db.cmp(&da).then_with(|| b.cmp(a))
}

impl<C: Coefficient> MultiPoly<C> {
    /// Terms in canonical order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &C)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|x, y| canonical_order(x.0, y.0));
        v
    }

    fn monomial_string(&self, e: &Monomial) -> String {
        let mut parts = Vec::new();
        for (i, &k) in e.iter().enumerate() {
            match k {
                0 => {}
                1 => parts.push(self.reg.name(i).to_string()),
                _ => parts.push(format!("{}^{}", self.reg.name(i), k)),
            }
        }
        parts.join("*")
    }
}

impl MultiPoly<Rational> {
    /// Render in canonical monomial order with `p/q` coefficients, in the
    /// syntax accepted by [`crate::poly::parse_poly`].
    pub fn to_canonical_string(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = self.monomial_string(e);
            if mono.is_empty() {
                out.push_str(&format_rational(&mag));
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format_rational(&mag));
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}

impl<C: Coefficient> fmt::Debug for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .sorted_terms()
            .into_iter()
            .map(|(e, c)| {
                let m = self.monomial_string(e);
                if m.is_empty() {
                    format!("{c:?}")
                } else {
                    format!("{c:?}*{m}")
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}
