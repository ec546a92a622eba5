use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use super::covector::{make_covectors, Component, CovectorPair};
use super::sset::{compute_s, SSetResult};
use crate::error::{Error, Result};
use crate::lie::{bch_unchecked, bracket_unchecked, AlgebraElement, StratifiedAlgebra};
use crate::linalg::null_space;
use crate::poly::{MultiPoly, Registry};
use crate::scalar::{format_rational, rint, Rational};
use crate::RatPoly;

/// How the a-linear part of the conjugated group word is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Two truncated Campbell-Hausdorff products.
    Bch,
    /// `e^{ad T} A - ((e^{ad T} - 1) / ad T) A_S`.
    ClosedForm,
}

/// Zero-order coefficients of the derived representation: for every basis
/// element `e_k`, `d pi(e_k) = [k in S] d/dt_k + i * phi_k(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedRepresentation {
    /// Registry with `t1..tn` and the formal parameters.
    pub reg: Arc<Registry>,
    pub s: Vec<usize>,
    /// `phi_k`, linear in the parameters.
    pub phi: Vec<RatPoly>,
    /// Part of `phi_k` carried by the parameters of `lambda1`.
    pub lower: Vec<RatPoly>,
    /// Part of `phi_k` carried by the parameters of `lambda2`.
    pub upper: Vec<RatPoly>,
}

impl DerivedRepresentation {
    /// Position of basis element `k` among the `t`-variables, if in `S`.
    pub fn t_index(&self, k: usize) -> Option<usize> {
        self.s.iter().position(|&x| x == k)
    }
}

/// One potential channel of the operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub basis: usize,
    pub label: String,
    /// Terms linear in the `lambda1` parameters; degree `s` in `t`.
    pub lower: RatPoly,
    /// Terms linear in the `lambda2` parameters; degree `m` in `t`.
    pub upper: RatPoly,
}

impl Channel {
    pub fn potential(&self) -> RatPoly {
        &self.lower + &self.upper
    }
}

/// `sum_j (d/dt_j + i*mag_j)^2 - sum_k elec_k^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchrodingerOperator {
    pub reg: Arc<Registry>,
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub m: usize,
    pub magnetic: Vec<Channel>,
    pub electric: Vec<Channel>,
    pub lambda1_symbols: Vec<String>,
    pub lambda2_symbols: Vec<String>,
    /// Numeric values of the formal parameters.
    pub values: Vec<(String, Rational)>,
}

impl SchrodingerOperator {
    pub fn has_magnetic_terms(&self) -> bool {
        self.magnetic.iter().any(|c| !c.potential().is_zero())
    }

    /// Substitutes every parameter named in `values`.
    pub fn substitute(&self, poly: &RatPoly, values: &[(String, Rational)]) -> RatPoly {
        let mut p = poly.clone();
        for (name, v) in values {
            if let Some(i) = self.reg.index_of(name) {
                p = p.substitute_constant(i, v);
            }
        }
        p
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        for (j, c) in self.magnetic.iter().enumerate() {
            let t = self.reg.name(self.reg.t(j));
            let p = c.potential();
            if p.is_zero() {
                parts.push(format!("d^2/d{t}^2"));
            } else {
                parts.push(format!("(d/d{t} + i*({p}))^2"));
            }
        }
        let mut out = parts.join(" + ");
        for c in &self.electric {
            let p = c.potential();
            if p.is_zero() {
                continue;
            }
            out.push_str(&format!(" - ({p})^2"));
        }
        out
    }

    pub fn document(&self) -> OperatorDocument {
        let chan = |c: &Channel| ChannelDocument {
            basis: c.basis + 1,
            label: c.label.clone(),
            potential: c.potential().to_string(),
            lower: c.lower.to_string(),
            upper: c.upper.to_string(),
        };
        OperatorDocument {
            n: self.n,
            r: self.r,
            s: self.s,
            m: self.m,
            operator: self.describe(),
            variables: self
                .reg
                .t_block()
                .map(|i| self.reg.name(i).to_string())
                .collect(),
            magnetic: self.magnetic.iter().map(chan).collect(),
            electric: self.electric.iter().map(chan).collect(),
            parameters: self
                .values
                .iter()
                .map(|(s, v)| (s.clone(), format_rational(v)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelDocument {
    pub basis: usize,
    pub label: String,
    pub potential: String,
    pub lower: String,
    pub upper: String,
}

/// Serialized operator; polynomials in canonical monomial order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorDocument {
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub m: usize,
    pub operator: String,
    pub variables: Vec<String>,
    pub magnetic: Vec<ChannelDocument>,
    pub electric: Vec<ChannelDocument>,
    pub parameters: BTreeMap<String, String>,
}

fn parameter_names(pair: &CovectorPair) -> Vec<String> {
    pair.parameters().into_iter().map(|(s, _)| s).collect()
}

/// a-linear coefficients of the conjugated word: entry `k` is the vector
/// `d w / d a_k` at `a = 0`, as polynomials in `t` and parameters.
fn linearized_word(
    alg: &StratifiedAlgebra,
    s: &[usize],
    params: &[String],
    route: Route,
) -> Result<(Arc<Registry>, Vec<Vec<RatPoly>>)> {
    let dim = alg.dim();
    let n = s.len();
    let reg = Registry::induction(n, dim, params);
    let mut t_el = AlgebraElement::zero(dim, &reg);
    let mut a_el = AlgebraElement::zero(dim, &reg);
    let mut as_el = AlgebraElement::zero(dim, &reg);
    let mut t_coeffs = t_el.clone().into_coeffs();
    let mut a_coeffs = a_el.clone().into_coeffs();
    let mut as_coeffs = as_el.clone().into_coeffs();
    for (j, &k) in s.iter().enumerate() {
        t_coeffs[k] = MultiPoly::var(&reg, reg.t(j));
        as_coeffs[k] = MultiPoly::var(&reg, reg.a(k));
    }
    for (k, c) in a_coeffs.iter_mut().enumerate() {
        *c = MultiPoly::var(&reg, reg.a(k));
    }
    t_el = AlgebraElement::from_coeffs(&reg, t_coeffs)?;
    a_el = AlgebraElement::from_coeffs(&reg, a_coeffs)?;
    as_el = AlgebraElement::from_coeffs(&reg, as_coeffs)?;

    let w = match route {
        Route::Bch => {
            let ta = bch_unchecked(alg, &t_el, &a_el);
            bch_unchecked(alg, &ta, &t_el.add(&as_el).neg())
        }
        Route::ClosedForm => {
            // e^{ad T} A - sum_k ad_T^k A_S / (k+1)!
            let mut acc = a_el.sub(&as_el);
            let mut pa = a_el.clone();
            let mut ps = as_el.clone();
            let mut fact = Rational::one();
            for k in 1..=alg.step() {
                pa = bracket_unchecked(alg, &t_el, &pa);
                ps = bracket_unchecked(alg, &t_el, &ps);
                fact *= rint(k as i64);
                let fact_next = &fact * rint(k as i64 + 1);
                acc = acc.add(&pa.scale(&(Rational::one() / &fact)));
                acc = acc.sub(&ps.scale(&(Rational::one() / fact_next)));
            }
            acc
        }
    };

    let a_block = reg.a_block();
    let mut grads = vec![Vec::with_capacity(dim); dim];
    for (l, wl) in w.coeffs().iter().enumerate() {
        for (e, _) in wl.terms() {
            if e[a_block.clone()].iter().all(|&x| x == 0) {
                return Err(Error::Assertion(format!(
                    "conjugated word has an a-free term in component {}",
                    alg.label(l)
                )));
            }
        }
    }
    for (k, g) in grads.iter_mut().enumerate() {
        for wl in w.coeffs() {
            g.push(wl.coefficient_of(reg.a(k), 1));
        }
    }
    Ok((reg, grads))
}

/// Computes `phi_k = <lambda, d w / d a_k>` for every basis element.
pub fn derived_representation(
    alg: &StratifiedAlgebra,
    pair: &CovectorPair,
    s: &[usize],
    route: Route,
) -> Result<DerivedRepresentation> {
    let params = parameter_names(pair);
    let (reg, grads) = linearized_word(alg, s, &params, route)?;
    let t_names: Vec<String> = reg.t_block().map(|i| reg.name(i).to_string()).collect();
    let out_reg = Registry::new::<String>(&t_names, &[], &params, false);

    let pairing = |entries: &BTreeMap<usize, Component>, g: &[RatPoly]| -> RatPoly {
        let mut acc = MultiPoly::zero(&reg);
        for (l, c) in entries {
            if g[*l].is_zero() {
                continue;
            }
            let sym = MultiPoly::var(&reg, reg.index_of(&c.symbol).expect("parameter registered"));
            acc += &(&g[*l] * &sym);
        }
        acc.embed_by_name(&out_reg)
    };
    let lower: Vec<RatPoly> = grads
        .iter()
        .map(|g| pairing(pair.lambda1.entries(), g))
        .collect();
    let upper: Vec<RatPoly> = grads
        .iter()
        .map(|g| pairing(pair.lambda2.entries(), g))
        .collect();
    let phi = grads
        .iter()
        .map(|g| pairing(&pair.lambda_entries(), g))
        .collect();
    Ok(DerivedRepresentation {
        reg: out_reg,
        s: s.to_vec(),
        phi,
        lower,
        upper,
    })
}

fn check_degree(p: &RatPoly, reg: &Registry, degree: usize, what: &str) -> Result<()> {
    if p.is_homogeneous_of(reg.t_block(), degree as u32) {
        Ok(())
    } else {
        Err(Error::Assertion(format!(
            "{what} = {p} is not homogeneous of degree {degree} in t"
        )))
    }
}

fn s_commutes(alg: &StratifiedAlgebra, s: &[usize]) -> bool {
    s.iter()
        .all(|&a| s.iter().all(|&b| alg.bracket_basis(a, b).is_empty()))
}

fn assemble(
    alg: &StratifiedAlgebra,
    pair: &CovectorPair,
    sset: &SSetResult,
    rep: &DerivedRepresentation,
) -> Result<SchrodingerOperator> {
    let reg = rep.reg.clone();
    let channel = |k: usize| Channel {
        basis: k,
        label: alg.label(k).to_string(),
        lower: rep.lower[k].clone(),
        upper: rep.upper[k].clone(),
    };
    let magnetic: Vec<Channel> = sset.s.iter().map(|&k| channel(k)).collect();
    let electric: Vec<Channel> = sset.complement(alg).into_iter().map(channel).collect();
    for c in magnetic.iter().chain(&electric) {
        check_degree(
            &c.lower,
            &reg,
            pair.s,
            &format!("lambda1 part of channel {}", c.label),
        )?;
        check_degree(
            &c.upper,
            &reg,
            pair.m,
            &format!("lambda2 part of channel {}", c.label),
        )?;
    }
    let op = SchrodingerOperator {
        reg,
        n: sset.n,
        r: sset.r,
        s: pair.s,
        m: pair.m,
        magnetic,
        electric,
        lambda1_symbols: pair.lambda1.symbols(),
        lambda2_symbols: pair.lambda2.symbols(),
        values: pair.parameters(),
    };
    if (sset.n == 1 || s_commutes(alg, &sset.s)) && op.has_magnetic_terms() {
        return Err(Error::Assertion(
            "S commutes (or #S = 1) but magnetic coefficients are nonzero".into(),
        ));
    }
    Ok(op)
}

/// Derives the Schrodinger operator of the representation induced from the
/// accepted subordinate subalgebra.
pub fn derive_operator(
    alg: &StratifiedAlgebra,
    pair: &CovectorPair,
    sset: &SSetResult,
) -> Result<SchrodingerOperator> {
    let rep = derived_representation(alg, pair, &sset.s, Route::Bch)?;
    assemble(alg, pair, sset, &rep)
}

/// Same operator through the closed-form first-order conjugation formula.
pub fn derive_operator_closed_form(
    alg: &StratifiedAlgebra,
    pair: &CovectorPair,
    sset: &SSetResult,
) -> Result<SchrodingerOperator> {
    let rep = derived_representation(alg, pair, &sset.s, Route::ClosedForm)?;
    assemble(alg, pair, sset, &rep)
}

/// Outcome of checking `[d pi(e_a), d pi(e_b)] = sum_c c_ab^c d pi(e_c)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub pairs_checked: usize,
    pub passed: bool,
    pub failure: Option<String>,
}

/// Verifies the commutation relations of the first-order operators
/// `d pi(e_k) = v_k . grad + i phi_k` as exact polynomial identities, using
/// `[D_a, D_b] = i (v_a . grad phi_b - v_b . grad phi_a)` for constant `v`.
pub fn representation_oracle(alg: &StratifiedAlgebra, rep: &DerivedRepresentation) -> OracleReport {
    let dim = alg.dim();
    let deriv = |k: usize, p: &RatPoly| -> RatPoly {
        match rep.t_index(k) {
            Some(j) => p.derivative(rep.reg.t(j)),
            None => MultiPoly::zero(&rep.reg),
        }
    };
    let mut checked = 0;
    for a in 0..dim {
        for b in a + 1..dim {
            checked += 1;
            let lhs = &deriv(a, &rep.phi[b]) - &deriv(b, &rep.phi[a]);
            let mut rhs = MultiPoly::zero(&rep.reg);
            let mut vector_part = vec![Rational::zero(); rep.s.len()];
            for (c, coef) in alg.bracket_basis(a, b) {
                rhs += &rep.phi[*c].scale(coef);
                if let Some(j) = rep.t_index(*c) {
                    vector_part[j] += coef;
                }
            }
            if vector_part.iter().any(|v| !v.is_zero()) {
                return OracleReport {
                    pairs_checked: checked,
                    passed: false,
                    failure: Some(format!(
                        "[{}, {}] has a first-order part that the commutator cannot produce",
                        alg.label(a),
                        alg.label(b)
                    )),
                };
            }
            if lhs != rhs {
                return OracleReport {
                    pairs_checked: checked,
                    passed: false,
                    failure: Some(format!(
                        "[dpi({}), dpi({})] = i*({lhs}) but the bracket gives i*({rhs})",
                        alg.label(a),
                        alg.label(b)
                    )),
                };
            }
        }
    }
    OracleReport {
        pairs_checked: checked,
        passed: true,
        failure: None,
    }
}

/// Result of the centre test on stratum one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralTest {
    pub found: bool,
    /// Coordinates over stratum one of a central element, when found.
    pub witness: Option<Vec<String>>,
    /// Basis elements of stratum one that are themselves central (0-based).
    pub central_basis: Vec<usize>,
}

/// Solves `ad_x = 0` for `x` in stratum one exactly.
pub fn has_central_v1_element(alg: &StratifiedAlgebra) -> CentralTest {
    let v1: Vec<usize> = alg.stratum(1).collect();
    let mut rows = Vec::new();
    for j in 0..alg.dim() {
        for k in 0..alg.dim() {
            let row: Vec<Rational> = v1
                .iter()
                .map(|&i| {
                    alg.bracket_basis(i, j)
                        .iter()
                        .find(|(kk, _)| *kk == k)
                        .map(|(_, c)| c.clone())
                        .unwrap_or_else(Rational::zero)
                })
                .collect();
            if row.iter().any(|c| !c.is_zero()) {
                rows.push(row);
            }
        }
    }
    let ns = null_space(&rows, v1.len());
    let central_basis: Vec<usize> = v1
        .iter()
        .copied()
        .filter(|&i| (0..alg.dim()).all(|j| alg.bracket_basis(i, j).is_empty()))
        .collect();
    CentralTest {
        found: !ns.is_empty(),
        witness: ns.first().map(|x| x.iter().map(format_rational).collect()),
        central_basis,
    }
}

/// Operator in the central-element form
/// `sum_j (d/dt_j + i q~_j)^2 - sum_{k<r} q_k^2 - mu^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralReduction {
    pub central: usize,
    pub mu: String,
    pub pair: CovectorPair,
    pub sset: SSetResult,
    pub magnetic: Vec<RatPoly>,
    /// The `r - 1` electric polynomials other than the central channel.
    pub electric: Vec<RatPoly>,
    /// `-mu^2`.
    pub constant: RatPoly,
    /// Exact agreement with [`derive_operator`] on the same covectors.
    pub matches_derive: bool,
    pub derived: SchrodingerOperator,
}

impl CentralReduction {
    pub fn describe(&self) -> String {
        let reg = &self.derived.reg;
        let mut parts = Vec::new();
        for (j, p) in self.magnetic.iter().enumerate() {
            let t = reg.name(reg.t(j));
            if p.is_zero() {
                parts.push(format!("d^2/d{t}^2"));
            } else {
                parts.push(format!("(d/d{t} + i*({p}))^2"));
            }
        }
        let mut out = parts.join(" + ");
        for q in &self.electric {
            if !q.is_zero() {
                out.push_str(&format!(" - ({q})^2"));
            }
        }
        out.push_str(&format!(" - {}^2", self.mu));
        out
    }
}

/// Builds the central-element form with `lambda1 = mu e_c*` on a central
/// stratum-one basis element and `lambda2 = 1` on `top` (first top-stratum
/// element by default), and cross-checks it against [`derive_operator`].
pub fn central_reduction(
    alg: &StratifiedAlgebra,
    mu: &str,
    central: Option<usize>,
    top: Option<usize>,
) -> Result<CentralReduction> {
    let test = has_central_v1_element(alg);
    let c = match central {
        Some(c) if test.central_basis.contains(&c) => c,
        Some(c) => {
            return Err(Error::Input(format!(
                "{} is not a central stratum-one basis element",
                alg.labels().get(c).map(String::as_str).unwrap_or("?")
            )))
        }
        None => *test.central_basis.first().ok_or(Error::NoCentralElement)?,
    };
    if alg.step() < 2 {
        return Err(Error::Input("the algebra is abelian".into()));
    }
    let top = top.unwrap_or(alg.stratum(alg.step()).start);
    let pair = make_covectors(
        alg,
        1,
        &[(c, Rational::one(), Some(mu.to_string()))],
        &[(top, Rational::one(), None)],
    )?;
    let sset = compute_s(alg, &pair)?;
    let rep = derived_representation(alg, &pair, &sset.s, Route::ClosedForm)?;
    let lam2: Vec<(String, Rational)> = pair
        .lambda2
        .entries()
        .values()
        .map(|e| (e.symbol.clone(), e.value.clone()))
        .collect();
    let subst = |p: &RatPoly| {
        let mut p = p.clone();
        for (name, v) in &lam2 {
            if let Some(i) = rep.reg.index_of(name) {
                p = p.substitute_constant(i, v);
            }
        }
        p
    };
    let magnetic: Vec<RatPoly> = sset.s.iter().map(|&k| subst(&rep.phi[k])).collect();
    let mu_poly = MultiPoly::var(&rep.reg, rep.reg.index_of(mu).expect("mu registered"));
    let mut electric = Vec::new();
    for k in sset.complement(alg) {
        let p = subst(&rep.phi[k]);
        if k == c {
            if p != mu_poly {
                return Err(Error::Assertion(format!(
                    "central channel {} is {p}, expected {mu}",
                    alg.label(c)
                )));
            }
        } else {
            electric.push(p);
        }
    }
    let constant = -(&mu_poly * &mu_poly);

    let derived = derive_operator(alg, &pair, &sset)?;
    let dm: Vec<RatPoly> = derived
        .magnetic
        .iter()
        .map(|ch| derived.substitute(&ch.potential(), &lam2))
        .collect();
    let de: Vec<RatPoly> = derived
        .electric
        .iter()
        .filter(|ch| ch.basis != c)
        .map(|ch| derived.substitute(&ch.potential(), &lam2))
        .collect();
    let central_ok = derived
        .electric
        .iter()
        .find(|ch| ch.basis == c)
        .map(|ch| derived.substitute(&ch.potential(), &lam2) == mu_poly)
        .unwrap_or(false);
    let matches_derive = dm == magnetic && de == electric && central_ok;
    Ok(CentralReduction {
        central: c,
        mu: mu.to_string(),
        pair,
        sset,
        magnetic,
        electric,
        constant,
        matches_derive,
        derived,
    })
}
