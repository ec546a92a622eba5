//! Direct reduction of `L = sum X_i^2` on an integrand
//! `f(rho x_T) exp(sqrt(lambda) rho^a x_k + i rho^b x_l + ...)`.

use std::sync::Arc;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::PolyVectorField;
use crate::poly::{MultiPoly, Registry};
use crate::scalar::Rational;
use crate::RatPoly;

/// Role of one ambient coordinate in the ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Argument of `f`, scaled as `rho * x_k`.
    Scaled,
    /// Phase `sqrt(lambda) * rho^power * x_k`.
    RealExp { power: u32 },
    /// Phase `i * rho^power * x_k`.
    Oscillatory { power: u32 },
    /// The integrand does not depend on `x_k`.
    Absent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    pub coordinates: Vec<Phase>,
}

/// Reduced potentials `(q, p)` in `t1..tn`, with the exact identity
/// `L g = rho^2 [Delta f + lambda p f - q f] E` certified.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzReduction {
    pub q: RatPoly,
    pub p: RatPoly,
    pub certified: bool,
    /// Per-field notes: role, coefficient degree and phase power.
    pub notes: Vec<String>,
}

struct Symbols {
    reg: Arc<Registry>,
    d: usize,
    scaled: Vec<usize>,
}

impl Symbols {
    fn new(d: usize, scaled: Vec<usize>) -> Self {
        let mut t: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        t.extend(["rho", "sqrtlam", "I"].map(String::from));
        let mut params = vec!["F".to_string()];
        for (a, _) in scaled.iter().enumerate() {
            params.push(format!("F_{}", a + 1));
        }
        for (a, _) in scaled.iter().enumerate() {
            for b in a..scaled.len() {
                params.push(format!("F_{}{}", a + 1, b + 1));
            }
        }
        Self {
            reg: Registry::new::<String>(&t, &[], &params, false),
            d,
            scaled,
        }
    }

    fn x(&self, k: usize) -> usize {
        k
    }

    fn rho(&self) -> usize {
        self.d
    }

    fn sqrtlam(&self) -> usize {
        self.d + 1
    }

    fn imag(&self) -> usize {
        self.d + 2
    }

    fn var(&self, i: usize) -> RatPoly {
        MultiPoly::var(&self.reg, i)
    }

    fn f_index(&self, derivs: &[usize]) -> usize {
        let name = match derivs {
            [] => "F".to_string(),
            [a] => format!("F_{}", a + 1),
            [a, b] => {
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                format!("F_{}{}", a + 1, b + 1)
            }
            _ => unreachable!("third derivatives never occur"),
        };
        self.reg.index_of(&name).expect("F symbol registered")
    }

    /// Replace `I^2` by `-1`.
    fn reduce_i(&self, p: &RatPoly) -> RatPoly {
        let i = self.imag();
        let mut out = MultiPoly::zero(&self.reg);
        for (e, c) in p.terms() {
            let k = e[i];
            let mut e2 = e.clone();
            e2[i] = k % 2;
            let sign = if (k / 2) % 2 == 0 {
                c.clone()
            } else {
                -c.clone()
            };
            out += &MultiPoly::monomial(&self.reg, e2, sign);
        }
        out
    }

    /// `d/dx_k` of `P * E` divided by `E`, with the chain rule on `F`.
    fn d(&self, p: &RatPoly, k: usize, dphi: &RatPoly) -> RatPoly {
        let mut out = p.derivative(self.x(k));
        if let Some(a) = self.scaled.iter().position(|&s| s == k) {
            let rho = self.var(self.rho());
            // F-symbols with their derivative lists.
            let mut symbols: Vec<Vec<usize>> = vec![vec![]];
            for b in 0..self.scaled.len() {
                symbols.push(vec![b]);
            }
            for sym in symbols {
                let dp = p.derivative(self.f_index(&sym));
                if dp.is_zero() {
                    continue;
                }
                let mut next = sym.clone();
                next.push(a);
                let fnext = self.var(self.f_index(&next));
                out += &(&(&dp * &rho) * &fnext);
            }
        }
        out += &(p * dphi);
        self.reduce_i(&out)
    }

    fn apply(&self, field: &[RatPoly], p: &RatPoly, dphi: &[RatPoly]) -> RatPoly {
        let mut out = MultiPoly::zero(&self.reg);
        for (k, c) in field.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out += &(c * &self.d(p, k, &dphi[k]));
        }
        self.reduce_i(&out)
    }
}

/// Applies `L = sum X_i^2` to the ansatz integrand symbolically and reads off
/// the reduced potentials.
pub fn reduce_ansatz(fields: &[PolyVectorField], spec: &AnsatzSpec) -> Result<AnsatzReduction> {
    let Some(first) = fields.first() else {
        return Err(Error::Input("no vector fields".into()));
    };
    let d = first.dim();
    if spec.coordinates.len() != d {
        return Err(Error::Input(format!(
            "ansatz describes {} coordinates, fields live on {d}",
            spec.coordinates.len()
        )));
    }
    let scaled: Vec<usize> = (0..d)
        .filter(|&k| spec.coordinates[k] == Phase::Scaled)
        .collect();
    let n = scaled.len();
    if n == 0 {
        return Err(Error::Input("ansatz has no scaled coordinates".into()));
    }
    let sym = Symbols::new(d, scaled.clone());
    let treg = Registry::ambient(n, "t");
    // x_k -> t_{pos(k)} for scaled k
    let to_t = |c: &RatPoly| -> Result<RatPoly> {
        let mut map = vec![None; d];
        for (a, &k) in scaled.iter().enumerate() {
            map[k] = Some(a);
        }
        if (0..d).any(|k| map[k].is_none() && c.depends_on(k)) {
            return Err(Error::Ansatz(format!(
                "coefficient {c} depends on a coordinate outside the scaled block"
            )));
        }
        Ok(c.embed(&treg, &map))
    };

    let mut q = MultiPoly::zero(&treg);
    let mut p = MultiPoly::zero(&treg);
    let mut laplacian = vec![0usize; n];
    let mut notes = Vec::new();
    for (i, f) in fields.iter().enumerate() {
        let support: Vec<usize> = (0..d).filter(|&k| !f.coeff(k).is_zero()).collect();
        let [k] = support[..] else {
            return Err(Error::Ansatz(format!(
                "field X{} = {f} is not of the form c(x) d/dx_k",
                i + 1
            )));
        };
        let c = f.coeff(k);
        match spec.coordinates[k] {
            Phase::Scaled => {
                if c.as_constant() != Some(Rational::one()) {
                    return Err(Error::Ansatz(format!(
                        "field X{} acts on scaled coordinate x{} with a non-unit coefficient",
                        i + 1,
                        k + 1
                    )));
                }
                let a = scaled.iter().position(|&s| s == k).unwrap();
                laplacian[a] += 1;
                notes.push(format!("X{}: d/dx{} (Laplacian)", i + 1, k + 1));
            }
            Phase::Absent => {
                notes.push(format!("X{}: annihilates the ansatz", i + 1));
            }
            Phase::RealExp { power } | Phase::Oscillatory { power } => {
                let ct = to_t(c)?;
                let deg = ct.homogeneous_degree_in(treg.t_block()).ok_or_else(|| {
                    Error::Ansatz(format!("coefficient of X{} is not homogeneous", i + 1))
                })?;
                if power != deg + 1 {
                    return Err(Error::Ansatz(format!(
                        "X{}: phase power rho^{power} but the coefficient has degree {deg}, \
                         so the rho-powers need power {}",
                        i + 1,
                        deg + 1
                    )));
                }
                let sq = &ct * &ct;
                if matches!(spec.coordinates[k], Phase::RealExp { .. }) {
                    p += &sq;
                    notes.push(format!(
                        "X{}: real exponential, rho^{power}, p += ({ct})^2",
                        i + 1
                    ));
                } else {
                    q += &sq;
                    notes.push(format!(
                        "X{}: oscillatory, rho^{power}, q += ({ct})^2",
                        i + 1
                    ));
                }
            }
        }
    }
    if let Some(a) = laplacian.iter().position(|&c| c != 1) {
        return Err(Error::Ansatz(format!(
            "scaled coordinate x{} is differentiated by {} fields, expected exactly one",
            scaled[a] + 1,
            laplacian[a]
        )));
    }

    // Certify L g = rho^2 [Delta f + lambda p f - q f] E exactly.
    let rho = sym.var(sym.rho());
    let mut dphi = vec![MultiPoly::zero(&sym.reg); d];
    for k in 0..d {
        dphi[k] = match spec.coordinates[k] {
            Phase::RealExp { power } => &sym.var(sym.sqrtlam()) * &rho.pow(power),
            Phase::Oscillatory { power } => &sym.var(sym.imag()) * &rho.pow(power),
            _ => MultiPoly::zero(&sym.reg),
        };
    }
    let embed_field = |f: &PolyVectorField| -> Vec<RatPoly> {
        let map: Vec<Option<usize>> = (0..d).map(Some).collect();
        f.coeffs().iter().map(|c| c.embed(&sym.reg, &map)).collect()
    };
    let fvar = sym.var(sym.f_index(&[]));
    let mut lhs = MultiPoly::zero(&sym.reg);
    for f in fields {
        let fc = embed_field(f);
        let once = sym.apply(&fc, &fvar, &dphi);
        lhs += &sym.apply(&fc, &once, &dphi);
    }
    // t_a -> rho x_{scaled[a]}
    let at_rho_x = |poly: &RatPoly| -> RatPoly {
        let mut out = MultiPoly::zero(&sym.reg);
        for (e, c) in poly.terms() {
            let mut term = MultiPoly::constant(&sym.reg, c.clone());
            for (a, &k) in e.iter().enumerate() {
                term = &term * &(&rho * &sym.var(sym.x(scaled[a]))).pow(k);
            }
            out += &term;
        }
        out
    };
    let mut bracket = MultiPoly::zero(&sym.reg);
    for a in 0..n {
        bracket += &sym.var(sym.f_index(&[a, a]));
    }
    let lam = sym.var(sym.sqrtlam()).pow(2);
    bracket += &(&(&lam * &at_rho_x(&p)) * &fvar);
    bracket -= &(&at_rho_x(&q) * &fvar);
    let rhs = &rho.pow(2) * &bracket;
    let certified = lhs == rhs;
    Ok(AnsatzReduction {
        q,
        p,
        certified,
        notes,
    })
}
