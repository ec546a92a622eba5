use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{Literal, StratifiedAlgebra};
use crate::scalar::{format_rational, Rational};

/// One nonzero component of a covector: a numeric value and the formal
/// parameter that stands for it during symbolic derivation.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub value: Rational,
    pub symbol: String,
}

/// Covector on the dual of the algebra, supported on one stratum.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector {
    dim: usize,
    stratum: usize,
    entries: BTreeMap<usize, Component>,
}

impl Covector {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// 1-based support stratum.
    pub fn stratum(&self) -> usize {
        self.stratum
    }

    pub fn entries(&self) -> &BTreeMap<usize, Component> {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim];
        for (k, c) in &self.entries {
            v[*k] = c.value.clone();
        }
        v
    }

    pub fn symbols(&self) -> Vec<String> {
        self.entries.values().map(|c| c.symbol.clone()).collect()
    }

    /// Support indices.
    pub fn support(&self) -> Vec<usize> {
        self.entries.keys().copied().collect()
    }

    /// Scales every component by `rho^stratum`.
    pub fn dilate(&self, rho: &Rational) -> Covector {
        let mut f = Rational::from_integer(1.into());
        for _ in 0..self.stratum {
            f *= rho;
        }
        Covector {
            dim: self.dim,
            stratum: self.stratum,
            entries: self
                .entries
                .iter()
                .filter_map(|(k, c)| {
                    let v = &c.value * &f;
                    (!v.is_zero()).then(|| {
                        (
                            *k,
                            Component {
                                value: v,
                                symbol: c.symbol.clone(),
                            },
                        )
                    })
                })
                .collect(),
        }
    }
}

/// `lambda1` on stratum `s+1`, `lambda2` on the top stratum `m+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovectorPair {
    pub lambda1: Covector,
    pub lambda2: Covector,
    pub s: usize,
    pub m: usize,
}

impl CovectorPair {
    /// `lambda = lambda1 + lambda2` as dense values.
    pub fn lambda_values(&self) -> Vec<Rational> {
        let mut v = self.lambda1.values();
        for (k, c) in self.lambda2.entries() {
            v[*k] += &c.value;
        }
        v
    }

    /// Components of `lambda` with their symbols; an index carried by both
    /// covectors keeps the symbol of `lambda2` and the summed value.
    pub fn lambda_entries(&self) -> BTreeMap<usize, Component> {
        let mut out = self.lambda1.entries.clone();
        for (k, c) in &self.lambda2.entries {
            match out.get_mut(k) {
                Some(e) => {
                    e.value += &c.value;
                    e.symbol = c.symbol.clone();
                }
                None => {
                    out.insert(*k, c.clone());
                }
            }
        }
        out.retain(|_, c| !c.value.is_zero());
        out
    }

    /// Formal parameters with their numeric values, in support order.
    pub fn parameters(&self) -> Vec<(String, Rational)> {
        let mut out: Vec<(String, Rational)> = Vec::new();
        for c in self
            .lambda1
            .entries
            .values()
            .chain(self.lambda2.entries.values())
        {
            if !out.iter().any(|(s, _)| *s == c.symbol) {
                out.push((c.symbol.clone(), c.value.clone()));
            }
        }
        out
    }

    pub fn satisfies_s_lt_m(&self) -> bool {
        self.s < self.m
    }
}

/// Default symbol for the component on basis element `label`.
pub fn default_symbol(label: &str) -> String {
    format!("lam_{label}")
}

/// Builds `lambda1` (on stratum `s1_stratum`, 1-based) and `lambda2` (on the
/// top stratum). Components are `(basis index, value, optional symbol)` with
/// 0-based indices. `s >= m` is recorded, not rejected.
pub fn make_covectors(
    alg: &StratifiedAlgebra,
    s1_stratum: usize,
    s1_components: &[(usize, Rational, Option<String>)],
    m1_components: &[(usize, Rational, Option<String>)],
) -> Result<CovectorPair> {
    let top = alg.step();
    if s1_stratum == 0 || s1_stratum > top {
        return Err(Error::Input(format!(
            "lambda1 stratum {s1_stratum} outside 1..={top}"
        )));
    }
    let build = |stratum: usize,
                 comps: &[(usize, Rational, Option<String>)],
                 name: &str|
     -> Result<Covector> {
        let range = alg.stratum(stratum);
        let mut entries = BTreeMap::new();
        for (k, v, sym) in comps {
            if !range.contains(k) {
                return Err(Error::Input(format!(
                    "{name} component on {} (index {}) lies outside stratum {stratum}",
                    alg.labels().get(*k).map(String::as_str).unwrap_or("?"),
                    k + 1
                )));
            }
            if v.is_zero() {
                continue;
            }
            entries.insert(
                *k,
                Component {
                    value: v.clone(),
                    symbol: sym.clone().unwrap_or_else(|| default_symbol(alg.label(*k))),
                },
            );
        }
        Ok(Covector {
            dim: alg.dim(),
            stratum,
            entries,
        })
    };
    let lambda1 = build(s1_stratum, s1_components, "lambda1")?;
    let lambda2 = build(top, m1_components, "lambda2")?;
    Ok(CovectorPair {
        lambda1,
        lambda2,
        s: s1_stratum - 1,
        m: top - 1,
    })
}

/// Covector block of a run configuration:
/// `{"stratum": 3, "components": {"7": "1"}, "symbols": {"7": "mu"}}` with
/// 1-based indices.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovectorSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratum: Option<usize>,
    #[serde(default)]
    pub components: BTreeMap<String, Literal>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub symbols: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovectorConfig {
    pub lambda1: CovectorSpec,
    pub lambda2: CovectorSpec,
}

impl CovectorSpec {
    fn components(&self) -> Result<Vec<(usize, Rational, Option<String>)>> {
        let mut out = Vec::new();
        for (k, lit) in &self.components {
            let idx: usize = k
                .trim()
                .parse()
                .ok()
                .filter(|&i| i >= 1)
                .ok_or_else(|| Error::Input(format!("bad covector index {k:?} (1-based)")))?;
            out.push((idx - 1, lit.to_rational()?, self.symbols.get(k).cloned()));
        }
        Ok(out)
    }

    pub fn from_covector(c: &Covector, alg: &StratifiedAlgebra) -> Self {
        Self {
            stratum: Some(c.stratum),
            components: c
                .entries
                .iter()
                .map(|(k, e)| {
                    (
                        (k + 1).to_string(),
                        Literal::Text(format_rational(&e.value)),
                    )
                })
                .collect(),
            symbols: c
                .entries
                .iter()
                .filter(|(k, e)| e.symbol != default_symbol(alg.label(**k)))
                .map(|(k, e)| ((k + 1).to_string(), e.symbol.clone()))
                .collect(),
        }
    }
}

impl CovectorConfig {
    pub fn build(&self, alg: &StratifiedAlgebra) -> Result<CovectorPair> {
        let stratum = self
            .lambda1
            .stratum
            .ok_or_else(|| Error::Input("lambda1 needs a stratum".into()))?;
        if let Some(st) = self.lambda2.stratum {
            if st != alg.step() {
                return Err(Error::Input(format!(
                    "lambda2 must live on the top stratum {}, not {st}",
                    alg.step()
                )));
            }
        }
        make_covectors(
            alg,
            stratum,
            &self.lambda1.components()?,
            &self.lambda2.components()?,
        )
    }

    pub fn from_pair(pair: &CovectorPair, alg: &StratifiedAlgebra) -> Self {
        Self {
            lambda1: CovectorSpec::from_covector(&pair.lambda1, alg),
            lambda2: CovectorSpec::from_covector(&pair.lambda2, alg),
        }
    }
}

/// Human-readable covector, e.g. `e3* + 2*e4*`.
pub fn describe(c: &Covector, alg: &StratifiedAlgebra) -> String {
    if c.entries.is_empty() {
        return "0".into();
    }
    c.entries
        .iter()
        .map(|(k, e)| {
            let v = format_rational(&e.value);
            if v == "1" {
                format!("{}*", alg.label(*k))
            } else {
                format!("{v}*{}*", alg.label(*k))
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}
