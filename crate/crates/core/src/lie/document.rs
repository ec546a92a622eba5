//! JSON algebra documents.
//!
//! ```json
//! {"strata": [2, 1],
//!  "brackets": [{"i": 1, "j": 2, "coeffs": {"3": "1"}}],
//!  "labels": ["X", "Y", "Z"],
//!  "vector_fields": [{"coeffs": {"1": "1"}}, {"coeffs": {"2": "x1"}}]}
//! ```
//!
//! Indices are 1-based. A bracket given in one orientation only is extended
//! antisymmetrically. Without `strata`/`brackets` the algebra is generated by
//! the vector fields.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::algebra::{StratifiedAlgebra, StructureConstant};
use super::vector_field::{
    algebra_from_vector_fields, ClosureOptions, FieldAlgebra, PolyVectorField,
};
use crate::error::{Error, Result};
use crate::poly::{identifiers, Registry};
use crate::scalar::{format_rational, parse_rational, Rational};

/// A coefficient literal: a `"p/q"` string or a JSON integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Int(i64),
    Text(String),
    Float(f64),
}

impl Literal {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            Literal::Int(k) => Ok(Rational::from_integer((*k).into())),
            Literal::Text(s) => parse_rational(s)
                .ok_or_else(|| Error::Input(format!("non-rational coefficient literal {s:?}"))),
            Literal::Float(x) => Err(Error::Input(format!(
                "non-rational coefficient literal {x}; write it as a \"p/q\" string"
            ))),
        }
    }

    pub fn from_rational(r: &Rational) -> Self {
        Literal::Text(format_rational(r))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub coeffs: BTreeMap<String, Literal>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldEntry {
    pub coeffs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strata: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brackets: Option<Vec<BracketEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector_fields: Option<Vec<FieldEntry>>,
    /// Optional dilation weights of the ambient coordinates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dilation: Option<Vec<Literal>>,
}

/// Algebra read from a document, with its vector fields when present.
#[derive(Debug, Clone)]
pub struct ParsedAlgebra {
    pub algebra: StratifiedAlgebra,
    pub fields: Option<Vec<PolyVectorField>>,
    pub field_algebra: Option<FieldAlgebra>,
}

impl AlgebraDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("schema violation: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    /// Document with explicit brackets (`i < j`) for an algebra.
    pub fn from_algebra(alg: &StratifiedAlgebra) -> Self {
        let mut brackets: BTreeMap<(usize, usize), BTreeMap<String, Literal>> = BTreeMap::new();
        for sc in alg.constants() {
            if sc.i < sc.j {
                brackets
                    .entry((sc.i + 1, sc.j + 1))
                    .or_default()
                    .insert((sc.k + 1).to_string(), Literal::from_rational(&sc.c));
            }
        }
        Self {
            strata: Some(alg.strata().to_vec()),
            brackets: Some(
                brackets
                    .into_iter()
                    .map(|((i, j), coeffs)| BracketEntry { i, j, coeffs })
                    .collect(),
            ),
            labels: Some(alg.labels().to_vec()),
            vector_fields: None,
            dilation: None,
        }
    }

    /// Parses the vector fields; the ambient dimension is the largest
    /// coordinate or variable index mentioned.
    pub fn fields(&self) -> Result<Option<Vec<PolyVectorField>>> {
        let Some(entries) = &self.vector_fields else {
            return Ok(None);
        };
        let mut dim = 0usize;
        let mut parsed: Vec<Vec<(usize, &str)>> = Vec::new();
        for (n, e) in entries.iter().enumerate() {
            let mut coords = Vec::new();
            for (coord, text) in &e.coeffs {
                let k = parse_coordinate(coord).ok_or_else(|| {
                    Error::Input(format!(
                        "vector field {}: bad coordinate key {coord:?}",
                        n + 1
                    ))
                })?;
                dim = dim.max(k);
                for name in identifiers(text)? {
                    let idx = name
                        .strip_prefix('x')
                        .and_then(|s| s.parse::<usize>().ok())
                        .filter(|&i| i >= 1)
                        .ok_or_else(|| {
                            Error::Input(format!(
                                "vector field {}: unknown variable {name:?} (use x1, x2, ...)",
                                n + 1
                            ))
                        })?;
                    dim = dim.max(idx);
                }
                coords.push((k - 1, text.as_str()));
            }
            parsed.push(coords);
        }
        if dim == 0 {
            return Err(Error::Input("vector fields are all empty".into()));
        }
        let reg = Registry::ambient(dim, "x");
        parsed
            .iter()
            .map(|c| PolyVectorField::parse(&reg, c))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    pub fn parse(&self) -> Result<ParsedAlgebra> {
        let fields = self.fields()?;
        match (&self.strata, &self.brackets) {
            (Some(strata), brackets) => {
                let mut constants = Vec::new();
                for b in brackets.iter().flatten() {
                    for (k, lit) in &b.coeffs {
                        let k: usize = k.trim().parse().map_err(|_| {
                            Error::Input(format!("bad basis index {k:?} in bracket"))
                        })?;
                        if b.i == 0 || b.j == 0 || k == 0 {
                            return Err(Error::Input("basis indices are 1-based".into()));
                        }
                        constants.push(StructureConstant::new(
                            b.i - 1,
                            b.j - 1,
                            k - 1,
                            lit.to_rational()?,
                        ));
                    }
                }
                let algebra = StratifiedAlgebra::antisymmetric(
                    strata.clone(),
                    self.labels.clone(),
                    &constants,
                )?;
                let report = algebra.verify_stratification();
                if let Some((name, check)) = report.first_failure() {
                    return Err(Error::Algebra(format!(
                        "{name} fails{}: {}",
                        check
                            .counterexample
                            .map(|t| format!(" at ({},{},{})", t[0], t[1], t[2]))
                            .unwrap_or_default(),
                        check.detail
                    )));
                }
                Ok(ParsedAlgebra {
                    algebra,
                    fields,
                    field_algebra: None,
                })
            }
            (None, Some(_)) => Err(Error::Input("brackets given without strata".into())),
            (None, None) => {
                let Some(f) = fields else {
                    return Err(Error::Input(
                        "document needs either strata and brackets or vector_fields".into(),
                    ));
                };
                let dilation = self
                    .dilation
                    .as_ref()
                    .map(|w| {
                        w.iter()
                            .map(Literal::to_rational)
                            .collect::<Result<Vec<_>>>()
                    })
                    .transpose()?;
                let fa = algebra_from_vector_fields(
                    &f,
                    &ClosureOptions {
                        dilation,
                        ..ClosureOptions::default()
                    },
                )?;
                let mut algebra = fa.algebra.clone();
                if let Some(l) = &self.labels {
                    algebra = StratifiedAlgebra::from_table(
                        algebra.strata().to_vec(),
                        Some(l.clone()),
                        &algebra.constants(),
                    )?;
                }
                Ok(ParsedAlgebra {
                    algebra,
                    fields: Some(f),
                    field_algebra: Some(fa),
                })
            }
        }
    }
}

fn parse_coordinate(key: &str) -> Option<usize> {
    let k = key.trim();
    let k = k.strip_prefix('x').unwrap_or(k);
    k.parse::<usize>().ok().filter(|&i| i >= 1)
}

/// Parses an algebra document and verifies the result.
pub fn parse_algebra(document: &str) -> Result<ParsedAlgebra> {
    AlgebraDocument::from_json(document)?.parse()
}
