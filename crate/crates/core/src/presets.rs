//! Problem documents and the bundled preset library.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::induction::{AnsatzSpec, CovectorConfig, CovectorSpec, Phase};
use crate::lie::{AlgebraDocument, BracketEntry, FieldEntry, Literal, PolyVectorField};
use crate::poly::{parse_poly, Registry};
use crate::RatPoly;

/// Potentials `q, p` in `t1, t2` for the reduced problem
/// `-Delta f + (q - lambda p) f = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub q: String,
    pub p: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzBlock {
    /// Fields the ansatz is applied to; defaults to the algebra's fields.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<FieldEntry>>,
    pub coordinates: Vec<Phase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub name: String,
    pub fields: Vec<FieldEntry>,
}

/// Everything a command needs to know about one problem instance.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covectors: Option<CovectorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potentials: Option<PotentialSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ansatz: Option<AnsatzBlock>,
    /// Field families whose characteristic sets are probed.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<ProbeSpec>,
    /// Homogeneous harmonic polynomials `h` for the `exp(-h^2/2)` family.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub harmonic: Vec<String>,
}

impl Problem {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }

    pub fn ansatz_spec(&self) -> Option<AnsatzSpec> {
        self.ansatz.as_ref().map(|a| AnsatzSpec {
            coordinates: a.coordinates.clone(),
        })
    }

    /// Fields for the ansatz reduction.
    pub fn ansatz_fields(&self) -> Result<Option<Vec<PolyVectorField>>> {
        let Some(block) = &self.ansatz else {
            return Ok(None);
        };
        let entries = match (
            &block.fields,
            self.algebra.as_ref().and_then(|a| a.vector_fields.as_ref()),
        ) {
            (Some(f), _) | (None, Some(f)) => f.clone(),
            (None, None) => return Err(Error::Input("ansatz needs vector fields".into())),
        };
        fields_of(&entries).map(Some)
    }
}

/// Parses `q` and `p` in the variables `t1, t2`.
pub fn parse_potentials(spec: &PotentialSpec) -> Result<(RatPoly, RatPoly)> {
    let reg = Registry::ambient(2, "t");
    Ok((parse_poly(&spec.q, &reg)?, parse_poly(&spec.p, &reg)?))
}

/// Parses a list of field entries on the smallest ambient space holding them.
pub fn fields_of(entries: &[FieldEntry]) -> Result<Vec<PolyVectorField>> {
    AlgebraDocument {
        vector_fields: Some(entries.to_vec()),
        ..Default::default()
    }
    .fields()?
    .ok_or_else(|| Error::Input("no vector fields".into()))
}

pub const PRESET_NAMES: &[&str] = &[
    "heisenberg",
    "engel",
    "central-ext",
    "central-2",
    "bg",
    "prop24",
    "example41",
    "example31",
    "hanges-35",
    "filiform6",
];

/// Looks up a bundled problem by name.
pub fn preset(name: &str) -> Result<Problem> {
    let p = match name {
        "heisenberg" => heisenberg(),
        "engel" => engel(),
        "central-ext" => central_ext(),
        "central-2" => central_two(),
        "bg" => bg(),
        "prop24" => nonsymplectic(),
        "example41" => example41().clone(),
        "example31" => example31(),
        "hanges-35" => strict_pairing(),
        "filiform6" => filiform6(),
        _ => {
            return Err(Error::Input(format!(
                "unknown preset {name:?}; available: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(p)
}

fn field(entries: &[(usize, &str)]) -> FieldEntry {
    FieldEntry {
        coeffs: entries
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
    }
}

fn brackets(list: &[(usize, usize, usize, i64)]) -> Vec<BracketEntry> {
    list.iter()
        .map(|&(i, j, k, c)| BracketEntry {
            i,
            j,
            coeffs: BTreeMap::from([(k.to_string(), Literal::Int(c))]),
        })
        .collect()
}

fn table(strata: &[usize], list: &[(usize, usize, usize, i64)]) -> AlgebraDocument {
    AlgebraDocument {
        strata: Some(strata.to_vec()),
        brackets: Some(brackets(list)),
        ..Default::default()
    }
}

fn fields_doc(fields: Vec<FieldEntry>) -> AlgebraDocument {
    AlgebraDocument {
        vector_fields: Some(fields),
        ..Default::default()
    }
}

fn spec(stratum: Option<usize>, comps: &[(usize, i64)], symbols: &[(usize, &str)]) -> CovectorSpec {
    CovectorSpec {
        stratum,
        components: comps
            .iter()
            .map(|&(k, v)| (k.to_string(), Literal::Int(v)))
            .collect(),
        symbols: symbols
            .iter()
            .map(|&(k, s)| (k.to_string(), s.to_string()))
            .collect(),
    }
}

fn covectors(l1: CovectorSpec, l2: CovectorSpec) -> Option<CovectorConfig> {
    Some(CovectorConfig {
        lambda1: l1,
        lambda2: l2,
    })
}

fn heisenberg() -> Problem {
    Problem {
        name: "heisenberg".into(),
        algebra: Some(table(&[2, 1], &[(1, 2, 3, 1)])),
        covectors: covectors(spec(Some(2), &[], &[]), spec(None, &[(3, 1)], &[])),
        ..Default::default()
    }
}

fn engel() -> Problem {
    Problem {
        name: "engel".into(),
        algebra: Some(table(&[2, 1, 1], &[(1, 2, 3, 1), (1, 3, 4, 1)])),
        covectors: covectors(spec(Some(2), &[(3, 1)], &[]), spec(None, &[(4, 1)], &[])),
        ..Default::default()
    }
}

fn central_ext() -> Problem {
    Problem {
        name: "central-ext".into(),
        algebra: Some(table(&[3, 1], &[(1, 2, 4, 1)])),
        covectors: covectors(
            spec(Some(1), &[(3, 1)], &[(3, "mu")]),
            spec(None, &[(4, 1)], &[]),
        ),
        ..Default::default()
    }
}

fn central_two() -> Problem {
    Problem {
        name: "central-2".into(),
        algebra: Some(table(&[4, 1], &[(1, 2, 5, 1)])),
        covectors: covectors(
            spec(Some(1), &[(3, 1)], &[(3, "mu")]),
            spec(None, &[(5, 1)], &[]),
        ),
        ..Default::default()
    }
}

fn bg() -> Problem {
    // X1 = d1, X2 = x1 d2, X3 = d3; closure adds [X1, X2] = d2 as X4.
    Problem {
        name: "bg".into(),
        algebra: Some(fields_doc(vec![
            field(&[(1, "1")]),
            field(&[(2, "x1")]),
            field(&[(3, "1")]),
        ])),
        covectors: covectors(
            spec(Some(1), &[(3, 1)], &[(3, "mu")]),
            spec(None, &[(4, 1)], &[]),
        ),
        ansatz: Some(AnsatzBlock {
            fields: None,
            coordinates: vec![
                Phase::Scaled,
                Phase::Oscillatory { power: 2 },
                Phase::RealExp { power: 1 },
            ],
        }),
        probes: vec![
            ProbeSpec {
                name: "bg-pair".into(),
                fields: vec![field(&[(1, "1")]), field(&[(2, "x1")])],
            },
            ProbeSpec {
                name: "quadratic-pair".into(),
                fields: vec![field(&[(1, "1")]), field(&[(2, "x1^2")])],
            },
            ProbeSpec {
                name: "lifted".into(),
                fields: vec![
                    field(&[(1, "1")]),
                    field(&[(3, "1"), (4, "x1"), (2, "x1^2")]),
                ],
            },
        ],
        ..Default::default()
    }
}

fn nonsymplectic_fields() -> Vec<FieldEntry> {
    vec![
        field(&[(1, "1")]),
        field(&[(2, "1"), (3, "x1")]),
        field(&[(4, "1"), (5, "x1")]),
    ]
}

fn nonsymplectic() -> Problem {
    Problem {
        name: "prop24".into(),
        algebra: Some(fields_doc(nonsymplectic_fields())),
        covectors: covectors(
            spec(Some(1), &[(3, 1)], &[]),
            spec(None, &[(4, 1), (5, 1)], &[]),
        ),
        probes: vec![ProbeSpec {
            name: "prop24".into(),
            fields: nonsymplectic_fields(),
        }],
        ..Default::default()
    }
}

fn example41_fields() -> Vec<FieldEntry> {
    vec![
        field(&[(1, "1")]),
        field(&[(2, "1")]),
        field(&[(3, "x1^2 + x2^2")]),
        field(&[(4, "x1^7*x2^2")]),
        field(&[(5, "x1^2*x2^7")]),
    ]
}

fn example41() -> &'static Problem {
    static CELL: OnceLock<Problem> = OnceLock::new();
    CELL.get_or_init(|| {
        let doc = fields_doc(example41_fields());
        let parsed = doc.parse().expect("bundled example41 fields close");
        let fa = parsed.field_algebra.expect("generated from fields");
        let reg = fa.realization[0].registry().clone();
        let find = |k: usize| -> usize {
            let target = PolyVectorField::partial(&reg, k);
            fa.realization
                .iter()
                .position(|f| *f == target)
                .expect("coordinate field present in the closure")
                + 1
        };
        let (e3, e4, e5) = (find(2), find(3), find(4));
        Problem {
            name: "example41".into(),
            algebra: Some(doc),
            covectors: covectors(
                spec(Some(3), &[(e3, 1)], &[]),
                spec(None, &[(e4, 1), (e5, 1)], &[]),
            ),
            ansatz: Some(AnsatzBlock {
                fields: None,
                coordinates: vec![
                    Phase::Scaled,
                    Phase::Scaled,
                    Phase::RealExp { power: 3 },
                    Phase::Oscillatory { power: 10 },
                    Phase::Oscillatory { power: 10 },
                ],
            }),
            probes: vec![ProbeSpec {
                name: "first-three".into(),
                fields: example41_fields()[..3].to_vec(),
            }],
            ..Default::default()
        }
    })
}

fn example31() -> Problem {
    Problem {
        name: "example31".into(),
        potentials: Some(PotentialSpec {
            q: "4*(t1^2 - t2^2)^2*(t1^2 + t2^2)".into(),
            p: "4*(t1^2 + t2^2)".into(),
        }),
        harmonic: vec!["t1^2 - t2^2".into(), "t1^3 - 3*t1*t2^2".into()],
        ..Default::default()
    }
}

fn strict_pairing() -> Problem {
    Problem {
        name: "hanges-35".into(),
        algebra: Some(table(
            &[2, 1, 1, 1, 2],
            &[
                (1, 2, 3, 1),
                (1, 3, 4, 1),
                (1, 4, 5, 1),
                (1, 5, 6, 1),
                (2, 5, 7, 1),
                (3, 4, 7, -1),
            ],
        )),
        covectors: covectors(spec(Some(3), &[(4, 1)], &[]), spec(None, &[(6, 1)], &[])),
        ..Default::default()
    }
}

fn filiform6() -> Problem {
    Problem {
        name: "filiform6".into(),
        algebra: Some(table(
            &[2, 1, 1, 1, 1, 1],
            &[
                (1, 2, 3, 1),
                (1, 3, 4, 1),
                (1, 4, 5, 1),
                (1, 5, 6, 1),
                (1, 6, 7, 1),
            ],
        )),
        covectors: covectors(spec(Some(2), &[(3, 1)], &[]), spec(None, &[(7, 1)], &[])),
        ..Default::default()
    }
}
