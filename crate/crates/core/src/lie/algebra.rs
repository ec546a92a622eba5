use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{SpanTracker, SparseVec};
use crate::scalar::{format_rational, Rational};

/// Graded nilpotent Lie algebra given by structure constants.
///
/// Brackets are stored per ordered pair of basis indices so that malformed
/// input (for instance a table that is not antisymmetric) can be represented
/// and reported by [`StratifiedAlgebra::verify_stratification`].
#[derive(Clone, PartialEq)]
pub struct StratifiedAlgebra {
    strata: Vec<usize>,
    labels: Vec<String>,
    table: Vec<Vec<Vec<(usize, Rational)>>>,
    weight: Vec<usize>,
}

/// One structure constant `c_{ij}^k` with 0-based indices.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstant {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: Rational,
}

impl StructureConstant {
    pub fn new(i: usize, j: usize, k: usize, c: Rational) -> Self {
        Self { i, j, k, c }
    }
}

impl StratifiedAlgebra {
    /// Builds the algebra from exactly the given ordered-pair constants.
    /// Nothing is symmetrized; duplicate entries are summed.
    pub fn from_table(
        strata: Vec<usize>,
        labels: Option<Vec<String>>,
        constants: &[StructureConstant],
    ) -> Result<Self> {
        if strata.is_empty() || strata.contains(&0) {
            return Err(Error::Input(
                "strata must be a nonempty list of positive dimensions".into(),
            ));
        }
        let dim: usize = strata.iter().sum();
        let labels = match labels {
            Some(l) if l.len() != dim => {
                return Err(Error::Input(format!(
                    "{} labels given for a {dim}-dimensional algebra",
                    l.len()
                )))
            }
            Some(l) => l,
            None => (1..=dim).map(|i| format!("e{i}")).collect(),
        };
        let weight: Vec<usize> = strata
            .iter()
            .enumerate()
            .flat_map(|(s, &d)| std::iter::repeat_n(s + 1, d))
            .collect();
        let mut dense: Vec<Vec<BTreeMap<usize, Rational>>> = vec![vec![BTreeMap::new(); dim]; dim];
        for sc in constants {
            if sc.i >= dim || sc.j >= dim || sc.k >= dim {
                return Err(Error::Input(format!(
                    "bracket index out of range in [{},{}] -> {} (dimension {dim})",
                    sc.i + 1,
                    sc.j + 1,
                    sc.k + 1
                )));
            }
            let e = dense[sc.i][sc.j].entry(sc.k).or_insert_with(Rational::zero);
            *e += &sc.c;
        }
        let table = dense
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|m| m.into_iter().filter(|(_, c)| !c.is_zero()).collect())
                    .collect()
            })
            .collect();
        Ok(Self {
            strata,
            labels,
            table,
            weight,
        })
    }

    /// Builds the algebra from constants for `i < j` (or either orientation),
    /// filling the opposite orientation with negated values.
    pub fn antisymmetric(
        strata: Vec<usize>,
        labels: Option<Vec<String>>,
        constants: &[StructureConstant],
    ) -> Result<Self> {
        let mut all = Vec::with_capacity(2 * constants.len());
        let mut seen = std::collections::BTreeSet::new();
        for sc in constants {
            seen.insert((sc.i, sc.j));
        }
        for sc in constants {
            all.push(sc.clone());
            if !seen.contains(&(sc.j, sc.i)) {
                all.push(StructureConstant::new(sc.j, sc.i, sc.k, -sc.c.clone()));
            }
        }
        Self::from_table(strata, labels, &all)
    }

    pub fn dim(&self) -> usize {
        self.weight.len()
    }

    /// Number of strata, the nilpotency step.
    pub fn step(&self) -> usize {
        self.strata.len()
    }

    pub fn strata(&self) -> &[usize] {
        &self.strata
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// 1-based stratum of basis element `i`.
    pub fn weight(&self, i: usize) -> usize {
        self.weight[i]
    }

    pub fn weights(&self) -> &[usize] {
        &self.weight
    }

    /// Basis indices of stratum `s` (1-based).
    pub fn stratum(&self, s: usize) -> std::ops::Range<usize> {
        assert!(s >= 1 && s <= self.step(), "stratum {s} out of range");
        let start: usize = self.strata[..s - 1].iter().sum();
        start..start + self.strata[s - 1]
    }

    /// `[e_i, e_j]` as sparse `(k, c)` pairs.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[(usize, Rational)] {
        &self.table[i][j]
    }

    /// All nonzero constants in ordered-pair form.
    pub fn constants(&self) -> Vec<StructureConstant> {
        let mut out = Vec::new();
        for (i, row) in self.table.iter().enumerate() {
            for (j, entries) in row.iter().enumerate() {
                for (k, c) in entries {
                    out.push(StructureConstant::new(i, j, *k, c.clone()));
                }
            }
        }
        out
    }

    /// Bracket of two dense rational vectors.
    pub fn bracket_vec(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim()];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let f = xi * yj;
                for (k, c) in &self.table[i][j] {
                    out[k.to_owned()] += &f * c;
                }
            }
        }
        out
    }

    pub fn unit(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::one();
        v
    }

    /// Checks antisymmetry, Jacobi, grading and generation exactly.
    pub fn verify_stratification(&self) -> VerificationReport {
        VerificationReport {
            antisymmetry: self.check_antisymmetry(),
            jacobi: self.check_jacobi(),
            grading: self.check_grading(),
            generation: self.check_generation(),
        }
    }

    fn check_antisymmetry(&self) -> PropertyCheck {
        let n = self.dim();
        for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    let a = lookup(&self.table[i][j], k);
                    let b = lookup(&self.table[j][i], k);
                    if (a.clone() + b.clone()) != Rational::zero() {
                        return PropertyCheck::fail(
                            [i + 1, j + 1, k + 1],
                            format!(
                                "c_{{{},{}}}^{} = {} but c_{{{},{}}}^{} = {}",
                                i + 1,
                                j + 1,
                                k + 1,
                                format_rational(&a),
                                j + 1,
                                i + 1,
                                k + 1,
                                format_rational(&b)
                            ),
                        );
                    }
                }
            }
        }
        PropertyCheck::pass()
    }

    fn check_jacobi(&self) -> PropertyCheck {
        let n = self.dim();
        // [[e_a, e_b], e_c] = sum_l c_ab^l [e_l, e_c]
        let nested = |a: usize, b: usize, c: usize, acc: &mut SparseVec<usize>| {
            for (l, x) in &self.table[a][b] {
                for (k, y) in &self.table[*l][c] {
                    let e = acc.entry(*k).or_insert_with(Rational::zero);
                    *e += x * y;
                }
            }
        };
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut acc = SparseVec::new();
                    nested(i, j, k, &mut acc);
                    nested(j, k, i, &mut acc);
                    nested(k, i, j, &mut acc);
                    if let Some((l, _)) = acc.iter().find(|(_, c)| !c.is_zero()) {
                        return PropertyCheck::fail(
                            [i + 1, j + 1, k + 1],
                            format!(
                                "Jacobi residual has nonzero component on {}",
                                self.labels[*l]
                            ),
                        );
                    }
                }
            }
        }
        PropertyCheck::pass()
    }

    fn check_grading(&self) -> PropertyCheck {
        for (i, row) in self.table.iter().enumerate() {
            for (j, entries) in row.iter().enumerate() {
                for (k, _) in entries {
                    if self.weight[*k] != self.weight[i] + self.weight[j] {
                        return PropertyCheck::fail(
                            [i + 1, j + 1, k + 1],
                            format!(
                                "bracket of weights {} and {} lands in stratum {}",
                                self.weight[i], self.weight[j], self.weight[*k]
                            ),
                        );
                    }
                }
            }
        }
        PropertyCheck::pass()
    }

    fn check_generation(&self) -> PropertyCheck {
        let mut span: SpanTracker<usize> = SpanTracker::new();
        let v1: Vec<Vec<Rational>> = self.stratum(1).map(|i| self.unit(i)).collect();
        let mut level: Vec<Vec<Rational>> = Vec::new();
        for v in &v1 {
            if span.insert(&sparse(v)).is_some() {
                level.push(v.clone());
            }
        }
        for _ in 1..self.step() {
            let mut next = Vec::new();
            for x in &v1 {
                for y in &level {
                    let z = self.bracket_vec(x, y);
                    if span.insert(&sparse(&z)).is_some() {
                        next.push(z);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            level = next;
        }
        if span.dim() == self.dim() {
            PropertyCheck::pass()
        } else {
            let missing = (0..self.dim())
                .find(|&i| !span.contains(&sparse(&self.unit(i))))
                .unwrap_or(0);
            PropertyCheck {
                passed: false,
                counterexample: None,
                detail: format!(
                    "iterated brackets of stratum one span dimension {} of {}; {} is not reached",
                    span.dim(),
                    self.dim(),
                    self.labels[missing]
                ),
            }
        }
    }

    /// Pairing of a covector with `[e_i, e_j]`.
    pub fn pair_bracket(&self, lambda: &[Rational], i: usize, j: usize) -> Rational {
        self.table[i][j]
            .iter()
            .map(|(k, c)| c * &lambda[*k])
            .fold(Rational::zero(), |a, b| a + b)
    }
}

fn lookup(entries: &[(usize, Rational)], k: usize) -> Rational {
    entries
        .iter()
        .find(|(kk, _)| *kk == k)
        .map(|(_, c)| c.clone())
        .unwrap_or_else(Rational::zero)
}

pub(crate) fn sparse(v: &[Rational]) -> SparseVec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

impl fmt::Debug for StratifiedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StratifiedAlgebra(strata {:?}", self.strata)?;
        for sc in self.constants() {
            if sc.i < sc.j {
                write!(
                    f,
                    ", [{},{}] += {}*{}",
                    self.labels[sc.i],
                    self.labels[sc.j],
                    format_rational(&sc.c),
                    self.labels[sc.k]
                )?;
            }
        }
        write!(f, ")")
    }
}

/// Outcome of one structural check; indices in counterexamples are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub passed: bool,
    pub counterexample: Option<[usize; 3]>,
    pub detail: String,
}

impl PropertyCheck {
    pub fn pass() -> Self {
        Self {
            passed: true,
            counterexample: None,
            detail: String::new(),
        }
    }

    pub fn fail(triple: [usize; 3], detail: String) -> Self {
        Self {
            passed: false,
            counterexample: Some(triple),
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub antisymmetry: PropertyCheck,
    pub jacobi: PropertyCheck,
    pub grading: PropertyCheck,
    pub generation: PropertyCheck,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.antisymmetry.passed
            && self.jacobi.passed
            && self.grading.passed
            && self.generation.passed
    }

    /// First failing property, by name.
    pub fn first_failure(&self) -> Option<(&'static str, &PropertyCheck)> {
        [
            ("antisymmetry", &self.antisymmetry),
            ("jacobi", &self.jacobi),
            ("grading", &self.grading),
            ("generation", &self.generation),
        ]
        .into_iter()
        .find(|(_, c)| !c.passed)
    }
}
