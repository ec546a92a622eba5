use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use super::covector::Component;
use crate::error::{Error, Result};
use crate::lie::StratifiedAlgebra;
use crate::scalar::Rational;

/// Whether `<lambda, [e_i, e_j]>` is nonzero as a polynomial in the formal
/// parameters of `lambda`.
pub(crate) fn pairing_nonzero(
    alg: &StratifiedAlgebra,
    lambda: &BTreeMap<usize, Component>,
    i: usize,
    j: usize,
) -> bool {
    let mut by_symbol: BTreeMap<&str, Rational> = BTreeMap::new();
    for (k, c) in alg.bracket_basis(i, j) {
        if let Some(comp) = lambda.get(k) {
            *by_symbol
                .entry(comp.symbol.as_str())
                .or_insert_with(Rational::zero) += c * &comp.value;
        }
    }
    by_symbol.values().any(|v| !v.is_zero())
}

/// `h = span(B \ S) + V_2 + ... + V_{m+1}` with its verification flags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubordinateSubalgebra {
    /// 0-based basis indices spanning `h`.
    pub basis: Vec<usize>,
    pub labels: Vec<String>,
    pub closed_under_bracket: bool,
    pub ideal: bool,
    pub subordinate: bool,
    pub maximal: bool,
    /// First failure for each flag, in words.
    pub failures: Vec<String>,
}

impl SubordinateSubalgebra {
    pub fn all_flags(&self) -> bool {
        self.closed_under_bracket && self.ideal && self.subordinate && self.maximal
    }

    /// Structured failure when any flag is false.
    pub fn verified(&self) -> Result<()> {
        if self.all_flags() {
            Ok(())
        } else {
            Err(Error::Subordinate(self.failures.join("; ")))
        }
    }
}

/// Builds `h` from `S` (0-based indices of stratum-one basis elements) and
/// checks subalgebra, ideal, subordination and maximality exhaustively.
pub fn build_subordinate(
    alg: &StratifiedAlgebra,
    lambda: &BTreeMap<usize, Component>,
    s: &[usize],
) -> Result<SubordinateSubalgebra> {
    let v1 = alg.stratum(1);
    if let Some(k) = s.iter().find(|k| !v1.contains(k)) {
        return Err(Error::Input(format!(
            "S element {} is not a stratum-one basis element",
            k + 1
        )));
    }
    let basis: Vec<usize> = (0..alg.dim()).filter(|k| !s.contains(k)).collect();
    let in_h = |k: usize| !s.contains(&k);
    let mut failures = Vec::new();

    let leaves = |i: usize, j: usize| alg.bracket_basis(i, j).iter().any(|(k, _)| !in_h(*k));

    let mut closed = true;
    'c: for &a in &basis {
        for &b in &basis {
            if leaves(a, b) {
                failures.push(format!("[{}, {}] leaves h", alg.label(a), alg.label(b)));
                closed = false;
                break 'c;
            }
        }
    }

    let mut ideal = true;
    'i: for x in 0..alg.dim() {
        for &b in &basis {
            if leaves(x, b) {
                failures.push(format!(
                    "[{}, {}] leaves h, so h is not an ideal",
                    alg.label(x),
                    alg.label(b)
                ));
                ideal = false;
                break 'i;
            }
        }
    }

    let mut subordinate = true;
    's: for (ia, &a) in basis.iter().enumerate() {
        for &b in &basis[ia + 1..] {
            if pairing_nonzero(alg, lambda, a, b) {
                failures.push(format!(
                    "<lambda, [{}, {}]> is nonzero",
                    alg.label(a),
                    alg.label(b)
                ));
                subordinate = false;
                break 's;
            }
        }
    }

    let mut maximal = true;
    for &k in s {
        let breaks = basis.iter().any(|&b| pairing_nonzero(alg, lambda, k, b));
        if !breaks {
            failures.push(format!(
                "adjoining {} keeps h subordinate, so h is not maximal",
                alg.label(k)
            ));
            maximal = false;
            break;
        }
    }

    Ok(SubordinateSubalgebra {
        labels: basis.iter().map(|&k| alg.label(k).to_string()).collect(),
        basis,
        closed_under_bracket: closed,
        ideal,
        subordinate,
        maximal,
        failures,
    })
}
