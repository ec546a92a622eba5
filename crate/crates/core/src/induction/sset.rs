use std::collections::BTreeMap;

use serde::Serialize;

use super::covector::{Component, Covector, CovectorPair};
use super::subordinate::{build_subordinate, pairing_nonzero, SubordinateSubalgebra};
use crate::error::{Error, Result};
use crate::lie::StratifiedAlgebra;

/// Branch cap for tie-break enumeration.
const MAX_BRANCHES: usize = 4096;

/// One candidate `S` explored by [`compute_s`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    /// `"inclusive"` (the pair pool keeps S2 members) or `"exclusive"`.
    pub reading: String,
    /// Ordered tie-break choices.
    pub choices: Vec<String>,
    pub s1: Vec<usize>,
    pub s: Vec<usize>,
    pub subalgebra: SubordinateSubalgebra,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SSetResult {
    pub case: u8,
    /// 0-based stratum-one indices.
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
    pub s: Vec<usize>,
    pub labels: Vec<String>,
    pub n: usize,
    pub r: usize,
    pub branches: Vec<Branch>,
    pub accepted: usize,
}

impl SSetResult {
    pub fn subalgebra(&self) -> &SubordinateSubalgebra {
        &self.branches[self.accepted].subalgebra
    }

    /// Stratum-one indices outside `S`, in order.
    pub fn complement(&self, alg: &StratifiedAlgebra) -> Vec<usize> {
        alg.stratum(1).filter(|k| !self.s.contains(k)).collect()
    }
}

fn entries(c: &Covector) -> BTreeMap<usize, Component> {
    c.entries().clone()
}

/// `{X in B : exists Y, <lambda, [X, Y]> != 0}`.
fn pairing_set(alg: &StratifiedAlgebra, lambda: &BTreeMap<usize, Component>) -> Vec<usize> {
    alg.stratum(1)
        .filter(|&x| (0..alg.dim()).any(|y| pairing_nonzero(alg, lambda, x, y)))
        .collect()
}

/// Pairs `{X_k, X_j}` of stratum-one elements with `<lambda, [X_k, X_j]> != 0`.
fn pair_set(alg: &StratifiedAlgebra, lambda: &BTreeMap<usize, Component>) -> Vec<(usize, usize)> {
    let v1: Vec<usize> = alg.stratum(1).collect();
    let mut out = Vec::new();
    for (a, &x) in v1.iter().enumerate() {
        for &y in &v1[a + 1..] {
            if pairing_nonzero(alg, lambda, x, y) {
                out.push((x, y));
            }
        }
    }
    out
}

/// Every outcome of the greedy pair elimination, in deterministic DFS order.
fn greedy_branches(
    alg: &StratifiedAlgebra,
    pairs: Vec<(usize, usize)>,
) -> Vec<(Vec<usize>, Vec<String>)> {
    let mut out = Vec::new();
    greedy(alg, pairs, Vec::new(), Vec::new(), &mut out);
    out
}

fn greedy(
    alg: &StratifiedAlgebra,
    pairs: Vec<(usize, usize)>,
    chosen: Vec<usize>,
    trace: Vec<String>,
    out: &mut Vec<(Vec<usize>, Vec<String>)>,
) {
    if out.len() >= MAX_BRANCHES {
        return;
    }
    if pairs.is_empty() {
        out.push((chosen, trace));
        return;
    }
    let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
    for &(a, b) in &pairs {
        *degree.entry(a).or_default() += 1;
        *degree.entry(b).or_default() += 1;
    }
    let max = *degree.values().max().unwrap();
    let candidates: Vec<usize> = if max >= 2 {
        degree
            .iter()
            .filter(|(_, &d)| d == max)
            .map(|(&v, _)| v)
            .collect()
    } else {
        let (a, b) = pairs[0];
        vec![a, b]
    };
    let tie = candidates.len() > 1;
    for v in candidates {
        let rest: Vec<(usize, usize)> = pairs
            .iter()
            .copied()
            .filter(|&(a, b)| a != v && b != v)
            .collect();
        let mut c = chosen.clone();
        c.push(v);
        let mut t = trace.clone();
        let why = if max >= 2 {
            "most pairs"
        } else {
            "remaining pair"
        };
        t.push(if tie {
            format!("{} ({why}, tie)", alg.label(v))
        } else {
            format!("{} ({why})", alg.label(v))
        });
        greedy(alg, rest, c, t, out);
    }
}

fn union_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Runs the S-set construction (three cases by `s` and `m`), enumerating
/// every tie-break branch and accepting the first whose subalgebra passes all
/// four verification flags.
pub fn compute_s(alg: &StratifiedAlgebra, pair: &CovectorPair) -> Result<SSetResult> {
    let l1 = entries(&pair.lambda1);
    let l2 = entries(&pair.lambda2);
    let lambda = pair.lambda_entries();
    let p = alg.strata()[0];

    // (case, s2, candidate list of (reading, s1, choices))
    let (case, s2, candidates): (u8, Vec<usize>, Vec<(String, Vec<usize>, Vec<String>)>) =
        if pair.m == 1 {
            // S1 is empty; the pair construction runs on lambda2 (on lambda when
            // both covectors share the top stratum).
            let pool = if pair.s == 1 { &lambda } else { &l2 };
            let branches = greedy_branches(alg, pair_set(alg, pool));
            let cands = branches
                .into_iter()
                .map(|(c, t)| ("inclusive".to_string(), c, t))
                .collect();
            (3, Vec::new(), cands)
        } else if pair.s == 1 {
            let s2 = pairing_set(alg, &l2);
            let all_pairs = pair_set(alg, &l1);
            let mut cands = Vec::new();
            for (c, t) in greedy_branches(alg, all_pairs.clone()) {
                cands.push(("inclusive".to_string(), c, t));
            }
            let pruned: Vec<(usize, usize)> = all_pairs
                .into_iter()
                .filter(|(a, b)| !s2.contains(a) && !s2.contains(b))
                .collect();
            for (c, t) in greedy_branches(alg, pruned) {
                cands.push(("exclusive".to_string(), c, t));
            }
            (2, s2, cands)
        } else {
            let s1 = pairing_set(alg, &l1);
            let s2 = pairing_set(alg, &l2);
            (1, s2, vec![("direct".to_string(), s1, Vec::new())])
        };

    let mut branches: Vec<Branch> = Vec::new();
    let mut accepted: Option<usize> = None;
    let mut cache: BTreeMap<Vec<usize>, SubordinateSubalgebra> = BTreeMap::new();
    for (reading, mut s1, choices) in candidates {
        s1.sort_unstable();
        let (s1, s2_here) = if case == 3 {
            (Vec::new(), s1)
        } else {
            (s1, s2.clone())
        };
        let s = union_sorted(&s1, &s2_here);
        let sub = match cache.get(&s) {
            Some(h) => h.clone(),
            None => {
                let h = build_subordinate(alg, &lambda, &s)?;
                cache.insert(s.clone(), h.clone());
                h
            }
        };
        let ok = !s.is_empty() && sub.all_flags() && accepted.is_none();
        if ok {
            accepted = Some(branches.len());
        }
        branches.push(Branch {
            reading,
            choices,
            s1,
            s,
            subalgebra: sub,
            accepted: ok,
        });
    }

    let Some(acc) = accepted else {
        return Err(Error::NoMaximalBranch {
            trace: branches
                .iter()
                .map(|b| {
                    format!(
                        "{} [{}] S = {{{}}}: {}",
                        b.reading,
                        b.choices.join(", "),
                        b.s.iter()
                            .map(|&k| alg.label(k))
                            .collect::<Vec<_>>()
                            .join(", "),
                        if b.s.is_empty() {
                            "S is empty".to_string()
                        } else {
                            b.subalgebra.failures.join("; ")
                        }
                    )
                })
                .collect(),
        });
    };
    let chosen = &branches[acc];
    let s = chosen.s.clone();
    let (s1, s2) = if case == 3 {
        (Vec::new(), s.clone())
    } else {
        (chosen.s1.clone(), s2)
    };
    Ok(SSetResult {
        case,
        labels: s.iter().map(|&k| alg.label(k).to_string()).collect(),
        n: s.len(),
        r: p - s.len(),
        s1,
        s2,
        s,
        branches,
        accepted: acc,
    })
}
