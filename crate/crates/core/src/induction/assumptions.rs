use num_traits::Zero;
use serde::Serialize;

use super::covector::{Covector, CovectorPair};
use crate::lie::StratifiedAlgebra;

/// Exhaustive check over basis pairs of strata above one; indices 1-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCheck {
    pub passed: bool,
    pub first_violation: Option<(usize, usize)>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub s: usize,
    pub m: usize,
    /// `s < m`.
    pub s_less_than_m: bool,
    /// `<lambda_i, [V_k, V_j]> = 0` for `k, j > 1`, `i = 1, 2`.
    pub pairing_vanishes: PairCheck,
    /// `[V_k, V_j] = 0` for `k, j > 1`.
    pub strong_form: PairCheck,
}

impl AssumptionReport {
    /// Both required assumptions hold (the strong form is informational).
    pub fn passed(&self) -> bool {
        self.s_less_than_m && self.pairing_vanishes.passed
    }

    pub fn failure_message(&self) -> Option<String> {
        if !self.s_less_than_m {
            return Some(format!(
                "s < m violated: {}",
                if self.s == self.m {
                    format!("s = m = {}", self.s)
                } else {
                    format!("s = {} exceeds m = {}", self.s, self.m)
                }
            ));
        }
        if !self.pairing_vanishes.passed {
            return Some(format!(
                "pairing condition violated: {}",
                self.pairing_vanishes.detail
            ));
        }
        None
    }
}

fn pairs_above_one(alg: &StratifiedAlgebra) -> impl Iterator<Item = (usize, usize)> + '_ {
    let start = alg.strata()[0];
    (start..alg.dim()).flat_map(move |k| (k + 1..alg.dim()).map(move |j| (k, j)))
}

fn pairing_check(alg: &StratifiedAlgebra, lambdas: &[(&str, &Covector)]) -> PairCheck {
    for (k, j) in pairs_above_one(alg) {
        for (name, lam) in lambdas {
            let v = alg.pair_bracket(&lam.values(), k, j);
            if !v.is_zero() {
                return PairCheck {
                    passed: false,
                    first_violation: Some((k + 1, j + 1)),
                    detail: format!("<{name}, [{}, {}]> is nonzero", alg.label(k), alg.label(j)),
                };
            }
        }
    }
    PairCheck {
        passed: true,
        first_violation: None,
        detail: String::new(),
    }
}

fn strong_check(alg: &StratifiedAlgebra) -> PairCheck {
    for (k, j) in pairs_above_one(alg) {
        if !alg.bracket_basis(k, j).is_empty() {
            return PairCheck {
                passed: false,
                first_violation: Some((k + 1, j + 1)),
                detail: format!("[{}, {}] is nonzero", alg.label(k), alg.label(j)),
            };
        }
    }
    PairCheck {
        passed: true,
        first_violation: None,
        detail: String::new(),
    }
}

/// Checks `s < m` and the vanishing of both covectors on brackets of
/// strata above one; reports the strong form separately.
pub fn check_assumptions(alg: &StratifiedAlgebra, pair: &CovectorPair) -> AssumptionReport {
    AssumptionReport {
        s: pair.s,
        m: pair.m,
        s_less_than_m: pair.satisfies_s_lt_m(),
        pairing_vanishes: pairing_check(
            alg,
            &[("lambda1", &pair.lambda1), ("lambda2", &pair.lambda2)],
        ),
        strong_form: strong_check(alg),
    }
}
