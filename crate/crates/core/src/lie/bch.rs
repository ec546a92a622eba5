use std::collections::HashMap;

use num_traits::{One, Zero};

use super::element::{bracket_unchecked, AlgebraElement};
use super::StratifiedAlgebra;
use crate::error::Result;
use crate::scalar::{rint, Rational};

/// `log(exp x * exp y)` truncated at bracket length equal to the step.
///
/// Uses the recursion
/// `(n+1) Z_{n+1} = 1/2 [x - y, Z_n] + sum_p B_{2p}/(2p)! W_{2p}(n)`
/// with `W_j(r) = sum_k [Z_k, W_{j-1}(r-k)]`, `W_0(0) = x + y`, where `Z_n`
/// collects the terms of degree `n` in `(x, y)`.
pub fn bch_product(
    alg: &StratifiedAlgebra,
    x: &AlgebraElement,
    y: &AlgebraElement,
) -> Result<AlgebraElement> {
    super::element::compatible(alg, x, y)?;
    Ok(bch_unchecked(alg, x, y))
}

pub(crate) fn bch_unchecked(
    alg: &StratifiedAlgebra,
    x: &AlgebraElement,
    y: &AlgebraElement,
) -> AlgebraElement {
    let step = alg.step();
    let sum = x.add(y);
    let diff = x.sub(y);
    let bern = bernoulli_over_factorial(step);
    let zero = AlgebraElement::zero(alg.dim(), x.registry());

    // z[n] = Z_n for n >= 1; z[0] unused.
    let mut z: Vec<AlgebraElement> = vec![zero.clone(), sum.clone()];
    let mut w: HashMap<(usize, usize), AlgebraElement> = HashMap::new();

    for n in 1..step {
        let mut next =
            bracket_unchecked(alg, &diff, &z[n]).scale(&Rational::new(1.into(), 2.into()));
        let mut p = 1;
        while 2 * p <= n {
            let c = &bern[2 * p];
            if !c.is_zero() {
                let wt = w_term(alg, &z, &sum, &zero, &mut w, 2 * p, n);
                next.add_assign(&wt.scale(c));
            }
            p += 1;
        }
        z.push(next.scale(&(Rational::one() / rint(n as i64 + 1))));
    }

    let mut out = zero;
    for zn in z.iter().skip(1) {
        out.add_assign(zn);
    }
    out
}

fn w_term(
    alg: &StratifiedAlgebra,
    z: &[AlgebraElement],
    sum: &AlgebraElement,
    zero: &AlgebraElement,
    memo: &mut HashMap<(usize, usize), AlgebraElement>,
    j: usize,
    r: usize,
) -> AlgebraElement {
    if j == 0 {
        return if r == 0 { sum.clone() } else { zero.clone() };
    }
    if r < j {
        return zero.clone();
    }
    if let Some(v) = memo.get(&(j, r)) {
        return v.clone();
    }
    let mut acc = zero.clone();
    for k in 1..=(r + 1 - j) {
        let inner = w_term(alg, z, sum, zero, memo, j - 1, r - k);
        if inner.is_zero() || z[k].is_zero() {
            continue;
        }
        acc.add_assign(&bracket_unchecked(alg, &z[k], &inner));
    }
    memo.insert((j, r), acc.clone());
    acc
}

/// `B_k / k!` for `k = 0..=n` (with `B_1 = -1/2`).
pub(crate) fn bernoulli_over_factorial(n: usize) -> Vec<Rational> {
    // B_m = -1/(m+1) sum_{k<m} C(m+1, k) B_k
    let mut b = vec![Rational::one()];
    for m in 1..=n {
        let mut acc = Rational::zero();
        let mut binom = Rational::one();
        for (k, bk) in b.iter().enumerate() {
            acc += &binom * bk;
            binom = binom * rint((m + 1 - k) as i64) / rint(k as i64 + 1);
        }
        b.push(-acc / rint(m as i64 + 1));
    }
    let mut fact = Rational::one();
    b.into_iter()
        .enumerate()
        .map(|(k, bk)| {
            if k > 0 {
                fact *= rint(k as i64);
            }
            bk / &fact
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_over_factorial(6);
        assert_eq!(b[1], rat(-1, 2));
        assert_eq!(b[2], rat(1, 12));
        assert_eq!(b[3], rat(0, 1));
        assert_eq!(b[4], rat(-1, 720));
        assert_eq!(b[6], rat(1, 30240));
    }
}
