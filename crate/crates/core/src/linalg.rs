//! Exact linear algebra over the rationals.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::scalar::Rational;

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(rows: &mut Vec<Vec<Rational>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][c];
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of `{x : A x = 0}` for `A` with `ncols` columns.
pub fn null_space(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rational::zero(); ncols];
            x[f] = Rational::one();
            for (row, &pc) in m.iter().zip(&pivots) {
                x[pc] = -row[f].clone();
            }
            x
        })
        .collect()
}

/// One solution of `A x = b` with free variables set to `free_value`, or
/// `None` if inconsistent.
pub fn solve_affine(
    rows: &[Vec<Rational>],
    rhs: &[Rational],
    free_value: &Rational,
) -> Option<Vec<Rational>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<Rational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![free_value.clone(); ncols];
    for &p in &pivots {
        x[p] = Rational::zero();
    }
    for (row, &pc) in aug.iter().zip(&pivots) {
        let mut v = row[ncols].clone();
        for (c, xc) in x.iter().enumerate() {
            if c != pc && !pivots.contains(&c) {
                v -= &row[c] * xc;
            }
        }
        x[pc] = v;
    }
    Some(x)
}

/// Sparse vector keyed by an ordered index.
pub type SparseVec<K> = BTreeMap<K, Rational>;

/// Incrementally maintained span of sparse vectors that can express members
/// as combinations of the inserted generators.
#[derive(Debug, Clone)]
pub struct SpanTracker<K: Ord + Clone> {
    // (pivot key, reduced vector with pivot entry 1, combination of generators)
    rows: Vec<(K, SparseVec<K>, Vec<Rational>)>,
    generators: usize,
}

impl<K: Ord + Clone> Default for SpanTracker<K> {
    fn default() -> Self {
        Self {
            rows: Vec::new(),
            generators: 0,
        }
    }
}

impl<K: Ord + Clone> SpanTracker<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.generators
    }

    fn reduce(&self, v: &SparseVec<K>) -> (SparseVec<K>, Vec<Rational>) {
        let mut v = v.clone();
        let mut combo = vec![Rational::zero(); self.generators];
        for (pivot, row, rc) in &self.rows {
            let Some(f) = v.get(pivot).cloned() else {
                continue;
            };
            axpy(&mut v, &-f.clone(), row);
            for (c, r) in combo.iter_mut().zip(rc) {
                *c += &f * r;
            }
        }
        (v, combo)
    }

    /// Coefficients of `v` in the generators, if `v` lies in the span.
    pub fn express(&self, v: &SparseVec<K>) -> Option<Vec<Rational>> {
        let (rem, combo) = self.reduce(v);
        rem.is_empty().then_some(combo)
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Adds `v` as a new generator if independent; returns its index.
    pub fn insert(&mut self, v: &SparseVec<K>) -> Option<usize> {
        let (mut rem, combo) = self.reduce(v);
        let (pivot, lead) = rem.iter().next().map(|(k, c)| (k.clone(), c.clone()))?;
        let idx = self.generators;
        self.generators += 1;
        for row in self.rows.iter_mut() {
            row.2.push(Rational::zero());
        }
        // rem = v - sum combo_i g_i, so g_new = v expressed as rem + sum combo_i g_i.
        let inv = Rational::one() / &lead;
        for x in rem.values_mut() {
            *x *= &inv;
        }
        let mut rc: Vec<Rational> = combo.iter().map(|c| -c * &inv).collect();
        rc.push(inv.clone());
        // Keep earlier rows reduced with respect to the new pivot.
        for (_, row, rcomb) in self.rows.iter_mut() {
            if let Some(f) = row.get(&pivot).cloned() {
                axpy(row, &-f.clone(), &rem);
                for (c, r) in rcomb.iter_mut().zip(&rc) {
                    *c -= &f * r;
                }
            }
        }
        self.rows.push((pivot, rem, rc));
        Some(idx)
    }
}

/// `y += a * x` on sparse vectors.
pub fn axpy<K: Ord + Clone>(y: &mut SparseVec<K>, a: &Rational, x: &SparseVec<K>) {
    for (k, v) in x {
        let add = a * v;
        match y.get_mut(k) {
            Some(e) => {
                *e += add;
                if e.is_zero() {
                    y.remove(k);
                }
            }
            None => {
                if !add.is_zero() {
                    y.insert(k.clone(), add);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rint;

    fn sv(e: &[(u32, i64)]) -> SparseVec<u32> {
        e.iter().map(|&(k, v)| (k, rint(v))).collect()
    }

    #[test]
    fn null_space_and_rank() {
        let a = vec![
            vec![rint(1), rint(2), rint(3)],
            vec![rint(2), rint(4), rint(6)],
        ];
        assert_eq!(rank(&a), 1);
        let ns = null_space(&a, 3);
        assert_eq!(ns.len(), 2);
        for x in ns {
            let y: Rational = a[0].iter().zip(&x).map(|(p, q)| p * q).sum();
            assert!(y.is_zero());
        }
    }

    #[test]
    fn span_tracker_expresses_members() {
        let mut t = SpanTracker::new();
        assert_eq!(t.insert(&sv(&[(0, 1), (1, 1)])), Some(0));
        assert_eq!(t.insert(&sv(&[(1, 1), (2, 2)])), Some(1));
        assert_eq!(t.insert(&sv(&[(0, 2), (1, 3), (2, 2)])), None);
        let c = t.express(&sv(&[(0, 3), (1, 5), (2, 4)])).unwrap();
        assert_eq!(c, vec![rint(3), rint(2)]);
        assert!(t.express(&sv(&[(2, 1)])).is_none());
    }

    #[test]
    fn affine_solution() {
        let a = vec![vec![rint(1), rint(-1)]];
        let x = solve_affine(&a, &[rint(-1)], &rint(1)).unwrap();
        assert_eq!(x, vec![rint(0), rint(1)]);
    }
}
