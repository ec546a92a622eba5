//! Uniform square grids and the radial cutoff.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Square `[-L, L]^2` with spacing `hg`; node `(i, j)` sits at
/// `(-L + i hg, -L + j hg)` and is stored at `i * n + j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid2D {
    pub l: f64,
    pub hg: f64,
    /// Nodes per side, boundary included.
    pub n: usize,
}

impl Grid2D {
    pub fn new(l: f64, hg: f64) -> Result<Self> {
        if !(l > 0.0 && hg > 0.0) {
            return Err(Error::Input(format!(
                "grid needs L > 0 and hg > 0, got L = {l}, hg = {hg}"
            )));
        }
        let cells = l / hg;
        if (cells - cells.round()).abs() > 1e-9 * cells.max(1.0) {
            return Err(Error::Input(format!("L / hg = {cells} is not an integer")));
        }
        let half = cells.round() as usize;
        if half < 2 {
            return Err(Error::Input("grid has no interior".into()));
        }
        Ok(Self {
            l,
            hg,
            n: 2 * half + 1,
        })
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.l + i as f64 * self.hg
    }

    pub fn point(&self, idx: usize) -> (f64, f64) {
        (self.coord(idx / self.n), self.coord(idx % self.n))
    }

    pub fn origin(&self) -> usize {
        let c = self.n / 2;
        c * self.n + c
    }

    pub fn is_interior(&self, idx: usize) -> bool {
        let (i, j) = (idx / self.n, idx % self.n);
        i > 0 && j > 0 && i + 1 < self.n && j + 1 < self.n
    }

    pub fn interior_count(&self) -> usize {
        (self.n - 2) * (self.n - 2)
    }

    /// Evaluates `f` at every node; boundary nodes are included.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64 + Sync) -> Vec<f64> {
        (0..self.len())
            .into_par_iter()
            .map(|k| {
                let (x, y) = self.point(k);
                f(x, y)
            })
            .collect()
    }

    /// Bilinear interpolation of nodal values.
    pub fn interpolate(&self, values: &[f64], t1: f64, t2: f64) -> Option<f64> {
        let x = (t1 + self.l) / self.hg;
        let y = (t2 + self.l) / self.hg;
        let last = (self.n - 1) as f64;
        if !(0.0..=last).contains(&x) || !(0.0..=last).contains(&y) {
            return None;
        }
        let i = (x.floor() as usize).min(self.n - 2);
        let j = (y.floor() as usize).min(self.n - 2);
        let (fx, fy) = (x - i as f64, y - j as f64);
        let v = |a: usize, b: usize| values[a * self.n + b];
        Some(
            (1.0 - fx) * (1.0 - fy) * v(i, j)
                + fx * (1.0 - fy) * v(i + 1, j)
                + (1.0 - fx) * fy * v(i, j + 1)
                + fx * fy * v(i + 1, j + 1),
        )
    }

    /// Nodes within distance `r` of `center`.
    pub fn ball(&self, center: (f64, f64), r: f64) -> Vec<usize> {
        let lo = |c: f64| (((c - r + self.l) / self.hg).ceil().max(0.0)) as usize;
        let hi = |c: f64| ((((c + r + self.l) / self.hg).floor()) as usize).min(self.n - 1);
        let mut out = Vec::new();
        for i in lo(center.0)..=hi(center.0) {
            for j in lo(center.1)..=hi(center.1) {
                let (x, y) = (self.coord(i), self.coord(j));
                if (x - center.0).hypot(y - center.1) <= r + 1e-12 {
                    out.push(i * self.n + j);
                }
            }
        }
        out
    }
}

/// Radial cutoff: 1 on `|t| <= N`, 0 on `|t| >= 2N`, quintic smoothstep in
/// between (C^2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cutoff {
    pub n: f64,
}

impl Cutoff {
    pub fn new(n: f64) -> Result<Self> {
        if n > 0.0 {
            Ok(Self { n })
        } else {
            Err(Error::Input(format!(
                "cutoff radius must be positive, got {n}"
            )))
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let x = (r - self.n) / self.n;
        if x <= 0.0 {
            1.0
        } else if x >= 1.0 {
            0.0
        } else {
            1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)
        }
    }

    pub fn at(&self, t1: f64, t2: f64) -> f64 {
        self.eval(t1.hypot(t2))
    }
}

pub fn cutoff(n: f64) -> Result<Cutoff> {
    Cutoff::new(n)
}
