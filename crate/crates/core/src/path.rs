//! Piecewise-linear paths and their signatures.
//!
//! The signature of a polygonal path is the ordered product of the
//! exponentials of its increments (Chen's identity), which is exact when
//! the coordinates are rational.

use crate::error::{Error, Result};
use crate::scalar::{RealScalar, Scalar};
use crate::tensor::{outer, NormKind, TruncatedTensor};

/// A polygon in `R^d` given by its ordered vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearPath<S> {
    dim: usize,
    vertices: Vec<Vec<S>>,
}

impl<S: RealScalar> PiecewiseLinearPath<S> {
    pub fn new(vertices: Vec<Vec<S>>) -> Result<Self> {
        let dim = vertices.first().ok_or(Error::EmptyPath)?.len();
        if dim == 0 {
            return Err(Error::InvalidShape("vertices must have dimension at least 1".into()));
        }
        for (index, v) in vertices.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { index, expected: dim, found: v.len() });
            }
        }
        Ok(PiecewiseLinearPath { dim, vertices })
    }

    /// Path starting at the origin and following `increments`.
    pub fn from_increments(dim: usize, increments: &[Vec<S>]) -> Result<Self> {
        let mut vertices = vec![vec![S::zero(); dim]];
        for inc in increments {
            let last = vertices.last().unwrap();
            if inc.len() != dim {
                return Err(Error::DimensionMismatch { index: vertices.len(), expected: dim, found: inc.len() });
            }
            let next = last.iter().zip(inc).map(|(a, b)| a.clone() + b).collect();
            vertices.push(next);
        }
        Self::new(vertices)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<S>] {
        &self.vertices
    }

    pub fn num_segments(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn increments(&self) -> impl Iterator<Item = Vec<S>> + '_ {
        self.vertices.windows(2).map(|w| w[1].iter().zip(&w[0]).map(|(b, a)| b.clone() - a).collect())
    }

    /// Concatenation with `other` translated to start at this path's end.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { index: 0, expected: self.dim, found: other.dim });
        }
        let incs: Vec<Vec<S>> = self.increments().chain(other.increments()).collect();
        let start = self.vertices[0].clone();
        let mut vertices = vec![start];
        for inc in incs {
            let last = vertices.last().unwrap();
            let next = last.iter().zip(&inc).map(|(a, b)| a.clone() + b).collect();
            vertices.push(next);
        }
        Self::new(vertices)
    }

    pub fn map<T: RealScalar>(&self, f: impl Fn(&S) -> T) -> PiecewiseLinearPath<T> {
        PiecewiseLinearPath {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v.iter().map(&f).collect()).collect(),
        }
    }

    pub fn to_f64(&self) -> PiecewiseLinearPath<f64> {
        self.map(RealScalar::to_f64)
    }

    /// Length measured in the base norm matching `kind`.
    pub fn length(&self, kind: NormKind) -> f64 {
        self.increments().map(|inc| kind.vector_norm(&inc)).sum()
    }

    /// Exact `l1` length.
    pub fn length_l1_exact(&self) -> S {
        self.increments().flat_map(|inc| inc.into_iter().map(|c| c.abs())).fold(S::zero(), |acc, c| acc + c)
    }

    /// Truncated signature to depth `depth`.
    pub fn signature(&self, depth: usize) -> Result<TruncatedTensor<S>> {
        let mut sig = TruncatedTensor::unit(self.dim, depth)?;
        for inc in self.increments() {
            if inc.iter().all(S::is_zero) {
                continue;
            }
            sig = sig.mul(&segment_exp(&inc, depth)?)?;
        }
        Ok(sig)
    }

    /// Removes tree-like pieces that are visible locally: zero segments,
    /// collinear consecutive segments (merged), and immediate backtracks
    /// (partially or fully cancelled). Repeats to a fixed point.
    ///
    /// Every removal replaces `a -> b -> c` by `a -> c` where the two
    /// increments are parallel, so the signature is preserved. Excursions
    /// that revisit an earlier edge at an interior point after a detour are
    /// not detected.
    pub fn tree_reduce(&self) -> Self {
        let mut stack: Vec<Vec<S>> = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            let duplicate = loop {
                if stack.last() == Some(v) {
                    break true;
                }
                let n = stack.len();
                // drop b from a -> b -> v when both increments are parallel
                if n >= 2 && parallel(&diff(&stack[n - 1], &stack[n - 2]), &diff(v, &stack[n - 1])) {
                    stack.pop();
                    continue;
                }
                break false;
            };
            if !duplicate {
                stack.push(v.clone());
            }
        }
        PiecewiseLinearPath { dim: self.dim, vertices: stack }
    }
}

fn diff<S: RealScalar>(b: &[S], a: &[S]) -> Vec<S> {
    b.iter().zip(a).map(|(x, y)| x.clone() - y).collect()
}

/// `u` and `w` are linearly dependent: every 2x2 minor vanishes.
fn parallel<S: RealScalar>(u: &[S], w: &[S]) -> bool {
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            if u[i].clone() * &w[j] != u[j].clone() * &w[i] {
                return false;
            }
        }
    }
    true
}

/// Signature of the straight segment with increment `v`:
/// level `k` is `v^{⊗k} / k!`.
pub fn segment_exp<S: Scalar>(v: &[S], depth: usize) -> Result<TruncatedTensor<S>> {
    let mut levels = Vec::with_capacity(depth + 1);
    levels.push(vec![S::one()]);
    for k in 1..=depth {
        let inv_k = S::from_ratio(1, k as i64);
        let scaled: Vec<S> = v.iter().map(|c| c.clone() * &inv_k).collect();
        let next = outer(&levels[k - 1], &scaled);
        levels.push(next);
    }
    TruncatedTensor::from_levels(v.len(), depth, levels)
}

/// Iterated left-point Riemann sums of the signature.
///
/// Each segment occupies one unit of time and is cut into
/// `ceil(1 / mesh)` equal steps; level `n` accumulates
/// `sum_{i_1 < .. < i_n} Δ_{i_1} ⊗ .. ⊗ Δ_{i_n}` over all steps.
pub fn riemann_signature<S: RealScalar>(
    path: &PiecewiseLinearPath<S>,
    depth: usize,
    mesh: f64,
) -> Result<TruncatedTensor<f64>> {
    if !(mesh > 0.0 && mesh <= 1.0) {
        return Err(Error::InvalidMesh(mesh));
    }
    let steps = (1.0 / mesh).ceil() as usize;
    let dim = path.dim();
    let mut levels: Vec<Vec<f64>> = (0..=depth).map(|k| vec![0.0; dim.pow(k as u32)]).collect();
    levels[0][0] = 1.0;
    let path = path.to_f64();
    for inc in path.increments() {
        let delta: Vec<f64> = inc.iter().map(|c| c / steps as f64).collect();
        for _ in 0..steps {
            // highest level first so each update reads the previous step
            for k in (1..=depth).rev() {
                let (lower, upper) = levels.split_at_mut(k);
                let prev = &lower[k - 1];
                let cur = &mut upper[0];
                for (i, p) in prev.iter().enumerate() {
                    if *p == 0.0 {
                        continue;
                    }
                    let row = &mut cur[i * dim..(i + 1) * dim];
                    for (c, d) in row.iter_mut().zip(&delta) {
                        *c += p * d;
                    }
                }
            }
        }
    }
    TruncatedTensor::from_levels(dim, depth, levels)
}
