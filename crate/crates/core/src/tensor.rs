//! Dense truncated tensor algebra `T^(N)(K^d)`.
//!
//! Level `k` of a tensor stores `d^k` coefficients indexed by words
//! `(i_1, ..., i_k)` in lexicographic order: the word with 0-based letters
//! `w` lives at offset `sum_j w_j * d^(k-1-j)`, so the first letter is the
//! most significant digit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Rational, RealScalar, Scalar};

/// Coordinate norm applied to one tensor level.
///
/// `L1Projective` is the projective norm for the `l1` base norm on `R^d`
/// (sum of absolute coefficients); `L2HilbertSchmidt` is the Euclidean norm
/// of the coefficients. Both are multiplicative under `⊗` and invariant
/// under index permutations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormKind {
    #[serde(rename = "l1proj")]
    L1Projective,
    #[serde(rename = "l2hs")]
    L2HilbertSchmidt,
}

impl NormKind {
    pub const ALL: [NormKind; 2] = [NormKind::L1Projective, NormKind::L2HilbertSchmidt];

    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::L1Projective => "l1proj",
            NormKind::L2HilbertSchmidt => "l2hs",
        }
    }

    /// Norm of a flat coefficient slice.
    pub fn apply<S: Scalar>(self, coefficients: &[S]) -> f64 {
        match self {
            NormKind::L1Projective => compensated_sum(coefficients.iter().map(Scalar::modulus)),
            NormKind::L2HilbertSchmidt => compensated_sum(coefficients.iter().map(|c| {
                let m = c.modulus();
                m * m
            }))
            .sqrt(),
        }
    }

    /// Base norm of a vector in `R^d` matching this tensor norm.
    pub fn vector_norm<S: RealScalar>(self, v: &[S]) -> f64 {
        self.apply(v)
    }
}

/// Neumaier summation.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        carry += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + carry
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1proj" | "l1" => Ok(NormKind::L1Projective),
            "l2hs" | "l2" => Ok(NormKind::L2HilbertSchmidt),
            other => Err(Error::Parse(format!("unknown norm `{other}`"))),
        }
    }
}

/// A bijection of `{0, .., k-1}`, stored by its images.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    /// Builds a permutation from 1-based images `σ(1), .., σ(k)`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::InvalidPermutation(format!("{images:?}")));
        }
        Self::new(images.iter().map(|i| i - 1).collect())
    }

    pub fn identity(k: usize) -> Self {
        Permutation((0..k).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &s) in self.0.iter().enumerate() {
            inv[s] = i;
        }
        Permutation(inv)
    }
}

/// An element of the truncated tensor algebra over `K^d` up to depth `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedTensor<S> {
    dim: usize,
    depth: usize,
    levels: Vec<Vec<S>>,
}

fn check_shape(dim: usize, depth: usize) -> Result<()> {
    if dim == 0 || depth == 0 {
        return Err(Error::InvalidShape(format!("dimension {dim}, depth {depth}")));
    }
    if (depth as f64) * (dim as f64).log2() > 40.0 {
        return Err(Error::InvalidShape(format!("d^N too large for d = {dim}, N = {depth}")));
    }
    Ok(())
}

/// Outer product of two homogeneous levels: `(a ⊗ b)[uv] = a[u] b[v]`.
pub fn outer<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let mut out = vec![S::zero(); a.len() * b.len()];
    outer_accumulate(&mut out, a, b);
    out
}

fn outer_accumulate<S: Scalar>(out: &mut [S], a: &[S], b: &[S]) {
    let stride = b.len();
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        let row = &mut out[i * stride..(i + 1) * stride];
        for (o, bj) in row.iter_mut().zip(b) {
            if !bj.is_zero() {
                *o += ai.clone() * bj;
            }
        }
    }
}

/// Permutes the index positions of a homogeneous level of `d^k` entries:
/// `out[w] = x[w ∘ σ]`.
pub fn permute_level<S: Scalar>(x: &[S], dim: usize, sigma: &Permutation) -> Vec<S> {
    let k = sigma.len();
    debug_assert_eq!(x.len(), dim.pow(k as u32));
    // Output digit i lands at input position σ^{-1}(i).
    let inv = sigma.inverse();
    let weights: Vec<usize> = (0..k).map(|i| dim.pow((k - 1 - inv.apply(i)) as u32)).collect();
    let mut digits = vec![0usize; k];
    let mut src = 0usize;
    let mut out = Vec::with_capacity(x.len());
    for _ in 0..x.len() {
        out.push(x[src].clone());
        // odometer increment over the output word, least significant last
        for pos in (0..k).rev() {
            digits[pos] += 1;
            src += weights[pos];
            if digits[pos] < dim {
                break;
            }
            digits[pos] = 0;
            src -= weights[pos] * dim;
        }
    }
    out
}

impl<S: Scalar> TruncatedTensor<S> {
    pub fn zero(dim: usize, depth: usize) -> Result<Self> {
        check_shape(dim, depth)?;
        let levels = (0..=depth).map(|k| vec![S::zero(); dim.pow(k as u32)]).collect();
        Ok(TruncatedTensor { dim, depth, levels })
    }

    pub fn unit(dim: usize, depth: usize) -> Result<Self> {
        let mut t = Self::zero(dim, depth)?;
        t.levels[0][0] = S::one();
        Ok(t)
    }

    pub fn from_levels(dim: usize, depth: usize, levels: Vec<Vec<S>>) -> Result<Self> {
        check_shape(dim, depth)?;
        if levels.len() != depth + 1 {
            return Err(Error::InvalidShape(format!("expected {} levels, got {}", depth + 1, levels.len())));
        }
        for (k, level) in levels.iter().enumerate() {
            if level.len() != dim.pow(k as u32) {
                return Err(Error::InvalidShape(format!(
                    "level {k} has {} coefficients, expected {}",
                    level.len(),
                    dim.pow(k as u32)
                )));
            }
        }
        Ok(TruncatedTensor { dim, depth, levels })
    }

    /// The element `(0, v, 0, ..)`.
    pub fn from_vector(depth: usize, v: &[S]) -> Result<Self> {
        Self::homogeneous(v.len(), depth, 1, v.to_vec())
    }

    /// The element that is zero everywhere except `coefficients` on level `k`.
    pub fn homogeneous(dim: usize, depth: usize, k: usize, coefficients: Vec<S>) -> Result<Self> {
        let mut t = Self::zero(dim, depth)?;
        t.set_level(k, coefficients)?;
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn level(&self, k: usize) -> &[S] {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[Vec<S>] {
        &self.levels
    }

    pub fn into_levels(self) -> Vec<Vec<S>> {
        self.levels
    }

    /// Total number of stored coefficients, `(d^(N+1) - 1) / (d - 1)`.
    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn constant(&self) -> &S {
        &self.levels[0][0]
    }

    pub fn set_level(&mut self, k: usize, coefficients: Vec<S>) -> Result<()> {
        self.check_degree(k)?;
        if coefficients.len() != self.levels[k].len() {
            return Err(Error::InvalidShape(format!(
                "level {k} needs {} coefficients, got {}",
                self.levels[k].len(),
                coefficients.len()
            )));
        }
        self.levels[k] = coefficients;
        Ok(())
    }

    /// Coefficient at a word of 0-based letters.
    pub fn coefficient(&self, word: &[usize]) -> &S {
        let offset = word.iter().fold(0, |acc, &w| acc * self.dim + w);
        &self.levels[word.len()][offset]
    }

    pub fn shape(&self) -> String {
        format!("d={}, N={}, {}", self.dim, self.depth, S::KIND.as_str())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.depth != other.depth {
            return Err(Error::ShapeMismatch(self.shape(), other.shape()));
        }
        Ok(())
    }

    fn check_degree(&self, k: usize) -> Result<()> {
        if k > self.depth {
            return Err(Error::DegreeOutOfRange { degree: k, depth: self.depth });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a.clone() + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a.clone() - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        let levels = self
            .levels
            .iter()
            .zip(&other.levels)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
            .collect();
        TruncatedTensor { dim: self.dim, depth: self.depth, levels }
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|x| x.clone() * c)
    }

    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> TruncatedTensor<T> {
        TruncatedTensor {
            dim: self.dim,
            depth: self.depth,
            levels: self.levels.iter().map(|l| l.iter().map(&f).collect()).collect(),
        }
    }

    /// Tensor (concatenation) product truncated at depth `N`:
    /// level `k` of the result is `sum_{p+q=k} a_p ⊗ b_q`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = Self::zero(self.dim, self.depth)?;
        for k in 0..=self.depth {
            let target = &mut out.levels[k];
            for p in 0..=k {
                let a = &self.levels[p];
                let b = &other.levels[k - p];
                if a.iter().all(S::is_zero) || b.iter().all(S::is_zero) {
                    continue;
                }
                outer_accumulate(target, a, b);
            }
        }
        Ok(out)
    }

    /// Truncated exponential `sum_{k<=N} x^k / k!`, evaluated by Horner's
    /// scheme. The series is finite because `x` has no constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant().is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let unit = Self::unit(self.dim, self.depth)?;
        let mut acc = unit.clone();
        for k in (1..=self.depth).rev() {
            let inv_k = S::from_ratio(1, k as i64);
            acc = unit.add(&self.mul(&acc)?.scale(&inv_k))?;
        }
        Ok(acc)
    }

    /// Truncated logarithm `sum_{k=1..N} (-1)^(k+1) (g - 1)^k / k`.
    pub fn log(&self) -> Result<Self> {
        if !self.constant().is_one() {
            return Err(Error::NonUnitConstantTerm);
        }
        let unit = Self::unit(self.dim, self.depth)?;
        let h = self.sub(&unit)?;
        // log(1 + h) = h (1 - h (1/2 - h (1/3 - ...)))
        let mut acc = unit.scale(&S::from_ratio(1, self.depth as i64));
        for k in (1..self.depth).rev() {
            acc = unit.scale(&S::from_ratio(1, k as i64)).sub(&h.mul(&acc)?)?;
        }
        h.mul(&acc)
    }

    /// Applies the index permutation `P^σ` to level `k`, copying every
    /// other level.
    pub fn permute(&self, k: usize, sigma: &Permutation) -> Result<Self> {
        self.check_degree(k)?;
        if sigma.len() != k {
            return Err(Error::InvalidPermutation(format!(
                "permutation of {} elements applied to level {k}",
                sigma.len()
            )));
        }
        let mut out = self.clone();
        out.levels[k] = permute_level(&self.levels[k], self.dim, sigma);
        Ok(out)
    }

    pub fn level_norm(&self, k: usize, kind: NormKind) -> Result<f64> {
        self.check_degree(k)?;
        Ok(kind.apply(&self.levels[k]))
    }

    /// Dilation `δ_λ`: level `k` is scaled by `λ^k`.
    pub fn dilate(&self, lambda: &S) -> Self {
        let mut power = S::one();
        let mut out = self.clone();
        for level in out.levels.iter_mut() {
            if !power.is_one() {
                for c in level.iter_mut() {
                    *c *= &power;
                }
            }
            power *= lambda;
        }
        out
    }

    /// Largest coefficient modulus over levels `1..=N`.
    pub fn max_abs(&self) -> f64 {
        self.levels[1..].iter().flat_map(|l| l.iter().map(Scalar::modulus)).fold(0.0, f64::max)
    }

    /// Largest coefficient-wise modulus of `self - other` over all levels.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .levels
            .iter()
            .zip(&other.levels)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x.clone() - y).modulus()))
            .fold(0.0, f64::max))
    }

    /// Whether every level of degree at least one is exactly zero.
    pub fn is_trivial(&self) -> bool {
        self.levels[1..].iter().all(|l| l.iter().all(S::is_zero))
    }

    /// Projection onto a smaller depth.
    pub fn truncate(&self, depth: usize) -> Result<Self> {
        check_shape(self.dim, depth)?;
        self.check_degree(depth)?;
        Ok(TruncatedTensor { dim: self.dim, depth, levels: self.levels[..=depth].to_vec() })
    }
}

impl TruncatedTensor<Rational> {
    /// Exact `l1` norm of level `k`.
    pub fn level_l1_exact(&self, k: usize) -> Result<Rational> {
        self.check_degree(k)?;
        Ok(self.levels[k].iter().map(RealScalar::abs).fold(Rational::default(), |a, b| a + b))
    }

    pub fn to_f64(&self) -> TruncatedTensor<f64> {
        self.map(RealScalar::to_f64)
    }
}
