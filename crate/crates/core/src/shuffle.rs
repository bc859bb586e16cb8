//! Shuffles and the shuffle product formula for group-like elements.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{outer, permute_level, Permutation, TruncatedTensor};

/// Largest `m + n` accepted by [`enumerate_shuffles`].
pub const MAX_SHUFFLE_ORDER: usize = 12;

/// All `(m, n)`-shuffles: permutations `σ` of `{1..m+n}` whose one-line
/// word `σ(1) .. σ(m+n)` interleaves `1..m` and `m+1..m+n`, each block
/// keeping its relative order.
///
/// With `P^σ x [w] = x[w ∘ σ]` this makes `sum_σ P^σ g_{m+n}` the shuffle
/// of the first `m` letters of `w` with the last `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShuffleSet {
    pub m: usize,
    pub n: usize,
    permutations: Vec<Permutation>,
}

impl ShuffleSet {
    pub fn permutations(&self) -> &[Permutation] {
        &self.permutations
    }

    pub fn len(&self) -> usize {
        self.permutations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutations.is_empty()
    }
}

type ShuffleCache = Mutex<HashMap<(usize, usize), Arc<ShuffleSet>>>;

fn shuffle_cache() -> &'static ShuffleCache {
    static CACHE: OnceLock<ShuffleCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Enumerates the `(m, n)`-shuffles by choosing the positions that carry the
/// first block, in lexicographic order of those position sets. Results are
/// memoized.
pub fn enumerate_shuffles(m: usize, n: usize) -> Result<Arc<ShuffleSet>> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidShape(format!("shuffle orders must be positive, got ({m}, {n})")));
    }
    if m + n > MAX_SHUFFLE_ORDER {
        return Err(Error::ShuffleGuard(m + n, MAX_SHUFFLE_ORDER));
    }
    let mut cache = shuffle_cache().lock().expect("shuffle cache poisoned");
    if let Some(set) = cache.get(&(m, n)) {
        return Ok(Arc::clone(set));
    }
    let total = m + n;
    let mut permutations = Vec::new();
    let mut positions = Vec::with_capacity(m);
    choose_positions(total, m, 0, &mut positions, &mut |chosen| {
        let mut images = Vec::with_capacity(total);
        let (mut first, mut second) = (0, m);
        let mut next_chosen = chosen.iter().peekable();
        for pos in 0..total {
            if next_chosen.peek() == Some(&&pos) {
                next_chosen.next();
                images.push(first);
                first += 1;
            } else {
                images.push(second);
                second += 1;
            }
        }
        permutations.push(Permutation::new(images).expect("interleaving is a bijection"));
    });
    let set = Arc::new(ShuffleSet { m, n, permutations });
    cache.insert((m, n), Arc::clone(&set));
    Ok(set)
}

fn choose_positions(total: usize, k: usize, start: usize, acc: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    if acc.len() == k {
        emit(acc);
        return;
    }
    let remaining = k - acc.len();
    for pos in start..=total - remaining {
        acc.push(pos);
        choose_positions(total, k, pos + 1, acc, emit);
        acc.pop();
    }
}

/// `sum_{σ ∈ S(m,n)} P^σ(g_{m+n})`, a level-`(m+n)` coefficient vector.
pub fn shuffle_project<S: Scalar>(g: &TruncatedTensor<S>, m: usize, n: usize) -> Result<Vec<S>> {
    if m + n > g.depth() {
        return Err(Error::DegreeOutOfRange { degree: m + n, depth: g.depth() });
    }
    let set = enumerate_shuffles(m, n)?;
    let level = g.level(m + n);
    let mut acc = vec![S::zero(); level.len()];
    for sigma in set.permutations() {
        for (a, p) in acc.iter_mut().zip(permute_level(level, g.dim(), sigma)) {
            *a += p;
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairResidual {
    pub m: usize,
    pub n: usize,
    pub residual: f64,
}

/// Residuals of the shuffle product formula for every `m, n >= 1` with
/// `m + n <= N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupLikeReport {
    pub pairs: Vec<PairResidual>,
    pub pass: bool,
}

impl GroupLikeReport {
    pub fn first_failure(&self, tol: f64) -> Option<&PairResidual> {
        self.pairs.iter().find(|p| p.residual > tol)
    }
}

/// Checks `g_m ⊗ g_n = sum_σ P^σ(g_{m+n})` using the max-abs coefficient
/// residual. For exact scalars the tolerance is ignored and every residual
/// must vanish identically.
pub fn group_like_check<S: Scalar>(g: &TruncatedTensor<S>, tol: f64) -> Result<GroupLikeReport> {
    if !g.constant().is_one() {
        return Err(Error::NonUnitConstantTerm);
    }
    let mut pairs = Vec::new();
    let mut pass = true;
    for total in 2..=g.depth() {
        for m in 1..total {
            let n = total - m;
            let lhs = outer(g.level(m), g.level(n));
            let rhs = shuffle_project(g, m, n)?;
            let mut exact_zero = true;
            let mut residual = 0.0f64;
            for (a, b) in lhs.into_iter().zip(rhs) {
                let d = a - b;
                if !d.is_zero() {
                    exact_zero = false;
                    residual = residual.max(d.modulus());
                }
            }
            if S::is_exact() {
                if !exact_zero {
                    residual = residual.max(f64::MIN_POSITIVE);
                    pass = false;
                }
            } else if residual > tol || residual.is_nan() {
                pass = false;
            }
            pairs.push(PairResidual { m, n, residual });
        }
    }
    Ok(GroupLikeReport { pairs, pass })
}
