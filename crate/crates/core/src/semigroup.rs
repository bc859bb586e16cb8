//! Arithmetic of nonzero-degree sets.
//!
//! For a group-like element the set of degrees with a nonzero component is
//! closed under addition. An additively closed set of positive integers
//! with infinite complement sits inside the multiples of its gcd `d >= 2`;
//! when the gcd is 1 the complement is finite, bounded by the Frobenius
//! number. Every statement here is relative to a finite inspection window.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::TruncatedTensor;

/// Degrees `1..=depth` at which a tensor has a nonzero component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreePattern {
    pub depth: usize,
    pub nonzero: Vec<usize>,
    /// `true` when zero tests were exact (rational coefficients).
    pub exact: bool,
}

impl DegreePattern {
    pub fn contains(&self, degree: usize) -> bool {
        self.nonzero.binary_search(&degree).is_ok()
    }

    /// Degrees in `1..=depth` with a vanishing component.
    pub fn zeros(&self) -> Vec<usize> {
        (1..=self.depth).filter(|k| !self.contains(*k)).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.nonzero.is_empty()
    }

    /// Every nonzero degree is a multiple of `d`.
    pub fn divisible_by(&self, d: usize) -> bool {
        self.nonzero.iter().all(|k| k % d == 0)
    }
}

/// Reads off the nonzero degrees of `g`. Degree `n` counts as nonzero when
/// some coefficient of `g_n` exceeds `tol` in modulus; for exact scalars the
/// test is `!= 0` and `tol` is not consulted.
pub fn extract_pattern<S: Scalar>(g: &TruncatedTensor<S>, tol: f64) -> DegreePattern {
    let exact = S::is_exact();
    let nonzero = (1..=g.depth())
        .filter(|&k| {
            let level = g.level(k);
            if exact {
                level.iter().any(|c| !c.is_zero())
            } else {
                level.iter().any(|c| c.modulus() > tol)
            }
        })
        .collect();
    DegreePattern { depth: g.depth(), nonzero, exact }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Returns `gcd(A)` when it is at least 2 (then `A ⊆ (d)`), and `None` when
/// the gcd is 1.
pub fn min_modulus(set: &[u64]) -> Result<Option<u64>> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let g = set.iter().fold(0, |acc, &x| gcd(acc, x));
    Ok((g >= 2).then_some(g))
}

/// Largest integer not representable as a nonnegative integer combination
/// of `generators`, found by a reachability scan up to `min * max`.
pub fn frobenius_number(generators: &[u64]) -> Result<u64> {
    if generators.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(&bad) = generators.iter().find(|&&g| g < 2) {
        return Err(Error::InvalidGenerator(bad));
    }
    let g = generators.iter().fold(0, |acc, &x| gcd(acc, x));
    if g != 1 {
        return Err(Error::GcdNotOne(g));
    }
    let lo = *generators.iter().min().unwrap();
    let hi = *generators.iter().max().unwrap();
    let bound = lo.checked_mul(hi).filter(|&b| b <= 1_000_000).ok_or(Error::BoundGuard(lo.saturating_mul(hi)))?;
    let reachable = representable_up_to(generators, bound as usize);
    let frobenius = (0..=bound as usize).rev().find(|&i| !reachable[i]).expect("1 is never representable");
    Ok(frobenius as u64)
}

/// `out[i]` is whether `i` is a nonnegative combination of `generators`.
pub fn representable_up_to(generators: &[u64], bound: usize) -> Vec<bool> {
    let mut reachable = vec![false; bound + 1];
    reachable[0] = true;
    for i in 1..=bound {
        reachable[i] = generators.iter().any(|&g| g as usize <= i && reachable[i - g as usize]);
    }
    reachable
}

/// Smallest elements generating `set` under addition (within the set).
pub fn minimal_generators(set: &[u64]) -> Vec<u64> {
    let sorted: BTreeSet<u64> = set.iter().copied().collect();
    let mut gens: Vec<u64> = Vec::new();
    for &x in &sorted {
        let bound = x as usize;
        if gens.is_empty() || !representable_up_to(&gens, bound)[bound] {
            gens.push(x);
        }
    }
    gens
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdditiveCheck {
    pub closed: bool,
    /// Smallest sum `i + j <= bound` of elements that is missing from the set.
    pub counterexample: Option<(u64, u64, u64)>,
}

/// Whether `i + j ∈ A` for all `i, j ∈ A` with `i + j <= bound`.
pub fn verify_additive(set: &[u64], bound: u64) -> AdditiveCheck {
    let members: BTreeSet<u64> = set.iter().copied().collect();
    let mut best: Option<(u64, u64, u64)> = None;
    for &i in &members {
        for &j in members.range(i..) {
            let s = i + j;
            if s > bound {
                break;
            }
            if !members.contains(&s) && best.is_none_or(|(_, _, b)| s < b) {
                best = Some((i, j, s));
            }
        }
    }
    AdditiveCheck { closed: best.is_none(), counterexample: best }
}

/// Summary of the zero structure of a tensor within its window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusReport {
    pub pattern: DegreePattern,
    pub trivial: bool,
    pub additive: AdditiveCheck,
    /// `gcd` of the nonzero degrees when it is at least 2.
    pub modulus: Option<u64>,
    /// Minimal generators of the nonzero set inside the window.
    pub generators: Vec<u64>,
    /// Frobenius number of the generators when their gcd is 1 and all of
    /// them are at least 2.
    pub frobenius: Option<u64>,
}

pub fn modulus_report(pattern: DegreePattern) -> ModulusReport {
    let set: Vec<u64> = pattern.nonzero.iter().map(|&k| k as u64).collect();
    let additive = verify_additive(&set, pattern.depth as u64);
    let modulus = min_modulus(&set).ok().flatten();
    let generators = minimal_generators(&set);
    let frobenius = if !set.is_empty() && modulus.is_none() { frobenius_number(&generators).ok() } else { None };
    ModulusReport { trivial: pattern.is_trivial(), pattern, additive, modulus, generators, frobenius }
}
