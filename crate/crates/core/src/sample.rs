//! Seeded random inputs for property checks and the self-test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complexify::LieElement;
use crate::path::PiecewiseLinearPath;
use crate::scalar::{Rational, Scalar};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_190_417;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random rational in `[-max_num/den, max_num/den]` with `den <= max_den`.
pub fn rational(rng: &mut SampleRng, max_num: i64, max_den: i64) -> Rational {
    Rational::from_ratio(rng.gen_range(-max_num..=max_num), rng.gen_range(1..=max_den))
}

/// Path from the origin with `segments` rational increments whose
/// coordinates lie in `[-1, 1]` with denominators at most 4.
pub fn rational_path(rng: &mut SampleRng, dim: usize, segments: usize) -> PiecewiseLinearPath<Rational> {
    let incs: Vec<Vec<Rational>> =
        (0..segments).map(|_| (0..dim).map(|_| rational(rng, 4, 4).clamp_unit()).collect()).collect();
    PiecewiseLinearPath::from_increments(dim, &incs).expect("dimension is positive")
}

trait ClampUnit {
    fn clamp_unit(self) -> Self;
}

impl ClampUnit for Rational {
    fn clamp_unit(self) -> Self {
        let one = Rational::from_ratio(1, 1);
        if self > one {
            one
        } else if self < -one.clone() {
            -one
        } else {
            self
        }
    }
}

/// Path from the origin with increments uniform in `[-scale, scale]^d`.
pub fn f64_path(rng: &mut SampleRng, dim: usize, segments: usize, scale: f64) -> PiecewiseLinearPath<f64> {
    let incs: Vec<Vec<f64>> =
        (0..segments).map(|_| (0..dim).map(|_| rng.gen_range(-scale..=scale)).collect()).collect();
    PiecewiseLinearPath::from_increments(dim, &incs).expect("dimension is positive")
}

/// Path whose every coordinate is nondecreasing, with rational increments.
pub fn monotone_staircase(rng: &mut SampleRng, dim: usize, segments: usize) -> PiecewiseLinearPath<Rational> {
    let incs: Vec<Vec<Rational>> = (0..segments)
        .map(|s| {
            let axis = s % dim;
            (0..dim)
                .map(|i| {
                    if i == axis {
                        Rational::from_ratio(rng.gen_range(1..=4), rng.gen_range(1..=3))
                    } else {
                        Rational::from_ratio(0, 1)
                    }
                })
                .collect()
        })
        .collect();
    PiecewiseLinearPath::from_increments(dim, &incs).expect("dimension is positive")
}

/// A random nested bracket of basis letters with total degree `degree`.
pub fn lie_bracket(rng: &mut SampleRng, dim: usize, degree: usize) -> LieElement {
    if degree == 1 {
        return LieElement::letter(dim, rng.gen_range(1..=dim)).expect("letter in range");
    }
    let left = rng.gen_range(1..degree);
    let l = lie_bracket(rng, dim, left);
    let r = lie_bracket(rng, dim, degree - left);
    l.bracket(&r).expect("same dimension")
}

/// Random homogeneous Lie polynomial: a rational combination of brackets.
pub fn lie_polynomial(rng: &mut SampleRng, dim: usize, degree: usize, terms: usize) -> LieElement {
    let mut acc = lie_bracket(rng, dim, degree).scale(&rational(rng, 3, 2));
    for _ in 1..terms {
        let term = lie_bracket(rng, dim, degree).scale(&rational(rng, 3, 2));
        acc = acc.add(&term).expect("same degree");
    }
    acc
}

/// Random complex vector with entries in the unit square.
pub fn complex_vec(rng: &mut SampleRng, len: usize) -> Vec<crate::scalar::Complex64> {
    (0..len).map(|_| crate::scalar::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// Random real vector lifted to complex scalars.
pub fn real_vec<S: Scalar>(rng: &mut SampleRng, len: usize) -> Vec<S> {
    (0..len).map(|_| S::from_ratio(rng.gen_range(-1000..=1000), 1000)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_samples_are_reproducible() {
        let a = rational_path(&mut rng(7), 3, 5);
        let b = rational_path(&mut rng(7), 3, 5);
        assert_eq!(a, b);
        assert_eq!(a.num_segments(), 5);
        assert_ne!(a, rational_path(&mut rng(8), 3, 5));
    }

    #[test]
    fn staircases_are_monotone() {
        let p = monotone_staircase(&mut rng(1), 3, 7);
        for inc in p.increments() {
            assert!(inc.iter().all(|c| *c >= Rational::from_ratio(0, 1)));
        }
    }

    #[test]
    fn lie_brackets_have_requested_degree() {
        let mut r = rng(3);
        for degree in 1..6 {
            assert_eq!(lie_polynomial(&mut r, 3, degree, 2).degree(), degree);
        }
    }
}
