//! Normalized norms `b_n = n! ||g_n||` and `a_n = b_n^(1/n)` of a
//! group-like element, with the running supremum and the
//! supermultiplicativity `b_{i+j} >= b_i b_j` that drives the limit
//! theorem for signatures. Only finite-depth traces are reported.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::path::PiecewiseLinearPath;
use crate::scalar::{factorial_f64, factorial_u64, rational_to_string, Rational, RealScalar, Scalar, ScalarKind};
use crate::tensor::{NormKind, TruncatedTensor};

/// Relative slack for the supermultiplicativity test.
pub const SUPERMULT_SLACK: f64 = 1e-9;
/// Relative slack for `sup a_n <= L`.
pub const DECAY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeRow {
    pub degree: usize,
    /// `n! ||g_n||`.
    pub b: f64,
    /// Exact `b_n` as `"p/q"` (rational coefficients, `l1` norm only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_exact: Option<String>,
    /// `b_n^(1/n)`, absent when `g_n = 0`.
    pub a: Option<f64>,
    /// `max_{k <= n, g_k != 0} a_k`.
    pub running_sup: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticsReport {
    pub depth: usize,
    pub norm: NormKind,
    pub scalar: ScalarKind,
    pub rows: Vec<DegreeRow>,
    pub nonzero_degrees: Vec<usize>,
    /// `S_N`, absent when the element is trivial to depth `N`.
    pub sup: Option<f64>,
    /// Pairs `(i, j)`, `i <= j`, with `b_{i+j} < b_i b_j (1 - 1e-9)`.
    pub violations: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    /// `S_N <= L (1 + 1e-12)`, when a length was supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_ok: Option<bool>,
}

impl AsymptoticsReport {
    pub fn a_values(&self) -> Vec<(usize, f64)> {
        self.rows.iter().filter_map(|r| r.a.map(|a| (r.degree, a))).collect()
    }

    /// Renders an aligned text table.
    pub fn table(&self) -> String {
        let mut out = format!(
            "depth {}  norm {}  scalar {}\n{:>4}  {:>24}  {:>20}  {:>20}\n",
            self.depth,
            self.norm.as_str(),
            self.scalar.as_str(),
            "n",
            "b_n = n!|g_n|",
            "a_n = b_n^(1/n)",
            "sup_{k<=n} a_k"
        );
        let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.15}"));
        for r in &self.rows {
            out += &format!("{:>4}  {:>24.15e}  {:>20}  {:>20}\n", r.degree, r.b, fmt(r.a), fmt(r.running_sup));
        }
        match (self.sup, self.length) {
            (None, _) => out += "signature trivial to this depth\n",
            (Some(s), Some(l)) => out += &format!("S_N = {s:.15}  L = {l:.15}  S_N/L = {:.15}\n", s / l),
            (Some(s), None) => out += &format!("S_N = {s:.15}\n"),
        }
        out += &format!("supermultiplicativity violations: {}\n", self.violations.len());
        out
    }
}

/// `n! ||g_n||` in binary64, and exactly for rational `l1` input.
pub fn normalized_level_norm<S: Scalar>(
    g: &TruncatedTensor<S>,
    n: usize,
    kind: NormKind,
) -> Result<(f64, Option<Rational>)> {
    if n > g.depth() {
        return Err(Error::DegreeOutOfRange { degree: n, depth: g.depth() });
    }
    let level = g.level(n);
    if S::is_exact() {
        let exact: Vec<&Rational> = level.iter().filter_map(Scalar::as_rational).collect();
        let fact = factorial_u64(n);
        return Ok(match kind {
            NormKind::L1Projective => {
                let sum = exact.iter().map(|c| c.abs()).fold(Rational::default(), |a, b| a + b);
                let b = sum * fact;
                (RealScalar::to_f64(&b), Some(b))
            }
            NormKind::L2HilbertSchmidt => {
                let sq = exact.iter().map(|&c| c * c).fold(Rational::default(), |a, b| a + b);
                let b_sq = sq * &fact * &fact;
                (RealScalar::to_f64(&b_sq).sqrt(), None)
            }
        });
    }
    Ok((factorial_f64(n) * kind.apply(level), None))
}

/// Builds the report for `g`, optionally comparing with a path length.
pub fn analyze<S: Scalar>(g: &TruncatedTensor<S>, kind: NormKind, length: Option<f64>) -> Result<AsymptoticsReport> {
    if !g.constant().is_one() {
        return Err(Error::NonUnitConstantTerm);
    }
    let depth = g.depth();
    let mut b = Vec::with_capacity(depth + 1);
    b.push(1.0);
    let mut rows = Vec::with_capacity(depth);
    let mut nonzero_degrees = Vec::new();
    let mut sup: Option<f64> = None;
    for n in 1..=depth {
        let (bn, exact) = normalized_level_norm(g, n, kind)?;
        let is_zero = g.level(n).iter().all(S::is_zero);
        let a = if is_zero {
            None
        } else {
            nonzero_degrees.push(n);
            Some(bn.powf(1.0 / n as f64))
        };
        if let Some(a) = a {
            sup = Some(sup.map_or(a, |s: f64| s.max(a)));
        }
        b.push(bn);
        rows.push(DegreeRow { degree: n, b: bn, b_exact: exact.as_ref().map(rational_to_string), a, running_sup: sup });
    }
    let mut violations = Vec::new();
    for i in 1..=depth {
        for j in i..=depth - i {
            if b[i + j] < b[i] * b[j] * (1.0 - SUPERMULT_SLACK) {
                violations.push((i, j));
            }
        }
    }
    let ratio = match (sup, length) {
        (Some(s), Some(l)) if l > 0.0 => Some(s / l),
        _ => None,
    };
    let decay_ok = length.map(|l| sup.is_none_or(|s| s <= l * (1.0 + DECAY_SLACK)));
    Ok(AsymptoticsReport {
        depth,
        norm: kind,
        scalar: S::KIND,
        rows,
        nonzero_degrees,
        sup,
        violations,
        length,
        ratio,
        decay_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthEstimate {
    /// `S_N`, absent when the signature is trivial to depth `N`.
    pub sup: Option<f64>,
    pub length: f64,
    pub ratio: Option<f64>,
}

impl LengthEstimate {
    pub fn is_trivial(&self) -> bool {
        self.sup.is_none()
    }
}

/// Compares `S_N = max_{n <= N} (n! ||g_n||)^(1/n)` with the path length in
/// the matching base norm.
pub fn length_estimate<S: RealScalar>(
    path: &PiecewiseLinearPath<S>,
    kind: NormKind,
    depth: usize,
) -> Result<LengthEstimate> {
    let sig = path.signature(depth)?;
    let length = path.length(kind);
    let report = analyze(&sig, kind, Some(length))?;
    Ok(LengthEstimate { sup: report.sup, length, ratio: report.ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexify::lie_generator;
    use num::Zero;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn rpath(points: &[&[i64]]) -> PiecewiseLinearPath<Rational> {
        PiecewiseLinearPath::new(points.iter().map(|p| p.iter().map(|&c| q(c, 1)).collect()).collect()).unwrap()
    }

    #[test]
    fn exp_of_a_line_has_constant_a() {
        let v = [3.0, -4.0];
        let g = TruncatedTensor::from_vector(7, &v).unwrap().exp().unwrap();
        for kind in NormKind::ALL {
            let l = kind.vector_norm(&v);
            let r = analyze(&g, kind, Some(l)).unwrap();
            for (_, a) in r.a_values() {
                assert!((a - l).abs() <= 1e-12 * l);
            }
            assert!((r.sup.unwrap() - l).abs() <= 1e-12 * l);
            assert!(r.violations.is_empty());
            assert_eq!(r.decay_ok, Some(true));
        }
    }

    #[test]
    fn staircase_is_exact_under_l1() {
        let p = rpath(&[&[0, 0], &[1, 0], &[1, 1]]);
        let g = p.signature(8).unwrap();
        // monotone path: every coefficient is nonnegative
        assert!((1..=8).all(|k| g.level(k).iter().all(|c| *c >= Rational::zero())));
        let r = analyze(&g, NormKind::L1Projective, Some(2.0)).unwrap();
        for (n, row) in r.rows.iter().enumerate() {
            let expected = rational_to_string(&q(2i64.pow(n as u32 + 1), 1));
            assert_eq!(row.b_exact.as_deref(), Some(expected.as_str()));
            assert_eq!(row.a, Some(2.0));
        }
        assert_eq!(r.sup, Some(2.0));
        assert_eq!(r.ratio, Some(1.0));
    }

    #[test]
    fn area_generator_has_even_support() {
        let l = lie_generator("[1,2]", 2).unwrap();
        let g = l.to_tensor(8).unwrap().exp().unwrap();
        let r = analyze(&g, NormKind::L1Projective, None).unwrap();
        assert_eq!(r.nonzero_degrees, vec![2, 4, 6, 8]);
        assert!(r.rows.iter().all(|row| row.a.is_some() == (row.degree % 2 == 0)));
        assert!(r.violations.is_empty());
    }

    #[test]
    fn single_segment_ratio_is_one() {
        let p = rpath(&[&[0, 0, 0], &[1, -2, 2]]);
        for kind in NormKind::ALL {
            for n in 1..=6 {
                let est = length_estimate(&p, kind, n).unwrap();
                assert!((est.ratio.unwrap() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn out_and_back_is_trivial() {
        let p = rpath(&[&[0, 0], &[1, 3], &[0, 0]]);
        let est = length_estimate(&p, NormKind::L2HilbertSchmidt, 6).unwrap();
        assert!(est.is_trivial());
        assert_eq!(est.ratio, None);
        assert!(analyze(&p.signature(6).unwrap(), NormKind::L1Projective, None).unwrap().table().contains("trivial"));
    }

    #[test]
    fn l_shape_under_hilbert_schmidt() {
        let p = rpath(&[&[0, 0], &[1, 0], &[1, 1]]);
        let g = p.signature(12).unwrap();
        let r = analyze(&g, NormKind::L2HilbertSchmidt, Some(2.0)).unwrap();
        let s12 = r.sup.unwrap();
        let s2 = r.rows[1].running_sup.unwrap();
        assert!(s12 <= 2.0 && s12 >= s2);
        // g_n = sum_k e1^k e2^(n-k) / (k! (n-k)!), so (n! |g_n|)^2 = sum_k C(n,k)^2
        let oracle = (1..=12)
            .map(|n: i32| {
                let mut c = 1.0f64;
                let mut sq = 0.0;
                for k in 0..=n {
                    sq += c * c;
                    c = c * f64::from(n - k) / f64::from(k + 1);
                }
                sq.sqrt().powf(1.0 / f64::from(n))
            })
            .fold(0.0, f64::max);
        assert!((s12 - oracle).abs() <= 1e-12, "{s12:.17} vs {oracle:.17}");
    }

    #[test]
    fn detects_violations_on_non_group_like_input() {
        let mut g = TruncatedTensor::from_vector(4, &[1.0, 1.0]).unwrap().exp().unwrap();
        g.set_level(2, vec![0.0; 4]).unwrap();
        let r = analyze(&g, NormKind::L1Projective, None).unwrap();
        assert!(r.violations.contains(&(1, 1)));
    }
}
