//! Complexification, the Taylor complexification norm, dilation invariance
//! and group-like generators `exp(l)` built from homogeneous Lie
//! polynomials.
//!
//! Rotating a path by `λ` multiplies its complex signature levelwise by
//! `λ^k`, so invariance under a `d`-th root of unity is checked through
//! the dilation `δ_λ` of the complexified signature.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, rational_to_string, Complex64, Rational, Scalar};
use crate::semigroup::{extract_pattern, DegreePattern};
use crate::tensor::{outer, NormKind, TruncatedTensor};

/// Default tolerance for dilation residuals.
pub const DILATION_TOL: f64 = 1e-12;
/// Default grid resolution for the `l1` Taylor norm.
pub const TAYLOR_GRID: usize = 1024;

/// Canonical embedding of a real tensor into the complexified algebra.
pub fn complexify<S: Scalar>(x: &TruncatedTensor<S>) -> TruncatedTensor<Complex64> {
    x.map(Scalar::to_c64)
}

/// Splits a complex level into real and imaginary parts.
fn split(z: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    z.iter().map(|c| (c.re, c.im)).unzip()
}

/// `||x cos t - y sin t||` for `z = x + iy`.
pub fn rotated_norm(z: &[Complex64], kind: NormKind, t: f64) -> f64 {
    let (c, s) = (t.cos(), t.sin());
    let rotated: Vec<f64> = z.iter().map(|w| w.re * c - w.im * s).collect();
    kind.apply(&rotated)
}

/// Taylor complexification norm `sup_{t in [0, 2π]} ||x cos t - y sin t||`.
///
/// For `L2HilbertSchmidt` the squared objective is
/// `α cos²t + β sin²t - γ sin 2t` and the supremum is taken in closed form;
/// `grid` is ignored. For `L1Projective` the objective is sampled on `grid`
/// equispaced points and hill-climbed from each of them: on the sign-stable
/// piece around `t` the objective equals a sinusoid `A cos t - B sin t`,
/// whose peak is the next iterate. Nested grids therefore never decrease.
pub fn taylor_norm(z: &[Complex64], kind: NormKind, grid: usize) -> f64 {
    match kind {
        NormKind::L2HilbertSchmidt => {
            let (x, y) = split(z);
            let alpha: f64 = x.iter().map(|v| v * v).sum();
            let beta: f64 = y.iter().map(|v| v * v).sum();
            let gamma: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            let mid = 0.5 * (alpha + beta);
            let half_diff = 0.5 * (alpha - beta);
            (mid + half_diff.hypot(gamma)).max(0.0).sqrt()
        }
        NormKind::L1Projective => l1_taylor_grid(z, grid.max(4)),
    }
}

fn l1_taylor_grid(z: &[Complex64], grid: usize) -> f64 {
    let f = |t: f64| rotated_norm(z, NormKind::L1Projective, t);
    let mut best = 0.0f64;
    for j in 0..grid {
        let mut t = 2.0 * PI * j as f64 / grid as f64;
        let mut value = f(t);
        best = best.max(value);
        for _ in 0..8 {
            let (c, s) = (t.cos(), t.sin());
            let (mut a, mut b) = (0.0, 0.0);
            for w in z {
                let sign = if w.re * c - w.im * s >= 0.0 { 1.0 } else { -1.0 };
                a += sign * w.re;
                b += sign * w.im;
            }
            // A cos t - B sin t peaks at t = -atan2(B, A), and the objective
            // dominates every such signed sum, so each step is an ascent
            let peak = -b.atan2(a);
            let next = f(peak);
            best = best.max(next);
            if next <= value {
                break;
            }
            (t, value) = (peak, next);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeResidual {
    pub degree: usize,
    /// `||(δ_λ j(g) - j(g))_k|| = |λ^k - 1| ||g_k||`.
    pub residual: f64,
    pub multiple: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DilationReport {
    pub modulus: usize,
    /// `λ = e^{2πi/d}` as `[re, im]`.
    pub lambda: [f64; 2],
    pub norm: NormKind,
    pub tol: f64,
    pub degrees: Vec<DegreeResidual>,
    /// Every residual is within `tol`.
    pub pass: bool,
    /// Verdict of the divisibility test on the nonzero degrees.
    pub pattern_pass: bool,
    pub pattern: DegreePattern,
    pub agree: bool,
}

/// Primitive `d`-th root of unity, exact for `d` in `{1, 2, 4}`.
pub fn root_of_unity(d: usize) -> Complex64 {
    match d {
        1 => Complex64::new(1.0, 0.0),
        2 => Complex64::new(-1.0, 0.0),
        4 => Complex64::new(0.0, 1.0),
        _ => Complex64::from_polar(1.0, 2.0 * PI / d as f64),
    }
}

/// Checks `δ_λ(j(g)) = j(g)` for `λ = e^{2πi/d}` degree by degree, and
/// independently whether all nonzero degrees of `g` are multiples of `d`.
pub fn dilation_invariance_check<S: Scalar>(
    g: &TruncatedTensor<S>,
    modulus: usize,
    kind: NormKind,
    tol: f64,
) -> Result<DilationReport> {
    if !g.constant().is_one() {
        return Err(Error::NonUnitConstantTerm);
    }
    if modulus < 2 {
        return Err(Error::InvalidShape(format!("dilation modulus must be at least 2, got {modulus}")));
    }
    let lambda = root_of_unity(modulus);
    let z = complexify(g);
    let diff = z.dilate(&lambda).sub(&z)?;
    let degrees: Vec<DegreeResidual> = (1..=g.depth())
        .map(|k| DegreeResidual { degree: k, residual: kind.apply(diff.level(k)), multiple: k % modulus == 0 })
        .collect();
    let pass = degrees.iter().all(|r| r.residual <= tol);
    let pattern = extract_pattern(g, tol);
    let pattern_pass = pattern.divisible_by(modulus);
    Ok(DilationReport {
        modulus,
        lambda: [lambda.re, lambda.im],
        norm: kind,
        tol,
        degrees,
        pass,
        pattern_pass,
        agree: pass == pattern_pass,
        pattern,
    })
}

/// A homogeneous element of the free Lie algebra, stored as its tensor
/// coefficients on level `degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieElement {
    dim: usize,
    degree: usize,
    coefficients: Vec<Rational>,
}

impl LieElement {
    /// The basis letter `e_letter`, 1-based.
    pub fn letter(dim: usize, letter: usize) -> Result<Self> {
        if letter == 0 || letter > dim {
            return Err(Error::Bracket { pos: 0, msg: format!("letter {letter} outside 1..={dim}") });
        }
        let mut coefficients = vec![Rational::default(); dim];
        coefficients[letter - 1] = Rational::from_ratio(1, 1);
        Ok(LieElement { dim, degree: 1, coefficients })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(num::Zero::is_zero)
    }

    /// `[x, y] = x ⊗ y - y ⊗ x`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { index: 0, expected: self.dim, found: other.dim });
        }
        let xy = outer(&self.coefficients, &other.coefficients);
        let yx = outer(&other.coefficients, &self.coefficients);
        Ok(LieElement {
            dim: self.dim,
            degree: self.degree + other.degree,
            coefficients: xy.into_iter().zip(yx).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        LieElement {
            dim: self.dim,
            degree: self.degree,
            coefficients: self.coefficients.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(Error::ShapeMismatch(
                format!("d={}, degree {}", self.dim, self.degree),
                format!("d={}, degree {}", other.dim, other.degree),
            ));
        }
        Ok(LieElement {
            dim: self.dim,
            degree: self.degree,
            coefficients: self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a + b).collect(),
        })
    }

    /// Embeds the element in `T^(depth)` as a homogeneous tensor.
    pub fn to_tensor(&self, depth: usize) -> Result<TruncatedTensor<Rational>> {
        if self.degree > depth {
            return Err(Error::DegreeOutOfRange { degree: self.degree, depth });
        }
        TruncatedTensor::homogeneous(self.dim, depth, self.degree, self.coefficients.clone())
    }

    /// The group-like element `exp(l)` truncated at `depth`.
    pub fn exp(&self, depth: usize) -> Result<TruncatedTensor<Rational>> {
        self.to_tensor(depth)?.exp()
    }

    /// Nonzero coefficients keyed by their 1-based words, for display.
    pub fn terms(&self) -> Vec<(Vec<usize>, String)> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !num::Zero::is_zero(*c))
            .map(|(mut idx, c)| {
                let mut word = vec![0; self.degree];
                for slot in word.iter_mut().rev() {
                    *slot = idx % self.dim + 1;
                    idx /= self.dim;
                }
                (word, rational_to_string(c))
            })
            .collect()
    }
}

/// Parses a bracket expression over the letters `1..=dim`.
///
/// ```text
/// expr   ::= number "*" expr | letter | "[" expr "," expr "]"
/// letter ::= positive integer
/// number ::= rational, e.g. 3, -1/2, 0.25
/// ```
pub fn lie_generator(expr: &str, dim: usize) -> Result<LieElement> {
    let mut parser = BracketParser { src: expr.as_bytes(), pos: 0, dim };
    let l = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(l)
}

struct BracketParser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl BracketParser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Bracket { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, byte: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", byte as char)))
        }
    }

    fn expr(&mut self) -> Result<LieElement> {
        self.skip_ws();
        match self.src.get(self.pos) {
            Some(b'[') => {
                self.pos += 1;
                let left = self.expr()?;
                self.expect(b',')?;
                let right = self.expr()?;
                self.expect(b']')?;
                left.bracket(&right)
            }
            Some(c) if c.is_ascii_digit() || *c == b'-' || *c == b'+' || *c == b'.' => {
                let start = self.pos;
                let token = self.number()?;
                self.skip_ws();
                if self.src.get(self.pos) == Some(&b'*') {
                    self.pos += 1;
                    let k = parse_rational(&token)
                        .ok_or(Error::Bracket { pos: start, msg: format!("bad coefficient `{token}`") })?;
                    return Ok(self.expr()?.scale(&k));
                }
                let letter: usize =
                    token.parse().map_err(|_| Error::Bracket { pos: start, msg: format!("bad letter `{token}`") })?;
                LieElement::letter(self.dim, letter).map_err(|_| Error::Bracket {
                    pos: start,
                    msg: format!("letter {letter} outside 1..={}", self.dim),
                })
            }
            Some(_) => Err(self.error("expected a letter, coefficient or `[`")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<String> {
        let start = self.pos;
        while let Some(&c) = self.src.get(self.pos) {
            if c.is_ascii_digit() || matches!(c, b'-' | b'+' | b'.' | b'/') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }
}
