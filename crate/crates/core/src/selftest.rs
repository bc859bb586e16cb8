//! Fixed-seed invariant suite behind `pathsig selftest`.
//!
//! Every suite draws from its own generator seeded by `seed + index`, so a
//! suite's verdict does not depend on which other suites ran. Reports carry
//! timings, but [`SelftestReport::verdicts`] strips them for comparisons.

use std::time::Instant;

use num::{One, Zero};
use serde::Serialize;

use crate::asymptotics::{analyze, DECAY_SLACK};
use crate::complexify::{dilation_invariance_check, lie_generator, taylor_norm, DILATION_TOL, TAYLOR_GRID};
use crate::error::Result;
use crate::io::SCHEMA_VERSION;
use crate::path::{riemann_signature, PiecewiseLinearPath};
use crate::sample::{self, SampleRng, DEFAULT_SEED};
use crate::scalar::{factorial_u64, Complex64, Rational};
use crate::semigroup::{extract_pattern, frobenius_number, min_modulus, modulus_report, verify_additive};
use crate::shuffle::group_like_check;
use crate::tensor::{outer, NormKind, TruncatedTensor};

/// Suite names in execution order.
pub const SUITES: [&str; 10] = [
    "chen-oracle",
    "exactness",
    "shuffle",
    "decay",
    "supermultiplicativity",
    "patterns",
    "semigroup",
    "tree-reduction",
    "length",
    "taylor",
];

/// Coordinate range of the random paths checked against the Riemann oracle.
pub const CHEN_SCALE: f64 = 0.5;
/// Mesh of the Riemann oracle.
pub const CHEN_MESH: f64 = 1.0 / 65536.0;
pub const CHEN_TOL: f64 = 1e-5;
pub const SHUFFLE_F64_TOL: f64 = 1e-10;
/// Highest shuffle bidegree `m + n` checked.
pub const SHUFFLE_MAX_ORDER: usize = 6;
pub const TAYLOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelftestConfig {
    pub seed: u64,
    /// Overrides every suite's truncation depth.
    pub depth: Option<usize>,
    /// Overrides the dimension of random paths.
    pub dim: Option<usize>,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { seed: DEFAULT_SEED, depth: None, dim: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub pass: bool,
    pub checks: usize,
    pub detail: String,
    pub millis: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub schema_version: u32,
    pub seed: u64,
    pub depth: Option<usize>,
    pub dim: Option<usize>,
    pub suites: Vec<SuiteResult>,
    pub pass: bool,
    pub millis: u64,
}

impl SelftestReport {
    /// `(name, pass, checks, detail)` per suite, without timings.
    pub fn verdicts(&self) -> Vec<(&'static str, bool, usize, String)> {
        self.suites.iter().map(|s| (s.name, s.pass, s.checks, s.detail.clone())).collect()
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            out.push_str(&format!(
                "{:<4} {:<22} {:>5} checks {:>7} ms  {}\n",
                if s.pass { "PASS" } else { "FAIL" },
                s.name,
                s.checks,
                s.millis,
                s.detail
            ));
        }
        out.push_str(&format!("{} in {} ms\n", if self.pass { "all suites passed" } else { "FAILED" }, self.millis));
        out
    }
}

/// Check counter that keeps the first failure message.
#[derive(Default)]
struct Tally {
    checks: usize,
    failure: Option<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(msg());
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

pub fn run(config: &SelftestConfig) -> SelftestReport {
    let start = Instant::now();
    let suites: Vec<SuiteResult> = SUITES.iter().filter_map(|name| run_suite(name, config)).collect();
    SelftestReport {
        schema_version: SCHEMA_VERSION,
        seed: config.seed,
        depth: config.depth,
        dim: config.dim,
        pass: suites.iter().all(|s| s.pass),
        suites,
        millis: start.elapsed().as_millis() as u64,
    }
}

/// Runs one suite by name; `None` for an unknown name.
pub fn run_suite(name: &str, config: &SelftestConfig) -> Option<SuiteResult> {
    let index = SUITES.iter().position(|s| *s == name)?;
    let mut rng = sample::rng(config.seed.wrapping_add(index as u64));
    let start = Instant::now();
    let mut tally = Tally::default();
    let outcome = match index {
        0 => chen_oracle(config, &mut rng, &mut tally),
        1 => exactness(config, &mut rng, &mut tally),
        2 => shuffle(config, &mut rng, &mut tally),
        3 => decay(config, &mut rng, &mut tally),
        4 => supermultiplicativity(config, &mut rng, &mut tally),
        5 => patterns(config, &mut tally),
        6 => semigroup(config, &mut rng, &mut tally),
        7 => tree_reduction(config, &mut rng, &mut tally),
        8 => length(config, &mut rng, &mut tally),
        _ => taylor(&mut rng, &mut tally),
    };
    let (pass, detail) = match (outcome, tally.failure) {
        (Err(e), _) => (false, format!("error: {e}")),
        (Ok(()), Some(f)) => (false, f),
        (Ok(()), None) => (true, tally.notes.join("; ")),
    };
    Some(SuiteResult {
        name: SUITES[index],
        pass,
        checks: tally.checks,
        detail,
        millis: start.elapsed().as_millis() as u64,
    })
}

fn dim_for(config: &SelftestConfig, i: usize, cycle: usize) -> usize {
    config.dim.unwrap_or(1 + i % cycle)
}

fn chen_oracle(config: &SelftestConfig, rng: &mut SampleRng, t: &mut Tally) -> Result<()> {
    let depth = config.depth.unwrap_or(5);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let path = sample::f64_path(rng, dim_for(config, i, 3), 1 + i % 5, CHEN_SCALE);
        let exact = path.signature(depth)?;
        let approx = riemann_signature(&path, depth, CHEN_MESH)?;
        let dev = exact.max_abs_diff(&approx)?;
        worst = worst.max(dev);
        t.check(dev <= CHEN_TOL, || format!("path {i}: deviation {dev:.3e} > {CHEN_TOL:e}"));
    }
    t.note(format!("max deviation {worst:.3e}"));
    Ok(())
}

/// `v^{⊗k} / k!` built level by level from outer products.
fn exp_oracle(v: &[Rational], depth: usize) -> Vec<Vec<Rational>> {
    let mut power = vec![Rational::one()];
    let mut levels = vec![power.clone()];
    for k in 1..=depth {
        power = outer(&power, v);
        let f = factorial_u64(k);
        levels.push(power.iter().map(|c| c / &f).collect());
    }
    levels
}

fn exactness(config: &SelftestConfig, rng: &mut SampleRng, t: &mut Tally) -> Result<()> {
    let depth = config.depth.unwrap_or(8);
    for i in 0..10 {
        let dim = dim_for(config, i, 3);
        let v: Vec<Rational> = (0..dim).map(|_| sample::rational(rng, 4, 4)).collect();
        let path = PiecewiseLinearPath::from_increments(dim, std::slice::from_ref(&v))?;
        let sig = path.signature(depth)?;
        let exp = TruncatedTensor::from_vector(depth, &v)?.exp()?;
        t.check(sig == exp, || format!("sample {i}: signature differs from exp(v)"));
        t.check(sig.levels() == exp_oracle(&v, depth).as_slice(), || {
            format!("sample {i}: signature differs from v^k/k!")
        });
    }
    Ok(())
}

fn shuffle(config: &SelftestConfig, rng: &mut SampleRng, t: &mut Tally) -> Result<()> {
    let depth = config.depth.unwrap_or(SHUFFLE_MAX_ORDER).min(SHUFFLE_MAX_ORDER);
    let mut worst = 0.0f64;
    for i in 0..10 {
        let path = sample::rational_path(rng, dim_for(config, i, 3), 1 + i % 4);
        let exact = group_like_check(&path.signature(depth)?, 0.0)?;
        t.check(exact.pass, || {
            let p = exact.first_failure(0.0).expect("failing report has a failure");
            format!("path {i}: rational residual at ({}, {})", p.m, p.n)
        });
        let float = group_like_check(&path.to_f64().signature(depth)?, SHUFFLE_F64_TOL)?;
        let w = float.pairs.iter().map(|p| p.residual).fold(0.0, f64::max);
        worst = worst.max(w);
        t.check(float.pass, || format!("path {i}: f64 residual {w:.3e}"));
    }
    t.note(format!("m+n <= {depth}, max f64 residual {worst:.3e}"));
    Ok(())
}

fn decay(config: &SelftestConfig, rng: &mut SampleRng, t: &mut Tally) -> Result<()> {
    let depth = config.depth.unwrap_or(12);
    for i in 0..20 {
        let path = sample::rational_path(rng, dim_for(config, i, 3), 1 + i % 5).to_f64();
        let sig = path.signature(depth)?;
        for kind in NormKind::ALL {
            let l = path.length(kind);
            let report = analyze(&sig, kind, Some(l))?;
            for row in &report.rows {
                let bound = l.powi(row.degree as i32) * (1.0 + DECAY_SLACK);
                t.check(row.b <= bound, || {
                    format!("path {i}, {}, degree {}: {:.6e} > L^n = {:.6e}", kind.as_str(), row.degree, row.b, bound)
                });
            }
        }
    }
    Ok(())
}

fn supermultiplicativity(config: &SelftestConfig, rng: &mut SampleRng, t: &mut Tally) -> Result<()> {
    let depth = config.depth.unwrap_or(10);
    // exact inputs: binary64 signatures lose the high levels to cancellation
    // when the increments nearly cancel
    let mut inputs: Vec<TruncatedTensor<Rational>> = Vec::new();
    for i in 0..10 {
        inputs.push(sample::rational_path(rng, dim_for(config, i, 3), 1 + i % 4).signature(depth)?);
    }
    let lie_dim = config.dim.unwrap_or(2).max(2);
    for degree in [1, 2, 3] {
        inputs.push(sample::lie_polynomial(rng, lie_dim, degree, 2).exp(depth)?);
    }
    for (i, g) in inputs.iter().enumerate() {
        for kind in NormKind::ALL {
            let report = analyze(g, kind, None)?;
            t.check(report.violations.is_empty(), || {
                format!("input {i}, {}: violations {:?}", kind.as_str(), report.violations)
            });
        }
    }
    Ok(())
}

fn patterns(config: &SelftestConfig, t: &mut Tally) -> Result<()> {
    let dim = config.dim.unwrap_or(2).max(2);
    let cases = [("[1,2]", 2usize, config.depth.unwrap_or(8)), ("[1,[1,2]]", 3, config.depth.unwrap_or(9))];
    for (expr, d, depth) in cases {
        let g = lie_generator(expr, dim)?.exp(depth)?;
        for k in 1..=depth {
            let zero = g.level(k).iter().all(Zero::is_zero);
            t.check(zero == (k % d != 0), || format!("exp({expr}): level {k} zero = {zero}"));
        }
        let pattern = extract_pattern(&g, 0.0);
        let report = modulus_report(pattern);
        t.check(report.modulus == Some(d as u64), || format!("exp({expr}): modulus {:?}", report.modulus));
        t.check(report.additive.closed, || format!("exp({expr}): nonzero degrees not additively closed"));
        for kind in NormKind::ALL {
            let r = dilation_invariance_check(&g, d, kind, DILATION_TOL)?;
            let worst = r.degrees.iter().map(|x| x.residual).fold(0.0, f64::max);
            t.check(r.pass && r.agree, || format!("exp({expr}), d={d}, {}: residual {worst:.3e}", kind.as_str()));
            // other moduli must fail, and the pattern verdict must agree
            let other = dilation_invariance_check(&g, d + 1, kind, DILATION_TOL)?;
            t.check(!other.pass && other.agree, || format!("exp({expr}), d={}: unexpected verdict", d + 1));
        }
    }
    Ok(())
}

/// Additive closure of `gens` inside `1..=bound`.
fn closure(gens: &[u64], bound: u64) -> Vec<u64> {
    let mut hit = vec![false; bound as usize + 1];
    hit[0] = true;
    for x in 1..=bound {
        hit[x as usize] = gens.iter().any(|&g| g <= x && hit[(x - g) as usize]);
    }
    (1..=bound).filter(|&x| hit[x as usize]).collect()
}

fn semigroup(config: &SelftestConfig, rng: &mut SampleRng, t: &mut Tally) -> Result<()> {
    let m = min_modulus(&closure(&[6, 10], 60))?;
    t.check(m == Some(2), || format!("<6,10>: modulus {m:?}"));
    let m = min_modulus(&closure(&[3, 5], 60))?;
    t.check(m.is_none(), || format!("<3,5>: modulus {m:?}"));
    let f = frobenius_number(&[3, 5])?;
    let members = closure(&[3, 5], 100);
    let brute = (1..=100).rev().find(|x| !members.contains(x)).unwrap_or(0);
    t.check(f == 7 && f == brute, || format!("<3,5>: frobenius {f}, brute force {brute}"));
    let m = min_modulus(&closure(&[7], 70))?;
    t.check(m == Some(7), || format!("<7>: modulus {m:?}"));

    let depth = config.depth.unwrap_or(10);
    let mut full = 0;
    for i in 0..10 {
        let path = sample::rational_path(rng, config.dim.unwrap_or(2), 1 + i % 4);
        let pattern = extract_pattern(&path.signature(depth)?, 0.0);
        let set: Vec<u64> = pattern.nonzero.iter().map(|&k| k as u64).collect();
        let check = verify_additive(&set, depth as u64);
        if set.len() == depth {
            full += 1;
        }
        t.check(check.closed, || format!("path {i}: counterexample {:?}", check.counterexample));
    }
    t.note(format!("{full}/10 random signatures nonzero in every degree"));
    Ok(())
}

/// Integer vertex list.
type Points<'a> = &'a [&'a [i64]];

fn rpath(points: Points) -> Result<PiecewiseLinearPath<Rational>> {
    PiecewiseLinearPath::new(
        points.iter().map(|p| p.iter().map(|&c| Rational::from_integer(c.into())).collect()).collect(),
    )
}

fn tree_reduction(config: &SelftestConfig, rng: &mut SampleRng, t: &mut Tally) -> Result<()> {
    let depth = config.depth.unwrap_or(6);
    let examples: [(Points, Points); 3] = [
        (&[&[0, 0], &[1, 2], &[0, 0]], &[&[0, 0]]),
        (&[&[0, 0], &[2, 4], &[1, 2]], &[&[0, 0], &[1, 2]]),
        (&[&[0, 0], &[1, 0], &[1, 1], &[1, 0], &[0, 0]], &[&[0, 0]]),
    ];
    for (i, (input, expected)) in examples.into_iter().enumerate() {
        let p = rpath(input)?;
        let reduced = p.tree_reduce();
        t.check(reduced == rpath(expected)?, || format!("example {i}: got {:?}", reduced.vertices()));
        t.check(reduced.signature(depth)? == p.signature(depth)?, || format!("example {i}: signature changed"));
    }
    let out_and_back = rpath(&[&[0, 0], &[1, 2], &[0, 0]])?.signature(config.depth.unwrap_or(8))?;
    t.check(out_and_back.is_trivial(), || "out-and-back signature is not the unit".into());

    for i in 0..5 {
        let p = sample::rational_path(rng, dim_for(config, i, 3), 2 + i % 3);
        let mut back: Vec<Vec<Rational>> = p.vertices().to_vec();
        back.reverse();
        let loop_path = p.concat(&PiecewiseLinearPath::new(back)?)?;
        let reduced = loop_path.tree_reduce();
        t.check(reduced.num_segments() == 0, || format!("retraced path {i}: {} segments left", reduced.num_segments()));
        t.check(loop_path.signature(depth)?.is_trivial(), || format!("retraced path {i}: nontrivial signature"));
        let r = p.tree_reduce();
        t.check(r.signature(depth)? == p.signature(depth)?, || format!("random path {i}: signature changed"));
        t.check(r.tree_reduce() == r, || format!("random path {i}: not idempotent"));
    }
    Ok(())
}

fn length(config: &SelftestConfig, rng: &mut SampleRng, t: &mut Tally) -> Result<()> {
    let depth = config.depth.unwrap_or(8);
    for i in 0..10 {
        let dim = config.dim.unwrap_or(2 + i % 2);
        let path = sample::monotone_staircase(rng, dim, 2 + i % 5);
        let l = path.length_l1_exact();
        let sig = path.signature(depth)?;
        for n in 1..=depth {
            let b = factorial_u64(n) * sig.level_l1_exact(n)?;
            let ln = num::pow(l.clone(), n);
            t.check(b == ln, || format!("staircase {i}, degree {n}: n!|g_n| = {b} but L^n = {ln}"));
        }
    }
    for i in 0..10 {
        let path = sample::rational_path(rng, dim_for(config, i, 3), 1 + i % 5);
        let sig = path.signature(depth)?;
        for kind in NormKind::ALL {
            let l = path.length(kind);
            let mut prev = 0.0f64;
            for n in 1..=depth {
                let s = analyze(&sig.truncate(n)?, kind, Some(l))?.sup.unwrap_or(0.0);
                t.check(s <= l * (1.0 + DECAY_SLACK), || {
                    format!("path {i}, {}, N={n}: S_N {s} > L {l}", kind.as_str())
                });
                t.check(s >= prev, || format!("path {i}, {}, N={n}: S_N decreased", kind.as_str()));
                prev = s;
            }
        }
    }
    Ok(())
}

fn taylor(rng: &mut SampleRng, t: &mut Tally) -> Result<()> {
    use rand::Rng;
    let grids = [4usize, 8, 16, 32, 64, 128, 256, 512, TAYLOR_GRID];
    for i in 0..100 {
        let len = rng.gen_range(1..=27);
        let real: Vec<Complex64> = sample::real_vec(rng, len);
        let z = sample::complex_vec(rng, len);
        let conj: Vec<Complex64> = z.iter().map(Complex64::conj).collect();
        for kind in NormKind::ALL {
            let tn = taylor_norm(&real, kind, TAYLOR_GRID);
            let rn = kind.apply(&real);
            t.check((tn - rn).abs() <= TAYLOR_TOL, || format!("sample {i}, {}: real {tn} vs {rn}", kind.as_str()));
            let (a, b) = (taylor_norm(&z, kind, TAYLOR_GRID), taylor_norm(&conj, kind, TAYLOR_GRID));
            t.check((a - b).abs() <= TAYLOR_TOL, || format!("sample {i}, {}: conjugate {a} vs {b}", kind.as_str()));
            let values: Vec<f64> = grids.iter().map(|&g| taylor_norm(&z, kind, g)).collect();
            let monotone = values.windows(2).all(|w| w[1] >= w[0] - TAYLOR_TOL);
            t.check(monotone, || format!("sample {i}, {}: grid values {values:?}", kind.as_str()));
        }
    }
    Ok(())
}
