//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.
//!
//! Oracles here are written independently of the library: Kronecker powers
//! for exp, brute-force permutation filtering for shuffles, brute-force
//! additive closures, and exact rational sums for norms.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num::{One, Signed, Zero};
use pathsig::complexify::{dilation_invariance_check, lie_generator, taylor_norm, TAYLOR_GRID};
use pathsig::sample::{self, SampleRng};
use pathsig::selftest::{self, SelftestConfig};
use pathsig::semigroup::{frobenius_number, min_modulus, verify_additive};
use pathsig::{
    group_like_check, riemann_signature, Complex64, NormKind, PiecewiseLinearPath, Rational, TruncatedTensor,
};

const SEED: u64 = 7_331;

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn fact(n: usize) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * q(k, 1))
}

fn kron(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

fn l1_exact(level: &[Rational]) -> Rational {
    level.iter().fold(Rational::zero(), |acc, c| acc + c.abs())
}

fn l2_squared_exact(level: &[Rational]) -> Rational {
    level.iter().fold(Rational::zero(), |acc, c| acc + c * c)
}

fn to_f64(x: &Rational) -> f64 {
    use num::ToPrimitive;
    x.to_f64().expect("finite")
}

/// `n! ||g_n||` from exact sums.
fn b_value(g: &TruncatedTensor<Rational>, n: usize, kind: NormKind) -> f64 {
    let level = g.level(n);
    let f = to_f64(&fact(n));
    match kind {
        NormKind::L1Projective => to_f64(&(fact(n) * l1_exact(level))),
        NormKind::L2HilbertSchmidt => f * to_f64(&l2_squared_exact(level)).sqrt(),
    }
}

/// Integer vertex list.
type Points<'a> = &'a [&'a [i64]];

fn rpath(points: Points) -> PiecewiseLinearPath<Rational> {
    PiecewiseLinearPath::new(points.iter().map(|p| p.iter().map(|&c| q(c, 1)).collect()).collect()).unwrap()
}

fn crit1_chen_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = sample::rng(SEED);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let p = sample::f64_path(&mut rng, 1 + i % 3, 1 + i % 5, selftest::CHEN_SCALE);
        let dev = p.signature(5).unwrap().max_abs_diff(&riemann_signature(&p, 5, 2f64.powi(-16)).unwrap()).unwrap();
        worst = worst.max(dev);
        ensure(dev <= 1e-5, || format!("path {i}: deviation {dev:.3e}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed <= Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!("max deviation {worst:.3e} in {:.1} s", elapsed.as_secs_f64()))
}

fn crit2_exactness() -> Outcome {
    let mut rng = sample::rng(SEED + 1);
    for i in 0..10 {
        let dim = 1 + i % 3;
        let v: Vec<Rational> = (0..dim).map(|_| sample::rational(&mut rng, 5, 7)).collect();
        let sig = PiecewiseLinearPath::from_increments(dim, std::slice::from_ref(&v)).unwrap().signature(8).unwrap();
        let mut power = vec![Rational::one()];
        for n in 1..=8 {
            power = kron(&power, &v);
            let expected: Vec<Rational> = power.iter().map(|c| c / fact(n)).collect();
            ensure(sig.level(n) == expected.as_slice(), || format!("sample {i}, level {n} differs"))?;
        }
    }
    Ok("10 segments, levels 1..8 identical".into())
}

/// Shuffles of `(m, n)` found by filtering all permutations of `m + n`:
/// one-line words in which `1..m` and `m+1..m+n` both appear in order.
fn brute_shuffles(m: usize, n: usize) -> Vec<Vec<usize>> {
    fn perms(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(k - 1) {
            for pos in 0..=p.len() {
                let mut r = p.clone();
                r.insert(pos, k - 1);
                out.push(r);
            }
        }
        out
    }
    perms(m + n)
        .into_iter()
        .filter(|p| {
            let first: Vec<usize> = p.iter().copied().filter(|&x| x < m).collect();
            let second: Vec<usize> = p.iter().copied().filter(|&x| x >= m).collect();
            first.windows(2).all(|w| w[0] < w[1]) && second.windows(2).all(|w| w[0] < w[1])
        })
        .collect()
}

/// Max over words of `|g_m ⊗ g_n - Σ_σ P^σ g_{m+n}|` with `(P^σ x)[w] = x[w∘σ]`.
fn brute_residual(g: &TruncatedTensor<f64>, m: usize, n: usize, shuffles: &[Vec<usize>]) -> f64 {
    let d = g.dim();
    let k = m + n;
    let index = |w: &[usize]| w.iter().fold(0, |acc, &c| acc * d + c);
    let mut worst = 0.0f64;
    let mut word = vec![0usize; k];
    for flat in 0..d.pow(k as u32) {
        let mut r = flat;
        for slot in word.iter_mut().rev() {
            *slot = r % d;
            r /= d;
        }
        let lhs = g.level(m)[index(&word[..m])] * g.level(n)[index(&word[m..])];
        let rhs: f64 = shuffles
            .iter()
            .map(|s| {
                let permuted: Vec<usize> = s.iter().map(|&j| word[j]).collect();
                g.level(k)[index(&permuted)]
            })
            .sum();
        worst = worst.max((lhs - rhs).abs());
    }
    worst
}

fn crit3_shuffle() -> Outcome {
    let mut rng = sample::rng(SEED + 2);
    let mut worst = 0.0f64;
    for i in 0..10 {
        let p = sample::rational_path(&mut rng, 1 + i % 3, 1 + i % 4);
        let exact = p.signature(6).unwrap();
        let report = group_like_check(&exact, 0.0).unwrap();
        ensure(report.pass && report.pairs.iter().all(|r| r.residual == 0.0), || {
            format!("path {i}: nonzero rational residual")
        })?;
        let float = p.to_f64().signature(6).unwrap();
        let report = group_like_check(&float, 1e-10).unwrap();
        ensure(report.pass, || format!("path {i}: f64 residual above 1e-10"))?;
        let exact_f = exact.to_f64();
        for m in 1..6 {
            for n in 1..=6 - m {
                let shuffles = brute_shuffles(m, n);
                let r = brute_residual(&float, m, n, &shuffles);
                worst = worst.max(r);
                ensure(r <= 1e-10, || format!("path {i}, ({m},{n}): brute-force f64 residual {r:.3e}"))?;
                let r = brute_residual(&exact_f, m, n, &shuffles);
                ensure(r <= 1e-12, || format!("path {i}, ({m},{n}): brute-force residual of exact signature {r:.3e}"))?;
            }
        }
    }
    Ok(format!("rational residuals 0, max f64 residual {worst:.3e}"))
}

fn crit4_decay() -> Outcome {
    let mut rng = sample::rng(SEED + 3);
    for i in 0..20 {
        let p = sample::rational_path(&mut rng, 1 + i % 3, 1 + i % 5).to_f64();
        let g = p.signature(12).unwrap();
        for kind in NormKind::ALL {
            let l = p.length(kind);
            let mut f = 1.0;
            for n in 1..=12 {
                f *= n as f64;
                let b = f * g.level_norm(n, kind).unwrap();
                let bound = l.powi(n as i32) * (1.0 + 1e-12);
                ensure(b <= bound, || format!("path {i}, {}, n={n}: {b:e} > {bound:e}", kind.as_str()))?;
            }
        }
    }
    Ok("20 paths, n <= 12, both norms".into())
}

fn crit5_supermultiplicativity() -> Outcome {
    let mut rng = sample::rng(SEED + 4);
    let mut inputs = Vec::new();
    for i in 0..8 {
        inputs.push(sample::rational_path(&mut rng, 1 + i % 2, 1 + i % 4).signature(10).unwrap());
    }
    inputs.push(sample::rational_path(&mut rng, 3, 2).signature(10).unwrap());
    for expr in ["[1,2]", "[1,[1,2]]", "1/2*[2,[1,2]]"] {
        inputs.push(lie_generator(expr, 2).unwrap().exp(10).unwrap());
    }
    let mut pairs = 0;
    for (k, g) in inputs.iter().enumerate() {
        for kind in NormKind::ALL {
            let b: Vec<f64> = (0..=10).map(|n| if n == 0 { 1.0 } else { b_value(g, n, kind) }).collect();
            for i in 1..10 {
                for j in i..=10 - i {
                    pairs += 1;
                    ensure(b[i + j] >= b[i] * b[j] * (1.0 - 1e-9), || {
                        format!("input {k}, {}: b_{} < b_{i} b_{j}", kind.as_str(), i + j)
                    })?;
                }
            }
        }
    }
    Ok(format!("{} inputs, {pairs} pairs", inputs.len()))
}

fn crit6_patterns() -> Outcome {
    let mut a = vec![Rational::zero(); 4];
    a[1] = Rational::one();
    a[2] = -Rational::one();
    let g = TruncatedTensor::homogeneous(2, 8, 2, a).unwrap().exp().unwrap();
    ensure(g == lie_generator("[1,2]", 2).unwrap().exp(8).unwrap(), || "exp([1,2]) mismatch".into())?;
    for n in 1..=8 {
        let zero = g.level(n).iter().all(Zero::is_zero);
        ensure(zero == (n % 2 == 1), || format!("exp([e1,e2]) level {n}: zero = {zero}"))?;
    }
    let h = lie_generator("[1,[1,2]]", 2).unwrap().exp(9).unwrap();
    let nonzero: BTreeSet<usize> = (1..=9).filter(|&n| h.level(n).iter().any(|c| !c.is_zero())).collect();
    ensure(nonzero.iter().all(|n| n % 3 == 0) && nonzero.contains(&3), || {
        format!("exp([e1,[e1,e2]]) nonzero {nonzero:?}")
    })?;
    let mut worst = 0.0f64;
    for (t, d) in [(&g, 2), (&h, 3)] {
        for kind in NormKind::ALL {
            let r = dilation_invariance_check(t, d, kind, 1e-12).unwrap();
            let w = r.degrees.iter().map(|x| x.residual).fold(0.0, f64::max);
            worst = worst.max(w);
            ensure(r.pass && r.agree && w <= 1e-12, || format!("d={d}, {}: residual {w:e}", kind.as_str()))?;
        }
    }
    Ok(format!("nonzero {nonzero:?}, max dilation residual {worst:.3e}"))
}

fn closure(gens: &[u64], bound: u64) -> Vec<u64> {
    let mut set = BTreeSet::new();
    let mut stack = gens.to_vec();
    while let Some(x) = stack.pop() {
        if x <= bound && set.insert(x) {
            stack.extend(gens.iter().map(|g| g + x));
        }
    }
    set.into_iter().collect()
}

fn crit7_semigroup() -> Outcome {
    let m = min_modulus(&closure(&[6, 10], 60)).unwrap();
    ensure(m == Some(2), || format!("<6,10>: {m:?}"))?;
    let m = min_modulus(&closure(&[3, 5], 60)).unwrap();
    ensure(m.is_none(), || format!("<3,5>: {m:?}"))?;
    let members = closure(&[3, 5], 200);
    let brute = (1..=200).rev().find(|x| !members.contains(x)).unwrap();
    let f = frobenius_number(&[3, 5]).unwrap();
    ensure(f == brute && f == 7, || format!("frobenius {f}, brute force {brute}"))?;
    let m = min_modulus(&closure(&[7], 70)).unwrap();
    ensure(m == Some(7), || format!("<7>: {m:?}"))?;
    let mut rng = sample::rng(SEED + 6);
    for i in 0..10 {
        let g = sample::rational_path(&mut rng, 2, 1 + i % 4).signature(10).unwrap();
        let set: Vec<u64> = (1..=10).filter(|&n| g.level(n).iter().any(|c| !c.is_zero())).map(|n| n as u64).collect();
        for &a in &set {
            for &b in &set {
                ensure(a + b > 10 || set.contains(&(a + b)), || format!("signature {i}: {a}+{b} missing"))?;
            }
        }
        ensure(verify_additive(&set, 10).closed, || format!("signature {i}: verify_additive rejects {set:?}"))?;
    }
    Ok("moduli 2/none/7, frobenius 7, 10 signatures closed".into())
}

fn crit8_tree_reduction() -> Outcome {
    let cases: [(Points, Points); 3] = [
        (&[&[0, 0], &[3, -1], &[0, 0]], &[&[0, 0]]),
        (&[&[0, 0], &[6, -2], &[3, -1]], &[&[0, 0], &[3, -1]]),
        (&[&[0, 0], &[1, 0], &[1, 1], &[1, 0], &[0, 0]], &[&[0, 0]]),
    ];
    for (i, (input, expected)) in cases.into_iter().enumerate() {
        let p = rpath(input);
        let r = p.tree_reduce();
        ensure(r == rpath(expected), || format!("example {i}: {:?}", r.vertices()))?;
        ensure(r.signature(6).unwrap() == p.signature(6).unwrap(), || format!("example {i}: signature changed"))?;
    }
    let unit = rpath(&[&[0, 0], &[3, -1], &[0, 0]]).signature(8).unwrap();
    ensure(unit == TruncatedTensor::unit(2, 8).unwrap(), || "out-and-back is not the unit".into())?;
    Ok("3 examples reduce as stated; out-and-back is the unit to N=8".into())
}

fn crit9_length() -> Outcome {
    let mut rng = sample::rng(SEED + 8);
    for i in 0..10 {
        let p = sample::monotone_staircase(&mut rng, 2 + i % 2, 2 + i % 4);
        let l = p.increments().flatten().fold(Rational::zero(), |acc, c| acc + c.abs());
        let g = p.signature(8).unwrap();
        for n in 1..=8 {
            let b = fact(n) * l1_exact(g.level(n));
            ensure(b == num::pow(l.clone(), n), || format!("staircase {i}, n={n}: n!|g_n| != L^n"))?;
        }
    }
    let mut tested = 0;
    for i in 0..10 {
        let p: PiecewiseLinearPath<Rational> = sample::rational_path(&mut rng, 1 + i % 3, 1 + i % 5);
        let g = p.signature(8).unwrap();
        for kind in NormKind::ALL {
            let l = p.length(kind);
            let mut running = 0.0f64;
            let mut prev = 0.0f64;
            for n in 1..=8 {
                if g.level(n).iter().any(|c| !c.is_zero()) {
                    running = running.max(b_value(&g, n, kind).powf(1.0 / n as f64));
                }
                let s = pathsig::analyze(&g.truncate(n).unwrap(), kind, Some(l)).unwrap().sup.unwrap_or(0.0);
                ensure((s - running).abs() <= 1e-12 * running.max(1.0), || {
                    format!("path {i}, N={n}: S_N {s} vs {running}")
                })?;
                ensure(s <= l * (1.0 + 1e-12) && s >= prev, || {
                    format!("path {i}, {}, N={n}: S_N {s}, L {l}", kind.as_str())
                })?;
                prev = s;
            }
            tested += 1;
        }
    }
    Ok(format!("S_N = L exactly on 10 staircases; S_N <= L nondecreasing on {tested} path/norm pairs"))
}

fn crit10_taylor() -> Outcome {
    use rand::Rng;
    let mut rng: SampleRng = sample::rng(SEED + 9);
    let grids = [4usize, 8, 16, 32, 64, 128, 256, 512, TAYLOR_GRID];
    for i in 0..100 {
        let len = rng.gen_range(1..=16);
        let x: Vec<f64> = (0..len).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let z: Vec<Complex64> =
            (0..len).map(|_| Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))).collect();
        let real: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let conj: Vec<Complex64> = z.iter().map(|c| c.conj()).collect();
        for kind in NormKind::ALL {
            let direct = match kind {
                NormKind::L1Projective => x.iter().map(|v| v.abs()).sum::<f64>(),
                NormKind::L2HilbertSchmidt => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            };
            let tn = taylor_norm(&real, kind, TAYLOR_GRID);
            ensure((tn - direct).abs() <= 1e-12, || format!("sample {i}, {}: {tn} vs {direct}", kind.as_str()))?;
            let (a, b) = (taylor_norm(&z, kind, TAYLOR_GRID), taylor_norm(&conj, kind, TAYLOR_GRID));
            ensure((a - b).abs() <= 1e-12, || format!("sample {i}, {}: conjugate {a} vs {b}", kind.as_str()))?;
            let values: Vec<f64> = grids.iter().map(|&g| taylor_norm(&z, kind, g)).collect();
            ensure(values.windows(2).all(|w| w[1] >= w[0] - 1e-12), || format!("sample {i}: {values:?}"))?;
        }
    }
    Ok("100 samples, both norms".into())
}

fn crit11_selftest() -> Outcome {
    let start = Instant::now();
    let config = SelftestConfig::default();
    let first = selftest::run(&config);
    let elapsed = start.elapsed();
    let second = selftest::run(&config);
    ensure(first.pass, || {
        let failed: Vec<_> =
            first.suites.iter().filter(|s| !s.pass).map(|s| format!("{}: {}", s.name, s.detail)).collect();
        failed.join("; ")
    })?;
    ensure(first.verdicts() == second.verdicts(), || "verdicts differ between runs".into())?;
    ensure(elapsed <= Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!("{} suites, deterministic, {:.1} s", first.suites.len(), elapsed.as_secs_f64()))
}

fn main() {
    let criteria: [(&str, Criterion); 11] = [
        ("1 chen/oracle agreement", crit1_chen_oracle),
        ("2 exactness", crit2_exactness),
        ("3 shuffle identity", crit3_shuffle),
        ("4 factorial decay", crit4_decay),
        ("5 supermultiplicativity", crit5_supermultiplicativity),
        ("6 counterexample patterns", crit6_patterns),
        ("7 semigroup lemma", crit7_semigroup),
        ("8 tree reduction", crit8_tree_reduction),
        ("9 length property", crit9_length),
        ("10 taylor norm identities", crit10_taylor),
        ("11 selftest", crit11_selftest),
    ];
    let mut failures = 0;
    for (name, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
