//! Acceptance criteria 1 to 8, one printed line per criterion.
//!
//! Oracles are frozen tables or closed forms computed here, independently of
//! the library routines under test.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use opalg::exact::{q, qf, qpow, to_f64, Q};
use opalg::freeprob::{self, DiscreteMeasure, Law, LimitTheorem};
use opalg::graphinv::{self, AdeFamily, CircularMeasure};
use opalg::hadamard;
use opalg::partitions::{self, ColoredWord, Partition, PartitionClass};
use opalg::randmat::{self, Ensemble, EnsembleSpec, HaarGroup, Letter};
use opalg::series::{one_minus_pow, Series};
use opalg::tl;
use opalg::weingarten::{self, EasyCategory};
use opalg::Result;

const CATALAN: [u64; 11] = [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796];
const BELL: [u64; 12] = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570];

/// Collects failures for one criterion.
struct Block {
    failures: Vec<String>,
    checks: usize,
}

impl Block {
    fn new() -> Self {
        Block { failures: Vec::new(), checks: 0 }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

fn choose(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn criterion1(b: &mut Block) -> Result<()> {
    for k in 0..=10 {
        let nc2 = partitions::count(PartitionClass::NC2, 2 * k, None)?;
        let nc = partitions::count(PartitionClass::NC, k, None)?;
        b.expect(nc2 as u64 == CATALAN[k] && nc as u64 == CATALAN[k], || format!("k = {k}: |NC2| = {nc2}, |NC| = {nc}"));
    }
    for k in 0..=10 {
        let p = partitions::count(PartitionClass::P, k, None)? as u64;
        b.expect(p == BELL[k], || format!("|P({k})| = {p}"));
        let rec: u64 = (0..=k as u64).map(|j| choose(k as u64, j) * BELL[(k as u64 - j) as usize]).sum();
        b.expect(rec == BELL[k + 1], || format!("Bell recurrence at {k}"));
    }
    Ok(())
}

fn falling(n: u64, r: usize) -> BigInt {
    (0..r as u64).map(|i| BigInt::from(n as i64 - i as i64)).product()
}

fn criterion2(b: &mut Block) -> Result<()> {
    for k in 1..=4 {
        let ps = partitions::enumerate(PartitionClass::P, k, None)?;
        for x in &ps {
            for z in &ps {
                let mut s = 0i64;
                for y in &ps {
                    if x.refines(y) {
                        s += partitions::mobius(y, z)?;
                    }
                }
                b.expect(s == i64::from(x == z), || format!("zeta·Möbius at {x}, {z}"));
            }
        }
        // μ(0̂, 1̂) = (−1)^{k−1}(k−1)!
        let bottom: Partition = (1..=k).map(|i| format!("{{{i}}}")).collect::<String>().parse()?;
        let top: Partition = format!("{{{}}}", (1..=k).map(|i| i.to_string()).collect::<Vec<_>>().join(",")).parse()?;
        let want = if k % 2 == 1 { 1 } else { -1 } * (1..k as i64).product::<i64>();
        let got = partitions::mobius(&bottom, &top)?;
        b.expect(got == want, || format!("μ(0, 1) on P({k}) = {got}"));
        for n in 1..=8u64 {
            let lindstrom: BigInt = ps.iter().map(|p| falling(n, p.block_count())).product();
            let (_, direct) = weingarten::gram_determinant(k, n);
            b.expect(lindstrom == direct, || format!("det Gram P({k}), N = {n}: {direct} vs {lindstrom}"));
        }
    }
    for class in PartitionClass::ALL {
        let cat = EasyCategory::new(class);
        for k in 1..=4 {
            let word = class.is_matched().then(|| ColoredWord::alternating(k));
            let g = weingarten::gram_colored(&cat, k, 7, word.as_ref())?;
            if g.basis.is_empty() {
                continue;
            }
            let w = weingarten::weingarten_colored(&cat, k, 7, word.as_ref())?;
            let d = g.basis.len();
            for i in 0..d {
                for j in 0..d {
                    let s: Q = (0..d).map(|t| Q::from_integer(g.entries[i][t].clone()) * &w.entries[t][j]).sum();
                    b.expect(s == if i == j { Q::one() } else { Q::zero() }, || format!("G·W ≠ 1 for {class}, k = {k} at ({i}, {j})"));
                }
            }
        }
    }
    Ok(())
}

fn criterion3(b: &mut Block) -> Result<()> {
    let mut rng = ChaCha20Rng::seed_from_u64(42);
    for delta in [q(2), qf(5, 2), q(3)] {
        for k in 1..=6usize {
            let words: Vec<Vec<usize>> = if k < 3 {
                vec![]
            } else {
                (0..50).map(|_| (0..1 + rng.next_u32() % 6).map(|_| 1 + rng.next_u32() as usize % (k - 2)).collect()).collect()
            };
            let rep = tl::check_relations(k, &delta, &words)?;
            b.expect(rep.all(), || format!("TL({k}) at δ = {delta}: {rep:?}"));
            b.expect(tl::dimension(k) as u64 == CATALAN[k], || format!("dim TL({k})"));
        }
        // tr(e_1) = δ^{-2}
        let e1 = tl::jones_projection(1, 4, &delta)?;
        b.expect(e1.markov_trace() == qpow(&delta, -2), || format!("tr(e_1) at δ = {delta}"));
    }
    Ok(())
}

/// |D(p)| for p = 1..4, matched classes on alternating words.
fn frozen_dims(class: PartitionClass) -> [i64; 4] {
    use PartitionClass::*;
    match class {
        P => [1, 2, 5, 15],
        P2 => [0, 1, 0, 3],
        Peven => [0, 1, 0, 4],
        NC => [1, 2, 5, 14],
        NC2 => [0, 1, 0, 2],
        NCeven => [0, 1, 0, 3],
        MatchedP2 | MatchedNC2 => [0, 1, 0, 2],
    }
}

fn criterion4(b: &mut Block) -> Result<()> {
    let half = qf(1, 2);
    for class in PartitionClass::ALL {
        let cat = EasyCategory::new(class);
        for p in 1..=4usize {
            let word = class.is_matched().then(|| ColoredWord::alternating(p));
            let m = weingarten::character_moments(&cat, 10, p, &Q::one(), word.as_ref())?;
            b.expect(m == q(frozen_dims(class)[p - 1]), || format!("∫χ^{p} for {class} = {m}"));
            let limit: Q = cat.basis(p, word.as_ref())?.iter().map(|x| qpow(&half, x.block_count() as i64)).sum();
            b.expect(weingarten::character_limit(&cat, p, &half, word.as_ref())? == limit, || format!("limit for {class}, p = {p}"));
            // tN must be an integer, so odd p uses N ∈ {2p, 4p, 8p}
            let scale = if p % 2 == 0 { 1 } else { 2 };
            let gaps: Vec<f64> = [1u64, 2, 4]
                .iter()
                .map(|f| weingarten::character_moments(&cat, f * scale * p as u64, p, &half, word.as_ref()).map(|m| to_f64(&(m - &limit)).abs()))
                .collect::<Result<_>>()?;
            b.expect(gaps.windows(2).all(|w| w[1] <= w[0]), || format!("t = 1/2 gaps for {class}, p = {p}: {gaps:?}"));
        }
    }
    Ok(())
}

/// Narayana polynomial Σ_r N(k, r) t^r.
fn narayana_poly(k: u64, t: &Q) -> Q {
    (1..=k).map(|r| Q::new((choose(k, r) * choose(k, r - 1)).into(), k.into()) * qpow(t, r as i64)).sum()
}

fn criterion5(b: &mut Block) -> Result<()> {
    for t in [qf(1, 3), qf(1, 2), q(1), q(2)] {
        let m = freeprob::law_moments(&Law::FreePoisson(t.clone()), 8)?;
        for k in 1..=8 {
            b.expect(m.get(k) == narayana_poly(k as u64, &t), || format!("free Poisson t = {t}, k = {k}"));
        }
        let r = freeprob::r_transform(&m)?;
        let ok = (0..=r.order()).all(|i| r.coeff(i) == t) && r.order() >= 7;
        b.expect(ok, || format!("R-transform of π_{t}: {r}"));
    }
    let n = 1000u64;
    let pm1 = DiscreteMeasure::real(&[(q(-1), qf(1, 2)), (q(1), qf(1, 2))])?;
    let bern = DiscreteMeasure::real(&[(q(0), Q::one() - qf(1, n as i64)), (q(1), qf(1, n as i64))])?;
    // gaussian 1,3,15; semicircle 1,2,5; poisson B_k; free poisson C_k
    let limits: [(LimitTheorem, DiscreteMeasure, [f64; 6]); 4] = [
        (LimitTheorem::Clt, pm1.clone(), [0.0, 1.0, 0.0, 3.0, 0.0, 15.0]),
        (LimitTheorem::FreeClt, pm1, [0.0, 1.0, 0.0, 2.0, 0.0, 5.0]),
        (LimitTheorem::Plt, bern.clone(), [1.0, 2.0, 5.0, 15.0, 52.0, 203.0]),
        (LimitTheorem::FreePlt, bern, [1.0, 2.0, 5.0, 14.0, 42.0, 132.0]),
    ];
    for (th, base, want) in limits {
        let rows = freeprob::limit_theorem_check(&base, th, n, 6)?;
        for r in &rows {
            let w = want[r.k - 1];
            b.expect((r.limit - w).abs() < 1e-12, || format!("{th:?} limit moment {} = {}", r.k, r.limit));
            let rel = (r.value - w).abs() / w.abs().max(1.0);
            b.expect(rel < 0.02, || format!("{th:?} moment {} gap {rel:.3e}", r.k));
        }
    }
    let rows = freeprob::limit_theorem_check(&DiscreteMeasure::roots_of_unity(4)?, LimitTheorem::Cclt, n, 6)?;
    b.expect(rows.iter().all(|r| r.relative_gap() < 0.02), || format!("complex CLT gaps {rows:?}"));
    Ok(())
}

fn criterion6(b: &mut Block) -> Result<()> {
    let w = randmat::empirical_moments(&EnsembleSpec::new(Ensemble::Wigner, 200).samples(100).seed(42), 6)?;
    for (k, c) in [(1, 1.0), (2, 2.0), (3, 5.0)] {
        let x = w[2 * k - 1];
        b.expect((x - c).abs() <= 0.07 * c, || format!("Wigner moment {}: {x}", 2 * k));
    }
    let s = randmat::empirical_moments(&EnsembleSpec::new(Ensemble::Wishart, 200).samples(100).seed(42), 3)?;
    for (k, c) in [(1, 1.0), (2, 2.0), (3, 5.0)] {
        let x = s[k - 1];
        b.expect((x - c).abs() <= 0.07 * c, || format!("Wishart moment {k}: {x}"));
    }
    // O_5 integrals: 1/N, 3/(N(N+2)), (N+1)/(N(N−1)(N+2)), −1/(N(N−1)(N+2))
    let words: [(&[(usize, usize)], Q); 7] = [
        (&[(1, 1), (1, 1)], qf(1, 5)),
        (&[(1, 2), (1, 2)], qf(1, 5)),
        (&[(1, 1), (2, 2)], q(0)),
        (&[(1, 1), (1, 1), (1, 1)], q(0)),
        (&[(1, 1), (1, 1), (1, 1), (1, 1)], qf(3, 35)),
        (&[(1, 1), (1, 1), (2, 2), (2, 2)], qf(3, 70)),
        (&[(1, 1), (1, 2), (2, 1), (2, 2)], qf(-1, 140)),
    ];
    for (word, exact) in words {
        let rows: Vec<usize> = word.iter().map(|x| x.0).collect();
        let cols: Vec<usize> = word.iter().map(|x| x.1).collect();
        let wg = weingarten::integrate(&EasyCategory::new(PartitionClass::P2), 5, &rows, &cols, None)?;
        b.expect(wg == exact, || format!("Weingarten O_5 {word:?} = {wg}"));
        let letters: Vec<Letter> = word.iter().map(|&(i, j)| Letter { i, j, conj: false }).collect();
        let e = randmat::haar_word_integral_mc(HaarGroup::Orthogonal, 5, &letters, 100_000, 42)?;
        b.expect(e.agrees(Complex64::new(to_f64(&exact), 0.0), 3.0), || format!("Haar O_5 {word:?}: {:?}", e));
    }
    Ok(())
}

/// (1 ± q^n) factors as integer series to `order`.
fn xi_series(num: &[(usize, bool)], den: &[(usize, bool)], primes: usize, order: usize) -> Vec<i64> {
    let factor = |(n, plus): (usize, bool)| {
        let mut v = vec![0i64; order + 1];
        v[0] = 1;
        if n <= order {
            v[n] += if plus { 1 } else { -1 };
        }
        v
    };
    let mul = |a: &[i64], b: &[i64]| {
        let mut c = vec![0i64; order + 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate().take(order + 1 - i) {
                c[i + j] += x * y;
            }
        }
        c
    };
    let mut top = vec![0i64; order + 1];
    top[0] = 1;
    for &f in num {
        top = mul(&top, &factor(f));
    }
    let mut bottom = vec![0i64; order + 1];
    bottom[0] = 1;
    let extra: Vec<(usize, bool)> = match primes {
        0 => vec![],
        1 => vec![(1, false)],
        _ => vec![(2, false)],
    };
    for &f in den.iter().chain(&extra) {
        bottom = mul(&bottom, &factor(f));
    }
    // bottom has constant term 1
    let mut out = vec![0i64; order + 1];
    for i in 0..=order {
        out[i] = top[i] - (1..=i).map(|j| bottom[j] * out[i - j]).sum::<i64>();
    }
    out
}

type XiSpec = (Vec<(usize, bool)>, Vec<(usize, bool)>, usize);

/// The T-series list, with `ade` arguments for each parameter m.
fn t_list(m: usize) -> Vec<(AdeFamily, usize, XiSpec)> {
    let (p, n) = (true, false);
    let mut out = vec![];
    if m >= 3 {
        out.push((AdeFamily::A, m - 1, (vec![(m - 1, n)], vec![(m, n)], 0)));
    }
    if m >= 2 {
        out.push((AdeFamily::D, m + 1, (vec![(m - 1, p)], vec![(m, p)], 0)));
        out.push((AdeFamily::Dtilde, m + 2, (vec![(m + 1, p)], vec![(m, n)], 2)));
    }
    out.push((AdeFamily::Atilde, m, (vec![(m, p)], vec![(m, n)], 1)));
    out
}

fn exceptional() -> Vec<(AdeFamily, XiSpec)> {
    let (p, n) = (true, false);
    vec![
        (AdeFamily::E6, (vec![(8, n)], vec![(3, n), (6, p)], 0)),
        (AdeFamily::E7, (vec![(12, n)], vec![(4, n), (9, p)], 0)),
        (AdeFamily::E8, (vec![(5, p), (9, p)], vec![(15, p)], 0)),
        (AdeFamily::E6tilde, (vec![(6, p)], vec![(3, n), (4, n)], 0)),
        (AdeFamily::E7tilde, (vec![(9, p)], vec![(4, n), (6, n)], 0)),
        (AdeFamily::E8tilde, (vec![(15, p)], vec![(6, n), (10, n)], 0)),
    ]
}

fn criterion7(b: &mut Block) -> Result<()> {
    let mut cases: Vec<(AdeFamily, usize, XiSpec)> = (1..=8).flat_map(t_list).collect();
    cases.extend(exceptional().into_iter().map(|(f, x)| (f, 0, x)));
    let mut families = std::collections::BTreeSet::new();
    for (f, n, (num, den, primes)) in &cases {
        let t = graphinv::t_series(&graphinv::poincare(&graphinv::ade(*f, *n)?, 24))?;
        let want = xi_series(num, den, *primes, 24);
        let ok = (0..=24).all(|i| t.coeff(i) == q(want[i]));
        b.expect(ok, || format!("T-series of {f}_{n}: {t} vs {want:?}"));
        families.insert(f.to_string());
    }
    b.expect(families.len() == 10, || format!("only {} families covered", families.len()));
    // A_2 from (1 − q²)/(1 − q³) = 1, 0, −1, 1, 0, −1, …
    let a2 = graphinv::t_series(&graphinv::poincare(&graphinv::ade(AdeFamily::A, 2)?, 20))?;
    b.expect((0..=20).all(|i| a2.coeff(i) == q([1, 0, -1][i % 3])), || format!("A_2 T-series {a2}"));

    for n in 1..=3u64 {
        let eps = graphinv::circular_measure(&graphinv::ade(AdeFamily::Atilde, n as usize)?);
        let mut ok = eps.atoms.len() == 2 * n as usize;
        for (p, w) in &eps.atoms {
            let z = p.to_complex();
            ok &= (z.powi(2 * n as i32) - 1.0).norm() < 1e-12 && (w - 1.0 / (2 * n) as f64).abs() < 1e-12;
        }
        b.expect(ok, || format!("circular measure of Ã_{}: {eps:?}", 2 * n));
    }

    for f in AdeFamily::ALL {
        let ns: Vec<usize> = if f.is_series() { (f.min_n()..=8).collect() } else { vec![0] };
        for n in ns {
            let g = graphinv::ade(f, n)?;
            let eps = graphinv::circular_measure(&g);
            let t = graphinv::t_series(&graphinv::poincare(&g, 20))?;
            // 2∫(1 − q u²)^{-1} dε = 1 + (1 − q)T
            let rhs = &Series::one(20) + &(&t * &one_minus_pow(20, 1));
            let gap = eps.stieltjes(20).iter().enumerate().map(|(k, x)| (x - to_f64(&rhs.coeff(k))).abs()).fold(0.0, f64::max);
            b.expect(gap < 1e-9, || format!("series identity for {f}_{n}: {gap:e}"));
            let formula = graphinv::ade_circular_formula(f, n)?;
            let gap = (0..=12).map(|k| (eps.moment(k) - formula.moment(k)).norm()).fold(0.0, f64::max);
            b.expect(gap < 1e-9, || format!("circular measure of {f}_{n} by moments: {gap:e}"));
        }
    }
    // d_n is uniform on 2n-th roots
    b.expect(CircularMeasure::uniform(3).atoms.len() == 6, || "uniform(3)".into());

    for n in 3..=6u64 {
        let th = graphinv::theta(&graphinv::poincare(&graphinv::bratteli_matrix_algebra(n), 20))?;
        b.expect(th.coeffs().iter().all(|c| *c >= Q::zero()), || format!("theta for C ⊂ M_{n}: {th}"));
    }
    for n in 2..=12 {
        let x = graphinv::graph_norm(&graphinv::ade(AdeFamily::A, n)?).powi(2);
        let want = 4.0 * (PI / (n + 1) as f64).cos().powi(2);
        b.expect((x - want).abs() < 1e-9, || format!("‖A_{n}‖² = {x}"));
    }
    Ok(())
}

fn criterion8(b: &mut Block) -> Result<()> {
    for orders in [vec![2u64], vec![3], vec![2, 2]] {
        let h = hadamard::fourier(&orders)?;
        let mu = hadamard::magic_unitary(&h)?;
        b.expect(mu.defect() < 1e-9, || format!("magic defect for {orders:?}"));
        b.expect(hadamard::commuting_square_check(&h)?.passes, || format!("commuting square for {orders:?}"));
    }
    for n in [2u64, 3] {
        let h = hadamard::fourier(&[n])?;
        for k in 1..=3u32 {
            let d = hadamard::planar_dim(&h, k as usize)?;
            b.expect(d == (n as usize).pow(k - 1), || format!("planar_dim(F_{n}, {k}) = {d}"));
        }
    }
    for m in 1..=4 {
        for n in 1..=4 {
            let k = hadamard::kesten_moment(m, n, 2)?;
            b.expect(k == q((m + n - 1) as i64), || format!("kesten({m}, {n}, 2) = {k}"));
        }
    }
    for n in 1..=4 {
        for p in 1..=4 {
            b.expect(hadamard::kesten_moment(2, n, p)? == hadamard::blowup_m2(n, p)?, || format!("blowup N = {n}, p = {p}"));
        }
    }
    for p in 1..=3usize {
        let rep = hadamard::convergence_check(&Q::one(), &Q::one(), p, &[1, 2, 3])?;
        b.expect(rep.limit == q(CATALAN[p] as i64), || format!("limit for p = {p}: {}", rep.limit));
        b.expect(rep.rows.len() == 3 && (p == 1 || rep.gaps_decrease()), || format!("convergence for p = {p}: {rep:?}"));
    }
    for (m, n, p) in [(3, 4, 2), (2, 3, 3), (2, 2, 4)] {
        let e = hadamard::gram_law_mc(m, n, p, 4000, 42)?;
        let exact = to_f64(&hadamard::kesten_moment(m, n, p)?);
        b.expect(e.agrees(Complex64::new(exact, 0.0), 3.0), || format!("Gram MC ({m}, {n}, {p}): {e:?} vs {exact}"));
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn(&mut Block) -> Result<()>); 8] = [
        ("Catalan and Bell counts", criterion1),
        ("Möbius, Lindström and G·W = 1", criterion2),
        ("Temperley-Lieb relations", criterion3),
        ("character moments", criterion4),
        ("free probability", criterion5),
        ("random matrices", criterion6),
        ("graph invariants", criterion7),
        ("Hadamard matrices", criterion8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut b = Block::new();
        if let Err(e) = run(&mut b) {
            b.failures.push(format!("error: {e}"));
        }
        let status = if b.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {}: {status} {name} ({} checks, {:.2}s)", i + 1, b.checks, start.elapsed().as_secs_f64());
        for f in &b.failures {
            println!("    {f}");
        }
        failed += usize::from(!b.failures.is_empty());
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
