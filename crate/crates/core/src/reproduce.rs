//! Golden-table suites behind the `reproduce` subcommand.
//!
//! Each suite recomputes a block of identities through the library and reports
//! one [`Check`] per identity, with the measured value as text.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{binomial, fmt_q, q, qf, to_f64, Q};
use crate::freeprob::{self, DiscreteMeasure, Law, LimitTheorem};
use crate::graphinv::{self, AdeFamily};
use crate::hadamard;
use crate::partitions::{self, ColoredWord, PartitionClass};
use crate::randmat::{self, Ensemble, EnsembleSpec, HaarGroup, Letter};
use crate::series::{one_minus_pow, Series};
use crate::tl;
use crate::weingarten::{self, EasyCategory};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub passed: bool,
    pub measured: String,
}

fn check(criterion: u8, name: impl Into<String>, passed: bool, measured: impl Into<String>) -> Check {
    Check { criterion, name: name.into(), passed, measured: measured.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Catalan,
    Tl,
    Freeprob,
    Weingarten,
    Randmat,
    AdeSeries,
    AdeCircular,
    Hadamard,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Catalan,
        Suite::Weingarten,
        Suite::Tl,
        Suite::Freeprob,
        Suite::Randmat,
        Suite::AdeSeries,
        Suite::AdeCircular,
        Suite::Hadamard,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Catalan => "catalan",
            Suite::Tl => "tl",
            Suite::Freeprob => "freeprob",
            Suite::Weingarten => "weingarten",
            Suite::Randmat => "randmat",
            Suite::AdeSeries => "ade-series",
            Suite::AdeCircular => "ade-circular",
            Suite::Hadamard => "hadamard",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

/// Monte-Carlo parameters for the sampled suites.
#[derive(Clone, Copy, Debug)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { samples: 100, seed: 42 }
    }
}

pub fn run(suite: Suite, mc: McConfig) -> Result<Vec<Check>> {
    match suite {
        Suite::Catalan => catalan(),
        Suite::Weingarten => weingarten_block(),
        Suite::Tl => tl_block(mc.seed),
        Suite::Freeprob => freeprob_block(),
        Suite::Randmat => randmat_block(mc),
        Suite::AdeSeries => ade_series(),
        Suite::AdeCircular => ade_circular(),
        Suite::Hadamard => hadamard_block(mc.seed),
    }
}

fn catalan_number(k: u64) -> BigInt {
    binomial(2 * k, k) / BigInt::from(k + 1)
}

fn catalan() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for k in 0..=10 {
        let nc2 = partitions::count(PartitionClass::NC2, 2 * k, None)?;
        let nc = partitions::count(PartitionClass::NC, k, None)?;
        let c = catalan_number(k as u64);
        out.push(check(1, format!("|NC2({})| = |NC({k})| = C_{k}", 2 * k), BigInt::from(nc2) == c && BigInt::from(nc) == c, format!("{nc2}, {nc}, {c}")));
    }
    let bell: Vec<BigInt> = (0..=10).map(|k| partitions::count(PartitionClass::P, k, None).map(BigInt::from)).collect::<Result<_>>()?;
    for k in 0..10 {
        let rec: BigInt = (0..=k).map(|j| binomial(k as u64, j as u64) * &bell[j]).sum();
        out.push(check(1, format!("Bell recurrence |P({})|", k + 1), rec == bell[k + 1], bell[k + 1].to_string()));
    }
    Ok(out)
}

fn weingarten_block() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for k in 1..=4 {
        let ps = partitions::enumerate(PartitionClass::P, k, None)?;
        let mut ok = true;
        for a in &ps {
            for c in &ps {
                let mut s = 0i64;
                for b in &ps {
                    if a.refines(b) {
                        s += partitions::mobius(b, c)?;
                    }
                }
                ok &= s == i64::from(a == c);
            }
        }
        out.push(check(2, format!("zeta·Möbius = 1 on P({k})"), ok, format!("{} partitions", ps.len())));
    }
    for k in 1..=4 {
        for n in 1..=8u64 {
            let (lin, direct) = weingarten::gram_determinant(k, n);
            out.push(check(2, format!("Lindström determinant P({k}), N = {n}"), lin == direct, direct.to_string()));
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
            let ok = (0..d).all(|i| {
                (0..d).all(|j| {
                    let s: Q = (0..d).map(|t| Q::from_integer(g.entries[i][t].clone()) * &w.entries[t][j]).sum();
                    s == if i == j { Q::one() } else { Q::zero() }
                })
            });
            out.push(check(2, format!("G·W = 1 for {class}, k = {k}, N = 7"), ok, format!("dimension {d}")));
        }
    }
    for class in PartitionClass::ALL {
        let cat = EasyCategory::new(class);
        for p in 1..=4 {
            let word = class.is_matched().then(|| ColoredWord::alternating(p));
            let m = weingarten::character_moments(&cat, 10, p, &Q::one(), word.as_ref())?;
            let d = cat.basis(p, word.as_ref())?.len();
            out.push(check(4, format!("∫χ^{p} = |D({p})| for {class}, N = 10"), m == q(d as i64), fmt_q(&m)));
        }
    }
    let half = qf(1, 2);
    for class in PartitionClass::ALL {
        let cat = EasyCategory::new(class);
        for p in 1..=4usize {
            let word = class.is_matched().then(|| ColoredWord::alternating(p));
            let limit = weingarten::character_limit(&cat, p, &half, word.as_ref())?;
            let scale = if p % 2 == 0 { 1 } else { 2 };
            let gaps: Vec<f64> = [1u64, 2, 4]
                .iter()
                .map(|&f| {
                    let n = f * scale * p as u64;
                    weingarten::character_moments(&cat, n, p, &half, word.as_ref()).map(|m| to_f64(&(m - &limit)).abs())
                })
                .collect::<Result<_>>()?;
            let ok = gaps.windows(2).all(|w| w[1] <= w[0]);
            out.push(check(4, format!("t = 1/2 gap shrinks for {class}, p = {p}"), ok, list(&gaps)));
        }
    }
    Ok(out)
}

fn tl_block(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for delta in [q(2), qf(5, 2), q(3)] {
        for k in 2..=6usize {
            let words: Vec<Vec<usize>> = if k < 3 {
                vec![]
            } else {
                (0..50)
                    .map(|_| {
                        let len = 1 + (rng.next_u32() % 6) as usize;
                        (0..len).map(|_| 1 + (rng.next_u32() as usize % (k - 2))).collect()
                    })
                    .collect()
            };
            let rep = tl::check_relations(k, &delta, &words)?;
            out.push(check(
                3,
                format!("TL relations k = {k}, δ = {}", fmt_q(&delta)),
                rep.all(),
                format!(
                    "idempotent {} self-adjoint {} far {} e_ie_{{i±1}}e_i {} Markov {}",
                    rep.idempotent, rep.self_adjoint, rep.far_commute, rep.braid_like, rep.markov
                ),
            ));
        }
    }
    Ok(out)
}

fn freeprob_block() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for t in [qf(1, 2), q(1), q(2)] {
        let m = freeprob::law_moments(&Law::FreePoisson(t.clone()), 8)?;
        let ok = (1..=8).all(|k| {
            let want: Q = partitions::enumerate(PartitionClass::NC, k, None)
                .unwrap_or_default()
                .iter()
                .map(|p| crate::exact::qpow(&t, p.block_count() as i64))
                .sum();
            m.get(k) == want
        });
        out.push(check(5, format!("free Poisson t = {} moments, k ≤ 8", fmt_q(&t)), ok, format!("M_8 = {}", fmt_q(&m.get(8)))));
        let r = freeprob::r_transform(&m)?;
        let want = Series::new(vec![t.clone(); r.order() + 1]);
        out.push(check(5, format!("R-transform of π_{} = t/(1−y)", fmt_q(&t)), r == want.truncate(r.order()), r.to_string()));
    }
    let n = 1000u64;
    let pm1 = DiscreteMeasure::real(&[(q(-1), qf(1, 2)), (q(1), qf(1, 2))])?;
    let bern = DiscreteMeasure::real(&[(q(0), Q::one() - qf(1, n as i64)), (q(1), qf(1, n as i64))])?;
    let cases = [
        (LimitTheorem::Clt, pm1.clone()),
        (LimitTheorem::FreeClt, pm1),
        (LimitTheorem::Plt, bern.clone()),
        (LimitTheorem::FreePlt, bern),
        (LimitTheorem::Cclt, DiscreteMeasure::roots_of_unity(4)?),
    ];
    for (th, base) in cases {
        let rows = freeprob::limit_theorem_check(&base, th, n, 6)?;
        let gap = rows.iter().map(|r| r.relative_gap()).fold(0.0, f64::max);
        let abs = rows.iter().map(|r| r.gap).fold(0.0, f64::max);
        out.push(check(5, format!("{th:?} relative moment gap at n = {n}, K ≤ 6"), gap < 0.02, format!("{gap:.3e} (absolute {abs:.3e})")));
    }
    Ok(out)
}

fn randmat_block(mc: McConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let w = randmat::empirical_moments(&EnsembleSpec::new(Ensemble::Wigner, 200).samples(mc.samples).seed(mc.seed), 6)?;
    for (k, c) in [(1usize, 1.0), (2, 2.0), (3, 5.0)] {
        let x = w[2 * k - 1];
        out.push(check(6, format!("Wigner N = 200 moment {}", 2 * k), (x - c).abs() <= 0.07 * c, format!("{x:.6} vs {c}")));
    }
    let s = randmat::empirical_moments(&EnsembleSpec::new(Ensemble::Wishart, 200).samples(mc.samples).seed(mc.seed), 3)?;
    for (k, c) in [(1usize, 1.0), (2, 2.0), (3, 5.0)] {
        let x = s[k - 1];
        out.push(check(6, format!("Wishart N = M = 200 moment {k}"), (x - c).abs() <= 0.07 * c, format!("{x:.6} vs {c}")));
    }
    let words: [&[(usize, usize)]; 6] = [
        &[(1, 1), (1, 1)],
        &[(1, 2), (1, 2)],
        &[(1, 1), (2, 2)],
        &[(1, 1), (1, 1), (1, 1), (1, 1)],
        &[(1, 1), (1, 1), (2, 2), (2, 2)],
        &[(1, 1), (1, 2), (2, 1), (2, 2)],
    ];
    for w in words {
        let letters: Vec<Letter> = w.iter().map(|&(i, j)| Letter { i, j, conj: false }).collect();
        let rows: Vec<usize> = w.iter().map(|x| x.0).collect();
        let cols: Vec<usize> = w.iter().map(|x| x.1).collect();
        let exact = to_f64(&weingarten::integrate(&EasyCategory::new(PartitionClass::P2), 5, &rows, &cols, None)?);
        let e = randmat::haar_word_integral_mc(HaarGroup::Orthogonal, 5, &letters, 1000 * mc.samples, mc.seed)?;
        out.push(check(
            6,
            format!("Haar O_5 word {w:?}"),
            e.agrees(Complex64::new(exact, 0.0), 3.0),
            format!("{:.6} ± {:.1e} vs {exact:.6}", e.mean.re, e.stderr),
        ));
    }
    Ok(out)
}

fn catalog(max_n: usize) -> Vec<(AdeFamily, usize)> {
    let mut out = Vec::new();
    for f in AdeFamily::ALL {
        if f.is_series() {
            out.extend((f.min_n()..=max_n).map(|n| (f, n)));
        } else {
            out.push((f, 0));
        }
    }
    out
}

fn label(f: AdeFamily, n: usize) -> String {
    if f.is_series() {
        format!("{f}_{n}")
    } else {
        f.to_string()
    }
}

fn ade_series() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for f in AdeFamily::ALL {
        let ns: Vec<usize> = if f.is_series() { (f.min_n()..=8).collect() } else { vec![0] };
        let mut ok = true;
        for &n in &ns {
            let t = graphinv::t_series(&graphinv::poincare(&graphinv::ade(f, n)?, 24))?;
            ok &= t == graphinv::ade_t_formula(f, n)?.series(24);
        }
        out.push(check(7, format!("T-series closed form for {f}, order 24"), ok, format!("{} graphs", ns.len())));
    }
    for n in 3..=6u64 {
        let th = graphinv::theta(&graphinv::poincare(&graphinv::bratteli_matrix_algebra(n), 20))?;
        let ok = th.coeffs().iter().all(|c| *c >= Q::zero());
        out.push(check(7, format!("theta coefficients ≥ 0 for C ⊂ M_{n}, r ≤ 20"), ok, th.to_string()));
    }
    for n in 2..=12 {
        let x = graphinv::graph_norm(&graphinv::ade(AdeFamily::A, n)?).powi(2);
        let want = 4.0 * (std::f64::consts::PI / (n + 1) as f64).cos().powi(2);
        out.push(check(7, format!("‖A_{n}‖² = 4cos²(π/{})", n + 1), (x - want).abs() < 1e-9, format!("{x:.17}")));
    }
    Ok(out)
}

fn ade_circular() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in 1..=3u64 {
        let eps = graphinv::circular_measure(&graphinv::ade(AdeFamily::Atilde, n as usize)?);
        let uniform = graphinv::CircularMeasure::uniform(n);
        let ok = eps.atoms.len() == 2 * n as usize && (0..=4 * n as i32).all(|k| (eps.moment(k) - uniform.moment(k)).norm() < 1e-12);
        out.push(check(7, format!("circular measure of Ã_{} is uniform on {}-th roots", 2 * n, 2 * n), ok, format!("{} atoms", eps.atoms.len())));
    }
    for (f, n) in catalog(8) {
        let g = graphinv::ade(f, n)?;
        let eps = graphinv::circular_measure(&g);
        let t = graphinv::t_series(&graphinv::poincare(&g, 20))?;
        let rhs = &Series::one(20) + &(&t * &one_minus_pow(20, 1));
        let gap = eps.stieltjes(20).iter().enumerate().map(|(k, x)| (x - to_f64(&rhs.coeff(k))).abs()).fold(0.0, f64::max);
        out.push(check(7, format!("series identity for {}, order 20", label(f, n)), gap < 1e-9, format!("{gap:.1e}")));
        let formula = graphinv::ade_circular_formula(f, n)?;
        let gap = (0..=12).map(|k| (eps.moment(k) - formula.moment(k)).norm()).fold(0.0, f64::max);
        out.push(check(7, format!("circular closed form for {}, moments ≤ 12", label(f, n)), gap < 1e-9, format!("{gap:.1e}")));
    }
    Ok(out)
}

fn hadamard_block(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for orders in [vec![2u64], vec![3], vec![2, 2]] {
        let h = hadamard::fourier(&orders)?;
        let mu = hadamard::magic_unitary(&h)?;
        let sq = hadamard::commuting_square_check(&h)?;
        out.push(check(8, format!("magic unitary and commuting square for {}", h.provenance), sq.passes, format!("{:.1e}, {:.1e}", mu.defect(), sq.defect_diag_first.max(sq.defect_rotated_first))));
    }
    for n in [2u64, 3] {
        let h = hadamard::fourier(&[n])?;
        for k in 1..=3 {
            let d = hadamard::planar_dim(&h, k)?;
            let want = (n as usize).pow(k as u32 - 1);
            out.push(check(8, format!("planar_dim(F_{n}, {k}) = {want}"), d == want, d.to_string()));
        }
    }
    let mut ok = true;
    for m in 1..=4 {
        for n in 1..=4 {
            ok &= hadamard::kesten_moment(m, n, 2)? == q((m + n - 1) as i64);
        }
    }
    out.push(check(8, "kesten(M, N, 2) = M + N − 1 for M, N ≤ 4", ok, ""));
    for n in 1..=4 {
        for p in 1..=4 {
            let (a, b) = (hadamard::kesten_moment(2, n, p)?, hadamard::blowup_m2(n, p)?);
            out.push(check(8, format!("kesten(2, {n}, {p}) = blowup"), a == b, fmt_q(&a)));
        }
    }
    for p in 2..=3 {
        let rep = hadamard::convergence_check(&Q::one(), &Q::one(), p, &[1, 2, 3])?;
        let gaps: Vec<f64> = rep.rows.iter().map(|r| r.gap).collect();
        out.push(check(8, format!("kesten(K, K, {p})/K^{} → C_{p}", p - 1), rep.gaps_decrease() && rep.rows.len() == 3, list(&gaps)));
    }
    for (m, n, p) in [(3, 4, 2), (2, 3, 3), (2, 2, 4)] {
        let e = hadamard::gram_law_mc(m, n, p, 4000, seed)?;
        let exact = to_f64(&hadamard::kesten_moment(m, n, p)?);
        out.push(check(
            8,
            format!("Gram law MC ({m}, {n}, p = {p}) vs enumeration"),
            e.agrees(Complex64::new(exact, 0.0), 3.0),
            format!("{:.6} ± {:.1e} vs {exact}", e.mean.re, e.stderr),
        ));
    }
    Ok(out)
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}
