//! Classical and free probability at the level of moments and cumulants.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::exact::{binomial, fmt_q, parse_q, q, qpow, to_f64, Q};
use crate::partitions::{enumerate, Color, ColoredWord, PartitionClass};
use crate::series::Series;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Classical,
    Free,
}

impl Kind {
    fn class(self) -> PartitionClass {
        match self {
            Kind::Classical => PartitionClass::P,
            Kind::Free => PartitionClass::NC,
        }
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Kind::Classical),
            "free" => Ok(Kind::Free),
            _ => Err(Error::Parse(format!("unknown convolution kind '{s}'"))),
        }
    }
}

/// Moments `M_1..M_K`, with `M_0 = 1` implied.
///
/// For complex laws `moments` holds the holomorphic moments `E[x^k]` and the
/// full *-distribution lives in `colored`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MomentSequence {
    pub moments: Vec<Q>,
    pub colored: Vec<(ColoredWord, Q)>,
}

impl MomentSequence {
    pub fn new(moments: Vec<Q>) -> Self {
        MomentSequence { moments, colored: Vec::new() }
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Self::new(values.iter().map(|&v| q(v)).collect())
    }

    pub fn order(&self) -> usize {
        self.moments.len()
    }

    /// `M_k`, with `M_0 = 1`.
    pub fn get(&self, k: usize) -> Q {
        if k == 0 {
            Q::one()
        } else {
            self.moments[k - 1].clone()
        }
    }

    pub fn truncate(&self, k: usize) -> Self {
        Self::new(self.moments.iter().take(k).cloned().collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.moments.iter().map(to_f64).collect()
    }

    /// `M(z) = 1 + Σ M_k z^k`.
    pub fn generating(&self) -> Series {
        let mut c = vec![Q::one()];
        c.extend(self.moments.iter().cloned());
        Series::new(c)
    }
}

/// Atom position: a real rational or the root of unity `e^{2πi·num/den}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Position {
    Real(Q),
    Root { num: u64, den: u64 },
}

impl Position {
    pub fn root(num: i64, den: u64) -> Self {
        let n = num.rem_euclid(den as i64) as u64;
        let g = n.gcd(&den);
        Position::Root { num: n / g, den: den / g }
    }

    fn canonical(self) -> Self {
        match self {
            Position::Root { num, den } => match Position::root(num as i64, den) {
                Position::Root { num: 0, .. } => Position::Real(Q::one()),
                Position::Root { num: 1, den: 2 } => Position::Real(-Q::one()),
                p => p,
            },
            p => p,
        }
    }

    pub fn as_real(&self) -> Option<Q> {
        match self {
            Position::Real(x) => Some(x.clone()),
            Position::Root { .. } => None,
        }
    }

    /// `z^a z̄^c` as a cyclotomic number.
    fn power(&self, a: usize, c: usize) -> Cyclotomic {
        match self {
            Position::Real(x) => Cyclotomic::rational(1, qpow(x, (a + c) as i64)),
            Position::Root { num, den } => Cyclotomic::root(*den, *num as i64 * (a as i64 - c as i64)),
        }
    }
}

/// A finitely supported positive measure with exact atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteMeasure {
    atoms: Vec<(Position, Q)>,
}

impl DiscreteMeasure {
    /// Merges repeated positions and drops zero weights.
    pub fn new(atoms: Vec<(Position, Q)>) -> Result<Self> {
        let mut merged: Vec<(Position, Q)> = Vec::new();
        for (p, w) in atoms {
            if w.is_negative() {
                return Err(Error::InvalidArgument(format!("negative weight {}", fmt_q(&w))));
            }
            let p = p.canonical();
            match merged.iter_mut().find(|(x, _)| *x == p) {
                Some((_, acc)) => *acc += w,
                None => merged.push((p, w)),
            }
        }
        merged.retain(|(_, w)| !w.is_zero());
        merged.sort();
        Ok(DiscreteMeasure { atoms: merged })
    }

    pub fn dirac(x: Q) -> Self {
        DiscreteMeasure { atoms: vec![(Position::Real(x), Q::one())] }
    }

    /// `ε_s`, the uniform measure on the `s`-th roots of unity.
    pub fn roots_of_unity(s: u64) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidArgument("s must be at least 1".into()));
        }
        let w = Q::new(1.into(), s.into());
        Self::new((0..s as i64).map(|j| (Position::root(j, s), w.clone())).collect())
    }

    /// `Σ w_i δ_{x_i}` over real rationals.
    pub fn real(atoms: &[(Q, Q)]) -> Result<Self> {
        Self::new(atoms.iter().map(|(x, w)| (Position::Real(x.clone()), w.clone())).collect())
    }

    pub fn atoms(&self) -> &[(Position, Q)] {
        &self.atoms
    }

    pub fn mass(&self) -> Q {
        self.atoms.iter().map(|(_, w)| w.clone()).sum()
    }

    pub fn is_probability(&self) -> bool {
        self.mass().is_one()
    }

    pub fn is_real(&self) -> bool {
        self.atoms.iter().all(|(p, _)| matches!(p, Position::Real(_)))
    }

    pub fn scale(&self, c: &Q) -> Self {
        DiscreteMeasure { atoms: self.atoms.iter().map(|(p, w)| (p.clone(), w * c)).collect() }
    }

    /// The measure with its atom at 0 removed.
    pub fn without_origin(&self) -> Self {
        DiscreteMeasure {
            atoms: self.atoms.iter().filter(|(p, _)| *p != Position::Real(Q::zero())).cloned().collect(),
        }
    }

    /// `∫ z^a z̄^c dμ`.
    pub fn colored_power(&self, a: usize, c: usize) -> Cyclotomic {
        self.atoms
            .iter()
            .fold(Cyclotomic::zero(1), |acc, (p, w)| acc.add(&p.power(a, c).scale(w)))
    }

    /// `∫ x^k dμ`; fails unless the value is rational.
    pub fn moment(&self, k: usize) -> Result<Q> {
        self.colored_power(k, 0)
            .as_rational()
            .ok_or_else(|| Error::Unsupported(format!("moment {k} of a circle-supported measure is not real")))
    }

    pub fn moments(&self, k: usize) -> Result<MomentSequence> {
        Ok(MomentSequence::new((1..=k).map(|i| self.moment(i)).collect::<Result<_>>()?))
    }
}

#[derive(Serialize, Deserialize)]
struct AtomRepr {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    root: Option<String>,
    w: String,
}

impl Serialize for DiscreteMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let reprs: Vec<AtomRepr> = self
            .atoms
            .iter()
            .map(|(p, w)| match p {
                Position::Real(x) => AtomRepr { x: Some(fmt_q(x)), root: None, w: fmt_q(w) },
                Position::Root { num, den } => AtomRepr { x: None, root: Some(format!("{num}/{den}")), w: fmt_q(w) },
            })
            .collect();
        reprs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiscreteMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let reprs = Vec::<AtomRepr>::deserialize(d)?;
        let mut atoms = Vec::new();
        for r in reprs {
            let w = parse_q(&r.w).ok_or_else(|| D::Error::custom(format!("bad weight '{}'", r.w)))?;
            let p = match (r.x, r.root) {
                (Some(x), None) => Position::Real(parse_q(&x).ok_or_else(|| D::Error::custom(format!("bad position '{x}'")))?),
                (None, Some(z)) => {
                    let f = parse_q(&z).ok_or_else(|| D::Error::custom(format!("bad root '{z}'")))?;
                    let num: i64 = f.numer().try_into().map_err(D::Error::custom)?;
                    let den: u64 = f.denom().try_into().map_err(D::Error::custom)?;
                    Position::root(num, den)
                }
                _ => return Err(D::Error::custom("each atom needs exactly one of 'x' or 'root'")),
            };
            atoms.push((p, w));
        }
        DiscreteMeasure::new(atoms).map_err(D::Error::custom)
    }
}

/// A finitely supported measure on the real line with floating weights.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct NumericMeasure {
    pub atoms: Vec<(f64, f64)>,
}

impl NumericMeasure {
    /// Sorts atoms and merges positions closer than `1e-9`.
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Self {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (x, w) in atoms {
            match merged.last_mut() {
                Some((y, v)) if (x - *y).abs() < 1e-9 => *v += w,
                _ => merged.push((x, w)),
            }
        }
        NumericMeasure { atoms: merged }
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn moment(&self, k: usize) -> f64 {
        self.atoms.iter().map(|(x, w)| w * x.powi(k as i32)).sum()
    }
}

/// Measures whose Fourier transform can be evaluated.
pub trait RealAtoms {
    fn real_atoms(&self) -> Result<Vec<(f64, f64)>>;
}

impl RealAtoms for DiscreteMeasure {
    fn real_atoms(&self) -> Result<Vec<(f64, f64)>> {
        self.atoms
            .iter()
            .map(|(p, w)| match p {
                Position::Real(x) => Ok((to_f64(x), to_f64(w))),
                Position::Root { .. } => Err(Error::Unsupported("characteristic function of a circle-supported measure".into())),
            })
            .collect()
    }
}

impl RealAtoms for NumericMeasure {
    fn real_atoms(&self) -> Result<Vec<(f64, f64)>> {
        Ok(self.atoms.clone())
    }
}

/// `F(x) = Σ w_j e^{i x a_j}`.
pub fn characteristic_function<M: RealAtoms>(m: &M, x: f64) -> Result<Complex64> {
    Ok(m.real_atoms()?
        .iter()
        .map(|&(a, w)| Complex64::from_polar(w, x * a))
        .sum())
}

/// The laws of the catalog; `s = None` stands for `s = ∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Law {
    Gaussian(Q),
    Poisson(Q),
    Semicircle(Q),
    FreePoisson(Q),
    ComplexGaussian(Q),
    Circular(Q),
    Bessel { s: Option<u64>, t: Q },
    FreeBessel { s: Option<u64>, t: Q },
}

impl Law {
    /// Builds a law from its catalog name.
    pub fn from_name(name: &str, t: Q, s: Option<u64>) -> Result<Self> {
        let law = match name {
            "gaussian" => Law::Gaussian(t),
            "poisson" => Law::Poisson(t),
            "semicircle" => Law::Semicircle(t),
            "free-poisson" | "marchenko-pastur" => Law::FreePoisson(t),
            "complex-gaussian" => Law::ComplexGaussian(t),
            "circular" => Law::Circular(t),
            "bessel" => Law::Bessel { s, t },
            "free-bessel" => Law::FreeBessel { s, t },
            _ => return Err(Error::Parse(format!("unknown law '{name}'"))),
        };
        law.validate()?;
        Ok(law)
    }

    pub fn t(&self) -> &Q {
        match self {
            Law::Gaussian(t)
            | Law::Poisson(t)
            | Law::Semicircle(t)
            | Law::FreePoisson(t)
            | Law::ComplexGaussian(t)
            | Law::Circular(t) => t,
            Law::Bessel { t, .. } | Law::FreeBessel { t, .. } => t,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.t().is_positive() {
            return Err(Error::InvalidArgument(format!("t must be positive, got {}", fmt_q(self.t()))));
        }
        if let Law::Bessel { s: Some(0), .. } | Law::FreeBessel { s: Some(0), .. } = self {
            return Err(Error::InvalidArgument("s must be at least 1".into()));
        }
        Ok(())
    }

    pub fn is_complex(&self) -> bool {
        match self {
            Law::ComplexGaussian(_) | Law::Circular(_) => true,
            Law::Bessel { s, .. } | Law::FreeBessel { s, .. } => !matches!(s, Some(1) | Some(2)),
            _ => false,
        }
    }

    /// `∫ z^a z̄^c dρ` for the Lévy measure `ρ = t·ε_s` of the Bessel laws.
    fn bessel_rho(s: Option<u64>, t: &Q, a: usize, c: usize) -> Q {
        let d = a as i64 - c as i64;
        let hit = match s {
            Some(s) => d.rem_euclid(s as i64) == 0,
            None => d == 0,
        };
        if hit {
            t.clone()
        } else {
            Q::zero()
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s_str = |s: &Option<u64>| s.map_or("inf".to_string(), |s| s.to_string());
        match self {
            Law::Gaussian(t) => write!(f, "gaussian(t={})", fmt_q(t)),
            Law::Poisson(t) => write!(f, "poisson(t={})", fmt_q(t)),
            Law::Semicircle(t) => write!(f, "semicircle(t={})", fmt_q(t)),
            Law::FreePoisson(t) => write!(f, "free-poisson(t={})", fmt_q(t)),
            Law::ComplexGaussian(t) => write!(f, "complex-gaussian(t={})", fmt_q(t)),
            Law::Circular(t) => write!(f, "circular(t={})", fmt_q(t)),
            Law::Bessel { s, t } => write!(f, "bessel(s={}, t={})", s_str(s), fmt_q(t)),
            Law::FreeBessel { s, t } => write!(f, "free-bessel(s={}, t={})", s_str(s), fmt_q(t)),
        }
    }
}

/// Longest colored words tabulated by [`law_moments`] for complex laws.
pub const COLORED_TABLE_LENGTH: usize = 6;

/// Moments `M_1..M_K` of a catalog law.
pub fn law_moments(law: &Law, k: usize) -> Result<MomentSequence> {
    law.validate()?;
    if k == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    let t = law.t().clone();
    let cum = |f: &dyn Fn(usize) -> Q| Series::new((0..=k).map(|j| if j == 0 { Q::zero() } else { f(j) }).collect());
    let mut m = match law {
        Law::Gaussian(_) => moments(&cum(&|j| if j == 2 { t.clone() } else { Q::zero() }), Kind::Classical),
        Law::Semicircle(_) => moments(&cum(&|j| if j == 2 { t.clone() } else { Q::zero() }), Kind::Free),
        Law::Poisson(_) => moments(&cum(&|_| t.clone()), Kind::Classical),
        Law::FreePoisson(_) => moments(&cum(&|_| t.clone()), Kind::Free),
        Law::ComplexGaussian(_) | Law::Circular(_) => MomentSequence::new(vec![Q::zero(); k]),
        Law::Bessel { s, .. } => moments(&cum(&|j| Law::bessel_rho(*s, &t, j, 0)), Kind::Classical),
        Law::FreeBessel { s, .. } => moments(&cum(&|j| Law::bessel_rho(*s, &t, j, 0)), Kind::Free),
    };
    if law.is_complex() {
        for len in 1..=k.min(COLORED_TABLE_LENGTH) {
            for bits in 0..1u32 << len {
                let word = ColoredWord(
                    (0..len).map(|i| if bits >> i & 1 == 1 { Color::Black } else { Color::White }).collect(),
                );
                let v = colored_moment(law, &word)?;
                m.colored.push((word, v));
            }
        }
    }
    Ok(m)
}

/// The *-moment `E[x^{e_1} … x^{e_p}]`, with white for `x` and black for `x*`.
pub fn colored_moment(law: &Law, word: &ColoredWord) -> Result<Q> {
    law.validate()?;
    let p = word.len();
    if p == 0 {
        return Ok(Q::one());
    }
    let t = law.t().clone();
    let pairs = |class| -> Result<Q> {
        let n = enumerate(class, p, Some(word))?.len() as i64;
        Ok(if p.is_multiple_of(2) { qpow(&t, p as i64 / 2) * q(n) } else { Q::zero() })
    };
    match law {
        Law::ComplexGaussian(_) => pairs(PartitionClass::MatchedP2),
        Law::Circular(_) => pairs(PartitionClass::MatchedNC2),
        Law::Bessel { s, .. } => {
            compound_colored_with(Kind::Classical, word, |a, c| Cyclotomic::rational(1, Law::bessel_rho(*s, &t, a, c)))?
                .as_rational()
                .ok_or_else(|| Error::Invariant("Bessel *-moment is not rational".into()))
        }
        Law::FreeBessel { s, .. } => {
            compound_colored_with(Kind::Free, word, |a, c| Cyclotomic::rational(1, Law::bessel_rho(*s, &t, a, c)))?
                .as_rational()
                .ok_or_else(|| Error::Invariant("free Bessel *-moment is not rational".into()))
        }
        _ => Ok(law_moments(law, p)?.get(p)),
    }
}

/// Classical or free cumulants `κ_1..κ_K` as a series with `c_0 = 0`.
pub fn cumulants(m: &MomentSequence, kind: Kind) -> Series {
    let k = m.order();
    let mut kappa = vec![Q::zero(); k + 1];
    match kind {
        Kind::Classical => {
            for n in 1..=k {
                let mut acc = m.get(n);
                for j in 1..n {
                    acc -= Q::from_integer(binomial(n as u64 - 1, j as u64 - 1)) * &kappa[j] * m.get(n - j);
                }
                kappa[n] = acc;
            }
        }
        Kind::Free => {
            let gen = m.generating();
            let mut power = Series::one(k);
            let mut powers = vec![power.clone()];
            for _ in 1..=k {
                power = &power * &gen;
                powers.push(power.clone());
            }
            for n in 1..=k {
                let mut acc = m.get(n);
                for s in 1..n {
                    acc -= &kappa[s] * powers[s].coeff(n - s);
                }
                kappa[n] = acc;
            }
        }
    }
    Series::new(kappa)
}

/// Inverse of [`cumulants`]: `c` holds `κ_j` at index `j`.
pub fn moments(c: &Series, kind: Kind) -> MomentSequence {
    let k = c.order();
    let mut m = vec![Q::zero(); k + 1];
    m[0] = Q::one();
    match kind {
        Kind::Classical => {
            for n in 1..=k {
                let mut acc = Q::zero();
                for j in 1..=n {
                    acc += Q::from_integer(binomial(n as u64 - 1, j as u64 - 1)) * c.coeff(j) * &m[n - j];
                }
                m[n] = acc;
            }
        }
        Kind::Free => {
            // M = 1 + Σ κ_s (zM)^s gains one correct coefficient per pass
            let one = Series::one(k);
            let mut gen = one.clone();
            for _ in 0..k {
                let zm = gen.shift(1);
                let mut acc = one.clone();
                let mut power = one.clone();
                for s in 1..=k {
                    power = &power * &zm;
                    acc = &acc + &power.scale(&c.coeff(s));
                }
                gen = acc;
            }
            m = gen.coeffs().to_vec();
        }
    }
    MomentSequence::new(m[1..].to_vec())
}

/// `a * b` (classical) or `a ⊞ b` (free), by cumulant additivity.
pub fn convolve(a: &MomentSequence, b: &MomentSequence, kind: Kind) -> Result<MomentSequence> {
    if a.order() != b.order() {
        return Err(Error::SizeMismatch(format!("truncations {} and {}", a.order(), b.order())));
    }
    Ok(moments(&(&cumulants(a, kind) + &cumulants(b, kind)), kind))
}

/// Compound (free) Poisson law with Lévy measure `ρ`: its cumulants are the moments of `ρ`.
///
/// For circle-supported `ρ` the holomorphic moments are returned when rational,
/// and the colored table always.
pub fn compound_poisson(rho: &DiscreteMeasure, kind: Kind, k: usize) -> Result<MomentSequence> {
    let mut c = vec![Q::zero()];
    for j in 1..=k {
        c.push(rho.moment(j)?);
    }
    let mut m = moments(&Series::new(c), kind);
    if !rho.is_real() {
        for len in 1..=k.min(COLORED_TABLE_LENGTH) {
            for bits in 0..1u32 << len {
                let word = ColoredWord(
                    (0..len).map(|i| if bits >> i & 1 == 1 { Color::Black } else { Color::White }).collect(),
                );
                if let Some(v) = compound_poisson_colored(rho, kind, &word)?.as_rational() {
                    m.colored.push((word, v));
                }
            }
        }
    }
    Ok(m)
}

/// *-moment of a compound (free) Poisson law, `Σ_{π} Π_{b∈π} ∫ z^{#∘b} z̄^{#•b} dρ`
/// over `P(p)` or `NC(p)`.
pub fn compound_poisson_colored(rho: &DiscreteMeasure, kind: Kind, word: &ColoredWord) -> Result<Cyclotomic> {
    compound_colored_with(kind, word, |a, c| rho.colored_power(a, c))
}

fn compound_colored_with(kind: Kind, word: &ColoredWord, rho: impl Fn(usize, usize) -> Cyclotomic) -> Result<Cyclotomic> {
    let p = word.len();
    let mut memo: HashMap<(usize, usize), Cyclotomic> = HashMap::new();
    let mut total = Cyclotomic::zero(1);
    for pi in enumerate(kind.class(), p, None)? {
        let mut term = Cyclotomic::rational(1, Q::one());
        for block in pi.blocks() {
            let a = block.iter().filter(|&&i| word.0[i] == Color::White).count();
            let key = (a, block.len() - a);
            let v = memo.entry(key).or_insert_with(|| rho(key.0, key.1));
            term = term.mul(v);
        }
        total = total.add(&term);
    }
    Ok(total)
}

/// `G(ξ) = Σ_{k ≥ 0} M_k ξ^{-k-1}`; coefficient `j` multiplies `ξ^{-j}`.
pub fn cauchy_series(m: &MomentSequence) -> Series {
    let mut c = vec![Q::zero()];
    c.push(Q::one());
    c.extend(m.moments.iter().cloned());
    Series::new(c)
}

/// `R(y) = r_0 + r_1 y + …` to order `K-1`, by reverting `h(z) = z M(z)`.
pub fn r_transform(m: &MomentSequence) -> Result<Series> {
    let k = m.order();
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one moment".into()));
    }
    let mut hc = vec![Q::zero()];
    hc.extend(m.generating().coeffs().iter().cloned());
    let h = Series::new(hc);
    let hinv = h.reversion().ok_or_else(|| Error::Invariant("z M(z) is not invertible".into()))?;
    // C(w) = w / h^{-1}(w) and R(w) = (C(w) - 1)/w
    let quotient = hinv.unshift(1).and_then(|s| s.inverse()).ok_or_else(|| Error::Invariant("reversion failed".into()))?;
    let r = (&quotient - &Series::one(k))
        .unshift(1)
        .ok_or_else(|| Error::Invariant("C(0) != 1".into()))?;
    if !r_transform_recomposes(m, &r) {
        return Err(Error::Consistency("R-transform does not recompose to the Cauchy series".into()));
    }
    Ok(r)
}

/// Checks `1 + h R(h) = M` with `h = z M(z)`, the power-series form of `G(R(ξ) + 1/ξ) = ξ`.
pub fn r_transform_recomposes(m: &MomentSequence, r: &Series) -> bool {
    let k = m.order();
    let gen = m.generating();
    let h = gen.shift(1);
    let Some(rh) = r.compose(&h.truncate(r.order())) else {
        return false;
    };
    let lhs = &Series::one(k) + &(&h * &rh.truncate(k)).truncate(k);
    lhs == gen.truncate(k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitTheorem {
    Clt,
    Cclt,
    FreeClt,
    Plt,
    FreePlt,
}

impl FromStr for LimitTheorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clt" => Ok(LimitTheorem::Clt),
            "cclt" => Ok(LimitTheorem::Cclt),
            "free-clt" => Ok(LimitTheorem::FreeClt),
            "plt" => Ok(LimitTheorem::Plt),
            "free-plt" => Ok(LimitTheorem::FreePlt),
            _ => Err(Error::Parse(format!("unknown limit theorem '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitRow {
    pub k: usize,
    pub value: f64,
    pub limit: f64,
    pub gap: f64,
}

impl LimitRow {
    /// `|value − limit| / max(1, |limit|)`.
    pub fn relative_gap(&self) -> f64 {
        self.gap / self.limit.abs().max(1.0)
    }
}

fn row(k: usize, value: f64, limit: f64) -> LimitRow {
    LimitRow { k, value, limit, gap: (value - limit).abs() }
}

/// Moments of the rescaled `n`-fold convolution of `base` against the limit law.
///
/// For `cclt` row `k` is the *-moment along the alternating word ∘•∘… of length `k`.
pub fn limit_theorem_check(base: &DiscreteMeasure, theorem: LimitTheorem, n: u64, k: usize) -> Result<Vec<LimitRow>> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidArgument("n and K must be positive".into()));
    }
    let nq = q(n as i64);
    let nf = n as f64;
    match theorem {
        LimitTheorem::Clt | LimitTheorem::FreeClt => {
            if !base.is_real() {
                return Err(Error::InvalidArgument("real CLTs need a real base measure".into()));
            }
            let m = base.moments(k.max(2))?;
            if !m.get(1).is_zero() {
                return Err(Error::InvalidArgument(format!("base is not centered: mean {}", fmt_q(&m.get(1)))));
            }
            let var = m.get(2);
            let (kind, limit) = match theorem {
                LimitTheorem::Clt => (Kind::Classical, Law::Gaussian(var)),
                _ => (Kind::Free, Law::Semicircle(var)),
            };
            let m = m.truncate(k);
            let summed = moments(&cumulants(&m, kind).scale(&nq), kind);
            let target = law_moments(&limit, k)?;
            Ok((1..=k)
                .map(|j| row(j, to_f64(&summed.get(j)) / nf.powf(j as f64 / 2.0), to_f64(&target.get(j))))
                .collect())
        }
        LimitTheorem::Plt | LimitTheorem::FreePlt => {
            if !base.is_real() {
                return Err(Error::InvalidArgument("Poisson limits need a real base measure".into()));
            }
            let kind = if theorem == LimitTheorem::Plt { Kind::Classical } else { Kind::Free };
            let m = base.moments(k)?;
            let summed = moments(&cumulants(&m, kind).scale(&nq), kind);
            let rho = base.without_origin().scale(&nq);
            let target = compound_poisson(&rho, kind, k)?;
            Ok((1..=k).map(|j| row(j, to_f64(&summed.get(j)), to_f64(&target.get(j)))).collect())
        }
        LimitTheorem::Cclt => {
            if !base.colored_power(1, 0).is_zero() {
                return Err(Error::InvalidArgument("base is not centered".into()));
            }
            let t = base
                .colored_power(1, 1)
                .as_rational()
                .ok_or_else(|| Error::Invariant("E|z|² is not rational".into()))?;
            let limit = Law::ComplexGaussian(t);
            let mut rows = Vec::with_capacity(k);
            for j in 1..=k {
                let word = ColoredWord::alternating(j);
                let value = classical_sum_colored(base, n, &word)?.to_complex().re / nf.powf(j as f64 / 2.0);
                rows.push(row(j, value, to_f64(&colored_moment(&limit, &word)?)));
            }
            Ok(rows)
        }
    }
}

/// *-moment of `x_1 + … + x_n` for i.i.d. copies of `base`, through colored classical cumulants.
fn classical_sum_colored(base: &DiscreteMeasure, n: u64, word: &ColoredWord) -> Result<Cyclotomic> {
    let p = word.len();
    let nq = q(n as i64);
    let mut kappa: HashMap<(usize, usize), Cyclotomic> = HashMap::new();
    let mut cumulant = |a: usize, c: usize| -> Result<Cyclotomic> {
        if let Some(v) = kappa.get(&(a, c)) {
            return Ok(v.clone());
        }
        let sub: Vec<Color> = std::iter::repeat_n(Color::White, a).chain(std::iter::repeat_n(Color::Black, c)).collect();
        let mut acc = Cyclotomic::zero(1);
        for sigma in enumerate(PartitionClass::P, a + c, None)? {
            let b = sigma.block_count() as u64;
            let sign = if b % 2 == 1 { Q::one() } else { -Q::one() };
            let mut term = Cyclotomic::rational(1, sign * Q::from_integer(crate::exact::factorial(b - 1)));
            for block in sigma.blocks() {
                let wa = block.iter().filter(|&&i| sub[i] == Color::White).count();
                term = term.mul(&base.colored_power(wa, block.len() - wa));
            }
            acc = acc.add(&term);
        }
        kappa.insert((a, c), acc.clone());
        Ok(acc)
    };
    let mut total = Cyclotomic::zero(1);
    for pi in enumerate(PartitionClass::P, p, None)? {
        let mut term = Cyclotomic::rational(1, Q::one());
        for block in pi.blocks() {
            let a = block.iter().filter(|&&i| word.0[i] == Color::White).count();
            term = term.mul(&cumulant(a, block.len() - a)?.scale(&nq));
        }
        total = total.add(&term);
    }
    Ok(total)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate_adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `∫ x^k dγ_1` against the semicircle density `√(4-x²)/2π`.
pub fn semicircle_density_moment(k: usize, tol: f64) -> f64 {
    let f = |x: f64| x.powi(k as i32) * (4.0 - x * x).max(0.0).sqrt() / (2.0 * std::f64::consts::PI);
    integrate_adaptive(&f, -2.0, 2.0, tol)
}

/// `∫ x^k dπ_t` for `k ≥ 1` against the absolutely continuous part of the free Poisson law.
pub fn free_poisson_density_moment(t: f64, k: usize, tol: f64) -> f64 {
    let (a, b) = ((1.0 - t.sqrt()).powi(2), (1.0 + t.sqrt()).powi(2));
    let f = |x: f64| {
        if x <= 0.0 {
            0.0
        } else {
            x.powi(k as i32 - 1) * ((b - x) * (x - a)).max(0.0).sqrt() / (2.0 * std::f64::consts::PI)
        }
    };
    integrate_adaptive(&f, a, b, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qf;

    fn ints(m: &MomentSequence) -> Vec<i64> {
        m.moments.iter().map(|x| x.numer().try_into().unwrap()).collect()
    }

    #[test]
    fn catalog() {
        assert_eq!(ints(&law_moments(&Law::Poisson(q(1)), 4).unwrap()), vec![1, 2, 5, 15]);
        assert_eq!(ints(&law_moments(&Law::Semicircle(q(1)), 6).unwrap()), vec![0, 1, 0, 2, 0, 5]);
        assert_eq!(ints(&law_moments(&Law::Gaussian(q(1)), 6).unwrap()), vec![0, 1, 0, 3, 0, 15]);
        assert_eq!(ints(&law_moments(&Law::FreePoisson(q(1)), 5).unwrap()), vec![1, 2, 5, 14, 42]);
        let c = law_moments(&Law::ComplexGaussian(q(1)), 4).unwrap();
        let ww: ColoredWord = "o o x x".parse().unwrap();
        assert_eq!(c.colored.iter().find(|(w, _)| *w == ww).unwrap().1, q(2));
        assert_eq!(colored_moment(&Law::Circular(q(1)), &ww).unwrap(), q(1));
        assert!(law_moments(&Law::Poisson(q(0)), 4).is_err());
    }

    #[test]
    fn cumulant_round_trip() {
        let m = MomentSequence::new(vec![qf(1, 2), q(3), qf(-2, 7), q(5), q(0), qf(9, 4)]);
        for kind in [Kind::Classical, Kind::Free] {
            assert_eq!(moments(&cumulants(&m, kind), kind), m);
        }
        let c = cumulants(&law_moments(&Law::FreePoisson(qf(1, 3)), 6).unwrap(), Kind::Free);
        assert!(c.coeffs()[1..].iter().all(|x| *x == qf(1, 3)));
    }

    #[test]
    fn r_transforms() {
        let r = r_transform(&law_moments(&Law::Semicircle(q(1)), 8).unwrap()).unwrap();
        assert_eq!(r.coeff(1), q(1));
        assert!(r.coeffs().iter().enumerate().all(|(i, c)| i == 1 || c.is_zero()));
        let r = r_transform(&law_moments(&Law::FreePoisson(q(2)), 8).unwrap()).unwrap();
        assert!(r.coeffs().iter().all(|c| *c == q(2)));
        let r = r_transform(&DiscreteMeasure::dirac(q(3)).moments(5).unwrap()).unwrap();
        assert_eq!(r.coeff(0), q(3));
        assert!(r.coeffs()[1..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn bessel_laws() {
        let rho = DiscreteMeasure::roots_of_unity(2).unwrap();
        let m = compound_poisson(&rho, Kind::Free, 6).unwrap();
        assert_eq!(m, law_moments(&Law::FreeBessel { s: Some(2), t: q(1) }, 6).unwrap());
        assert!(m.moments.iter().step_by(2).all(|x| x.is_zero()));
        let rho = DiscreteMeasure::real(&[(q(1), q(1))]).unwrap();
        assert_eq!(compound_poisson(&rho, Kind::Classical, 5).unwrap(), law_moments(&Law::Poisson(q(1)), 5).unwrap());
        let w: ColoredWord = "o x".parse().unwrap();
        assert_eq!(colored_moment(&Law::FreeBessel { s: None, t: q(1) }, &w).unwrap(), q(1));
    }

    #[test]
    fn quadrature() {
        assert!((semicircle_density_moment(4, 1e-10) - 2.0).abs() < 1e-7);
        assert!((free_poisson_density_moment(1.0, 3, 1e-10) - 5.0).abs() < 1e-6);
    }
}
