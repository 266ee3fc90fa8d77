//! Invariants of rooted bipartite graphs: Poincaré, theta and `T` series,
//! spectral and circular measures, Markov inclusions and the ADE catalog.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{binomial, q, to_f64, Q};
use crate::freeprob::NumericMeasure;
use crate::series::{one_minus_pow, one_plus_pow, Series};

/// A bipartite graph with multiplicity matrix `m` (|A|×|B|) rooted in layer A.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedBipartiteGraph {
    pub layer_a: Vec<String>,
    pub layer_b: Vec<String>,
    pub m: Vec<Vec<u64>>,
    pub root: usize,
}

impl RootedBipartiteGraph {
    pub fn new(m: Vec<Vec<u64>>, root: usize) -> Result<Self> {
        let a = m.len();
        let b = m.first().map_or(0, |r| r.len());
        let g = RootedBipartiteGraph {
            layer_a: (0..a).map(|i| format!("a{i}")).collect(),
            layer_b: (0..b).map(|j| format!("b{j}")).collect(),
            m,
            root,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let (a, b) = (self.layer_a.len(), self.layer_b.len());
        if a == 0 {
            return Err(Error::InvalidArgument("layer A is empty".into()));
        }
        if self.m.len() != a || self.m.iter().any(|r| r.len() != b) {
            return Err(Error::SizeMismatch(format!("multiplicity matrix must be {a}×{b}")));
        }
        if self.root >= a {
            return Err(Error::InvalidArgument(format!("root {} outside layer A", self.root)));
        }
        // connectivity by breadth-first search over both layers
        let mut seen = vec![false; a + b];
        let mut queue = VecDeque::from([self.root]);
        seen[self.root] = true;
        while let Some(v) = queue.pop_front() {
            let nbrs: Vec<usize> = if v < a {
                (0..b).filter(|&j| self.m[v][j] > 0).map(|j| a + j).collect()
            } else {
                (0..a).filter(|&i| self.m[i][v - a] > 0).collect()
            };
            for w in nbrs {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidArgument("graph is not connected".into()));
        }
        Ok(())
    }

    /// Builds the bipartition of an undirected multigraph on `0..n` by 2-coloring from `root`.
    pub fn from_edges(n: usize, edges: &[(usize, usize, u64)], root: usize) -> Result<Self> {
        let mut color = vec![None; n];
        color[root] = Some(false);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(x, y, _) in edges {
                let w = if x == v {
                    y
                } else if y == v {
                    x
                } else {
                    continue;
                };
                match color[w] {
                    None => {
                        color[w] = Some(!color[v].unwrap());
                        queue.push_back(w);
                    }
                    Some(c) if c == color[v].unwrap() => {
                        return Err(Error::InvalidArgument("graph is not bipartite".into()))
                    }
                    _ => {}
                }
            }
        }
        if color.iter().any(|c| c.is_none()) {
            return Err(Error::InvalidArgument("graph is not connected".into()));
        }
        let a: Vec<usize> = (0..n).filter(|&v| color[v] == Some(false)).collect();
        let b: Vec<usize> = (0..n).filter(|&v| color[v] == Some(true)).collect();
        let mut m = vec![vec![0u64; b.len()]; a.len()];
        for &(x, y, mult) in edges {
            let (u, w) = if color[x] == Some(false) { (x, y) } else { (y, x) };
            let i = a.iter().position(|&v| v == u).unwrap();
            let j = b.iter().position(|&v| v == w).unwrap();
            m[i][j] += mult;
        }
        let g = RootedBipartiteGraph {
            layer_a: a.iter().map(|v| format!("v{v}")).collect(),
            layer_b: b.iter().map(|v| format!("v{v}")).collect(),
            m,
            root: a.iter().position(|&v| v == root).unwrap(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.layer_a.len() + self.layer_b.len()
    }

    /// `L = m mᵗ` on layer A.
    pub fn laplace(&self) -> Vec<Vec<BigInt>> {
        let a = self.layer_a.len();
        (0..a)
            .map(|i| (0..a).map(|k| self.m[i].iter().zip(&self.m[k]).map(|(x, y)| BigInt::from(x * y)).sum()).collect())
            .collect()
    }

    fn matrix_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.layer_a.len(), self.layer_b.len(), |i, j| self.m[i][j] as f64)
    }

    pub fn to_json(&self) -> Value {
        let mut edges = Vec::new();
        for (i, row) in self.m.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if x > 0 {
                    edges.push(json!([self.layer_a[i], self.layer_b[j], x]));
                }
            }
        }
        json!({"layerA": self.layer_a, "layerB": self.layer_b, "edges": edges, "root": self.layer_a[self.root]})
    }

    /// Reads `{layerA, layerB, edges: [[a, b, mult]], root}`; vertices are names or 0-based indices.
    pub fn from_json(v: &Value) -> Result<Self> {
        let layer = |key: &str| -> Result<Vec<String>> {
            match &v[key] {
                Value::Array(xs) => xs
                    .iter()
                    .map(|x| match x {
                        Value::String(s) => Ok(s.clone()),
                        Value::Number(n) => Ok(n.to_string()),
                        _ => Err(Error::Parse(format!("bad vertex in {key}"))),
                    })
                    .collect(),
                Value::Number(n) => {
                    let c = n.as_u64().ok_or_else(|| Error::Parse(format!("bad size for {key}")))?;
                    Ok((0..c).map(|i| i.to_string()).collect())
                }
                _ => Err(Error::Parse(format!("missing {key}"))),
            }
        };
        let (la, lb) = (layer("layerA")?, layer("layerB")?);
        let find = |names: &[String], x: &Value| -> Result<usize> {
            match x {
                Value::String(s) => names.iter().position(|n| n == s),
                Value::Number(n) => n.as_u64().map(|i| i as usize).filter(|&i| i < names.len()),
                _ => None,
            }
            .ok_or_else(|| Error::Parse(format!("unknown vertex {x}")))
        };
        let mut m = vec![vec![0u64; lb.len()]; la.len()];
        for e in v["edges"].as_array().ok_or_else(|| Error::Parse("missing edges".into()))? {
            let e = e.as_array().filter(|e| e.len() == 2 || e.len() == 3).ok_or_else(|| Error::Parse(format!("bad edge {e}")))?;
            let mult = match e.get(2) {
                Some(x) => x.as_u64().ok_or_else(|| Error::Parse(format!("bad multiplicity {x}")))?,
                None => 1,
            };
            m[find(&la, &e[0])?][find(&lb, &e[1])?] += mult;
        }
        let root = match v.get("root") {
            Some(r) => find(&la, r)?,
            None => 0,
        };
        let g = RootedBipartiteGraph { layer_a: la, layer_b: lb, m, root };
        g.validate()?;
        Ok(g)
    }
}

/// `c_k = (L^k)_{root,root}` for `k ≤ order`.
pub fn loop_counts(g: &RootedBipartiteGraph, order: usize) -> Vec<BigInt> {
    let l = g.laplace();
    let a = l.len();
    let mut v: Vec<BigInt> = (0..a).map(|i| if i == g.root { BigInt::one() } else { BigInt::zero() }).collect();
    let mut out = Vec::with_capacity(order + 1);
    for _ in 0..=order {
        out.push(v[g.root].clone());
        v = (0..a).map(|i| (0..a).map(|k| &l[i][k] * &v[k]).sum()).collect();
    }
    out
}

/// Poincaré series `f(z) = Σ c_k z^k`.
pub fn poincare(g: &RootedBipartiteGraph, order: usize) -> Series {
    Series::new(loop_counts(g, order).into_iter().map(Q::from_integer).collect())
}

/// `Θ(q) = q + (1−q)/(1+q)·f(q/(1+q)²)` by substitution.
pub fn theta_from_poincare(f: &Series) -> Series {
    let r = f.order();
    let z = Series::x(r).div(&(&one_plus_pow(r, 1) * &one_plus_pow(r, 1))).expect("invertible");
    let fz = f.compose(&z).expect("z(0) = 0");
    let factor = one_minus_pow(r, 1).div(&one_plus_pow(r, 1)).expect("invertible");
    &Series::x(r) + &(&factor * &fz)
}

/// `Θ` by the coefficient formula `a_r = Σ_k (−1)^{r−k} 2r/(r+k)·C(r+k, r−k)·c_k`,
/// which gives `Θ − q`; `a_0 = c_0`.
pub fn theta_by_formula(f: &Series) -> Series {
    let r_max = f.order();
    let mut a = vec![Q::zero(); r_max + 1];
    a[0] = f.coeff(0);
    for (r, ar) in a.iter_mut().enumerate().skip(1) {
        let mut acc = Q::zero();
        for k in 0..=r {
            let c = Q::new(BigInt::from(2 * r as u64) * binomial((r + k) as u64, (r - k) as u64), BigInt::from((r + k) as u64));
            let term = c * f.coeff(k);
            if (r - k) % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        *ar = acc;
    }
    if r_max >= 1 {
        a[1] += Q::one();
    }
    Series::new(a)
}

/// Theta series, with the substitution and coefficient routes required to agree.
pub fn theta(f: &Series) -> Result<Series> {
    let s = theta_from_poincare(f);
    let t = theta_by_formula(f);
    if s != t {
        return Err(Error::Consistency("theta: substitution and coefficient formula disagree".into()));
    }
    Ok(s)
}

/// `T = (Θ − q)/(1 − q)`.
pub fn t_series(f: &Series) -> Result<Series> {
    let th = theta(f)?;
    let r = th.order();
    (&th - &Series::x(r)).div(&one_minus_pow(r, 1)).ok_or_else(|| Error::Invariant("1 − q is invertible".into()))
}

/// A factor `1 − q^n` or `1 + q^n` of a cyclotomic series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct XiFactor {
    pub n: usize,
    pub plus: bool,
}

impl XiFactor {
    pub fn minus(n: usize) -> Self {
        XiFactor { n, plus: false }
    }

    pub fn plus(n: usize) -> Self {
        XiFactor { n, plus: true }
    }

    fn series(&self, order: usize) -> Series {
        if self.plus {
            one_plus_pow(order, self.n)
        } else {
            one_minus_pow(order, self.n)
        }
    }
}

impl fmt::Display for XiFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.n, if self.plus { "+" } else { "" })
    }
}

/// `ξ(n_1,…:m_1,…)` divided by `(1−q)^{primes}` products: `primes = 1` is `ξ'`, `2` is `ξ''`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Xi {
    pub num: Vec<XiFactor>,
    pub den: Vec<XiFactor>,
    pub primes: usize,
}

impl Xi {
    pub fn series(&self, order: usize) -> Series {
        let mut s = Series::one(order);
        for f in &self.num {
            s = &s * &f.series(order);
        }
        let mut den = Series::one(order);
        for f in &self.den {
            den = &den * &f.series(order);
        }
        match self.primes {
            0 => {}
            1 => den = &den * &one_minus_pow(order, 1),
            _ => den = &den * &one_minus_pow(order, 2),
        }
        s.div(&den).expect("cyclotomic denominators are invertible")
    }
}

impl fmt::Display for Xi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[XiFactor]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "xi{}({}:{})", "'".repeat(self.primes), list(&self.num), list(&self.den))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AdeFamily {
    A,
    Atilde,
    D,
    Dtilde,
    E6,
    E7,
    E8,
    E6tilde,
    E7tilde,
    E8tilde,
}

impl AdeFamily {
    pub const ALL: [AdeFamily; 10] = [
        AdeFamily::A,
        AdeFamily::Atilde,
        AdeFamily::D,
        AdeFamily::Dtilde,
        AdeFamily::E6,
        AdeFamily::E7,
        AdeFamily::E8,
        AdeFamily::E6tilde,
        AdeFamily::E7tilde,
        AdeFamily::E8tilde,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AdeFamily::A => "A",
            AdeFamily::Atilde => "Atilde",
            AdeFamily::D => "D",
            AdeFamily::Dtilde => "Dtilde",
            AdeFamily::E6 => "E6",
            AdeFamily::E7 => "E7",
            AdeFamily::E8 => "E8",
            AdeFamily::E6tilde => "E6tilde",
            AdeFamily::E7tilde => "E7tilde",
            AdeFamily::E8tilde => "E8tilde",
        }
    }

    pub fn is_series(self) -> bool {
        matches!(self, AdeFamily::A | AdeFamily::Atilde | AdeFamily::D | AdeFamily::Dtilde)
    }

    /// Smallest valid parameter.
    pub fn min_n(self) -> usize {
        match self {
            AdeFamily::A => 2,
            AdeFamily::Atilde => 1,
            AdeFamily::D => 3,
            AdeFamily::Dtilde => 4,
            _ => 0,
        }
    }
}

impl FromStr for AdeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.replace(['~', '_'], "").to_ascii_lowercase();
        let t = t.strip_suffix("tilde").map(|x| format!("{x}~")).unwrap_or(t);
        Ok(match t.as_str() {
            "a" => AdeFamily::A,
            "a~" => AdeFamily::Atilde,
            "d" => AdeFamily::D,
            "d~" => AdeFamily::Dtilde,
            "e6" => AdeFamily::E6,
            "e7" => AdeFamily::E7,
            "e8" => AdeFamily::E8,
            "e6~" => AdeFamily::E6tilde,
            "e7~" => AdeFamily::E7tilde,
            "e8~" => AdeFamily::E8tilde,
            _ => return Err(Error::Parse(format!("unknown ADE family {s:?}"))),
        })
    }
}

impl fmt::Display for AdeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn path(len: usize) -> Vec<(usize, usize, u64)> {
    (1..len).map(|i| (i - 1, i, 1)).collect()
}

/// A path `0 − 1 − … − (len−1)` rooted at 0, plus a pendant arm of `arm` vertices at vertex `at`.
fn branched(len: usize, at: usize, arm: usize) -> (usize, Vec<(usize, usize, u64)>) {
    let mut e = path(len);
    let mut prev = at;
    for v in len..len + arm {
        e.push((prev, v, 1));
        prev = v;
    }
    (len + arm, e)
}

/// The Coxeter-Dynkin graph with the marked root. `A_n`, `D_n` have `n` vertices,
/// `Ã_{2n}` has `2n` and `D̃_n` has `n + 1`; `n` is ignored for the exceptional graphs.
pub fn ade(family: AdeFamily, n: usize) -> Result<RootedBipartiteGraph> {
    if family.is_series() && n < family.min_n() {
        return Err(Error::InvalidArgument(format!("{family}_{n}: n must be at least {}", family.min_n())));
    }
    let (v, e) = match family {
        AdeFamily::A => (n, path(n)),
        AdeFamily::Atilde if n == 1 => (2, vec![(0, 1, 2)]),
        AdeFamily::Atilde => {
            let mut e = path(2 * n);
            e.push((2 * n - 1, 0, 1));
            (2 * n, e)
        }
        AdeFamily::D => {
            let mut e = path(n - 1);
            e.push((n - 3, n - 1, 1));
            (n, e)
        }
        AdeFamily::Dtilde => {
            // root − c_1 − … − c_{n−3}, a leaf on c_1 and two leaves on c_{n−3}
            let mut e = path(n - 2);
            e.push((1, n - 2, 1));
            e.push((n - 3, n - 1, 1));
            e.push((n - 3, n, 1));
            (n + 1, e)
        }
        AdeFamily::E6 => branched(5, 2, 1),
        AdeFamily::E7 => branched(6, 3, 1),
        AdeFamily::E8 => branched(7, 4, 1),
        AdeFamily::E6tilde => branched(5, 2, 2),
        AdeFamily::E7tilde => branched(7, 3, 1),
        AdeFamily::E8tilde => branched(8, 5, 1),
    };
    RootedBipartiteGraph::from_edges(v, &e, 0)
}

/// The closed form of the `T` series of a catalog graph.
pub fn ade_t_formula(family: AdeFamily, n: usize) -> Result<Xi> {
    use XiFactor as F;
    let xi = |num: Vec<XiFactor>, den: Vec<XiFactor>, primes: usize| Ok(Xi { num, den, primes });
    if family.is_series() && n < family.min_n() {
        return Err(Error::InvalidArgument(format!("{family}_{n}: n must be at least {}", family.min_n())));
    }
    match family {
        // A_{m−1}: ξ(m−1 : m)
        AdeFamily::A => xi(vec![F::minus(n)], vec![F::minus(n + 1)], 0),
        // D_{m+1}: ξ(m−1⁺ : m⁺)
        AdeFamily::D => xi(vec![F::plus(n - 2)], vec![F::plus(n - 1)], 0),
        // Ã_{2m}: ξ'(m⁺ : m)
        AdeFamily::Atilde => xi(vec![F::plus(n)], vec![F::minus(n)], 1),
        // D̃_{m+2}: ξ''(m+1⁺ : m)
        AdeFamily::Dtilde => xi(vec![F::plus(n - 1)], vec![F::minus(n - 2)], 2),
        AdeFamily::E6 => xi(vec![F::minus(8)], vec![F::minus(3), F::plus(6)], 0),
        AdeFamily::E7 => xi(vec![F::minus(12)], vec![F::minus(4), F::plus(9)], 0),
        AdeFamily::E8 => xi(vec![F::plus(5), F::plus(9)], vec![F::plus(15)], 0),
        AdeFamily::E6tilde => xi(vec![F::plus(6)], vec![F::minus(3), F::minus(4)], 0),
        AdeFamily::E7tilde => xi(vec![F::plus(9)], vec![F::minus(4), F::minus(6)], 0),
        AdeFamily::E8tilde => xi(vec![F::plus(15)], vec![F::minus(6), F::minus(10)], 0),
    }
}

/// `‖X‖`, the largest singular value of `m`.
pub fn graph_norm(g: &RootedBipartiteGraph) -> f64 {
    g.matrix_f64().singular_values().iter().copied().fold(0.0, f64::max)
}

/// `x ≥ 4` or `x = 4cos²(π/n)` for some `n ≥ 3`, within `tol`.
pub fn admissible_index(x: f64, tol: f64) -> bool {
    if x >= 4.0 - tol {
        return true;
    }
    let mut n = 3u64;
    loop {
        let v = 4.0 * (PI / n as f64).cos().powi(2);
        if (x - v).abs() <= tol {
            return true;
        }
        if v > x + tol {
            return false;
        }
        n += 1;
    }
}

/// `μ = law(L)` at the root, as atoms `(eigenvalue, weight)`.
pub fn spectral_measure(g: &RootedBipartiteGraph) -> NumericMeasure {
    let m = g.matrix_f64();
    let l = &m * m.transpose();
    let eig = l.symmetric_eigen();
    let atoms: Vec<(f64, f64)> = (0..eig.eigenvalues.len())
        .map(|i| {
            let mut x = eig.eigenvalues[i];
            if (x - x.round()).abs() < 1e-9 {
                x = x.round();
            }
            (x, eig.eigenvectors[(g.root, i)].powi(2))
        })
        .collect();
    let mut mu = NumericMeasure::new(atoms);
    mu.atoms.retain(|a| a.1 > 1e-14);
    mu
}

/// A point of the circle `e^{2πi·num/den}`, or a real point off the circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CircPoint {
    Root { num: u64, den: u64 },
    Angle(f64),
    Real(f64),
}

impl CircPoint {
    pub fn root(num: i64, den: u64) -> Self {
        let num = num.rem_euclid(den as i64) as u64;
        let g = num.gcd(&den);
        CircPoint::Root { num: num / g, den: den / g }
    }

    /// The exact root of unity at this angle (in turns), when its order is at most `max_den`.
    pub fn from_turns(t: f64, max_den: u64) -> Self {
        let t = t.rem_euclid(1.0);
        for den in 1..=max_den {
            let num = (t * den as f64).round();
            if (t * den as f64 - num).abs() < 1e-9 {
                return CircPoint::root(num as i64, den);
            }
        }
        CircPoint::Angle(2.0 * PI * t)
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            CircPoint::Root { num, den } => Complex64::from_polar(1.0, 2.0 * PI * num as f64 / den as f64),
            CircPoint::Angle(th) => Complex64::from_polar(1.0, th),
            CircPoint::Real(x) => Complex64::new(x, 0.0),
        }
    }
}

impl fmt::Display for CircPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircPoint::Root { num, den } => write!(f, "exp(2pi i {num}/{den})"),
            CircPoint::Angle(th) => write!(f, "exp(i {th:.17})"),
            CircPoint::Real(x) => write!(f, "{x:.17}"),
        }
    }
}

/// Atoms on the unit circle (and on the real line past index 4).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircularMeasure {
    pub atoms: Vec<(CircPoint, f64)>,
    /// Set when real atoms from eigenvalues above 4 are present.
    pub experimental: bool,
}

impl CircularMeasure {
    /// Merges coincident points and drops zero weights.
    pub fn new(atoms: Vec<(CircPoint, f64)>) -> Self {
        let mut exact: BTreeMap<(u64, u64), f64> = BTreeMap::new();
        let mut other: Vec<(CircPoint, f64)> = Vec::new();
        for (p, w) in atoms {
            match p {
                CircPoint::Root { num, den } => *exact.entry((den, num)).or_insert(0.0) += w,
                _ => match other.iter_mut().find(|(x, _)| (x.to_complex() - p.to_complex()).norm() < 1e-9) {
                    Some(slot) => slot.1 += w,
                    None => other.push((p, w)),
                },
            }
        }
        let mut out: Vec<(CircPoint, f64)> =
            exact.into_iter().map(|((den, num), w)| (CircPoint::Root { num, den }, w)).collect();
        out.extend(other);
        out.retain(|a| a.1.abs() > 1e-13);
        let experimental = out.iter().any(|a| matches!(a.0, CircPoint::Real(_)));
        CircularMeasure { atoms: out, experimental }
    }

    /// Uniform measure `d_n` on the `2n`-th roots of unity.
    pub fn uniform(n: u64) -> Self {
        let w = 1.0 / (2 * n) as f64;
        CircularMeasure::new((0..2 * n).map(|j| (CircPoint::root(j as i64, 2 * n), w)).collect())
    }

    /// `d'_n = 2d_{2n} − d_n`, uniform on the odd `4n`-th roots.
    pub fn uniform_odd(n: u64) -> Self {
        Self::uniform(2 * n).scale(2.0).add(&Self::uniform(n).scale(-1.0))
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        CircularMeasure::new(self.atoms.iter().map(|&(p, w)| (p, c * w)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        CircularMeasure::new(self.atoms.iter().chain(&other.atoms).copied().collect())
    }

    /// `ρ(q)·dε(q)` for a real density `ρ`.
    pub fn with_density(&self, rho: impl Fn(Complex64) -> f64) -> Self {
        CircularMeasure::new(self.atoms.iter().map(|&(p, w)| (p, w * rho(p.to_complex()))).collect())
    }

    pub fn moment(&self, k: i32) -> Complex64 {
        self.atoms.iter().map(|&(p, w)| w * p.to_complex().powi(k)).sum()
    }

    /// `2∫(1 − q u²)^{-1} dε(u)` to the given order.
    pub fn stieltjes(&self, order: usize) -> Vec<f64> {
        (0..=order).map(|k| 2.0 * self.moment(2 * k as i32).re).collect()
    }
}

/// Pullback of `μ` under `q ↦ (q + q^{-1})²`, each atom split evenly over the four solutions.
pub fn circular_from_spectral(mu: &NumericMeasure) -> CircularMeasure {
    let mut atoms = Vec::new();
    for &(x, p) in &mu.atoms {
        let w = p / 4.0;
        if x <= 4.0 + 1e-12 {
            let c = (x.max(0.0).sqrt() / 2.0).min(1.0);
            let turns = c.acos() / (2.0 * PI);
            for t in [turns, -turns, 0.5 + turns, 0.5 - turns] {
                atoms.push((CircPoint::from_turns(t, 720), w));
            }
        } else {
            let s = x.sqrt();
            let r = (s + (x - 4.0).sqrt()) / 2.0;
            for y in [r, 1.0 / r, -r, -1.0 / r] {
                atoms.push((CircPoint::Real(y), w));
            }
        }
    }
    CircularMeasure::new(atoms)
}

pub fn circular_measure(g: &RootedBipartiteGraph) -> CircularMeasure {
    circular_from_spectral(&spectral_measure(g))
}

/// Densities `α = Re(1−q²)`, `β = Re(1−q⁴)`, `γ = Re(1−q⁶)`.
pub fn density(power: i32) -> impl Fn(Complex64) -> f64 {
    move |z: Complex64| 1.0 - z.powi(power).re
}

/// The closed form of the circular measure of a catalog graph, with the same parameter as [`ade`].
pub fn ade_circular_formula(family: AdeFamily, n: usize) -> Result<CircularMeasure> {
    if family.is_series() && n < family.min_n() {
        return Err(Error::InvalidArgument(format!("{family}_{n}: n must be at least {}", family.min_n())));
    }
    let d = |m: usize| CircularMeasure::uniform(m as u64);
    let dp = |m: usize| CircularMeasure::uniform_odd(m as u64);
    let (alpha, beta, gamma) = (density(2), density(4), density(6));
    let half = |parts: &[(f64, CircularMeasure)]| {
        parts.iter().fold(CircularMeasure::new(vec![]), |acc, (c, m)| acc.add(&m.scale(c / 2.0)))
    };
    Ok(match family {
        AdeFamily::A => d(n + 1).with_density(alpha),
        AdeFamily::Atilde => d(n),
        AdeFamily::D => dp(n - 1).with_density(alpha),
        AdeFamily::Dtilde => half(&[(1.0, d(n - 2)), (1.0, dp(1))]),
        AdeFamily::E6 => d(12).with_density(alpha).add(&half(&[(1.0, d(12)), (-1.0, d(6)), (-1.0, d(4)), (1.0, d(3))])),
        AdeFamily::E7 => dp(9).with_density(beta).add(&half(&[(1.0, dp(1)), (-1.0, dp(3))])),
        AdeFamily::E8 => dp(15)
            .with_density(alpha)
            .add(&dp(15).with_density(gamma))
            .add(&half(&[(-1.0, dp(5)), (-1.0, dp(3))])),
        AdeFamily::E6tilde => half(&[(1.0, d(3)), (1.0, d(3)), (1.0, d(2)), (-1.0, d(1))]),
        AdeFamily::E7tilde => half(&[(1.0, d(4)), (1.0, d(3)), (1.0, d(2)), (-1.0, d(1))]),
        AdeFamily::E8tilde => half(&[(1.0, d(5)), (1.0, d(3)), (1.0, d(2)), (-1.0, d(1))]),
    })
}

/// Outcome of [`markov_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarkovReport {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    /// `r = ‖b‖²/‖a‖²` as "p/q".
    pub r: String,
    pub markov: bool,
    pub r_integer: bool,
    pub norm: f64,
}

fn mat_vec(m: &[Vec<u64>], v: &[u64], transpose: bool) -> Vec<u64> {
    if transpose {
        let cols = m.first().map_or(0, |r| r.len());
        (0..cols).map(|j| m.iter().zip(v).map(|(row, x)| row[j] * x).sum()).collect()
    } else {
        m.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
    }
}

/// Checks `m·b = r·a` for `b = mᵗa` and `r = ‖b‖²/‖a‖²`.
pub fn markov_check(a: &[u64], m: &[Vec<u64>]) -> Result<MarkovReport> {
    if m.len() != a.len() || a.is_empty() {
        return Err(Error::SizeMismatch(format!("{} weights for {} rows", a.len(), m.len())));
    }
    if a.contains(&0) {
        return Err(Error::InvalidArgument("block sizes must be positive".into()));
    }
    let b = mat_vec(m, a, true);
    let norm2 = |v: &[u64]| v.iter().map(|x| BigInt::from(x * x)).sum::<BigInt>();
    let r = Q::new(norm2(&b), norm2(a));
    let mb = mat_vec(m, &b, false);
    let markov = mb.iter().zip(a).all(|(x, y)| Q::from_integer(BigInt::from(*x)) == &r * Q::from_integer(BigInt::from(*y)));
    let mf = DMatrix::from_fn(m.len(), b.len(), |i, j| m[i][j] as f64);
    Ok(MarkovReport {
        a: a.to_vec(),
        r: crate::exact::fmt_q(&r),
        r_integer: r.is_integer() && r.is_positive(),
        b,
        markov,
        norm: mf.singular_values().iter().copied().fold(0.0, f64::max),
    })
}

/// The reflected inclusion `B ⊂ A_1` with matrix `mᵗ` and weights `b = mᵗa`.
pub fn basic_construction(a: &[u64], m: &[Vec<u64>]) -> Result<(Vec<u64>, Vec<Vec<u64>>, MarkovReport)> {
    let rep = markov_check(a, m)?;
    let cols = m.first().map_or(0, |r| r.len());
    let mt: Vec<Vec<u64>> = (0..cols).map(|j| m.iter().map(|row| row[j]).collect()).collect();
    Ok((rep.b.clone(), mt, rep))
}

/// One floor of the Jones tower.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TowerStep {
    pub level: usize,
    pub report: MarkovReport,
    /// `‖m mᵗ m …‖` over `level + 1` factors, against `r^{(level+1)/2}`.
    pub product_norm: f64,
    pub expected: f64,
}

pub fn jones_tower(a: &[u64], m: &[Vec<u64>], depth: usize) -> Result<Vec<TowerStep>> {
    let mf = DMatrix::from_fn(m.len(), m.first().map_or(0, |r| r.len()), |i, j| m[i][j] as f64);
    let r0 = to_f64(&crate::exact::parse_q(&markov_check(a, m)?.r).expect("printed rational"));
    let (mut a, mut m) = (a.to_vec(), m.to_vec());
    let mut prod = mf.clone();
    let mut out = Vec::new();
    for level in 0..depth {
        let (b, mt, report) = basic_construction(&a, &m)?;
        if level > 0 {
            prod = if level % 2 == 1 { &prod * mf.transpose() } else { &prod * &mf };
        }
        let product_norm = prod.singular_values().iter().copied().fold(0.0, f64::max);
        out.push(TowerStep { level, report, product_norm, expected: r0.powf((level + 1) as f64 / 2.0) });
        a = b;
        m = mt;
    }
    Ok(out)
}

/// The Bratteli graph of `ℂ ⊂ M_n`: one edge of multiplicity `n`.
pub fn bratteli_matrix_algebra(n: u64) -> RootedBipartiteGraph {
    RootedBipartiteGraph::new(vec![vec![n]], 0).expect("one edge")
}

/// `c_0..c_K` of a series as integers, when they are.
pub fn integer_coefficients(s: &Series) -> Option<Vec<BigInt>> {
    s.coeffs().iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
}

pub fn series_from(values: &[i64]) -> Series {
    Series::new(values.iter().map(|&v| q(v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poincare_examples() {
        let a2 = ade(AdeFamily::A, 2).unwrap();
        assert!(poincare(&a2, 6).coeffs().iter().all(|c| *c == q(1)));
        let at2 = ade(AdeFamily::Atilde, 1).unwrap();
        assert_eq!(poincare(&at2, 3), series_from(&[1, 4, 16, 64]));
        assert_eq!(poincare(&bratteli_matrix_algebra(2), 1).coeff(1), q(4));
    }

    #[test]
    fn theta_of_trivial_series() {
        let f = Series::one(10);
        let want = &Series::x(10) + &one_minus_pow(10, 1).div(&one_plus_pow(10, 1)).unwrap();
        assert_eq!(theta(&f).unwrap(), want);
    }

    #[test]
    fn catalog_shapes() {
        let sizes = [
            (AdeFamily::A, 5, 5),
            (AdeFamily::D, 3, 3),
            (AdeFamily::D, 6, 6),
            (AdeFamily::Atilde, 3, 6),
            (AdeFamily::Dtilde, 4, 5),
            (AdeFamily::Dtilde, 7, 8),
            (AdeFamily::E6, 0, 6),
            (AdeFamily::E7, 0, 7),
            (AdeFamily::E8, 0, 8),
            (AdeFamily::E6tilde, 0, 7),
            (AdeFamily::E7tilde, 0, 8),
            (AdeFamily::E8tilde, 0, 9),
        ];
        for (f, n, v) in sizes {
            assert_eq!(ade(f, n).unwrap().vertex_count(), v, "{f}{n}");
        }
        let d4 = ade(AdeFamily::Dtilde, 4).unwrap();
        assert_eq!((d4.layer_a.len(), d4.layer_b.len()), (4, 1));
        assert!(ade(AdeFamily::A, 1).is_err());
        assert!(ade(AdeFamily::Dtilde, 3).is_err());
    }

    #[test]
    fn markov_examples() {
        let r = markov_check(&[1], &[vec![2]]).unwrap();
        assert_eq!((r.b.clone(), r.r.as_str(), r.markov), (vec![2], "4", true));
        assert!((r.norm - 2.0).abs() < 1e-12);
        let r = markov_check(&[1], &[vec![1, 1]]).unwrap();
        assert_eq!((r.b.clone(), r.r.as_str(), r.markov), (vec![1, 1], "2", true));
        let r = markov_check(&[1, 1], &[vec![1], vec![1]]).unwrap();
        assert_eq!((r.b.clone(), r.r.as_str(), r.markov), (vec![2], "2", true));
        let r = markov_check(&[1, 2], &[vec![1], vec![1]]).unwrap();
        assert!(!r.markov);
    }

    #[test]
    fn admissible_indices() {
        assert!(admissible_index(1.0, 1e-9));
        assert!(admissible_index(2.0, 1e-9));
        assert!(admissible_index((1.0 + 5f64.sqrt()) / 2.0 + 1.0, 1e-9));
        assert!(!admissible_index(1.5, 1e-9));
        assert!(admissible_index(4.5, 1e-9));
    }
}
