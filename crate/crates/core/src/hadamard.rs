//! Complex Hadamard matrices: Fourier and Diţă constructions, magic unitaries,
//! commuting squares, fixed-point dimensions and Kesten-type moments.
//!
//! Matrices built from roots of unity keep their phases as exponents over a
//! common order `L`, so that orthogonality and the intertwiner systems can be
//! settled exactly in `Q(ζ_L)`. Everything else falls back to `f64`.

use std::collections::HashSet;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cyclotomic::{cyclotomic_polynomial, Cyclotomic};
use crate::error::{guard, Error, Result};
use crate::exact::{binomial, det, factorial, to_f64, Q};
use crate::randmat::{CMatrix, GaussianStream, McEstimate};

pub const UNIT_TOL: f64 = 1e-10;
pub const ORTHO_TOL: f64 = 1e-8;
pub const MAGIC_TOL: f64 = 1e-9;
pub const RANK_CUTOFF: f64 = 1e-8;

pub const SYSTEM_LIMIT: u128 = 10_000;
pub const CESARO_LIMIT: u128 = 1_000_000;
pub const ENUMERATION_LIMIT: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum Entries {
    /// `H_ij = exp(2πi·exps[i][j]/order)`.
    Exact { order: u64, exps: Vec<Vec<u64>> },
    Float(Vec<Vec<Complex64>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct HadamardMatrix {
    pub n: usize,
    pub entries: Entries,
    pub provenance: String,
}

fn cis(order: u64, e: u64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * e as f64 / order as f64)
}

impl HadamardMatrix {
    pub fn from_exponents(order: u64, exps: Vec<Vec<u64>>, provenance: &str) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("phase order must be at least 1".into()));
        }
        let exps: Vec<Vec<u64>> = exps.into_iter().map(|r| r.into_iter().map(|e| e % order).collect()).collect();
        let h = HadamardMatrix { n: exps.len(), entries: Entries::Exact { order, exps }, provenance: provenance.into() };
        h.validate()?;
        Ok(h)
    }

    pub fn from_complex(rows: Vec<Vec<Complex64>>, provenance: &str) -> Result<Self> {
        let h = HadamardMatrix { n: rows.len(), entries: Entries::Float(rows), provenance: provenance.into() };
        h.validate()?;
        Ok(h)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.entries, Entries::Exact { .. })
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match &self.entries {
            Entries::Exact { order, exps } => cis(*order, exps[i][j]),
            Entries::Float(rows) => rows[i][j],
        }
    }

    pub fn to_cmatrix(&self) -> CMatrix {
        CMatrix::from_fn(self.n, self.n, |i, j| self.entry(i, j))
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::Invariant("empty matrix".into()));
        }
        match &self.entries {
            Entries::Exact { order, exps } => {
                if exps.iter().any(|r| r.len() != n) {
                    return Err(Error::Invariant("matrix is not square".into()));
                }
                let l = *order as i64;
                for i in 0..n {
                    for j in i + 1..n {
                        let mut s = Cyclotomic::zero(*order);
                        for k in 0..n {
                            s = s.add(&Cyclotomic::root(*order, exps[i][k] as i64 - exps[j][k] as i64 + l));
                        }
                        if !s.is_zero() {
                            return Err(Error::Invariant(format!("rows {} and {} are not orthogonal", i + 1, j + 1)));
                        }
                    }
                }
            }
            Entries::Float(rows) => {
                if rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Invariant("matrix is not square".into()));
                }
                for (i, r) in rows.iter().enumerate() {
                    for (j, z) in r.iter().enumerate() {
                        if (z.norm() - 1.0).abs() > UNIT_TOL {
                            return Err(Error::Invariant(format!("|H[{}][{}]| = {} ≠ 1", i + 1, j + 1, z.norm())));
                        }
                    }
                }
                for i in 0..n {
                    for j in 0..n {
                        let s: Complex64 = (0..n).map(|k| rows[i][k] * rows[j][k].conj()).sum();
                        let want = if i == j { n as f64 } else { 0.0 };
                        if (s - want).norm() > ORTHO_TOL {
                            return Err(Error::Invariant(format!("rows {} and {} are not orthogonal", i + 1, j + 1)));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Kronecker product, `(H⊗K)_{ia,jb} = H_ij K_ab`.
    pub fn tensor(&self, other: &HadamardMatrix) -> Result<HadamardMatrix> {
        let (n, m) = (self.n, other.n);
        let prov = format!("{} ⊗ {}", self.provenance, other.provenance);
        match (&self.entries, &other.entries) {
            (Entries::Exact { order: a, exps: x }, Entries::Exact { order: b, exps: y }) => {
                let l = a.lcm(b);
                let exps = (0..n * m)
                    .map(|r| (0..n * m).map(|c| x[r / m][c / m] * (l / a) + y[r % m][c % m] * (l / b)).collect())
                    .collect();
                HadamardMatrix::from_exponents(l, exps, &prov)
            }
            _ => {
                let rows = (0..n * m)
                    .map(|r| (0..n * m).map(|c| self.entry(r / m, c / m) * other.entry(r % m, c % m)).collect())
                    .collect();
                HadamardMatrix::from_complex(rows, &prov)
            }
        }
    }

    /// `{"order": L, "exponents": [[...]]}` for exact matrices, `{"entries": [[[re, im]]]}` otherwise.
    pub fn to_json(&self) -> Value {
        match &self.entries {
            Entries::Exact { order, exps } => json!({ "order": order, "exponents": exps }),
            Entries::Float(rows) => {
                json!({ "entries": rows.iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()).collect::<Vec<_>>() })
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("Hadamard JSON: {m}"));
        let order = v.get("order").and_then(Value::as_u64).ok_or_else(|| bad("missing integer `order`"))?;
        let rows = v.get("exponents").and_then(Value::as_array).ok_or_else(|| bad("missing `exponents`"))?;
        let exps = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| bad("rows must be arrays"))?
                    .iter()
                    .map(|e| {
                        e.as_i64().map(|e| e.rem_euclid(order.max(1) as i64) as u64).ok_or_else(|| bad("exponents must be integers"))
                    })
                    .collect()
            })
            .collect::<Result<Vec<Vec<u64>>>>()?;
        HadamardMatrix::from_exponents(order, exps, "file")
    }

    /// One matrix row per line, entries as consecutive `re,im` pairs.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let cells: Vec<String> = (0..self.n).map(|j| self.entry(i, j)).map(|z| format!("{:.17e},{:.17e}", z.re, z.im)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (no, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let xs = line
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", no + 1))))
                .collect::<Result<Vec<f64>>>()?;
            if xs.len() % 2 != 0 {
                return Err(Error::Parse(format!("line {}: odd number of values", no + 1)));
            }
            rows.push(xs.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect());
        }
        HadamardMatrix::from_complex(rows, "file")
    }
}

/// `F_{N_1} ⊗ … ⊗ F_{N_k}`, indexed by group elements in row-major order.
pub fn fourier(orders: &[u64]) -> Result<HadamardMatrix> {
    if orders.contains(&0) {
        return Err(Error::InvalidArgument("Fourier orders must be at least 1".into()));
    }
    let l = orders.iter().fold(1u64, |a, &b| a.lcm(&b));
    let size: usize = orders.iter().map(|&o| o as usize).product();
    let digits = |mut x: usize| {
        let mut d = vec![0u64; orders.len()];
        for (slot, &o) in d.iter_mut().zip(orders).rev() {
            *slot = (x % o as usize) as u64;
            x /= o as usize;
        }
        d
    };
    let exps = (0..size)
        .map(|i| {
            let di = digits(i);
            (0..size)
                .map(|j| {
                    let dj = digits(j);
                    orders.iter().enumerate().map(|(t, &o)| (l / o) * (di[t] * dj[t] % o)).sum::<u64>() % l
                })
                .collect()
        })
        .collect();
    let name = orders.iter().map(|o| format!("F_{o}")).collect::<Vec<_>>().join("⊗");
    HadamardMatrix::from_exponents(l, exps, if name.is_empty() { "F_1" } else { &name })
}

/// Diţă deformation `Q_{ib}(F_G)_{ij}(F_H)_{ab}` at row `(i,a)`, column `(j,b)`.
pub fn dita_deform(fg: &HadamardMatrix, fh: &HadamardMatrix, q: &[Vec<Complex64>]) -> Result<HadamardMatrix> {
    let (g, h) = (fg.n, fh.n);
    if q.len() != g || q.iter().any(|r| r.len() != h) {
        return Err(Error::SizeMismatch(format!("Q must be {g}×{h}")));
    }
    for (i, r) in q.iter().enumerate() {
        for (b, z) in r.iter().enumerate() {
            if (z.norm() - 1.0).abs() > UNIT_TOL {
                return Err(Error::Invariant(format!("|Q[{}][{}]| = {} ≠ 1", i + 1, b + 1, z.norm())));
            }
        }
    }
    let rows = (0..g * h)
        .map(|r| {
            let (i, a) = (r / h, r % h);
            (0..g * h)
                .map(|c| {
                    let (j, b) = (c / h, c % h);
                    q[i][b] * fg.entry(i, j) * fh.entry(a, b)
                })
                .collect()
        })
        .collect();
    HadamardMatrix::from_complex(rows, &format!("{} ⊗_Q {}", fg.provenance, fh.provenance))
}

/// `N×N` array of `N×N` projections, stored row-major.
#[derive(Clone, Debug)]
pub struct MagicUnitary {
    pub n: usize,
    pub p: Vec<CMatrix>,
}

impl MagicUnitary {
    pub fn get(&self, i: usize, j: usize) -> &CMatrix {
        &self.p[i * self.n + j]
    }

    /// Largest violation of the projection and row/column-sum conditions.
    pub fn defect(&self) -> f64 {
        let n = self.n;
        let id = CMatrix::identity(n, n);
        let mut worst: f64 = 0.0;
        for p in &self.p {
            worst = worst.max((p * p - p).camax()).max((p.adjoint() - p).camax());
        }
        for i in 0..n {
            let row: CMatrix = (0..n).fold(CMatrix::zeros(n, n), |acc, j| acc + self.get(i, j));
            let col: CMatrix = (0..n).fold(CMatrix::zeros(n, n), |acc, j| acc + self.get(j, i));
            worst = worst.max((row - &id).camax()).max((col - &id).camax());
        }
        worst
    }

    pub fn check(&self) -> Result<()> {
        let d = self.defect();
        if d > MAGIC_TOL {
            return Err(Error::Invariant(format!("magic unitary defect {d:e}")));
        }
        Ok(())
    }
}

/// `ξ = H_i/H_j` entrywise.
fn ratio(h: &HadamardMatrix, i: usize, j: usize) -> Vec<Complex64> {
    (0..h.n).map(|k| h.entry(i, k) * h.entry(j, k).conj()).collect()
}

/// `P_ij = Proj(H_i/H_j)`.
pub fn magic_unitary(h: &HadamardMatrix) -> Result<MagicUnitary> {
    h.validate()?;
    let n = h.n;
    let mut p = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let xi = ratio(h, i, j);
            p.push(CMatrix::from_fn(n, n, |a, b| xi[a] * xi[b].conj() / n as f64));
        }
    }
    let u = MagicUnitary { n, p };
    u.check()?;
    Ok(u)
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutingSquareReport {
    pub n: usize,
    /// `max ‖E_Δ E_{UΔU*}(e_ab) − tr(e_ab)·1‖`.
    pub defect_diag_first: f64,
    pub defect_rotated_first: f64,
    pub passes: bool,
}

/// Checks the square `Δ, UΔU*` with `U = H/√N`.
pub fn commuting_square_check(h: &HadamardMatrix) -> Result<CommutingSquareReport> {
    h.validate()?;
    let u = h.to_cmatrix() / Complex64::new((h.n as f64).sqrt(), 0.0);
    Ok(commuting_square_check_unitary(&u))
}

/// The same test for an arbitrary unitary `U`.
pub fn commuting_square_check_unitary(u: &CMatrix) -> CommutingSquareReport {
    let n = u.nrows();
    let diag = |m: &CMatrix| CMatrix::from_fn(n, n, |i, j| if i == j { m[(i, i)] } else { Complex64::zero() });
    let rot = |m: &CMatrix| u * diag(&(u.adjoint() * m * u)) * u.adjoint();
    let (mut d1, mut d2): (f64, f64) = (0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            let mut m = CMatrix::zeros(n, n);
            m[(a, b)] = Complex64::one();
            let tr = m.trace() / n as f64;
            let want = CMatrix::identity(n, n) * tr;
            d1 = d1.max((diag(&rot(&m)) - &want).camax());
            d2 = d2.max((rot(&diag(&m)) - &want).camax());
        }
    }
    CommutingSquareReport { n, defect_diag_first: d1, defect_rotated_first: d2, passes: d1 <= MAGIC_TOL && d2 <= MAGIC_TOL }
}

/// `G_{ia}^{jb} = Σ_k H_ik H̄_jk H̄_ak H_bk`.
#[derive(Clone, Debug)]
pub struct ProfileTensor {
    pub n: usize,
    pub g: Vec<Complex64>,
}

impl ProfileTensor {
    pub fn new(h: &HadamardMatrix) -> Self {
        let n = h.n;
        let mut g = vec![Complex64::zero(); n * n * n * n];
        for i in 0..n {
            for a in 0..n {
                for j in 0..n {
                    for b in 0..n {
                        g[((i * n + a) * n + j) * n + b] =
                            (0..n).map(|k| h.entry(i, k) * h.entry(j, k).conj() * h.entry(a, k).conj() * h.entry(b, k)).sum();
                    }
                }
            }
        }
        ProfileTensor { n, g }
    }

    /// `G_{ia}^{jb}`.
    pub fn get(&self, i: usize, a: usize, j: usize, b: usize) -> Complex64 {
        let n = self.n;
        self.g[((i * n + a) * n + j) * n + b]
    }

    /// `G^m_{x,y} = G_{x_m x_{m−1}}^{y_m y_{m−1}} ⋯ G_{x_2 x_1}^{y_2 y_1}`.
    pub fn power(&self, x: &[usize], y: &[usize]) -> Complex64 {
        (1..x.len()).map(|t| self.get(x[t], x[t - 1], y[t], y[t - 1])).product()
    }
}

/// Elements of `Z[Z_L]`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct GroupRing(Vec<i64>);

impl GroupRing {
    fn mul(&self, o: &GroupRing) -> GroupRing {
        let l = self.0.len();
        let mut c = vec![0i64; l];
        for (i, &x) in self.0.iter().enumerate().filter(|(_, x)| **x != 0) {
            for (j, &y) in o.0.iter().enumerate().filter(|(_, y)| **y != 0) {
                c[(i + j) % l] += x * y;
            }
        }
        GroupRing(c)
    }

    fn axpy(&mut self, s: i64, o: &GroupRing) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a += s * b;
        }
    }

    /// Coefficients modulo `Φ_L` after multiplying by `ζ^t`.
    fn reduce_shifted(&self, t: usize, phi: &[i64]) -> Vec<i64> {
        let l = self.0.len();
        let mut c = vec![0i64; l];
        for (i, &x) in self.0.iter().enumerate() {
            c[(i + t) % l] += x;
        }
        let d = phi.len() - 1;
        for i in (d..l).rev() {
            let lead = c[i];
            if lead != 0 {
                for (j, &p) in phi.iter().enumerate() {
                    c[i - d + j] -= lead * p;
                }
            }
        }
        c.truncate(d);
        c
    }
}

fn tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out.into_iter().flat_map(|t| (0..n).map(move |a| [t.clone(), vec![a]].concat())).collect();
    }
    out
}

fn flat(n: usize, t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &a| acc * n + a)
}

/// One linear equation per `(r, x, p, s, y, q)`: `Σ_a T_{xa} Ĝ^{k+2}_{rap,syq} − Σ_b Ĝ^{l+2}_{rxp,sbq} T_{by} = 0`,
/// with `Ĝ = G/N`. Each term is handed to `emit(row, unknown, lhs?, lower, upper)`.
fn for_each_term(n: usize, k: usize, l: usize, mut emit: impl FnMut(usize, usize, bool, &[usize], &[usize])) {
    let (xs, ys) = (tuples(n, l), tuples(n, k));
    let unknown = |x: &[usize], y: &[usize]| flat(n, x) * n.pow(k as u32) + flat(n, y);
    let mut row = 0;
    let mut lo = Vec::new();
    let mut up = Vec::new();
    for r in 0..n {
        for p in 0..n {
            for s in 0..n {
                for q in 0..n {
                    for x in &xs {
                        for y in &ys {
                            for a in &ys {
                                lo.clear();
                                up.clear();
                                lo.push(r);
                                lo.extend_from_slice(a);
                                lo.push(p);
                                up.push(s);
                                up.extend_from_slice(y);
                                up.push(q);
                                emit(row, unknown(x, a), true, &lo, &up);
                            }
                            for b in &xs {
                                lo.clear();
                                up.clear();
                                lo.push(r);
                                lo.extend_from_slice(x);
                                lo.push(p);
                                up.push(s);
                                up.extend_from_slice(b);
                                up.push(q);
                                emit(row, unknown(b, y), false, &lo, &up);
                            }
                            row += 1;
                        }
                    }
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arithmetic {
    Exact,
    Float,
}

/// Numeric rank with singular values above `RANK_CUTOFF·σ_max`.
pub fn numeric_rank(m: &CMatrix) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_CUTOFF * top).count()
}

fn system_guard(n: usize, k: usize, l: usize) -> Result<()> {
    guard("N^(max(k,l)+2)", (n as u128).pow(k.max(l) as u32 + 2), SYSTEM_LIMIT)
}

/// `dim Hom(u^{⊗k}, u^{⊗l})`, exactly when `H` has root-of-unity entries.
pub fn intertwiner_dim(h: &HadamardMatrix, k: usize, l: usize) -> Result<usize> {
    let arith = if h.is_exact() { Arithmetic::Exact } else { Arithmetic::Float };
    intertwiner_dim_with(h, k, l, arith)
}

pub fn intertwiner_dim_with(h: &HadamardMatrix, k: usize, l: usize, arith: Arithmetic) -> Result<usize> {
    h.validate()?;
    let n = h.n;
    system_guard(n, k, l)?;
    let unknowns = n.pow((k + l) as u32);
    let rows = n.pow((k + l + 4) as u32);
    match (arith, &h.entries) {
        (Arithmetic::Exact, Entries::Exact { order, exps }) => {
            let lo = *order as usize;
            let mut g = Vec::with_capacity(n.pow(4));
            for i in 0..n {
                for a in 0..n {
                    for j in 0..n {
                        for b in 0..n {
                            let mut c = vec![0i64; lo];
                            for t in 0..n {
                                let e = (exps[i][t] + 2 * *order - exps[j][t] - exps[a][t] + exps[b][t]) % *order;
                                c[e as usize] += 1;
                            }
                            g.push(GroupRing(c));
                        }
                    }
                }
            }
            let get = |i: usize, a: usize, j: usize, b: usize| &g[((i * n + a) * n + j) * n + b];
            let m = k.max(l) as u32;
            let (sl, sr) = ((n as i64).pow(m - k as u32), (n as i64).pow(m - l as u32));
            let mut coef: Vec<Vec<(usize, GroupRing)>> = vec![Vec::new(); rows];
            for_each_term(n, k, l, |row, u, lhs, x, y| {
                let mut c = GroupRing({
                    let mut v = vec![0i64; lo];
                    v[0] = 1;
                    v
                });
                for t in 1..x.len() {
                    c = c.mul(get(x[t], x[t - 1], y[t], y[t - 1]));
                }
                let s = if lhs { sl } else { -sr };
                match coef[row].iter_mut().find(|e| e.0 == u) {
                    Some(e) => e.1.axpy(s, &c),
                    None => {
                        let mut z = GroupRing(vec![0; lo]);
                        z.axpy(s, &c);
                        coef[row].push((u, z));
                    }
                }
            });
            let phi = cyclotomic_polynomial(*order);
            let d = phi.len() - 1;
            let mut seen: HashSet<Vec<i64>> = HashSet::new();
            for eq in &coef {
                let mut block = vec![vec![0i64; unknowns * d]; d];
                for (u, c) in eq {
                    for t in 0..d {
                        for (comp, x) in c.reduce_shifted(t, &phi).into_iter().enumerate() {
                            block[comp][u * d + t] = x;
                        }
                    }
                }
                for v in block {
                    let Some(&lead) = v.iter().find(|&&x| x != 0) else { continue };
                    let g = v.iter().fold(0i64, |a, &b| a.gcd(&b)) * lead.signum();
                    seen.insert(v.into_iter().map(|x| x / g).collect());
                }
            }
            let mat: Vec<Vec<BigInt>> = seen.into_iter().map(|v| v.into_iter().map(BigInt::from).collect()).collect();
            let r = crate::exact::rank(&mat);
            if !r.is_multiple_of(d) {
                return Err(Error::Consistency(format!("rational rank {r} is not a multiple of φ(L) = {d}")));
            }
            Ok(unknowns - r / d)
        }
        (Arithmetic::Exact, Entries::Float(_)) => Err(Error::Unsupported("exact rank needs root-of-unity entries".into())),
        (Arithmetic::Float, _) => {
            let g = ProfileTensor::new(h);
            let nf = n as f64;
            let mut a = CMatrix::zeros(rows, unknowns);
            for_each_term(n, k, l, |row, u, lhs, x, y| {
                let c = g.power(x, y) / nf.powi(x.len() as i32 - 1);
                a[(row, u)] += if lhs { c } else { -c };
            });
            Ok(unknowns - numeric_rank(&a))
        }
    }
}

/// `dim P_k = dim Fix(u^{⊗k})`.
pub fn planar_dim(h: &HadamardMatrix, k: usize) -> Result<usize> {
    intertwiner_dim(h, 0, k)
}

/// `dim {T : Σ_b P_{i_1 b_1}⋯P_{i_k b_k} T_b = T_i·1}` solved directly on the magic unitary.
pub fn fixed_space_dim(h: &HadamardMatrix, k: usize) -> Result<usize> {
    let n = h.n;
    system_guard(n, 0, k)?;
    let mu = magic_unitary(h)?;
    let ts = tuples(n, k);
    let size = ts.len();
    let mut a = CMatrix::zeros(size * n * n, size);
    for (ii, i) in ts.iter().enumerate() {
        for (bi, b) in ts.iter().enumerate() {
            let prod = i.iter().zip(b).fold(CMatrix::identity(n, n), |acc, (&x, &y)| acc * mu.get(x, y));
            for r in 0..n {
                for c in 0..n {
                    a[(ii * n * n + r * n + c, bi)] += prod[(r, c)];
                }
            }
        }
        for r in 0..n {
            a[(ii * n * n + r * n + r, ii)] -= Complex64::one();
        }
    }
    Ok(size - numeric_rank(&a))
}

#[derive(Clone, Debug)]
pub struct CesaroResult {
    pub p: usize,
    pub iterations: usize,
    pub matrix: CMatrix,
    /// Singular values above 1/2.
    pub rank: usize,
    /// `max |A² − A|`.
    pub idempotence_defect: f64,
    /// `max |A_k − A_{k−1}|` at the last step.
    pub last_step: f64,
}

/// `(1/k) Σ_{r=1}^k M^r` with `M_{ij} = tr(P_{i_1 j_1}⋯P_{i_p j_p})`.
pub fn cesaro_haar(h: &HadamardMatrix, p: usize, iterations: usize) -> Result<CesaroResult> {
    if p == 0 || iterations == 0 {
        return Err(Error::InvalidArgument("p and the iteration count must be at least 1".into()));
    }
    let n = h.n;
    guard("N^(2p)", (n as u128).pow(2 * p as u32), CESARO_LIMIT)?;
    let mu = magic_unitary(h)?;
    let ts = tuples(n, p);
    let size = ts.len();
    let mut m1 = CMatrix::zeros(size, size);
    for (ii, i) in ts.iter().enumerate() {
        for (ji, j) in ts.iter().enumerate() {
            let prod = i.iter().zip(j).fold(CMatrix::identity(n, n), |acc, (&x, &y)| acc * mu.get(x, y));
            m1[(ii, ji)] = prod.trace() / n as f64;
        }
    }
    let mut power = m1.clone();
    let mut sum = m1.clone();
    let mut last_step = 0.0;
    for r in 2..=iterations {
        power = &power * &m1;
        let prev = &sum / Complex64::new((r - 1) as f64, 0.0);
        sum += &power;
        last_step = (&sum / Complex64::new(r as f64, 0.0) - prev).camax();
    }
    let avg = sum / Complex64::new(iterations as f64, 0.0);
    let rank = avg.clone().singular_values().iter().filter(|&&s| s > 0.5).count();
    let idempotence_defect = (&avg * &avg - &avg).camax();
    Ok(CesaroResult { p, iterations, matrix: avg, rank, idempotence_defect, last_step })
}

fn positive(name: &str, x: usize) -> Result<()> {
    if x == 0 {
        return Err(Error::InvalidArgument(format!("{name} must be at least 1")));
    }
    Ok(())
}

/// `(1/MN)·#{(i, d) : [(i_r, d_r)]_r = [(i_r, d_{r−1})]_r as multisets}`, with `d_0 = d_p`.
pub fn kesten_moment(m: usize, n: usize, p: usize) -> Result<Q> {
    positive("M", m)?;
    positive("N", n)?;
    positive("p", p)?;
    let mn = m * n;
    guard("(MN)^p", (mn as u128).saturating_pow(p as u32), ENUMERATION_LIMIT)?;
    let rest = mn.pow(p as u32 - 1);
    let count: u64 = (0..mn)
        .into_par_iter()
        .map(|first| {
            let mut idx = vec![0usize; p];
            let mut left = vec![0usize; p];
            let mut right = vec![0usize; p];
            let mut hits = 0u64;
            for tail in 0..rest {
                idx[0] = first;
                let mut t = tail;
                for slot in idx[1..].iter_mut().rev() {
                    *slot = t % mn;
                    t /= mn;
                }
                for r in 0..p {
                    let (i, d) = (idx[r] / n, idx[r] % n);
                    let prev = idx[(r + p - 1) % p] % n;
                    left[r] = i * n + d;
                    right[r] = i * n + prev;
                }
                left.sort_unstable();
                right.sort_unstable();
                if left == right {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    Ok(Q::new(BigInt::from(count), BigInt::from(mn)))
}

/// Monte-Carlo `(1/N)·E tr(A^p)`, `A` the Gram matrix of the rows of a uniform `M×N` phase matrix and `tr = Tr/M`.
pub fn gram_law_mc(m: usize, n: usize, p: usize, samples: usize, seed: u64) -> Result<McEstimate> {
    positive("M", m)?;
    positive("N", n)?;
    positive("samples", samples)?;
    let values: Vec<Complex64> = (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            let mut g = GaussianStream::new(seed, s);
            let q = DMatrix::from_fn(m, n, |_, _| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * g.uniform()));
            let a = &q * q.adjoint();
            let mut ap = CMatrix::identity(m, m);
            for _ in 0..p {
                ap = &ap * &a;
            }
            Complex64::new(ap.trace().re / (m * n) as f64, 0.0)
        })
        .collect();
    Ok(McEstimate::from_values(&values))
}

/// `Σ_{|r|=k} multinomial(k; r_1..r_N)²`.
fn multinomial_square_sum(n: usize, k: usize) -> BigInt {
    // (k!)²·[x^k] (Σ_j x^j/(j!)²)^N
    let base: Vec<Q> = (0..=k).map(|j| Q::new(BigInt::one(), factorial(j as u64).pow(2))).collect();
    let mut acc = vec![Q::zero(); k + 1];
    acc[0] = Q::one();
    for _ in 0..n {
        let mut next = vec![Q::zero(); k + 1];
        for (i, a) in acc.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in base.iter().enumerate().take(k + 1 - i) {
                next[i + j] += a * b;
            }
        }
        acc = next;
    }
    (&acc[k] * Q::from_integer(factorial(k as u64).pow(2))).to_integer()
}

/// `∫χ^p` for the generic `F_2 ⊗_Q F_N` blowup: `(1/N) Σ_k C(p,2k) N^{p−2k} Σ_{|r|=k} multinomial(k; r)²`.
pub fn blowup_m2(n: usize, p: usize) -> Result<Q> {
    positive("N", n)?;
    let mut s = BigInt::zero();
    for k in 0..=p / 2 {
        s += binomial(p as u64, 2 * k as u64) * BigInt::from(n).pow((p - 2 * k) as u32) * multinomial_square_sum(n, k);
    }
    Ok(Q::new(s, BigInt::from(n)))
}

/// Narayana number `#{π ∈ NC(p) : |π| = r}`.
pub fn narayana(p: usize, r: usize) -> BigInt {
    if p == 0 || r == 0 || r > p {
        return BigInt::from((p == 0 && r == 0) as u8);
    }
    binomial(p as u64, r as u64) * binomial(p as u64, r as u64 - 1) / BigInt::from(p)
}

/// `Σ_r #{π ∈ NC(p) : |π| = r}·α^{r−1}β^{p−r}`.
pub fn asymptotic_moments(alpha: &Q, beta: &Q, p: usize) -> Result<Q> {
    if !alpha.is_positive() || !beta.is_positive() {
        return Err(Error::InvalidArgument("α and β must be positive".into()));
    }
    positive("p", p)?;
    Ok((1..=p)
        .map(|r| Q::from_integer(narayana(p, r)) * crate::exact::qpow(alpha, r as i64 - 1) * crate::exact::qpow(beta, (p - r) as i64))
        .sum())
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    #[serde(serialize_with = "ser_q")]
    pub kesten: Q,
    #[serde(serialize_with = "ser_q")]
    pub scaled: Q,
    pub gap: f64,
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::exact::fmt_q(x))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    #[serde(serialize_with = "ser_q")]
    pub limit: Q,
    pub rows: Vec<ConvergenceRow>,
    pub skipped: Vec<String>,
}

impl ConvergenceReport {
    pub fn gaps_decrease(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].gap <= w[0].gap)
    }
}

/// `kesten(αK, βK, p)/K^{p−1}` against the asymptotic value.
pub fn convergence_check(alpha: &Q, beta: &Q, p: usize, ks: &[usize]) -> Result<ConvergenceReport> {
    let limit = asymptotic_moments(alpha, beta, p)?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &k in ks {
        let (m, n) = (alpha * Q::from_integer(k.into()), beta * Q::from_integer(k.into()));
        if !m.is_integer() || !n.is_integer() || k == 0 {
            skipped.push(format!("K = {k}: αK = {} and βK = {} are not both positive integers", crate::exact::fmt_q(&m), crate::exact::fmt_q(&n)));
            continue;
        }
        let (m, n) = (to_f64(&m) as usize, to_f64(&n) as usize);
        let kesten = kesten_moment(m, n, p)?;
        let scaled = &kesten / Q::from_integer(BigInt::from(k).pow(p as u32 - 1));
        let gap = to_f64(&(&scaled - &limit)).abs();
        rows.push(ConvergenceRow { k, m, n, kesten, scaled, gap });
    }
    Ok(ConvergenceReport { limit, rows, skipped })
}

/// Every principal minor of the Hankel matrix `(m_{i+j})` is nonnegative.
pub fn hankel_psd(moments: &[Q]) -> bool {
    let size = moments.len().div_ceil(2);
    if size == 0 {
        return true;
    }
    let den = moments.iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
    let ints: Vec<BigInt> = moments.iter().map(|x| (x * Q::from_integer(den.clone())).to_integer()).collect();
    (1u32..1 << size).all(|mask| {
        let idx: Vec<usize> = (0..size).filter(|i| mask >> i & 1 == 1).collect();
        let m: Vec<Vec<BigInt>> = idx.iter().map(|&i| idx.iter().map(|&j| ints[i + j].clone()).collect()).collect();
        !det(&m).is_negative()
    })
}
