//! Seeded samplers for Gaussian, Wigner, Wishart and Haar ensembles.
//!
//! Every sample is a pure function of `(seed, index)`: a ChaCha20 stream is
//! keyed by the seed with the sample index as stream number, and entries are
//! drawn from it in row-major order. Gaussians use the Box-Muller transform.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partitions::{Color, ColoredWord};

pub type CMatrix = DMatrix<Complex64>;

pub const GAUSSIAN_METHOD: &str = "box-muller/chacha20";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    ComplexGaussian,
    Wigner,
    Wishart,
    HaarOrthogonal,
    HaarUnitary,
}

impl Ensemble {
    pub const ALL: [Ensemble; 5] =
        [Ensemble::ComplexGaussian, Ensemble::Wigner, Ensemble::Wishart, Ensemble::HaarOrthogonal, Ensemble::HaarUnitary];

    pub fn name(self) -> &'static str {
        match self {
            Ensemble::ComplexGaussian => "complex-gaussian",
            Ensemble::Wigner => "wigner",
            Ensemble::Wishart => "wishart",
            Ensemble::HaarOrthogonal => "haar-orthogonal",
            Ensemble::HaarUnitary => "haar-unitary",
        }
    }

    pub fn is_hermitian(self) -> bool {
        matches!(self, Ensemble::Wigner | Ensemble::Wishart)
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ensemble::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown ensemble {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleSpec {
    pub kind: Ensemble,
    pub n: usize,
    /// Second dimension of the Wishart factor `Y` (N×M).
    pub m: usize,
    /// Variance `E|z|²` of the Gaussian entries.
    pub t: f64,
    pub seed: u64,
    pub samples: usize,
}

impl EnsembleSpec {
    pub fn new(kind: Ensemble, n: usize) -> Self {
        EnsembleSpec { kind, n, m: n, t: 1.0, seed: 42, samples: 1 }
    }

    pub fn m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn t(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        if self.kind == Ensemble::Wishart && self.m == 0 {
            return Err(Error::InvalidArgument("Wishart needs M ≥ 1".into()));
        }
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(Error::InvalidArgument(format!("variance t = {} must be positive", self.t)));
        }
        Ok(())
    }

    /// Scale applied before taking traces: `1/√N` for Gaussian and Wigner, `1/N` for Wishart.
    pub fn normalization(&self) -> f64 {
        match self.kind {
            Ensemble::ComplexGaussian | Ensemble::Wigner => 1.0 / (self.n as f64).sqrt(),
            Ensemble::Wishart => 1.0 / self.n as f64,
            Ensemble::HaarOrthogonal | Ensemble::HaarUnitary => 1.0,
        }
    }
}

/// Gaussian variates on one counter stream.
pub struct GaussianStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(index);
        GaussianStream { rng, spare: None }
    }

    /// Uniform on (0, 1].
    pub fn uniform(&mut self) -> f64 {
        // 53 random bits in (0, 1]
        ((self.rng.next_u64() >> 11) as f64 + 1.0) / (1u64 << 53) as f64
    }

    /// Standard real normal.
    pub fn normal(&mut self) -> f64 {
        if let Some(x) = self.spare.take() {
            return x;
        }
        let (u, v) = (self.uniform(), self.uniform());
        let r = (-2.0 * u.ln()).sqrt();
        let th = 2.0 * std::f64::consts::PI * v;
        self.spare = Some(r * th.sin());
        r * th.cos()
    }

    /// Complex normal with `E|z|² = t`.
    pub fn complex(&mut self, t: f64) -> Complex64 {
        let s = (t / 2.0).sqrt();
        Complex64::new(s * self.normal(), s * self.normal())
    }
}

fn gaussian_matrix(g: &mut GaussianStream, rows: usize, cols: usize, t: f64) -> CMatrix {
    let mut z = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            z[(i, j)] = g.complex(t);
        }
    }
    z
}

fn haar(g: &mut GaussianStream, n: usize, real: bool) -> CMatrix {
    let mut z = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            z[(i, j)] = if real { Complex64::new(g.normal(), 0.0) } else { g.complex(1.0) };
        }
    }
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Sample `index` of the ensemble.
pub fn sample(spec: &EnsembleSpec, index: u64) -> Result<CMatrix> {
    spec.validate()?;
    let mut g = GaussianStream::new(spec.seed, index);
    let n = spec.n;
    Ok(match spec.kind {
        Ensemble::ComplexGaussian => gaussian_matrix(&mut g, n, n, spec.t),
        Ensemble::Wigner => {
            let mut z = CMatrix::zeros(n, n);
            for i in 0..n {
                z[(i, i)] = Complex64::new(spec.t.sqrt() * g.normal(), 0.0);
                for j in i + 1..n {
                    let x = g.complex(spec.t);
                    z[(i, j)] = x;
                    z[(j, i)] = x.conj();
                }
            }
            z
        }
        Ensemble::Wishart => {
            let y = gaussian_matrix(&mut g, n, spec.m, spec.t);
            let mut w = &y * y.adjoint();
            for i in 0..n {
                w[(i, i)].im = 0.0;
                for j in i + 1..n {
                    w[(j, i)] = w[(i, j)].conj();
                }
            }
            w
        }
        Ensemble::HaarOrthogonal => haar(&mut g, n, true),
        Ensemble::HaarUnitary => haar(&mut g, n, false),
    })
}

/// Normalized trace `tr = Tr/N`.
pub fn normalized_trace(m: &CMatrix) -> Complex64 {
    m.trace() / m.nrows() as f64
}

fn sample_indices(spec: &EnsembleSpec) -> Result<Vec<u64>> {
    spec.validate()?;
    if spec.samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is needed".into()));
    }
    Ok((0..spec.samples as u64).collect())
}

/// Averages of `tr(X^j)` for `j = 1..k`, where `X` is the normalized sample.
pub fn empirical_moments(spec: &EnsembleSpec, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let c = Complex64::new(spec.normalization(), 0.0);
    let per: Vec<Vec<f64>> = sample_indices(spec)?
        .into_par_iter()
        .map(|i| {
            let x = sample(spec, i).expect("validated spec").map(|z| z * c);
            let mut p = x.clone();
            let mut out = Vec::with_capacity(k);
            for j in 1..=k {
                if j > 1 {
                    p = &p * &x;
                }
                out.push(normalized_trace(&p).re);
            }
            out
        })
        .collect();
    Ok(average(&per, k))
}

fn average(per: &[Vec<f64>], k: usize) -> Vec<f64> {
    let mut acc = vec![0.0; k];
    for row in per {
        for (a, x) in acc.iter_mut().zip(row) {
            *a += x;
        }
    }
    acc.iter().map(|a| a / per.len() as f64).collect()
}

/// Average of `tr(X^{e_1} ⋯ X^{e_k})` with `∘ ↦ X`, `• ↦ X*`.
pub fn empirical_colored_moment(spec: &EnsembleSpec, word: &ColoredWord) -> Result<Complex64> {
    let c = Complex64::new(spec.normalization(), 0.0);
    let per: Vec<Complex64> = sample_indices(spec)?
        .into_par_iter()
        .map(|i| {
            let x = sample(spec, i).expect("validated spec").map(|z| z * c);
            let xs = x.adjoint();
            let mut p = CMatrix::identity(spec.n, spec.n);
            for col in &word.0 {
                p = match col {
                    Color::White => &p * &x,
                    Color::Black => &p * &xs,
                };
            }
            normalized_trace(&p)
        })
        .collect();
    Ok(per.iter().sum::<Complex64>() / per.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalMeasure {
    /// Atoms of equal weight, ascending.
    pub points: Vec<f64>,
    pub normalization: String,
}

impl EmpiricalMeasure {
    pub fn new(mut points: Vec<f64>, normalization: impl Into<String>) -> Self {
        points.sort_by(f64::total_cmp);
        EmpiricalMeasure { points, normalization: normalization.into() }
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.points.len() as f64
    }

    pub fn merge(measures: &[EmpiricalMeasure]) -> Self {
        let points = measures.iter().flat_map(|m| m.points.iter().copied()).collect();
        let norm = measures.first().map(|m| m.normalization.clone()).unwrap_or_default();
        EmpiricalMeasure::new(points, norm)
    }

    pub fn moment(&self, k: u32) -> f64 {
        self.points.iter().map(|x| x.powi(k as i32)).sum::<f64>() * self.weight()
    }

    /// Fraction of mass outside `[lo, hi]`.
    pub fn mass_outside(&self, lo: f64, hi: f64) -> f64 {
        self.points.iter().filter(|&&x| x < lo || x > hi).count() as f64 * self.weight()
    }

    /// Counts per bin of `[lo, hi]`, with the bin edges.
    pub fn histogram(&self, bins: usize, lo: f64, hi: f64) -> Vec<(f64, f64, usize)> {
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0usize; bins];
        for &x in &self.points {
            if x >= lo && x <= hi {
                let b = (((x - lo) / width) as usize).min(bins - 1);
                counts[b] += 1;
            }
        }
        counts.into_iter().enumerate().map(|(b, c)| (lo + b as f64 * width, lo + (b + 1) as f64 * width, c)).collect()
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn spectrum(m: &CMatrix) -> Result<EmpiricalMeasure> {
    if m.nrows() != m.ncols() {
        return Err(Error::SizeMismatch(format!("{}×{} matrix is not square", m.nrows(), m.ncols())));
    }
    let gap = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if gap > 1e-10 {
        return Err(Error::InvalidArgument(format!("matrix is not Hermitian (gap {gap:e})")));
    }
    let eig = m.clone().symmetric_eigenvalues();
    Ok(EmpiricalMeasure::new(eig.iter().copied().collect(), "eigenvalues"))
}

/// Pooled spectrum of all normalized samples.
pub fn pooled_spectrum(spec: &EnsembleSpec) -> Result<EmpiricalMeasure> {
    if !spec.kind.is_hermitian() {
        return Err(Error::InvalidArgument(format!("{} samples are not Hermitian", spec.kind)));
    }
    let c = Complex64::new(spec.normalization(), 0.0);
    let parts: Vec<EmpiricalMeasure> = sample_indices(spec)?
        .into_par_iter()
        .map(|i| spectrum(&sample(spec, i).expect("validated spec").map(|z| z * c)))
        .collect::<Result<_>>()?;
    Ok(EmpiricalMeasure::merge(&parts))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HaarGroup {
    Orthogonal,
    Unitary,
}

impl FromStr for HaarGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "O" | "O_N" | "orthogonal" => Ok(HaarGroup::Orthogonal),
            "U" | "U_N" | "unitary" => Ok(HaarGroup::Unitary),
            _ => Err(Error::Parse(format!("unknown group {s:?}"))),
        }
    }
}

/// A coordinate `u_{ij}` (1-based) or its conjugate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Letter {
    pub i: usize,
    pub j: usize,
    pub conj: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: Complex64,
    pub stderr: f64,
    pub samples: usize,
}

impl McEstimate {
    pub fn from_values(v: &[Complex64]) -> Self {
        let n = v.len() as f64;
        let mean = v.iter().sum::<Complex64>() / n;
        let var = if v.len() > 1 { v.iter().map(|x| (x - mean).norm_sqr()).sum::<f64>() / (n - 1.0) } else { 0.0 };
        McEstimate { mean, stderr: (var / n).sqrt(), samples: v.len() }
    }

    /// `|mean − exact| ≤ z·stderr`, with a floor for estimates of zero variance.
    pub fn agrees(&self, exact: Complex64, z: f64) -> bool {
        (self.mean - exact).norm() <= z * self.stderr + 1e-12
    }
}

/// Monte-Carlo estimate of `∫ Π u_{i j}^{(*)}` over `O_N` or `U_N`.
pub fn haar_word_integral_mc(group: HaarGroup, n: usize, word: &[Letter], samples: usize, seed: u64) -> Result<McEstimate> {
    if let Some(l) = word.iter().find(|l| l.i == 0 || l.j == 0 || l.i > n || l.j > n) {
        return Err(Error::InvalidArgument(format!("index ({}, {}) outside 1..{n}", l.i, l.j)));
    }
    let kind = match group {
        HaarGroup::Orthogonal => Ensemble::HaarOrthogonal,
        HaarGroup::Unitary => Ensemble::HaarUnitary,
    };
    let spec = EnsembleSpec::new(kind, n).seed(seed).samples(samples);
    let values: Vec<Complex64> = sample_indices(&spec)?
        .into_par_iter()
        .map(|s| {
            let u = sample(&spec, s).expect("validated spec");
            word.iter()
                .map(|l| {
                    let z = u[(l.i - 1, l.j - 1)];
                    if l.conj {
                        z.conj()
                    } else {
                        z
                    }
                })
                .product()
        })
        .collect();
    Ok(McEstimate::from_values(&values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_deterministic_and_structured() {
        let w = EnsembleSpec::new(Ensemble::Wigner, 6).seed(3);
        let a = sample(&w, 4).unwrap();
        assert_eq!(a, sample(&w, 4).unwrap());
        assert_ne!(a, sample(&w, 5).unwrap());
        assert_eq!(a, a.adjoint());

        let wi = EnsembleSpec::new(Ensemble::Wishart, 8);
        let s = spectrum(&sample(&wi, 0).unwrap()).unwrap();
        assert!(s.points[0] >= -1e-10);

        let o = sample(&EnsembleSpec::new(Ensemble::HaarOrthogonal, 5), 0).unwrap();
        assert!(o.iter().all(|z| z.im == 0.0));
        let gap = (&o * o.transpose() - CMatrix::identity(5, 5)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(gap < 1e-12);
        let u = sample(&EnsembleSpec::new(Ensemble::HaarUnitary, 4), 9).unwrap();
        let gap = (&u * u.adjoint() - CMatrix::identity(4, 4)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(gap < 1e-12);
    }

    #[test]
    fn trivial_spectra() {
        let id = CMatrix::identity(4, 4);
        assert_eq!(spectrum(&id).unwrap().points, vec![1.0; 4]);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(5, (1..=5).rev().map(|x| Complex64::new(x as f64, 0.0))));
        let p = spectrum(&d).unwrap().points;
        for (x, want) in p.iter().zip(1..=5) {
            assert!((x - want as f64).abs() < 1e-12);
        }
        let mut bad = CMatrix::identity(2, 2);
        bad[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(spectrum(&bad).is_err());
    }

    #[test]
    fn empty_sample_count_is_rejected() {
        let spec = EnsembleSpec::new(Ensemble::Wigner, 3).samples(0);
        assert!(empirical_moments(&spec, 2).is_err());
        assert!(EnsembleSpec::new(Ensemble::Wigner, 3).t(0.0).validate().is_err());
    }
}
