//! Truncated power series with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{fmt_q, q, Q};

/// `c_0 + c_1 x + … + c_K x^K`; arithmetic never reads beyond `K`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Series {
    coeffs: Vec<Q>,
}

/// Role of a series, carried for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesRole {
    /// Cauchy transform; coefficient `j` multiplies `ξ^{-j}`.
    Cauchy,
    RTransform,
    Cumulants,
    Moments,
    Generating,
    Theta,
    T,
}

impl Series {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Q::zero());
        }
        Series { coeffs }
    }

    pub fn from_ints(order: usize, values: &[i64]) -> Self {
        let mut c = vec![Q::zero(); order + 1];
        for (i, &v) in values.iter().enumerate().take(order + 1) {
            c[i] = q(v);
        }
        Series { coeffs: c }
    }

    pub fn zero(order: usize) -> Self {
        Series { coeffs: vec![Q::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(order, 0, Q::one())
    }

    pub fn monomial(order: usize, power: usize, c: Q) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = c;
        }
        s
    }

    /// The variable `x` itself.
    pub fn x(order: usize) -> Self {
        Self::monomial(order, 1, Q::one())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut c: Vec<Q> = self.coeffs.iter().take(order + 1).cloned().collect();
        c.resize(order + 1, Q::zero());
        Series { coeffs: c }
    }

    pub fn scale(&self, c: &Q) -> Self {
        Series { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Multiplication by `x^k`, keeping the order.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.coeffs.len();
        let mut c = vec![Q::zero(); n];
        for i in 0..n.saturating_sub(k) {
            c[i + k] = self.coeffs[i].clone();
        }
        Series { coeffs: c }
    }

    /// Division by `x^k`; the low coefficients must vanish and the order drops by `k`.
    pub fn unshift(&self, k: usize) -> Option<Self> {
        if self.coeffs.iter().take(k).any(|c| !c.is_zero()) || k > self.order() {
            return None;
        }
        Some(Series { coeffs: self.coeffs[k..].to_vec() })
    }

    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        let mut c = vec![Q::zero(); n];
        for i in 1..n {
            c[i - 1] = &self.coeffs[i] * q(i as i64);
        }
        Series { coeffs: c }
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn inverse(&self) -> Option<Self> {
        let c0 = self.coeffs[0].clone();
        if c0.is_zero() {
            return None;
        }
        let n = self.coeffs.len();
        let mut out = vec![Q::zero(); n];
        let inv0 = c0.recip();
        out[0] = inv0.clone();
        for i in 1..n {
            let mut acc = Q::zero();
            for j in 1..=i {
                acc += &self.coeffs[j] * &out[i - j];
            }
            out[i] = -acc * &inv0;
        }
        Some(Series { coeffs: out })
    }

    pub fn div(&self, other: &Series) -> Option<Self> {
        other.inverse().map(|inv| self * &inv)
    }

    /// `self(g(x))` for `g(0) = 0`, by Horner's rule.
    pub fn compose(&self, g: &Series) -> Option<Self> {
        if !g.coeffs[0].is_zero() {
            return None;
        }
        let order = self.order().min(g.order());
        let g = g.truncate(order);
        let mut acc = Series::zero(order);
        for c in self.coeffs.iter().take(order + 1).rev() {
            acc = &(&acc * &g) + &Series::monomial(order, 0, c.clone());
        }
        Some(acc)
    }

    /// Compositional inverse of `h = x + …` by Newton iteration.
    pub fn reversion(&self) -> Option<Self> {
        if !self.coeffs[0].is_zero() || self.order() == 0 || self.coeffs[1].is_zero() {
            return None;
        }
        let order = self.order();
        let x = Series::x(order);
        let dh = self.derivative();
        let mut u = x.scale(&self.coeffs[1].recip());
        let mut prec = 1;
        while prec < order {
            prec = (2 * prec).min(order);
            let h_u = self.truncate(prec).compose(&u.truncate(prec))?;
            let dh_u = dh.truncate(prec).compose(&u.truncate(prec))?;
            let err = &h_u - &x.truncate(prec);
            u = &u.truncate(prec) - &err.div(&dh_u)?;
        }
        Some(u.truncate(order))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(fmt_q).collect()
    }
}

impl Add for &Series {
    type Output = Series;

    fn add(self, rhs: &Series) -> Series {
        let order = self.order().min(rhs.order());
        Series { coeffs: (0..=order).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect() }
    }
}

impl Sub for &Series {
    type Output = Series;

    fn sub(self, rhs: &Series) -> Series {
        let order = self.order().min(rhs.order());
        Series { coeffs: (0..=order).map(|i| &self.coeffs[i] - &rhs.coeffs[i]).collect() }
    }
}

impl Neg for &Series {
    type Output = Series;

    fn neg(self) -> Series {
        Series { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &Series {
    type Output = Series;

    fn mul(self, rhs: &Series) -> Series {
        let order = self.order().min(rhs.order());
        let mut c = vec![Q::zero(); order + 1];
        for i in 0..=order {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=order - i {
                c[i + j] += &self.coeffs[i] * &rhs.coeffs[j];
            }
        }
        Series { coeffs: c }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_strings().join(","))
    }
}

/// `1 - x^n` to the given order.
pub fn one_minus_pow(order: usize, n: usize) -> Series {
    &Series::one(order) - &Series::monomial(order, n, Q::one())
}

/// `1 + x^n` to the given order.
pub fn one_plus_pow(order: usize, n: usize) -> Series {
    &Series::one(order) + &Series::monomial(order, n, Q::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qf;

    #[test]
    fn geometric_inverse() {
        let s = one_minus_pow(6, 1);
        let inv = s.inverse().unwrap();
        assert!(inv.coeffs().iter().all(|c| *c == q(1)));
    }

    #[test]
    fn reversion_of_catalan_relation() {
        // h = x - x^2 has inverse Σ C_n x^{n+1}
        let h = Series::from_ints(8, &[0, 1, -1]);
        let u = h.reversion().unwrap();
        let expect = [0, 1, 1, 2, 5, 14, 42, 132, 429];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(u.coeff(i), q(e));
        }
        assert_eq!(h.compose(&u).unwrap(), Series::x(8));
    }

    #[test]
    fn composition_and_division() {
        let g = Series::from_ints(5, &[0, 1, 1]);
        let f = Series::from_ints(5, &[1, 1]);
        assert_eq!(f.compose(&g).unwrap(), Series::from_ints(5, &[1, 1, 1]));
        let d = Series::from_ints(5, &[2]).div(&Series::from_ints(5, &[4])).unwrap();
        assert_eq!(d.coeff(0), qf(1, 2));
    }
}
