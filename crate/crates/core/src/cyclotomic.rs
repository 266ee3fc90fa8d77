//! Exact arithmetic in `Q(ζ_L)`.
//!
//! Elements are kept in the group ring `Q[Z_L]` (one coefficient per power of
//! `ζ_L`) and reduced modulo the cyclotomic polynomial `Φ_L` for comparisons.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::exact::{to_f64, Q};

/// `Φ_n` with integer coefficients, lowest degree first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<i64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("cache poisoned").get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = divide_monic(&num, &cyclotomic_polynomial(d));
        }
    }
    cache.lock().expect("cache poisoned").insert(n, num.clone());
    num
}

fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[i + j] -= c * d;
        }
    }
    quot
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cyclotomic {
    order: u64,
    coeffs: Vec<Q>,
}

impl Cyclotomic {
    pub fn zero(order: u64) -> Self {
        Cyclotomic { order, coeffs: vec![Q::zero(); order as usize] }
    }

    pub fn rational(order: u64, c: Q) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = c;
        z
    }

    /// `ζ_L^a`.
    pub fn root(order: u64, a: i64) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[a.rem_euclid(order as i64) as usize] = Q::one();
        z
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// The same number written over `ζ_{order·m}`.
    pub fn lift(&self, order: u64) -> Self {
        assert!(order.is_multiple_of(self.order), "order must be a multiple");
        let m = (order / self.order) as usize;
        let mut z = Self::zero(order);
        for (a, c) in self.coeffs.iter().enumerate() {
            z.coeffs[a * m] = c.clone();
        }
        z
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let l = self.order.lcm(&other.order);
        (self.lift(l), other.lift(l))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = self.common(other);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Self {
        Cyclotomic { order: self.order, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        let l = a.order as usize;
        let mut z = Self::zero(a.order);
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    z.coeffs[(i + j) % l] += x * y;
                }
            }
        }
        z
    }

    pub fn conj(&self) -> Self {
        let l = self.order as usize;
        let mut z = Self::zero(self.order);
        for (a, c) in self.coeffs.iter().enumerate() {
            z.coeffs[(l - a) % l] = c.clone();
        }
        z
    }

    /// Canonical remainder modulo `Φ_L`, of length `φ(L)`.
    pub fn reduced(&self) -> Vec<Q> {
        let phi = cyclotomic_polynomial(self.order);
        let deg = phi.len() - 1;
        let mut rem = self.coeffs.clone();
        for i in (deg..rem.len()).rev() {
            let c = rem[i].clone();
            if c.is_zero() {
                continue;
            }
            for (j, &p) in phi.iter().enumerate() {
                rem[i - deg + j] -= &c * Q::from_integer(p.into());
            }
        }
        rem.truncate(deg);
        rem
    }

    pub fn is_zero(&self) -> bool {
        self.reduced().iter().all(|c| c.is_zero())
    }

    pub fn equals(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    pub fn as_rational(&self) -> Option<Q> {
        let r = self.reduced();
        if r.iter().skip(1).all(|c| c.is_zero()) {
            Some(r.first().cloned().unwrap_or_else(Q::zero))
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let l = self.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, c)| Complex64::from_polar(to_f64(c), 2.0 * std::f64::consts::PI * a as f64 / l))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(105).len() - 1, 48);
    }

    #[test]
    fn root_sums_vanish() {
        for l in 2..13u64 {
            let s = (0..l as i64).fold(Cyclotomic::zero(l), |acc, a| acc.add(&Cyclotomic::root(l, a)));
            assert!(s.is_zero(), "order {l}");
        }
        let w = Cyclotomic::root(3, 1);
        assert_eq!(w.mul(&w.conj()).as_rational(), Some(q(1)));
        assert_eq!(w.add(&w.conj()).as_rational(), Some(q(-1)));
        assert!(Cyclotomic::root(4, 1).as_rational().is_none());
        assert!(Cyclotomic::root(6, 3).equals(&Cyclotomic::rational(2, q(-1))));
    }
}
