//! Gram and Weingarten matrices of easy quantum groups, and exact Haar integration.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{guard, Error, Result};
use crate::exact::{self, Q};
use crate::partitions::{enumerate, ColoredWord, Partition, PartitionClass};

/// Largest basis accepted by the exact inverse, `|P(6)|`.
pub const MAX_BASIS: usize = 203;

/// A category of partitions `D`, with the coloring used by the matched classes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EasyCategory {
    pub class: PartitionClass,
    pub colored: bool,
}

impl EasyCategory {
    pub fn new(class: PartitionClass) -> Self {
        EasyCategory { class, colored: class.is_matched() }
    }

    /// Name of the quantum group whose category this is.
    pub fn group(&self) -> &'static str {
        match self.class {
            PartitionClass::P => "S_N",
            PartitionClass::P2 => "O_N",
            PartitionClass::Peven => "H_N",
            PartitionClass::NC => "S_N^+",
            PartitionClass::NC2 => "O_N^+",
            PartitionClass::NCeven => "H_N^+",
            PartitionClass::MatchedP2 => "U_N",
            PartitionClass::MatchedNC2 => "U_N^+",
        }
    }

    /// `D(k)` for the given colors; matched classes default to ∘•∘•….
    pub fn basis(&self, k: usize, word: Option<&ColoredWord>) -> Result<Vec<Partition>> {
        if self.class.is_matched() {
            let w = word.cloned().unwrap_or_else(|| ColoredWord::alternating(k));
            enumerate(self.class, k, Some(&w))
        } else {
            enumerate(self.class, k, None)
        }
    }
}

impl FromStr for EasyCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let class = match s {
            "S_N" | "S" => PartitionClass::P,
            "O_N" | "O" => PartitionClass::P2,
            "H_N" | "H" => PartitionClass::Peven,
            "S_N^+" | "S+" => PartitionClass::NC,
            "O_N^+" | "O+" => PartitionClass::NC2,
            "H_N^+" | "H+" => PartitionClass::NCeven,
            "U_N" | "U" => PartitionClass::MatchedP2,
            "U_N^+" | "U+" => PartitionClass::MatchedNC2,
            other => other.parse()?,
        };
        Ok(EasyCategory::new(class))
    }
}

impl fmt::Display for EasyCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.class.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix {
    pub k: usize,
    pub n: u64,
    pub basis: Vec<Partition>,
    pub entries: Vec<Vec<BigInt>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeingartenMatrix {
    pub k: usize,
    pub n: u64,
    pub basis: Vec<Partition>,
    pub entries: Vec<Vec<Q>>,
}

/// Gram matrix on an explicit basis, `G(π,σ) = N^{|π∨σ|}`.
pub fn gram_on(basis: Vec<Partition>, k: usize, n: u64) -> GramMatrix {
    let nb = BigInt::from(n);
    let entries = basis
        .iter()
        .map(|p| {
            basis
                .iter()
                .map(|q| num_traits::pow(nb.clone(), p.join_unchecked(q).block_count()))
                .collect()
        })
        .collect();
    GramMatrix { k, n, basis, entries }
}

pub fn gram(cat: &EasyCategory, k: usize, n: u64) -> Result<GramMatrix> {
    gram_colored(cat, k, n, None)
}

pub fn gram_colored(cat: &EasyCategory, k: usize, n: u64, word: Option<&ColoredWord>) -> Result<GramMatrix> {
    let basis = cat.basis(k, word)?;
    Ok(gram_on(basis, k, n))
}

/// Lindström product and direct determinant of the Gram matrix of `P(k)`.
pub fn gram_determinant(k: usize, n: u64) -> (BigInt, BigInt) {
    let g = gram_on(enumerate(PartitionClass::P, k, None).unwrap_or_default(), k, n);
    let lindstrom = g.basis.iter().fold(BigInt::one(), |acc, p| {
        let b = p.block_count() as u64;
        if b > n {
            return BigInt::zero();
        }
        acc * (n - b + 1..=n).fold(BigInt::one(), |a, x| a * BigInt::from(x))
    });
    (lindstrom, exact::det(&g.entries))
}

type CacheKey = (PartitionClass, Option<ColoredWord>, usize, u64);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<WeingartenMatrix>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<WeingartenMatrix>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

pub fn weingarten(cat: &EasyCategory, k: usize, n: u64) -> Result<Arc<WeingartenMatrix>> {
    weingarten_colored(cat, k, n, None)
}

/// `W = G^{-1}`, memoized per category, coloring, `k` and `N`.
pub fn weingarten_colored(
    cat: &EasyCategory,
    k: usize,
    n: u64,
    word: Option<&ColoredWord>,
) -> Result<Arc<WeingartenMatrix>> {
    let word = if cat.class.is_matched() {
        Some(word.cloned().unwrap_or_else(|| ColoredWord::alternating(k)))
    } else {
        None
    };
    let key = (cat.class, word.clone(), k, n);
    if let Some(w) = cache().read().expect("cache poisoned").get(&key) {
        return Ok(w.clone());
    }
    let g = gram_colored(cat, k, n, word.as_ref())?;
    guard("weingarten basis", g.basis.len() as u128, MAX_BASIS as u128)?;
    let entries = exact::inverse(&g.entries).map_err(|rank| Error::SingularGram { dim: g.basis.len(), rank })?;
    let w = Arc::new(WeingartenMatrix { k, n, basis: g.basis, entries });
    cache().write().expect("cache poisoned").entry(key).or_insert_with(|| w.clone());
    Ok(w)
}

/// `∫ u_{i1 j1}^{e1} … u_{ik jk}^{ek} = Σ δ_π(i) δ_σ(j) W(π,σ)`.
pub fn integrate(cat: &EasyCategory, n: u64, rows: &[usize], cols: &[usize], colors: Option<&ColoredWord>) -> Result<Q> {
    if rows.len() != cols.len() {
        return Err(Error::SizeMismatch(format!("{} row indices vs {} column indices", rows.len(), cols.len())));
    }
    if let Some(c) = colors {
        if c.len() != rows.len() {
            return Err(Error::SizeMismatch(format!("{} colors for a word of length {}", c.len(), rows.len())));
        }
    }
    if rows.iter().chain(cols).any(|&x| x == 0 || x as u64 > n) {
        return Err(Error::InvalidArgument(format!("indices must lie in 1..{n}")));
    }
    let k = rows.len();
    let w = weingarten_colored(cat, k, n, colors)?;
    let dr: Vec<bool> = w.basis.iter().map(|p| p.delta(rows) == 1).collect();
    let dc: Vec<bool> = w.basis.iter().map(|p| p.delta(cols) == 1).collect();
    let mut total = Q::zero();
    for (a, &ra) in dr.iter().enumerate() {
        if !ra {
            continue;
        }
        for (b, &cb) in dc.iter().enumerate() {
            if cb {
                total += &w.entries[a][b];
            }
        }
    }
    Ok(total)
}

/// `∫ χ_t^p = Σ (tN)^{|π∨σ|} W(π,σ)` for the truncated character `χ_t = Σ_{i ≤ tN} u_ii`.
pub fn character_moments(cat: &EasyCategory, n: u64, p: usize, t: &Q, word: Option<&ColoredWord>) -> Result<Q> {
    let tn = t * Q::from_integer(BigInt::from(n));
    if !tn.is_integer() || tn <= Q::zero() || *t > Q::one() {
        return Err(Error::InvalidArgument(format!("tN must be a positive integer with t ≤ 1, got {}", exact::fmt_q(&tn))));
    }
    if p == 0 {
        return Ok(Q::one());
    }
    let w = weingarten_colored(cat, p, n, word)?;
    let mut total = Q::zero();
    for (a, pa) in w.basis.iter().enumerate() {
        for (b, pb) in w.basis.iter().enumerate() {
            let j = pa.join_unchecked(pb).block_count();
            total += exact::qpow(&tn, j as i64) * &w.entries[a][b];
        }
    }
    Ok(total)
}

/// `Σ_{π ∈ D(p)} t^{|π|}`, the large-N limit of the truncated character moments.
pub fn character_limit(cat: &EasyCategory, p: usize, t: &Q, word: Option<&ColoredWord>) -> Result<Q> {
    Ok(cat
        .basis(p, word)?
        .iter()
        .map(|pi| exact::qpow(t, pi.block_count() as i64))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qf};

    fn cat(c: PartitionClass) -> EasyCategory {
        EasyCategory::new(c)
    }

    #[test]
    fn small_grams() {
        let g = gram(&cat(PartitionClass::P), 2, 5).unwrap();
        let e: Vec<Vec<i64>> = g.entries.iter().map(|r| r.iter().map(|x| x.try_into().unwrap()).collect()).collect();
        // basis in RGS order: {12} then {1}{2}
        assert_eq!(e, vec![vec![5, 5], vec![5, 25]]);
        let g = gram(&cat(PartitionClass::NC2), 4, 4).unwrap();
        assert_eq!(g.entries[0][1], BigInt::from(4));
        assert_eq!(g.entries[0][0], BigInt::from(16));
    }

    #[test]
    fn determinants() {
        assert_eq!(gram_determinant(2, 3), (BigInt::from(18), BigInt::from(18)));
        assert_eq!(gram_determinant(3, 3), (BigInt::from(3888), BigInt::from(3888)));
        assert_eq!(gram_determinant(2, 1).0, BigInt::zero());
    }

    #[test]
    fn inverses_and_integrals() {
        let w = weingarten(&cat(PartitionClass::P), 2, 3).unwrap();
        assert_eq!(w.entries[1][1], qf(1, 6));
        assert_eq!(w.entries[0][0], qf(1, 2));
        assert_eq!(w.entries[0][1], qf(-1, 6));
        let o = cat(PartitionClass::P2);
        assert_eq!(integrate(&o, 5, &[1, 1], &[1, 1], None).unwrap(), qf(1, 5));
        assert_eq!(integrate(&o, 5, &[1, 2], &[1, 1], None).unwrap(), q(0));
        assert_eq!(integrate(&cat(PartitionClass::P), 4, &[1], &[1], None).unwrap(), qf(1, 4));
        match weingarten(&cat(PartitionClass::P), 3, 2) {
            Err(Error::SingularGram { dim: 5, rank }) => assert!(rank < 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn characters() {
        let one = q(1);
        assert_eq!(character_moments(&cat(PartitionClass::P2), 10, 4, &one, None).unwrap(), q(3));
        assert_eq!(character_moments(&cat(PartitionClass::NC), 10, 4, &one, None).unwrap(), q(14));
        assert!(character_moments(&cat(PartitionClass::NC), 3, 2, &qf(1, 2), None).is_err());
    }
}
