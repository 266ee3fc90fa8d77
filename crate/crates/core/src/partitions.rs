//! Set partitions, pairings and their classes.
//!
//! A [`Partition`] of `{0..k-1}` is stored as its restricted growth string, which
//! is the same as listing blocks sorted by their minimum element. Text and JSON
//! forms are 1-based: `{1,3}{2}` and `[[1,3],[2]]`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    rgs: Vec<usize>,
}

impl Partition {
    /// Builds a partition from any labelling of the points; equal labels share a block.
    pub fn from_labels<T: Eq + std::hash::Hash>(labels: &[T]) -> Self {
        let mut seen: HashMap<&T, usize> = HashMap::new();
        let rgs = labels
            .iter()
            .map(|l| {
                let n = seen.len();
                *seen.entry(l).or_insert(n)
            })
            .collect();
        Partition { rgs }
    }

    /// Builds a partition from 0-based blocks covering `{0..size-1}`.
    pub fn from_blocks(size: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut label = vec![usize::MAX; size];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidArgument("empty block".into()));
            }
            for &x in block {
                if x >= size {
                    return Err(Error::InvalidArgument(format!("point {} out of range", x + 1)));
                }
                if label[x] != usize::MAX {
                    return Err(Error::InvalidArgument(format!("point {} repeated", x + 1)));
                }
                label[x] = b;
            }
        }
        if let Some(x) = label.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidArgument(format!("point {} not covered", x + 1)));
        }
        Ok(Self::from_labels(&label))
    }

    pub fn from_pairs(size: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let blocks: Vec<Vec<usize>> = pairs.iter().map(|&(a, b)| vec![a, b]).collect();
        Self::from_blocks(size, &blocks)
    }

    pub fn singletons(k: usize) -> Self {
        Partition { rgs: (0..k).collect() }
    }

    pub fn one_block(k: usize) -> Self {
        Partition { rgs: vec![0; k] }
    }

    pub fn size(&self) -> usize {
        self.rgs.len()
    }

    /// Restricted growth string: block index of each point.
    pub fn labels(&self) -> &[usize] {
        &self.rgs
    }

    pub fn block_count(&self) -> usize {
        self.rgs.iter().max().map_or(0, |m| m + 1)
    }

    /// Blocks in canonical order, elements ascending, 0-based.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (i, &b) in self.rgs.iter().enumerate() {
            out[b].push(i);
        }
        out
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.block_count()];
        for &b in &self.rgs {
            out[b] += 1;
        }
        out
    }

    pub fn same_block(&self, i: usize, j: usize) -> bool {
        self.rgs[i] == self.rgs[j]
    }

    /// Partner of `i` when `i` lies in a two-element block.
    pub fn partner(&self, i: usize) -> Option<usize> {
        let mut found = None;
        for (j, &b) in self.rgs.iter().enumerate() {
            if j != i && b == self.rgs[i] {
                if found.is_some() {
                    return None;
                }
                found = Some(j);
            }
        }
        found
    }

    pub fn is_pairing(&self) -> bool {
        self.block_sizes().iter().all(|&s| s == 2)
    }

    pub fn is_even(&self) -> bool {
        self.block_sizes().iter().all(|&s| s % 2 == 0)
    }

    pub fn is_noncrossing(&self) -> bool {
        let k = self.size();
        // last occurrence of each block seen so far, scanning left to right
        let mut last = vec![usize::MAX; self.block_count()];
        let mut first = vec![usize::MAX; self.block_count()];
        for i in 0..k {
            let b = self.rgs[i];
            if last[b] != usize::MAX {
                let l = last[b];
                for j in l + 1..i {
                    let c = self.rgs[j];
                    if c != b && first[c] < l {
                        return false;
                    }
                }
            } else {
                first[b] = i;
            }
            last[b] = i;
        }
        true
    }

    /// `self ≤ other` in the refinement order.
    pub fn refines(&self, other: &Partition) -> bool {
        if self.size() != other.size() {
            return false;
        }
        let mut image = vec![usize::MAX; self.block_count()];
        for (i, &b) in self.rgs.iter().enumerate() {
            if image[b] == usize::MAX {
                image[b] = other.rgs[i];
            } else if image[b] != other.rgs[i] {
                return false;
            }
        }
        true
    }

    pub fn join(&self, other: &Partition) -> Result<Partition> {
        if self.size() != other.size() {
            return Err(Error::SizeMismatch(format!("{} vs {}", self.size(), other.size())));
        }
        Ok(self.join_unchecked(other))
    }

    pub(crate) fn join_unchecked(&self, other: &Partition) -> Partition {
        let k = self.size();
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for p in [self, other] {
            let mut rep = vec![usize::MAX; p.block_count()];
            for i in 0..k {
                let b = p.rgs[i];
                if rep[b] == usize::MAX {
                    rep[b] = i;
                } else {
                    let (x, y) = (find(&mut parent, rep[b]), find(&mut parent, i));
                    parent[x.max(y)] = x.min(y);
                }
            }
        }
        let roots: Vec<usize> = (0..k).map(|i| find(&mut parent, i)).collect();
        Partition::from_labels(&roots)
    }

    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        if self.size() != other.size() {
            return Err(Error::SizeMismatch(format!("{} vs {}", self.size(), other.size())));
        }
        let labels: Vec<(usize, usize)> = self.rgs.iter().copied().zip(other.rgs.iter().copied()).collect();
        Ok(Partition::from_labels(&labels))
    }

    /// 1 when the indices are constant on every block, else 0.
    pub fn delta<T: PartialEq>(&self, indices: &[T]) -> u8 {
        if indices.len() != self.size() {
            return 0;
        }
        let mut rep: Vec<Option<&T>> = vec![None; self.block_count()];
        for (i, &b) in self.rgs.iter().enumerate() {
            match rep[b] {
                None => rep[b] = Some(&indices[i]),
                Some(v) if *v != indices[i] => return 0,
                _ => {}
            }
        }
        1
    }

    /// Doubles every leg: `NC(k) → NC2(2k)`.
    pub fn fatten(&self) -> Result<Partition> {
        if !self.is_noncrossing() {
            return Err(Error::Crossing);
        }
        let mut pairs = Vec::with_capacity(self.size());
        for block in self.blocks() {
            let m = block.len();
            for j in 0..m - 1 {
                pairs.push((2 * block[j] + 1, 2 * block[j + 1]));
            }
            pairs.push((2 * block[0], 2 * block[m - 1] + 1));
        }
        Partition::from_pairs(2 * self.size(), &pairs)
    }

    /// Inverse of [`fatten`](Self::fatten).
    pub fn shrink(&self) -> Result<Partition> {
        if !self.size().is_multiple_of(2) || !self.is_pairing() {
            return Err(Error::InvalidArgument("shrink expects a pairing of an even number of points".into()));
        }
        if !self.is_noncrossing() {
            return Err(Error::Crossing);
        }
        let k = self.size() / 2;
        let mut glue: Vec<Vec<usize>> = Vec::new();
        for b in self.blocks() {
            glue.push(vec![b[0] / 2, b[1] / 2]);
        }
        let joined = glue.iter().fold(Partition::singletons(k), |acc, pair| {
            let mut lab: Vec<usize> = (0..k).collect();
            lab[pair[1]] = pair[0];
            acc.join_unchecked(&Partition::from_labels(&lab))
        });
        if joined.fatten()? != *self {
            return Err(Error::Invariant("pairing is not in the image of fatten".into()));
        }
        Ok(joined)
    }

    /// Restriction to a subset of points (kept in increasing order).
    pub fn restrict(&self, points: &[usize]) -> Partition {
        let labels: Vec<usize> = points.iter().map(|&i| self.rgs[i]).collect();
        Partition::from_labels(&labels)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

/// Kernel of a multi-index: points with equal values share a block.
pub fn kernel<T: Eq + std::hash::Hash>(indices: &[T]) -> Partition {
    Partition::from_labels(indices)
}

pub fn delta<T: PartialEq>(p: &Partition, indices: &[T]) -> u8 {
    p.delta(indices)
}

pub fn is_noncrossing(p: &Partition) -> bool {
    p.is_noncrossing()
}

pub fn join(p: &Partition, q: &Partition) -> Result<Partition> {
    p.join(q)
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.size() == 0 {
            return write!(f, "{{}}");
        }
        for block in self.blocks() {
            let items: Vec<String> = block.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition({})", self)
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "{}" || s.is_empty() {
            return Ok(Partition { rgs: vec![] });
        }
        let mut blocks = Vec::new();
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('{')
                .ok_or_else(|| Error::Parse(format!("expected '{{' in {s:?}")))?;
            let end = body.find('}').ok_or_else(|| Error::Parse(format!("unclosed block in {s:?}")))?;
            let block: Vec<usize> = body[..end]
                .split(',')
                .map(|x| match x.parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(Error::Parse(format!("bad point {x:?}"))),
                })
                .collect::<Result<_>>()?;
            blocks.push(block);
            rest = &body[end + 1..];
        }
        let size = blocks.iter().map(|b| b.len()).sum();
        Partition::from_blocks(size, &blocks)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let blocks: Vec<Vec<usize>> = self.blocks().into_iter().map(|b| b.into_iter().map(|x| x + 1).collect()).collect();
        blocks.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let blocks: Vec<Vec<usize>> = Vec::deserialize(deserializer)?;
        let size = blocks.iter().map(|b| b.len()).sum();
        let zero: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|b| b.into_iter().map(|x| x.wrapping_sub(1)).collect())
            .collect();
        Partition::from_blocks(size, &zero).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    White,
    Black,
}

/// A word over {∘, •}.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColoredWord(pub Vec<Color>);

impl ColoredWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn uniform(&self) -> bool {
        let w = self.0.iter().filter(|&&c| c == Color::White).count();
        2 * w == self.len()
    }

    /// Alternating word ∘•∘•… of the given length.
    pub fn alternating(len: usize) -> Self {
        ColoredWord((0..len).map(|i| if i % 2 == 0 { Color::White } else { Color::Black }).collect())
    }
}

impl fmt::Display for ColoredWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            f.write_str(match c {
                Color::White => "o",
                Color::Black => "x",
            })?;
        }
        Ok(())
    }
}

impl FromStr for ColoredWord {
    type Err = Error;

    /// Accepts `o`, `w`, `∘` for white and `x`, `b`, `•` for black.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                'o' | 'w' | '∘' | '0' => Ok(Color::White),
                'x' | 'b' | '•' | '1' => Ok(Color::Black),
                _ => Err(Error::Parse(format!("bad color {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(ColoredWord)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PartitionClass {
    P,
    P2,
    Peven,
    NC,
    NC2,
    NCeven,
    MatchedP2,
    MatchedNC2,
}

impl PartitionClass {
    pub const ALL: [PartitionClass; 8] = [
        PartitionClass::P,
        PartitionClass::P2,
        PartitionClass::Peven,
        PartitionClass::NC,
        PartitionClass::NC2,
        PartitionClass::NCeven,
        PartitionClass::MatchedP2,
        PartitionClass::MatchedNC2,
    ];

    pub fn is_matched(self) -> bool {
        matches!(self, PartitionClass::MatchedP2 | PartitionClass::MatchedNC2)
    }

    pub fn is_pairing(self) -> bool {
        matches!(
            self,
            PartitionClass::P2 | PartitionClass::NC2 | PartitionClass::MatchedP2 | PartitionClass::MatchedNC2
        )
    }

    pub fn is_noncrossing(self) -> bool {
        matches!(
            self,
            PartitionClass::NC | PartitionClass::NC2 | PartitionClass::NCeven | PartitionClass::MatchedNC2
        )
    }

    pub fn is_even(self) -> bool {
        matches!(self, PartitionClass::Peven | PartitionClass::NCeven) || self.is_pairing()
    }

    pub fn name(self) -> &'static str {
        match self {
            PartitionClass::P => "P",
            PartitionClass::P2 => "P2",
            PartitionClass::Peven => "Peven",
            PartitionClass::NC => "NC",
            PartitionClass::NC2 => "NC2",
            PartitionClass::NCeven => "NCeven",
            PartitionClass::MatchedP2 => "MatchedP2",
            PartitionClass::MatchedNC2 => "MatchedNC2",
        }
    }

    pub fn contains(self, p: &Partition, word: Option<&ColoredWord>) -> Result<bool> {
        if self.is_matched() {
            let w = word.ok_or(Error::MissingWord(p.size()))?;
            if w.len() != p.size() {
                return Err(Error::SizeMismatch(format!("word length {} vs {} points", w.len(), p.size())));
            }
            if !p.is_pairing() {
                return Ok(false);
            }
            if p.blocks().iter().any(|b| w.0[b[0]] == w.0[b[1]]) {
                return Ok(false);
            }
        }
        if self.is_pairing() && !p.is_pairing() {
            return Ok(false);
        }
        if self.is_even() && !p.is_even() {
            return Ok(false);
        }
        if self.is_noncrossing() && !p.is_noncrossing() {
            return Ok(false);
        }
        Ok(true)
    }
}

impl fmt::Display for PartitionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PartitionClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.to_ascii_lowercase().replace(['-', '_'], "");
        Ok(match t.as_str() {
            "p" => PartitionClass::P,
            "p2" => PartitionClass::P2,
            "peven" => PartitionClass::Peven,
            "nc" => PartitionClass::NC,
            "nc2" => PartitionClass::NC2,
            "nceven" => PartitionClass::NCeven,
            "matchedp2" | "calp2" => PartitionClass::MatchedP2,
            "matchednc2" | "calnc2" => PartitionClass::MatchedNC2,
            _ => return Err(Error::Parse(format!("unknown partition class {s:?}"))),
        })
    }
}

/// All members of `class` on `k` points, in restricted-growth-string order.
pub fn enumerate(class: PartitionClass, k: usize, word: Option<&ColoredWord>) -> Result<Vec<Partition>> {
    if class.is_matched() {
        let w = word.ok_or(Error::MissingWord(k))?;
        if w.len() != k {
            return Err(Error::SizeMismatch(format!("word length {} vs k = {}", w.len(), k)));
        }
    }
    let mut out = Vec::new();
    if class.is_pairing() && k % 2 == 1 {
        return Ok(out);
    }
    let mut gen = Generator {
        class,
        k,
        word: if class.is_matched() { word } else { None },
        rgs: Vec::with_capacity(k),
        sizes: Vec::new(),
        first: Vec::new(),
        last: Vec::new(),
        out: &mut out,
    };
    gen.run();
    Ok(out)
}

/// Number of members, without materializing words for unmatched classes.
pub fn count(class: PartitionClass, k: usize, word: Option<&ColoredWord>) -> Result<usize> {
    enumerate(class, k, word).map(|v| v.len())
}

struct Generator<'a> {
    class: PartitionClass,
    k: usize,
    word: Option<&'a ColoredWord>,
    rgs: Vec<usize>,
    sizes: Vec<usize>,
    first: Vec<usize>,
    last: Vec<usize>,
    out: &'a mut Vec<Partition>,
}

impl Generator<'_> {
    fn run(&mut self) {
        let i = self.rgs.len();
        if i == self.k {
            let ok = if self.class.is_pairing() {
                self.sizes.iter().all(|&s| s == 2)
            } else if self.class.is_even() {
                self.sizes.iter().all(|&s| s % 2 == 0)
            } else {
                true
            };
            if ok {
                self.out.push(Partition { rgs: self.rgs.clone() });
            }
            return;
        }
        let remaining = self.k - i;
        let need = if self.class.is_pairing() {
            self.sizes.iter().filter(|&&s| s == 1).count()
        } else if self.class.is_even() {
            self.sizes.iter().filter(|&&s| s % 2 == 1).count()
        } else {
            0
        };
        if need > remaining {
            return;
        }
        let blocks = self.sizes.len();
        for b in 0..=blocks {
            if b < blocks && !self.can_extend(b, i) {
                continue;
            }
            self.rgs.push(b);
            if b == blocks {
                self.sizes.push(1);
                self.first.push(i);
                self.last.push(i);
                self.run();
                self.sizes.pop();
                self.first.pop();
                self.last.pop();
            } else {
                let prev = self.last[b];
                self.sizes[b] += 1;
                self.last[b] = i;
                self.run();
                self.sizes[b] -= 1;
                self.last[b] = prev;
            }
            self.rgs.pop();
        }
    }

    fn can_extend(&self, b: usize, i: usize) -> bool {
        if self.class.is_pairing() && self.sizes[b] >= 2 {
            return false;
        }
        if let Some(w) = self.word {
            if w.0[self.first[b]] == w.0[i] {
                return false;
            }
        }
        if self.class.is_noncrossing() {
            let l = self.last[b];
            for j in l + 1..i {
                let c = self.rgs[j];
                if c != b && self.first[c] < l {
                    return false;
                }
            }
        }
        true
    }
}

/// Upper/lower partition of `upper + lower` points, upper row first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwoRowPartition {
    pub upper: usize,
    pub lower: usize,
    pub partition: Partition,
}

impl TwoRowPartition {
    pub fn new(upper: usize, lower: usize, partition: Partition) -> Result<Self> {
        if partition.size() != upper + lower {
            return Err(Error::SizeMismatch(format!(
                "{} points vs {} + {}",
                partition.size(),
                upper,
                lower
            )));
        }
        Ok(TwoRowPartition { upper, lower, partition })
    }

    /// Upside-down turning.
    pub fn flip(&self) -> Self {
        let mut labels = vec![0; self.upper + self.lower];
        let rgs = self.partition.labels();
        for j in 0..self.lower {
            labels[j] = rgs[self.upper + j];
        }
        for i in 0..self.upper {
            labels[self.lower + i] = rgs[i];
        }
        TwoRowPartition {
            upper: self.lower,
            lower: self.upper,
            partition: Partition::from_labels(&labels),
        }
    }

    /// Horizontal concatenation, `self` on the left.
    pub fn tensor(&self, other: &Self) -> Self {
        let (a, b) = (self.partition.labels(), other.partition.labels());
        let off = self.partition.block_count();
        let mut labels = Vec::with_capacity(a.len() + b.len());
        labels.extend_from_slice(&a[..self.upper]);
        labels.extend(b[..other.upper].iter().map(|x| x + off));
        labels.extend_from_slice(&a[self.upper..]);
        labels.extend(b[other.upper..].iter().map(|x| x + off));
        TwoRowPartition {
            upper: self.upper + other.upper,
            lower: self.lower + other.lower,
            partition: Partition::from_labels(&labels),
        }
    }
}

/// Möbius function of the partition lattice, by recurrence over the interval.
pub fn mobius(p: &Partition, q: &Partition) -> Result<i64> {
    if p.size() != q.size() {
        return Err(Error::SizeMismatch(format!("{} vs {}", p.size(), q.size())));
    }
    if !p.refines(q) {
        return Ok(0);
    }
    let interval = interval(p, q);
    let mut memo: HashMap<Partition, i64> = HashMap::new();
    // interval is sorted by block count descending, so every r is preceded by all r' < r
    for r in &interval {
        let value = if r == p {
            1
        } else {
            -interval
                .iter()
                .filter(|s| *s != r && s.refines(r))
                .map(|s| memo[s])
                .sum::<i64>()
        };
        memo.insert(r.clone(), value);
    }
    Ok(memo[q])
}

/// All `r` with `p ≤ r ≤ q`, sorted by decreasing block count.
pub fn interval(p: &Partition, q: &Partition) -> Vec<Partition> {
    let pb = p.blocks();
    let qlab = q.labels();
    let nq = q.block_count();
    // p-blocks grouped by their q-block
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); nq];
    for (i, b) in pb.iter().enumerate() {
        groups[qlab[b[0]]].push(i);
    }
    let mut next_label = vec![0usize];
    let mut assignments: Vec<Vec<usize>> = vec![vec![usize::MAX; pb.len()]];
    for g in &groups {
        let parts = enumerate(PartitionClass::P, g.len(), None).unwrap_or_default();
        let mut new_assign = Vec::new();
        let mut new_next = Vec::new();
        for (a, &n) in assignments.iter().zip(&next_label) {
            for part in &parts {
                let mut a2 = a.clone();
                for (pos, &blk) in g.iter().enumerate() {
                    a2[blk] = n + part.labels()[pos];
                }
                new_assign.push(a2);
                new_next.push(n + part.block_count());
            }
        }
        assignments = new_assign;
        next_label = new_next;
    }
    let plab = p.labels();
    let mut out: Vec<Partition> = assignments
        .into_iter()
        .map(|a| {
            let labels: Vec<usize> = plab.iter().map(|&b| a[b]).collect();
            Partition::from_labels(&labels)
        })
        .collect();
    out.sort_by(|a, b| b.block_count().cmp(&a.block_count()).then(a.cmp(b)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn text_round_trip() {
        let q = p("{1,3}{2}");
        assert_eq!(q.to_string(), "{1,3}{2}");
        assert_eq!(q.labels(), &[0, 1, 0]);
        assert_eq!(p("{2}{3,1}").to_string(), "{1,3}{2}");
        let json = serde_json::to_string(&q).unwrap();
        assert_eq!(json, "[[1,3],[2]]");
        let back: Partition = serde_json::from_str(&json).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn spec_examples() {
        assert_eq!(enumerate(PartitionClass::NC2, 4, None).unwrap().len(), 2);
        assert!(enumerate(PartitionClass::P2, 3, None).unwrap().is_empty());
        assert_eq!(enumerate(PartitionClass::NC, 4, None).unwrap().len(), 14);
        assert_eq!(enumerate(PartitionClass::P, 4, None).unwrap().len(), 15);
        assert!(p("{1,2}{3,4}").is_noncrossing());
        assert!(!p("{1,3}{2,4}").is_noncrossing());
        assert_eq!(
            p("{1,2}{3,4}").join(&p("{2,3}{1,4}")).unwrap(),
            Partition::one_block(4)
        );
        assert_eq!(mobius(&Partition::singletons(2), &Partition::one_block(2)).unwrap(), -1);
        assert_eq!(kernel(&[3, 7, 3]).to_string(), "{1,3}{2}");
        assert_eq!(p("{1,2}").delta(&[5, 5]), 1);
        assert_eq!(p("{1,2}").delta(&[5, 6]), 0);
        assert_eq!(p("{1}").fatten().unwrap().to_string(), "{1,2}");
    }

    #[test]
    fn matched_classes_need_words() {
        assert_eq!(enumerate(PartitionClass::MatchedP2, 2, None), Err(Error::MissingWord(2)));
        let w: ColoredWord = "oxxo".parse().unwrap();
        let got = enumerate(PartitionClass::MatchedP2, 4, Some(&w)).unwrap();
        assert_eq!(got.len(), 2);
        let unbalanced: ColoredWord = "oo".parse().unwrap();
        assert!(enumerate(PartitionClass::MatchedNC2, 2, Some(&unbalanced)).unwrap().is_empty());
    }

    #[test]
    fn mobius_small_values() {
        // μ(0̂, 1̂) on P(k) is (−1)^{k−1}(k−1)!
        for (k, v) in [(1, 1), (2, -1), (3, 2), (4, -6)] {
            assert_eq!(mobius(&Partition::singletons(k), &Partition::one_block(k)).unwrap(), v);
        }
        assert_eq!(mobius(&p("{1,2}{3}"), &p("{1,3}{2}")).unwrap(), 0);
    }

    #[test]
    fn two_row_flip_is_involutive() {
        let t = TwoRowPartition::new(2, 1, p("{1,3}{2}")).unwrap();
        assert_eq!(t.flip().flip(), t);
        assert_eq!(t.flip().partition.to_string(), "{1,2}{3}");
        let u = TwoRowPartition::new(1, 1, p("{1,2}")).unwrap();
        assert_eq!(t.tensor(&u).partition.to_string(), "{1,4}{2}{3,5}");
    }
}
