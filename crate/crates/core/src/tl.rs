//! Temperley-Lieb and Fuss-Catalan diagram algebras over exact rationals.
//!
//! A diagram on `k` points per side numbers its boundary clockwise from the
//! top-left corner: top points `0..k` left to right, bottom points `k..2k`
//! right to left, so the bottom point below top point `x` is `2k-1-x`.
//! Composition `a ∘ b` puts `a` on top of `b`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::exact::{fmt_q, qpow, Q};
use crate::partitions::{Color, Partition};

/// A noncrossing perfect matching of the `2k` boundary points.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Diagram {
    k: usize,
    partner: Vec<usize>,
}

impl Diagram {
    pub fn from_partner(k: usize, partner: Vec<usize>) -> Result<Self> {
        if partner.len() != 2 * k {
            return Err(Error::SizeMismatch(format!("{} points for k = {}", partner.len(), k)));
        }
        for (i, &j) in partner.iter().enumerate() {
            if j >= 2 * k || j == i || partner[j] != i {
                return Err(Error::InvalidArgument("not a perfect matching".into()));
            }
        }
        let d = Diagram { k, partner };
        if !d.to_partition().is_noncrossing() {
            return Err(Error::Crossing);
        }
        Ok(d)
    }

    pub fn from_partition(k: usize, p: &Partition) -> Result<Self> {
        if p.size() != 2 * k || !p.is_pairing() {
            return Err(Error::InvalidArgument("expected a pairing of 2k points".into()));
        }
        let mut partner = vec![0; 2 * k];
        for b in p.blocks() {
            partner[b[0]] = b[1];
            partner[b[1]] = b[0];
        }
        Self::from_partner(k, partner)
    }

    pub fn identity(k: usize) -> Self {
        Diagram { k, partner: (0..2 * k).map(|i| 2 * k - 1 - i).collect() }
    }

    /// The cap-cup diagram ε_i joining positions `i, i+1` (1-based) on each side.
    pub fn epsilon(i: usize, k: usize) -> Result<Self> {
        if i == 0 || i >= k {
            return Err(Error::InvalidArgument(format!("ε_{i} needs 1 ≤ i ≤ k−1 = {}", k.saturating_sub(1))));
        }
        let mut d = Self::identity(k);
        let (x, y) = (i - 1, i);
        let (bx, by) = (2 * k - 1 - x, 2 * k - 1 - y);
        d.partner[x] = y;
        d.partner[y] = x;
        d.partner[bx] = by;
        d.partner[by] = bx;
        Ok(d)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn partner(&self, i: usize) -> usize {
        self.partner[i]
    }

    pub fn to_partition(&self) -> Partition {
        let labels: Vec<usize> = (0..2 * self.k).map(|i| i.min(self.partner[i])).collect();
        Partition::from_labels(&labels)
    }

    /// Top-bottom reflection.
    pub fn flip(&self) -> Self {
        let n = 2 * self.k;
        let mut partner = vec![0; n];
        for i in 0..n {
            partner[n - 1 - i] = n - 1 - self.partner[i];
        }
        Diagram { k: self.k, partner }
    }

    /// Stacks `self` above `other`; returns the diagram and one middle point per closed loop.
    pub fn stack(&self, other: &Diagram) -> (Diagram, Vec<usize>) {
        let k = self.k;
        let n = 2 * k;
        let is_top_bottom = |i: usize| i >= k;
        let mut partner = vec![usize::MAX; n];
        // result points: top i < k is self point i, bottom i ≥ k is other point i
        for start in 0..n {
            if partner[start] != usize::MAX {
                continue;
            }
            let (mut in_self, mut p) = (start < k, start);
            loop {
                let q = if in_self { self.partner[p] } else { other.partner[p] };
                if in_self && !is_top_bottom(q) {
                    partner[start] = q;
                    partner[q] = start;
                    break;
                }
                if !in_self && is_top_bottom(q) {
                    partner[start] = q;
                    partner[q] = start;
                    break;
                }
                // cross the middle line: bottom x of self is top x of other
                p = n - 1 - q;
                in_self = !in_self;
            }
        }
        // loops live entirely on middle points; middle position x is self bottom 2k-1-x
        let mut seen = vec![false; k];
        let mut loops = Vec::new();
        for x in 0..k {
            if seen[x] {
                continue;
            }
            // is x on an open string? check by walking
            let mut cur = x;
            let mut closed = true;
            let mut visited = Vec::new();
            loop {
                visited.push(cur);
                // go down through other
                let q = other.partner[cur];
                if q >= k {
                    closed = false;
                    break;
                }
                let y = q;
                visited.push(y);
                let q2 = self.partner[n - 1 - y];
                if q2 < k {
                    closed = false;
                    break;
                }
                cur = n - 1 - q2;
                if cur == x {
                    break;
                }
            }
            for &v in &visited {
                seen[v] = true;
            }
            if closed {
                loops.push(x);
            }
        }
        (Diagram { k, partner }, loops)
    }

    /// Number of loops after joining each top point to the bottom point below it around the right.
    pub fn closure_loops(&self) -> Vec<usize> {
        let n = 2 * self.k;
        let mut seen = vec![false; n];
        let mut loops = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            loops.push(s);
            let mut p = s;
            loop {
                seen[p] = true;
                let q = self.partner[p];
                seen[q] = true;
                p = n - 1 - q;
                if p == s {
                    break;
                }
            }
        }
        loops
    }

    /// All noncrossing perfect matchings of `2k` points; with a coloring, like colors only.
    pub fn enumerate(k: usize, colors: Option<&[Color]>) -> Vec<Diagram> {
        let n = 2 * k;
        let mut out = Vec::new();
        let mut partner = vec![usize::MAX; n];
        fn rec(i: usize, n: usize, partner: &mut Vec<usize>, stack: &mut Vec<usize>, colors: Option<&[Color]>, out: &mut Vec<Vec<usize>>) {
            if i == n {
                if stack.is_empty() {
                    out.push(partner.clone());
                }
                return;
            }
            if stack.len() > n - i {
                return;
            }
            // close the innermost open point
            if let Some(&top) = stack.last() {
                if colors.is_none_or(|c| c[top] == c[i]) {
                    stack.pop();
                    partner[top] = i;
                    partner[i] = top;
                    rec(i + 1, n, partner, stack, colors, out);
                    partner[top] = usize::MAX;
                    partner[i] = usize::MAX;
                    stack.push(top);
                }
            }
            stack.push(i);
            rec(i + 1, n, partner, stack, colors, out);
            stack.pop();
        }
        let mut raw = Vec::new();
        rec(0, n, &mut partner, &mut Vec::new(), colors, &mut raw);
        for p in raw {
            out.push(Diagram { k, partner: p });
        }
        out.sort();
        out
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_partition())
    }
}

/// Clockwise ∘••∘∘••∘… coloring of the `2k` boundary points.
pub fn fc_colors(k: usize) -> Vec<Color> {
    (0..2 * k)
        .map(|i| if i % 4 == 0 || i % 4 == 3 { Color::White } else { Color::Black })
        .collect()
}

/// Loop values: a single δ for Temperley-Lieb, one per color for Fuss-Catalan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Loops {
    Tl(Q),
    Fc { white: Q, black: Q },
}

impl Loops {
    fn weight(&self, k: usize, middle_point: usize) -> Q {
        match self {
            Loops::Tl(d) => d.clone(),
            Loops::Fc { white, black } => match fc_colors(k)[middle_point] {
                Color::White => white.clone(),
                Color::Black => black.clone(),
            },
        }
    }

    fn is_fc(&self) -> bool {
        matches!(self, Loops::Fc { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramElement {
    k: usize,
    loops: Loops,
    terms: BTreeMap<Diagram, Q>,
}

impl DiagramElement {
    pub fn zero(k: usize, loops: Loops) -> Result<Self> {
        if loops.is_fc() && k % 2 == 1 {
            return Err(Error::InvalidArgument("Fuss-Catalan diagrams need an even number of points per side".into()));
        }
        Ok(DiagramElement { k, loops, terms: BTreeMap::new() })
    }

    pub fn from_diagram(d: Diagram, loops: Loops) -> Result<Self> {
        let mut e = Self::zero(d.k, loops)?;
        if e.loops.is_fc() {
            let c = fc_colors(d.k);
            if (0..2 * d.k).any(|i| c[i] != c[d.partner[i]]) {
                return Err(Error::InvalidArgument("string joins different colors".into()));
            }
        }
        e.terms.insert(d, Q::one());
        Ok(e)
    }

    pub fn identity(k: usize, loops: Loops) -> Result<Self> {
        Self::from_diagram(Diagram::identity(k), loops)
    }

    /// TL identity with loop value δ.
    pub fn tl_identity(k: usize, delta: Q) -> Self {
        Self::from_diagram(Diagram::identity(k), Loops::Tl(delta)).expect("identity is valid")
    }

    pub fn epsilon(i: usize, k: usize, delta: Q) -> Result<Self> {
        Self::from_diagram(Diagram::epsilon(i, k)?, Loops::Tl(delta))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn loops(&self) -> &Loops {
        &self.loops
    }

    pub fn terms(&self) -> &BTreeMap<Diagram, Q> {
        &self.terms
    }

    pub fn coeff(&self, d: &Diagram) -> Q {
        self.terms.get(d).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, d: Diagram, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(d) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.k != other.k {
            return Err(Error::SizeMismatch(format!("k = {} vs {}", self.k, other.k)));
        }
        if self.loops != other.loops {
            return Err(Error::InvalidArgument("loop scalars differ".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out.add_term(d.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = DiagramElement { k: self.k, loops: self.loops.clone(), terms: BTreeMap::new() };
        if c.is_zero() {
            return out;
        }
        for (d, v) in &self.terms {
            out.terms.insert(d.clone(), v * c);
        }
        out
    }

    /// Bilinear vertical concatenation, `self` on top.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = DiagramElement { k: self.k, loops: self.loops.clone(), terms: BTreeMap::new() };
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (d, loops) = a.stack(b);
                let mut c = ca * cb;
                for x in loops {
                    c *= self.loops.weight(self.k, x);
                }
                out.add_term(d, c);
            }
        }
        Ok(out)
    }

    /// Conjugate-linear flip; rational coefficients are self-conjugate.
    pub fn involution(&self) -> Self {
        let mut out = DiagramElement { k: self.k, loops: self.loops.clone(), terms: BTreeMap::new() };
        for (d, c) in &self.terms {
            out.terms.insert(d.flip(), c.clone());
        }
        out
    }

    /// Normalized Markov trace by closing to the right, `tr(1) = 1`.
    pub fn markov_trace(&self) -> Q {
        let k = self.k;
        let identity_weight = Diagram::identity(k)
            .closure_loops()
            .into_iter()
            .fold(Q::one(), |acc, p| acc * self.loops.weight(k, p));
        let mut total = Q::zero();
        for (d, c) in &self.terms {
            let w = d
                .closure_loops()
                .into_iter()
                .fold(Q::one(), |acc, p| acc * self.loops.weight(k, p));
            total += c * w;
        }
        if identity_weight.is_zero() {
            return total;
        }
        total / identity_weight
    }

    /// `{diagram-string: rational}` map.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (d, c) in &self.terms {
            m.insert(d.to_string(), Value::String(fmt_q(c)));
        }
        Value::Object(m)
    }
}

/// Jones projection `e_i = δ^{-1} ε_i`.
pub fn jones_projection(i: usize, k: usize, delta: &Q) -> Result<DiagramElement> {
    if delta.is_zero() {
        return Err(Error::InvalidArgument("δ must be nonzero".into()));
    }
    Ok(DiagramElement::epsilon(i, k, delta.clone())?.scale(&delta.recip()))
}

pub fn compose(a: &DiagramElement, b: &DiagramElement) -> Result<DiagramElement> {
    a.compose(b)
}

pub fn markov_trace(x: &DiagramElement) -> Q {
    x.markov_trace()
}

pub fn involution(x: &DiagramElement) -> DiagramElement {
    x.involution()
}

/// Catalan number `C_k`.
pub fn dimension(k: usize) -> usize {
    Diagram::enumerate(k, None).len()
}

/// Number of Fuss-Catalan diagrams with `k` points per side (zero for odd `k`).
pub fn fc_dimension(k: usize) -> usize {
    if k % 2 == 1 {
        return 0;
    }
    Diagram::enumerate(k, Some(&fc_colors(k))).len()
}

/// Result of the relation suite on TL(k) at a given δ.
#[derive(Clone, Debug)]
pub struct RelationReport {
    pub k: usize,
    pub delta: Q,
    pub idempotent: bool,
    pub self_adjoint: bool,
    pub far_commute: bool,
    pub braid_like: bool,
    pub markov: bool,
}

impl RelationReport {
    pub fn all(&self) -> bool {
        self.idempotent && self.self_adjoint && self.far_commute && self.braid_like && self.markov
    }
}

/// Checks the TL relations among `e_1..e_{k-1}` and the Markov property on the given words.
pub fn check_relations(k: usize, delta: &Q, words: &[Vec<usize>]) -> Result<RelationReport> {
    let e: Vec<DiagramElement> = (1..k).map(|i| jones_projection(i, k, delta)).collect::<Result<_>>()?;
    let inv_d2 = qpow(delta, -2);
    let mut rep = RelationReport {
        k,
        delta: delta.clone(),
        idempotent: true,
        self_adjoint: true,
        far_commute: true,
        braid_like: true,
        markov: true,
    };
    for i in 0..e.len() {
        rep.idempotent &= e[i].compose(&e[i])? == e[i];
        rep.self_adjoint &= e[i].involution() == e[i];
        for j in 0..e.len() {
            let gap = i.abs_diff(j);
            if gap >= 2 {
                rep.far_commute &= e[i].compose(&e[j])? == e[j].compose(&e[i])?;
            } else if gap == 1 {
                rep.braid_like &= e[i].compose(&e[j])?.compose(&e[i])? == e[i].scale(&inv_d2);
            }
        }
    }
    for w in words {
        let n = w.iter().copied().max().unwrap_or(0);
        if n + 1 >= k {
            continue;
        }
        let mut x = DiagramElement::tl_identity(k, delta.clone());
        for &i in w {
            x = x.compose(&e[i - 1])?;
        }
        let lhs = x.compose(&e[n])?.markov_trace();
        rep.markov &= lhs == &inv_d2 * x.markov_trace();
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qf};

    #[test]
    fn epsilon_squares_to_delta() {
        let d = q(3);
        let e = DiagramElement::epsilon(1, 2, d.clone()).unwrap();
        assert_eq!(e.compose(&e).unwrap(), e.scale(&d));
    }

    #[test]
    fn epsilon_chain_has_no_circle() {
        let d = q(3);
        let e1 = DiagramElement::epsilon(1, 3, d.clone()).unwrap();
        let e2 = DiagramElement::epsilon(2, 3, d).unwrap();
        assert_eq!(e1.compose(&e2).unwrap().compose(&e1).unwrap(), e1);
    }

    #[test]
    fn projections_and_traces() {
        let d = qf(3, 2);
        let e = jones_projection(1, 2, &d).unwrap();
        assert_eq!(e.compose(&e).unwrap(), e);
        assert_eq!(e.markov_trace(), qpow(&d, -2));
        assert_eq!(DiagramElement::tl_identity(3, d).markov_trace(), q(1));
        assert!(jones_projection(0, 2, &q(2)).is_err());
        assert!(jones_projection(2, 2, &q(2)).is_err());
    }

    #[test]
    fn dimensions() {
        assert_eq!(dimension(0), 1);
        assert_eq!(dimension(3), 5);
        assert_eq!(fc_dimension(2), 1);
        assert_eq!(fc_dimension(4), 3);
        assert_eq!(fc_dimension(6), 12);
    }

    #[test]
    fn fc_loops_take_their_color() {
        let loops = Loops::Fc { white: q(2), black: q(5) };
        let x = DiagramElement::identity(4, loops.clone()).unwrap();
        assert_eq!(x.markov_trace(), q(1));
        let cupcap = Diagram::from_partner(4, vec![3, 2, 1, 0, 7, 6, 5, 4]).unwrap();
        let y = DiagramElement::from_diagram(cupcap, loops).unwrap();
        let yy = y.compose(&y).unwrap();
        assert_eq!(yy, y.scale(&q(10)));
    }

    #[test]
    fn relation_suite() {
        let rep = check_relations(5, &qf(5, 2), &[vec![1, 2], vec![3, 1, 2]]).unwrap();
        assert!(rep.all(), "{rep:?}");
    }
}
