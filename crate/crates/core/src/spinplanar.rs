//! Planar tangles acting on spin, tensor and bipartite-graph planar algebras.
//!
//! A box of degree `d` has `2d` marked points numbered clockwise from the top
//! left: top points `0..d` left to right, bottom points `d..2d` right to left.
//! Interval `p` of a box is the boundary arc from point `p` to point `p+1`;
//! odd intervals are unshaded (layer `a` of the graph), even ones shaded
//! (layer `b`). An element of degree `k` is a combination of `2k`-loops based
//! at layer `a`, the loop edge `e_{p+1}` sitting on point `p`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// A marked point: box `0` is the output box, box `j+1` the `j`-th input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pt {
    pub boxi: usize,
    pub idx: usize,
}

impl Pt {
    pub fn out(idx: usize) -> Self {
        Pt { boxi: 0, idx }
    }

    pub fn input(j: usize, idx: usize) -> Self {
        Pt { boxi: j + 1, idx }
    }
}

impl fmt::Display for Pt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.boxi == 0 {
            write!(f, "out:{}", self.idx)
        } else {
            write!(f, "in{}:{}", self.boxi - 1, self.idx)
        }
    }
}

/// Side of a string at one of its endpoints: the interval before or after the point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Before,
    After,
}

impl Side {
    fn flip(self) -> Self {
        match self {
            Side::Before => Side::After,
            Side::After => Side::Before,
        }
    }
}

/// A local extremum of a string, recorded by an endpoint and the concave side there.
///
/// Under spin factors it contributes `√(η(concave)/η(convex))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Extremum {
    pub at: Pt,
    pub concave: Side,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shade {
    A,
    B,
}

fn interval_count(d: usize) -> usize {
    if d == 0 {
        1
    } else {
        2 * d
    }
}

fn shade_of(d: usize, p: usize) -> Shade {
    if d == 0 || p % 2 == 1 {
        Shade::A
    } else {
        Shade::B
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Faces {
    of: Vec<Vec<usize>>,
    shade: Vec<Shade>,
}

/// A planar tangle: box degrees, string pairing, closed loops and extremum data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tangle {
    output: usize,
    inputs: Vec<usize>,
    partner: Vec<Vec<Pt>>,
    /// Closed loops by the shading of the region they enclose.
    pub circles_a: usize,
    pub circles_b: usize,
    extrema: Option<Vec<Extremum>>,
    anchors: Vec<Option<(Pt, Side)>>,
    faces: Faces,
}

impl Tangle {
    /// Validates the pairing, the shading and planarity.
    ///
    /// `extrema = None` marks a tangle whose spin factors are not tracked.
    /// Boxes of degree 0 are placed in the unshaded region at the left.
    pub fn new(
        output: usize,
        inputs: Vec<usize>,
        pairs: &[(Pt, Pt)],
        circles: (usize, usize),
        extrema: Option<Vec<Extremum>>,
    ) -> Result<Self> {
        let first = if output > 0 {
            Some((Pt::out(0), Side::Before))
        } else {
            inputs.iter().position(|&d| d > 0).map(|j| (Pt::input(j, 0), Side::Before))
        };
        let anchors = std::iter::once(output)
            .chain(inputs.iter().copied())
            .map(|d| if d == 0 { first } else { None })
            .collect();
        Self::with_anchors(output, inputs, pairs, circles, extrema, anchors)
    }

    /// As [`Tangle::new`], with each degree-0 box placed in the region on the
    /// given side of the given point.
    pub fn with_anchors(
        output: usize,
        inputs: Vec<usize>,
        pairs: &[(Pt, Pt)],
        circles: (usize, usize),
        extrema: Option<Vec<Extremum>>,
        anchors: Vec<Option<(Pt, Side)>>,
    ) -> Result<Self> {
        let degs: Vec<usize> = std::iter::once(output).chain(inputs.iter().copied()).collect();
        let unset = Pt { boxi: usize::MAX, idx: usize::MAX };
        let mut partner: Vec<Vec<Pt>> = degs.iter().map(|&d| vec![unset; 2 * d]).collect();
        let check = |p: &Pt| -> Result<()> {
            if p.boxi >= degs.len() || p.idx >= 2 * degs[p.boxi] {
                return Err(Error::InvalidArgument(format!("point {p} does not exist")));
            }
            Ok(())
        };
        for (x, y) in pairs {
            check(x)?;
            check(y)?;
            if x == y || partner[x.boxi][x.idx] != unset || partner[y.boxi][y.idx] != unset {
                return Err(Error::InvalidArgument(format!("point used twice in string {x}-{y}")));
            }
            partner[x.boxi][x.idx] = *y;
            partner[y.boxi][y.idx] = *x;
        }
        if partner.iter().flatten().any(|p| *p == unset) {
            return Err(Error::InvalidArgument("string pairing is not perfect".into()));
        }
        if let Some(ex) = &extrema {
            for e in ex {
                check(&e.at)?;
            }
        }
        if anchors.len() != degs.len() {
            return Err(Error::SizeMismatch("one anchor slot per box".into()));
        }
        for a in anchors.iter().flatten() {
            check(&a.0)?;
        }
        let faces = compute_faces(&degs, &partner, &anchors)?;
        Ok(Tangle { output, inputs, partner, circles_a: circles.0, circles_b: circles.1, extrema, anchors, faces })
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn circles(&self) -> usize {
        self.circles_a + self.circles_b
    }

    pub fn partner(&self, p: Pt) -> Pt {
        self.partner[p.boxi][p.idx]
    }

    pub fn extrema(&self) -> Option<&[Extremum]> {
        self.extrema.as_deref()
    }

    pub fn face_count(&self) -> usize {
        self.faces.shade.len()
    }

    fn degree(&self, boxi: usize) -> usize {
        if boxi == 0 {
            self.output
        } else {
            self.inputs[boxi - 1]
        }
    }

    fn face_at(&self, p: Pt, side: Side) -> usize {
        let n = 2 * self.degree(p.boxi);
        let i = match side {
            Side::After => p.idx,
            Side::Before => (p.idx + n - 1) % n,
        };
        self.faces.of[p.boxi][i]
    }

    /// String pairs, each listed once from its smaller endpoint.
    pub fn strings(&self) -> Vec<(Pt, Pt)> {
        let mut out = Vec::new();
        for (b, row) in self.partner.iter().enumerate() {
            for (i, &q) in row.iter().enumerate() {
                let p = Pt { boxi: b, idx: i };
                if p < q {
                    out.push((p, q));
                }
            }
        }
        out
    }
}

fn compute_faces(degs: &[usize], partner: &[Vec<Pt>], anchors: &[Option<(Pt, Side)>]) -> Result<Faces> {
    const NONE: usize = usize::MAX;
    let mut of: Vec<Vec<usize>> = degs.iter().map(|&d| vec![NONE; interval_count(d)]).collect();
    let mut shade: Vec<Shade> = Vec::new();
    let next = |b: usize, p: usize| -> (usize, usize) {
        let d = degs[b];
        let end = if b == 0 { p } else { (p + 1) % (2 * d) };
        let q = partner[b][end];
        if q.boxi == 0 {
            let n = 2 * degs[0];
            (0, (q.idx + n - 1) % n)
        } else {
            (q.boxi, q.idx)
        }
    };
    for b in 0..degs.len() {
        if degs[b] == 0 {
            continue;
        }
        for p in 0..2 * degs[b] {
            if of[b][p] != NONE {
                continue;
            }
            let f = shade.len();
            let s = shade_of(degs[b], p);
            shade.push(s);
            let (mut cb, mut cp) = (b, p);
            while of[cb][cp] == NONE {
                if shade_of(degs[cb], cp) != s {
                    return Err(Error::NonPlanar("strings join regions of different shading".into()));
                }
                of[cb][cp] = f;
                (cb, cp) = next(cb, cp);
            }
        }
    }
    let traced = shade.len();
    let positive: Vec<usize> = (0..degs.len()).filter(|&b| degs[b] > 0).collect();
    let points: usize = degs.iter().map(|d| 2 * d).sum();
    if !positive.is_empty() {
        // one component, Euler characteristic 2
        let mut comp: Vec<usize> = (0..degs.len()).collect();
        fn find(c: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while c[r] != r {
                r = c[r];
            }
            c[x] = r;
            r
        }
        for (b, row) in partner.iter().enumerate() {
            for q in row {
                let (x, y) = (find(&mut comp, b), find(&mut comp, q.boxi));
                comp[x] = y;
            }
        }
        let root = find(&mut comp, positive[0]);
        if positive.iter().any(|&b| find(&mut comp, b) != root) {
            return Err(Error::Unsupported("boxes not linked by strings to one another".into()));
        }
        if traced + positive.len() != points / 2 + 2 {
            return Err(Error::NonPlanar(format!(
                "{traced} regions for {} points and {} boxes",
                points,
                positive.len()
            )));
        }
    }
    let mut shared = None;
    for b in 0..degs.len() {
        if degs[b] > 0 {
            continue;
        }
        let f = match anchors[b] {
            Some((p, side)) => {
                let n = 2 * degs[p.boxi];
                let i = if side == Side::After { p.idx } else { (p.idx + n - 1) % n };
                of[p.boxi][i]
            }
            None if positive.is_empty() => *shared.get_or_insert_with(|| {
                shade.push(Shade::A);
                shade.len() - 1
            }),
            None => return Err(Error::InvalidArgument(format!("box {b} of degree 0 has no position"))),
        };
        if shade[f] != Shade::A {
            return Err(Error::NonPlanar(format!("box {b} of degree 0 sits in a shaded region")));
        }
        of[b][0] = f;
    }
    Ok(Faces { of, shade })
}

/// The tangles of the catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedTangle {
    Identity,
    Multiplication,
    Inclusion,
    Expectation,
    Jones,
    Trace,
    Rotation,
    Shift,
}

impl NamedTangle {
    pub const ALL: [NamedTangle; 8] = [
        NamedTangle::Identity,
        NamedTangle::Multiplication,
        NamedTangle::Inclusion,
        NamedTangle::Expectation,
        NamedTangle::Jones,
        NamedTangle::Trace,
        NamedTangle::Rotation,
        NamedTangle::Shift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedTangle::Identity => "identity",
            NamedTangle::Multiplication => "multiplication",
            NamedTangle::Inclusion => "inclusion",
            NamedTangle::Expectation => "expectation",
            NamedTangle::Jones => "jones",
            NamedTangle::Trace => "trace",
            NamedTangle::Rotation => "rotation",
            NamedTangle::Shift => "shift",
        }
    }
}

impl std::str::FromStr for NamedTangle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NamedTangle::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown tangle '{s}'")))
    }
}

/// Bottom point below top point `c` of a degree-`d` box.
fn below(d: usize, c: usize) -> usize {
    2 * d - 1 - c
}

/// The named tangle of index `k`.
///
/// Multiplication takes the lower box first; `rotation` requires `k ≥ 1`.
pub fn named_tangle(name: NamedTangle, k: usize) -> Result<Tangle> {
    use NamedTangle::*;
    let o = Pt::out;
    let i0 = |x| Pt::input(0, x);
    match name {
        Identity => Tangle::new(k, vec![k], &(0..2 * k).map(|q| (o(q), i0(q))).collect::<Vec<_>>(), (0, 0), Some(vec![])),
        Multiplication => {
            let upper = |x| Pt::input(1, x);
            let mut pairs = Vec::new();
            for c in 0..k {
                pairs.push((o(c), upper(c)));
                pairs.push((upper(below(k, c)), i0(c)));
                pairs.push((i0(below(k, c)), o(below(k, c))));
            }
            Tangle::new(k, vec![k, k], &pairs, (0, 0), Some(vec![]))
        }
        Inclusion => {
            let mut pairs: Vec<(Pt, Pt)> = (0..k).map(|c| (o(c), i0(c))).collect();
            pairs.extend((k..2 * k).map(|x| (i0(x), o(x + 2))));
            pairs.push((o(k), o(k + 1)));
            Tangle::new(k + 1, vec![k], &pairs, (0, 0), Some(vec![]))
        }
        Expectation => {
            let mut pairs: Vec<(Pt, Pt)> = (0..k).map(|c| (o(c), i0(c))).collect();
            pairs.extend((k + 2..2 * k + 2).map(|x| (i0(x), o(x - 2))));
            pairs.push((i0(k), i0(k + 1)));
            let ex = Extremum { at: i0(k), concave: Side::After };
            Tangle::new(k, vec![k + 1], &pairs, (0, 0), Some(vec![ex, ex]))
        }
        Jones => {
            let m = k + 2;
            let mut pairs: Vec<(Pt, Pt)> = (0..k).map(|c| (o(c), o(below(m, c)))).collect();
            pairs.push((o(k), o(k + 1)));
            pairs.push((o(k + 2), o(k + 3)));
            let ex = vec![Extremum { at: o(k), concave: Side::After }, Extremum { at: o(k + 2), concave: Side::After }];
            Tangle::new(m, vec![], &pairs, (0, 0), Some(ex))
        }
        Trace => {
            let pairs: Vec<(Pt, Pt)> = (0..k).map(|c| (i0(c), i0(below(k, c)))).collect();
            let ex = (0..k)
                .flat_map(|c| {
                    let e = Extremum { at: i0(c), concave: Side::After };
                    [e, e]
                })
                .collect();
            Tangle::new(0, vec![k], &pairs, (0, 0), Some(ex))
        }
        Rotation => {
            if k == 0 {
                return Err(Error::InvalidArgument("rotation needs k ≥ 1".into()));
            }
            let n = 2 * k;
            Tangle::new(k, vec![k], &(0..n).map(|q| (o(q), i0((q + 2) % n))).collect::<Vec<_>>(), (0, 0), None)
        }
        Shift => {
            let m = k + 2;
            let mut pairs = vec![(o(0), o(below(m, 0))), (o(1), o(below(m, 1)))];
            pairs.extend((0..k).map(|c| (i0(c), o(c + 2))));
            pairs.extend((k..2 * k).map(|x| (i0(x), o(x + 2))));
            Tangle::new(m, vec![k], &pairs, (0, 0), Some(vec![]))
        }
    }
}

/// Substitutes `inner` into input box `slot` of `outer`.
///
/// Closed loops created by the gluing are counted by the shading of the region
/// they enclose; a loop enclosing a remaining box is rejected.
pub fn glue(outer: &Tangle, slot: usize, inner: &Tangle) -> Result<Tangle> {
    if slot >= outer.inputs.len() {
        return Err(Error::InvalidArgument(format!("outer tangle has no input {slot}")));
    }
    if outer.inputs[slot] != inner.output {
        return Err(Error::SizeMismatch(format!(
            "input {slot} has degree {} but the inner output has degree {}",
            outer.inputs[slot], inner.output
        )));
    }
    let sb = slot + 1;
    let ni = inner.inputs.len();
    let map_outer = |p: Pt| -> Pt {
        if p.boxi > sb {
            Pt { boxi: p.boxi + ni - 1, idx: p.idx }
        } else {
            p
        }
    };
    let map_inner = |p: Pt| -> Pt { Pt { boxi: p.boxi + slot, idx: p.idx } };
    // (tangle, point): tangle 0 = outer, 1 = inner
    let surviving = |t: usize, p: Pt| if t == 0 { p.boxi != sb } else { p.boxi != 0 };
    let mapped = |t: usize, p: Pt| if t == 0 { map_outer(p) } else { map_inner(p) };
    let tang = |t: usize| if t == 0 { outer } else { inner };
    let cross = |t: usize, p: Pt| -> (usize, Pt) {
        if t == 0 {
            (1, Pt::out(p.idx))
        } else {
            (0, Pt::input(slot, p.idx))
        }
    };
    // walk from a point along its string until a surviving endpoint, tracking a side
    let d = inner.output;
    let walk = |t0: usize, p0: Pt, side0: Side| -> Option<(usize, Pt, Side)> {
        let (mut t, mut p, mut side) = (t0, p0, side0);
        for _ in 0..=2 * d + 1 {
            let q = tang(t).partner(p);
            if (p.boxi == 0) == (q.boxi == 0) {
                side = side.flip();
            }
            if surviving(t, q) {
                return Some((t, q, side));
            }
            (t, p) = cross(t, q);
        }
        None
    };
    let mut pairs = Vec::new();
    for t in 0..2 {
        for (b, row) in tang(t).partner.iter().enumerate() {
            for i in 0..row.len() {
                let p = Pt { boxi: b, idx: i };
                if !surviving(t, p) {
                    continue;
                }
                let (t2, q, _) = walk(t, p, Side::After).expect("open string");
                let (x, y) = (mapped(t, p), mapped(t2, q));
                if x < y {
                    pairs.push((x, y));
                }
            }
        }
    }
    // closed loops run through the interface only
    let mut seen = vec![false; 2 * d];
    let mut new_loops = 0;
    for s in 0..2 * d {
        if seen[s] || walk(1, Pt::out(s), Side::After).is_some() {
            continue;
        }
        new_loops += 1;
        let (mut t, mut p) = (1usize, Pt::out(s));
        loop {
            seen[p.idx] = true;
            (t, p) = cross(t, tang(t).partner(p));
            if t == 1 && p.idx == s {
                break;
            }
        }
    }
    // regions not touching any remaining box are the interiors of the new loops
    let (mut internal_a, mut internal_b) = (0, 0);
    if new_loops > 0 {
        let fo = outer.face_count();
        let total = fo + inner.face_count();
        let mut uf: Vec<usize> = (0..total).collect();
        fn find(c: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while c[r] != r {
                r = c[r];
            }
            c[x] = r;
            r
        }
        for p in 0..interval_count(d) {
            let (x, y) = (find(&mut uf, outer.faces.of[sb][p]), find(&mut uf, fo + inner.faces.of[0][p]));
            uf[x] = y;
        }
        let mut touches = vec![false; total];
        for (t, off) in [(0usize, 0usize), (1, fo)] {
            for (b, row) in tang(t).faces.of.iter().enumerate() {
                let live = if t == 0 { b != sb } else { b != 0 };
                if live {
                    for &f in row {
                        let r = find(&mut uf, f + off);
                        touches[r] = true;
                    }
                }
            }
        }
        let mut counted = vec![false; total];
        for f in 0..total {
            let r = find(&mut uf, f);
            if touches[r] || counted[r] {
                continue;
            }
            counted[r] = true;
            let shade = if f < fo { outer.faces.shade[f] } else { inner.faces.shade[f - fo] };
            match shade {
                Shade::A => internal_a += 1,
                Shade::B => internal_b += 1,
            }
        }
        if internal_a + internal_b != new_loops {
            return Err(Error::Unsupported("a closed loop encloses a box".into()));
        }
    }
    let extrema = match (&outer.extrema, &inner.extrema) {
        (Some(eo), Some(ei)) => {
            let mut ex = Vec::new();
            for (t, list) in [(0usize, eo), (1, ei)] {
                for e in list {
                    if surviving(t, e.at) {
                        ex.push(Extremum { at: mapped(t, e.at), concave: e.concave });
                    } else if let Some((t2, r, side)) = walk(t, e.at, e.concave) {
                        ex.push(Extremum { at: mapped(t2, r), concave: side });
                    }
                }
            }
            Some(ex)
        }
        _ => None,
    };
    let resolve = |t: usize, anchor: Option<(Pt, Side)>| -> Result<Option<(Pt, Side)>> {
        match anchor {
            None => Ok(None),
            Some((p, side)) if surviving(t, p) => Ok(Some((mapped(t, p), side))),
            Some((p, side)) => walk(t, p, side)
                .map(|(t2, q, s2)| Some((mapped(t2, q), s2)))
                .ok_or_else(|| Error::Unsupported("a box of degree 0 lies inside a closed loop".into())),
        }
    };
    let mut anchors: Vec<Option<(Pt, Side)>> = Vec::new();
    for b in 0..outer.anchors.len() {
        if b == sb {
            for a in &inner.anchors[1..] {
                anchors.push(match a {
                    None => resolve(0, outer.anchors[sb])?,
                    some => resolve(1, *some)?,
                });
            }
            continue;
        }
        anchors.push(match outer.anchors[b] {
            None if outer.degree(b) == 0 => resolve(1, inner.anchors[0])?,
            a => resolve(0, a)?,
        });
    }
    let mut inputs: Vec<usize> = outer.inputs[..slot].to_vec();
    inputs.extend(inner.inputs.iter().copied());
    inputs.extend(outer.inputs[slot + 1..].iter().copied());
    Tangle::with_anchors(
        outer.output,
        inputs,
        &pairs,
        (outer.circles_a + inner.circles_a + internal_a, outer.circles_b + inner.circles_b + internal_b),
        extrema,
        anchors,
    )
}

/// A bipartite graph with layers `a` and `b`; parallel edges are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    pub a: usize,
    pub b: usize,
    /// Edge `e` joins `a`-vertex `edges[e].0` with `b`-vertex `edges[e].1`.
    pub edges: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    /// From an `a × b` matrix of edge multiplicities.
    pub fn from_matrix(m: &[Vec<usize>]) -> Result<Self> {
        let a = m.len();
        let b = m.first().map_or(0, |r| r.len());
        if a == 0 || b == 0 || m.iter().any(|r| r.len() != b) {
            return Err(Error::InvalidArgument("inclusion matrix must be a nonempty rectangle".into()));
        }
        let mut edges = Vec::new();
        for (i, row) in m.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                edges.extend(std::iter::repeat_n((i, j), c));
            }
        }
        Ok(BipartiteGraph { a, b, edges })
    }

    /// Bratteli diagram of `ℂ ⊂ ℂ^N`.
    pub fn star(n: usize) -> Self {
        BipartiteGraph { a: 1, b: n, edges: (0..n).map(|j| (0, j)).collect() }
    }

    /// Bratteli diagram of `ℂ ⊂ M_N(ℂ)`.
    pub fn tensor(n: usize) -> Self {
        BipartiteGraph { a: 1, b: 1, edges: vec![(0, 0); n] }
    }

    /// Edges joining `a`-vertex `i` and `b`-vertex `j`.
    pub fn between(&self, i: usize, j: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e] == (i, j)).collect()
    }

    pub fn degree_a(&self, i: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == i).count()
    }

    pub fn degree_b(&self, j: usize) -> usize {
        self.edges.iter().filter(|e| e.1 == j).count()
    }

    /// Symmetric adjacency matrix, `a`-vertices first.
    pub fn adjacency(&self) -> Vec<Vec<f64>> {
        let n = self.a + self.b;
        let mut m = vec![vec![0.0; n]; n];
        for &(i, j) in &self.edges {
            m[i][self.a + j] += 1.0;
            m[self.a + j][i] += 1.0;
        }
        m
    }

    /// Perron eigenvalue and positive eigenvector, by power iteration on `M + 1`.
    pub fn perron(&self) -> (f64, Vec<f64>) {
        let m = self.adjacency();
        let n = m.len();
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        for _ in 0..100_000 {
            let mut w: Vec<f64> = (0..n).map(|i| v[i] + (0..n).map(|j| m[i][j] * v[j]).sum::<f64>()).collect();
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            w.iter_mut().for_each(|x| *x /= norm);
            let diff = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            v = w;
            if diff < 1e-12 {
                break;
            }
        }
        let mv: Vec<f64> = (0..n).map(|i| (0..n).map(|j| m[i][j] * v[j]).sum()).collect();
        let gamma = mv.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
        (gamma, v)
    }

    /// All `2k`-loops based at `a`-vertices; for `k = 0` the `a`-vertices themselves.
    pub fn loops(&self, k: usize) -> Vec<Loop> {
        let mut out = Vec::new();
        for base in 0..self.a {
            let mut path = Vec::new();
            self.extend_loops(k, base, base, &mut path, &mut out);
        }
        out
    }

    fn extend_loops(&self, k: usize, base: usize, at: usize, path: &mut Vec<usize>, out: &mut Vec<Loop>) {
        let len = path.len();
        if len == 2 * k {
            if at == base {
                out.push(Loop { base, edges: path.clone() });
            }
            return;
        }
        for e in 0..self.edges.len() {
            let (i, j) = self.edges[e];
            let next = if len.is_multiple_of(2) {
                if i != at {
                    continue;
                }
                j
            } else {
                if j != at {
                    continue;
                }
                i
            };
            path.push(e);
            self.extend_loops(k, base, next, path, out);
            path.pop();
        }
    }

    /// Whether `l` is a `2k`-loop of this graph.
    pub fn is_loop(&self, l: &Loop) -> bool {
        if l.base >= self.a || l.edges.len() % 2 == 1 || l.edges.iter().any(|&e| e >= self.edges.len()) {
            return false;
        }
        let mut at = l.base;
        for (s, &e) in l.edges.iter().enumerate() {
            let (i, j) = self.edges[e];
            if s % 2 == 0 {
                if i != at {
                    return false;
                }
                at = j;
            } else {
                if j != at {
                    return false;
                }
                at = i;
            }
        }
        at == l.base
    }
}

/// A basis loop: base vertex in layer `a` and the edge sequence `e_1..e_{2k}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Loop {
    pub base: usize,
    pub edges: Vec<usize>,
}

/// How strings, extrema and closed loops are weighted.
#[derive(Clone, Debug, PartialEq)]
pub enum Weights {
    /// Plain Kronecker sums, as in the spin and tensor planar algebras.
    Kronecker,
    /// Spin factors from a `γ`-eigenvector `η` indexed `a`-vertices first.
    SpinFactors { eta: Vec<f64>, gamma: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanarModel {
    pub graph: BipartiteGraph,
    pub weights: Weights,
}

impl PlanarModel {
    pub fn spin(n: usize) -> Self {
        PlanarModel { graph: BipartiteGraph::star(n), weights: Weights::Kronecker }
    }

    pub fn tensor(n: usize) -> Self {
        PlanarModel { graph: BipartiteGraph::tensor(n), weights: Weights::Kronecker }
    }

    /// Spin factors with the Perron data of the graph.
    pub fn perron(graph: BipartiteGraph) -> Self {
        let (gamma, eta) = graph.perron();
        PlanarModel { graph, weights: Weights::SpinFactors { eta, gamma } }
    }

    /// Spin factors with `η(i) = a_i/√dim A`, `η(j) = b_j/√dim B` and `γ = √(dim B/dim A)`
    /// for the inclusion with multiplicity matrix `m` and block sizes `a_dims`.
    pub fn markov(m: &[Vec<usize>], a_dims: &[u64]) -> Result<Self> {
        let graph = BipartiteGraph::from_matrix(m)?;
        if a_dims.len() != graph.a {
            return Err(Error::SizeMismatch(format!("{} block sizes for {} a-vertices", a_dims.len(), graph.a)));
        }
        let b_dims: Vec<u64> = (0..graph.b).map(|j| (0..graph.a).map(|i| a_dims[i] * m[i][j] as u64).sum()).collect();
        let dim_a: f64 = a_dims.iter().map(|&x| (x * x) as f64).sum();
        let dim_b: f64 = b_dims.iter().map(|&x| (x * x) as f64).sum();
        let gamma = (dim_b / dim_a).sqrt();
        let mut eta: Vec<f64> = a_dims.iter().map(|&x| x as f64 / dim_a.sqrt()).collect();
        eta.extend(b_dims.iter().map(|&x| x as f64 / dim_b.sqrt()));
        let adj = graph.adjacency();
        for (i, row) in adj.iter().enumerate() {
            let mv: f64 = row.iter().zip(&eta).map(|(a, b)| a * b).sum();
            if (mv - gamma * eta[i]).abs() > 1e-9 {
                return Err(Error::Invariant("inclusion is not Markov: η is not a γ-eigenvector".into()));
            }
        }
        Ok(PlanarModel { graph, weights: Weights::SpinFactors { eta, gamma } })
    }

    /// Loop parameter `δ` of the Jones projections.
    pub fn gamma(&self) -> Option<f64> {
        match &self.weights {
            Weights::SpinFactors { gamma, .. } => Some(*gamma),
            Weights::Kronecker => None,
        }
    }

    fn loop_weight(&self, shade: Shade) -> Result<f64> {
        match &self.weights {
            Weights::SpinFactors { gamma, .. } => Ok(*gamma),
            Weights::Kronecker => {
                // a loop enclosing shade `s` lies in a region of the other shade
                let degs: Vec<usize> = match shade {
                    Shade::B => (0..self.graph.a).map(|i| self.graph.degree_a(i)).collect(),
                    Shade::A => (0..self.graph.b).map(|j| self.graph.degree_b(j)).collect(),
                };
                if degs.windows(2).any(|w| w[0] != w[1]) {
                    return Err(Error::Unsupported("Kronecker loop weight needs a uniform degree".into()));
                }
                Ok(degs.first().copied().unwrap_or(0) as f64)
            }
        }
    }
}

/// An element of degree `k` of a bipartite-graph planar algebra.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GraphLoopElement {
    pub k: usize,
    pub terms: BTreeMap<Loop, Complex64>,
}

impl GraphLoopElement {
    pub fn zero(k: usize) -> Self {
        GraphLoopElement { k, terms: BTreeMap::new() }
    }

    pub fn basis(l: Loop) -> Self {
        let k = l.edges.len() / 2;
        let mut terms = BTreeMap::new();
        terms.insert(l, Complex64::new(1.0, 0.0));
        GraphLoopElement { k, terms }
    }

    pub fn add_term(&mut self, l: Loop, c: Complex64) {
        let e = self.terms.entry(l).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(l.clone(), *c);
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        GraphLoopElement { k: self.k, terms: self.terms.iter().map(|(l, x)| (l.clone(), x * c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Largest coefficient modulus.
    pub fn norm_max(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.k == other.k && self.sub(other).norm_max() <= tol
    }

    /// `(x*)`: top and bottom rows exchanged, coefficients conjugated.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.k);
        let k = self.k;
        for (l, c) in &self.terms {
            if k == 0 {
                out.add_term(l.clone(), c.conj());
                continue;
            }
            // column c holds e_{c+1} on top and e_{2k-c} below
            let mut edges = vec![0; 2 * k];
            for col in 0..k {
                edges[col] = l.edges[2 * k - 1 - col];
                edges[2 * k - 1 - col] = l.edges[col];
            }
            out.add_term(Loop { base: l.base, edges }, c.conj());
        }
        out
    }
}

/// `T(x_1 ⊗ … ⊗ x_r)` in the planar algebra of `model`.
pub fn act(model: &PlanarModel, t: &Tangle, inputs: &[&GraphLoopElement]) -> Result<GraphLoopElement> {
    if inputs.len() != t.inputs.len() {
        return Err(Error::SizeMismatch(format!("{} inputs for a tangle with {} boxes", inputs.len(), t.inputs.len())));
    }
    for (j, x) in inputs.iter().enumerate() {
        if x.k != t.inputs[j] {
            return Err(Error::SizeMismatch(format!("input {j} has degree {} but the box has degree {}", x.k, t.inputs[j])));
        }
        if let Some(l) = x.terms.keys().find(|l| l.edges.len() != 2 * x.k || !model.graph.is_loop(l)) {
            return Err(Error::InvalidArgument(format!("{l:?} is not a loop of the graph")));
        }
    }
    let extrema: &[Extremum] = match (&model.weights, t.extrema()) {
        (Weights::SpinFactors { .. }, None) => {
            return Err(Error::Unsupported("spin factors are not tracked for this tangle".into()))
        }
        (Weights::SpinFactors { .. }, Some(e)) => e,
        (Weights::Kronecker, _) => &[],
    };
    let g = &model.graph;
    let strings = t.strings();
    let mut string_of: HashMap<Pt, usize> = HashMap::new();
    let mut string_faces = Vec::new();
    for (s, (p, q)) in strings.iter().enumerate() {
        string_of.insert(*p, s);
        string_of.insert(*q, s);
        let (f1, f2) = (t.face_at(*p, Side::Before), t.face_at(*p, Side::After));
        string_faces.push(if t.faces.shade[f1] == Shade::A { (f1, f2) } else { (f2, f1) });
    }
    let nf = t.face_count();
    let out_face = t.faces.of[0][interval_count(t.output) - 1];
    let circle = model.loop_weight(Shade::A)?.powi(t.circles_a as i32) * model.loop_weight(Shade::B)?.powi(t.circles_b as i32);
    let factors: Vec<(usize, usize)> =
        extrema.iter().map(|e| (t.face_at(e.at, e.concave), t.face_at(e.at, e.concave.flip()))).collect();
    let eta = match &model.weights {
        Weights::SpinFactors { eta, .. } => Some(eta),
        Weights::Kronecker => None,
    };

    let mut result = GraphLoopElement::zero(t.output);
    let supports: Vec<Vec<(&Loop, &Complex64)>> = inputs.iter().map(|x| x.terms.iter().collect()).collect();
    let mut choice = vec![0usize; inputs.len()];
    if supports.iter().any(|s| s.is_empty()) {
        return Ok(result);
    }
    loop {
        let mut coeff = Complex64::new(circle, 0.0);
        let mut label: Vec<Option<usize>> = vec![None; strings.len()];
        let mut vertex: Vec<Option<usize>> = vec![None; nf];
        let mut ok = true;
        'inputs: for (j, &c) in choice.iter().enumerate() {
            let (l, x) = supports[j][c];
            coeff *= x;
            if t.inputs[j] == 0 {
                let f = t.faces.of[j + 1][0];
                if vertex[f].is_some_and(|v| v != l.base) {
                    ok = false;
                    break;
                }
                vertex[f] = Some(l.base);
                continue;
            }
            for (i, &e) in l.edges.iter().enumerate() {
                let s = string_of[&Pt::input(j, i)];
                if label[s].is_some_and(|x| x != e) {
                    ok = false;
                    break 'inputs;
                }
                label[s] = Some(e);
            }
        }
        if ok {
            for (s, lab) in label.iter().enumerate() {
                if let Some(e) = lab {
                    let (fa, fb) = string_faces[s];
                    let (va, vb) = g.edges[*e];
                    if vertex[fa].is_some_and(|v| v != va) || vertex[fb].is_some_and(|v| v != vb) {
                        ok = false;
                        break;
                    }
                    vertex[fa] = Some(va);
                    vertex[fb] = Some(vb);
                }
            }
        }
        if ok {
            let free_faces: Vec<usize> = (0..nf).filter(|&f| vertex[f].is_none()).collect();
            let mut fchoice = vec![0usize; free_faces.len()];
            let range = |f: usize| if t.faces.shade[f] == Shade::A { g.a } else { g.b };
            'faces: loop {
                let mut vert = vertex.clone();
                for (n, &f) in free_faces.iter().enumerate() {
                    vert[f] = Some(fchoice[n]);
                }
                let vert: Vec<usize> = vert.into_iter().map(|v| v.unwrap_or(0)).collect();
                let free_strings: Vec<usize> = (0..strings.len()).filter(|&s| label[s].is_none()).collect();
                let options: Vec<Vec<usize>> = free_strings
                    .iter()
                    .map(|&s| g.between(vert[string_faces[s].0], vert[string_faces[s].1]))
                    .collect();
                if options.iter().all(|o| !o.is_empty()) {
                    let mut weight = coeff;
                    if let Some(eta) = eta {
                        let idx = |f: usize| if t.faces.shade[f] == Shade::A { vert[f] } else { g.a + vert[f] };
                        for &(cc, cv) in &factors {
                            weight *= (eta[idx(cc)] / eta[idx(cv)]).sqrt();
                        }
                    }
                    let mut schoice = vec![0usize; free_strings.len()];
                    loop {
                        let mut lab = label.clone();
                        for (n, &s) in free_strings.iter().enumerate() {
                            lab[s] = Some(options[n][schoice[n]]);
                        }
                        let edges: Vec<usize> =
                            (0..2 * t.output).map(|q| lab[string_of[&Pt::out(q)]].unwrap_or(0)).collect();
                        result.add_term(Loop { base: vert[out_face], edges }, weight);
                        if !advance(&mut schoice, &options.iter().map(|o| o.len()).collect::<Vec<_>>()) {
                            break;
                        }
                    }
                }
                let sizes: Vec<usize> = free_faces.iter().map(|&f| range(f)).collect();
                if !advance(&mut fchoice, &sizes) {
                    break 'faces;
                }
            }
        }
        if !advance(&mut choice, &supports.iter().map(|s| s.len()).collect::<Vec<_>>()) {
            break;
        }
    }
    result.terms.retain(|_, c| c.norm() > 0.0);
    Ok(result)
}

/// Odometer increment; `false` once every combination has been visited.
fn advance(c: &mut [usize], sizes: &[usize]) -> bool {
    for i in 0..c.len() {
        c[i] += 1;
        if c[i] < sizes[i] {
            return true;
        }
        c[i] = 0;
    }
    false
}

/// `M_k(x ⊗ y)` with `x` the lower box.
pub fn multiply(model: &PlanarModel, x: &GraphLoopElement, y: &GraphLoopElement) -> Result<GraphLoopElement> {
    act(model, &named_tangle(NamedTangle::Multiplication, x.k)?, &[x, y])
}

/// `E_{i-1}(1)` included into degree `n`, the unnormalized `i`-th Jones element (`1 ≤ i < n`).
pub fn jones_element(model: &PlanarModel, i: usize, n: usize) -> Result<GraphLoopElement> {
    if i == 0 || i >= n {
        return Err(Error::InvalidArgument(format!("Jones element {i} needs 1 ≤ i < {n}")));
    }
    let mut x = act(model, &named_tangle(NamedTangle::Jones, i - 1)?, &[])?;
    for m in i + 1..n {
        x = act(model, &named_tangle(NamedTangle::Inclusion, m)?, &[&x])?;
    }
    Ok(x)
}

/// Identity of degree `k`, the sum of the loops `e_c = e_{2k+1-c}`.
pub fn unit(model: &PlanarModel, k: usize) -> Result<GraphLoopElement> {
    let mut x = GraphLoopElement::zero(0);
    for v in 0..model.graph.a {
        x.add_term(Loop { base: v, edges: vec![] }, Complex64::new(1.0, 0.0));
    }
    for m in 0..k {
        x = act(model, &named_tangle(NamedTangle::Inclusion, m)?, &[&x])?;
    }
    Ok(x)
}

/// An element of `(ℂ^N)^{⊗k}` in the spin planar algebra; indices are 0-based.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SpinTensor {
    pub n: usize,
    pub k: usize,
    pub coeffs: BTreeMap<Vec<usize>, Complex64>,
}

impl SpinTensor {
    pub fn zero(n: usize, k: usize) -> Self {
        SpinTensor { n, k, coeffs: BTreeMap::new() }
    }

    /// `e_{i_1…i_k}`.
    pub fn basis(n: usize, indices: &[usize]) -> Result<Self> {
        if indices.iter().any(|&i| i >= n) {
            return Err(Error::InvalidArgument(format!("index out of range for N = {n}")));
        }
        let mut t = Self::zero(n, indices.len());
        t.coeffs.insert(indices.to_vec(), Complex64::new(1.0, 0.0));
        Ok(t)
    }

    /// Doubled-index loop form on the star graph.
    pub fn to_loops(&self) -> GraphLoopElement {
        let mut x = GraphLoopElement::zero(self.k);
        for (idx, c) in &self.coeffs {
            let edges = idx.iter().flat_map(|&i| [i, i]).collect();
            x.add_term(Loop { base: 0, edges }, *c);
        }
        x
    }

    pub fn from_loops(n: usize, x: &GraphLoopElement) -> Result<Self> {
        let mut t = Self::zero(n, x.k);
        for (l, c) in &x.terms {
            if l.edges.chunks(2).any(|p| p[0] != p[1]) {
                return Err(Error::InvalidArgument("loop is not a doubled spin index".into()));
            }
            let idx: Vec<usize> = l.edges.iter().step_by(2).copied().collect();
            *t.coeffs.entry(idx).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        t.coeffs.retain(|_, c| c.norm() > 0.0);
        Ok(t)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.n == other.n && self.k == other.k && self.to_loops().approx_eq(&other.to_loops(), tol)
    }

    /// Sparse JSON object `{"i1,i2,…": coefficient}` with 1-based indices.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (idx, c) in &self.coeffs {
            let key = idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
            m.insert(key, complex_json(*c));
        }
        Value::Object(m)
    }

    pub fn from_json(n: usize, k: usize, v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("tensor must be a JSON object".into()))?;
        let mut t = Self::zero(n, k);
        for (key, val) in obj {
            let idx: Vec<usize> = if key.trim().is_empty() {
                vec![]
            } else {
                key.split(',')
                    .map(|s| s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad index '{s}'"))))
                    .collect::<Result<_>>()?
            };
            if idx.len() != k || idx.iter().any(|&i| i == 0 || i > n) {
                return Err(Error::InvalidArgument(format!("index tuple '{key}' does not fit k = {k}, N = {n}")));
            }
            let c = parse_complex(val)?;
            *t.coeffs.entry(idx.iter().map(|i| i - 1).collect()).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Ok(t)
    }
}

pub fn complex_json(c: Complex64) -> Value {
    if c.im == 0.0 {
        Value::from(c.re)
    } else {
        Value::from(vec![c.re, c.im])
    }
}

pub fn parse_complex(v: &Value) -> Result<Complex64> {
    if let Some(x) = v.as_f64() {
        return Ok(Complex64::new(x, 0.0));
    }
    if let Some(a) = v.as_array() {
        if a.len() == 2 {
            if let (Some(re), Some(im)) = (a[0].as_f64(), a[1].as_f64()) {
                return Ok(Complex64::new(re, im));
            }
        }
    }
    Err(Error::Parse(format!("bad coefficient {v}")))
}

/// Spin action `T(x_1 ⊗ … ⊗ x_r)` on `(ℂ^N)^{⊗k}`.
pub fn act_spin(t: &Tangle, inputs: &[SpinTensor]) -> Result<SpinTensor> {
    let n = inputs.first().map_or(0, |x| x.n);
    if inputs.iter().any(|x| x.n != n) {
        return Err(Error::SizeMismatch("inputs use different alphabets".into()));
    }
    act_spin_n(t, n, inputs)
}

/// As [`act_spin`], with the alphabet given explicitly for tangles without inputs.
pub fn act_spin_n(t: &Tangle, n: usize, inputs: &[SpinTensor]) -> Result<SpinTensor> {
    if inputs.iter().any(|x| x.n != n) {
        return Err(Error::SizeMismatch(format!("inputs must all have N = {n}")));
    }
    let model = PlanarModel::spin(n);
    let loops: Vec<GraphLoopElement> = inputs.iter().map(|x| x.to_loops()).collect();
    let refs: Vec<&GraphLoopElement> = loops.iter().collect();
    SpinTensor::from_loops(n, &act(&model, t, &refs)?)
}

/// Tensor planar algebra action: elements of `M_N(ℂ)^{⊗k}` as loops of the `N`-edge graph.
pub fn act_tensor(t: &Tangle, n: usize, inputs: &[&GraphLoopElement]) -> Result<GraphLoopElement> {
    act(&PlanarModel::tensor(n), t, inputs)
}

/// Graph planar algebra action with spin factors.
pub fn act_graph(t: &Tangle, model: &PlanarModel, inputs: &[&GraphLoopElement]) -> Result<GraphLoopElement> {
    if !matches!(model.weights, Weights::SpinFactors { .. }) {
        return Err(Error::InvalidArgument("graph action needs spin-factor weights".into()));
    }
    act(model, t, inputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn catalog_is_planar() {
        for name in NamedTangle::ALL {
            for k in 0..4 {
                if name == NamedTangle::Rotation && k == 0 {
                    assert!(named_tangle(name, k).is_err());
                    continue;
                }
                named_tangle(name, k).unwrap_or_else(|e| panic!("{} {k}: {e}", name.name()));
            }
        }
        let crossing = Tangle::new(2, vec![2], &[(Pt::out(0), Pt::input(0, 1)), (Pt::out(1), Pt::input(0, 0)), (Pt::out(2), Pt::input(0, 2)), (Pt::out(3), Pt::input(0, 3))], (0, 0), None);
        assert!(crossing.is_err());
    }

    #[test]
    fn spin_rotation_and_multiplication() {
        let x = SpinTensor::basis(3, &[0, 1, 2]).unwrap();
        let r = named_tangle(NamedTangle::Rotation, 3).unwrap();
        let y = act_spin(&r, std::slice::from_ref(&x)).unwrap();
        assert!(y.approx_eq(&SpinTensor::basis(3, &[1, 2, 0]).unwrap(), 0.0));
        let t = named_tangle(NamedTangle::Trace, 2).unwrap();
        assert_eq!(act_spin(&t, &[SpinTensor::basis(2, &[1, 1]).unwrap()]).unwrap().coeffs[&vec![]], c(1.0));
    }

    #[test]
    fn tensor_multiplication_matches_matrix_units() {
        // k = 1: the basis loop (j, i) reads top j, bottom i
        let m = named_tangle(NamedTangle::Multiplication, 1).unwrap();
        let x = GraphLoopElement::basis(Loop { base: 0, edges: vec![0, 1] });
        let y = GraphLoopElement::basis(Loop { base: 0, edges: vec![2, 0] });
        let z = act_tensor(&m, 3, &[&x, &y]).unwrap();
        assert!(z.approx_eq(&GraphLoopElement::basis(Loop { base: 0, edges: vec![2, 1] }), 0.0));
        let y2 = GraphLoopElement::basis(Loop { base: 0, edges: vec![2, 1] });
        assert!(act_tensor(&m, 3, &[&x, &y2]).unwrap().terms.is_empty());
    }

    #[test]
    fn expectation_of_inclusion() {
        let x = SpinTensor::basis(3, &[2, 0]).unwrap();
        let inc = named_tangle(NamedTangle::Inclusion, 2).unwrap();
        let exp = named_tangle(NamedTangle::Expectation, 2).unwrap();
        let y = act_spin(&exp, &[act_spin(&inc, std::slice::from_ref(&x)).unwrap()]).unwrap();
        assert!(y.approx_eq(&SpinTensor { n: 3, k: 2, coeffs: [(vec![2, 0], c(3.0))].into() }, 1e-12));
        let glued = glue(&exp, 0, &inc).unwrap();
        assert_eq!((glued.circles_a, glued.circles_b), (0, 1));
        assert!(act_spin(&glued, &[x]).unwrap().approx_eq(&y, 1e-12));
    }

    #[test]
    fn graph_jones_relations_on_a3() {
        let model = PlanarModel::perron(BipartiteGraph::from_matrix(&[vec![1], vec![1]]).unwrap());
        let gamma = model.gamma().unwrap();
        assert!((gamma - 2f64.sqrt()).abs() < 1e-10);
        let n = 3;
        let e: Vec<GraphLoopElement> =
            (1..n).map(|i| jones_element(&model, i, n).unwrap().scale(c(1.0 / gamma))).collect();
        for x in &e {
            assert!(multiply(&model, x, x).unwrap().approx_eq(x, 1e-9));
        }
        let lhs = multiply(&model, &multiply(&model, &e[0], &e[1]).unwrap(), &e[0]).unwrap();
        assert!(lhs.approx_eq(&e[0].scale(c(1.0 / (gamma * gamma))), 1e-9));
    }
}
