//! Finite metric graphs, points on them, and paths up to homotopy rel
//! endpoints.
//!
//! A path is stored as a list of segments in absolute edge coordinates, so
//! inverting a path only swaps endpoints and never re-rounds an offset.
//! Reduced paths (no zero-length pieces, no backtracking) are the geodesics
//! of the universal-cover tree, and two paths are homotopic rel endpoints
//! exactly when their reduced forms are equal.

pub(crate) mod leaf_space;

pub use leaf_space::{build_leaf_space, LeafSpace};

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph edge {0} has non-positive length")]
    NonPositiveLength(usize),
    #[error("graph edge {0} references a missing vertex")]
    BadVertex(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no edges")]
    Empty,
    #[error("paths do not start at the given base point")]
    MismatchedBase,
    #[error("path does not start where the previous one ends")]
    Discontinuous,
}

/// A graph edge traversed forward (tail to head) or backward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DirEdge {
    pub edge: usize,
    pub forward: bool,
}

impl DirEdge {
    pub fn inv(self) -> Self {
        Self { edge: self.edge, forward: !self.forward }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub tail: usize,
    pub head: usize,
    pub length: f64,
}

/// A point of the graph: position `t` along `edge`, measured from its tail.
/// Points at vertices are stored on the lowest-numbered incident edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphPoint {
    pub edge: usize,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricGraph {
    vertex_count: usize,
    edges: Vec<GraphEdge>,
    /// Outgoing germs per vertex (loops contribute two).
    germs: Vec<Vec<DirEdge>>,
}

/// On-disk form: `{"vertices": n, "edges": [[a, b, length], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl MetricGraph {
    pub fn new(vertex_count: usize, edges: Vec<GraphEdge>) -> Result<Self, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut germs = vec![Vec::new(); vertex_count];
        for (i, e) in edges.iter().enumerate() {
            if !(e.length > 0.0) || !e.length.is_finite() {
                return Err(GraphError::NonPositiveLength(i));
            }
            if e.tail >= vertex_count || e.head >= vertex_count {
                return Err(GraphError::BadVertex(i));
            }
            germs[e.tail].push(DirEdge { edge: i, forward: true });
            germs[e.head].push(DirEdge { edge: i, forward: false });
        }
        let g = MetricGraph { vertex_count, edges, germs };
        let mut seen = vec![false; vertex_count];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for d in &g.germs[v] {
                let w = g.dir_head(*d);
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn from_file(f: &GraphFile) -> Result<Self, GraphError> {
        Self::new(
            f.vertices,
            f.edges.iter().map(|&(tail, head, length)| GraphEdge { tail, head, length }).collect(),
        )
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            vertices: self.vertex_count,
            edges: self.edges.iter().map(|e| (e.tail, e.head, e.length)).collect(),
        }
    }

    /// SHA-256 of the canonical JSON form.
    pub fn content_hash(&self) -> String {
        let json = serde_json::to_vec(&self.to_file()).expect("graph serializes");
        hex_digest(&json)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }
    pub fn len(&self, e: usize) -> f64 {
        self.edges[e].length
    }
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
    pub fn germs(&self, v: usize) -> &[DirEdge] {
        &self.germs[v]
    }
    pub fn valence(&self, v: usize) -> usize {
        self.germs[v].len()
    }
    pub fn total_length(&self) -> f64 {
        crate::exact::fsum(&self.edges.iter().map(|e| e.length).collect::<Vec<_>>())
    }
    pub fn min_edge_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min)
    }

    /// Valence-one vertices.
    pub fn boundary_points(&self) -> Vec<usize> {
        (0..self.vertex_count).filter(|&v| self.valence(v) == 1).collect()
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertex_count
    }

    pub fn dir_tail(&self, d: DirEdge) -> usize {
        let e = &self.edges[d.edge];
        if d.forward {
            e.tail
        } else {
            e.head
        }
    }
    pub fn dir_head(&self, d: DirEdge) -> usize {
        self.dir_tail(d.inv())
    }

    /// Canonical point at vertex `v`.
    pub fn vertex_point(&self, v: usize) -> GraphPoint {
        let d = self.germs[v].iter().min_by_key(|d| (d.edge, !d.forward)).expect("connected graph");
        let t = if self.edges[d.edge].tail == v { 0.0 } else { self.edges[d.edge].length };
        GraphPoint { edge: d.edge, t }
    }

    /// Canonical point at position `t` on `edge` (clamped to the edge).
    pub fn point(&self, edge: usize, t: f64) -> GraphPoint {
        let len = self.edges[edge].length;
        if t <= 0.0 {
            self.vertex_point(self.edges[edge].tail)
        } else if t >= len {
            self.vertex_point(self.edges[edge].head)
        } else {
            GraphPoint { edge, t }
        }
    }

    pub fn vertex_at(&self, p: GraphPoint) -> Option<usize> {
        let e = &self.edges[p.edge];
        if p.t <= 0.0 {
            Some(e.tail)
        } else if p.t >= e.length {
            Some(e.head)
        } else {
            None
        }
    }

    /// Coordinate of `p` on `edge` when leaving along germ direction
    /// `forward`; `None` if `p` is not on that edge.
    pub fn coordinate_on(&self, p: GraphPoint, edge: usize, forward: bool) -> Option<f64> {
        match self.vertex_at(p) {
            None => (p.edge == edge).then_some(p.t),
            Some(v) => {
                let e = &self.edges[edge];
                if forward && e.tail == v {
                    Some(0.0)
                } else if !forward && e.head == v {
                    Some(e.length)
                } else {
                    None
                }
            }
        }
    }

    /// Germs of outgoing directions at `p`.
    pub fn directions_at(&self, p: GraphPoint) -> Vec<DirEdge> {
        match self.vertex_at(p) {
            Some(v) => self.germs[v].clone(),
            None => vec![DirEdge { edge: p.edge, forward: true }, DirEdge { edge: p.edge, forward: false }],
        }
    }

    /// Unique geodesic between two points of a tree.
    pub fn tree_geodesic(&self, p: GraphPoint, q: GraphPoint) -> GraphPath {
        let (pv, p_leg) = self.to_some_vertex(p);
        let (qv, q_leg) = self.to_some_vertex(q);
        let mut parent: Vec<Option<DirEdge>> = vec![None; self.vertex_count];
        let mut seen = vec![false; self.vertex_count];
        seen[pv] = true;
        let mut queue = VecDeque::from([pv]);
        while let Some(v) = queue.pop_front() {
            for d in &self.germs[v] {
                let w = self.dir_head(*d);
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(*d);
                    queue.push_back(w);
                }
            }
        }
        let mut walk = Vec::new();
        let mut v = qv;
        while let Some(d) = parent[v] {
            walk.push(d);
            v = self.dir_tail(d);
        }
        walk.reverse();
        let mut segs = p_leg;
        for d in walk {
            segs.push(self.full_seg(d));
        }
        segs.extend(q_leg.iter().rev().map(|s| s.inv()));
        GraphPath::from_segs(self, p, segs)
    }

    fn to_some_vertex(&self, p: GraphPoint) -> (usize, Vec<Seg>) {
        match self.vertex_at(p) {
            Some(v) => (v, Vec::new()),
            None => (self.edges[p.edge].tail, vec![Seg { edge: p.edge, from: p.t, to: 0.0 }]),
        }
    }

    pub fn full_seg(&self, d: DirEdge) -> Seg {
        let len = self.edges[d.edge].length;
        if d.forward {
            Seg { edge: d.edge, from: 0.0, to: len }
        } else {
            Seg { edge: d.edge, from: len, to: 0.0 }
        }
    }

    pub fn points_equal(&self, a: GraphPoint, b: GraphPoint) -> bool {
        a.edge == b.edge && a.t == b.t
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Traversal of one edge from coordinate `from` to coordinate `to`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Seg {
    pub edge: usize,
    pub from: f64,
    pub to: f64,
}

impl Seg {
    pub fn inv(self) -> Self {
        Seg { edge: self.edge, from: self.to, to: self.from }
    }
    pub fn forward(&self) -> bool {
        self.to > self.from
    }
    pub fn dir(&self) -> DirEdge {
        DirEdge { edge: self.edge, forward: self.forward() }
    }
    pub fn length(&self) -> f64 {
        (self.to - self.from).abs()
    }
    fn is_full(&self, g: &MetricGraph) -> bool {
        let len = g.len(self.edge);
        (self.from == 0.0 && self.to == len) || (self.from == len && self.to == 0.0)
    }
}

/// Merges two consecutive segments on the same edge when they meet at the
/// same coordinate. `None`: not mergeable. `Some(None)`: they cancel.
fn merge(a: Seg, b: Seg) -> Option<Option<Seg>> {
    if a.edge != b.edge || a.to != b.from {
        return None;
    }
    if a.from == b.to {
        Some(None)
    } else {
        Some(Some(Seg { edge: a.edge, from: a.from, to: b.to }))
    }
}

/// A path in the graph, reduced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphPath {
    start: GraphPoint,
    segs: Vec<Seg>,
}

impl GraphPath {
    pub fn constant(p: GraphPoint) -> Self {
        Self { start: p, segs: Vec::new() }
    }

    /// Builds and reduces a path from consecutive segments starting at `start`.
    pub fn from_segs(g: &MetricGraph, start: GraphPoint, segs: Vec<Seg>) -> Self {
        let mut stack: Vec<Seg> = Vec::with_capacity(segs.len());
        for s in segs {
            if s.from == s.to {
                continue;
            }
            let mut cur = Some(s);
            while let (Some(c), Some(top)) = (cur, stack.last().copied()) {
                match merge(top, c) {
                    None => break,
                    Some(m) => {
                        stack.pop();
                        cur = m;
                    }
                }
            }
            if let Some(c) = cur {
                stack.push(c);
            }
        }
        let _ = g;
        Self { start, segs: stack }
    }

    pub fn start(&self) -> GraphPoint {
        self.start
    }

    pub fn end(&self, g: &MetricGraph) -> GraphPoint {
        match self.segs.last() {
            Some(s) => g.point(s.edge, s.to),
            None => self.start,
        }
    }

    pub fn segs(&self) -> &[Seg] {
        &self.segs
    }

    pub fn is_constant(&self) -> bool {
        self.segs.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.segs.iter().map(Seg::length).sum()
    }

    /// Exact length as non-overlapping float partials.
    pub fn length_parts(&self) -> Vec<f64> {
        let mut acc = crate::exact::ExactSum::new();
        for s in &self.segs {
            let (hi, lo) = if s.to > s.from { (s.to, s.from) } else { (s.from, s.to) };
            acc.add(hi);
            acc.add(-lo);
        }
        acc.partials().to_vec()
    }

    /// Directed edges traversed in full.
    pub fn word(&self, g: &MetricGraph) -> Vec<DirEdge> {
        self.segs.iter().filter(|s| s.is_full(g)).map(|s| s.dir()).collect()
    }

    pub fn inverse(&self, g: &MetricGraph) -> Self {
        let end = self.end(g);
        Self { start: end, segs: self.segs.iter().rev().map(|s| s.inv()).collect() }
    }

    /// `self` followed by `other`; `other` must start where `self` ends.
    pub fn concat(&self, g: &MetricGraph, other: &GraphPath) -> Result<Self, GraphError> {
        if !g.points_equal(self.end(g), other.start) {
            return Err(GraphError::Discontinuous);
        }
        let mut segs = self.segs.clone();
        segs.extend_from_slice(&other.segs);
        Ok(Self::from_segs(g, self.start, segs))
    }

    /// Re-reduces; paths built through the public constructors are already
    /// reduced, so this is the identity on them.
    pub fn reduce(&self, g: &MetricGraph) -> Self {
        Self::from_segs(g, self.start, self.segs.clone())
    }

    /// Initial piece of length `s` (clamped to the whole path).
    pub fn prefix(&self, g: &MetricGraph, s: f64) -> Self {
        let mut out = Vec::new();
        let mut rem = s;
        for seg in &self.segs {
            if rem <= 0.0 {
                break;
            }
            let l = seg.length();
            if rem >= l {
                out.push(*seg);
                rem -= l;
            } else {
                let to = if seg.forward() { seg.from + rem } else { seg.from - rem };
                let len = g.len(seg.edge);
                let to = to.clamp(0.0, len);
                out.push(Seg { edge: seg.edge, from: seg.from, to });
                rem = 0.0;
            }
        }
        Self::from_segs(g, self.start, out)
    }

    /// Length of the common initial piece of two reduced paths from the same
    /// start (the Gromov product at the start point).
    pub fn common_prefix_length(&self, other: &GraphPath) -> f64 {
        let mut acc = 0.0;
        for (a, b) in self.segs.iter().zip(&other.segs) {
            if a == b {
                acc += a.length();
                continue;
            }
            if a.edge == b.edge && a.from == b.from && a.forward() == b.forward() {
                acc += a.length().min(b.length());
            }
            break;
        }
        acc
    }

    /// Image of a closed path under cyclic reduction: the canonical
    /// (lexicographically least rotation) cyclic word of its free homotopy
    /// class. Empty for null-homotopic loops.
    pub fn cyclic_word(&self, g: &MetricGraph) -> Vec<DirEdge> {
        if self.segs.is_empty() {
            return Vec::new();
        }
        // rotate the base point to the first vertex on the loop
        let mut segs = self.segs.clone();
        if g.vertex_at(self.start).is_none() {
            let first = segs.remove(0);
            segs.push(first);
        }
        let start = g.point(segs[0].edge, segs[0].from);
        let p = Self::from_segs(g, start, segs);
        let mut word: Vec<DirEdge> = p.segs.iter().map(|s| s.dir()).collect();
        while word.len() >= 2 && word[0] == word[word.len() - 1].inv() {
            word.remove(0);
            word.pop();
        }
        canonical_rotation(word)
    }
}

fn canonical_rotation(word: Vec<DirEdge>) -> Vec<DirEdge> {
    if word.is_empty() {
        return word;
    }
    let n = word.len();
    (0..n)
        .map(|r| word[r..].iter().chain(&word[..r]).copied().collect::<Vec<_>>())
        .min()
        .unwrap()
}

/// Reduces a closed edge word cyclically and returns the length of the
/// result: the shortest length of any loop in its free homotopy class.
pub fn free_homotopy_length(g: &MetricGraph, word: &[DirEdge]) -> f64 {
    let mut stack: Vec<DirEdge> = Vec::new();
    for &d in word {
        if stack.last() == Some(&d.inv()) {
            stack.pop();
        } else {
            stack.push(d);
        }
    }
    let (mut i, mut j) = (0, stack.len());
    while j - i >= 2 && stack[i] == stack[j - 1].inv() {
        i += 1;
        j -= 1;
    }
    stack[i..j].iter().map(|d| g.len(d.edge)).sum()
}

/// Distance in the universal cover between the endpoints of two paths
/// leaving the same base point.
pub fn tree_distance(
    g: &MetricGraph,
    base: GraphPoint,
    p1: &GraphPath,
    p2: &GraphPath,
) -> Result<f64, GraphError> {
    if !g.points_equal(p1.start(), base) || !g.points_equal(p2.start(), base) {
        return Err(GraphError::MismatchedBase);
    }
    Ok(p1.inverse(g).concat(g, p2)?.length())
}

/// Path along a word of full edges starting at the tail of the first one.
pub fn path_of_word(g: &MetricGraph, word: &[DirEdge]) -> GraphPath {
    let start = g.vertex_point(g.dir_tail(word[0]));
    GraphPath::from_segs(g, start, word.iter().map(|d| g.full_seg(*d)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn circle(len: f64) -> MetricGraph {
        MetricGraph::new(1, vec![GraphEdge { tail: 0, head: 0, length: len }]).unwrap()
    }

    pub(crate) fn figure_eight() -> MetricGraph {
        MetricGraph::new(
            1,
            vec![GraphEdge { tail: 0, head: 0, length: 1.0 }, GraphEdge { tail: 0, head: 0, length: 1.0 }],
        )
        .unwrap()
    }

    fn fwd(e: usize) -> DirEdge {
        DirEdge { edge: e, forward: true }
    }

    #[test]
    fn backtrack_cancels() {
        let g = circle(1.0);
        let p = path_of_word(&g, &[fwd(0), fwd(0).inv()]);
        assert!(p.is_constant());
        assert_eq!(p.length(), 0.0);
    }

    #[test]
    fn double_wrap_survives() {
        let g = circle(1.0);
        let p = path_of_word(&g, &[fwd(0), fwd(0)]);
        assert_eq!(p.word(&g), vec![fwd(0), fwd(0)]);
        assert_eq!(p.length(), 2.0);
    }

    #[test]
    fn figure_eight_reduction() {
        let g = figure_eight();
        let p = path_of_word(&g, &[fwd(0), fwd(0).inv(), fwd(1)]);
        assert_eq!(p.word(&g), vec![fwd(1)]);
    }

    #[test]
    fn free_homotopy_lengths() {
        let g = figure_eight();
        let (a, b) = (fwd(0), fwd(1));
        assert_eq!(free_homotopy_length(&g, &[a, b, a.inv(), b.inv()]), 4.0);
        assert_eq!(free_homotopy_length(&g, &[a, b, b.inv(), a.inv()]), 0.0);
        assert_eq!(free_homotopy_length(&g, &[b, a, b.inv()]), 1.0);
        let c = circle(0.7);
        assert_eq!(free_homotopy_length(&c, &[fwd(0)]), 0.7);
    }

    #[test]
    fn tree_distance_examples() {
        let g = circle(1.0);
        let base = g.point(0, 0.3);
        let direct = GraphPath::constant(base);
        let around = GraphPath::from_segs(
            &g,
            base,
            vec![Seg { edge: 0, from: 0.3, to: 1.0 }, Seg { edge: 0, from: 0.0, to: 0.3 }],
        );
        assert!(g.points_equal(around.end(&g), base));
        assert_eq!(tree_distance(&g, base, &direct, &direct).unwrap(), 0.0);
        assert!((tree_distance(&g, base, &direct, &around).unwrap() - 1.0).abs() < 1e-15);

        let f = figure_eight();
        let o = f.vertex_point(0);
        let pa = path_of_word(&f, &[fwd(0)]);
        let pb = path_of_word(&f, &[fwd(1)]);
        assert_eq!(tree_distance(&f, o, &pa, &pb).unwrap(), 2.0);
        let off = GraphPath::constant(f.point(0, 0.5));
        assert_eq!(tree_distance(&f, o, &pa, &off), Err(GraphError::MismatchedBase));
    }

    #[test]
    fn vertex_points_are_canonical() {
        let g = MetricGraph::new(
            2,
            vec![GraphEdge { tail: 1, head: 0, length: 2.0 }, GraphEdge { tail: 0, head: 1, length: 1.0 }],
        )
        .unwrap();
        assert_eq!(g.point(1, 0.0), GraphPoint { edge: 0, t: 2.0 });
        assert_eq!(g.point(1, 1.0), GraphPoint { edge: 0, t: 0.0 });
        assert_eq!(g.point(0, -1.0), g.vertex_point(1));
        assert!(g.boundary_points().is_empty());
    }

    #[test]
    fn cyclic_word_is_rotation_invariant() {
        let g = figure_eight();
        let (a, b) = (fwd(0), fwd(1));
        let p = path_of_word(&g, &[a, b, a.inv(), b.inv()]);
        let q = path_of_word(&g, &[b, a.inv(), b.inv(), a]);
        assert_eq!(p.cyclic_word(&g), q.cyclic_word(&g));
        let r = path_of_word(&g, &[b, a, a.inv(), b.inv()]);
        assert!(r.cyclic_word(&g).is_empty());
    }

    #[test]
    fn interval_tree_geodesic() {
        let g = MetricGraph::new(
            4,
            vec![
                GraphEdge { tail: 0, head: 1, length: 1.0 },
                GraphEdge { tail: 0, head: 2, length: 1.0 },
                GraphEdge { tail: 3, head: 0, length: 1.0 },
            ],
        )
        .unwrap();
        let p = g.tree_geodesic(g.point(0, 0.75), g.point(1, 0.5));
        assert!((p.length() - 1.25).abs() < 1e-15);
        assert_eq!(g.boundary_points(), vec![1, 2, 3]);
        assert!(g.is_tree());
    }

    fn random_word() -> impl Strategy<Value = Vec<DirEdge>> {
        prop::collection::vec((0usize..2, any::<bool>()), 1..12)
            .prop_map(|v| v.into_iter().map(|(edge, forward)| DirEdge { edge, forward }).collect())
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent_and_shortening(word in random_word()) {
            let g = figure_eight();
            let raw_len: f64 = word.iter().map(|d| g.len(d.edge)).sum();
            let p = path_of_word(&g, &word);
            prop_assert!(p.length() <= raw_len);
            prop_assert_eq!(p.reduce(&g), p.clone());
            prop_assert!(free_homotopy_length(&g, &word) <= p.length());
        }

        #[test]
        fn tree_distance_is_a_tree_metric(ws in prop::collection::vec(random_word(), 4)) {
            let g = figure_eight();
            let o = g.vertex_point(0);
            let ps: Vec<GraphPath> = ws.iter().map(|w| path_of_word(&g, w)).collect();
            let d = |i: usize, j: usize| tree_distance(&g, o, &ps[i], &ps[j]).unwrap();
            for i in 0..4 { for j in 0..4 { for k in 0..4 {
                prop_assert!(d(i, k) <= d(i, j) + d(j, k) + 1e-12);
            }}}
            let s = [d(0, 1) + d(2, 3), d(0, 2) + d(1, 3), d(0, 3) + d(1, 2)];
            let mut t = s;
            t.sort_by(f64::total_cmp);
            // four-point condition: the two largest sums agree
            prop_assert!((t[2] - t[1]).abs() < 1e-12);
        }
    }
}
