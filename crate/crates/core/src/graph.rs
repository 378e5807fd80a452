//! Finite graphs with oriented half-edges, reduced edge paths, candidate
//! loops, isomorphism enumeration, forest collapses and vertex blow-ups.
//!
//! Edge `e` runs from `origin(e)` to `terminus(e)`. Its two half-edges are
//! encoded as `2e` (forward) and `2e + 1` (reversed), so reversing a half-edge
//! is an xor with one.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::free_group::least_rotation;
use crate::rational::Rational;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct HalfEdge(u32);

impl HalfEdge {
    pub fn new(edge: usize, reversed: bool) -> HalfEdge {
        HalfEdge(2 * edge as u32 + reversed as u32)
    }

    pub fn forward(edge: usize) -> HalfEdge {
        HalfEdge::new(edge, false)
    }

    pub fn backward(edge: usize) -> HalfEdge {
        HalfEdge::new(edge, true)
    }

    pub fn edge(self) -> usize {
        (self.0 / 2) as usize
    }

    pub fn is_reversed(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn reverse(self) -> HalfEdge {
        HalfEdge(self.0 ^ 1)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// `e3` for the forward half-edge of edge 3, `E3` for its reverse.
impl fmt::Display for HalfEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_reversed() {
            write!(f, "E{}", self.edge())
        } else {
            write!(f, "e{}", self.edge())
        }
    }
}

/// A connected graph. Graphs flagged `subdivided` may carry valence-two
/// vertices; every other graph used as a simplex must have all valences
/// at least three (see [`Graph::check_admissible`]).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Graph {
    vertices: usize,
    ends: Vec<(usize, usize)>,
    subdivided: bool,
}

impl Graph {
    pub fn new(vertices: usize, ends: Vec<(usize, usize)>) -> Result<Graph> {
        let g = Graph {
            vertices,
            ends,
            subdivided: false,
        };
        g.check_structure()?;
        Ok(g)
    }

    pub fn new_subdivided(vertices: usize, ends: Vec<(usize, usize)>) -> Result<Graph> {
        let mut g = Graph::new(vertices, ends)?;
        g.subdivided = true;
        Ok(g)
    }

    /// Rose with `n` petals at a single vertex.
    pub fn rose(n: usize) -> Graph {
        Graph {
            vertices: 1,
            ends: vec![(0, 0); n],
            subdivided: false,
        }
    }

    /// Two vertices joined by `p` edges, all oriented from vertex 0 to 1.
    pub fn multi_theta(p: usize) -> Graph {
        Graph {
            vertices: 2,
            ends: vec![(0, 1); p],
            subdivided: false,
        }
    }

    fn check_structure(&self) -> Result<()> {
        if self.vertices == 0 {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        for (e, &(a, b)) in self.ends.iter().enumerate() {
            if a >= self.vertices || b >= self.vertices {
                return Err(Error::InvalidGraph(format!("edge {e} has an endpoint out of range")));
            }
        }
        if !self.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(())
    }

    /// No valence one or two vertices, unless flagged subdivided.
    pub fn check_admissible(&self) -> Result<()> {
        if self.subdivided {
            return Ok(());
        }
        for v in 0..self.vertices {
            if self.valence(v) < 3 {
                return Err(Error::InvalidGraph(format!(
                    "vertex {v} has valence {}",
                    self.valence(v)
                )));
            }
        }
        Ok(())
    }

    pub fn is_subdivided(&self) -> bool {
        self.subdivided
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices
    }

    pub fn num_edges(&self) -> usize {
        self.ends.len()
    }

    pub fn ends(&self) -> &[(usize, usize)] {
        &self.ends
    }

    pub fn origin(&self, h: HalfEdge) -> usize {
        let (a, b) = self.ends[h.edge()];
        if h.is_reversed() {
            b
        } else {
            a
        }
    }

    pub fn terminus(&self, h: HalfEdge) -> usize {
        self.origin(h.reverse())
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.ends[e].0 == self.ends[e].1
    }

    pub fn half_edges(&self) -> impl Iterator<Item = HalfEdge> {
        (0..2 * self.ends.len() as u32).map(HalfEdge)
    }

    /// Half-edges starting at `v`, in id order.
    pub fn outgoing(&self, v: usize) -> Vec<HalfEdge> {
        self.half_edges().filter(|&h| self.origin(h) == v).collect()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.half_edges().filter(|&h| self.origin(h) == v).count()
    }

    /// `|E| - |V| + 1`.
    pub fn rank(&self) -> usize {
        self.ends.len() + 1 - self.vertices
    }

    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.vertices);
        for &(a, b) in &self.ends {
            uf.union(a, b);
        }
        (0..self.vertices).all(|v| uf.find(v) == uf.find(0))
    }

    /// Breadth-first spanning tree from vertex 0, scanning edges in id order.
    pub fn spanning_tree(&self) -> Forest {
        let mut seen = vec![false; self.vertices];
        let mut edges = Vec::new();
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for h in self.outgoing(v) {
                let t = self.terminus(h);
                if !seen[t] {
                    seen[t] = true;
                    edges.push(h.edge());
                    queue.push_back(t);
                }
            }
        }
        Forest::from_sorted(edges)
    }

    /// A spanning tree containing `forest`: the forest first, then edges in
    /// id order.
    pub fn spanning_tree_containing(&self, forest: &Forest) -> Forest {
        let mut uf = UnionFind::new(self.vertices);
        let mut edges = Vec::new();
        for &e in forest.edges() {
            let (a, b) = self.ends[e];
            uf.union(a, b);
            edges.push(e);
        }
        for (e, &(a, b)) in self.ends.iter().enumerate() {
            if uf.union(a, b) {
                edges.push(e);
            }
        }
        Forest::from_sorted(edges)
    }

    /// For each vertex, the reduced path in `tree` from `root` to it.
    pub fn tree_paths(&self, tree: &Forest, root: usize) -> Vec<Vec<HalfEdge>> {
        let in_tree = tree.mask(self.num_edges());
        let mut paths: Vec<Option<Vec<HalfEdge>>> = vec![None; self.vertices];
        paths[root] = Some(Vec::new());
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for h in self.outgoing(v) {
                let t = self.terminus(h);
                if in_tree[h.edge()] && paths[t].is_none() {
                    let mut p = paths[v].clone().unwrap();
                    p.push(h);
                    paths[t] = Some(p);
                    queue.push_back(t);
                }
            }
        }
        paths.into_iter().map(|p| p.expect("tree does not span")).collect()
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vertices {}", self.vertices)?;
        for (e, (a, b)) in self.ends.iter().enumerate() {
            write!(f, "; edge {e} {a} {b}")?;
        }
        Ok(())
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// A set of edges containing no cycle.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Forest(Vec<usize>);

impl Forest {
    pub fn new(g: &Graph, edges: &[usize]) -> Result<Forest> {
        let mut sorted: Vec<usize> = edges.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut uf = UnionFind::new(g.num_vertices());
        for &e in &sorted {
            if e >= g.num_edges() {
                return Err(Error::InvalidGraph(format!("edge {e} out of range")));
            }
            let (a, b) = g.ends[e];
            if !uf.union(a, b) {
                return Err(Error::ForestHasCycle);
            }
        }
        Ok(Forest(sorted))
    }

    fn from_sorted(mut edges: Vec<usize>) -> Forest {
        edges.sort_unstable();
        Forest(edges)
    }

    pub fn empty() -> Forest {
        Forest(Vec::new())
    }

    pub fn edges(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, e: usize) -> bool {
        self.0.binary_search(&e).is_ok()
    }

    pub fn mask(&self, num_edges: usize) -> Vec<bool> {
        let mut m = vec![false; num_edges];
        for &e in &self.0 {
            m[e] = true;
        }
        m
    }
}

/// Free reduction of a half-edge sequence.
pub fn reduce_half_edges(edges: &[HalfEdge]) -> Vec<HalfEdge> {
    let mut out = Vec::with_capacity(edges.len());
    for &h in edges {
        push_half_edge(&mut out, h);
    }
    out
}

#[inline]
pub(crate) fn push_half_edge(buf: &mut Vec<HalfEdge>, h: HalfEdge) {
    if buf.last() == Some(&h.reverse()) {
        buf.pop();
    } else {
        buf.push(h);
    }
}

/// Cyclic reduction of a freely reduced closed sequence.
pub fn cyclically_reduce_half_edges(mut edges: Vec<HalfEdge>) -> Vec<HalfEdge> {
    let n = edges.len();
    let mut k = 0;
    while 2 * k + 1 < n && edges[k] == edges[n - 1 - k].reverse() {
        k += 1;
    }
    edges.truncate(n - k);
    edges.drain(..k);
    edges
}

/// A path of half-edges starting at `start`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EdgePath {
    start: usize,
    edges: Vec<HalfEdge>,
}

impl EdgePath {
    pub fn new(g: &Graph, start: usize, edges: Vec<HalfEdge>) -> Result<EdgePath> {
        if start >= g.num_vertices() {
            return Err(Error::InvalidPath(format!("start vertex {start} out of range")));
        }
        let mut at = start;
        for (i, &h) in edges.iter().enumerate() {
            if h.edge() >= g.num_edges() {
                return Err(Error::InvalidPath(format!("edge {} out of range", h.edge())));
            }
            if g.origin(h) != at {
                return Err(Error::InvalidPath(format!(
                    "step {i} ({h}) does not start at vertex {at}"
                )));
            }
            at = g.terminus(h);
        }
        Ok(EdgePath { start, edges })
    }

    /// Builds a path whose validity the caller guarantees.
    pub(crate) fn from_parts(start: usize, edges: Vec<HalfEdge>) -> EdgePath {
        EdgePath { start, edges }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn edges(&self) -> &[HalfEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn end(&self, g: &Graph) -> usize {
        self.edges.last().map_or(self.start, |&h| g.terminus(h))
    }

    pub fn is_closed(&self, g: &Graph) -> bool {
        self.end(g) == self.start
    }

    pub fn is_reduced(&self, g: &Graph) -> bool {
        let free = self.edges.windows(2).all(|w| w[1] != w[0].reverse());
        if !free || !self.is_closed(g) || self.edges.len() < 2 {
            return free;
        }
        self.edges[0] != self.edges[self.edges.len() - 1].reverse()
    }

    /// Reduced representative: rel endpoints for open paths, cyclically
    /// reduced for closed ones.
    pub fn tighten(&self, g: &Graph) -> EdgePath {
        let reduced = reduce_half_edges(&self.edges);
        if !self.is_closed(g) {
            return EdgePath {
                start: self.start,
                edges: reduced,
            };
        }
        let cyc = cyclically_reduce_half_edges(reduced);
        let start = cyc.first().map_or(self.start, |&h| g.origin(h));
        EdgePath { start, edges: cyc }
    }

    pub fn reversed(&self, g: &Graph) -> EdgePath {
        EdgePath {
            start: self.end(g),
            edges: self.edges.iter().rev().map(|h| h.reverse()).collect(),
        }
    }

    /// Number of crossings of each edge, in either direction.
    pub fn crossing_counts(&self, num_edges: usize) -> Vec<u64> {
        crossing_counts(&self.edges, num_edges)
    }
}

pub fn crossing_counts(edges: &[HalfEdge], num_edges: usize) -> Vec<u64> {
    let mut counts = vec![0u64; num_edges];
    for h in edges {
        counts[h.edge()] += 1;
    }
    counts
}

impl fmt::Display for EdgePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.edges.is_empty() {
            return write!(f, "1");
        }
        for (i, h) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

/// Least rotation of the loop or of its inverse.
pub fn canonical_loop(seq: &[HalfEdge]) -> Vec<HalfEdge> {
    let rotate = |s: &[HalfEdge]| {
        let r = least_rotation(s);
        s[r..].iter().chain(&s[..r]).copied().collect::<Vec<_>>()
    };
    let inv: Vec<HalfEdge> = seq.iter().rev().map(|h| h.reverse()).collect();
    let a = rotate(seq);
    let b = rotate(&inv);
    a.min(b)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum CandidateKind {
    Circle,
    FigureEight,
    Barbell,
}

/// A closed reduced loop that is an embedded circle, a figure eight or a
/// barbell. The path is stored in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CandidateLoop {
    pub path: EdgePath,
    pub kind: CandidateKind,
}

struct Circle {
    seq: Vec<HalfEdge>,
    vertices: BTreeSet<usize>,
    edges: BTreeSet<usize>,
}

impl Circle {
    fn rotated_to(&self, g: &Graph, v: usize) -> Vec<HalfEdge> {
        let k = self
            .seq
            .iter()
            .position(|&h| g.origin(h) == v)
            .expect("vertex on circle");
        self.seq[k..].iter().chain(&self.seq[..k]).copied().collect()
    }
}

fn reversed_seq(seq: &[HalfEdge]) -> Vec<HalfEdge> {
    seq.iter().rev().map(|h| h.reverse()).collect()
}

/// Embedded circles, each once, in canonical form.
pub fn embedded_circles(g: &Graph) -> Vec<Vec<HalfEdge>> {
    fn dfs(
        g: &Graph,
        s: usize,
        v: usize,
        path: &mut Vec<HalfEdge>,
        visited: &mut [bool],
        seen: &mut BTreeSet<Vec<HalfEdge>>,
    ) {
        for h in g.outgoing(v) {
            if path.last().is_some_and(|&l| l == h.reverse()) {
                continue;
            }
            let t = g.terminus(h);
            if t == s {
                path.push(h);
                seen.insert(canonical_loop(path));
                path.pop();
                continue;
            }
            if t < s || visited[t] {
                continue;
            }
            visited[t] = true;
            path.push(h);
            dfs(g, s, t, path, visited, seen);
            path.pop();
            visited[t] = false;
        }
    }
    let mut seen = BTreeSet::new();
    let mut visited = vec![false; g.num_vertices()];
    for s in 0..g.num_vertices() {
        visited[s] = true;
        dfs(g, s, s, &mut Vec::new(), &mut visited, &mut seen);
        visited[s] = false;
    }
    seen.into_iter().collect()
}

/// All candidate loops of `g`, one per loop up to rotation and inversion,
/// sorted by canonical half-edge sequence.
pub fn enumerate_candidates(g: &Graph) -> Vec<CandidateLoop> {
    let circles: Vec<Circle> = embedded_circles(g)
        .into_iter()
        .map(|seq| Circle {
            vertices: seq.iter().map(|&h| g.origin(h)).collect(),
            edges: seq.iter().map(|h| h.edge()).collect(),
            seq,
        })
        .collect();
    let mut found: BTreeSet<(Vec<HalfEdge>, CandidateKind)> = BTreeSet::new();
    for c in &circles {
        found.insert((c.seq.clone(), CandidateKind::Circle));
    }
    for (i, c1) in circles.iter().enumerate() {
        for c2 in &circles[i + 1..] {
            let shared: Vec<usize> = c1.vertices.intersection(&c2.vertices).copied().collect();
            if shared.len() == 1 && c1.edges.is_disjoint(&c2.edges) {
                let v = shared[0];
                let a = c1.rotated_to(g, v);
                let b = c2.rotated_to(g, v);
                for second in [b.clone(), reversed_seq(&b)] {
                    let lp: Vec<HalfEdge> = a.iter().chain(&second).copied().collect();
                    found.insert((canonical_loop(&lp), CandidateKind::FigureEight));
                }
            } else if shared.is_empty() {
                for (p, a_v, b_v) in connecting_paths(g, c1, c2) {
                    let a = c1.rotated_to(g, a_v);
                    let b = c2.rotated_to(g, b_v);
                    let back = reversed_seq(&p);
                    for second in [b.clone(), reversed_seq(&b)] {
                        let lp: Vec<HalfEdge> = a.iter().chain(&p).chain(&second).chain(&back).copied().collect();
                        found.insert((canonical_loop(&lp), CandidateKind::Barbell));
                    }
                }
            }
        }
    }
    found
        .into_iter()
        .map(|(seq, kind)| {
            let start = g.origin(seq[0]);
            CandidateLoop {
                path: EdgePath::from_parts(start, seq),
                kind,
            }
        })
        .collect()
}

/// Embedded paths from a vertex of `c1` to a vertex of `c2` meeting the two
/// circles only at their endpoints.
fn connecting_paths(g: &Graph, c1: &Circle, c2: &Circle) -> Vec<(Vec<HalfEdge>, usize, usize)> {
    fn dfs(
        g: &Graph,
        v: usize,
        c1: &Circle,
        c2: &Circle,
        path: &mut Vec<HalfEdge>,
        visited: &mut [bool],
        out: &mut Vec<(Vec<HalfEdge>, usize)>,
    ) {
        for h in g.outgoing(v) {
            let t = g.terminus(h);
            if visited[t] || c1.vertices.contains(&t) {
                continue;
            }
            path.push(h);
            if c2.vertices.contains(&t) {
                out.push((path.clone(), t));
            } else {
                visited[t] = true;
                dfs(g, t, c1, c2, path, visited, out);
                visited[t] = false;
            }
            path.pop();
        }
    }
    let mut result = Vec::new();
    for &a in &c1.vertices {
        let mut visited = vec![false; g.num_vertices()];
        visited[a] = true;
        let mut out = Vec::new();
        dfs(g, a, c1, c2, &mut Vec::new(), &mut visited, &mut out);
        result.extend(out.into_iter().map(|(p, b)| (p, a, b)));
    }
    result
}

/// A graph isomorphism, as images of vertices and of forward half-edges.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GraphIso {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<HalfEdge>,
}

impl GraphIso {
    pub fn identity(g: &Graph) -> GraphIso {
        GraphIso {
            vertex_map: (0..g.num_vertices()).collect(),
            edge_map: (0..g.num_edges()).map(HalfEdge::forward).collect(),
        }
    }

    pub fn map_half_edge(&self, h: HalfEdge) -> HalfEdge {
        let img = self.edge_map[h.edge()];
        if h.is_reversed() {
            img.reverse()
        } else {
            img
        }
    }

    pub fn map_path(&self, p: &EdgePath) -> EdgePath {
        EdgePath {
            start: self.vertex_map[p.start],
            edges: p.edges.iter().map(|&h| self.map_half_edge(h)).collect(),
        }
    }

    /// Lengths on the target indexed by target edge.
    pub fn push_lengths(&self, lengths: &[Rational]) -> Vec<Rational> {
        let mut out = lengths.to_vec();
        for (e, l) in lengths.iter().enumerate() {
            out[self.edge_map[e].edge()] = l.clone();
        }
        out
    }

    pub fn compose(&self, then: &GraphIso) -> GraphIso {
        GraphIso {
            vertex_map: self.vertex_map.iter().map(|&v| then.vertex_map[v]).collect(),
            edge_map: self.edge_map.iter().map(|&h| then.map_half_edge(h)).collect(),
        }
    }

    pub fn inverse(&self) -> GraphIso {
        let mut vertex_map = vec![0; self.vertex_map.len()];
        for (v, &w) in self.vertex_map.iter().enumerate() {
            vertex_map[w] = v;
        }
        let mut edge_map = vec![HalfEdge::forward(0); self.edge_map.len()];
        for (e, &h) in self.edge_map.iter().enumerate() {
            edge_map[h.edge()] = HalfEdge::new(e, h.is_reversed());
        }
        GraphIso { vertex_map, edge_map }
    }

    /// Order of the map as a permutation of half-edges.
    pub fn order(&self) -> usize {
        let mut current = self.clone();
        let mut k = 1;
        while current
            .edge_map
            .iter()
            .enumerate()
            .any(|(e, &h)| h != HalfEdge::forward(e))
        {
            current = current.compose(self);
            k += 1;
        }
        k
    }
}

/// Visits every isomorphism `g -> h` (length-preserving when lengths are
/// given) until the visitor breaks.
pub fn for_each_isomorphism<F>(
    g: &Graph,
    h: &Graph,
    lengths: Option<(&[Rational], &[Rational])>,
    mut visit: F,
) -> ControlFlow<()>
where
    F: FnMut(&GraphIso) -> ControlFlow<()>,
{
    if g.num_vertices() != h.num_vertices() || g.num_edges() != h.num_edges() {
        return ControlFlow::Continue(());
    }
    let mut gv: Vec<usize> = (0..g.num_vertices()).map(|v| g.valence(v)).collect();
    let mut hv: Vec<usize> = (0..h.num_vertices()).map(|v| h.valence(v)).collect();
    {
        let (mut a, mut b) = (gv.clone(), hv.clone());
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return ControlFlow::Continue(());
        }
    }
    // Order edges so each one touches an already placed vertex where possible.
    let order = bfs_edge_order(g);
    let mut state = IsoSearch {
        g,
        h,
        lengths,
        order,
        vmap: vec![usize::MAX; g.num_vertices()],
        vused: vec![false; h.num_vertices()],
        emap: vec![None; g.num_edges()],
        eused: vec![false; h.num_edges()],
    };
    gv.shrink_to_fit();
    hv.shrink_to_fit();
    state.search(0, &gv, &hv, &mut visit)
}

/// All isomorphisms `g -> h`, respecting lengths when given.
pub fn isomorphisms(g: &Graph, h: &Graph, lengths: Option<(&[Rational], &[Rational])>) -> Vec<GraphIso> {
    let mut out = Vec::new();
    let _ = for_each_isomorphism(g, h, lengths, |iso| {
        out.push(iso.clone());
        ControlFlow::Continue(())
    });
    out
}

fn bfs_edge_order(g: &Graph) -> Vec<usize> {
    let mut order = Vec::with_capacity(g.num_edges());
    let mut placed = vec![false; g.num_edges()];
    let mut seen = vec![false; g.num_vertices()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for h in g.outgoing(v) {
            if !placed[h.edge()] {
                placed[h.edge()] = true;
                order.push(h.edge());
            }
            let t = g.terminus(h);
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    order
}

struct IsoSearch<'a> {
    g: &'a Graph,
    h: &'a Graph,
    lengths: Option<(&'a [Rational], &'a [Rational])>,
    order: Vec<usize>,
    vmap: Vec<usize>,
    vused: Vec<bool>,
    emap: Vec<Option<HalfEdge>>,
    eused: Vec<bool>,
}

impl IsoSearch<'_> {
    fn try_vertex(&mut self, v: usize, w: usize, gv: &[usize], hv: &[usize], assigned: &mut Vec<usize>) -> bool {
        if self.vmap[v] == w {
            return true;
        }
        if self.vmap[v] != usize::MAX || self.vused[w] || gv[v] != hv[w] {
            return false;
        }
        self.vmap[v] = w;
        self.vused[w] = true;
        assigned.push(v);
        true
    }

    fn search<F>(&mut self, depth: usize, gv: &[usize], hv: &[usize], visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&GraphIso) -> ControlFlow<()>,
    {
        if depth == self.order.len() {
            let iso = GraphIso {
                vertex_map: self.vmap.clone(),
                edge_map: self.emap.iter().map(|h| h.unwrap()).collect(),
            };
            return visit(&iso);
        }
        let e = self.order[depth];
        let (a, b) = self.g.ends[e];
        let g_loop = a == b;
        for f in 0..self.h.num_edges() {
            if self.eused[f] || self.h.is_loop(f) != g_loop {
                continue;
            }
            if let Some((lg, lh)) = self.lengths {
                if lg[e] != lh[f] {
                    continue;
                }
            }
            let orientations = [false, true];
            for rev in orientations {
                let img = HalfEdge::new(f, rev);
                let (x, y) = (self.h.origin(img), self.h.terminus(img));
                let mut assigned = Vec::new();
                let ok = self.try_vertex(a, x, gv, hv, &mut assigned) && self.try_vertex(b, y, gv, hv, &mut assigned);
                if ok {
                    self.emap[e] = Some(img);
                    self.eused[f] = true;
                    let flow = self.search(depth + 1, gv, hv, visit);
                    self.eused[f] = false;
                    self.emap[e] = None;
                    if flow.is_break() {
                        for v in assigned {
                            self.vused[self.vmap[v]] = false;
                            self.vmap[v] = usize::MAX;
                        }
                        return flow;
                    }
                }
                for v in assigned {
                    self.vused[self.vmap[v]] = false;
                    self.vmap[v] = usize::MAX;
                }
            }
        }
        ControlFlow::Continue(())
    }
}

/// Quotient data of a forest collapse.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Projection {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<Option<usize>>,
}

impl Projection {
    pub fn push_half_edge(&self, h: HalfEdge) -> Option<HalfEdge> {
        self.edge_map[h.edge()].map(|e| HalfEdge::new(e, h.is_reversed()))
    }

    /// Image of a path, with collapsed edges dropped.
    pub fn push_path(&self, p: &EdgePath) -> EdgePath {
        EdgePath {
            start: self.vertex_map[p.start],
            edges: p.edges.iter().filter_map(|&h| self.push_half_edge(h)).collect(),
        }
    }

    /// Source edge of each target edge.
    pub fn preimages(&self, target_edges: usize) -> Vec<usize> {
        let mut pre = vec![usize::MAX; target_edges];
        for (e, img) in self.edge_map.iter().enumerate() {
            if let Some(f) = img {
                pre[*f] = e;
            }
        }
        pre
    }
}

/// Collapses each component of `forest` to a vertex. Quotient vertices are
/// numbered by least original vertex; surviving edges keep their id order.
pub fn collapse_forest(g: &Graph, forest: &Forest) -> Result<(Graph, Projection)> {
    let forest = Forest::new(g, forest.edges())?;
    let mut uf = UnionFind::new(g.num_vertices());
    for &e in forest.edges() {
        let (a, b) = g.ends[e];
        uf.union(a, b);
    }
    let mut root_index = vec![usize::MAX; g.num_vertices()];
    let mut count = 0;
    let vertex_map: Vec<usize> = (0..g.num_vertices())
        .map(|v| {
            let r = uf.find(v);
            if root_index[r] == usize::MAX {
                root_index[r] = count;
                count += 1;
            }
            root_index[r]
        })
        .collect();
    let mut ends = Vec::new();
    let mut edge_map = vec![None; g.num_edges()];
    for (e, &(a, b)) in g.ends.iter().enumerate() {
        if !forest.contains(e) {
            edge_map[e] = Some(ends.len());
            ends.push((vertex_map[a], vertex_map[b]));
        }
    }
    let quotient = Graph {
        vertices: count,
        ends,
        subdivided: g.subdivided,
    };
    Ok((quotient, Projection { vertex_map, edge_map }))
}

/// A single-edge expansion at a vertex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BlowUp {
    pub vertex: usize,
    /// Half-edges (with origin `vertex`) moved to the new vertex.
    pub moved: Vec<HalfEdge>,
    pub graph: Graph,
    /// The new edge, running from `vertex` to the new vertex.
    pub new_edge: usize,
}

impl BlowUp {
    pub fn new_vertex(&self) -> usize {
        self.graph.num_vertices() - 1
    }

    /// Collapsing the new edge recovers the original graph exactly.
    pub fn collapse_back(&self) -> Result<(Graph, Projection)> {
        collapse_forest(&self.graph, &Forest(vec![self.new_edge]))
    }

    /// Whether `h` (a half-edge of the original graph at `vertex`) moved.
    pub fn is_moved(&self, h: HalfEdge) -> bool {
        self.moved.contains(&h)
    }
}

/// Splits `vertex`, moving the half-edges in `moved` to a new vertex joined
/// to the old one by a new last edge.
pub fn blow_up(g: &Graph, vertex: usize, moved: &[HalfEdge]) -> Result<BlowUp> {
    let at_v = g.outgoing(vertex);
    if moved.iter().any(|h| !at_v.contains(h)) {
        return Err(Error::InvalidGraph(format!("moved half-edge not at vertex {vertex}")));
    }
    let moved: Vec<HalfEdge> = moved.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let new_v = g.num_vertices();
    let mut ends = g.ends.clone();
    for &h in &moved {
        let (a, b) = &mut ends[h.edge()];
        if h.is_reversed() {
            *b = new_v;
        } else {
            *a = new_v;
        }
    }
    let new_edge = ends.len();
    ends.push((vertex, new_v));
    let graph = Graph {
        vertices: new_v + 1,
        ends,
        subdivided: g.subdivided,
    };
    graph.check_structure()?;
    Ok(BlowUp {
        vertex,
        moved,
        graph,
        new_edge,
    })
}

/// Every single-edge blow-up: unordered bipartitions of the half-edges at
/// each vertex with both sides of size at least two. The side holding the
/// least half-edge stays at the old vertex.
pub fn enumerate_blow_ups(g: &Graph) -> Vec<BlowUp> {
    let mut out = Vec::new();
    for v in 0..g.num_vertices() {
        let hs = g.outgoing(v);
        let k = hs.len();
        if k < 4 {
            continue;
        }
        // subsets of hs[1..] form the moved side; hs[0] always stays
        for mask in 1u64..(1u64 << (k - 1)) {
            let size = mask.count_ones() as usize;
            if size < 2 || k - size < 2 {
                continue;
            }
            let moved: Vec<HalfEdge> = (0..k - 1).filter(|i| mask >> i & 1 == 1).map(|i| hs[i + 1]).collect();
            out.push(blow_up(g, v, &moved).expect("valid bipartition"));
        }
    }
    out
}

/// Edges of every nonempty forest of `g` (used to enumerate all faces).
pub fn all_forests(g: &Graph) -> Vec<Forest> {
    let n = g.num_edges();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    fn grow(g: &Graph, current: Vec<usize>, out: &mut Vec<Forest>, seen: &mut HashSet<Vec<usize>>) {
        for e in current.last().map_or(0, |&l| l + 1)..g.num_edges() {
            let mut next = current.clone();
            next.push(e);
            if let Ok(f) = Forest::new(g, &next) {
                if seen.insert(next.clone()) {
                    out.push(f);
                    grow(g, next, out, seen);
                }
            }
        }
    }
    if n > 0 {
        grow(g, Vec::new(), &mut out, &mut seen);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn he(s: &str) -> HalfEdge {
        let (rev, n) = if let Some(r) = s.strip_prefix('E') {
            (true, r)
        } else {
            (false, &s[1..])
        };
        HalfEdge::new(n.parse().unwrap(), rev)
    }

    fn path(g: &Graph, start: usize, s: &str) -> EdgePath {
        EdgePath::new(g, start, s.split_whitespace().map(he).collect()).unwrap()
    }

    fn barbell() -> Graph {
        Graph::new(2, vec![(0, 0), (1, 1), (0, 1)]).unwrap()
    }

    #[test]
    fn tighten_examples() {
        let g = Graph::multi_theta(3);
        let p = path(&g, 0, "e0 E0 e1");
        assert_eq!(p.tighten(&g).edges(), &[he("e1")]);
        let q = path(&g, 0, "e0 E1 e1 E0");
        assert!(q.tighten(&g).is_empty());
        let r = path(&g, 0, "e0 E1");
        assert_eq!(r.tighten(&g), r);
    }

    #[test]
    fn rose_candidates() {
        let c = enumerate_candidates(&Graph::rose(2));
        assert_eq!(c.len(), 4);
        let kinds: Vec<_> = c.iter().map(|c| c.kind).collect();
        assert_eq!(kinds.iter().filter(|&&k| k == CandidateKind::Circle).count(), 2);
        assert_eq!(kinds.iter().filter(|&&k| k == CandidateKind::FigureEight).count(), 2);
    }

    #[test]
    fn theta_candidates() {
        let g = Graph::multi_theta(3);
        let c = enumerate_candidates(&g);
        let seqs: Vec<Vec<HalfEdge>> = c.iter().map(|c| c.path.edges().to_vec()).collect();
        let expect: Vec<Vec<HalfEdge>> = ["e1 E0", "e2 E0", "e2 E1"]
            .iter()
            .map(|s| canonical_loop(&s.split_whitespace().map(he).collect::<Vec<_>>()))
            .collect();
        assert_eq!(c.len(), 3);
        for e in expect {
            assert!(seqs.contains(&e));
        }
        assert!(c.iter().all(|c| c.kind == CandidateKind::Circle));
    }

    #[test]
    fn barbell_candidates() {
        let c = enumerate_candidates(&barbell());
        assert_eq!(c.len(), 4);
        assert_eq!(c.iter().filter(|c| c.kind == CandidateKind::Barbell).count(), 2);
        for cand in &c {
            assert!(cand.path.is_closed(&barbell()));
            assert!(cand.path.is_reduced(&barbell()));
        }
    }

    #[test]
    fn rose_n_candidate_count() {
        for n in 2..=4 {
            let c = enumerate_candidates(&Graph::rose(n));
            assert_eq!(c.len(), n + n * (n - 1));
        }
    }

    #[test]
    fn theta_isomorphisms() {
        let g = Graph::multi_theta(3);
        assert_eq!(isomorphisms(&g, &g, None).len(), 12);
        assert!(isomorphisms(&Graph::rose(2), &g, None).is_empty());
        let l = [rat(1, 2), rat(1, 4), rat(1, 4)];
        assert_eq!(isomorphisms(&g, &g, Some((&l, &l))).len(), 4);
        assert_eq!(isomorphisms(&Graph::rose(2), &Graph::rose(2), None).len(), 8);
    }

    #[test]
    fn collapse_examples() {
        let g = Graph::multi_theta(3);
        let (q, proj) = collapse_forest(&g, &Forest::new(&g, &[0]).unwrap()).unwrap();
        assert_eq!(q, Graph::rose(2));
        assert_eq!(proj.edge_map, vec![None, Some(0), Some(1)]);
        let (same, _) = collapse_forest(&g, &Forest::empty()).unwrap();
        assert_eq!(same, g);
        assert!(matches!(Forest::new(&g, &[0, 1]), Err(Error::ForestHasCycle)));
    }

    #[test]
    fn blow_ups_of_rose() {
        let r = Graph::rose(2);
        let b = enumerate_blow_ups(&r);
        assert_eq!(b.len(), 3);
        for bu in &b {
            assert_eq!(bu.graph.rank(), 2);
            bu.graph.check_admissible().unwrap();
            let (back, _) = bu.collapse_back().unwrap();
            assert_eq!(back, r);
        }
        assert!(enumerate_blow_ups(&Graph::multi_theta(3)).is_empty());
    }

    #[test]
    fn theta_is_two_vertex_three_edge() {
        let g = Graph::multi_theta(3);
        assert_eq!(g.rank(), 2);
        assert_eq!(g.valence(0), 3);
        assert!(g.check_admissible().is_ok());
        assert!(Graph::new(2, vec![(0, 0)]).is_err());
        assert!(Graph::new(2, vec![(0, 1), (0, 1)]).unwrap().check_admissible().is_err());
    }

    #[test]
    fn spanning_trees() {
        let g = Graph::multi_theta(3);
        assert_eq!(g.spanning_tree().edges(), &[0]);
        let f = Forest::new(&g, &[2]).unwrap();
        assert_eq!(g.spanning_tree_containing(&f).edges(), &[2]);
        let paths = g.tree_paths(&g.spanning_tree(), 0);
        assert_eq!(paths[1], vec![he("e0")]);
    }

    #[test]
    fn forests_of_theta() {
        assert_eq!(all_forests(&Graph::multi_theta(3)).len(), 3);
        assert!(all_forests(&Graph::rose(2)).is_empty());
    }
}
