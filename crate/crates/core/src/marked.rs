//! Marked graphs and points of Outer space.
//!
//! A marking is stored in both directions. `fwd[i]` is a reduced closed path
//! at the basepoint realising generator `x_i`. For the chosen spanning tree,
//! every non-tree edge `e` carries the word read off the loop
//! `tree(base, o(e)) · e · tree(t(e), base)`; tree edges read as the empty
//! word. Reading a path multiplies the words of its edges. Every constructor
//! rewrites both directions, and [`MarkedGraph::verify`] checks that reading
//! `fwd[i]` gives back `x_i`, which together with `rank == N` makes the
//! marking a homotopy equivalence.

use std::ops::ControlFlow;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::free_group::{inner_conjugator, push_reduced, AutoPair, CyclicWord, Letter, Word};
use crate::graph::{
    collapse_forest, crossing_counts, cyclically_reduce_half_edges, embedded_circles, for_each_isomorphism,
    push_half_edge, reduce_half_edges, BlowUp, EdgePath, Forest, Graph, GraphIso, HalfEdge, Projection,
};
use crate::rational::{int, weighted_sum, Rational};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MarkedGraph {
    graph: Graph,
    basepoint: usize,
    fwd: Vec<Vec<HalfEdge>>,
    tree: Forest,
    bwd: Vec<Word>,
}

/// An open simplex of Outer space is named by its marked graph.
pub type SimplexRef = MarkedGraph;

impl MarkedGraph {
    /// Assembles and verifies a marked graph.
    pub fn new(
        graph: Graph,
        basepoint: usize,
        fwd: Vec<Vec<HalfEdge>>,
        tree: Forest,
        bwd: Vec<Word>,
    ) -> Result<MarkedGraph> {
        if basepoint >= graph.num_vertices() {
            return Err(Error::InvalidMarking(format!("basepoint {basepoint} out of range")));
        }
        if bwd.len() != graph.num_edges() {
            return Err(Error::InvalidMarking(format!(
                "expected {} edge words, found {}",
                graph.num_edges(),
                bwd.len()
            )));
        }
        let tree = Forest::new(&graph, tree.edges())?;
        if tree.edges().len() + 1 != graph.num_vertices() {
            return Err(Error::InvalidMarking("tree does not span the graph".into()));
        }
        for &e in tree.edges() {
            if !bwd[e].is_empty() {
                return Err(Error::InvalidMarking(format!("tree edge {e} carries a word")));
            }
        }
        for (i, p) in fwd.iter().enumerate() {
            let path =
                EdgePath::new(&graph, basepoint, p.clone()).map_err(|_| Error::MarkingFailed { generator: i })?;
            if !path.is_closed(&graph) {
                return Err(Error::MarkingFailed { generator: i });
            }
        }
        let m = MarkedGraph {
            graph,
            basepoint,
            fwd,
            tree,
            bwd,
        };
        m.verify()?;
        Ok(m)
    }

    /// Rose with the identity marking.
    pub fn rose(n: usize) -> MarkedGraph {
        MarkedGraph {
            graph: Graph::rose(n),
            basepoint: 0,
            fwd: (0..n).map(|i| vec![HalfEdge::forward(i)]).collect(),
            tree: Forest::empty(),
            bwd: (0..n).map(Word::generator).collect(),
        }
    }

    /// The marking in which the non-tree edges, in id order, are the free
    /// basis: generator `i` is the tree loop through the `i`-th non-tree edge.
    pub fn from_tree(graph: Graph, basepoint: usize, tree: Forest) -> Result<MarkedGraph> {
        let tree = Forest::new(&graph, tree.edges())?;
        if tree.edges().len() + 1 != graph.num_vertices() {
            return Err(Error::InvalidMarking("tree does not span the graph".into()));
        }
        let paths = graph.tree_paths(&tree, basepoint);
        let mut fwd = Vec::new();
        let mut bwd = vec![Word::empty(); graph.num_edges()];
        for (e, word) in bwd.iter_mut().enumerate() {
            if tree.contains(e) {
                continue;
            }
            let h = HalfEdge::forward(e);
            *word = Word::generator(fwd.len());
            fwd.push(tree_loop(&graph, &paths, h));
        }
        MarkedGraph::new(graph, basepoint, fwd, tree, bwd)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn tree(&self) -> &Forest {
        &self.tree
    }

    pub fn rank(&self) -> usize {
        self.fwd.len()
    }

    pub fn forward_paths(&self) -> &[Vec<HalfEdge>] {
        &self.fwd
    }

    pub fn edge_words(&self) -> &[Word] {
        &self.bwd
    }

    pub fn dimension(&self) -> usize {
        self.graph.num_edges() - 1
    }

    /// Checks `rank == N` and that each forward loop reads back as its
    /// generator.
    pub fn verify(&self) -> Result<()> {
        if self.graph.rank() != self.rank() {
            return Err(Error::InvalidMarking(format!(
                "graph rank {} differs from marking rank {}",
                self.graph.rank(),
                self.rank()
            )));
        }
        for (i, p) in self.fwd.iter().enumerate() {
            if self.read_path(p) != Word::generator(i) {
                return Err(Error::MarkingFailed { generator: i });
            }
        }
        Ok(())
    }

    fn edge_word(&self, h: HalfEdge) -> impl Iterator<Item = Letter> + '_ {
        let w = self.bwd[h.edge()].letters();
        let rev = h.is_reversed();
        let n = w.len();
        (0..n).map(move |k| if rev { w[n - 1 - k].inverse() } else { w[k] })
    }

    /// The word read along a path (based reading for closed paths at the
    /// basepoint).
    pub fn read_path(&self, p: &[HalfEdge]) -> Word {
        let mut buf = Vec::new();
        for &h in p {
            for l in self.edge_word(h) {
                push_reduced(&mut buf, l);
            }
        }
        Word::from_letters(buf)
    }

    /// Conjugacy class of a closed path.
    pub fn read_loop(&self, p: &EdgePath) -> CyclicWord {
        self.read_path(p.edges()).conjugacy_class()
    }

    /// Reduced closed path at the basepoint realising `w`.
    pub fn realize(&self, w: &Word) -> Vec<HalfEdge> {
        let mut buf = Vec::new();
        for &l in w.letters() {
            let p = &self.fwd[l.index()];
            if l.is_inverse() {
                for &h in p.iter().rev() {
                    push_half_edge(&mut buf, h.reverse());
                }
            } else {
                for &h in p {
                    push_half_edge(&mut buf, h);
                }
            }
        }
        buf
    }

    /// Cyclically reduced loop realising the conjugacy class of `w`.
    pub fn realize_cyclic(&self, w: &Word) -> Vec<HalfEdge> {
        cyclically_reduce_half_edges(self.realize(w))
    }

    /// Crossing counts of the tight loop of `w`.
    pub fn crossings(&self, w: &Word) -> Vec<u64> {
        crossing_counts(&self.realize_cyclic(w), self.graph.num_edges())
    }

    /// The same marking expressed with another spanning tree.
    pub fn retree(&self, tree: &Forest) -> Result<MarkedGraph> {
        let tree = Forest::new(&self.graph, tree.edges())?;
        if tree.edges().len() + 1 != self.graph.num_vertices() {
            return Err(Error::InvalidMarking("tree does not span the graph".into()));
        }
        let paths = self.graph.tree_paths(&tree, self.basepoint);
        let bwd = (0..self.graph.num_edges())
            .map(|e| {
                if tree.contains(e) {
                    Word::empty()
                } else {
                    self.read_path(&tree_loop(&self.graph, &paths, HalfEdge::forward(e)))
                }
            })
            .collect();
        let m = MarkedGraph {
            graph: self.graph.clone(),
            basepoint: self.basepoint,
            fwd: self.fwd.clone(),
            tree,
            bwd,
        };
        debug_assert!(m.verify().is_ok());
        Ok(m)
    }

    /// The marking precomposed with `phi` (the right action `h ↦ h∘phi`).
    pub fn act(&self, phi: &AutoPair) -> MarkedGraph {
        assert_eq!(phi.rank(), self.rank(), "rank mismatch in act");
        let fwd = (0..self.rank()).map(|i| self.realize(&phi.images()[i])).collect();
        let bwd = self.bwd.iter().map(|w| phi.apply_inverse(w)).collect();
        let m = MarkedGraph {
            graph: self.graph.clone(),
            basepoint: self.basepoint,
            fwd,
            tree: self.tree.clone(),
            bwd,
        };
        debug_assert!(m.verify().is_ok());
        m
    }

    /// Collapses a forest, carrying the marking across.
    pub fn collapse(&self, forest: &Forest) -> Result<(MarkedGraph, Projection)> {
        let forest = Forest::new(&self.graph, forest.edges())?;
        let tree = self.graph.spanning_tree_containing(&forest);
        let m = self.retree(&tree)?;
        let (graph, proj) = collapse_forest(&self.graph, &forest)?;
        let mut bwd = vec![Word::empty(); graph.num_edges()];
        let mut new_tree = Vec::new();
        for (e, img) in proj.edge_map.iter().enumerate() {
            if let Some(f) = img {
                bwd[*f] = m.bwd[e].clone();
                if tree.contains(e) {
                    new_tree.push(*f);
                }
            }
        }
        let basepoint = proj.vertex_map[self.basepoint];
        let fwd = self
            .fwd
            .iter()
            .map(|p| {
                let pushed = proj.push_path(&EdgePath::from_parts(self.basepoint, p.clone()));
                reduce_half_edges(pushed.edges())
            })
            .collect();
        let tree = Forest::new(&graph, &new_tree)?;
        let out = MarkedGraph {
            graph,
            basepoint,
            fwd,
            tree,
            bwd,
        };
        debug_assert!(out.verify().is_ok());
        Ok((out, proj))
    }

    /// Lifts the marking through a blow-up of this graph. If the split vertex
    /// is the basepoint, the basepoint stays on the side of the least
    /// half-edge (the old vertex id).
    pub fn blow_up(&self, bu: &BlowUp) -> MarkedGraph {
        let mut tree: Vec<usize> = self.tree.edges().to_vec();
        tree.push(bu.new_edge);
        let mut bwd = self.bwd.clone();
        bwd.push(Word::empty());
        let fwd = self
            .fwd
            .iter()
            .map(|p| lift_through_blow_up(&self.graph, bu, self.basepoint, p))
            .collect();
        let out = MarkedGraph {
            graph: bu.graph.clone(),
            basepoint: self.basepoint,
            fwd,
            tree: Forest::new(&bu.graph, &tree).expect("tree plus new edge is a tree"),
            bwd,
        };
        debug_assert!(out.verify().is_ok());
        out
    }

    /// Marking equivalence of simplices, ignoring lengths.
    pub fn same_simplex(&self, other: &MarkedGraph) -> bool {
        find_marked_isometry(self, other, None).is_some()
    }
}

/// `tree(base, o(h)) · h · tree(t(h), base)`, reduced.
fn tree_loop(g: &Graph, paths: &[Vec<HalfEdge>], h: HalfEdge) -> Vec<HalfEdge> {
    let mut p: Vec<HalfEdge> = paths[g.origin(h)].clone();
    p.push(h);
    p.extend(paths[g.terminus(h)].iter().rev().map(|x| x.reverse()));
    reduce_half_edges(&p)
}

/// The path in the blown-up graph that collapses back to `p`.
pub(crate) fn lift_through_blow_up(g: &Graph, bu: &BlowUp, start: usize, p: &[HalfEdge]) -> Vec<HalfEdge> {
    let eps = HalfEdge::forward(bu.new_edge);
    let v = bu.vertex;
    let mut out = Vec::with_capacity(p.len() + 2);
    let mut side = false;
    let mut at_v = start == v;
    for &h in p {
        if at_v {
            let need = bu.is_moved(h);
            if need != side {
                out.push(if need { eps } else { eps.reverse() });
            }
        }
        out.push(h);
        at_v = g.terminus(h) == v;
        if at_v {
            side = bu.is_moved(h.reverse());
        }
    }
    if at_v && start == v && side {
        out.push(eps.reverse());
    }
    out
}

/// A length-preserving isomorphism `x -> y` compatible with the markings up
/// to an inner automorphism, if one exists. Without lengths this compares
/// simplices.
pub fn find_marked_isometry(
    x: &MarkedGraph,
    y: &MarkedGraph,
    lengths: Option<(&[Rational], &[Rational])>,
) -> Option<GraphIso> {
    if x.rank() != y.rank() {
        return None;
    }
    let mut found = None;
    let _ = for_each_isomorphism(&x.graph, &y.graph, lengths, |iso| {
        let images: Vec<Word> = x
            .fwd
            .iter()
            .map(|p| {
                let mapped: Vec<HalfEdge> = p.iter().map(|&h| iso.map_half_edge(h)).collect();
                y.read_path(&mapped)
            })
            .collect();
        if inner_conjugator(&images).is_some() {
            found = Some(iso.clone());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    found
}

/// A point of Outer space: a marked graph with nonnegative edge lengths of
/// total one. Zero lengths are allowed on a forest (closed-simplex points).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CVPoint {
    marked: MarkedGraph,
    lengths: Vec<Rational>,
}

impl CVPoint {
    pub fn new(marked: MarkedGraph, lengths: Vec<Rational>) -> Result<CVPoint> {
        if lengths.len() != marked.graph.num_edges() {
            return Err(Error::InvalidLengths(format!(
                "expected {} lengths, found {}",
                marked.graph.num_edges(),
                lengths.len()
            )));
        }
        if lengths.iter().any(|l| l.is_negative()) {
            return Err(Error::InvalidLengths("negative edge length".into()));
        }
        let total: Rational = lengths.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidLengths(format!("lengths sum to {total}, not 1")));
        }
        let zeros: Vec<usize> = (0..lengths.len()).filter(|&e| lengths[e].is_zero()).collect();
        if Forest::new(&marked.graph, &zeros).is_err() {
            return Err(Error::InvalidLengths("zero-length edges contain a cycle".into()));
        }
        Ok(CVPoint { marked, lengths })
    }

    /// Every edge of length `1/|E|`.
    pub fn centre(marked: &MarkedGraph) -> CVPoint {
        let n = marked.graph.num_edges() as i64;
        CVPoint {
            marked: marked.clone(),
            lengths: vec![Rational::new(1.into(), n.into()); n as usize],
        }
    }

    pub fn marked(&self) -> &MarkedGraph {
        &self.marked
    }

    pub fn graph(&self) -> &Graph {
        &self.marked.graph
    }

    pub fn lengths(&self) -> &[Rational] {
        &self.lengths
    }

    pub fn rank(&self) -> usize {
        self.marked.rank()
    }

    pub fn is_open(&self) -> bool {
        self.lengths.iter().all(|l| l.is_positive())
    }

    pub fn path_length(&self, p: &[HalfEdge]) -> Rational {
        weighted_sum(&crossing_counts(p, self.lengths.len()), &self.lengths)
    }

    /// Length of the tight loop representing `c`.
    pub fn translation_length(&self, c: &CyclicWord) -> Rational {
        self.path_length(&self.marked.realize_cyclic(&c.as_word()))
    }

    /// Same as [`CVPoint::translation_length`] for any word's class.
    pub fn word_length(&self, w: &Word) -> Rational {
        self.path_length(&self.marked.realize_cyclic(w))
    }

    /// Shortest embedded circle.
    pub fn systole(&self) -> Result<Rational> {
        if !self.is_open() {
            return Err(Error::ZeroLengthEdge);
        }
        Ok(embedded_circles(self.graph())
            .iter()
            .map(|c| self.path_length(c))
            .min()
            .expect("rank at least one"))
    }

    pub fn is_thick(&self, eps: &Rational) -> Result<bool> {
        Ok(self.systole()? >= *eps)
    }

    pub fn act(&self, phi: &AutoPair) -> CVPoint {
        CVPoint {
            marked: self.marked.act(phi),
            lengths: self.lengths.clone(),
        }
    }

    /// The point of Outer space this closed-simplex point represents: the
    /// zero-length forest collapsed away.
    pub fn collapse_zero_edges(&self) -> CVPoint {
        let zeros: Vec<usize> = (0..self.lengths.len()).filter(|&e| self.lengths[e].is_zero()).collect();
        if zeros.is_empty() {
            return self.clone();
        }
        let forest = Forest::new(self.graph(), &zeros).expect("zero set is a forest");
        let (marked, proj) = self.marked.collapse(&forest).expect("collapse of a forest");
        let mut lengths = vec![Rational::zero(); marked.graph.num_edges()];
        for (e, img) in proj.edge_map.iter().enumerate() {
            if let Some(f) = img {
                lengths[*f] = self.lengths[e].clone();
            }
        }
        CVPoint { marked, lengths }
    }

    /// Equality in Outer space: an isometry carrying one marking to the other
    /// up to homotopy.
    pub fn marked_graph_equal(&self, other: &CVPoint) -> bool {
        self.marked_isometry(other).is_some()
    }

    pub fn marked_isometry(&self, other: &CVPoint) -> Option<GraphIso> {
        find_marked_isometry(&self.marked, &other.marked, Some((&self.lengths, &other.lengths)))
    }

    /// Convex combination `(1 - s)·self + s·other` of two points on the same
    /// marked graph.
    pub fn interpolate(&self, other: &CVPoint, s: &Rational) -> CVPoint {
        assert_eq!(self.marked, other.marked, "interpolation needs a common simplex");
        let one = int(1);
        let lengths = self
            .lengths
            .iter()
            .zip(&other.lengths)
            .map(|(a, b)| a * (&one - s) + b * s)
            .collect();
        CVPoint {
            marked: self.marked.clone(),
            lengths,
        }
    }
}
