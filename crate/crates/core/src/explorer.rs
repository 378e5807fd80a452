//! Breadth-first search for the simplices of the Min-set, and their orbits
//! under the cyclic group generated by the automorphism.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::{self, Write as _};

use num_traits::One;
use sha2::{Digest, Sha256};

use crate::displacement::{min_displacement_on_simplex, MinimizationResult};
use crate::error::Result;
use crate::free_group::AutoPair;
use crate::graph::{enumerate_blow_ups, Forest, GraphIso, HalfEdge, UnionFind};
use crate::lipschitz::candidate_table;
use crate::marked::{find_marked_isometry, CVPoint, MarkedGraph};
use crate::rational::Rational;

/// A step between adjacent simplices.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Move {
    /// Collapse one non-loop edge (to a face).
    Collapse { edge: usize },
    /// Split a vertex (to a coface).
    BlowUp { vertex: usize, moved: Vec<HalfEdge> },
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Collapse { edge } => write!(f, "c{edge}"),
            Move::BlowUp { vertex, moved } => {
                write!(f, "b{vertex}:")?;
                for (i, h) in moved.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{h}")?;
                }
                Ok(())
            }
        }
    }
}

/// Faces by single-edge collapse, then cofaces by single blow-up.
pub fn neighbors(m: &MarkedGraph) -> Vec<(Move, MarkedGraph)> {
    let g = m.graph();
    let mut out = Vec::new();
    for e in 0..g.num_edges() {
        if g.is_loop(e) {
            continue;
        }
        let forest = Forest::new(g, &[e]).expect("a non-loop edge is a forest");
        let (face, _) = m.collapse(&forest).expect("collapse of a forest");
        out.push((Move::Collapse { edge: e }, face));
    }
    for bu in enumerate_blow_ups(g) {
        let up = m.blow_up(&bu);
        out.push((
            Move::BlowUp {
                vertex: bu.vertex,
                moved: bu.moved.clone(),
            },
            up,
        ));
    }
    out
}

/// Hash of the vertex count and the sorted candidate classes with their
/// sorted edge crossing counts, as 16 hex digits. Equal simplices have equal
/// keys; distinct ones are told apart by marked isometry.
pub fn simplex_key(m: &MarkedGraph) -> String {
    let mut text = format!("{}", m.graph().num_vertices());
    for c in candidate_table(m) {
        let mut counts = c.counts.clone();
        counts.sort_unstable();
        let _ = write!(text, ";{}:{counts:?}", c.class);
    }
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimplexCensusEntry {
    pub key: String,
    pub simplex: MarkedGraph,
    pub lower: Rational,
    pub upper: Rational,
    pub argmin: Vec<Rational>,
    pub interior: bool,
    /// Moves from the seed simplex.
    pub path: Vec<Move>,
}

impl SimplexCensusEntry {
    pub fn argmin_point(&self) -> CVPoint {
        CVPoint::new(self.simplex.clone(), self.argmin.clone()).expect("argmin is a simplex point")
    }
}

/// `face` is a codimension-one face of `coface`. `lift[e]` is the face edge
/// matching coface edge `e`, or `None` for the collapsed edge.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Adjacency {
    pub face: usize,
    pub coface: usize,
    pub lift: Vec<Option<usize>>,
}

impl Adjacency {
    /// Face lengths placed on the coface, zero on the collapsed edge.
    pub fn lift_lengths(&self, face_lengths: &[Rational]) -> Vec<Rational> {
        self.lift
            .iter()
            .map(|f| f.map_or_else(Rational::default, |e| face_lengths[e].clone()))
            .collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ExploreLimits {
    pub max_simplices: usize,
    /// Largest number of moves from the seed.
    pub max_steps: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Census {
    pub entries: Vec<SimplexCensusEntry>,
    pub adjacency: Vec<Adjacency>,
    /// Least certified displacement found.
    pub best_upper: Rational,
    /// False if a limit cut the search short.
    pub complete: bool,
    /// Simplices whose minimum was computed, retained or not.
    pub evaluated: usize,
}

impl Census {
    /// Entry marked-equal to `m`, with the isometry from `m`.
    pub fn find(&self, m: &MarkedGraph) -> Option<(usize, GraphIso)> {
        let key = simplex_key(m);
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.key == key)
            .find_map(|(i, e)| find_marked_isometry(m, &e.simplex, None).map(|g| (i, g)))
    }
}

struct Node {
    key: String,
    simplex: MarkedGraph,
    result: MinimizationResult,
    path: Vec<Move>,
}

/// Breadth-first search from the simplex of `seed`, keeping every simplex
/// whose closed-simplex minimum is within the factor `1 + tol` of the best
/// displacement seen. Retention is re-checked against the final best value.
pub fn explore_min_set(seed: &CVPoint, phi: &AutoPair, tol: &Rational, limits: ExploreLimits) -> Result<Census> {
    let factor = Rational::one() + tol;
    let mut nodes: Vec<Node> = Vec::new();
    let mut by_key: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut raw_adjacency: Vec<Adjacency> = Vec::new();
    let mut retained = 0usize;
    let mut complete = true;

    let first = seed.marked().clone();
    let result = min_displacement_on_simplex(&first, phi, tol)?;
    let mut best = result.upper.clone();
    let key = simplex_key(&first);
    by_key.entry(key.clone()).or_default().push(0);
    nodes.push(Node {
        key,
        simplex: first,
        result,
        path: Vec::new(),
    });
    retained += 1;
    let mut queue = VecDeque::from([0usize]);

    while let Some(i) = queue.pop_front() {
        if nodes[i].path.len() >= limits.max_steps {
            complete = false;
            continue;
        }
        for (mv, next) in neighbors(&nodes[i].simplex) {
            let key = simplex_key(&next);
            let known = by_key.get(&key).and_then(|ids| {
                ids.iter()
                    .find_map(|&j| find_marked_isometry(&next, &nodes[j].simplex, None).map(|g| (j, g)))
            });
            let (j, iso) = match known {
                Some(found) => found,
                None => {
                    if retained >= limits.max_simplices {
                        complete = false;
                        continue;
                    }
                    let result = min_displacement_on_simplex(&next, phi, tol)?;
                    let keep = result.lower <= &best * &factor;
                    if keep && result.upper < best {
                        best = result.upper.clone();
                    }
                    let j = nodes.len();
                    let iso = GraphIso::identity(next.graph());
                    let mut path = nodes[i].path.clone();
                    path.push(mv.clone());
                    by_key.entry(key.clone()).or_default().push(j);
                    nodes.push(Node {
                        key,
                        simplex: next,
                        result,
                        path,
                    });
                    if keep {
                        retained += 1;
                        queue.push_back(j);
                    }
                    (j, iso)
                }
            };
            raw_adjacency.push(adjacency_for(&nodes[i].simplex, i, j, &mv, &iso));
        }
    }

    let bound = &best * &factor;
    let mut new_index = vec![usize::MAX; nodes.len()];
    let mut entries = Vec::new();
    for (i, node) in nodes.iter().enumerate() {
        if node.result.lower <= bound {
            new_index[i] = entries.len();
            entries.push(SimplexCensusEntry {
                key: node.key.clone(),
                simplex: node.simplex.clone(),
                lower: node.result.lower.clone(),
                upper: node.result.upper.clone(),
                argmin: node.result.argmin.clone(),
                interior: node.result.interior,
                path: node.path.clone(),
            });
        }
    }
    let mut adjacency: Vec<Adjacency> = raw_adjacency
        .into_iter()
        .filter(|a| new_index[a.face] != usize::MAX && new_index[a.coface] != usize::MAX)
        .map(|a| Adjacency {
            face: new_index[a.face],
            coface: new_index[a.coface],
            lift: a.lift,
        })
        .collect();
    adjacency.sort_by(|a, b| (a.face, a.coface, &a.lift).cmp(&(b.face, b.coface, &b.lift)));
    adjacency.dedup();
    Ok(Census {
        entries,
        adjacency,
        best_upper: best,
        complete,
        evaluated: nodes.len(),
    })
}

/// Adjacency between node `i` (whose neighbor via `mv` is isometric to node
/// `j` through `iso`) and node `j`.
fn adjacency_for(from: &MarkedGraph, i: usize, j: usize, mv: &Move, iso: &GraphIso) -> Adjacency {
    let n = from.graph().num_edges();
    match mv {
        Move::Collapse { edge } => {
            let mut lift = Vec::with_capacity(n);
            let mut next = 0;
            for e in 0..n {
                if e == *edge {
                    lift.push(None);
                } else {
                    lift.push(Some(iso.edge_map[next].edge()));
                    next += 1;
                }
            }
            Adjacency {
                face: j,
                coface: i,
                lift,
            }
        }
        Move::BlowUp { .. } => {
            let mut lift = vec![None; n + 1];
            for (e, h) in iso.edge_map.iter().enumerate() {
                lift[h.edge()] = if e < n { Some(e) } else { None };
            }
            Adjacency {
                face: i,
                coface: j,
                lift,
            }
        }
    }
}

/// Orbit classes of census entries under powers of `phi`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Quotient {
    /// Class index of each entry.
    pub class_of: Vec<usize>,
    /// Least-key entry of each class, classes ordered by that key.
    pub representatives: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl Quotient {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }
}

/// Joins each entry to the entries equal to its images under `phi^k`,
/// `1 ≤ k ≤ k_max`, following each chain while it stays in the census.
/// Negative powers are covered by symmetry of the relation.
pub fn quotient_by_power(census: &Census, phi: &AutoPair, k_max: usize) -> Quotient {
    let n = census.entries.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        let mut current = census.entries[i].simplex.clone();
        for _ in 0..k_max {
            current = current.act(phi);
            match census.find(&current) {
                Some((j, _)) => {
                    uf.union(i, j);
                }
                None => break,
            }
        }
    }
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        members.entry(uf.find(i)).or_default().push(i);
    }
    let mut classes: Vec<(usize, usize)> = members
        .values()
        .map(|ids| {
            let rep = *ids
                .iter()
                .min_by(|&&a, &&b| (&census.entries[a].key, a).cmp(&(&census.entries[b].key, b)))
                .unwrap();
            (rep, ids.len())
        })
        .collect();
    classes.sort_by(|a, b| (&census.entries[a.0].key, a.0).cmp(&(&census.entries[b.0].key, b.0)));
    let mut class_of = vec![0; n];
    for (c, (rep, _)) in classes.iter().enumerate() {
        let root = uf.find(*rep);
        for (i, slot) in class_of.iter_mut().enumerate() {
            if uf.find(i) == root {
                *slot = c;
            }
        }
    }
    Quotient {
        class_of,
        representatives: classes.iter().map(|c| c.0).collect(),
        sizes: classes.iter().map(|c| c.1).collect(),
    }
}
