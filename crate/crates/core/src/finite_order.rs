//! Finite-order graph automorphisms with growth rate one: the models `X_p`
//! (two vertices joined by `p` edges, rotated) and `X_{pq}` (the complete
//! bipartite graph `K_{p,q}`, rotated on both sides), their induced outer
//! automorphisms, the edge-inversion involution, and checks that the centre
//! is the only fixed point nearby.

use std::fmt;

use crate::displacement::fixed_point_polytope;
use crate::error::{Error, Result};
use crate::free_group::{AutoPair, Word};
use crate::graph::{
    all_forests, enumerate_blow_ups, isomorphisms, reduce_half_edges, Forest, Graph, GraphIso, HalfEdge,
};
use crate::marked::{CVPoint, MarkedGraph};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteOrderModel {
    pub name: String,
    /// The graph as built, possibly with valence-two vertices.
    pub raw_graph: Graph,
    pub raw_map: GraphIso,
    /// Centre of the model simplex (on the graph without valence-two
    /// vertices).
    pub point: CVPoint,
    pub graph_map: GraphIso,
    pub induced: AutoPair,
    pub order: usize,
}

impl FiniteOrderModel {
    /// The model for an arbitrary graph automorphism of a marked graph.
    pub fn from_graph_map(name: &str, marked: MarkedGraph, map: GraphIso) -> Result<FiniteOrderModel> {
        let induced = induced_automorphism(&marked, &map)?;
        Ok(FiniteOrderModel {
            name: name.to_string(),
            raw_graph: marked.graph().clone(),
            raw_map: map.clone(),
            order: map.order(),
            point: CVPoint::centre(&marked),
            graph_map: map,
            induced,
        })
    }

    pub fn marked(&self) -> &MarkedGraph {
        self.point.marked()
    }

    pub fn is_subdivided(&self) -> bool {
        self.raw_graph.is_subdivided()
    }
}

/// The automorphism induced by a graph automorphism `f`: generator loops are
/// pushed through `f` and brought back to the basepoint along the tree path
/// to `f(basepoint)`.
pub fn induced_automorphism(m: &MarkedGraph, f: &GraphIso) -> Result<AutoPair> {
    let g = m.graph();
    let base = m.basepoint();
    let paths = g.tree_paths(m.tree(), base);
    let pushed = |map: &GraphIso, gamma: &[HalfEdge], p: &[HalfEdge]| {
        let mut q: Vec<HalfEdge> = gamma.to_vec();
        q.extend(p.iter().map(|&h| map.map_half_edge(h)));
        q.extend(gamma.iter().rev().map(|h| h.reverse()));
        m.read_path(&reduce_half_edges(&q))
    };
    let gamma = &paths[f.vertex_map[base]];
    let images: Vec<Word> = m.forward_paths().iter().map(|p| pushed(f, gamma, p)).collect();
    let finv = f.inverse();
    let gamma_inv = &paths[finv.vertex_map[base]];
    let pre: Vec<Word> = m.forward_paths().iter().map(|p| pushed(&finv, gamma_inv, p)).collect();
    // f then f⁻¹ differs from the identity by conjugation by the loop
    // gamma · f(gamma_inv); undo it on the inverse side.
    let mut loop_path: Vec<HalfEdge> = gamma.clone();
    loop_path.extend(gamma_inv.iter().map(|&h| f.map_half_edge(h)));
    let u = m.read_path(&reduce_half_edges(&loop_path));
    let inv: Vec<Word> = (0..m.rank())
        .map(|i| substitute(&pre, &u.inverse().mul(&Word::generator(i)).mul(&u)))
        .collect();
    AutoPair::new(images, inv)
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// `X_p` for an odd prime `p`: edges `e_0..e_{p-1}` from `v_0` to `v_1`,
/// tree `{e_0}`, generators `g_i = e_i ē_0`, map `e_i ↦ e_{i+1}`.
pub fn build_xp(p: u64) -> Result<FiniteOrderModel> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidPrime(p));
    }
    let n = p as usize;
    let g = Graph::multi_theta(n);
    let tree = Forest::new(&g, &[0])?;
    let marked = MarkedGraph::from_tree(g, 0, tree)?;
    let map = GraphIso {
        vertex_map: vec![0, 1],
        edge_map: (0..n).map(|i| HalfEdge::forward((i + 1) % n)).collect(),
    };
    FiniteOrderModel::from_graph_map(&format!("X_{p}"), marked, map)
}

/// `X_{pq}` for primes `p < q`: vertices `v_i` (ids `0..p`) and `w_j` (ids
/// `p..p+q`), edges `e_{i,j}` from `v_i` to `w_j` with id `i·q + j`, map
/// `e_{i,j} ↦ e_{i+1,j+1}`. The tree is the star `{e_{0,j}} ∪ {e_{i,0}}`
/// and the basepoint is `v_0`.
///
/// For `p = 2` every `w_j` has valence two. The model point then lives on
/// the theta graph with edges `E_j = e_{0,j} ē_{1,j}` from `v_0` to `v_1`,
/// where the map reads `E_j ↦ Ē_{j+1}`; it is marked with tree `{E_0}` and
/// generators `E_j Ē_0`.
pub fn build_xpq(p: u64, q: u64) -> Result<FiniteOrderModel> {
    for x in [p, q] {
        if !is_prime(x) {
            return Err(Error::InvalidPrime(x));
        }
    }
    if p >= q {
        return Err(Error::InvalidGraph(format!("expected p < q, found p = {p}, q = {q}")));
    }
    let (pp, qq) = (p as usize, q as usize);
    let ends: Vec<(usize, usize)> = (0..pp).flat_map(|i| (0..qq).map(move |j| (i, pp + j))).collect();
    let raw_map = GraphIso {
        vertex_map: (0..pp)
            .map(|i| (i + 1) % pp)
            .chain((0..qq).map(|j| pp + (j + 1) % qq))
            .collect(),
        edge_map: (0..pp * qq)
            .map(|e| HalfEdge::forward(((e / qq + 1) % pp) * qq + (e % qq + 1) % qq))
            .collect(),
    };
    let name = format!("X_{{{p},{q}}}");
    if p == 2 {
        let raw_graph = Graph::new_subdivided(pp + qq, ends)?;
        let g = Graph::multi_theta(qq);
        let tree = Forest::new(&g, &[0])?;
        let marked = MarkedGraph::from_tree(g, 0, tree)?;
        let map = GraphIso {
            vertex_map: vec![1, 0],
            edge_map: (0..qq).map(|j| HalfEdge::backward((j + 1) % qq)).collect(),
        };
        let mut model = FiniteOrderModel::from_graph_map(&name, marked, map)?;
        model.raw_graph = raw_graph;
        model.raw_map = raw_map;
        return Ok(model);
    }
    let g = Graph::new(pp + qq, ends)?;
    let tree_edges: Vec<usize> = (0..qq).chain((1..pp).map(|i| i * qq)).collect();
    let tree = Forest::new(&g, &tree_edges)?;
    let marked = MarkedGraph::from_tree(g, 0, tree)?;
    FiniteOrderModel::from_graph_map(&name, marked, raw_map)
}

/// The automorphism induced by reversing every edge of the model graph.
/// Only defined when edge reversal is a graph map (the two-vertex models).
pub fn sigma(model: &FiniteOrderModel) -> Result<AutoPair> {
    let g = model.point.graph();
    let mut vertex_map = vec![usize::MAX; g.num_vertices()];
    for &(a, b) in g.ends() {
        for (x, y) in [(a, b), (b, a)] {
            if vertex_map[x] != usize::MAX && vertex_map[x] != y {
                return Err(Error::InvalidGraph("edge reversal is not a graph map".into()));
            }
            vertex_map[x] = y;
        }
    }
    let map = GraphIso {
        vertex_map,
        edge_map: (0..g.num_edges()).map(HalfEdge::backward).collect(),
    };
    induced_automorphism(model.marked(), &map)
}

/// Outcome of one simplex check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimplexCheck {
    pub step: u8,
    pub simplex: String,
    pub outcome: String,
    pub passed: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FixedPointReport {
    pub model: String,
    pub checks: Vec<SimplexCheck>,
}

impl FixedPointReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&SimplexCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

impl fmt::Display for FixedPointReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "[{}] step {} {}: {}",
                if c.passed { "ok" } else { "FAIL" },
                c.step,
                c.simplex,
                c.outcome
            )?;
        }
        write!(f, "{}: {}", self.model, if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Checks that the centre of the model simplex is the only fixed point in
/// the model simplex, its invariant cofaces and its faces:
/// 1. the fixed polytope of the model simplex is the centre alone;
/// 2. invariant cofaces have no fixed point in their interior (others
///    cannot contain one);
/// 3. no face has a fixed point in its interior.
pub fn verify_unique_fixed_point(model: &FiniteOrderModel) -> FixedPointReport {
    let phi = &model.induced;
    let marked = model.marked();
    let mut checks = Vec::new();

    let poly = fixed_point_polytope(marked, phi);
    let (passed, outcome) = if poly.is_empty() {
        (false, "no fixed point".to_string())
    } else if poly.is_single_point(model.point.lengths()) {
        (true, "fixed set is the centre alone".to_string())
    } else {
        (
            false,
            format!(
                "fixed set is larger than the centre (max min length {})",
                poly.max_min_length.as_ref().unwrap()
            ),
        )
    };
    checks.push(SimplexCheck {
        step: 1,
        simplex: "model".into(),
        outcome,
        passed,
    });

    for bu in enumerate_blow_ups(marked.graph()) {
        let up = marked.blow_up(&bu);
        let name = format!(
            "coface v{}:{}",
            bu.vertex,
            bu.moved.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(",")
        );
        if !up.act(phi).same_simplex(&up) {
            checks.push(SimplexCheck {
                step: 2,
                simplex: name,
                outcome: "not invariant".into(),
                passed: true,
            });
            continue;
        }
        let poly = fixed_point_polytope(&up, phi);
        let interior = poly.interior_nonempty();
        checks.push(SimplexCheck {
            step: 2,
            simplex: name,
            outcome: if interior {
                "interior fixed point".into()
            } else {
                "invariant, no interior fixed point".into()
            },
            passed: !interior,
        });
    }

    for forest in all_forests(marked.graph()) {
        let (face, _) = marked.collapse(&forest).expect("forest collapse");
        let poly = fixed_point_polytope(&face, phi);
        let interior = poly.interior_nonempty();
        let name = format!(
            "face /{}",
            forest
                .edges()
                .iter()
                .map(|e| format!("e{e}"))
                .collect::<Vec<_>>()
                .join(",")
        );
        checks.push(SimplexCheck {
            step: 3,
            simplex: name,
            outcome: if interior {
                "interior fixed point".into()
            } else if poly.is_empty() {
                "no fixed point".into()
            } else {
                "fixed points only on the boundary".into()
            },
            passed: !interior,
        });
    }

    FixedPointReport {
        model: model.name.clone(),
        checks,
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IsometryReport {
    /// Isometries of the model point inducing the model automorphism.
    pub count: usize,
    pub representative: Option<GraphIso>,
    pub matches_model_map: bool,
}

/// Counts the isometries of the model point that induce `model.induced` up
/// to inner automorphisms.
pub fn unique_isometry_representative(model: &FiniteOrderModel) -> Result<IsometryReport> {
    let lengths = model.point.lengths();
    let mut matching = Vec::new();
    for iso in isomorphisms(model.point.graph(), model.point.graph(), Some((lengths, lengths))) {
        if induced_automorphism(model.marked(), &iso)?.outer_equal(&model.induced) {
            matching.push(iso);
        }
    }
    let representative = (matching.len() == 1).then(|| matching[0].clone());
    Ok(IsometryReport {
        count: matching.len(),
        matches_model_map: representative.as_ref() == Some(&model.graph_map),
        representative,
    })
}

/// `phi^k` for `k = order` is inner.
pub fn has_finite_order(phi: &AutoPair, order: usize) -> bool {
    phi.power(order as i64).is_inner().is_some()
}

/// `phi` is the identity outer automorphism.
pub fn is_outer_identity(phi: &AutoPair) -> bool {
    phi.outer_equal(&AutoPair::identity(phi.rank()))
}

/// The word obtained by replacing each generator `x_i` with `images[i]`.
fn substitute(images: &[Word], w: &Word) -> Word {
    let mut out = Word::empty();
    for l in w.letters() {
        let img = &images[l.index()];
        out = out.mul(&if l.is_inverse() { img.inverse() } else { img.clone() });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::displacement::displacement_at;
    use crate::rational::{int, rat};

    fn w(s: &str) -> Word {
        Word::parse(s, 4).unwrap()
    }

    #[test]
    fn x3_matches_formula() {
        let m = build_xp(3).unwrap();
        assert_eq!(m.induced.images(), &[w("bA"), w("A")]);
        assert_eq!(m.order, 3);
        assert_eq!(m.induced.power(3), AutoPair::identity(2));
        assert!(m.point.act(&m.induced).marked_graph_equal(&m.point));
        assert_eq!(m.point.lengths(), &[rat(1, 3), rat(1, 3), rat(1, 3)]);
    }

    #[test]
    fn x5_has_rank_four_and_order_five() {
        let m = build_xp(5).unwrap();
        assert_eq!(m.induced.rank(), 4);
        assert_eq!(m.order, 5);
        assert_eq!(m.induced.power(5), AutoPair::identity(4));
        assert!(!is_outer_identity(&m.induced.power(2)));
    }

    #[test]
    fn bad_primes() {
        assert!(build_xp(2).is_err());
        assert!(build_xp(9).is_err());
        assert!(build_xpq(3, 2).is_err());
        assert!(build_xpq(2, 4).is_err());
    }

    #[test]
    fn x23_shape() {
        let m = build_xpq(2, 3).unwrap();
        assert_eq!(m.raw_graph.num_vertices(), 5);
        assert_eq!(m.raw_graph.num_edges(), 6);
        assert_eq!(m.raw_graph.rank(), 2);
        assert_eq!(m.raw_map.order(), 6);
        assert_eq!(m.order, 6);
        assert!(m.is_subdivided());
        assert!(m.point.act(&m.induced).marked_graph_equal(&m.point));
        assert!(has_finite_order(&m.induced, 6));
        assert!(!has_finite_order(&m.induced, 3));
        assert!(!has_finite_order(&m.induced, 2));
    }

    #[test]
    fn x35_is_fixed() {
        let m = build_xpq(3, 5).unwrap();
        assert_eq!(m.marked().rank(), 8);
        assert_eq!(m.order, 15);
        assert!(m.point.act(&m.induced).marked_graph_equal(&m.point));
        assert!(sigma(&m).is_err());
    }

    #[test]
    fn sigma_on_x3() {
        let m = build_xp(3).unwrap();
        let s = sigma(&m).unwrap();
        assert_eq!(s.images(), &[w("A"), w("B")]);
        assert_eq!(s.power(2), AutoPair::identity(2));
        assert!(m.point.act(&s).marked_graph_equal(&m.point));
        assert!(s.compose(&m.induced).outer_equal(&m.induced.compose(&s)));
    }

    #[test]
    fn unique_fixed_points() {
        for m in [build_xp(3).unwrap(), build_xpq(2, 3).unwrap()] {
            let r = verify_unique_fixed_point(&m);
            assert!(r.passed(), "{r}");
            assert_eq!(displacement_at(&m.point, &m.induced).unwrap(), int(1));
            let iso = unique_isometry_representative(&m).unwrap();
            assert_eq!(iso.count, 1);
            assert!(iso.matches_model_map);
        }
    }

    #[test]
    fn identity_on_theta_fails_step_one() {
        let m = build_xp(3).unwrap();
        let id = FiniteOrderModel::from_graph_map("identity", m.marked().clone(), GraphIso::identity(m.point.graph()))
            .unwrap();
        assert!(is_outer_identity(&id.induced));
        let r = verify_unique_fixed_point(&id);
        assert_eq!(r.first_failure().unwrap().step, 1);
        // the action of theta isometries on the outer automorphism group is
        // faithful, so only the identity map induces the identity
        assert_eq!(unique_isometry_representative(&id).unwrap().count, 1);
    }
}
