//! Plain-text documents holding named marked graphs, points and
//! automorphisms.
//!
//! ```text
//! # comments run to the end of the line
//! graph theta
//!   vertices 2
//!   edge 0 1          # e0, edges are numbered in order
//!   edge 0 1          # e1
//!   edge 0 1          # e2
//!   basepoint 0
//!   tree e0
//!   fwd e1 E0         # loop for generator a
//!   fwd e2 E0         # loop for generator b
//!   bwd e1 a          # word of each non-tree edge
//!   bwd e2 b
//! end
//!
//! point x
//!   simplex theta     # a graph above or a built-in name
//!   act golden        # optional, repeatable
//!   lengths 1/2 1/4 1/4
//! end
//!
//! auto golden
//!   rank 2
//!   a -> b
//!   b -> ab
//!   inv a -> bA
//!   inv b -> a
//! end
//! ```
//!
//! A graph block without `fwd`/`bwd` lines gets the marking in which the
//! non-tree edges, in order, are the generators. `lengths centre` gives the
//! centre of the simplex. Half-edges are written `e3` (forward) and `E3`
//! (backward).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::free_group::{AutoPair, Word};
use crate::graph::{Forest, Graph, HalfEdge};
use crate::marked::{CVPoint, MarkedGraph};
use crate::rational::{fmt_rational, parse_rational, Rational};
use crate::samples::{builtin_auto, builtin_simplex};

#[derive(Clone, Default, Debug)]
pub struct Workspace {
    pub graphs: BTreeMap<String, MarkedGraph>,
    pub points: BTreeMap<String, CVPoint>,
    pub autos: BTreeMap<String, AutoPair>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn at_line<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { message, .. } => err(line, message),
        other => err(line, other.to_string()),
    })
}

impl Workspace {
    pub fn parse(text: &str) -> Result<Workspace> {
        let mut ws = Workspace::default();
        let lines: Vec<(usize, Vec<&str>)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| {
                (
                    i + 1,
                    l.split('#').next().unwrap().split_whitespace().collect::<Vec<_>>(),
                )
            })
            .filter(|(_, t)| !t.is_empty())
            .collect();
        let mut k = 0;
        while k < lines.len() {
            let (line, ref head) = lines[k];
            if head.len() != 2 {
                return Err(err(line, "expected a block header `graph|point|auto NAME`"));
            }
            let end = (k + 1..lines.len())
                .find(|&j| lines[j].1 == ["end"])
                .ok_or_else(|| err(line, format!("block `{}` has no `end`", head[1])))?;
            let body = &lines[k + 1..end];
            let name = head[1].to_string();
            let taken = ws.graphs.contains_key(&name) || ws.points.contains_key(&name) || ws.autos.contains_key(&name);
            if taken {
                return Err(err(line, format!("name `{name}` defined twice")));
            }
            match head[0] {
                "graph" => {
                    let g = parse_graph(line, body)?;
                    ws.graphs.insert(name, g);
                }
                "point" => {
                    let p = ws.parse_point(line, body)?;
                    ws.points.insert(name, p);
                }
                "auto" => {
                    let a = parse_auto(line, body)?;
                    ws.autos.insert(name, a);
                }
                other => return Err(err(line, format!("unknown block kind `{other}`"))),
            }
            k = end + 1;
        }
        Ok(ws)
    }

    /// A graph from this workspace, else a built-in.
    pub fn graph(&self, name: &str) -> Option<MarkedGraph> {
        self.graphs.get(name).cloned().or_else(|| builtin_simplex(name))
    }

    /// An automorphism from this workspace, else a built-in.
    pub fn auto(&self, name: &str) -> Option<AutoPair> {
        self.autos.get(name).cloned().or_else(|| builtin_auto(name))
    }

    pub fn point(&self, name: &str) -> Option<CVPoint> {
        self.points.get(name).cloned()
    }

    fn parse_point(&self, header: usize, body: &[(usize, Vec<&str>)]) -> Result<CVPoint> {
        let mut simplex: Option<MarkedGraph> = None;
        let mut lengths: Option<(usize, Vec<&str>)> = None;
        for (line, t) in body {
            match t[0] {
                "simplex" if t.len() == 2 => {
                    simplex = Some(
                        self.graph(t[1])
                            .ok_or_else(|| err(*line, format!("unknown graph `{}`", t[1])))?,
                    );
                }
                "act" if t.len() == 2 => {
                    let m = simplex.as_ref().ok_or_else(|| err(*line, "`act` before `simplex`"))?;
                    let phi = self
                        .auto(t[1])
                        .ok_or_else(|| err(*line, format!("unknown automorphism `{}`", t[1])))?;
                    if phi.rank() != m.rank() {
                        return Err(err(
                            *line,
                            format!("rank {} automorphism on rank {} graph", phi.rank(), m.rank()),
                        ));
                    }
                    simplex = Some(m.act(&phi));
                }
                "lengths" => lengths = Some((*line, t[1..].to_vec())),
                _ => return Err(err(*line, format!("unexpected `{}` in point block", t.join(" ")))),
            }
        }
        let m = simplex.ok_or_else(|| err(header, "point block needs `simplex`"))?;
        let (line, values) = lengths.ok_or_else(|| err(header, "point block needs `lengths`"))?;
        if values == ["centre"] {
            return Ok(CVPoint::centre(&m));
        }
        let ls = values
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| err(line, format!("bad length `{s}`"))))
            .collect::<Result<Vec<Rational>>>()?;
        at_line(line, CVPoint::new(m, ls))
    }
}

fn parse_usize(line: usize, s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| err(line, format!("expected a number, found `{s}`")))
}

fn parse_half_edge(line: usize, s: &str, num_edges: usize) -> Result<HalfEdge> {
    let rev = s.starts_with('E');
    let id = s
        .strip_prefix(['e', 'E'])
        .and_then(|r| r.parse::<usize>().ok())
        .ok_or_else(|| err(line, format!("expected a half-edge like e3 or E3, found `{s}`")))?;
    if id >= num_edges {
        return Err(err(line, format!("edge {id} out of range")));
    }
    Ok(HalfEdge::new(id, rev))
}

fn parse_graph(header: usize, body: &[(usize, Vec<&str>)]) -> Result<MarkedGraph> {
    let mut vertices = None;
    let mut ends = Vec::new();
    let mut basepoint = 0;
    let mut tree: Option<(usize, Vec<&str>)> = None;
    let mut fwd_lines = Vec::new();
    let mut bwd_lines = Vec::new();
    for (line, t) in body {
        let line = *line;
        match t[0] {
            "vertices" if t.len() == 2 => vertices = Some(parse_usize(line, t[1])?),
            "edge" if t.len() == 3 => ends.push((parse_usize(line, t[1])?, parse_usize(line, t[2])?)),
            "basepoint" if t.len() == 2 => basepoint = parse_usize(line, t[1])?,
            "tree" => tree = Some((line, t[1..].to_vec())),
            "fwd" => fwd_lines.push((line, t[1..].to_vec())),
            "bwd" if t.len() >= 2 => bwd_lines.push((line, t[1..].to_vec())),
            _ => return Err(err(line, format!("unexpected `{}` in graph block", t.join(" ")))),
        }
    }
    let vertices = vertices.ok_or_else(|| err(header, "graph block needs `vertices`"))?;
    let g = at_line(header, Graph::new(vertices, ends))?;
    let n = g.num_edges();
    let tree = match tree {
        Some((line, ids)) => {
            let edges = ids
                .iter()
                .map(|s| parse_half_edge(line, s, n).map(|h| h.edge()))
                .collect::<Result<Vec<_>>>()?;
            at_line(line, Forest::new(&g, &edges))?
        }
        None => g.spanning_tree(),
    };
    if fwd_lines.is_empty() && bwd_lines.is_empty() {
        return at_line(header, MarkedGraph::from_tree(g, basepoint, tree));
    }
    let rank = g.rank();
    let fwd = fwd_lines
        .iter()
        .map(|(line, hs)| {
            hs.iter()
                .map(|s| parse_half_edge(*line, s, n))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut bwd = vec![Word::empty(); n];
    for (line, t) in &bwd_lines {
        let h = parse_half_edge(*line, t[0], n)?;
        let w = at_line(*line, Word::parse(&t[1..].join(" "), rank))?;
        bwd[h.edge()] = if h.is_reversed() { w.inverse() } else { w };
    }
    at_line(header, MarkedGraph::new(g, basepoint, fwd, tree, bwd))
}

fn parse_auto(header: usize, body: &[(usize, Vec<&str>)]) -> Result<AutoPair> {
    let mut rank = None;
    let mut fwd: BTreeMap<usize, (usize, String)> = BTreeMap::new();
    let mut inv: BTreeMap<usize, (usize, String)> = BTreeMap::new();
    for (line, t) in body {
        let line = *line;
        if t[0] == "rank" && t.len() == 2 {
            rank = Some(parse_usize(line, t[1])?);
            continue;
        }
        let (target, rest) = if t[0] == "inv" {
            (&mut inv, &t[1..])
        } else {
            (&mut fwd, &t[..])
        };
        if rest.len() < 2 || rest[1] != "->" {
            return Err(err(line, format!("expected `x -> word`, found `{}`", t.join(" "))));
        }
        let gen = Word::parse(rest[0], usize::MAX >> 1)
            .ok()
            .filter(|w| w.len() == 1 && !w.letters()[0].is_inverse())
            .ok_or_else(|| err(line, format!("`{}` is not a generator", rest[0])))?;
        let image = rest[2..].join(" ");
        if target.insert(gen.letters()[0].index(), (line, image)).is_some() {
            return Err(err(line, format!("generator `{}` given twice", rest[0])));
        }
    }
    let rank = rank.ok_or_else(|| err(header, "auto block needs `rank`"))?;
    let words = |m: &BTreeMap<usize, (usize, String)>, what: &str| -> Result<Vec<Word>> {
        (0..rank)
            .map(|i| {
                let (line, s) = m.get(&i).ok_or_else(|| {
                    err(
                        header,
                        format!("missing {what} image of generator {}", Word::generator(i)),
                    )
                })?;
                at_line(*line, Word::parse(s, rank))
            })
            .collect()
    };
    let f = words(&fwd, "forward")?;
    let i = words(&inv, "inverse")?;
    if fwd.keys().chain(inv.keys()).any(|&g| g >= rank) {
        return Err(err(header, "generator beyond the declared rank"));
    }
    at_line(header, AutoPair::new(f, i))
}

/// Text block for a marked graph.
pub fn format_graph(name: &str, m: &MarkedGraph) -> String {
    let g = m.graph();
    let mut s = format!("graph {name}\n  vertices {}\n", g.num_vertices());
    for &(a, b) in g.ends() {
        let _ = writeln!(s, "  edge {a} {b}");
    }
    let _ = writeln!(s, "  basepoint {}", m.basepoint());
    let tree: Vec<String> = m.tree().edges().iter().map(|e| format!("e{e}")).collect();
    let _ = writeln!(s, "  tree {}", tree.join(" "));
    for p in m.forward_paths() {
        let hs: Vec<String> = p.iter().map(|h| h.to_string()).collect();
        let _ = writeln!(s, "  fwd {}", hs.join(" "));
    }
    for (e, w) in m.edge_words().iter().enumerate() {
        if !m.tree().contains(e) {
            let _ = writeln!(s, "  bwd e{e} {w}");
        }
    }
    s.push_str("end\n");
    s
}

/// Text block for a point whose graph is written under `graph_name`.
pub fn format_point(name: &str, graph_name: &str, x: &CVPoint) -> String {
    let ls: Vec<String> = x.lengths().iter().map(fmt_rational).collect();
    format!(
        "point {name}\n  simplex {graph_name}\n  lengths {}\nend\n",
        ls.join(" ")
    )
}

/// Text block for an automorphism.
pub fn format_auto(name: &str, phi: &AutoPair) -> String {
    let mut s = format!("auto {name}\n  rank {}\n", phi.rank());
    for (i, w) in phi.images().iter().enumerate() {
        let _ = writeln!(s, "  {} -> {w}", Word::generator(i));
    }
    for (i, w) in phi.inverse_images().iter().enumerate() {
        let _ = writeln!(s, "  inv {} -> {w}", Word::generator(i));
    }
    s.push_str("end\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::samples::{golden, theta};

    const DOC: &str = "\
# two roses
point x
  simplex rose2
  lengths 1/2 1/2
end
point y
  simplex rose2
  lengths 3/5 2/5
end
graph th
  vertices 2
  edge 0 1
  edge 0 1
  edge 0 1
  tree e0
end
point z
  simplex th
  act golden
  lengths centre
end
auto g
  rank 2
  a -> b
  b -> ab
  inv a -> bA
  inv b -> a
end
";

    #[test]
    fn parses_document() {
        let ws = Workspace::parse(DOC).unwrap();
        assert_eq!(ws.point("y").unwrap().lengths(), &[rat(3, 5), rat(2, 5)]);
        assert_eq!(ws.graphs["th"], theta());
        assert_eq!(ws.autos["g"], golden());
        assert_eq!(ws.point("z").unwrap().marked(), &theta().act(&golden()));
    }

    #[test]
    fn round_trip() {
        let m = theta().act(&golden());
        let x = CVPoint::new(m.clone(), vec![rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap();
        let doc = format!(
            "{}{}{}",
            format_graph("m", &m),
            format_point("x", "m", &x),
            format_auto("phi", &golden())
        );
        let ws = Workspace::parse(&doc).unwrap();
        assert_eq!(ws.graphs["m"], m);
        assert_eq!(ws.points["x"], x);
        assert_eq!(ws.autos["phi"], golden());
    }

    fn line_of(text: &str) -> usize {
        match Workspace::parse(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_lines() {
        assert_eq!(line_of("point x\n  simplex rose2\n  lengths 1/2 1/3\nend\n"), 3);
        assert_eq!(line_of("\n\npoint x\n  simplex rose9x\n"), 3);
        assert_eq!(line_of("point x\n  simplex nope\n  lengths 1\nend\n"), 2);
        assert_eq!(
            line_of("auto a\n  rank 2\n  a -> b\n  b -> b\n  inv a -> b\n  inv b -> a\nend\n"),
            1
        );
        assert_eq!(
            line_of("graph g\n  vertices 1\n  edge 0 0\n  fwd e0\n  bwd e0 q\nend\n"),
            5
        );
    }
}
