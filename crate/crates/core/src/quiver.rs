//! Finite quivers, the flow partial order, and the standard families:
//! type A with arbitrary orientation, grid quivers, and ladder quivers.
//!
//! Vertex ids are opaque strings with canonical naming per family so that
//! JSON payloads round-trip and reports stay human readable: type A uses
//! `x0..xl`, grids use `x_(i1,...,id)` and ladders use `x0+..xl+, x0-..xl-`.

use crate::error::{Error, Limits, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

pub type VertexSet = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub src: String,
    pub tgt: String,
    pub label: String,
}

/// A finite directed multigraph. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    edges: Vec<(usize, usize, String)>,
    index: BTreeMap<String, usize>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, edges: Vec<EdgeSpec>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate vertex id '{v}'")));
            }
        }
        let mut es = Vec::with_capacity(edges.len());
        for e in edges {
            let src = *index
                .get(&e.src)
                .ok_or_else(|| Error::Input(format!("edge source '{}' is not a vertex", e.src)))?;
            let tgt = *index
                .get(&e.tgt)
                .ok_or_else(|| Error::Input(format!("edge target '{}' is not a vertex", e.tgt)))?;
            es.push((src, tgt, e.label));
        }
        Ok(Quiver { vertices, edges: es, index })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Edges as `(source, target, label)` index triples.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &str)> {
        self.edges.iter().map(|(s, t, l)| (*s, *t, l.as_str()))
    }

    pub fn edge(&self, i: usize) -> (usize, usize, &str) {
        let (s, t, ref l) = self.edges[i];
        (s, t, l)
    }

    pub fn edge_label_index(&self, label: &str) -> Option<usize> {
        self.edges.iter().position(|(_, _, l)| l == label)
    }

    /// Topological order of the vertices, or an error on a cyclic quiver.
    pub fn topo_order(&self) -> Result<Vec<usize>> {
        let n = self.vertex_count();
        let mut indeg = vec![0usize; n];
        for &(_, t, _) in &self.edges {
            indeg[t] += 1;
        }
        let mut queue: VecDeque<usize> =
            (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(s, t, _) in &self.edges {
                if s == v {
                    indeg[t] -= 1;
                    if indeg[t] == 0 {
                        queue.push_back(t);
                    }
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(Error::Unsupported("quiver is cyclic".into()))
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.topo_order().is_ok()
    }

    /// Reachability closure: `reach[x]` contains every `y` with `x <= y` in
    /// the flow order (including `x` itself).
    pub fn reachability(&self) -> Result<Vec<Vec<bool>>> {
        let order = self.topo_order()?;
        let n = self.vertex_count();
        let mut reach = vec![vec![false; n]; n];
        for &v in order.iter().rev() {
            reach[v][v] = true;
            for &(s, t, _) in &self.edges {
                if s == v {
                    let (row_t, row_v) = if t > v {
                        let (a, b) = reach.split_at_mut(t);
                        (&b[0], &mut a[v])
                    } else {
                        let (a, b) = reach.split_at_mut(v);
                        (&a[t], &mut b[0])
                    };
                    for y in 0..n {
                        if row_t[y] {
                            row_v[y] = true;
                        }
                    }
                }
            }
        }
        Ok(reach)
    }

    /// `x <= y` in the flow partial order: `x == y` or a path `x -> y` exists.
    pub fn flow_leq(&self, x: usize, y: usize) -> Result<bool> {
        if !self.is_acyclic() {
            return Err(Error::Unsupported("flow order needs an acyclic quiver".into()));
        }
        if x == y {
            return Ok(true);
        }
        // BFS from x.
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([x]);
        seen[x] = true;
        while let Some(v) = queue.pop_front() {
            for &(s, t, _) in &self.edges {
                if s == v && !seen[t] {
                    if t == y {
                        return Ok(true);
                    }
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        Ok(false)
    }

    /// Smallest up-closed subset containing `set`.
    pub fn up_closure(&self, set: &VertexSet) -> VertexSet {
        let mut out = set.clone();
        let mut queue: VecDeque<usize> = set.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            for &(s, t, _) in &self.edges {
                if s == v && out.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        out
    }

    /// All up-closed subsets (filters of the flow order), enumerated by a
    /// DFS over membership choices in reverse topological order. Exponential
    /// blowup fails loudly through the vertex-count guard.
    pub fn enumerate_up_closed(&self, limits: &Limits) -> Result<Vec<VertexSet>> {
        if self.vertex_count() > limits.max_up_closed_vertices {
            return Err(Error::SizeGuard(format!(
                "{} vertices exceeds the up-closed enumeration bound {}",
                self.vertex_count(),
                limits.max_up_closed_vertices
            )));
        }
        let order = self.topo_order()?;
        let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); self.vertex_count()];
        for &(s, t, _) in &self.edges {
            out_edges[s].push(t);
        }
        let mut results = Vec::new();
        let mut member = vec![false; self.vertex_count()];
        // Decide membership target-before-source: traverse reversed topo order.
        fn dfs(
            pos: usize,
            order: &[usize],
            out_edges: &[Vec<usize>],
            member: &mut Vec<bool>,
            results: &mut Vec<VertexSet>,
        ) {
            if pos == order.len() {
                results.push(
                    member
                        .iter()
                        .enumerate()
                        .filter_map(|(i, &m)| m.then_some(i))
                        .collect(),
                );
                return;
            }
            let v = order[order.len() - 1 - pos];
            member[v] = false;
            dfs(pos + 1, order, out_edges, member, results);
            if out_edges[v].iter().all(|&t| member[t]) {
                member[v] = true;
                dfs(pos + 1, order, out_edges, member, results);
                member[v] = false;
            }
        }
        dfs(0, &order, &out_edges, &mut member, &mut results);
        results.sort();
        Ok(results)
    }

    pub fn vertex_set_from_names(&self, names: &[&str]) -> Result<VertexSet> {
        names
            .iter()
            .map(|n| {
                self.vertex_index(n)
                    .ok_or_else(|| Error::Input(format!("unknown vertex '{n}'")))
            })
            .collect()
    }
}

/// Up-closed subsets of `support` relative to the given relation edges
/// (pairs `(s, t)` meaning `s <= t`), all of which must join support
/// vertices. The induced subgraph must be acyclic.
pub(crate) fn up_closed_subsets_within(
    support: &VertexSet,
    edges: &[(usize, usize)],
) -> Vec<VertexSet> {
    let verts: Vec<usize> = support.iter().copied().collect();
    let order = topo_of(&verts, edges);
    let mut out = Vec::new();
    let mut member: BTreeMap<usize, bool> = verts.iter().map(|&v| (v, false)).collect();
    fn dfs(
        pos: usize,
        order: &[usize],
        edges: &[(usize, usize)],
        member: &mut BTreeMap<usize, bool>,
        out: &mut Vec<VertexSet>,
    ) {
        if pos == order.len() {
            out.push(member.iter().filter_map(|(&v, &m)| m.then_some(v)).collect());
            return;
        }
        let v = order[order.len() - 1 - pos];
        member.insert(v, false);
        dfs(pos + 1, order, edges, member, out);
        if edges.iter().all(|&(s, t)| s != v || member[&t]) {
            member.insert(v, true);
            dfs(pos + 1, order, edges, member, out);
            member.insert(v, false);
        }
    }
    dfs(0, &order, edges, &mut member, &mut out);
    out.sort();
    out
}

fn topo_of(verts: &[usize], edges: &[(usize, usize)]) -> Vec<usize> {
    let mut indeg: BTreeMap<usize, usize> = verts.iter().map(|&v| (v, 0)).collect();
    for &(_, t) in edges {
        *indeg.get_mut(&t).unwrap() += 1;
    }
    let mut queue: Vec<usize> = verts.iter().copied().filter(|v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(verts.len());
    while let Some(v) = queue.pop() {
        order.push(v);
        for &(s, t) in edges {
            if s == v {
                let d = indeg.get_mut(&t).unwrap();
                *d -= 1;
                if *d == 0 {
                    queue.push(t);
                }
            }
        }
    }
    debug_assert_eq!(order.len(), verts.len(), "relation subgraph must be acyclic");
    order
}

impl Serialize for Quiver {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            vertices: &'a [String],
            edges: Vec<EdgeSpec>,
        }
        let edges = self
            .edges
            .iter()
            .map(|(s, t, l)| EdgeSpec {
                src: self.vertices[*s].clone(),
                tgt: self.vertices[*t].clone(),
                label: l.clone(),
            })
            .collect();
        Repr { vertices: &self.vertices, edges }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Quiver {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            vertices: Vec<String>,
            edges: Vec<EdgeSpec>,
        }
        let r = Repr::deserialize(de)?;
        Quiver::new(r.vertices, r.edges).map_err(serde::de::Error::custom)
    }
}

/// Orientation of a type A quiver: bit `i` (1-indexed in the classical
/// convention) set means edge `e_i` points forward `x_{i-1} -> x_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation(Vec<bool>);

impl Orientation {
    pub fn new(bits: Vec<bool>) -> Self {
        Orientation(bits)
    }

    pub fn equioriented(len: usize) -> Self {
        Orientation(vec![true; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `true` when edge `e_i` (1-indexed) points forward.
    pub fn forward(&self, i: usize) -> bool {
        self.0[i - 1]
    }

    pub fn is_equioriented(&self) -> bool {
        self.0.iter().all(|&b| b)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }
}

impl FromStr for Orientation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse { pos: i, msg: "orientation bits must be 0 or 1".into() }),
            })
            .collect::<Result<Vec<bool>>>()
            .map(Orientation)
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Type A quiver with `l+1` vertices `x0..xl` and `l` edges oriented by `tau`.
pub fn build_type_a(tau: &Orientation) -> Quiver {
    let l = tau.len();
    let vertices: Vec<String> = (0..=l).map(|i| format!("x{i}")).collect();
    let edges = (1..=l)
        .map(|i| {
            let (src, tgt) = if tau.forward(i) { (i - 1, i) } else { (i, i - 1) };
            EdgeSpec {
                src: vertices[src].clone(),
                tgt: vertices[tgt].clone(),
                label: format!("e{i}"),
            }
        })
        .collect();
    Quiver::new(vertices, edges).expect("type A construction is well formed")
}

pub fn grid_vertex_count(shape: &[usize]) -> usize {
    shape.iter().map(|&l| l + 1).product()
}

pub fn grid_vertex_name(coords: &[usize]) -> String {
    let inner: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
    format!("x_({})", inner.join(","))
}

/// Row-major index of a grid point, first axis fastest.
pub fn grid_index(shape: &[usize], coords: &[usize]) -> usize {
    let mut idx = 0;
    let mut stride = 1;
    for (c, l) in coords.iter().zip(shape) {
        idx += c * stride;
        stride *= l + 1;
    }
    idx
}

pub fn grid_coords(shape: &[usize], mut idx: usize) -> Vec<usize> {
    let mut coords = Vec::with_capacity(shape.len());
    for &l in shape {
        coords.push(idx % (l + 1));
        idx /= l + 1;
    }
    coords
}

/// Grid quiver of the given shape: vertices indexed by the integer box
/// `prod [0, l_i]`, one edge `x_p -> x_q` whenever `q - p` is a standard
/// basis vector.
pub fn build_grid(shape: &[usize]) -> Result<Quiver> {
    if shape.is_empty() {
        return Err(Error::Input("grid shape must have at least one axis".into()));
    }
    if shape.iter().any(|&l| l < 1) {
        return Err(Error::Input("grid shape entries must be >= 1".into()));
    }
    let n = grid_vertex_count(shape);
    let vertices: Vec<String> = (0..n)
        .map(|i| grid_vertex_name(&grid_coords(shape, i)))
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        let coords = grid_coords(shape, i);
        for axis in 0..shape.len() {
            if coords[axis] < shape[axis] {
                let mut next = coords.clone();
                next[axis] += 1;
                edges.push(EdgeSpec {
                    src: vertices[i].clone(),
                    tgt: vertices[grid_index(shape, &next)].clone(),
                    label: format!("e_{}^{}", grid_vertex_name(&coords), axis),
                });
            }
        }
    }
    Quiver::new(vertices, edges)
}

/// Index of `x_i^+` in the canonical ladder vertex order.
pub fn ladder_plus(i: usize) -> usize {
    i
}

/// Index of `x_i^-` in the canonical ladder vertex order.
pub fn ladder_minus(len: usize, i: usize) -> usize {
    len + 1 + i
}

/// Ladder quiver of length `l >= 1`: two equioriented rows `x_i^+`, `x_i^-`
/// of length `l` with vertical edges `x_i^+ -> x_i^-`.
pub fn build_ladder(len: usize) -> Result<Quiver> {
    if len < 1 {
        return Err(Error::Input("ladder length must be >= 1".into()));
    }
    let mut vertices: Vec<String> = (0..=len).map(|i| format!("x{i}+")).collect();
    vertices.extend((0..=len).map(|i| format!("x{i}-")));
    let mut edges = Vec::new();
    for i in 1..=len {
        edges.push(EdgeSpec {
            src: format!("x{}+", i - 1),
            tgt: format!("x{i}+"),
            label: format!("e{i}+"),
        });
    }
    for i in 1..=len {
        edges.push(EdgeSpec {
            src: format!("x{}-", i - 1),
            tgt: format!("x{i}-"),
            label: format!("e{i}-"),
        });
    }
    for i in 0..=len {
        edges.push(EdgeSpec { src: format!("x{i}+"), tgt: format!("x{i}-"), label: format!("e{i}") });
    }
    Quiver::new(vertices, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_a_100_orientation() {
        // tau = 100: x0 -> x1, x2 -> x1, x3 -> x2.
        let q = build_type_a(&"100".parse().unwrap());
        assert_eq!(q.vertex_count(), 4);
        let got: Vec<(usize, usize)> = q.edges().map(|(s, t, _)| (s, t)).collect();
        assert_eq!(got, vec![(0, 1), (2, 1), (3, 2)]);
    }

    #[test]
    fn type_a_equioriented_chain() {
        let q = build_type_a(&Orientation::equioriented(3));
        let got: Vec<(usize, usize)> = q.edges().map(|(s, t, _)| (s, t)).collect();
        assert_eq!(got, vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn type_a_empty_orientation() {
        let q = build_type_a(&Orientation::new(vec![]));
        assert_eq!(q.vertex_count(), 1);
        assert_eq!(q.edge_count(), 0);
    }

    #[test]
    fn grid_square() {
        let q = build_grid(&[1, 1]).unwrap();
        assert_eq!(q.vertex_count(), 4);
        assert_eq!(q.edge_count(), 4);
        assert!(q.is_acyclic());
    }

    #[test]
    fn grid_ladder_shape_and_path() {
        let q = build_grid(&[3, 1]).unwrap();
        assert_eq!(q.vertex_count(), 8);
        let p = build_grid(&[2]).unwrap();
        assert_eq!(p.vertex_count(), 3);
        assert_eq!(p.edge_count(), 2);
        assert!(build_grid(&[0]).is_err());
    }

    #[test]
    fn ladder_counts() {
        let q = build_ladder(3).unwrap();
        assert_eq!(q.vertex_count(), 8);
        assert_eq!(q.edge_count(), 2 * 3 + 4);
        assert!(build_ladder(0).is_err());
        let q1 = build_ladder(1).unwrap();
        assert_eq!(q1.vertex_index("x0+"), Some(ladder_plus(0)));
        assert_eq!(q1.vertex_index("x0-"), Some(ladder_minus(1, 0)));
        // Verticals point from the + row to the - row.
        assert!(q1.flow_leq(ladder_plus(0), ladder_minus(1, 0)).unwrap());
        assert!(!q1.flow_leq(ladder_minus(1, 0), ladder_plus(0)).unwrap());
    }

    #[test]
    fn flow_order_on_grid() {
        let q = build_grid(&[1, 1]).unwrap();
        let bl = grid_index(&[1, 1], &[0, 0]);
        let br = grid_index(&[1, 1], &[1, 0]);
        let tl = grid_index(&[1, 1], &[0, 1]);
        let tr = grid_index(&[1, 1], &[1, 1]);
        assert!(q.flow_leq(bl, tr).unwrap());
        assert!(!q.flow_leq(br, tl).unwrap());
        assert!(q.flow_leq(br, br).unwrap());
    }

    #[test]
    fn up_closure_examples() {
        let q = build_grid(&[1, 1]).unwrap();
        let bl: VertexSet = [grid_index(&[1, 1], &[0, 0])].into();
        assert_eq!(q.up_closure(&bl).len(), 4);
        assert!(q.up_closure(&VertexSet::new()).is_empty());
        let br: VertexSet = [grid_index(&[1, 1], &[1, 0])].into();
        let closed = q.up_closure(&br);
        assert_eq!(closed.len(), 2);
        assert!(closed.contains(&grid_index(&[1, 1], &[1, 1])));
    }

    #[test]
    fn enumerate_up_closed_counts() {
        let limits = Limits::default();
        let a1 = build_type_a(&"1".parse().unwrap());
        let sets = a1.enumerate_up_closed(&limits).unwrap();
        assert_eq!(sets.len(), 3);
        let grid = build_grid(&[1, 1]).unwrap();
        assert_eq!(grid.enumerate_up_closed(&limits).unwrap().len(), 6);
        let single = build_type_a(&Orientation::new(vec![]));
        assert_eq!(single.enumerate_up_closed(&limits).unwrap().len(), 2);
    }

    #[test]
    fn up_closed_guard() {
        let q = build_grid(&[4, 4]).unwrap();
        let limits = Limits { max_up_closed_vertices: 10, ..Limits::default() };
        assert!(matches!(q.enumerate_up_closed(&limits), Err(Error::SizeGuard(_))));
    }

    #[test]
    fn quiver_json_roundtrip() {
        let q = build_ladder(2).unwrap();
        let text = serde_json::to_string(&q).unwrap();
        let back: Quiver = serde_json::from_str(&text).unwrap();
        assert_eq!(q, back);
    }

    #[test]
    fn reachability_matches_flow_leq() {
        let q = build_grid(&[2, 1]).unwrap();
        let reach = q.reachability().unwrap();
        for x in 0..q.vertex_count() {
            for y in 0..q.vertex_count() {
                assert_eq!(reach[x][y], q.flow_leq(x, y).unwrap());
            }
        }
    }
}
