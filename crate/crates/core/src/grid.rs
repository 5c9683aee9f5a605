//! Multiparameter persistence on grid quivers: rectangle modules, the
//! hyperplane arrangement of slope coincidences, the descending-charge
//! completeness classifier with max-flow certificates, the up-set lattice
//! inequality, and rectangle-multiplicity recovery.

use crate::error::{Error, Limits, Result};
use crate::hn::{CentralCharge, HnType};
use crate::matrix::FieldSpec;
use crate::quiver::{build_grid, grid_coords, grid_index, Quiver, VertexSet};
use crate::rep::Representation;
use crate::scalar::{Rational, Scalar};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

/// Axis-aligned rectangle `prod [lo_i, hi_i]` inside a grid of some shape.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rectangle {
    pub lo: Vec<usize>,
    pub hi: Vec<usize>,
}

impl Rectangle {
    pub fn new(lo: Vec<usize>, hi: Vec<usize>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::Input("rectangle endpoint dimensions differ".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::Input("rectangle has lo > hi on some axis".into()));
        }
        Ok(Rectangle { lo, hi })
    }

    pub fn fits(&self, shape: &[usize]) -> bool {
        self.lo.len() == shape.len() && self.hi.iter().zip(shape).all(|(h, l)| h <= l)
    }

    pub fn point_count(&self) -> usize {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a + 1).product()
    }

    pub fn contains_point(&self, coords: &[usize]) -> bool {
        coords
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(c, (a, b))| a <= c && c <= b)
    }

    /// Vertex indices of the grid points inside the rectangle.
    pub fn support(&self, shape: &[usize]) -> VertexSet {
        let n: usize = shape.iter().map(|&l| l + 1).product();
        (0..n)
            .filter(|&i| self.contains_point(&grid_coords(shape, i)))
            .collect()
    }

    /// The full rectangle of a grid shape.
    pub fn full(shape: &[usize]) -> Rectangle {
        Rectangle { lo: vec![0; shape.len()], hi: shape.to_vec() }
    }
}

pub type RectangleMultiset = BTreeMap<Rectangle, usize>;

/// Thin equalised module supported on a rectangle, identity maps inside.
pub fn rectangle_module(
    shape: &[usize],
    rect: &Rectangle,
    field: FieldSpec,
) -> Result<Representation> {
    if !rect.fits(shape) {
        return Err(Error::Input(format!(
            "rectangle {rect:?} does not fit in the grid of shape {shape:?}"
        )));
    }
    let quiver = Arc::new(build_grid(shape)?);
    Ok(Representation::thin_from_support(quiver, &rect.support(shape), field))
}

/// Direct sum of rectangle modules with multiplicities.
pub fn from_rectangles(
    shape: &[usize],
    multiset: &RectangleMultiset,
    field: FieldSpec,
) -> Result<Representation> {
    let quiver = Arc::new(build_grid(shape)?);
    let mut acc = Representation::zero(quiver, field);
    for (rect, &mult) in multiset {
        let module = rectangle_module(shape, rect, field)?;
        for _ in 0..mult {
            acc = acc.direct_sum(&module)?;
        }
    }
    Ok(acc)
}

/// Every rectangle inside the grid shape.
pub fn enumerate_rectangles(shape: &[usize]) -> Vec<Rectangle> {
    let mut out: Vec<Rectangle> = vec![Rectangle { lo: vec![], hi: vec![] }];
    for &l in shape {
        let mut next = Vec::new();
        for r in &out {
            for a in 0..=l {
                for b in a..=l {
                    let mut lo = r.lo.clone();
                    let mut hi = r.hi.clone();
                    lo.push(a);
                    hi.push(b);
                    next.push(Rectangle { lo, hi });
                }
            }
        }
        out = next;
    }
    out
}

pub fn rectangle_slope(charge: &CentralCharge, shape: &[usize], rect: &Rectangle) -> Scalar {
    let mut sum = Scalar::zero();
    for v in rect.support(shape) {
        sum = &sum + charge.value(v);
    }
    sum.scale(&Rational::new(1, rect.point_count() as i64).unwrap())
}

/// Does the charge lie on the hyperplane arrangement, i.e. do two distinct
/// rectangles share a slope? Returns the witness pair when so.
pub fn in_hyperplane_arrangement(
    charge: &CentralCharge,
    shape: &[usize],
    limits: &Limits,
) -> Result<Option<(Rectangle, Rectangle)>> {
    let rects = enumerate_rectangles(shape);
    if rects.len() > limits.max_rectangles {
        return Err(Error::SizeGuard(format!(
            "{} rectangles exceeds the bound {}",
            rects.len(),
            limits.max_rectangles
        )));
    }
    let mut seen: BTreeMap<Scalar, Rectangle> = BTreeMap::new();
    for r in rects {
        let s = rectangle_slope(charge, shape, &r);
        if let Some(prev) = seen.get(&s) {
            return Ok(Some((prev.clone(), r)));
        }
        seen.insert(s, r);
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridVerdict {
    Complete,
    Incomplete,
    OnHyperplane,
}

/// Classify a charge on the grid: `OnHyperplane` when two rectangle slopes
/// coincide (the classifier does not apply there), otherwise `Complete`
/// exactly when the charge strictly decreases along every edge.
pub fn is_complete_grid_charge(
    charge: &CentralCharge,
    shape: &[usize],
    limits: &Limits,
) -> Result<GridVerdict> {
    if in_hyperplane_arrangement(charge, shape, limits)?.is_some() {
        return Ok(GridVerdict::OnHyperplane);
    }
    let quiver = build_grid(shape)?;
    let descending = quiver
        .edges()
        .all(|(s, t, _)| charge.value(s) > charge.value(t));
    Ok(if descending { GridVerdict::Complete } else { GridVerdict::Incomplete })
}

/// A descending charge off the hyperplane arrangement: distinct powers of
/// two by canonical vertex index, which strictly decrease along edges.
/// Retries with seeded perturbations in the unlikely event of a slope
/// coincidence.
pub fn descending_charge_off_h(shape: &[usize], limits: &Limits) -> Result<CentralCharge> {
    let quiver = build_grid(shape)?;
    let n = quiver.vertex_count();
    let mut values: Vec<Scalar> = (0..n)
        .map(|i| {
            Scalar::from_rational(
                Rational::from_big(
                    num::BigInt::from(1) << (n - 1 - i),
                    num::BigInt::from(1),
                )
                .unwrap(),
            )
        })
        .collect();
    for attempt in 0..64u64 {
        let charge = CentralCharge::new(&quiver, values.clone())?;
        if in_hyperplane_arrangement(&charge, shape, limits)?.is_none() {
            return Ok(charge);
        }
        // Nudge by a small vertex-dependent fraction, keeping edges descending.
        values = (0..n)
            .map(|i| {
                let jitter = Rational::new(
                    ((attempt + 1) as i64 * (i as i64 + 1)) % 97,
                    101 * (i as i64 + 1),
                )
                .unwrap();
                &values[i] + &Scalar::from_rational(jitter)
            })
            .collect();
    }
    Err(Error::Internal("could not leave the hyperplane arrangement".into()))
}

/// Capacity of a flow arc: exact scalar or the symbolic infinity. Infinite
/// capacities are never numeric; cuts containing one are discarded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Capacity {
    Finite(Scalar),
    Infinite,
}

#[derive(Debug, Clone)]
pub struct FlowArc {
    pub from: usize,
    pub to: usize,
    pub capacity: Capacity,
}

/// Directed network with a distinguished source and sink.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    pub node_names: Vec<String>,
    pub source: usize,
    pub sink: usize,
    pub arcs: Vec<FlowArc>,
}

impl FlowNetwork {
    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn finite_arc_count(&self) -> usize {
        self.arcs
            .iter()
            .filter(|a| matches!(a.capacity, Capacity::Finite(_)))
            .count()
    }

    /// Debug dump: one line per arc with capacities in scalar text.
    pub fn dump(&self) -> String {
        self.arcs
            .iter()
            .map(|a| {
                let cap = match &a.capacity {
                    Capacity::Finite(s) => s.to_string(),
                    Capacity::Infinite => "inf".to_string(),
                };
                format!(
                    "{} -> {} [{}]",
                    self.node_names[a.from], self.node_names[a.to], cap
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// The bipartite certificate network of an up-closed subset `U`: source
/// arcs of capacity `1/n` into the complement `D`, sink arcs of capacity
/// `1/m` out of `U`, and infinite arcs `d -> u` whenever `d <= u` in the
/// flow order.
pub fn build_flow_network(quiver: &Quiver, up_closed: &VertexSet) -> Result<FlowNetwork> {
    if up_closed != &quiver.up_closure(up_closed) {
        return Err(Error::Input("the given subset is not up-closed".into()));
    }
    if up_closed.is_empty() || up_closed.len() == quiver.vertex_count() {
        return Err(Error::Input("U must be a nonempty proper subset".into()));
    }
    let down: Vec<usize> =
        (0..quiver.vertex_count()).filter(|v| !up_closed.contains(v)).collect();
    let up: Vec<usize> = up_closed.iter().copied().collect();
    let n = down.len();
    let m = up.len();
    let mut node_names = vec!["s*".to_string()];
    let mut index = BTreeMap::new();
    for &d in &down {
        index.insert(d, node_names.len());
        node_names.push(quiver.vertex_name(d).to_string());
    }
    for &u in &up {
        index.insert(u, node_names.len());
        node_names.push(quiver.vertex_name(u).to_string());
    }
    let sink = node_names.len();
    node_names.push("t*".to_string());
    let mut arcs = Vec::new();
    let inv_n = Scalar::from_rational(Rational::new(1, n as i64).unwrap());
    let inv_m = Scalar::from_rational(Rational::new(1, m as i64).unwrap());
    for &d in &down {
        arcs.push(FlowArc { from: 0, to: index[&d], capacity: Capacity::Finite(inv_n.clone()) });
    }
    for &u in &up {
        arcs.push(FlowArc { from: index[&u], to: sink, capacity: Capacity::Finite(inv_m.clone()) });
    }
    let reach = quiver.reachability()?;
    for &d in &down {
        for &u in &up {
            if reach[d][u] {
                arcs.push(FlowArc { from: index[&d], to: index[&u], capacity: Capacity::Infinite });
            }
        }
    }
    Ok(FlowNetwork { node_names, source: 0, sink, arcs })
}

/// Exact maximum flow value by Edmonds-Karp: breadth-first augmenting paths
/// on the residual network. Terminates regardless of capacities because the
/// augmentation count is combinatorial; all arithmetic is exact, with the
/// symbolic infinity kept apart.
pub fn max_flow(net: &FlowNetwork) -> Result<Scalar> {
    if net.arcs.is_empty() {
        return Err(Error::Input("flow network has no arcs".into()));
    }
    let n = net.node_count();
    // Residual arcs: forward residual per arc plus a backward twin.
    #[derive(Clone)]
    struct Res {
        to: usize,
        cap: Capacity, // remaining residual capacity
        twin: usize,
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut res: Vec<Res> = Vec::with_capacity(net.arcs.len() * 2);
    for a in &net.arcs {
        let f = res.len();
        res.push(Res { to: a.to, cap: a.capacity.clone(), twin: f + 1 });
        res.push(Res { to: a.from, cap: Capacity::Finite(Scalar::zero()), twin: f });
        adj[a.from].push(f);
        adj[a.to].push(f + 1);
    }
    let positive = |c: &Capacity| match c {
        Capacity::Infinite => true,
        Capacity::Finite(s) => s > &Scalar::zero(),
    };
    let mut value = Scalar::zero();
    loop {
        // BFS for a shortest augmenting path.
        let mut prev: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[net.source] = true;
        let mut queue = VecDeque::from([net.source]);
        while let Some(v) = queue.pop_front() {
            for &ei in &adj[v] {
                let e = &res[ei];
                if !seen[e.to] && positive(&e.cap) {
                    seen[e.to] = true;
                    prev[e.to] = Some(ei);
                    queue.push_back(e.to);
                }
            }
        }
        if !seen[net.sink] {
            break;
        }
        // Bottleneck along the path.
        let mut bottleneck: Option<Scalar> = None;
        let mut v = net.sink;
        while v != net.source {
            let ei = prev[v].unwrap();
            if let Capacity::Finite(c) = &res[ei].cap {
                bottleneck = Some(match bottleneck {
                    None => c.clone(),
                    Some(b) => {
                        if c < &b {
                            c.clone()
                        } else {
                            b
                        }
                    }
                });
            }
            v = res[res[ei].twin].to;
        }
        let delta = bottleneck.ok_or_else(|| {
            Error::Internal("augmenting path with unbounded capacity: the cut structure \
                             guarantees finite source arcs"
                .into())
        })?;
        // Apply.
        let mut v = net.sink;
        while v != net.source {
            let ei = prev[v].unwrap();
            let ti = res[ei].twin;
            if let Capacity::Finite(c) = &res[ei].cap {
                res[ei].cap = Capacity::Finite(c - &delta);
            }
            if let Capacity::Finite(c) = &res[ti].cap {
                res[ti].cap = Capacity::Finite(c + &delta);
            }
            v = res[ti].to;
        }
        value = &value + &delta;
    }
    Ok(value)
}

/// Brute-force minimum cut: minimum, over all vertex bipartitions with the
/// source on one side and the sink on the other and no infinite arc
/// crossing, of the total finite capacity crossing. Every disconnecting arc
/// subset contains such a crossing set, so this is the minimum capacity of
/// a disconnecting arc subset restricted to finite arcs.
pub fn min_cut_bruteforce(net: &FlowNetwork, limits: &Limits) -> Result<Scalar> {
    let finite = net.finite_arc_count();
    if finite > limits.max_cut_arcs {
        return Err(Error::SizeGuard(format!(
            "{finite} finite arcs exceeds the brute-force cut bound {}",
            limits.max_cut_arcs
        )));
    }
    let middle: Vec<usize> =
        (0..net.node_count()).filter(|&v| v != net.source && v != net.sink).collect();
    if middle.len() > 30 {
        return Err(Error::SizeGuard("too many nodes for brute-force cuts".into()));
    }
    let mut best: Option<Scalar> = None;
    for mask in 0..(1u64 << middle.len()) {
        // side true = source side.
        let mut side = vec![false; net.node_count()];
        side[net.source] = true;
        for (i, &v) in middle.iter().enumerate() {
            side[v] = mask >> i & 1 == 1;
        }
        let mut cap = Some(Scalar::zero());
        for a in &net.arcs {
            if side[a.from] && !side[a.to] {
                match &a.capacity {
                    Capacity::Infinite => {
                        cap = None;
                        break;
                    }
                    Capacity::Finite(c) => cap = cap.map(|acc| &acc + c),
                }
            }
        }
        if let Some(c) = cap {
            best = Some(match best {
                None => c,
                Some(b) => {
                    if c < b {
                        c
                    } else {
                        b
                    }
                }
            });
        }
    }
    best.ok_or_else(|| Error::Internal("no finite cut exists".into()))
}

/// The up-set counting inequality `|A| * |U| <= |D| * |U n A+|` for an
/// up-closed `U` with complement `D` and any `A` inside `D`.
pub fn lattice_inequality_check(
    quiver: &Quiver,
    up_closed: &VertexSet,
    a: &VertexSet,
) -> Result<bool> {
    if up_closed != &quiver.up_closure(up_closed) {
        return Err(Error::Input("U is not up-closed".into()));
    }
    if a.iter().any(|v| up_closed.contains(v)) {
        return Err(Error::Input("A must lie in the complement of U".into()));
    }
    let d_len = quiver.vertex_count() - up_closed.len();
    let a_plus = quiver.up_closure(a);
    let meet = a_plus.intersection(up_closed).count();
    Ok(a.len() * up_closed.len() <= d_len * meet)
}

/// Recover rectangle multiplicities from an HN type along a complete
/// charge off the hyperplane arrangement: each slope matches at most one
/// rectangle, whose multiplicity is the unique scalar factor.
pub fn recover_rectangles(
    hn: &HnType,
    charge: &CentralCharge,
    shape: &[usize],
    limits: &Limits,
) -> Result<RectangleMultiset> {
    match is_complete_grid_charge(charge, shape, limits)? {
        GridVerdict::Complete => {}
        GridVerdict::Incomplete => {
            return Err(Error::Input(
                "charge is not complete: it fails to decrease along some edge".into(),
            ))
        }
        GridVerdict::OnHyperplane => {
            return Err(Error::Input(
                "charge lies on the hyperplane arrangement; recovery is not defined there".into(),
            ))
        }
    }
    let quiver = build_grid(shape)?;
    let slopes: BTreeMap<Scalar, Rectangle> = enumerate_rectangles(shape)
        .into_iter()
        .map(|r| (rectangle_slope(charge, shape, &r), r))
        .collect();
    let mut out = RectangleMultiset::new();
    for (lambda, dims) in hn.steps() {
        let rect = slopes.get(lambda).ok_or_else(|| {
            Error::Inconsistency(format!("no rectangle has slope {lambda}"))
        })?;
        let support = rect.support(shape);
        let mut mult: Option<usize> = None;
        for v in 0..quiver.vertex_count() {
            let expected = if support.contains(&v) { 1 } else { 0 };
            match (expected, dims[v]) {
                (0, 0) => {}
                (0, d) if d > 0 => {
                    return Err(Error::Inconsistency(format!(
                        "HN step at slope {lambda} is supported outside rectangle {rect:?}"
                    )))
                }
                (1, d) => match mult {
                    None => mult = Some(d),
                    Some(m) if m == d => {}
                    Some(m) => {
                        return Err(Error::Inconsistency(format!(
                            "HN step at slope {lambda} is not a multiple of the rectangle: \
                             {d} vs {m}"
                        )))
                    }
                },
                _ => unreachable!(),
            }
        }
        let mult = mult.unwrap_or(0);
        if mult == 0 {
            return Err(Error::Inconsistency(format!(
                "HN step at slope {lambda} has a zero dimension vector on its rectangle"
            )));
        }
        out.insert(rect.clone(), mult);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hn::{hn_type_bruteforce, slope};
    use crate::scalar::rat;

    fn charge_1131(quiver: &Quiver, vals: [i64; 4]) -> CentralCharge {
        // Order: (0,0), (1,0), (0,1), (1,1).
        CentralCharge::from_ints(quiver, &vals).unwrap()
    }

    #[test]
    fn rectangle_module_basics() {
        let shape = [1usize, 1];
        let full = Rectangle::full(&shape);
        let m = rectangle_module(&shape, &full, FieldSpec::F2).unwrap();
        assert_eq!(m.dims(), &[1, 1, 1, 1]);
        assert!(m.is_equalised().unwrap());
        let point = Rectangle::new(vec![1, 1], vec![1, 1]).unwrap();
        let p = rectangle_module(&shape, &point, FieldSpec::F2).unwrap();
        assert_eq!(p.total_dim(), 1);
        let bad = Rectangle::new(vec![0, 0], vec![2, 1]).unwrap();
        assert!(rectangle_module(&shape, &bad, FieldSpec::F2).is_err());
    }

    #[test]
    fn rectangle_enumeration_count() {
        // (1,1): 3 intervals per axis, 9 rectangles.
        assert_eq!(enumerate_rectangles(&[1, 1]).len(), 9);
        assert_eq!(enumerate_rectangles(&[2, 2]).len(), 36);
        assert_eq!(enumerate_rectangles(&[1, 1, 1]).len(), 27);
    }

    #[test]
    fn hyperplane_witness_and_avoidance() {
        let q = build_grid(&[1, 1]).unwrap();
        let limits = Limits::default();
        // (5,3;2,1): the right column and the top-left point both have slope 2.
        let on = charge_1131(&q, [5, 3, 2, 1]);
        let witness = in_hyperplane_arrangement(&on, &[1, 1], &limits).unwrap();
        let (r1, r2) = witness.expect("witness pair");
        let s1 = rectangle_slope(&on, &[1, 1], &r1);
        assert_eq!(s1, rectangle_slope(&on, &[1, 1], &r2));
        assert_eq!(s1, Scalar::from_int(2));
        // (8,4;2,1): all nine slopes distinct.
        let off = charge_1131(&q, [8, 4, 2, 1]);
        assert!(in_hyperplane_arrangement(&off, &[1, 1], &limits).unwrap().is_none());
        // Constant charge: everything collides.
        let c = CentralCharge::constant(&q, Scalar::one());
        assert!(in_hyperplane_arrangement(&c, &[1, 1], &limits).unwrap().is_some());
    }

    #[test]
    fn grid_verdicts() {
        let q = build_grid(&[1, 1]).unwrap();
        let limits = Limits::default();
        assert_eq!(
            is_complete_grid_charge(&charge_1131(&q, [8, 4, 2, 1]), &[1, 1], &limits).unwrap(),
            GridVerdict::Complete
        );
        assert_eq!(
            is_complete_grid_charge(&charge_1131(&q, [5, 3, 2, 1]), &[1, 1], &limits).unwrap(),
            GridVerdict::OnHyperplane
        );
        // Ascending somewhere, off the arrangement.
        assert_eq!(
            is_complete_grid_charge(&charge_1131(&q, [8, 4, 2, 16]), &[1, 1], &limits).unwrap(),
            GridVerdict::Incomplete
        );
    }

    #[test]
    fn descending_charge_construction() {
        for shape in [vec![1usize, 1], vec![2, 1], vec![2, 2], vec![1, 1, 1]] {
            let limits = Limits::default();
            let charge = descending_charge_off_h(&shape, &limits).unwrap();
            assert_eq!(
                is_complete_grid_charge(&charge, &shape, &limits).unwrap(),
                GridVerdict::Complete
            );
        }
    }

    #[test]
    fn flow_network_structure() {
        let q = build_grid(&[1, 1]).unwrap();
        let tr = grid_index(&[1, 1], &[1, 1]);
        let u = VertexSet::from([tr]);
        let net = build_flow_network(&q, &u).unwrap();
        // 3 source arcs of capacity 1/3, one sink arc of capacity 1, and
        // 3 infinite middle arcs (every vertex is below the maximum).
        assert_eq!(net.arcs.len(), 7);
        let third = Capacity::Finite(Scalar::from_rational(rat(1, 3)));
        assert_eq!(
            net.arcs.iter().filter(|a| a.capacity == third).count(),
            3
        );
        assert_eq!(
            net.arcs.iter().filter(|a| a.capacity == Capacity::Infinite).count(),
            3
        );
        assert_eq!(max_flow(&net).unwrap(), Scalar::one());
        assert_eq!(min_cut_bruteforce(&net, &Limits::default()).unwrap(), Scalar::one());

        // Not up-closed: refuse.
        let bl = grid_index(&[1, 1], &[0, 0]);
        assert!(build_flow_network(&q, &VertexSet::from([bl])).is_err());
        // Empty / full: refuse.
        assert!(build_flow_network(&q, &VertexSet::new()).is_err());
        assert!(build_flow_network(&q, &(0..4).collect()).is_err());
    }

    #[test]
    fn flow_equals_cut_on_all_up_sets() {
        let q = build_grid(&[2, 1]).unwrap();
        let limits = Limits::default();
        for u in q.enumerate_up_closed(&limits).unwrap() {
            if u.is_empty() || u.len() == q.vertex_count() {
                continue;
            }
            let net = build_flow_network(&q, &u).unwrap();
            let f = max_flow(&net).unwrap();
            let c = min_cut_bruteforce(&net, &limits).unwrap();
            assert_eq!(f, c, "U = {u:?}");
            assert!(c >= Scalar::one(), "cut below 1 for U = {u:?}");
            assert_eq!(f, Scalar::one(), "flow should saturate at exactly 1");
        }
    }

    #[test]
    fn lattice_inequality_examples() {
        let q = build_grid(&[1, 1]).unwrap();
        let shape = [1, 1];
        let u = VertexSet::from([grid_index(&shape, &[1, 0]), grid_index(&shape, &[1, 1])]);
        let a = VertexSet::from([grid_index(&shape, &[0, 0])]);
        assert!(lattice_inequality_check(&q, &u, &a).unwrap());
        assert!(lattice_inequality_check(&q, &u, &VertexSet::new()).unwrap());
        // A = D.
        let d: VertexSet =
            (0..q.vertex_count()).filter(|v| !u.contains(v)).collect();
        assert!(lattice_inequality_check(&q, &u, &d).unwrap());
        // A meeting U is an input error.
        assert!(lattice_inequality_check(&q, &u, &u).is_err());
    }

    #[test]
    fn recovery_round_trip() {
        let shape = [1usize, 1];
        let q = build_grid(&shape).unwrap();
        let charge = charge_1131(&q, [8, 4, 2, 1]);
        let mut ms = RectangleMultiset::new();
        ms.insert(Rectangle::full(&shape), 1);
        ms.insert(Rectangle::new(vec![1, 1], vec![1, 1]).unwrap(), 2);
        let v = from_rectangles(&shape, &ms, FieldSpec::F2).unwrap();
        // Slopes 15/4 and 1 for the two summands.
        assert_eq!(
            slope(&rectangle_module(&shape, &Rectangle::full(&shape), FieldSpec::F2).unwrap(), &charge)
                .unwrap(),
            Scalar::from_rational(rat(15, 4))
        );
        let hidden = v.conjugate(5).unwrap();
        let hn = hn_type_bruteforce(&hidden, &charge, &Limits::default()).unwrap();
        let recovered = recover_rectangles(&hn, &charge, &shape, &Limits::default()).unwrap();
        assert_eq!(recovered, ms);
        // Empty HN type -> empty multiset.
        assert!(recover_rectangles(&HnType::empty(), &charge, &shape, &Limits::default())
            .unwrap()
            .is_empty());
        // Refusals.
        let bad = charge_1131(&q, [5, 3, 2, 1]);
        assert!(recover_rectangles(&hn, &bad, &shape, &Limits::default()).is_err());
    }
}
