//! Central charges, slopes, semistability and Harder-Narasimhan
//! filtrations/types, the skyscraper invariant, rank recovery from a single
//! HN type, and the counterexample construction for incomplete charges.
//!
//! The brute-force path enumerates all subrepresentations over a small prime
//! field and is the authoritative oracle; the thin fast path (up-closed
//! support subsets) must agree with it and is cross-checked in tests.

use crate::error::{Error, Limits, Result};
use crate::matrix::{FieldSpec, FpMat, Matrix};
use crate::quiver::{build_grid, up_closed_subsets_within, Quiver, VertexSet};
use crate::rep::{transpose_fp, FpRep, Representation, Subrepresentation};
use crate::scalar::{Rational, Scalar};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A central charge: one exact scalar per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralCharge {
    values: Vec<Scalar>,
}

impl CentralCharge {
    pub fn new(quiver: &Quiver, values: Vec<Scalar>) -> Result<Self> {
        if values.len() != quiver.vertex_count() {
            return Err(Error::Input(format!(
                "charge has {} values for {} vertices",
                values.len(),
                quiver.vertex_count()
            )));
        }
        Ok(CentralCharge { values })
    }

    pub fn from_ints(quiver: &Quiver, values: &[i64]) -> Result<Self> {
        CentralCharge::new(quiver, values.iter().map(|&v| Scalar::from_int(v)).collect())
    }

    /// The charge that is 1 at `vertex` and 0 elsewhere.
    pub fn skyscraper(quiver: &Quiver, vertex: usize) -> Self {
        let mut values = vec![Scalar::zero(); quiver.vertex_count()];
        values[vertex] = Scalar::one();
        CentralCharge { values }
    }

    pub fn constant(quiver: &Quiver, value: Scalar) -> Self {
        CentralCharge { values: vec![value; quiver.vertex_count()] }
    }

    pub fn value(&self, v: usize) -> &Scalar {
        &self.values[v]
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn shifted(&self, c: &Scalar) -> Self {
        CentralCharge { values: self.values.iter().map(|v| v + c).collect() }
    }

    pub fn to_json(&self, quiver: &Quiver) -> BTreeMap<String, String> {
        quiver
            .vertex_names()
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), self.values[i].to_string()))
            .collect()
    }

    pub fn from_json(quiver: &Quiver, map: &BTreeMap<String, String>) -> Result<Self> {
        let mut values = vec![Scalar::zero(); quiver.vertex_count()];
        for (name, text) in map {
            let v = quiver
                .vertex_index(name)
                .ok_or_else(|| Error::Input(format!("unknown vertex '{name}' in charge")))?;
            values[v] = text.parse()?;
        }
        Ok(CentralCharge { values })
    }
}

/// HN type: the successive quotient data `(slope, dimension vector)` with
/// strictly decreasing slopes. Two HN types are equal iff the lists agree
/// exactly; there is no tolerance anywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HnType {
    steps: Vec<(Scalar, Vec<usize>)>,
}

impl HnType {
    pub fn new(steps: Vec<(Scalar, Vec<usize>)>) -> Result<Self> {
        for w in steps.windows(2) {
            if w[0].0 <= w[1].0 {
                return Err(Error::Internal("HN type slopes must strictly decrease".into()));
            }
        }
        if steps.iter().any(|(_, d)| d.iter().all(|&x| x == 0)) {
            return Err(Error::Internal("HN type contains a zero dimension vector".into()));
        }
        Ok(HnType { steps })
    }

    /// The HN type of the zero representation: the empty list. This makes
    /// additivity hold with zero summands.
    pub fn empty() -> Self {
        HnType { steps: Vec::new() }
    }

    pub fn steps(&self) -> &[(Scalar, Vec<usize>)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The HN type as a function of the slope: the dimension vector at
    /// `lambda`, or all zeros when no quotient has that slope.
    pub fn value_at(&self, lambda: &Scalar, vertex_count: usize) -> Vec<usize> {
        self.steps
            .iter()
            .find(|(s, _)| s == lambda)
            .map(|(_, d)| d.clone())
            .unwrap_or_else(|| vec![0; vertex_count])
    }

    /// Slopewise sum, realising additivity of HN types under direct sums.
    pub fn slopewise_sum(&self, other: &HnType) -> HnType {
        let mut merged: BTreeMap<Scalar, Vec<usize>> = BTreeMap::new();
        for (s, d) in self.steps.iter().chain(&other.steps) {
            merged
                .entry(s.clone())
                .and_modify(|acc| {
                    for (a, b) in acc.iter_mut().zip(d) {
                        *a += b;
                    }
                })
                .or_insert_with(|| d.clone());
        }
        let steps = merged.into_iter().rev().collect();
        HnType { steps }
    }

    pub fn total_dimvec(&self, vertex_count: usize) -> Vec<usize> {
        let mut out = vec![0; vertex_count];
        for (_, d) in &self.steps {
            for (a, b) in out.iter_mut().zip(d) {
                *a += b;
            }
        }
        out
    }

    pub fn to_json(&self, quiver: &Quiver) -> serde_json::Value {
        serde_json::Value::Array(
            self.steps
                .iter()
                .map(|(s, d)| {
                    let dimvec: BTreeMap<String, usize> = quiver
                        .vertex_names()
                        .iter()
                        .enumerate()
                        .map(|(i, n)| (n.clone(), d[i]))
                        .collect();
                    serde_json::json!({ "slope": s.to_string(), "dimvec": dimvec })
                })
                .collect(),
        )
    }
}

/// The HN filtration `0 = V^0 < V^1 < ... < V^n = V` as cumulative
/// subrepresentations, together with the slopes and dimension vectors of
/// the successive quotients.
#[derive(Debug, Clone)]
pub struct HnFiltration {
    pub steps: Vec<Subrepresentation>,
    pub ty: HnType,
}

impl HnFiltration {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Exact slope of a dimension vector: `sum alpha(x) d_x / sum d_x`.
pub fn slope_of_dims(dims: &[usize], charge: &CentralCharge) -> Result<Scalar> {
    let total: usize = dims.iter().sum();
    if total == 0 {
        return Err(Error::Input("slope of the zero representation is undefined".into()));
    }
    let num = weighted_sum(dims, charge);
    Ok(num.scale(&Rational::new(1, total as i64).unwrap()))
}

fn weighted_sum(dims: &[usize], charge: &CentralCharge) -> Scalar {
    let mut num = Scalar::zero();
    for (d, a) in dims.iter().zip(charge.values()) {
        if *d > 0 {
            num = &num + &a.scale(&Rational::from_int(*d as i64));
        }
    }
    num
}

pub fn slope(v: &Representation, charge: &CentralCharge) -> Result<Scalar> {
    slope_of_dims(v.dims(), charge)
}

/// Slope as an exact fraction `num / den` with integer positive `den`, to
/// compare candidates by cross multiplication.
#[derive(Clone, Debug)]
struct SlopeFrac {
    num: Scalar,
    den: usize,
}

impl SlopeFrac {
    fn of(dims: &[(usize, usize)], charge: &CentralCharge) -> Option<SlopeFrac> {
        let den: usize = dims.iter().map(|&(_, d)| d).sum();
        if den == 0 {
            return None;
        }
        let mut num = Scalar::zero();
        for &(v, d) in dims {
            if d > 0 {
                num = &num + &charge.value(v).scale(&Rational::from_int(d as i64));
            }
        }
        Some(SlopeFrac { num, den })
    }

    fn cmp(&self, other: &SlopeFrac) -> std::cmp::Ordering {
        let lhs = self.num.scale(&Rational::from_int(other.den as i64));
        let rhs = other.num.scale(&Rational::from_int(self.den as i64));
        lhs.cmp(&rhs)
    }

    fn to_scalar(&self) -> Scalar {
        self.num.scale(&Rational::new(1, self.den as i64).unwrap())
    }
}

fn sub_dims(bases: &[(FpMat, Vec<usize>)]) -> Vec<(usize, usize)> {
    bases.iter().enumerate().map(|(v, (m, _))| (v, m.rows)).collect()
}

/// Is there no subrepresentation of strictly larger slope?
pub fn is_semistable(v: &Representation, charge: &CentralCharge) -> Result<bool> {
    is_semistable_with(v, charge, &Limits::default())
}

pub fn is_semistable_with(
    v: &Representation,
    charge: &CentralCharge,
    limits: &Limits,
) -> Result<bool> {
    if v.is_zero() {
        return Err(Error::Input("semistability of the zero representation is undefined".into()));
    }
    let whole = slope_fraction_of_rep(v, charge);
    let fp = FpRep::try_from_rep(v, limits)?;
    let complete = fp.for_each_subrep(limits, &mut |bases| {
        match SlopeFrac::of(&sub_dims(bases), charge) {
            None => true,
            Some(s) => s.cmp(&whole) != std::cmp::Ordering::Greater,
        }
    })?;
    Ok(complete)
}

/// Is every proper nonzero subrepresentation of strictly smaller slope?
pub fn is_stable(v: &Representation, charge: &CentralCharge) -> Result<bool> {
    is_stable_with(v, charge, &Limits::default())
}

pub fn is_stable_with(
    v: &Representation,
    charge: &CentralCharge,
    limits: &Limits,
) -> Result<bool> {
    if v.is_zero() {
        return Err(Error::Input("stability of the zero representation is undefined".into()));
    }
    let whole = slope_fraction_of_rep(v, charge);
    let total = v.total_dim();
    let fp = FpRep::try_from_rep(v, limits)?;
    let complete = fp.for_each_subrep(limits, &mut |bases| {
        let dims = sub_dims(bases);
        let sub_total: usize = dims.iter().map(|&(_, d)| d).sum();
        if sub_total == 0 || sub_total == total {
            return true;
        }
        let s = SlopeFrac::of(&dims, charge).expect("nonzero");
        s.cmp(&whole) == std::cmp::Ordering::Less
    })?;
    Ok(complete)
}

fn slope_fraction_of_rep(v: &Representation, charge: &CentralCharge) -> SlopeFrac {
    SlopeFrac {
        num: weighted_sum(v.dims(), charge),
        den: v.total_dim(),
    }
}

/// Maximal destabilizing subrepresentation: maximal slope, then maximal
/// total dimension. A residual tie would contradict HN theory, so two
/// distinct maximizers raise an internal consistency error.
pub fn max_destabilizing(v: &Representation, charge: &CentralCharge) -> Result<Subrepresentation> {
    max_destabilizing_with(v, charge, &Limits::default())
}

pub fn max_destabilizing_with(
    v: &Representation,
    charge: &CentralCharge,
    limits: &Limits,
) -> Result<Subrepresentation> {
    if v.is_zero() {
        return Err(Error::Input("the zero representation has no destabilizing subobject".into()));
    }
    let fp = FpRep::try_from_rep(v, limits)?;
    let best = fp_max_destabilizing(&fp, charge, limits)?;
    Ok(Subrepresentation::from_bases(
        best.bases.iter().map(|(m, _)| m.to_matrix()).collect(),
    ))
}

struct Destabilizer {
    bases: Vec<(FpMat, Vec<usize>)>,
    slope: SlopeFrac,
    total: usize,
}

fn fp_max_destabilizing(
    fp: &FpRep,
    charge: &CentralCharge,
    limits: &Limits,
) -> Result<Destabilizer> {
    let mut best: Option<Destabilizer> = None;
    let mut duplicate: Option<Vec<(FpMat, Vec<usize>)>> = None;
    fp.for_each_subrep(limits, &mut |bases| {
        let dims = sub_dims(bases);
        let Some(s) = SlopeFrac::of(&dims, charge) else { return true };
        let total: usize = dims.iter().map(|&(_, d)| d).sum();
        match &best {
            None => best = Some(Destabilizer { bases: bases.to_vec(), slope: s, total }),
            Some(b) => match s.cmp(&b.slope) {
                std::cmp::Ordering::Greater => {
                    best = Some(Destabilizer { bases: bases.to_vec(), slope: s, total });
                    duplicate = None;
                }
                std::cmp::Ordering::Equal => {
                    if total > b.total {
                        best = Some(Destabilizer { bases: bases.to_vec(), slope: s, total });
                        duplicate = None;
                    } else if total == b.total
                        && bases.iter().map(|(m, _)| m).ne(b.bases.iter().map(|(m, _)| m))
                    {
                        duplicate = Some(bases.to_vec());
                    }
                }
                std::cmp::Ordering::Less => {}
            },
        }
        true
    })?;
    let best = best.ok_or_else(|| Error::Input("representation is zero".into()))?;
    if duplicate.is_some() {
        return Err(Error::Internal(
            "two distinct maximal destabilizing subrepresentations; this contradicts HN \
             uniqueness and signals a bug"
                .into(),
        ));
    }
    Ok(best)
}

/// The unique HN filtration, computed by iterating the maximal
/// destabilizing subobject on successive quotients. The defining
/// post-conditions - semistable quotients, strictly decreasing exact
/// slopes - are asserted on the result before returning.
pub fn hn_filtration(v: &Representation, charge: &CentralCharge) -> Result<HnFiltration> {
    hn_filtration_with(v, charge, &Limits::default())
}

pub fn hn_filtration_with(
    v: &Representation,
    charge: &CentralCharge,
    limits: &Limits,
) -> Result<HnFiltration> {
    if v.is_zero() {
        return Ok(HnFiltration { steps: Vec::new(), ty: HnType::empty() });
    }
    let fp = FpRep::try_from_rep(v, limits)?;
    let n = fp.dims.len();
    // Per-vertex lift from current-quotient coordinates to original ones.
    let mut lifts: Vec<FpMat> =
        (0..n).map(|vx| FpMat::identity(fp.p, fp.dims[vx])).collect();
    let mut cumulative: Vec<FpMat> =
        (0..n).map(|vx| FpMat::zeros(fp.p, 0, fp.dims[vx])).collect();
    let mut current = fp;
    let mut steps = Vec::new();
    let mut layers: Vec<(Scalar, Vec<usize>)> = Vec::new();
    while current.total_dim() > 0 {
        let best = fp_max_destabilizing(&current, charge, limits)?;
        let layer_slope = best.slope.to_scalar();
        if let Some((prev, _)) = layers.last() {
            if *prev <= layer_slope {
                return Err(Error::Internal(
                    "HN layer slopes failed to strictly decrease".into(),
                ));
            }
        }
        // Assert the layer is semistable as a representation in its own right.
        let layer_rep = fp_restrict(&current, &best.bases);
        if !fp_is_semistable(&layer_rep, charge, limits)? {
            return Err(Error::Internal("HN layer is not semistable".into()));
        }
        layers.push((
            layer_slope,
            best.bases.iter().map(|(m, _)| m.rows).collect(),
        ));
        // Accumulate the step in original coordinates.
        for vx in 0..n {
            let in_orig = best.bases[vx].0.mul(&lifts[vx]);
            let (joined, _) = cumulative[vx].vstack(&in_orig).row_space();
            cumulative[vx] = joined;
        }
        steps.push(Subrepresentation::from_bases(
            cumulative.iter().map(FpMat::to_matrix).collect(),
        ));
        // Pass to the quotient.
        let (quot, comp_cols) = current.quotient(&best.bases);
        for vx in 0..n {
            let mut new_lift = FpMat::zeros(quot.p, comp_cols[vx].len(), lifts[vx].cols);
            for (r, &c) in comp_cols[vx].iter().enumerate() {
                for j in 0..lifts[vx].cols {
                    new_lift.set(r, j, lifts[vx].get(c, j));
                }
            }
            lifts[vx] = new_lift;
        }
        current = quot;
    }
    let ty = HnType::new(layers)?;
    Ok(HnFiltration { steps, ty })
}

/// Restriction of a prime-field representation to closed subspaces, in the
/// basis of those subspaces.
fn fp_restrict(rep: &FpRep, sub: &[(FpMat, Vec<usize>)]) -> FpRep {
    let dims: Vec<usize> = sub.iter().map(|(m, _)| m.rows).collect();
    let maps: Vec<FpMat> = rep
        .edges
        .iter()
        .enumerate()
        .map(|(i, &(s, t))| {
            let image = sub[s].0.mul(&rep.maps_t[i]);
            // Coefficients against the RREF basis at the target: read off
            // pivot columns (the residual vanishes by closure).
            let mut m = FpMat::zeros(rep.p, dims[t], dims[s]);
            for r in 0..image.rows {
                for (k, &c) in sub[t].1.iter().enumerate() {
                    m.set(k, r, image.get(r, c));
                }
            }
            m
        })
        .collect();
    let maps_t = maps.iter().map(transpose_fp).collect();
    FpRep { p: rep.p, dims, maps, maps_t, topo: rep.topo.clone(), edges: rep.edges.clone() }
}

fn fp_is_semistable(rep: &FpRep, charge: &CentralCharge, limits: &Limits) -> Result<bool> {
    let whole_dims: Vec<(usize, usize)> = rep.dims.iter().copied().enumerate().collect();
    let Some(whole) = SlopeFrac::of(&whole_dims, charge) else {
        return Err(Error::Input("zero representation".into()));
    };
    rep.for_each_subrep(limits, &mut |bases| {
        match SlopeFrac::of(&sub_dims(bases), charge) {
            None => true,
            Some(s) => s.cmp(&whole) != std::cmp::Ordering::Greater,
        }
    })
}

/// HN type of a representation. Thin representations take the up-closed
/// support fast path (which works over any field); everything else goes
/// through the brute-force filtration over a prime field.
pub fn hn_type(v: &Representation, charge: &CentralCharge) -> Result<HnType> {
    hn_type_with(v, charge, &Limits::default())
}

pub fn hn_type_with(
    v: &Representation,
    charge: &CentralCharge,
    limits: &Limits,
) -> Result<HnType> {
    if v.is_zero() {
        return Ok(HnType::empty());
    }
    if v.is_thin() {
        return hn_type_thin_rep(v, charge);
    }
    Ok(hn_filtration_with(v, charge, limits)?.ty)
}

/// Brute-force HN type, bypassing the thin fast path. Test oracle.
pub fn hn_type_bruteforce(
    v: &Representation,
    charge: &CentralCharge,
    limits: &Limits,
) -> Result<HnType> {
    Ok(hn_filtration_with(v, charge, limits)?.ty)
}

/// Thin fast path for an arbitrary thin representation: subrepresentations
/// are exactly the subsets of the support that are up-closed under the
/// edges carrying nonzero maps.
fn hn_type_thin_rep(v: &Representation, charge: &CentralCharge) -> Result<HnType> {
    let support = v.support();
    let edges: Vec<(usize, usize)> = v
        .quiver()
        .edges()
        .enumerate()
        .filter(|(i, (s, t, _))| {
            support.contains(s) && support.contains(t) && !v.map(*i).is_zero()
        })
        .map(|(_, (s, t, _))| (s, t))
        .collect();
    hn_type_thin_poset(&support, &edges, charge, v.quiver().vertex_count())
}

/// HN type of the thin indecomposable with the given support poset, along
/// the given charge. The poset is the flow order generated by the support
/// edges of the quiver.
pub fn hn_type_thin(
    quiver: &Quiver,
    support: &VertexSet,
    charge: &CentralCharge,
) -> Result<HnType> {
    let edges: Vec<(usize, usize)> = quiver
        .edges()
        .filter(|(s, t, _)| support.contains(s) && support.contains(t))
        .map(|(s, t, _)| (s, t))
        .collect();
    hn_type_thin_poset(support, &edges, charge, quiver.vertex_count())
}

fn hn_type_thin_poset(
    support: &VertexSet,
    edges: &[(usize, usize)],
    charge: &CentralCharge,
    vertex_count: usize,
) -> Result<HnType> {
    let mut remaining = support.clone();
    let mut layers: Vec<(Scalar, Vec<usize>)> = Vec::new();
    while !remaining.is_empty() {
        let live: Vec<(usize, usize)> = edges
            .iter()
            .copied()
            .filter(|(s, t)| remaining.contains(s) && remaining.contains(t))
            .collect();
        let mut best: Option<(SlopeFrac, VertexSet)> = None;
        let mut duplicate = false;
        for u in up_closed_subsets_within(&remaining, &live) {
            if u.is_empty() {
                continue;
            }
            let dims: Vec<(usize, usize)> = u.iter().map(|&x| (x, 1)).collect();
            let s = SlopeFrac::of(&dims, charge).expect("nonempty");
            match &best {
                None => best = Some((s, u)),
                Some((bs, bu)) => match s.cmp(bs).then(u.len().cmp(&bu.len())) {
                    std::cmp::Ordering::Greater => {
                        best = Some((s, u));
                        duplicate = false;
                    }
                    std::cmp::Ordering::Equal => duplicate = u != *bu,
                    std::cmp::Ordering::Less => {}
                },
            }
        }
        let (s, u) = best.expect("remaining support is nonempty");
        if duplicate {
            return Err(Error::Internal(
                "two distinct maximal destabilizers in the thin path".into(),
            ));
        }
        let mut dimvec = vec![0usize; vertex_count];
        for &x in &u {
            dimvec[x] = 1;
        }
        layers.push((s.to_scalar(), dimvec));
        for x in u {
            remaining.remove(&x);
        }
    }
    HnType::new(layers)
}

/// The skyscraper invariant: the HN type along the skyscraper charge at
/// every vertex, indexed by vertex.
pub fn skyscraper_invariant(v: &Representation) -> Result<Vec<HnType>> {
    skyscraper_invariant_with(v, &Limits::default())
}

pub fn skyscraper_invariant_with(v: &Representation, limits: &Limits) -> Result<Vec<HnType>> {
    (0..v.quiver().vertex_count())
        .map(|x| hn_type_with(v, &CentralCharge::skyscraper(v.quiver(), x), limits))
        .collect()
}

/// Recover the rank invariant value `rho_V(x, y)` from the HN type of `V`
/// along the skyscraper charge at `x`: find the smallest `j` whose
/// cumulative dimension at `x` reaches `dim V_x` and add the first `j`
/// quotient dimensions at `y`.
pub fn rank_from_hn(hn: &HnType, x: usize, y: usize, dim_vx: usize) -> Result<usize> {
    let mut at_x = 0usize;
    let mut at_y = 0usize;
    if dim_vx == 0 {
        return Ok(0);
    }
    for (_, d) in hn.steps() {
        at_x += d[x];
        at_y += d[y];
        if at_x == dim_vx {
            return Ok(at_y);
        }
        if at_x > dim_vx {
            break;
        }
    }
    Err(Error::Input(format!(
        "HN type is inconsistent with dim V_x = {dim_vx} at vertex {x}"
    )))
}

/// A completeness counterexample: the indecomposable `original` and the
/// decomposable `split = parts.0 + parts.1` share the HN type along the
/// charge, yet cannot be isomorphic since `original` is indecomposable and
/// `split` has at least two nonzero summands.
#[derive(Debug, Clone)]
pub struct CounterexamplePair {
    pub original: Representation,
    pub split: Representation,
    pub parts: (Representation, Representation),
}

/// Counterexample to completeness at a non-stable indecomposable; `None`
/// when `i` is stable.
///
/// If `i` is not semistable the split is `I^1 + I/I^1` with `I^1` the
/// first HN step; if semistable but not stable it is `J + I/J` for a
/// proper nonzero `J` of equal slope. The caller asserts indecomposability.
pub fn completeness_counterexample(
    i: &Representation,
    charge: &CentralCharge,
) -> Result<Option<CounterexamplePair>> {
    completeness_counterexample_with(i, charge, &Limits::default())
}

pub fn completeness_counterexample_with(
    i: &Representation,
    charge: &CentralCharge,
    limits: &Limits,
) -> Result<Option<CounterexamplePair>> {
    if i.is_zero() {
        return Err(Error::Input("the zero representation is not indecomposable".into()));
    }
    let pair_from = |sub: &Subrepresentation| -> Result<CounterexamplePair> {
        let part = i.sub_to_representation(sub)?;
        let quot = i.quotient(sub)?;
        Ok(CounterexamplePair {
            original: i.clone(),
            split: part.direct_sum(&quot)?,
            parts: (part, quot),
        })
    };
    let filtration = hn_filtration_with(i, charge, limits)?;
    if filtration.len() > 1 {
        return Ok(Some(pair_from(&filtration.steps[0])?));
    }
    // Semistable: look for a proper nonzero subobject of equal slope.
    let whole = slope_fraction_of_rep(i, charge);
    let total = i.total_dim();
    let fp = FpRep::try_from_rep(i, limits)?;
    let mut witness: Option<Vec<Matrix>> = None;
    fp.for_each_subrep(limits, &mut |bases| {
        let dims = sub_dims(bases);
        let sub_total: usize = dims.iter().map(|&(_, d)| d).sum();
        if sub_total == 0 || sub_total == total {
            return true;
        }
        let s = SlopeFrac::of(&dims, charge).expect("nonzero");
        if s.cmp(&whole) == std::cmp::Ordering::Equal {
            witness = Some(bases.iter().map(|(m, _)| m.to_matrix()).collect());
            false
        } else {
            true
        }
    })?;
    match witness {
        None => Ok(None),
        Some(bases) => Ok(Some(pair_from(&Subrepresentation::from_bases(bases))?)),
    }
}

/// The successive quotients `V^k / V^{k-1}` of a filtration, each as a
/// representation in its own basis.
pub fn filtration_layers(
    v: &Representation,
    filtration: &HnFiltration,
) -> Result<Vec<Representation>> {
    let mut layers = Vec::with_capacity(filtration.len());
    let mut previous: Option<&Subrepresentation> = None;
    for step in &filtration.steps {
        match previous {
            None => layers.push(v.sub_to_representation(step)?),
            Some(prev) => {
                let (quotient, proj) = v.quotient_with_projection(prev)?;
                // Push the step's bases into quotient coordinates.
                let bases: Vec<Matrix> = step
                    .bases
                    .iter()
                    .zip(&proj)
                    .map(|(b, p)| b.mul(&p.transpose(), &v.field()).row_space(&v.field()))
                    .collect();
                let sub = Subrepresentation::from_bases(bases);
                layers.push(quotient.sub_to_representation(&sub)?);
            }
        }
        previous = Some(step);
    }
    Ok(layers)
}

/// The two grid-(1,1) representations with equal rank invariant and
/// different skyscraper invariants: dimension vectors (2,1,1,0) in the
/// order bottom-left, bottom-right, top-left, top-right, with bottom map
/// [1,0] and left map [0,1] for `W` versus [1,0] for `W'`.
pub fn fixtures_ww(field: FieldSpec) -> (Representation, Representation) {
    let quiver = Arc::new(build_grid(&[1, 1]).expect("grid (1,1)"));
    let make = |left_map: &[i64]| {
        let dims = vec![2, 1, 1, 0];
        let maps = quiver
            .edges()
            .map(|(s, t, _)| match (s, t) {
                (0, 1) => Matrix::from_int_rows(&[&[1, 0]], 2),
                (0, 2) => Matrix::from_int_rows(&[left_map], 2),
                _ => Matrix::zeros(dims[t], dims[s]),
            })
            .collect();
        Representation::new(quiver.clone(), field, dims, maps).expect("fixture is valid")
    };
    (make(&[0, 1]), make(&[1, 0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{build_type_a, Orientation};
    use crate::rep::Representation;
    use crate::scalar::rat;

    fn a1() -> Arc<Quiver> {
        Arc::new(build_type_a(&Orientation::equioriented(1)))
    }

    fn i01(q: &Arc<Quiver>) -> Representation {
        Representation::thin_from_support(q.clone(), &VertexSet::from([0, 1]), FieldSpec::F2)
    }

    #[test]
    fn slope_examples() {
        let q = a1();
        let v = i01(&q);
        let alpha = CentralCharge::from_ints(&q, &[2, 1]).unwrap();
        assert_eq!(slope(&v, &alpha).unwrap(), Scalar::from_rational(rat(3, 2)));
        // Single-vertex module: slope is the charge value there.
        let s0 = Representation::simple(q.clone(), 0, FieldSpec::F2);
        assert_eq!(slope(&s0, &alpha).unwrap(), Scalar::from_int(2));
        let zero = Representation::zero(q, FieldSpec::F2);
        assert!(slope(&zero, &alpha).is_err());
    }

    #[test]
    fn fixtures_match_expected_hn_types() {
        let (w, wp) = fixtures_ww(FieldSpec::F2);
        let q = w.quiver().clone();
        let delta_bl = CentralCharge::skyscraper(&q, 0);
        assert_eq!(
            slope(&w, &delta_bl).unwrap(),
            Scalar::from_rational(rat(1, 2))
        );
        assert!(is_semistable(&w, &delta_bl).unwrap());
        assert!(!is_semistable(&wp, &delta_bl).unwrap());

        let hw = hn_type(&w, &delta_bl).unwrap();
        assert_eq!(
            hw,
            HnType::new(vec![(Scalar::from_rational(rat(1, 2)), vec![2, 1, 1, 0])]).unwrap()
        );
        let hwp = hn_type(&wp, &delta_bl).unwrap();
        assert_eq!(
            hwp,
            HnType::new(vec![
                (Scalar::from_int(1), vec![1, 0, 0, 0]),
                (Scalar::from_rational(rat(1, 3)), vec![1, 1, 1, 0]),
            ])
            .unwrap()
        );
        // The destabilizer is the paper's U with dimension vector (1,0,0,0).
        let u = max_destabilizing(&wp, &delta_bl).unwrap();
        assert_eq!(u.dims, vec![1, 0, 0, 0]);

        // Both equalised; equal rank invariants; distinct skyscrapers.
        assert!(w.is_equalised().unwrap());
        assert!(wp.is_equalised().unwrap());
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(
                    w.generalized_rank(x, y).unwrap(),
                    wp.generalized_rank(x, y).unwrap()
                );
            }
        }
        assert_ne!(
            skyscraper_invariant(&w).unwrap(),
            skyscraper_invariant(&wp).unwrap()
        );
    }

    #[test]
    fn spanning_subrep_of_w_at_bottom_left() {
        let (w, _) = fixtures_ww(FieldSpec::F2);
        let sub = w.spanning_subrep(&VertexSet::from([0])).unwrap();
        assert_eq!(sub.dims, vec![2, 1, 1, 0]);
    }

    #[test]
    fn semistable_filtration_has_length_one() {
        let q = a1();
        let v = i01(&q);
        let alpha = CentralCharge::from_ints(&q, &[1, 1]).unwrap();
        let f = hn_filtration(&v, &alpha).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.steps[0].dims, vec![1, 1]);
    }

    #[test]
    fn simple_modules_are_stable_for_every_charge() {
        let q = a1();
        let s0 = Representation::simple(q.clone(), 0, FieldSpec::F2);
        for vals in [[0, 0], [5, -3], [-1, 7]] {
            let alpha = CentralCharge::from_ints(&q, &vals).unwrap();
            assert!(is_stable(&s0, &alpha).unwrap());
        }
    }

    #[test]
    fn destabilizer_of_summand_example() {
        // I[0,1] + I[0,0] with charge (2,1): the summand at x0 with zero
        // image has slope 2 and is the unique maximal destabilizer.
        let q = a1();
        let v = i01(&q)
            .direct_sum(&Representation::simple(q.clone(), 0, FieldSpec::F2))
            .unwrap();
        let alpha = CentralCharge::from_ints(&q, &[2, 1]).unwrap();
        let d = max_destabilizing(&v, &alpha).unwrap();
        assert_eq!(d.dims, vec![1, 0]);
        let ty = hn_type(&v, &alpha).unwrap();
        assert_eq!(
            ty,
            HnType::new(vec![
                (Scalar::from_int(2), vec![1, 0]),
                (Scalar::from_rational(rat(3, 2)), vec![1, 1]),
            ])
            .unwrap()
        );
    }

    #[test]
    fn brute_force_hn_example_with_multiplicity() {
        // I[0,1] + I[1,1]^2 with charge (2,1) -> [(3/2,(1,1)), (1,(0,2))].
        let q = a1();
        let s1 = Representation::simple(q.clone(), 1, FieldSpec::F2);
        let v = i01(&q).direct_sum(&s1).unwrap().direct_sum(&s1).unwrap();
        let alpha = CentralCharge::from_ints(&q, &[2, 1]).unwrap();
        let ty = hn_type_bruteforce(&v, &alpha, &Limits::default()).unwrap();
        assert_eq!(
            ty,
            HnType::new(vec![
                (Scalar::from_rational(rat(3, 2)), vec![1, 1]),
                (Scalar::from_int(1), vec![0, 2]),
            ])
            .unwrap()
        );
    }

    #[test]
    fn additivity_on_direct_sum_with_self() {
        let q = a1();
        let v = i01(&q);
        let alpha = CentralCharge::from_ints(&q, &[2, 1]).unwrap();
        let doubled = hn_type(&v.direct_sum(&v).unwrap(), &alpha).unwrap();
        let ty = hn_type(&v, &alpha).unwrap();
        assert_eq!(doubled, ty.slopewise_sum(&ty));
    }

    #[test]
    fn thin_path_agrees_with_brute_force() {
        let q = a1();
        let v = i01(&q);
        for vals in [[2, 1], [1, 1], [0, 3], [-2, 5]] {
            let alpha = CentralCharge::from_ints(&q, &vals).unwrap();
            assert_eq!(
                hn_type(&v, &alpha).unwrap(),
                hn_type_bruteforce(&v, &alpha, &Limits::default()).unwrap()
            );
        }
    }

    #[test]
    fn thin_path_charge_vanishing_on_support() {
        // I[1,1] along the skyscraper at x0: slope 0 single layer.
        let q = a1();
        let s1 = Representation::simple(q.clone(), 1, FieldSpec::F2);
        let delta0 = CentralCharge::skyscraper(&q, 0);
        let ty = hn_type(&s1, &delta0).unwrap();
        assert_eq!(ty, HnType::new(vec![(Scalar::zero(), vec![0, 1])]).unwrap());
    }

    #[test]
    fn hn_type_of_zero_is_empty() {
        let q = a1();
        let zero = Representation::zero(q.clone(), FieldSpec::F2);
        let alpha = CentralCharge::from_ints(&q, &[1, 2]).unwrap();
        assert!(hn_type(&zero, &alpha).unwrap().is_empty());
    }

    #[test]
    fn rank_from_hn_on_fixtures() {
        let (w, wp) = fixtures_ww(FieldSpec::F2);
        let q = w.quiver().clone();
        let delta_bl = CentralCharge::skyscraper(&q, 0);
        // W': j = 2, rank across the two steps at the bottom-right is 0 + 1.
        let h = hn_type(&wp, &delta_bl).unwrap();
        assert_eq!(rank_from_hn(&h, 0, 1, wp.dim(0)).unwrap(), 1);
        // y = x returns dim V_x.
        assert_eq!(rank_from_hn(&h, 0, 0, wp.dim(0)).unwrap(), 2);
        // W: single step (2,1,1,0), rank at the top-left is 1.
        let h = hn_type(&w, &delta_bl).unwrap();
        assert_eq!(rank_from_hn(&h, 0, 2, w.dim(0)).unwrap(), 1);
        // Consistency with the direct computation.
        assert_eq!(wp.generalized_rank(0, 1).unwrap(), 1);
    }

    #[test]
    fn counterexample_for_non_stable_interval() {
        let q = a1();
        let v = i01(&q);
        // Constant charge: I[0,1] is semistable but not stable.
        let alpha = CentralCharge::from_ints(&q, &[1, 1]).unwrap();
        let (orig, split) = completeness_counterexample(&v, &alpha).unwrap().unwrap();
        assert_eq!(split.dims(), &[1, 1]);
        assert!(split.map(0).is_zero());
        assert_eq!(
            hn_type(&orig, &alpha).unwrap(),
            hn_type(&split, &alpha).unwrap()
        );
        // Stable charge: no counterexample.
        let alpha = CentralCharge::from_ints(&q, &[2, 1]).unwrap();
        assert!(completeness_counterexample(&v, &alpha).unwrap().is_none());
        // Simple modules never produce one.
        let s = Representation::simple(q.clone(), 0, FieldSpec::F2);
        let weird = CentralCharge::from_ints(&q, &[-4, 9]).unwrap();
        assert!(completeness_counterexample(&s, &weird).unwrap().is_none());
    }

    #[test]
    fn conjugation_preserves_hn_type() {
        let q = a1();
        let v = i01(&q);
        let alpha = CentralCharge::from_ints(&q, &[2, 1]).unwrap();
        for seed in [0u64, 7, 42] {
            let c = v.conjugate(seed).unwrap();
            assert_eq!(
                hn_type_bruteforce(&c, &alpha, &Limits::default()).unwrap(),
                hn_type(&v, &alpha).unwrap()
            );
        }
    }

    #[test]
    fn charge_shift_shifts_slopes() {
        let q = a1();
        let v = i01(&q);
        let alpha = CentralCharge::from_ints(&q, &[2, 1]).unwrap();
        let shift = Scalar::from_rational(rat(5, 3));
        let shifted = alpha.shifted(&shift);
        let t1 = hn_type(&v, &alpha).unwrap();
        let t2 = hn_type(&v, &shifted).unwrap();
        assert_eq!(t1.len(), t2.len());
        for ((s1, d1), (s2, d2)) in t1.steps().iter().zip(t2.steps()) {
            assert_eq!(&(s1 + &shift), s2);
            assert_eq!(d1, d2);
        }
    }

    #[test]
    fn hn_type_value_at_and_json() {
        let q = a1();
        let v = i01(&q);
        let alpha = CentralCharge::from_ints(&q, &[2, 1]).unwrap();
        let ty = hn_type(&v, &alpha).unwrap();
        let lam = Scalar::from_rational(rat(3, 2));
        assert_eq!(ty.value_at(&lam, 2), vec![1, 1]);
        assert_eq!(ty.value_at(&Scalar::from_int(9), 2), vec![0, 0]);
        let json = ty.to_json(&q);
        assert_eq!(json[0]["slope"], "3/2");
    }
}
