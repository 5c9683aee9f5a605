//! Seeded random generation of modules with retained ground truth. All
//! randomness flows through a caller-supplied ChaCha generator, so a seed
//! fully determines every artifact.

use crate::error::{Error, Result};
use crate::grid::{rectangle_module, Rectangle, RectangleMultiset};
use crate::hn::CentralCharge;
use crate::ladder::{nestfree_indecomposables, LadderMultiset};
use crate::matrix::{FieldSpec, Matrix};
use crate::quiver::{build_grid, Quiver, VertexSet};
use crate::rep::{Representation, Subrepresentation};
use crate::scalar::{Rational, Scalar};
use crate::zigzag::Barcode;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Random rational charge with numerators in `[-span, span]` and
/// denominators in `[1, max_den]`.
pub fn random_charge(
    rng: &mut ChaCha8Rng,
    quiver: &Quiver,
    span: i64,
    max_den: i64,
) -> CentralCharge {
    let values = (0..quiver.vertex_count())
        .map(|_| {
            let num = rng.gen_range(-span..=span);
            let den = rng.gen_range(1..=max_den);
            Scalar::from_rational(Rational::new(num, den).expect("positive denominator"))
        })
        .collect();
    CentralCharge::new(quiver, values).expect("matching length")
}

/// Random barcode on `[0, len]` with total dimension at most `dim_budget`.
pub fn random_barcode(rng: &mut ChaCha8Rng, len: usize, dim_budget: usize) -> Barcode {
    let mut barcode = Barcode::new();
    let mut total = 0usize;
    for _ in 0..4 * dim_budget {
        let a = rng.gen_range(0..=len);
        let b = rng.gen_range(a..=len);
        let cost = b - a + 1;
        if total + cost > dim_budget {
            continue;
        }
        barcode.add(a, b, 1).expect("valid interval");
        total += cost;
    }
    barcode
}

/// Random rectangle multiset with bounded total and per-vertex dimension.
pub fn random_rect_multiset(
    rng: &mut ChaCha8Rng,
    shape: &[usize],
    dim_budget: usize,
    max_vertex_dim: usize,
) -> RectangleMultiset {
    let mut out = RectangleMultiset::new();
    let mut total = 0usize;
    let n: usize = shape.iter().map(|&l| l + 1).product();
    let mut vdims = vec![0usize; n];
    for _ in 0..4 * dim_budget {
        let lo: Vec<usize> = shape.iter().map(|&l| rng.gen_range(0..=l)).collect();
        let hi: Vec<usize> =
            lo.iter().zip(shape).map(|(&a, &l)| rng.gen_range(a..=l)).collect();
        let rect = Rectangle::new(lo, hi).expect("lo <= hi");
        let cost = rect.point_count();
        if total + cost > dim_budget {
            continue;
        }
        let support = rect.support(shape);
        if support.iter().any(|&v| vdims[v] + 1 > max_vertex_dim) {
            continue;
        }
        for &v in &support {
            vdims[v] += 1;
        }
        total += cost;
        *out.entry(rect).or_insert(0) += 1;
    }
    out
}

fn strictly_nested(x: (usize, usize), y: (usize, usize)) -> bool {
    (x.0 < y.0 && y.1 < x.1) || (y.0 < x.0 && x.1 < y.1)
}

/// Random nestfree ladder multiset: candidates are drawn from the catalog
/// and kept only when both row barcodes stay free of strictly nested pairs
/// and the dimension bounds hold.
pub fn random_nestfree_multiset(
    rng: &mut ChaCha8Rng,
    len: usize,
    dim_budget: usize,
    max_vertex_dim: usize,
) -> LadderMultiset {
    let catalog = nestfree_indecomposables(len);
    let mut out = LadderMultiset::new();
    let mut top_bars: Vec<(usize, usize)> = Vec::new();
    let mut bot_bars: Vec<(usize, usize)> = Vec::new();
    let mut vdims = vec![0usize; 2 * (len + 1)];
    let mut total = 0usize;
    for _ in 0..6 * dim_budget {
        let cand = catalog[rng.gen_range(0..catalog.len())].clone();
        if total + cand.total_dim() > dim_budget {
            continue;
        }
        if let Some(t) = cand.top() {
            if top_bars.iter().any(|&existing| strictly_nested(existing, t)) {
                continue;
            }
        }
        if let Some(b) = cand.bottom() {
            if bot_bars.iter().any(|&existing| strictly_nested(existing, b)) {
                continue;
            }
        }
        let dimvec = cand.dimvec(len);
        if vdims.iter().zip(&dimvec).any(|(v, d)| v + d > max_vertex_dim) {
            continue;
        }
        for (v, d) in vdims.iter_mut().zip(&dimvec) {
            *v += d;
        }
        total += cand.total_dim();
        if let Some(t) = cand.top() {
            top_bars.push(t);
        }
        if let Some(b) = cand.bottom() {
            bot_bars.push(b);
        }
        *out.entry(cand).or_insert(0) += 1;
    }
    out
}

/// Random representation: random dimensions summing to at most
/// `dim_budget` (each at most `max_vertex_dim`) and uniform random edge
/// matrices. Nonzero unless the budget is zero.
pub fn random_representation(
    rng: &mut ChaCha8Rng,
    quiver: &Arc<Quiver>,
    field: FieldSpec,
    dim_budget: usize,
    max_vertex_dim: usize,
) -> Representation {
    let p = field.modulus().unwrap_or(2);
    let n = quiver.vertex_count();
    let mut dims = vec![0usize; n];
    let mut budget = dim_budget;
    // Ensure at least one nonzero space.
    if budget > 0 {
        dims[rng.gen_range(0..n)] = 1;
        budget -= 1;
    }
    while budget > 0 {
        let v = rng.gen_range(0..n);
        if dims[v] < max_vertex_dim {
            dims[v] += 1;
        }
        budget -= 1;
    }
    let maps = quiver
        .edges()
        .map(|(s, t, _)| {
            let mut m = Matrix::zeros(dims[t], dims[s]);
            for i in 0..dims[t] {
                for j in 0..dims[s] {
                    m[(i, j)] = Rational::from_int(rng.gen_range(0..p) as i64);
                }
            }
            m
        })
        .collect();
    Representation::new(quiver.clone(), field, dims, maps).expect("entries are residues")
}

/// Random equalised grid module: the cokernel of a random morphism between
/// direct sums of up-set modules (the projectives of the grid poset), which
/// is equalised by construction. Falls back to a random thin up-set module
/// if no draw fits the dimension budget.
pub fn random_equalised_grid(
    rng: &mut ChaCha8Rng,
    shape: &[usize],
    field: FieldSpec,
    max_total_dim: usize,
) -> Result<Representation> {
    let quiver = Arc::new(build_grid(shape)?);
    let n = quiver.vertex_count();
    let reach = quiver.reachability()?;
    let p = field
        .modulus()
        .ok_or_else(|| Error::Unsupported("random generation works over prime fields".into()))?;
    for _ in 0..60 {
        let g = rng.gen_range(1..=3usize);
        let h = rng.gen_range(0..=3usize);
        let gens: Vec<usize> = (0..g).map(|_| rng.gen_range(0..n)).collect();
        let rels: Vec<usize> = (0..h).map(|_| rng.gen_range(0..n)).collect();
        // Free module: one slot per generator wherever it reaches.
        let dims: Vec<usize> =
            (0..n).map(|z| gens.iter().filter(|&&pi| reach[pi][z]).count()).collect();
        if dims.iter().sum::<usize>() > 3 * max_total_dim {
            continue;
        }
        let slots = |z: usize| -> Vec<usize> {
            gens.iter()
                .enumerate()
                .filter(|&(_, &pi)| reach[pi][z])
                .map(|(i, _)| i)
                .collect()
        };
        let maps: Vec<Matrix> = quiver
            .edges()
            .map(|(s, t, _)| {
                let ss = slots(s);
                let ts = slots(t);
                let mut m = Matrix::zeros(ts.len(), ss.len());
                for (col, i) in ss.iter().enumerate() {
                    let row = ts.iter().position(|j| j == i).expect("slots persist upward");
                    m[(row, col)] = Rational::one();
                }
                m
            })
            .collect();
        let free = Representation::new(quiver.clone(), field, dims.clone(), maps)?;
        // Random morphism from relation projectives: coefficients are frozen
        // at the relation vertex.
        let coeffs: Vec<Vec<u8>> = rels
            .iter()
            .map(|&qj| {
                gens.iter()
                    .map(|&pi| if reach[pi][qj] { rng.gen_range(0..p) } else { 0 })
                    .collect()
            })
            .collect();
        let bases: Vec<Matrix> = (0..n)
            .map(|z| {
                let zslots = slots(z);
                let rows: Vec<Vec<Rational>> = rels
                    .iter()
                    .enumerate()
                    .filter(|&(_, &qj)| reach[qj][z])
                    .map(|(j, _)| {
                        zslots
                            .iter()
                            .map(|&i| Rational::from_int(coeffs[j][i] as i64))
                            .collect()
                    })
                    .collect();
                let m = Matrix::from_rows(rows, zslots.len()).expect("uniform width");
                m.row_space(&field)
            })
            .collect();
        let image = Subrepresentation::from_bases(bases);
        debug_assert!(image.is_closed_in(&free));
        let quotient = free.quotient(&image)?;
        let total = quotient.total_dim();
        if total >= 1 && total <= max_total_dim {
            debug_assert!(quotient.is_equalised()?);
            return Ok(quotient);
        }
    }
    // Fallback: a thin up-set module, trivially equalised.
    let seed_vertex = rng.gen_range(0..n);
    let up = quiver.up_closure(&VertexSet::from([seed_vertex]));
    Ok(Representation::thin_from_support(quiver, &up, field))
}

/// Random up-closed vertex subset: the up-closure of a random subset.
pub fn random_up_closed(rng: &mut ChaCha8Rng, quiver: &Quiver) -> VertexSet {
    let n = quiver.vertex_count();
    let picks: VertexSet = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
    quiver.up_closure(&picks)
}

/// Random subset of `0..n`.
pub fn random_subset(rng: &mut ChaCha8Rng, n: usize, density: f64) -> VertexSet {
    (0..n).filter(|_| rng.gen_bool(density)).collect()
}

/// Random charge off the grid hyperplane arrangement, by rejection.
pub fn random_offh_charge(
    rng: &mut ChaCha8Rng,
    shape: &[usize],
    span: i64,
    max_den: i64,
) -> Result<CentralCharge> {
    let quiver = build_grid(shape)?;
    let limits = crate::error::Limits::default();
    for _ in 0..200 {
        let charge = random_charge(rng, &quiver, span, max_den);
        if crate::grid::in_hyperplane_arrangement(&charge, shape, &limits)?.is_none() {
            return Ok(charge);
        }
    }
    Err(Error::Internal("could not sample a charge off the arrangement".into()))
}

/// Random descending grid charge off the arrangement: seeded jitter on the
/// powers-of-two descent.
pub fn random_descending_offh_charge(
    rng: &mut ChaCha8Rng,
    shape: &[usize],
) -> Result<CentralCharge> {
    let quiver = build_grid(shape)?;
    let limits = crate::error::Limits::default();
    let n = quiver.vertex_count();
    for _ in 0..200 {
        let values: Vec<Scalar> = (0..n)
            .map(|i| {
                let base = Rational::from_big(
                    num::BigInt::from(1) << (n - i),
                    num::BigInt::from(1),
                )
                .unwrap();
                let jitter = Rational::new(rng.gen_range(0..100), 101).unwrap();
                Scalar::from_rational(base + jitter)
            })
            .collect();
        let charge = CentralCharge::new(&quiver, values)?;
        let descending = quiver.edges().all(|(s, t, _)| charge.value(s) > charge.value(t));
        if descending
            && crate::grid::in_hyperplane_arrangement(&charge, shape, &limits)?.is_none()
        {
            return Ok(charge);
        }
    }
    Err(Error::Internal("could not sample a descending charge off the arrangement".into()))
}

/// Thin stability oracle: a thin module with the given support is stable
/// iff every nonempty proper up-closed subset has strictly smaller slope.
pub fn thin_stable(quiver: &Quiver, support: &VertexSet, charge: &CentralCharge) -> bool {
    let edges: Vec<(usize, usize)> = quiver
        .edges()
        .filter(|(s, t, _)| support.contains(s) && support.contains(t))
        .map(|(s, t, _)| (s, t))
        .collect();
    let whole_num: Scalar = support
        .iter()
        .fold(Scalar::zero(), |acc, &v| &acc + charge.value(v));
    let whole_den = support.len() as i64;
    for u in crate::quiver::up_closed_subsets_within(support, &edges) {
        if u.is_empty() || u.len() == support.len() {
            continue;
        }
        let num: Scalar = u.iter().fold(Scalar::zero(), |acc, &v| &acc + charge.value(v));
        // num/|u| >= whole_num/whole_den ?
        let lhs = num.scale(&Rational::from_int(whole_den));
        let rhs = whole_num.scale(&Rational::from_int(u.len() as i64));
        if lhs >= rhs {
            return false;
        }
    }
    true
}
