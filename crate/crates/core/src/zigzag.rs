//! Zigzag (type A) persistence: interval modules, barcodes, the level-set
//! classifier of complete central charges, and barcode recovery from a
//! single HN type along a complete charge.

use crate::error::{Error, Result};
use crate::feas::{strict_feasible_witness, StrictIneq};
use crate::hn::{CentralCharge, HnType};
use crate::matrix::FieldSpec;
use crate::quiver::{build_type_a, Orientation, VertexSet};
use crate::rep::Representation;
use crate::scalar::{Rational, Scalar};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Multiset of intervals `[a, b]` with positive multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Barcode {
    intervals: BTreeMap<(usize, usize), usize>,
}

#[derive(Serialize, Deserialize)]
struct BarEntry {
    a: usize,
    b: usize,
    mult: usize,
}

impl Barcode {
    pub fn new() -> Self {
        Barcode::default()
    }

    pub fn add(&mut self, a: usize, b: usize, mult: usize) -> Result<()> {
        if a > b {
            return Err(Error::Input(format!("interval [{a},{b}] has a > b")));
        }
        if mult == 0 {
            return Err(Error::Input("multiplicities must be positive".into()));
        }
        *self.intervals.entry((a, b)).or_insert(0) += mult;
        Ok(())
    }

    pub fn intervals(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.intervals.iter().map(|(&(a, b), &m)| (a, b, m))
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.intervals.iter().map(|(&(a, b), &m)| m * (b - a + 1)).sum()
    }

    pub fn dimvec(&self, len: usize) -> Vec<usize> {
        let mut out = vec![0; len + 1];
        for (&(a, b), &m) in &self.intervals {
            for d in out.iter_mut().take(b + 1).skip(a) {
                *d += m;
            }
        }
        out
    }

    /// Is there a pair of strictly nested intervals `[a,b]`, `[c,d]` with
    /// `a < c <= d < b`?
    pub fn has_strict_nesting(&self) -> bool {
        let bars: Vec<(usize, usize)> = self.intervals.keys().copied().collect();
        bars.iter().any(|&(a, b)| {
            bars.iter().any(|&(c, d)| a < c && d < b)
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(
            self.intervals
                .iter()
                .map(|(&(a, b), &m)| BarEntry { a, b, mult: m })
                .collect::<Vec<_>>(),
        )
        .expect("barcode serialization")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let entries: Vec<BarEntry> = serde_json::from_value(value.clone())
            .map_err(|e| Error::Input(format!("bad barcode JSON: {e}")))?;
        let mut out = Barcode::new();
        for e in entries {
            out.add(e.a, e.b, e.mult)?;
        }
        Ok(out)
    }
}

/// The two staircase functions of an orientation and their level-set
/// blocks. `chi` counts forward edges, `eta` backward edges; the blocks
/// partition `{0..l}` into consecutive runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSets {
    pub chi: Vec<usize>,
    pub eta: Vec<usize>,
    pub x_blocks: Vec<(usize, usize)>,
    pub y_blocks: Vec<(usize, usize)>,
}

pub fn chi_eta(tau: &Orientation) -> LevelSets {
    let l = tau.len();
    let mut chi = vec![0usize; l + 1];
    let mut eta = vec![0usize; l + 1];
    for i in 1..=l {
        chi[i] = chi[i - 1] + usize::from(tau.forward(i));
        eta[i] = eta[i - 1] + usize::from(!tau.forward(i));
    }
    LevelSets { x_blocks: blocks_of(&chi), y_blocks: blocks_of(&eta), chi, eta }
}

fn blocks_of(values: &[usize]) -> Vec<(usize, usize)> {
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 1..values.len() {
        if values[i] != values[start] {
            blocks.push((start, i - 1));
            start = i;
        }
    }
    blocks.push((start, values.len() - 1));
    blocks
}

/// The interval module `I_tau[a, b]`: one-dimensional spaces on `[a, b]`
/// with identity maps inside the support.
pub fn interval_module(
    tau: &Orientation,
    a: usize,
    b: usize,
    field: FieldSpec,
) -> Result<Representation> {
    if a > b || b > tau.len() {
        return Err(Error::Input(format!(
            "interval [{a},{b}] is not inside [0,{}]",
            tau.len()
        )));
    }
    let quiver = Arc::new(build_type_a(tau));
    let support: VertexSet = (a..=b).collect();
    Ok(Representation::thin_from_support(quiver, &support, field))
}

/// Direct sum of interval modules with the barcode's multiplicities.
pub fn from_barcode(tau: &Orientation, barcode: &Barcode, field: FieldSpec) -> Result<Representation> {
    let quiver = Arc::new(build_type_a(tau));
    let mut acc = Representation::zero(quiver, field);
    for (a, b, mult) in barcode.intervals() {
        if b > tau.len() {
            return Err(Error::Input(format!(
                "interval [{a},{b}] is outside the quiver of length {}",
                tau.len()
            )));
        }
        let module = interval_module(tau, a, b, field)?;
        for _ in 0..mult {
            acc = acc.direct_sum(&module)?;
        }
    }
    Ok(acc)
}

fn interval_slope(charge: &CentralCharge, a: usize, b: usize) -> Scalar {
    let mut sum = Scalar::zero();
    for i in a..=b {
        sum = &sum + charge.value(i);
    }
    sum.scale(&Rational::new(1, (b - a + 1) as i64).unwrap())
}

/// Is the charge complete for this orientation? Exactly evaluates the two
/// inequality chains: interval slopes strictly decreasing across the
/// chi-blocks and strictly increasing across the eta-blocks. For the
/// equioriented case this reduces to `alpha(x_i) > alpha(x_{i+1})`.
pub fn is_complete_type_a(tau: &Orientation, charge: &CentralCharge) -> bool {
    type_a_violations(tau, charge).is_empty()
}

/// The violated inequalities, as human-readable strings; empty means the
/// charge is complete.
pub fn type_a_violations(tau: &Orientation, charge: &CentralCharge) -> Vec<String> {
    let ls = chi_eta(tau);
    let mut out = Vec::new();
    for w in ls.x_blocks.windows(2) {
        let (a0, b0) = w[0];
        let (a1, b1) = w[1];
        if interval_slope(charge, a0, b0) <= interval_slope(charge, a1, b1) {
            out.push(format!(
                "slope(I[{a0},{b0}]) > slope(I[{a1},{b1}]) fails"
            ));
        }
    }
    for w in ls.y_blocks.windows(2) {
        let (a0, b0) = w[0];
        let (a1, b1) = w[1];
        if interval_slope(charge, a0, b0) >= interval_slope(charge, a1, b1) {
            out.push(format!(
                "slope(I[{a0},{b0}]) < slope(I[{a1},{b1}]) fails"
            ));
        }
    }
    out
}

/// An exact rational complete charge for the orientation, produced by
/// Fourier-Motzkin on the level-set inequalities. The complete region is a
/// nonempty open cone, so this always succeeds.
pub fn complete_charge(tau: &Orientation) -> Result<CentralCharge> {
    let ls = chi_eta(tau);
    let n = tau.len() + 1;
    let mut ineqs = Vec::new();
    let block_row = |(a, b): (usize, usize), sign: i64| -> Vec<Rational> {
        let mut row = vec![Rational::zero(); n];
        let len = (b - a + 1) as i64;
        for r in row.iter_mut().take(b + 1).skip(a) {
            *r = Rational::new(sign, len).unwrap();
        }
        row
    };
    for w in ls.x_blocks.windows(2) {
        // slope(X_k) - slope(X_{k+1}) > 0
        let mut row = block_row(w[0], 1);
        for (r, s) in row.iter_mut().zip(block_row(w[1], -1)) {
            *r = &*r + &s;
        }
        ineqs.push(StrictIneq::positive(row));
    }
    for w in ls.y_blocks.windows(2) {
        // slope(Y_{k+1}) - slope(Y_k) > 0
        let mut row = block_row(w[1], 1);
        for (r, s) in row.iter_mut().zip(block_row(w[0], -1)) {
            *r = &*r + &s;
        }
        ineqs.push(StrictIneq::positive(row));
    }
    let witness = strict_feasible_witness(n, &ineqs).ok_or_else(|| {
        Error::Internal("the complete region of a type A quiver is provably nonempty".into())
    })?;
    let quiver = build_type_a(tau);
    CentralCharge::new(&quiver, witness.into_iter().map(Scalar::from_rational).collect())
}

/// Recover the barcode from an HN type along a complete charge. For each
/// slope level the equal-slope intervals have pairwise distinct right
/// endpoints, so multiplicities peel off right to left.
pub fn recover_barcode(hn: &HnType, tau: &Orientation, charge: &CentralCharge) -> Result<Barcode> {
    let violations = type_a_violations(tau, charge);
    if !violations.is_empty() {
        return Err(Error::Input(format!(
            "charge is not complete for this orientation: {}",
            violations.join("; ")
        )));
    }
    let l = tau.len();
    let mut barcode = Barcode::new();
    for (lambda, dims) in hn.steps() {
        let mut remaining = dims.clone();
        // Candidate intervals with this exact slope, by right endpoint.
        let mut candidates: Vec<(usize, usize)> = Vec::new();
        for b in 0..=l {
            for a in 0..=b {
                if &interval_slope(charge, a, b) == lambda {
                    candidates.push((a, b));
                }
            }
        }
        candidates.sort_by(|x, y| y.1.cmp(&x.1));
        for w in candidates.windows(2) {
            if w[0].1 == w[1].1 {
                return Err(Error::Inconsistency(format!(
                    "two equal-slope intervals share right endpoint {}; impossible for a \
                     complete charge",
                    w[0].1
                )));
            }
        }
        for (a, b) in candidates {
            let mult = remaining[b];
            if mult == 0 {
                continue;
            }
            for (i, r) in remaining.iter_mut().enumerate().take(b + 1).skip(a) {
                if *r < mult {
                    return Err(Error::Inconsistency(format!(
                        "dimension vector is not expressible: short at vertex {i}"
                    )));
                }
                *r -= mult;
            }
            barcode.add(a, b, mult)?;
        }
        if remaining.iter().any(|&r| r > 0) {
            return Err(Error::Inconsistency(
                "dimension vector is not expressible by equal-slope intervals".into(),
            ));
        }
    }
    Ok(barcode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Limits;
    use crate::hn::{hn_type_bruteforce, is_stable};
    use crate::quiver::build_type_a;
    use crate::scalar::rat;

    #[test]
    fn interval_module_shapes() {
        let tau: Orientation = "111".parse().unwrap();
        let whole = interval_module(&tau, 0, 3, FieldSpec::F2).unwrap();
        assert_eq!(whole.dims(), &[1, 1, 1, 1]);
        assert!(whole.map(1).rows() == 1 && !whole.map(1).is_zero());
        let simple = interval_module(&tau, 2, 2, FieldSpec::F2).unwrap();
        assert_eq!(simple.dims(), &[0, 0, 1, 0]);
        let mid = interval_module(&tau, 1, 2, FieldSpec::F2).unwrap();
        assert_eq!(mid.dims(), &[0, 1, 1, 0]);
        assert!(interval_module(&tau, 2, 1, FieldSpec::F2).is_err());
        assert!(interval_module(&tau, 0, 9, FieldSpec::F2).is_err());
    }

    #[test]
    fn from_barcode_dims() {
        let tau: Orientation = "1".parse().unwrap();
        let mut b = Barcode::new();
        b.add(0, 1, 1).unwrap();
        b.add(1, 1, 2).unwrap();
        let v = from_barcode(&tau, &b, FieldSpec::F2).unwrap();
        assert_eq!(v.dims(), &[1, 3]);
        let empty = from_barcode(&tau, &Barcode::new(), FieldSpec::F2).unwrap();
        assert!(empty.is_zero());
        let mut single = Barcode::new();
        single.add(0, 0, 1).unwrap();
        let v = from_barcode(&tau, &single, FieldSpec::F2).unwrap();
        assert_eq!(v.dims(), &[1, 0]);
    }

    #[test]
    fn chi_eta_paper_example() {
        let tau: Orientation = "1101".parse().unwrap();
        let ls = chi_eta(&tau);
        assert_eq!(ls.chi, vec![0, 1, 2, 2, 3]);
        assert_eq!(ls.eta, vec![0, 0, 0, 1, 1]);
        assert_eq!(ls.x_blocks, vec![(0, 0), (1, 1), (2, 3), (4, 4)]);
        assert_eq!(ls.y_blocks, vec![(0, 2), (3, 4)]);
    }

    #[test]
    fn chi_eta_equioriented() {
        let tau = Orientation::equioriented(3);
        let ls = chi_eta(&tau);
        assert_eq!(ls.chi, vec![0, 1, 2, 3]);
        assert_eq!(ls.eta, vec![0, 0, 0, 0]);
        assert_eq!(ls.y_blocks, vec![(0, 3)]);
    }

    #[test]
    fn chi_eta_blocks_for_10() {
        let tau: Orientation = "10".parse().unwrap();
        let ls = chi_eta(&tau);
        assert_eq!(ls.x_blocks, vec![(0, 0), (1, 2)]);
        assert_eq!(ls.y_blocks, vec![(0, 1), (2, 2)]);
    }

    #[test]
    fn classifier_examples() {
        let tau = Orientation::equioriented(2);
        let q = build_type_a(&tau);
        assert!(is_complete_type_a(
            &tau,
            &CentralCharge::from_ints(&q, &[3, 2, 1]).unwrap()
        ));
        let tau1 = Orientation::equioriented(1);
        let q1 = build_type_a(&tau1);
        assert!(!is_complete_type_a(
            &tau1,
            &CentralCharge::from_ints(&q1, &[1, 1]).unwrap()
        ));
        let tau10: Orientation = "10".parse().unwrap();
        let q10 = build_type_a(&tau10);
        let charge = CentralCharge::from_ints(&q10, &[2, -3, 1]).unwrap();
        assert!(is_complete_type_a(&tau10, &charge));
        // Oracle: all six interval modules are stable along that charge.
        for a in 0..=2usize {
            for b in a..=2 {
                let m = interval_module(&tau10, a, b, FieldSpec::F2).unwrap();
                assert!(is_stable(&m, &charge).unwrap(), "I[{a},{b}]");
            }
        }
    }

    #[test]
    fn classifier_invariant_under_constant_shift() {
        let tau: Orientation = "1101".parse().unwrap();
        let q = build_type_a(&tau);
        for vals in [[3, -1, 4, 1, -5], [2, 2, 7, 0, 1]] {
            let charge = CentralCharge::from_ints(&q, &vals).unwrap();
            let shifted = charge.shifted(&Scalar::from_rational(rat(9, 7)));
            assert_eq!(
                is_complete_type_a(&tau, &charge),
                is_complete_type_a(&tau, &shifted)
            );
        }
    }

    #[test]
    fn complete_charge_witness_all_orientations() {
        for l in 0..=4usize {
            for bits in 0..(1u32 << l) {
                let tau = Orientation::new((0..l).map(|i| bits >> i & 1 == 1).collect());
                let charge = complete_charge(&tau).unwrap();
                assert!(is_complete_type_a(&tau, &charge), "tau = {tau}");
            }
        }
    }

    #[test]
    fn recover_barcode_example() {
        // hn = [(3/2,(1,1)), (1,(0,2))] with charge (2,1) on A_1.
        let tau: Orientation = "1".parse().unwrap();
        let q = build_type_a(&tau);
        let charge = CentralCharge::from_ints(&q, &[2, 1]).unwrap();
        let hn = HnType::new(vec![
            (Scalar::from_rational(rat(3, 2)), vec![1, 1]),
            (Scalar::from_int(1), vec![0, 2]),
        ])
        .unwrap();
        let b = recover_barcode(&hn, &tau, &charge).unwrap();
        let mut expected = Barcode::new();
        expected.add(0, 1, 1).unwrap();
        expected.add(1, 1, 2).unwrap();
        assert_eq!(b, expected);
        // Empty HN type -> empty barcode.
        assert!(recover_barcode(&HnType::empty(), &tau, &charge).unwrap().is_empty());
        // Incomplete charge -> refusal.
        let bad = CentralCharge::from_ints(&q, &[1, 1]).unwrap();
        assert!(matches!(recover_barcode(&hn, &tau, &bad), Err(Error::Input(_))));
    }

    #[test]
    fn round_trip_with_conjugation() {
        let tau: Orientation = "101".parse().unwrap();
        let charge = complete_charge(&tau).unwrap();
        let mut b = Barcode::new();
        b.add(0, 2, 1).unwrap();
        b.add(1, 3, 2).unwrap();
        b.add(2, 2, 1).unwrap();
        let v = from_barcode(&tau, &b, FieldSpec::F2).unwrap();
        let hidden = v.conjugate(99).unwrap();
        let hn = hn_type_bruteforce(&hidden, &charge, &Limits::default()).unwrap();
        assert_eq!(recover_barcode(&hn, &tau, &charge).unwrap(), b);
    }

    #[test]
    fn barcode_json_and_nesting() {
        let mut b = Barcode::new();
        b.add(0, 3, 1).unwrap();
        b.add(1, 2, 1).unwrap();
        assert!(b.has_strict_nesting());
        let j = b.to_json();
        assert_eq!(Barcode::from_json(&j).unwrap(), b);
        let mut flat = Barcode::new();
        flat.add(0, 2, 1).unwrap();
        flat.add(1, 2, 3).unwrap();
        assert!(!flat.has_strict_nesting());
    }
}
