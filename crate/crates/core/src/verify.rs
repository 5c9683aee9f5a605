//! Named property suites behind the `verify` command. Each suite runs a
//! deterministic seeded batch at desk scale and reports the offending
//! inputs verbatim on any violation.

use crate::error::{Error, Limits, Result};
use crate::gen;
use crate::grid::{
    build_flow_network, is_complete_grid_charge, lattice_inequality_check, max_flow,
    min_cut_bruteforce, GridVerdict, Rectangle,
};
use crate::hn::{
    hn_type_bruteforce, hn_type_with, skyscraper_invariant, slope_of_dims, CentralCharge,
    HnType,
};
use crate::ladder::{
    charge_family, from_ladder_multiset, hn_type_closed_form, ladder_module,
    nestfree_indecomposables, recover_ladder,
};
use crate::matrix::FieldSpec;
use crate::quiver::{build_grid, build_ladder, build_type_a, grid_coords, Orientation, Quiver};
use crate::rep::Representation;
use crate::scalar::Scalar;
use crate::zigzag::is_complete_type_a;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Outcome of one suite: case count, hard violations, and informational
/// notes (observations that are reported but do not fail the suite).
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport { name: name.to_string(), cases: 0, violations: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const SUITE_NAMES: &[&str] = &[
    "seesaw",
    "additivity",
    "skyscraper-structure",
    "rank-from-hn",
    "kinser-oracle",
    "grid-oracle",
    "flow-mincut",
    "lattice",
    "ladder-closed-form",
    "ladder-roundtrip",
    "fixtures",
];

pub fn run_suite(name: &str, seed: u64, budget: usize) -> Result<SuiteReport> {
    match name {
        "seesaw" => Ok(seesaw(seed, budget)),
        "additivity" => Ok(additivity(seed, budget)),
        "skyscraper-structure" => Ok(skyscraper_structure(seed, budget)),
        "rank-from-hn" => Ok(rank_from_hn_suite(seed, budget)),
        "kinser-oracle" => Ok(kinser_oracle(seed, budget)),
        "grid-oracle" => Ok(grid_oracle(seed, budget)),
        "flow-mincut" => Ok(flow_mincut(seed, budget)),
        "lattice" => Ok(lattice(seed, budget)),
        "ladder-closed-form" => Ok(ladder_closed_form()),
        "ladder-roundtrip" => Ok(ladder_roundtrip(seed, budget)),
        "fixtures" => Ok(fixtures()),
        other => Err(Error::Input(format!(
            "unknown suite '{other}'; available: {}",
            SUITE_NAMES.join(", ")
        ))),
    }
}

/// A rotation of small quivers for the generic HN suites.
fn sample_quiver(rng: &mut ChaCha8Rng) -> Arc<Quiver> {
    match rng.gen_range(0..3u8) {
        0 => {
            let l = rng.gen_range(1..=4usize);
            let tau = Orientation::new((0..l).map(|_| rng.gen_bool(0.5)).collect());
            Arc::new(build_type_a(&tau))
        }
        1 => {
            let shapes: [&[usize]; 3] = [&[1, 1], &[2, 1], &[2, 2]];
            Arc::new(build_grid(shapes[rng.gen_range(0..3)]).unwrap())
        }
        _ => Arc::new(build_ladder(rng.gen_range(1..=2usize)).unwrap()),
    }
}

/// Exactly one of the three slope chains must hold for every short exact
/// sequence of nonzero representations.
pub fn seesaw(seed: u64, budget: usize) -> SuiteReport {
    let mut report = SuiteReport::new("seesaw");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limits = Limits::default();
    while report.cases < budget {
        let quiver = sample_quiver(&mut rng);
        let v = gen::random_representation(&mut rng, &quiver, FieldSpec::F2, 6, 3);
        let Ok(subs) = v.enumerate_subreps(&limits) else { continue };
        let proper: Vec<_> = subs
            .iter()
            .filter(|s| s.total_dim() > 0 && s.total_dim() < v.total_dim())
            .collect();
        if proper.is_empty() {
            continue;
        }
        let sub = proper[rng.gen_range(0..proper.len())];
        let charge = gen::random_charge(&mut rng, &quiver, 10, 4);
        report.cases += 1;
        let quotient_dims: Vec<usize> =
            v.dims().iter().zip(&sub.dims).map(|(a, b)| a - b).collect();
        let mu_u = slope_of_dims(&sub.dims, &charge).unwrap();
        let mu_v = slope_of_dims(v.dims(), &charge).unwrap();
        let mu_w = slope_of_dims(&quotient_dims, &charge).unwrap();
        let chains = [
            mu_u > mu_v && mu_v > mu_w,
            mu_u == mu_v && mu_v == mu_w,
            mu_u < mu_v && mu_v < mu_w,
        ];
        if chains.iter().filter(|&&c| c).count() != 1 {
            report.violations.push(format!(
                "seesaw failed: dims U={:?} V={:?} slopes ({mu_u}, {mu_v}, {mu_w})",
                sub.dims,
                v.dims()
            ));
        }
    }
    report
}

/// HN types add slopewise under direct sums.
pub fn additivity(seed: u64, budget: usize) -> SuiteReport {
    let mut report = SuiteReport::new("additivity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limits = Limits::with_total_dim(12);
    while report.cases < budget {
        let quiver = sample_quiver(&mut rng);
        let v = gen::random_representation(&mut rng, &quiver, FieldSpec::F2, 5, 3);
        let w = gen::random_representation(&mut rng, &quiver, FieldSpec::F2, 5, 3);
        let charge = gen::random_charge(&mut rng, &quiver, 10, 4);
        report.cases += 1;
        let sum = v.direct_sum(&w).unwrap();
        let lhs = hn_type_bruteforce(&sum, &charge, &limits).unwrap();
        let rhs = hn_type_with(&v, &charge, &limits)
            .unwrap()
            .slopewise_sum(&hn_type_with(&w, &charge, &limits).unwrap());
        if lhs != rhs {
            report.violations.push(format!(
                "additivity failed on dims {:?} + {:?}: {lhs:?} vs {rhs:?}",
                v.dims(),
                w.dims()
            ));
        }
    }
    report
}

/// Along a skyscraper charge the filtration saturates the seed vertex by
/// step n-1 at the latest, and each saturating step is spanned by its
/// fibre at the seed. The spanning claim is asserted for equalised inputs
/// and reported otherwise.
pub fn skyscraper_structure(seed: u64, budget: usize) -> SuiteReport {
    let mut report = SuiteReport::new("skyscraper-structure");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limits = Limits::default();
    while report.cases < budget {
        let quiver = sample_quiver(&mut rng);
        let v = gen::random_representation(&mut rng, &quiver, FieldSpec::F2, 6, 3);
        report.cases += 1;
        let equalised = v.is_equalised().unwrap();
        for x in 0..quiver.vertex_count() {
            let charge = CentralCharge::skyscraper(&quiver, x);
            let filtration = crate::hn::hn_filtration_with(&v, &charge, &limits).unwrap();
            let n = filtration.len();
            let j = if v.dim(x) == 0 {
                0
            } else {
                match filtration.steps.iter().position(|s| s.dims[x] == v.dim(x)) {
                    Some(k) => k + 1,
                    None => {
                        report.violations.push(format!(
                            "filtration never saturates vertex {x} on dims {:?}",
                            v.dims()
                        ));
                        continue;
                    }
                }
            };
            if !(j == n || j + 1 == n) {
                report.violations.push(format!(
                    "saturation index {j} not in {{n, n-1}} with n={n} at vertex {x}, dims {:?}",
                    v.dims()
                ));
            }
            for step in filtration.steps.iter().take(j) {
                let step_rep = v.sub_to_representation(step).unwrap();
                let spanned = step_rep
                    .spanning_subrep(&crate::quiver::VertexSet::from([x]))
                    .unwrap();
                if spanned.dims != step_rep.dims() {
                    let msg = format!(
                        "step is not spanned by its fibre at {x}: dims {:?} vs {:?}",
                        spanned.dims,
                        step_rep.dims()
                    );
                    if equalised {
                        report.violations.push(msg);
                    } else {
                        report.notes.push(format!("non-equalised input: {msg}"));
                    }
                }
            }
        }
    }
    report
}

/// Rank recovery from skyscraper HN types agrees with the generalized rank
/// on equalised grid modules, for every comparable vertex pair.
pub fn rank_from_hn_suite(seed: u64, budget: usize) -> SuiteReport {
    let mut report = SuiteReport::new("rank-from-hn");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes: [&[usize]; 3] = [&[2, 1], &[2, 2], &[1, 1, 1]];
    while report.cases < budget {
        let shape = shapes[rng.gen_range(0..shapes.len())];
        let v = gen::random_equalised_grid(&mut rng, shape, FieldSpec::F2, 8).unwrap();
        report.cases += 1;
        let quiver = v.quiver().clone();
        let reach = quiver.reachability().unwrap();
        let sky = skyscraper_invariant(&v).unwrap();
        for x in 0..quiver.vertex_count() {
            for y in 0..quiver.vertex_count() {
                if !reach[x][y] {
                    continue;
                }
                let via_hn = crate::hn::rank_from_hn(&sky[x], x, y, v.dim(x)).unwrap();
                let direct = v.generalized_rank(x, y).unwrap();
                if via_hn != direct {
                    report.violations.push(format!(
                        "rank mismatch at ({x},{y}) on dims {:?}: {via_hn} vs {direct}",
                        v.dims()
                    ));
                }
            }
        }
    }
    report
}

/// The level-set inequality classifier agrees with the all-intervals-stable
/// oracle on every orientation of length <= 4, `budget` random charges each.
pub fn kinser_oracle(seed: u64, budget: usize) -> SuiteReport {
    let mut report = SuiteReport::new("kinser-oracle");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for l in 0..=4usize {
        for bits in 0..(1u32 << l) {
            let tau = Orientation::new((0..l).map(|i| bits >> i & 1 == 1).collect());
            let quiver = build_type_a(&tau);
            for _ in 0..budget {
                let charge = gen::random_charge(&mut rng, &quiver, 12, 4);
                report.cases += 1;
                let classified = is_complete_type_a(&tau, &charge);
                let oracle = (0..=l).all(|a| {
                    (a..=l).all(|b| {
                        gen::thin_stable(&quiver, &(a..=b).collect(), &charge)
                    })
                });
                if classified != oracle {
                    report.violations.push(format!(
                        "classifier {classified} vs oracle {oracle} on tau={tau} charge={:?}",
                        charge.values()
                    ));
                }
            }
        }
    }
    report
}

/// The descending-edge classifier agrees with the all-rectangles-stable
/// oracle off the hyperplane arrangement.
pub fn grid_oracle(seed: u64, budget: usize) -> SuiteReport {
    let mut report = SuiteReport::new("grid-oracle");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limits = Limits::default();
    let shapes: [&[usize]; 4] = [&[1, 1], &[2, 1], &[2, 2], &[1, 1, 1]];
    for shape in shapes {
        let quiver = build_grid(shape).unwrap();
        for _ in 0..budget {
            let Ok(charge) = gen::random_offh_charge(&mut rng, shape, 12, 3) else {
                continue;
            };
            report.cases += 1;
            let verdict = is_complete_grid_charge(&charge, shape, &limits).unwrap();
            let oracle = crate::grid::enumerate_rectangles(shape)
                .into_iter()
                .all(|r| gen::thin_stable(&quiver, &r.support(shape), &charge));
            let classified = verdict == GridVerdict::Complete;
            if classified != oracle {
                report.violations.push(format!(
                    "grid classifier {verdict:?} vs oracle {oracle} on shape {shape:?} \
                     charge={:?}",
                    charge.values()
                ));
            }
        }
    }
    report
}

/// Max-flow equals brute-force min-cut and the cut value is at least 1 on
/// every generated certificate network.
pub fn flow_mincut(seed: u64, budget: usize) -> SuiteReport {
    let mut report = SuiteReport::new("flow-mincut");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limits = Limits::default();
    // Exhaustive over the small grids.
    for shape in [[1usize, 1], [2, 1], [2, 2]] {
        let quiver = build_grid(&shape).unwrap();
        for u in quiver.enumerate_up_closed(&limits).unwrap() {
            if u.is_empty() || u.len() == quiver.vertex_count() {
                continue;
            }
            report.cases += 1;
            let net = build_flow_network(&quiver, &u).unwrap();
            let f = max_flow(&net).unwrap();
            let c = min_cut_bruteforce(&net, &limits).unwrap();
            if f != c {
                report.violations.push(format!("flow {f} != cut {c} at U={u:?} on {shape:?}"));
            }
            if c < Scalar::one() {
                report.violations.push(format!("cut {c} < 1 at U={u:?} on {shape:?}"));
            }
        }
    }
    // Random up-sets on the (3,3) grid.
    let quiver = build_grid(&[3, 3]).unwrap();
    let mut sampled = 0;
    while sampled < budget {
        let u = gen::random_up_closed(&mut rng, &quiver);
        if u.is_empty() || u.len() == quiver.vertex_count() {
            continue;
        }
        sampled += 1;
        report.cases += 1;
        let net = build_flow_network(&quiver, &u).unwrap();
        let f = max_flow(&net).unwrap();
        let c = min_cut_bruteforce(&net, &limits).unwrap();
        if f != c || c < Scalar::one() {
            report.violations.push(format!("flow {f} cut {c} at U={u:?} on (3,3)"));
        }
    }
    report
}

/// The up-set counting inequality, exhaustively on the (2,2) grid and on
/// random pairs over (3,3); plus the four-function consequence on random
/// subsets of grid and ladder lattices.
pub fn lattice(seed: u64, budget: usize) -> SuiteReport {
    let mut report = SuiteReport::new("lattice");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limits = Limits::default();
    let q22 = build_grid(&[2, 2]).unwrap();
    for u in q22.enumerate_up_closed(&limits).unwrap() {
        let down: Vec<usize> = (0..q22.vertex_count()).filter(|v| !u.contains(v)).collect();
        for mask in 0..(1u32 << down.len()) {
            let a = down
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect();
            report.cases += 1;
            if !lattice_inequality_check(&q22, &u, &a).unwrap() {
                report.violations.push(format!("lattice inequality fails: U={u:?} A={a:?}"));
            }
        }
    }
    let q33 = build_grid(&[3, 3]).unwrap();
    for _ in 0..budget {
        let u = gen::random_up_closed(&mut rng, &q33);
        let down: Vec<usize> = (0..q33.vertex_count()).filter(|v| !u.contains(v)).collect();
        let a = down.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
        report.cases += 1;
        if !lattice_inequality_check(&q33, &u, &a).unwrap() {
            report.violations.push(format!("lattice inequality fails: U={u:?} A={a:?}"));
        }
    }
    // Four-function consequence |X||Y| <= |X meet Y| |X join Y| on the grid
    // lattice (coordinatewise min/max).
    let shape = [2usize, 2];
    let n = q22.vertex_count();
    for _ in 0..budget {
        let x = gen::random_subset(&mut rng, n, 0.4);
        let y = gen::random_subset(&mut rng, n, 0.4);
        report.cases += 1;
        let meet: std::collections::BTreeSet<usize> = x
            .iter()
            .flat_map(|&a| y.iter().map(move |&b| (a, b)))
            .map(|(a, b)| {
                let ca = grid_coords(&shape, a);
                let cb = grid_coords(&shape, b);
                let c: Vec<usize> =
                    ca.iter().zip(&cb).map(|(&p, &q)| p.min(q)).collect();
                crate::quiver::grid_index(&shape, &c)
            })
            .collect();
        let join: std::collections::BTreeSet<usize> = x
            .iter()
            .flat_map(|&a| y.iter().map(move |&b| (a, b)))
            .map(|(a, b)| {
                let ca = grid_coords(&shape, a);
                let cb = grid_coords(&shape, b);
                let c: Vec<usize> =
                    ca.iter().zip(&cb).map(|(&p, &q)| p.max(q)).collect();
                crate::quiver::grid_index(&shape, &c)
            })
            .collect();
        if x.len() * y.len() > meet.len() * join.len() {
            report
                .violations
                .push(format!("four-function inequality fails: X={x:?} Y={y:?}"));
        }
    }
    report
}

/// Closed-form HN types of catalog members match brute force along every
/// family charge, lengths 1 and 2 exhaustively.
pub fn ladder_closed_form() -> SuiteReport {
    let mut report = SuiteReport::new("ladder-closed-form");
    let limits = Limits::default();
    for len in 1..=2usize {
        for entry in charge_family(len).unwrap() {
            for indec in nestfree_indecomposables(len) {
                report.cases += 1;
                let closed = hn_type_closed_form(len, &indec, &entry).unwrap();
                let module = ladder_module(len, &indec, FieldSpec::F2).unwrap();
                let brute = hn_type_bruteforce(&module, &entry.charge, &limits).unwrap();
                if closed != brute {
                    report.violations.push(format!(
                        "closed form disagrees with brute force: {indec} along k={} S={:?}",
                        entry.k, entry.s
                    ));
                }
            }
        }
    }
    report
}

/// Generate, conjugate, compute HN types along the whole family, recover,
/// compare.
pub fn ladder_roundtrip(seed: u64, budget: usize) -> SuiteReport {
    let mut report = SuiteReport::new("ladder-roundtrip");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limits = Limits::with_total_dim(12);
    while report.cases < budget {
        let len = rng.gen_range(1..=3usize);
        let ms = gen::random_nestfree_multiset(&mut rng, len, 10, 4);
        let v = from_ladder_multiset(len, &ms, FieldSpec::F2).unwrap();
        let hidden = v.conjugate(rng.gen()).unwrap();
        report.cases += 1;
        let mut hn_types = BTreeMap::new();
        for entry in charge_family(len).unwrap() {
            hn_types.insert(
                entry.key(),
                hn_type_bruteforce(&hidden, &entry.charge, &limits).unwrap(),
            );
        }
        match recover_ladder(&hn_types, len) {
            Ok(recovered) if recovered == ms => {}
            Ok(recovered) => report.violations.push(format!(
                "recovered {recovered:?} but generated {ms:?} at length {len}"
            )),
            Err(e) => report
                .violations
                .push(format!("recovery errored on {ms:?} at length {len}: {e}")),
        }
    }
    report
}

/// The embedded pair with equal rank invariant and distinct skyscraper
/// invariants.
pub fn fixtures() -> SuiteReport {
    let mut report = SuiteReport::new("fixtures");
    let (w, wp) = crate::hn::fixtures_ww(FieldSpec::F2);
    report.cases = 1;
    for x in 0..4 {
        for y in 0..4 {
            if w.generalized_rank(x, y).unwrap() != wp.generalized_rank(x, y).unwrap() {
                report
                    .violations
                    .push(format!("rank invariants differ at ({x},{y})"));
            }
        }
    }
    let sw = skyscraper_invariant(&w).unwrap();
    let swp = skyscraper_invariant(&wp).unwrap();
    if sw == swp {
        report.violations.push("skyscraper invariants coincide".into());
    }
    let quiver = w.quiver().clone();
    let delta_bl = CentralCharge::skyscraper(&quiver, 0);
    let expected_w = HnType::new(vec![(
        Scalar::from_rational(crate::scalar::rat(1, 2)),
        vec![2, 1, 1, 0],
    )])
    .unwrap();
    let expected_wp = HnType::new(vec![
        (Scalar::one(), vec![1, 0, 0, 0]),
        (Scalar::from_rational(crate::scalar::rat(1, 3)), vec![1, 1, 1, 0]),
    ])
    .unwrap();
    let limits = Limits::default();
    if hn_type_bruteforce(&w, &delta_bl, &limits).unwrap() != expected_w {
        report.violations.push("W has the wrong HN type along delta at the minimum".into());
    }
    if hn_type_bruteforce(&wp, &delta_bl, &limits).unwrap() != expected_wp {
        report.violations.push("W' has the wrong HN type along delta at the minimum".into());
    }
    // The pair separating the rank invariant from the skyscraper invariant
    // lives inside every larger grid, and both members are equalised.
    if !(w.is_equalised().unwrap() && wp.is_equalised().unwrap()) {
        report.violations.push("fixtures are not equalised".into());
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_at_small_budget() {
        for name in SUITE_NAMES {
            let report = run_suite(name, 7, 5).unwrap();
            assert!(
                report.passed(),
                "suite {name} failed: {:?}",
                report.violations
            );
            assert!(report.cases > 0, "suite {name} ran no cases");
        }
    }

    #[test]
    fn unknown_suite_is_an_input_error() {
        assert!(matches!(run_suite("nope", 0, 1), Err(Error::Input(_))));
    }
}
