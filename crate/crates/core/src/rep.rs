//! Finite-dimensional quiver representations over `F_2`, `F_3` or `Q`, with
//! exact linear algebra: validation, direct sums, spanning subrepresentations,
//! equalisedness, subrepresentation enumeration, generalized rank, and
//! seeded basis-change obfuscation.

use crate::error::{Error, Limits, Result};
use crate::matrix::{for_each_subspace, FieldSpec, FpMat, Matrix};
use crate::quiver::{Quiver, VertexSet};
use crate::scalar::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A representation: a dimension for every vertex and an exact matrix of
/// shape `(dim target x dim source)` for every edge. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    quiver: Arc<Quiver>,
    field: FieldSpec,
    dims: Vec<usize>,
    maps: Vec<Matrix>,
}

impl Representation {
    pub fn new(
        quiver: Arc<Quiver>,
        field: FieldSpec,
        dims: Vec<usize>,
        maps: Vec<Matrix>,
    ) -> Result<Self> {
        let rep = Representation { quiver, field, dims, maps };
        let problems = rep.validate();
        if problems.is_empty() {
            Ok(rep)
        } else {
            Err(Error::Input(problems.join("; ")))
        }
    }

    /// The zero representation.
    pub fn zero(quiver: Arc<Quiver>, field: FieldSpec) -> Self {
        let dims = vec![0; quiver.vertex_count()];
        let maps = quiver.edges().map(|_| Matrix::zeros(0, 0)).collect();
        Representation { quiver, field, dims, maps }
    }

    /// Thin representation `I[U]`: one-dimensional spaces on `support`,
    /// identity maps whenever both endpoints carry the field, zero otherwise.
    pub fn thin_from_support(quiver: Arc<Quiver>, support: &VertexSet, field: FieldSpec) -> Self {
        let dims: Vec<usize> =
            (0..quiver.vertex_count()).map(|v| usize::from(support.contains(&v))).collect();
        let maps = quiver
            .edges()
            .map(|(s, t, _)| {
                if support.contains(&s) && support.contains(&t) {
                    Matrix::identity(1)
                } else {
                    Matrix::zeros(dims[t], dims[s])
                }
            })
            .collect();
        Representation { quiver, field, dims, maps }
    }

    /// Simple representation concentrated at one vertex.
    pub fn simple(quiver: Arc<Quiver>, vertex: usize, field: FieldSpec) -> Self {
        Representation::thin_from_support(quiver, &VertexSet::from([vertex]), field)
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, v: usize) -> usize {
        self.dims[v]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn map(&self, e: usize) -> &Matrix {
        &self.maps[e]
    }

    pub fn support(&self) -> VertexSet {
        (0..self.dims.len()).filter(|&v| self.dims[v] > 0).collect()
    }

    pub fn is_thin(&self) -> bool {
        self.dims.iter().all(|&d| d <= 1)
    }

    /// Shape and field diagnostics; empty means the representation is valid.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if self.dims.len() != self.quiver.vertex_count() {
            problems.push(format!(
                "expected {} dimensions, found {}",
                self.quiver.vertex_count(),
                self.dims.len()
            ));
            return problems;
        }
        if self.maps.len() != self.quiver.edge_count() {
            problems.push(format!(
                "expected {} edge maps, found {}",
                self.quiver.edge_count(),
                self.maps.len()
            ));
            return problems;
        }
        for (i, (s, t, label)) in self.quiver.edges().enumerate() {
            let m = &self.maps[i];
            if m.rows() != self.dims[t] || m.cols() != self.dims[s] {
                problems.push(format!(
                    "edge '{label}' has shape {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    self.dims[t],
                    self.dims[s]
                ));
                continue;
            }
            for entry in m.entries() {
                if !self.field.is_canonical(entry) {
                    problems.push(format!(
                        "edge '{label}' entry {entry} is not a canonical element of {}",
                        self.field.name()
                    ));
                    break;
                }
            }
        }
        problems
    }

    /// Vertex-wise direct sum with block-diagonal edge maps.
    pub fn direct_sum(&self, other: &Representation) -> Result<Representation> {
        if self.quiver.as_ref() != other.quiver.as_ref() {
            return Err(Error::Input("direct sum of representations of different quivers".into()));
        }
        if self.field != other.field {
            return Err(Error::Input("direct sum over mismatched fields".into()));
        }
        let dims: Vec<usize> =
            self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let maps = self
            .quiver
            .edges()
            .enumerate()
            .map(|(i, (s, t, _))| {
                let a = &self.maps[i];
                let b = &other.maps[i];
                let mut m = Matrix::zeros(dims[t], dims[s]);
                for r in 0..a.rows() {
                    for c in 0..a.cols() {
                        m[(r, c)] = a[(r, c)].clone();
                    }
                }
                for r in 0..b.rows() {
                    for c in 0..b.cols() {
                        m[(self.dims[t] + r, self.dims[s] + c)] = b[(r, c)].clone();
                    }
                }
                m
            })
            .collect();
        Ok(Representation { quiver: self.quiver.clone(), field: self.field, dims, maps })
    }

    /// Are all parallel path composites identical? Decided by a dynamic
    /// programme that pushes the composite from each start vertex along the
    /// topological order and compares at every merge, which covers every
    /// pair of parallel paths without enumerating them.
    pub fn is_equalised(&self) -> Result<bool> {
        let order = self.quiver.topo_order()?;
        let n = self.quiver.vertex_count();
        for &x in &order {
            let mut composite: Vec<Option<Matrix>> = vec![None; n];
            composite[x] = Some(Matrix::identity(self.dims[x]));
            for &u in &order {
                let Some(cu) = composite[u].clone() else { continue };
                for (i, (s, t, _)) in self.quiver.edges().enumerate() {
                    if s != u {
                        continue;
                    }
                    let cand = self.maps[i].mul(&cu, &self.field);
                    match &composite[t] {
                        None => composite[t] = Some(cand),
                        Some(existing) => {
                            if *existing != cand {
                                return Ok(false);
                            }
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// Smallest subrepresentation containing the full spaces at `seed`:
    /// start from the seeds and push images along edges to a fixed point.
    pub fn spanning_subrep(&self, seed: &VertexSet) -> Result<Subrepresentation> {
        if seed.is_empty() {
            return Err(Error::Input("spanning subrepresentation needs a nonempty seed".into()));
        }
        if let Some(&v) = seed.iter().find(|&&v| v >= self.dims.len()) {
            return Err(Error::Input(format!("seed vertex {v} out of range")));
        }
        let mut bases: Vec<Matrix> = (0..self.dims.len())
            .map(|v| {
                if seed.contains(&v) {
                    Matrix::identity(self.dims[v])
                } else {
                    Matrix::zeros(0, self.dims[v])
                }
            })
            .collect();
        loop {
            let mut changed = false;
            for (i, (s, t, _)) in self.quiver.edges().enumerate() {
                if bases[s].rows() == 0 {
                    continue;
                }
                // Rows of bases[s] pushed through the edge map.
                let image = bases[s].mul(&self.maps[i].transpose(), &self.field);
                if !bases[t].contains_rows(&image, &self.field) {
                    bases[t] = bases[t].join_rows(&image, &self.field);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Ok(Subrepresentation::from_bases(bases))
    }

    /// Rank invariant value: dimension at `y` of the spanning
    /// subrepresentation at `x`.
    pub fn generalized_rank(&self, x: usize, y: usize) -> Result<usize> {
        Ok(self.spanning_subrep(&VertexSet::from([x]))?.dims[y])
    }

    /// All subrepresentations, including 0 and the whole representation.
    /// Brute force over a small prime field, guarded by total dimension.
    pub fn enumerate_subreps(&self, limits: &Limits) -> Result<Vec<Subrepresentation>> {
        let fp = FpRep::try_from_rep(self, limits)?;
        let mut out = Vec::new();
        fp.for_each_subrep(limits, &mut |bases| {
            out.push(Subrepresentation::from_bases(
                bases.iter().map(|(m, _)| m.to_matrix()).collect(),
            ));
            true
        })?;
        Ok(out)
    }

    /// Supports of the subrepresentations of a thin representation whose
    /// in-support edge maps are all nonzero: these are exactly the up-closed
    /// subsets of the support poset, no field enumeration needed.
    pub fn thin_subrep_supports(&self) -> Result<Vec<VertexSet>> {
        if !self.is_thin() {
            return Err(Error::Unsupported("thin_subrep_supports needs a thin representation".into()));
        }
        let support = self.support();
        for (i, (s, t, label)) in self.quiver.edges().enumerate() {
            if support.contains(&s) && support.contains(&t) && self.maps[i].is_zero() {
                return Err(Error::Unsupported(format!(
                    "edge '{label}' is zero between support vertices"
                )));
            }
        }
        Ok(up_closed_subsets_of(&self.quiver, &support))
    }

    /// Isomorphic copy by a seeded random invertible basis change at every
    /// vertex. Deterministic in the seed; prime fields only.
    pub fn conjugate(&self, seed: u64) -> Result<Representation> {
        let Some(p) = self.field.modulus() else {
            return Err(Error::Unsupported("conjugation is implemented over prime fields".into()));
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let changes: Vec<FpMat> =
            self.dims.iter().map(|&d| random_invertible(&mut rng, p, d)).collect();
        let inverses: Vec<FpMat> = changes.iter().map(invert_fp).collect();
        let maps = self
            .quiver
            .edges()
            .enumerate()
            .map(|(i, (s, t, _))| {
                let m = FpMat::from_matrix(&self.maps[i], p).expect("validated entries");
                changes[t].mul(&m).mul(&inverses[s]).to_matrix()
            })
            .collect();
        Ok(Representation {
            quiver: self.quiver.clone(),
            field: self.field,
            dims: self.dims.clone(),
            maps,
        })
    }

    /// The subrepresentation as a representation in its own basis.
    pub fn sub_to_representation(&self, sub: &Subrepresentation) -> Result<Representation> {
        let maps = self
            .quiver
            .edges()
            .enumerate()
            .map(|(i, (s, t, label))| {
                let image = sub.bases[s].mul(&self.maps[i].transpose(), &self.field);
                // Express each image row in the RREF basis at the target.
                express_in_basis(&sub.bases[t], &image, &self.field)
                    .map(|x| x.transpose())
                    .map_err(|_| {
                        Error::Input(format!("subspaces are not closed under edge '{label}'"))
                    })
            })
            .collect::<Result<Vec<Matrix>>>()?;
        Ok(Representation {
            quiver: self.quiver.clone(),
            field: self.field,
            dims: sub.dims.clone(),
            maps,
        })
    }

    /// Quotient by a subrepresentation, with the induced edge maps.
    pub fn quotient(&self, sub: &Subrepresentation) -> Result<Representation> {
        let (rep, _) = self.quotient_with_projection(sub)?;
        Ok(rep)
    }

    /// Quotient plus, per vertex, the projection matrix `(m_v x d_v)`
    /// sending parent coordinates to quotient coordinates.
    pub fn quotient_with_projection(
        &self,
        sub: &Subrepresentation,
    ) -> Result<(Representation, Vec<Matrix>)> {
        let mut proj = Vec::with_capacity(self.dims.len());
        let mut comp_cols = Vec::with_capacity(self.dims.len());
        for v in 0..self.dims.len() {
            let basis = &sub.bases[v];
            let pivots: Vec<usize> = (0..basis.rows())
                .map(|i| {
                    (0..basis.cols())
                        .find(|&c| !basis[(i, c)].is_zero())
                        .expect("RREF basis rows are nonzero")
                })
                .collect();
            let comps: Vec<usize> =
                (0..self.dims[v]).filter(|c| !pivots.contains(c)).collect();
            // Projection: reduce by the basis, then read complement coords.
            let mut p = Matrix::zeros(comps.len(), self.dims[v]);
            for (r, &c) in comps.iter().enumerate() {
                let mut unit = vec![Rational::zero(); self.dims[v]];
                unit[c] = Rational::one();
                let reduced = basis.reduce_vector(&unit, &self.field);
                for (j, val) in reduced.into_iter().enumerate() {
                    p[(r, j)] = val;
                }
            }
            proj.push(p);
            comp_cols.push(comps);
        }
        let dims: Vec<usize> = comp_cols.iter().map(|c| c.len()).collect();
        let maps = self
            .quiver
            .edges()
            .enumerate()
            .map(|(i, (s, t, _))| {
                let mut m = Matrix::zeros(dims[t], dims[s]);
                for (j, &c) in comp_cols[s].iter().enumerate() {
                    // Image of the j-th quotient basis vector at the source.
                    let col: Vec<Rational> =
                        (0..self.dims[t]).map(|r| self.maps[i][(r, c)].clone()).collect();
                    let reduced = sub.bases[t].reduce_vector(&col, &self.field);
                    for (r, &cc) in comp_cols[t].iter().enumerate() {
                        m[(r, j)] = reduced[cc].clone();
                    }
                }
                m
            })
            .collect();
        let rep = Representation { quiver: self.quiver.clone(), field: self.field, dims, maps };
        Ok((rep, proj))
    }

    /// Preimage of a subrepresentation of the quotient under the projection.
    pub fn preimage(
        &self,
        sub: &Subrepresentation,
        quotient_sub: &Subrepresentation,
    ) -> Subrepresentation {
        let mut bases = Vec::with_capacity(self.dims.len());
        for v in 0..self.dims.len() {
            let basis = &sub.bases[v];
            let pivots: Vec<usize> = (0..basis.rows())
                .map(|i| {
                    (0..basis.cols())
                        .find(|&c| !basis[(i, c)].is_zero())
                        .expect("RREF basis rows are nonzero")
                })
                .collect();
            let comps: Vec<usize> =
                (0..self.dims[v]).filter(|c| !pivots.contains(c)).collect();
            let qb = &quotient_sub.bases[v];
            let mut lifted = Matrix::zeros(qb.rows(), self.dims[v]);
            for r in 0..qb.rows() {
                for (j, &c) in comps.iter().enumerate() {
                    lifted[(r, c)] = qb[(r, j)].clone();
                }
            }
            bases.push(basis.join_rows(&lifted, &self.field));
        }
        Subrepresentation::from_bases(bases)
    }
}

/// Solve `x * basis = rows` for each row; errors when a row is outside the
/// span. `basis` must be canonical RREF.
fn express_in_basis(basis: &Matrix, rows: &Matrix, field: &FieldSpec) -> Result<Matrix> {
    let pivots: Vec<usize> = (0..basis.rows())
        .map(|i| {
            (0..basis.cols())
                .find(|&c| !basis[(i, c)].is_zero())
                .expect("RREF basis rows are nonzero")
        })
        .collect();
    let mut out = Matrix::zeros(rows.rows(), basis.rows());
    for i in 0..rows.rows() {
        let residual = basis.reduce_vector(rows.row(i), field);
        if residual.iter().any(|x| !x.is_zero()) {
            return Err(Error::Input("vector is outside the subspace".into()));
        }
        for (k, &c) in pivots.iter().enumerate() {
            out[(i, k)] = rows[(i, c)].clone();
        }
    }
    Ok(out)
}

/// Up-closed subsets of `support` relative to the edges lying inside it.
fn up_closed_subsets_of(quiver: &Quiver, support: &VertexSet) -> Vec<VertexSet> {
    let inner_edges: Vec<(usize, usize)> = quiver
        .edges()
        .filter(|(s, t, _)| support.contains(s) && support.contains(t))
        .map(|(s, t, _)| (s, t))
        .collect();
    crate::quiver::up_closed_subsets_within(support, &inner_edges)
}

/// Subspaces of a parent representation, one canonical RREF basis per
/// vertex, closed under all edge maps.
#[derive(Debug, Clone, PartialEq)]
pub struct Subrepresentation {
    pub dims: Vec<usize>,
    pub bases: Vec<Matrix>,
}

impl Subrepresentation {
    pub fn from_bases(bases: Vec<Matrix>) -> Self {
        let dims = bases.iter().map(|b| b.rows()).collect();
        Subrepresentation { dims, bases }
    }

    pub fn zero_of(parent: &Representation) -> Self {
        Subrepresentation::from_bases(
            parent.dims().iter().map(|&d| Matrix::zeros(0, d)).collect(),
        )
    }

    pub fn full_of(parent: &Representation) -> Self {
        Subrepresentation::from_bases(parent.dims().iter().map(|&d| Matrix::identity(d)).collect())
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    /// Closure check: every edge maps the source subspace into the target.
    pub fn is_closed_in(&self, parent: &Representation) -> bool {
        parent.quiver().edges().enumerate().all(|(i, (s, t, _))| {
            let image = self.bases[s].mul(&parent.map(i).transpose(), &parent.field());
            self.bases[t].contains_rows(&image, &parent.field())
        })
    }

    /// Containment of canonical subspaces, vertexwise.
    pub fn contains(&self, other: &Subrepresentation, field: &FieldSpec) -> bool {
        self.bases
            .iter()
            .zip(&other.bases)
            .all(|(a, b)| a.contains_rows(b, field))
    }
}

/// Compact prime-field mirror of a representation, used by the brute-force
/// enumeration kernels.
#[derive(Debug, Clone)]
pub(crate) struct FpRep {
    pub p: u8,
    pub dims: Vec<usize>,
    pub maps: Vec<FpMat>,
    pub maps_t: Vec<FpMat>,
    pub topo: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl FpRep {
    pub fn try_from_rep(rep: &Representation, limits: &Limits) -> Result<FpRep> {
        let Some(p) = rep.field.modulus() else {
            return Err(Error::Unsupported(
                "subrepresentation enumeration needs a prime field".into(),
            ));
        };
        if rep.total_dim() > limits.max_total_dim {
            return Err(Error::SizeGuard(format!(
                "total dimension {} exceeds enumeration bound {}",
                rep.total_dim(),
                limits.max_total_dim
            )));
        }
        let maps: Vec<FpMat> = rep
            .maps
            .iter()
            .map(|m| FpMat::from_matrix(m, p))
            .collect::<Result<_>>()?;
        let maps_t = maps.iter().map(transpose_fp).collect();
        Ok(FpRep {
            p,
            dims: rep.dims.clone(),
            maps,
            maps_t,
            topo: rep.quiver.topo_order()?,
            edges: rep.quiver.edges().map(|(s, t, _)| (s, t)).collect(),
        })
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Visit every subrepresentation as per-vertex `(RREF basis, pivots)`
    /// tuples indexed by vertex. The visitor returns `false` to abort early;
    /// enumeration order is deterministic.
    pub fn for_each_subrep(
        &self,
        limits: &Limits,
        visit: &mut dyn FnMut(&[(FpMat, Vec<usize>)]) -> bool,
    ) -> Result<bool> {
        let n = self.dims.len();
        let mut chosen: Vec<(FpMat, Vec<usize>)> =
            (0..n).map(|v| (FpMat::zeros(self.p, 0, self.dims[v]), Vec::new())).collect();
        let mut nodes: u64 = 0;
        let complete = self.dfs(0, &mut chosen, &mut nodes, limits, visit)?;
        Ok(complete)
    }

    fn dfs(
        &self,
        pos: usize,
        chosen: &mut Vec<(FpMat, Vec<usize>)>,
        nodes: &mut u64,
        limits: &Limits,
        visit: &mut dyn FnMut(&[(FpMat, Vec<usize>)]) -> bool,
    ) -> Result<bool> {
        *nodes += 1;
        if *nodes > limits.max_enum_nodes {
            return Err(Error::SizeGuard(format!(
                "subrepresentation enumeration exceeded {} nodes",
                limits.max_enum_nodes
            )));
        }
        if pos == self.topo.len() {
            return Ok(visit(chosen));
        }
        let v = self.topo[pos];
        let d = self.dims[v];
        // Required subspace: images of the already-fixed upstream choices.
        let mut required = FpMat::zeros(self.p, 0, d);
        for (i, &(s, t)) in self.edges.iter().enumerate() {
            if t == v && !chosen[s].0.data.is_empty() {
                let image = chosen[s].0.mul(&self.maps_t[i]);
                required = required.vstack(&image);
            }
        }
        let (required, req_pivots) = required.row_space();
        let free = d - required.rows;
        // Subspaces containing `required` correspond to subspaces of the
        // quotient by it; lift through the complement columns.
        let comp_cols: Vec<usize> =
            (0..d).filter(|c| !req_pivots.contains(c)).collect();
        let mut aborted = false;
        let mut err = None;
        for_each_subspace(self.p, free, &mut |q_basis| {
            let mut lifted = FpMat::zeros(self.p, q_basis.rows, d);
            for r in 0..q_basis.rows {
                for (j, &c) in comp_cols.iter().enumerate() {
                    lifted.set(r, c, q_basis.get(r, j));
                }
            }
            let (basis, pivots) = required.vstack(&lifted).row_space();
            chosen[v] = (basis, pivots);
            match self.dfs(pos + 1, chosen, nodes, limits, visit) {
                Ok(true) => true,
                Ok(false) => {
                    aborted = true;
                    false
                }
                Err(e) => {
                    err = Some(e);
                    false
                }
            }
        });
        chosen[v] = (FpMat::zeros(self.p, 0, d), Vec::new());
        if let Some(e) = err {
            return Err(e);
        }
        Ok(!aborted)
    }

    /// Quotient by a subrepresentation given as per-vertex RREF bases.
    /// Returns the quotient plus the per-vertex complement columns used as
    /// the quotient coordinates.
    pub fn quotient(&self, sub: &[(FpMat, Vec<usize>)]) -> (FpRep, Vec<Vec<usize>>) {
        let n = self.dims.len();
        let comp_cols: Vec<Vec<usize>> = (0..n)
            .map(|v| (0..self.dims[v]).filter(|c| !sub[v].1.contains(c)).collect())
            .collect();
        let dims: Vec<usize> = comp_cols.iter().map(|c| c.len()).collect();
        let maps: Vec<FpMat> = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, &(s, t))| {
                let mut m = FpMat::zeros(self.p, dims[t], dims[s]);
                let mut buf = vec![0u8; self.dims[t]];
                for (j, &c) in comp_cols[s].iter().enumerate() {
                    for (r, val) in buf.iter_mut().enumerate() {
                        *val = self.maps[i].get(r, c);
                    }
                    sub[t].0.reduce_vec(&sub[t].1, &mut buf);
                    for (r, &cc) in comp_cols[t].iter().enumerate() {
                        m.set(r, j, buf[cc]);
                    }
                }
                m
            })
            .collect();
        let maps_t = maps.iter().map(transpose_fp).collect();
        (
            FpRep {
                p: self.p,
                dims,
                maps,
                maps_t,
                topo: self.topo.clone(),
                edges: self.edges.clone(),
            },
            comp_cols,
        )
    }
}

pub(crate) fn transpose_fp(m: &FpMat) -> FpMat {
    let mut out = FpMat::zeros(m.p, m.cols, m.rows);
    for i in 0..m.rows {
        for j in 0..m.cols {
            out.set(j, i, m.get(i, j));
        }
    }
    out
}

fn random_invertible(rng: &mut ChaCha8Rng, p: u8, n: usize) -> FpMat {
    if n == 0 {
        return FpMat::zeros(p, 0, 0);
    }
    loop {
        let mut m = FpMat::zeros(p, n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, rng.gen_range(0..p));
            }
        }
        if m.clone().rref().len() == n {
            return m;
        }
    }
}

fn invert_fp(m: &FpMat) -> FpMat {
    let n = m.rows;
    // Row reduce [m | I] to [I | m^{-1}].
    let mut aug = FpMat::zeros(m.p, n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, m.get(i, j));
        }
        aug.set(i, n + i, 1);
    }
    let pivots = aug.rref();
    debug_assert_eq!(pivots.len(), n, "matrix must be invertible");
    let mut inv = FpMat::zeros(m.p, n, n);
    for i in 0..n {
        for j in 0..n {
            inv.set(i, j, aug.get(i, n + j));
        }
    }
    inv
}

// ---- JSON ----

#[derive(Serialize, Deserialize)]
struct RepresentationRepr {
    quiver: Quiver,
    field: String,
    spaces: BTreeMap<String, usize>,
    maps: BTreeMap<String, Vec<Vec<String>>>,
}

impl Serialize for Representation {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let spaces = self
            .quiver
            .vertex_names()
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), self.dims[i]))
            .collect();
        let maps = self
            .quiver
            .edges()
            .enumerate()
            .map(|(i, (_, _, label))| {
                let m = &self.maps[i];
                let rows = (0..m.rows())
                    .map(|r| m.row(r).iter().map(|x| x.to_string()).collect())
                    .collect();
                (label.to_string(), rows)
            })
            .collect();
        RepresentationRepr {
            quiver: (*self.quiver).clone(),
            field: self.field.name().to_string(),
            spaces,
            maps,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Representation {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = RepresentationRepr::deserialize(de)?;
        let field = FieldSpec::parse(&repr.field).map_err(DeError::custom)?;
        let quiver = Arc::new(repr.quiver);
        let mut dims = vec![0usize; quiver.vertex_count()];
        for (name, d) in &repr.spaces {
            let v = quiver
                .vertex_index(name)
                .ok_or_else(|| DeError::custom(format!("unknown vertex '{name}' in spaces")))?;
            dims[v] = *d;
        }
        let mut maps = Vec::with_capacity(quiver.edge_count());
        for (i, (s, t, label)) in quiver.edges().enumerate() {
            let _ = i;
            let m = match repr.maps.get(label) {
                None => Matrix::zeros(dims[t], dims[s]),
                Some(rows) if rows.is_empty() => Matrix::zeros(dims[t], dims[s]),
                Some(rows) => {
                    let parsed: Vec<Vec<Rational>> = rows
                        .iter()
                        .map(|row| {
                            row.iter()
                                .map(|e| e.parse::<Rational>().map_err(DeError::custom))
                                .collect()
                        })
                        .collect::<std::result::Result<_, _>>()?;
                    Matrix::from_rows(parsed, dims[s]).map_err(DeError::custom)?
                }
            };
            maps.push(m);
        }
        Representation::new(quiver, field, dims, maps).map_err(DeError::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{build_grid, build_type_a, grid_index, Orientation};

    fn a1() -> Arc<Quiver> {
        Arc::new(build_type_a(&Orientation::equioriented(1)))
    }

    /// Interval I[0,1] on the equioriented A_1 quiver.
    fn i01() -> Representation {
        Representation::thin_from_support(a1(), &VertexSet::from([0, 1]), FieldSpec::F2)
    }

    #[test]
    fn validate_flags_bad_shapes_and_entries() {
        let q = a1();
        let good = i01();
        assert!(good.validate().is_empty());
        let bad_shape = Representation {
            quiver: q.clone(),
            field: FieldSpec::F2,
            dims: vec![2, 2],
            maps: vec![Matrix::zeros(2, 3)],
        };
        assert_eq!(bad_shape.validate().len(), 1);
        let bad_entry = Representation {
            quiver: q,
            field: FieldSpec::F2,
            dims: vec![1, 1],
            maps: vec![Matrix::from_int_rows(&[&[7]], 1)],
        };
        assert!(bad_entry.validate()[0].contains("not a canonical"));
    }

    #[test]
    fn direct_sum_block_structure() {
        let q = a1();
        let v = i01();
        let zero = Representation::zero(q.clone(), FieldSpec::F2);
        let sum = v.direct_sum(&zero).unwrap();
        assert_eq!(sum.dims(), v.dims());
        assert_eq!(sum.map(0), v.map(0));

        // I[0,0] + I[1,1]: spaces (1,1), zero edge map.
        let s0 = Representation::simple(q.clone(), 0, FieldSpec::F2);
        let s1 = Representation::simple(q, 1, FieldSpec::F2);
        let sum = s0.direct_sum(&s1).unwrap();
        assert_eq!(sum.dims(), &[1, 1]);
        assert!(sum.map(0).is_zero());
        assert!(s0.direct_sum(&i01()).is_ok());
    }

    #[test]
    fn equalised_checks() {
        // Non-commuting square on the (1,1) grid.
        let q = Arc::new(build_grid(&[1, 1]).unwrap());
        let shape = [1, 1];
        let mut dims = vec![0; 4];
        dims[grid_index(&shape, &[0, 0])] = 1;
        dims[grid_index(&shape, &[1, 0])] = 1;
        dims[grid_index(&shape, &[0, 1])] = 1;
        dims[grid_index(&shape, &[1, 1])] = 1;
        let maps: Vec<Matrix> = q
            .edges()
            .map(|(s, t, _)| {
                // Route one composite through 1, the other through 0.
                if s == grid_index(&shape, &[0, 1]) && t == grid_index(&shape, &[1, 1]) {
                    Matrix::zeros(1, 1)
                } else {
                    Matrix::identity(1)
                }
            })
            .collect();
        let rep = Representation::new(q, FieldSpec::F2, dims, maps).unwrap();
        assert!(!rep.is_equalised().unwrap());

        // Any type A representation is equalised: no parallel paths.
        assert!(i01().is_equalised().unwrap());
    }

    #[test]
    fn spanning_subrep_examples() {
        let v = i01();
        // Seeding every vertex returns the whole representation.
        let full = v.spanning_subrep(&VertexSet::from([0, 1])).unwrap();
        assert_eq!(full.dims, vec![1, 1]);
        // I[1,1] has nothing at x0.
        let s1 = Representation::simple(a1(), 1, FieldSpec::F2);
        let sub = s1.spanning_subrep(&VertexSet::from([0])).unwrap();
        assert!(sub.is_zero());
        assert!(v.spanning_subrep(&VertexSet::new()).is_err());
    }

    #[test]
    fn generalized_rank_examples() {
        let v = i01();
        assert_eq!(v.generalized_rank(0, 1).unwrap(), 1);
        assert_eq!(v.generalized_rank(0, 0).unwrap(), 1);
        assert_eq!(v.generalized_rank(1, 0).unwrap(), 0);
    }

    #[test]
    fn enumerate_subreps_interval() {
        let v = i01();
        let subs = v.enumerate_subreps(&Limits::default()).unwrap();
        // 0, the sub supported at x1, and the whole thing.
        assert_eq!(subs.len(), 3);
        let dims: Vec<Vec<usize>> = subs.iter().map(|s| s.dims.clone()).collect();
        assert!(dims.contains(&vec![0, 0]));
        assert!(dims.contains(&vec![0, 1]));
        assert!(dims.contains(&vec![1, 1]));
        for s in &subs {
            assert!(s.is_closed_in(&v));
        }
    }

    #[test]
    fn enumerate_subreps_zero_rep() {
        let zero = Representation::zero(a1(), FieldSpec::F2);
        let subs = zero.enumerate_subreps(&Limits::default()).unwrap();
        assert_eq!(subs.len(), 1);
    }

    #[test]
    fn enumerate_guards() {
        let q = a1();
        let v = Representation::new(
            q,
            FieldSpec::F2,
            vec![6, 6],
            vec![Matrix::zeros(6, 6)],
        )
        .unwrap();
        let limits = Limits { max_total_dim: 8, ..Limits::default() };
        assert!(matches!(v.enumerate_subreps(&limits), Err(Error::SizeGuard(_))));
        let q_rep = Representation::zero(a1(), FieldSpec::Q);
        assert!(matches!(
            q_rep.enumerate_subreps(&Limits::default()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn thin_supports_match_enumeration() {
        // I[0,2] on tau = 10: edges x0 -> x1, x2 -> x1.
        let tau: Orientation = "10".parse().unwrap();
        let q = Arc::new(build_type_a(&tau));
        let v =
            Representation::thin_from_support(q, &VertexSet::from([0, 1, 2]), FieldSpec::F2);
        let mut thin = v.thin_subrep_supports().unwrap();
        thin.sort();
        let mut enumerated: Vec<VertexSet> = v
            .enumerate_subreps(&Limits::default())
            .unwrap()
            .iter()
            .map(|s| {
                (0..s.dims.len()).filter(|&i| s.dims[i] > 0).collect::<VertexSet>()
            })
            .collect();
        enumerated.sort();
        enumerated.dedup();
        assert_eq!(thin, enumerated);
        // Up-closed subsets of x0 -> x1 <- x2: both one-sided chains, their
        // union, the middle vertex alone, and the empty set.
        assert_eq!(thin.len(), 5);
    }

    #[test]
    fn conjugate_is_seed_deterministic_and_isomorphic() {
        let v = i01();
        let a = v.conjugate(7).unwrap();
        let b = v.conjugate(7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dims(), v.dims());
        let c = Representation::thin_from_support(a1(), &VertexSet::from([0, 1]), FieldSpec::F3)
            .conjugate(7)
            .unwrap();
        // Over F3 a conjugated identity is some nonzero scalar.
        assert!(!c.map(0).is_zero());
        let q_rep = Representation::zero(a1(), FieldSpec::Q);
        assert!(q_rep.conjugate(1).is_err());
    }

    #[test]
    fn quotient_and_preimage() {
        let v = i01();
        let subs = v.enumerate_subreps(&Limits::default()).unwrap();
        let sub = subs.iter().find(|s| s.dims == vec![0, 1]).unwrap();
        let (q, _) = v.quotient_with_projection(sub).unwrap();
        assert_eq!(q.dims(), &[1, 0]);
        let full_q = Subrepresentation::full_of(&q);
        let pre = v.preimage(sub, &full_q);
        assert_eq!(pre.dims, vec![1, 1]);
    }

    #[test]
    fn representation_json_roundtrip() {
        let v = i01();
        let text = serde_json::to_string(&v).unwrap();
        let back: Representation = serde_json::from_str(&text).unwrap();
        assert_eq!(v, back);
    }
}
