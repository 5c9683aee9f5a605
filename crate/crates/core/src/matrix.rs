//! Exact dense matrices over the supported coefficient fields.
//!
//! The public [`Matrix`] stores [`Rational`] entries and routes arithmetic
//! through a runtime [`FieldSpec`]; over a prime field entries are kept as
//! canonical residues `0..p`. The brute-force enumeration kernels work on the
//! compact [`FpMat`] representation instead, which keeps the subspace
//! enumeration loops free of big-integer traffic.

use crate::error::{Error, Result};
use crate::scalar::Rational;
use num::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldSpec {
    F2,
    F3,
    Q,
}

impl FieldSpec {
    pub fn modulus(&self) -> Option<u8> {
        match self {
            FieldSpec::F2 => Some(2),
            FieldSpec::F3 => Some(3),
            FieldSpec::Q => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FieldSpec::F2 => "F2",
            FieldSpec::F3 => "F3",
            FieldSpec::Q => "Q",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "F2" => Ok(FieldSpec::F2),
            "F3" => Ok(FieldSpec::F3),
            "Q" => Ok(FieldSpec::Q),
            other => Err(Error::Input(format!("unknown field '{other}'"))),
        }
    }

    /// Canonical residue of an integer rational, for prime fields.
    pub fn reduce(&self, x: &Rational) -> Result<Rational> {
        match self.modulus() {
            None => Ok(x.clone()),
            Some(p) => {
                let n = x.to_integer().ok_or_else(|| {
                    Error::Input(format!("entry {x} is not an integer residue mod {p}"))
                })?;
                let p = num::BigInt::from(p);
                let mut r = n % &p;
                if r < num::BigInt::from(0) {
                    r += &p;
                }
                Ok(Rational::from_big(r, num::BigInt::from(1)).unwrap())
            }
        }
    }

    pub fn is_canonical(&self, x: &Rational) -> bool {
        match self.modulus() {
            None => true,
            Some(p) => x
                .to_integer()
                .map(|n| n >= num::BigInt::from(0) && n < num::BigInt::from(p))
                .unwrap_or(false),
        }
    }

    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        self.reduce(&(a + b)).expect("sum of residues")
    }

    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        self.reduce(&(a - b)).expect("difference of residues")
    }

    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        self.reduce(&(a * b)).expect("product of residues")
    }

    fn inv(&self, a: &Rational) -> Result<Rational> {
        match self.modulus() {
            None => a.recip(),
            Some(p) => {
                let n = a.to_integer().and_then(|n| n.to_u8()).ok_or_else(|| {
                    Error::Input(format!("entry {a} is not a residue mod {p}"))
                })?;
                if n == 0 {
                    return Err(Error::Arithmetic("division by zero".into()));
                }
                // p is 2 or 3: invert by scanning.
                let inv = (1..p).find(|&k| (k * n) % p == 1).expect("prime modulus");
                Ok(Rational::from_int(inv as i64))
            }
        }
    }
}

/// Dense matrix with exact entries, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>, cols: usize) -> Result<Self> {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::Input(format!(
                    "row has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend(r);
        }
        Ok(Matrix { rows: nrows, cols, data })
    }

    pub fn from_int_rows(rows: &[&[i64]], cols: usize) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_int(x)).collect())
                .collect(),
            cols,
        )
        .expect("literal rows have uniform length")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// `self * other` with shapes `(r x k) * (k x c)`.
    pub fn mul(&self, other: &Matrix, field: &FieldSpec) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let lhs = &self[(i, k)];
                if lhs.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let term = field.mul(lhs, &other[(k, j)]);
                    out[(i, j)] = field.add(&out[(i, j)], &term);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self, field: &FieldSpec) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = field.inv(&self[(r, c)]).expect("pivot is nonzero");
            for j in c..self.cols {
                self[(r, j)] = field.mul(&self[(r, j)], &inv);
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let factor = self[(i, c)].clone();
                    for j in c..self.cols {
                        let term = field.mul(&factor, &self[(r, j)]);
                        self[(i, j)] = field.sub(&self[(i, j)], &term);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, field: &FieldSpec) -> usize {
        let mut m = self.clone();
        m.rref(field).len()
    }

    /// Canonical basis of the row space: RREF with zero rows dropped.
    pub fn row_space(&self, field: &FieldSpec) -> Matrix {
        let mut m = self.clone();
        let pivots = m.rref(field);
        let rank = pivots.len();
        m.data.truncate(rank * m.cols);
        m.rows = rank;
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Span of the rows of both matrices, canonical.
    pub fn join_rows(&self, other: &Matrix, field: &FieldSpec) -> Matrix {
        self.vstack(other).row_space(field)
    }

    /// Does the row space of `self` contain every row of `vecs`?
    /// `self` must be in canonical RREF form.
    pub fn contains_rows(&self, vecs: &Matrix, field: &FieldSpec) -> bool {
        assert_eq!(self.cols, vecs.cols);
        (0..vecs.rows).all(|i| {
            let residual = self.reduce_vector(vecs.row(i), field);
            residual.iter().all(|x| x.is_zero())
        })
    }

    /// Residual of `v` after subtracting its projection onto the row space.
    /// `self` must be in canonical RREF form with pivot columns as produced
    /// by [`Matrix::rref`].
    pub fn reduce_vector(&self, v: &[Rational], field: &FieldSpec) -> Vec<Rational> {
        let mut out = v.to_vec();
        for i in 0..self.rows {
            let pivot_col = (0..self.cols)
                .find(|&c| !self[(i, c)].is_zero())
                .expect("RREF basis has no zero rows");
            let coeff = out[pivot_col].clone();
            if coeff.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let term = field.mul(&coeff, &self[(i, j)]);
                out[j] = field.sub(&out[j], &term);
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Compact matrix over a small prime field, entries as residues.
#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct FpMat {
    pub p: u8,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u8>,
}

impl FpMat {
    pub fn zeros(p: u8, rows: usize, cols: usize) -> Self {
        FpMat { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u8, n: usize) -> Self {
        let mut m = FpMat::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn inv_mod(p: u8, a: u8) -> u8 {
        (1..p).find(|&k| (k as u16 * a as u16) % p as u16 == 1).expect("nonzero residue")
    }

    pub fn mul(&self, other: &FpMat) -> FpMat {
        debug_assert_eq!(self.cols, other.rows);
        let p = self.p as u16;
        let mut out = FpMat::zeros(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let lhs = self.get(i, k) as u16;
                if lhs == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j) as u16;
                    out.set(i, j, ((cur + lhs * other.get(k, j) as u16) % p) as u8);
                }
            }
        }
        out
    }

    /// In-place RREF; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let p = self.p as i16;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(r * self.cols + j, pr * self.cols + j);
                }
            }
            let inv = Self::inv_mod(self.p, self.get(r, c)) as i16;
            for j in c..self.cols {
                let v = self.get(r, j) as i16;
                self.set(r, j, ((v * inv) % p) as u8);
            }
            for i in 0..self.rows {
                if i != r && self.get(i, c) != 0 {
                    let factor = self.get(i, c) as i16;
                    for j in c..self.cols {
                        let v = self.get(i, j) as i16 - factor * self.get(r, j) as i16;
                        self.set(i, j, (v.rem_euclid(p)) as u8);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Canonical row-space basis (RREF, zero rows dropped) plus pivots.
    pub fn row_space(&self) -> (FpMat, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref();
        m.data.truncate(pivots.len() * m.cols);
        m.rows = pivots.len();
        (m, pivots)
    }

    pub fn vstack(&self, other: &FpMat) -> FpMat {
        debug_assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        FpMat { p: self.p, rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Reduce `v` against this RREF basis in place; pivots must match.
    pub fn reduce_vec(&self, pivots: &[usize], v: &mut [u8]) {
        let p = self.p as i16;
        for (i, &c) in pivots.iter().enumerate() {
            let coeff = v[c] as i16;
            if coeff == 0 {
                continue;
            }
            for j in 0..self.cols {
                let nv = v[j] as i16 - coeff * self.get(i, j) as i16;
                v[j] = nv.rem_euclid(p) as u8;
            }
        }
    }

    /// Does this RREF basis span every row of `other`?
    pub fn contains(&self, pivots: &[usize], other: &FpMat) -> bool {
        let mut buf = vec![0u8; self.cols];
        for i in 0..other.rows {
            buf.copy_from_slice(other.row(i));
            self.reduce_vec(pivots, &mut buf);
            if buf.iter().any(|&x| x != 0) {
                return false;
            }
        }
        true
    }

    pub fn to_matrix(&self) -> Matrix {
        let mut out = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = Rational::from_int(self.get(i, j) as i64);
            }
        }
        out
    }

    pub fn from_matrix(m: &Matrix, p: u8) -> Result<FpMat> {
        let mut out = FpMat::zeros(p, m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m[(i, j)]
                    .to_integer()
                    .and_then(|n| n.to_u8())
                    .filter(|&n| n < p)
                    .ok_or_else(|| {
                        Error::Input(format!("entry {} is not a residue mod {p}", m[(i, j)]))
                    })?;
                out.set(i, j, v);
            }
        }
        Ok(out)
    }
}

/// All subspaces of `F_p^dim` as canonical RREF bases, enumerated by pivot
/// pattern. The visitor returns `false` to abort.
pub(crate) fn for_each_subspace(
    p: u8,
    dim: usize,
    visit: &mut dyn FnMut(&FpMat) -> bool,
) -> bool {
    // k = 0: the zero subspace.
    if !visit(&FpMat::zeros(p, 0, dim)) {
        return false;
    }
    let mut pivots = Vec::new();
    for k in 1..=dim {
        pivots.clear();
        if !pivot_combos(p, dim, k, 0, &mut pivots, visit) {
            return false;
        }
    }
    true
}

fn pivot_combos(
    p: u8,
    dim: usize,
    k: usize,
    start: usize,
    pivots: &mut Vec<usize>,
    visit: &mut dyn FnMut(&FpMat) -> bool,
) -> bool {
    if pivots.len() == k {
        return fill_free_entries(p, dim, pivots, visit);
    }
    let remaining = k - pivots.len();
    for c in start..=dim.saturating_sub(remaining) {
        pivots.push(c);
        if !pivot_combos(p, dim, k, c + 1, pivots, visit) {
            pivots.pop();
            return false;
        }
        pivots.pop();
    }
    true
}

fn fill_free_entries(
    p: u8,
    dim: usize,
    pivots: &[usize],
    visit: &mut dyn FnMut(&FpMat) -> bool,
) -> bool {
    let k = pivots.len();
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; dim];
        for &c in pivots {
            v[c] = true;
        }
        v
    };
    // Free positions: (row i, col j) with j > pivots[i] and j not a pivot.
    let mut free = Vec::new();
    for (i, &pc) in pivots.iter().enumerate() {
        for j in (pc + 1)..dim {
            if !is_pivot[j] {
                free.push((i, j));
            }
        }
    }
    let mut m = FpMat::zeros(p, k, dim);
    for (i, &c) in pivots.iter().enumerate() {
        m.set(i, c, 1);
    }
    fn rec(
        m: &mut FpMat,
        free: &[(usize, usize)],
        idx: usize,
        p: u8,
        visit: &mut dyn FnMut(&FpMat) -> bool,
    ) -> bool {
        if idx == free.len() {
            return visit(m);
        }
        let (i, j) = free[idx];
        for v in 0..p {
            m.set(i, j, v);
            if !rec(m, free, idx + 1, p, visit) {
                m.set(i, j, 0);
                return false;
            }
        }
        m.set(i, j, 0);
        true
    }
    rec(&mut m, &free, 0, p, visit)
}
