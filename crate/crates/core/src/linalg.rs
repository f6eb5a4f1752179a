//! Dense linear algebra over a [`FieldDesc`].
//!
//! Most of the heavy lifting elsewhere in the crate works on raw rows of
//! field values (`Vec<u32>`); [`MatrixFq`] is the typed wrapper used for
//! group elements and user-facing input.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldDesc, FieldElement};

/// Reduces `rows` to reduced row-echelon form in place and returns the pivot
/// columns. Zero rows are dropped.
pub fn rref_rows(field: &FieldDesc, rows: &mut Vec<Vec<u32>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = field.inv(rows[r][c]).expect("non-zero pivot");
        for x in rows[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = field.neg(row[c]);
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if y != 0 {
                    *x = field.add(*x, field.mul(f, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank_rows(field: &FieldDesc, rows: &[Vec<u32>], ncols: usize) -> usize {
    let mut e = Echelon::new(ncols);
    rows.iter().filter(|r| e.insert(field, r.to_vec())).count()
}

/// Basis of `{x : Σ_i x_i rows[i] = 0}`.
pub fn left_kernel(field: &FieldDesc, rows: &[Vec<u32>], ncols: usize) -> Vec<Vec<u32>> {
    let n = rows.len();
    let mut aug: Vec<Vec<u32>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.clone();
            v.resize(ncols, 0);
            v.extend((0..n).map(|j| u32::from(i == j)));
            v
        })
        .collect();
    let pivots = rref_rows(field, &mut aug, ncols + n);
    aug.into_iter()
        .zip(pivots)
        .filter(|(_, p)| *p >= ncols)
        .map(|(row, _)| row[ncols..].to_vec())
        .collect()
}

/// Incrementally built semi-echelon basis of a row space.
#[derive(Debug, Clone)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<(usize, Vec<u32>)>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, field: &FieldDesc, row: &mut [u32]) {
        for (p, basis) in &self.rows {
            let c = row[*p];
            if c == 0 {
                continue;
            }
            let f = field.neg(c);
            for (x, &y) in row.iter_mut().zip(basis).skip(*p) {
                if y != 0 {
                    *x = field.add(*x, field.mul(f, y));
                }
            }
        }
    }

    pub fn contains(&self, field: &FieldDesc, row: &[u32]) -> bool {
        let mut row = row.to_vec();
        row.resize(self.ncols, 0);
        self.reduce(field, &mut row);
        row.iter().all(|&x| x == 0)
    }

    /// Adds `row`; returns whether it was independent of the rows so far.
    pub fn insert(&mut self, field: &FieldDesc, mut row: Vec<u32>) -> bool {
        row.resize(self.ncols, 0);
        self.reduce(field, &mut row);
        let Some(p) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = field.inv(row[p]).expect("non-zero");
        for x in row.iter_mut() {
            *x = field.mul(*x, inv);
        }
        self.rows.push((p, row));
        true
    }
}

/// A matrix over a finite field with entries stored as reduced raw values.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixFq {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
    field: FieldKey,
}

/// Wrapper giving `Arc<FieldDesc>` structural comparison inside derives.
#[derive(Clone)]
struct FieldKey(Arc<FieldDesc>);

impl PartialEq for FieldKey {
    fn eq(&self, o: &Self) -> bool {
        *self.0 == *o.0
    }
}
impl Eq for FieldKey {}
impl std::hash::Hash for FieldKey {
    fn hash<H: std::hash::Hasher>(&self, _: &mut H) {}
}
impl PartialOrd for FieldKey {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for FieldKey {
    fn cmp(&self, _: &Self) -> std::cmp::Ordering {
        std::cmp::Ordering::Equal
    }
}

/// Output of [`MatrixFq::rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub rank: usize,
    pub reduced: MatrixFq,
    pub pivots: Vec<usize>,
}

impl MatrixFq {
    pub fn from_values(field: &Arc<FieldDesc>, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|&v| v >= field.size()) {
            return Err(Error::Invalid("matrix entry out of range".into()));
        }
        Ok(MatrixFq { rows, cols, data, field: FieldKey(field.clone()) })
    }

    pub fn from_elements(rows: usize, cols: usize, entries: &[FieldElement]) -> Result<Self> {
        let field = entries
            .first()
            .ok_or_else(|| Error::DimensionMismatch("empty matrix".into()))?
            .field()
            .clone();
        if entries.iter().any(|e| **e.field() != *field) {
            return Err(Error::FieldMismatch);
        }
        Self::from_values(&field, rows, cols, entries.iter().map(|e| e.value()).collect())
    }

    /// Builds a matrix from small integers reduced mod `p`.
    pub fn from_ints(field: &Arc<FieldDesc>, rows: usize, cols: usize, ints: &[i64]) -> Result<Self> {
        Self::from_values(field, rows, cols, ints.iter().map(|&n| field.from_int(n)).collect())
    }

    pub fn zeros(field: &Arc<FieldDesc>, rows: usize, cols: usize) -> Self {
        MatrixFq { rows, cols, data: vec![0; rows * cols], field: FieldKey(field.clone()) }
    }

    pub fn identity(field: &Arc<FieldDesc>, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn field(&self) -> &Arc<FieldDesc> {
        &self.field.0
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set_value(&mut self, i: usize, j: usize, v: u32) {
        assert!(v < self.field().size());
        self.data[i * self.cols + j] = v;
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.field().elem(self.value(i, j))
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn try_mul(&self, o: &MatrixFq) -> Result<MatrixFq> {
        if self.field != o.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let f = self.field();
        let mut out = Self::zeros(f, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.value(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let idx = i * o.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, o.value(k, j)));
                }
            }
        }
        Ok(out)
    }

    pub fn try_sub(&self, o: &MatrixFq) -> Result<MatrixFq> {
        if self.field != o.field {
            return Err(Error::FieldMismatch);
        }
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return Err(Error::DimensionMismatch("shape".into()));
        }
        let f = self.field();
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(MatrixFq { data, ..self.clone() })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.value(i, j) == u32::from(i == j)))
    }

    pub fn transpose(&self) -> MatrixFq {
        let mut out = Self::zeros(self.field(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.value(i, j);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> Result<MatrixFq> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("power of a non-square matrix".into()));
        }
        let mut base = self.clone();
        let mut acc = Self::identity(self.field(), self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            base = base.try_mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Reduced row-echelon form, rank and pivot columns.
    pub fn rref(&self) -> Rref {
        let mut rows: Vec<Vec<u32>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let pivots = rref_rows(self.field(), &mut rows, self.cols);
        let rank = pivots.len();
        let mut data: Vec<u32> = rows.into_iter().flatten().collect();
        data.resize(self.rows * self.cols, 0);
        Rref { rank, reduced: MatrixFq { data, ..self.clone() }, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    pub fn determinant(&self) -> Result<FieldElement> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let f = self.field();
        let n = self.rows;
        let mut a: Vec<Vec<u32>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut det = 1u32;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| a[i][c] != 0) else {
                return Ok(f.zero());
            };
            if pr != c {
                a.swap(pr, c);
                det = f.neg(det);
            }
            det = f.mul(det, a[c][c]);
            let inv = f.inv(a[c][c]).expect("non-zero");
            for i in c + 1..n {
                if a[i][c] == 0 {
                    continue;
                }
                let factor = f.neg(f.mul(a[i][c], inv));
                for j in c..n {
                    let y = a[c][j];
                    a[i][j] = f.add(a[i][j], f.mul(factor, y));
                }
            }
        }
        Ok(f.elem(det))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<MatrixFq> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| u32::from(i == j)));
                r
            })
            .collect();
        let pivots = rref_rows(self.field(), &mut aug, 2 * n);
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::SingularMatrix);
        }
        let data = aug.into_iter().flat_map(|r| r[n..].to_vec()).collect();
        Ok(MatrixFq { data, ..self.clone() })
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[u32]) -> Vec<u32> {
        let f = self.field();
        (0..self.cols)
            .map(|j| {
                (0..self.rows).fold(0, |acc, i| f.add(acc, f.mul(v[i], self.value(i, j))))
            })
            .collect()
    }

    /// Matrix times column vector.
    pub fn apply_col(&self, v: &[u32]) -> Vec<u32> {
        let f = self.field();
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(0, |acc, j| f.add(acc, f.mul(self.value(i, j), v[j])))
            })
            .collect()
    }
}

impl fmt::Debug for MatrixFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> =
                self.row(i).iter().map(|&v| self.field().format_value(v)).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(q: u64) -> Arc<FieldDesc> {
        FieldDesc::with_order(q).unwrap()
    }

    #[test]
    fn identity_has_full_rank() {
        let f3 = f(3);
        for n in 1..5 {
            assert_eq!(MatrixFq::identity(&f3, n).rank(), n);
        }
    }

    #[test]
    fn equal_rows_rank_one() {
        let f2 = f(2);
        let m = MatrixFq::from_ints(&f2, 2, 2, &[1, 1, 1, 1]).unwrap();
        let r = m.rref();
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![0]);
        assert_eq!(r.reduced, MatrixFq::from_ints(&f2, 2, 2, &[1, 1, 0, 0]).unwrap());
    }

    /// Leibniz expansion, independent of elimination.
    fn det_brute(m: &MatrixFq) -> u32 {
        let fld = m.field();
        let n = m.nrows();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = 0;
        fn rec(k: usize, perm: &mut Vec<usize>, sign: bool, m: &MatrixFq, total: &mut u32) {
            let fld = m.field();
            let n = perm.len();
            if k == n {
                let mut prod = 1;
                for (i, &j) in perm.iter().enumerate() {
                    prod = fld.mul(prod, m.value(i, j));
                }
                *total = if sign { fld.sub(*total, prod) } else { fld.add(*total, prod) };
                return;
            }
            for i in k..n {
                perm.swap(k, i);
                rec(k + 1, perm, sign ^ (i != k), m, total);
                perm.swap(k, i);
            }
        }
        rec(0, &mut perm, false, m, &mut total);
        let _ = fld;
        total
    }

    #[test]
    fn rank_agrees_with_brute_force_determinant() {
        let f3 = f(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let vals: Vec<u32> = (0..9).map(|_| rng.gen_range(0..3)).collect();
            let m = MatrixFq::from_values(&f3, 3, 3, vals).unwrap();
            let brute = det_brute(&m);
            assert_eq!(m.rank() == 3, brute != 0);
            assert_eq!(m.determinant().unwrap().value(), brute);
        }
    }

    #[test]
    fn rref_is_idempotent_and_row_order_invariant() {
        let f4 = f(4);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let (r, c) = (rng.gen_range(1..5), rng.gen_range(1..6));
            let vals: Vec<u32> = (0..r * c).map(|_| rng.gen_range(0..4)).collect();
            let m = MatrixFq::from_values(&f4, r, c, vals.clone()).unwrap();
            let once = m.rref();
            assert_eq!(once.reduced.rref().reduced, once.reduced);
            let mut rows: Vec<Vec<u32>> = vals.chunks(c).map(|x| x.to_vec()).collect();
            rows.reverse();
            let flipped = MatrixFq::from_values(&f4, r, c, rows.concat()).unwrap();
            assert_eq!(flipped.rank(), once.rank);
            assert_eq!(flipped.rref().reduced, once.reduced);
        }
    }

    #[test]
    fn inverse_round_trip() {
        let f9 = f(9);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut tested = 0;
        while tested < 30 {
            let vals: Vec<u32> = (0..9).map(|_| rng.gen_range(0..9)).collect();
            let m = MatrixFq::from_values(&f9, 3, 3, vals).unwrap();
            match m.inverse() {
                Ok(inv) => {
                    assert!(m.try_mul(&inv).unwrap().is_identity());
                    tested += 1;
                }
                Err(e) => {
                    assert_eq!(e, Error::SingularMatrix);
                    assert!(m.determinant().unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn left_kernel_annihilates() {
        let f2 = f(2);
        let rows = vec![vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 0]];
        let ker = left_kernel(&f2, &rows, 3);
        assert_eq!(ker, vec![vec![1, 1, 1]]);
        assert_eq!(rank_rows(&f2, &rows, 3), 2);
    }
}
