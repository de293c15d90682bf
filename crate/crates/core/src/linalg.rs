//! Dense matrices over a finite field and Gaussian elimination.

use std::fmt;

use crate::ff::{FieldCtx, FieldData, FieldElement};

/// Row-major dense matrix over a [`FieldCtx`].
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    ctx: FieldCtx,
    nrows: usize,
    ncols: usize,
    data: Vec<FieldElement>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<FieldElement>> = (0..self.nrows).map(|r| self.row(r).to_vec()).collect();
        write!(f, "{:?}", rows)
    }
}

impl Matrix {
    pub fn zeros(ctx: &FieldCtx, nrows: usize, ncols: usize) -> Self {
        Matrix {
            ctx: ctx.clone(),
            nrows,
            ncols,
            data: vec![ctx.zero(); nrows * ncols],
        }
    }

    pub fn identity(ctx: &FieldCtx, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, ctx.one());
        }
        m
    }

    /// Panics on ragged rows or elements from another field.
    pub fn from_rows(ctx: &FieldCtx, rows: Vec<Vec<FieldElement>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged matrix rows");
            for e in r {
                assert!(ctx.contains(&e), "matrix entry from another field");
                data.push(e);
            }
        }
        Matrix {
            ctx: ctx.clone(),
            nrows,
            ncols,
            data,
        }
    }

    /// Square matrix whose columns are the given vectors.
    pub fn from_columns(ctx: &FieldCtx, cols: &[Vec<FieldElement>]) -> Self {
        let n = cols.len();
        let m = cols.first().map_or(0, |c| c.len());
        let mut out = Self::zeros(ctx, m, n);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), m, "ragged matrix columns");
            for (i, e) in col.iter().enumerate() {
                out.set(i, j, *e);
            }
        }
        out
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.ncols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        assert!(self.ctx.contains(&v));
        self.data[r * self.ncols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.ncols..(r + 1) * self.ncols]
    }

    pub fn column(&self, c: usize) -> Vec<FieldElement> {
        (0..self.nrows).map(|r| self.get(r, c)).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.ncols, other.nrows, "shape mismatch");
        let d = self.ctx.data();
        let mut out = Matrix::zeros(&self.ctx, self.nrows, other.ncols);
        for i in 0..self.nrows {
            for j in 0..other.ncols {
                let mut acc = 0u32;
                for t in 0..self.ncols {
                    acc = d.add(acc, d.mul(self.get(i, t).code(), other.get(t, j).code()));
                }
                out.set(i, j, self.ctx.element(acc as u64).unwrap());
            }
        }
        out
    }

    fn raw_rows(&self) -> Vec<Vec<u32>> {
        (0..self.nrows)
            .map(|r| self.row(r).iter().map(|e| e.code()).collect())
            .collect()
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.raw_rows();
        echelon(self.ctx.data(), &mut rows, self.ncols).len()
    }

    pub fn determinant(&self) -> FieldElement {
        assert_eq!(self.nrows, self.ncols, "determinant of a non-square matrix");
        let d = self.ctx.data();
        let n = self.nrows;
        let mut rows = self.raw_rows();
        let mut det = 1u32;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| rows[r][col] != 0) else {
                return self.ctx.zero();
            };
            if piv != col {
                rows.swap(piv, col);
                det = d.neg(det);
            }
            let pv = rows[col][col];
            det = d.mul(det, pv);
            let inv = d.inv(pv);
            for r in col + 1..n {
                let f = d.mul(rows[r][col], inv);
                if f == 0 {
                    continue;
                }
                for c in col..n {
                    let t = d.mul(f, rows[col][c]);
                    rows[r][c] = d.sub(rows[r][c], t);
                }
            }
        }
        self.ctx.element(det as u64).unwrap()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.nrows, self.ncols, "inverse of a non-square matrix");
        let n = self.nrows;
        let d = self.ctx.data();
        let mut rows: Vec<Vec<u32>> = self
            .raw_rows()
            .into_iter()
            .enumerate()
            .map(|(i, mut r)| {
                r.extend((0..n).map(|j| (i == j) as u32));
                r
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| rows[r][col] != 0)?;
            rows.swap(piv, col);
            let inv = d.inv(rows[col][col]);
            for c in 0..2 * n {
                rows[col][c] = d.mul(rows[col][c], inv);
            }
            for r in 0..n {
                if r == col || rows[r][col] == 0 {
                    continue;
                }
                let f = rows[r][col];
                for c in 0..2 * n {
                    let t = d.mul(f, rows[col][c]);
                    rows[r][c] = d.sub(rows[r][c], t);
                }
            }
        }
        let out: Vec<Vec<FieldElement>> = rows
            .into_iter()
            .map(|r| r[n..].iter().map(|&c| self.ctx.element(c as u64).unwrap()).collect())
            .collect();
        Some(Matrix::from_rows(&self.ctx, out))
    }

    /// Nonzero kernel vector with the first free column set to 1 and every
    /// other free column 0; `None` when the columns are independent.
    pub fn nullspace_vector(&self) -> Option<Vec<FieldElement>> {
        let mut rows = self.raw_rows();
        nullspace_vector_raw(self.ctx.data(), &mut rows, self.ncols)
            .map(|v| v.into_iter().map(|c| self.ctx.element(c as u64).unwrap()).collect())
    }
}

/// Forward elimination to row echelon form with unit pivots. Returns the
/// pivot column of each pivot row; rows beyond the rank end up zero.
pub(crate) fn echelon(d: &FieldData, rows: &mut [Vec<u32>], ncols: usize) -> Vec<usize> {
    if d.q() == d.p() && d.p() < (1 << 16) {
        return echelon_small_prime(d.p() as u64, rows, ncols);
    }
    let nrows = rows.len();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(piv) = (rank..nrows).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(piv, rank);
        let inv = d.inv(rows[rank][col]);
        for c in col..ncols {
            rows[rank][c] = d.mul(rows[rank][c], inv);
        }
        let (top, bottom) = rows.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in bottom.iter_mut() {
            let f = row[col];
            if f == 0 {
                continue;
            }
            let nf = d.neg(f);
            for c in col..ncols {
                if prow[c] != 0 {
                    row[c] = d.add(row[c], d.mul(nf, prow[c]));
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    pivots
}

/// Same contract as [`echelon`] for F_p with p < 2^16, accumulating row
/// updates in u64 and reducing only pivot rows and pivot-column entries.
fn echelon_small_prime(p: u64, rows: &mut [Vec<u32>], ncols: usize) -> Vec<usize> {
    let nrows = rows.len();
    let mut acc: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&c| c as u64).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let mut found = None;
        for (r, row) in acc.iter_mut().enumerate().skip(rank) {
            row[col] %= p;
            if row[col] != 0 {
                found = Some(r);
                break;
            }
        }
        let Some(piv) = found else { continue };
        acc.swap(piv, rank);
        let inv = crate::ff::uni::inv_mod(acc[rank][col], p);
        for c in col..ncols {
            acc[rank][c] = (acc[rank][c] % p) * inv % p;
        }
        let (top, bottom) = acc.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in bottom.iter_mut() {
            let f = row[col] % p;
            row[col] = 0;
            if f == 0 {
                continue;
            }
            let nf = p - f;
            for c in col + 1..ncols {
                row[c] += nf * prow[c];
            }
        }
        pivots.push(col);
        rank += 1;
    }
    for (dst, src) in rows.iter_mut().zip(acc) {
        for (d, s) in dst.iter_mut().zip(src) {
            *d = (s % p) as u32;
        }
    }
    pivots
}

pub(crate) fn nullspace_vector_raw(
    d: &FieldData,
    rows: &mut [Vec<u32>],
    ncols: usize,
) -> Option<Vec<u32>> {
    let pivots = echelon(d, rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let free = (0..ncols).find(|&c| !is_pivot[c])?;
    let mut x = vec![0u32; ncols];
    x[free] = 1;
    for (r, &pc) in pivots.iter().enumerate().rev() {
        let mut s = 0u32;
        for c in pc + 1..ncols {
            if rows[r][c] != 0 && x[c] != 0 {
                s = d.add(s, d.mul(rows[r][c], x[c]));
            }
        }
        x[pc] = d.neg(s);
    }
    Some(x)
}
