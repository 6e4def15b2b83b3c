//! Exact dense linear algebra over a prime field.
//!
//! Matrices are row-major. Elimination always takes the first nonzero entry of
//! a column as pivot, so every routine here is a deterministic function of its
//! input; the parallel row updates in [`rank_in_place`] do not change results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::FieldSpec;

/// Work (remaining rows x remaining columns) above which a pivot step fans out.
const PAR_THRESHOLD: usize = 1 << 15;

/// A dense row-major matrix over `GF(p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
    field: FieldSpec,
}

impl Matrix {
    /// Builds a matrix, reducing every entry mod `p`.
    pub fn new(field: FieldSpec, rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let entries = entries.into_iter().map(|e| field.reduce(e)).collect();
        Ok(Self {
            rows,
            cols,
            entries,
            field,
        })
    }

    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![0; rows * cols],
            field,
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1 % field.modulus();
        }
        m
    }

    /// Stacks equally long rows. An empty list gives a `0 x cols` matrix.
    pub fn from_rows(field: FieldSpec, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has length {}, expected {cols}",
                    row.len()
                )));
            }
            entries.extend(row.iter().map(|&e| field.reduce(e)));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            entries,
            field,
        })
    }

    pub fn random(field: FieldSpec, rows: usize, cols: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries = (0..rows * cols).map(|_| field.random(&mut rng)).collect();
        Self {
            rows,
            cols,
            entries,
            field,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<u64> {
        self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: u64) {
        self.entries[i * self.cols + j] = self.field.reduce(value);
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.field.check_same(&other.field)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.entries[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d = f.mul_add(*d, a, b);
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        let f = self.field;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.mul_add(acc, a, b))
            })
            .collect())
    }

    /// Kronecker product, `(A (x) B)[(i*rB + k), (j*cB + l)] = A[i,j] * B[k,l]`.
    ///
    /// With row-major tensor flattening this gives
    /// `vec(restrict(T, [A, B])) = kron(A, B) * vec(T)`.
    pub fn kron(&self, other: &Matrix) -> Result<Matrix> {
        self.field.check_same(&other.field)?;
        let f = self.field;
        let (ra, ca, rb, cb) = (self.rows, self.cols, other.rows, other.cols);
        let mut out = Matrix::zeros(f, ra * rb, ca * cb);
        let oc = ca * cb;
        for i in 0..ra {
            for j in 0..ca {
                let a = self.get(i, j);
                if a == 0 {
                    continue;
                }
                for k in 0..rb {
                    let row = (i * rb + k) * oc + j * cb;
                    for l in 0..cb {
                        out.entries[row + l] = f.mul(a, other.get(k, l));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        let mut buf = to_u32(&self.entries);
        rank_in_place(&self.field, &mut buf, self.rows, self.cols)
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let (rows, cols) = (m.rows, m.cols);
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(pr) = (rank..rows).find(|&r| m.entries[r * cols + col] != 0) else {
                continue;
            };
            if pr != rank {
                for c in 0..cols {
                    m.entries.swap(pr * cols + c, rank * cols + c);
                }
            }
            let inv = f.inv(m.entries[rank * cols + col]);
            for c in col..cols {
                let e = &mut m.entries[rank * cols + c];
                *e = f.mul(*e, inv);
            }
            for r in 0..rows {
                if r == rank {
                    continue;
                }
                let factor = m.entries[r * cols + col];
                if factor == 0 {
                    continue;
                }
                let neg = f.neg(factor);
                for c in col..cols {
                    let p = m.entries[rank * cols + c];
                    let e = &mut m.entries[r * cols + c];
                    *e = f.mul_add(*e, neg, p);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        (m, pivots)
    }
}

pub(crate) fn to_u32(entries: &[u64]) -> Vec<u32> {
    entries.iter().map(|&e| e as u32).collect()
}

/// Rank of a row-major `nrows x ncols` buffer of residues, destroying it.
///
/// Residues fit in `u32` because the modulus is below `2^32`; the narrower
/// storage halves memory traffic in the row updates.
pub(crate) fn rank_in_place(field: &FieldSpec, data: &mut [u32], nrows: usize, ncols: usize) -> usize {
    debug_assert_eq!(data.len(), nrows * ncols);
    let p = field.modulus();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(pr) = (rank..nrows).find(|&r| data[r * ncols + col] != 0) else {
            continue;
        };
        if pr != rank {
            let (a, b) = data.split_at_mut(pr * ncols);
            a[rank * ncols..(rank + 1) * ncols].swap_with_slice(&mut b[..ncols]);
        }
        let (head, tail) = data.split_at_mut((rank + 1) * ncols);
        let pivot = &mut head[rank * ncols + col..];
        let inv = field.inv(pivot[0] as u64);
        for e in pivot.iter_mut() {
            *e = field.mul(*e as u64, inv) as u32;
        }
        let pivot = &*pivot;
        let eliminate = |row: &mut [u32]| {
            let factor = row[col] as u64;
            if factor == 0 {
                return;
            }
            let neg = p - factor;
            for (x, &y) in row[col..].iter_mut().zip(pivot) {
                *x = field.reduce(*x as u64 + neg * y as u64) as u32;
            }
        };
        let remaining = nrows - rank - 1;
        if remaining * (ncols - col) >= PAR_THRESHOLD {
            tail.par_chunks_mut(ncols).for_each(eliminate);
        } else {
            tail.chunks_mut(ncols).for_each(eliminate);
        }
        rank += 1;
    }
    rank
}

/// Rank of a list of equally long vectors.
pub fn rank_of_vectors(field: FieldSpec, vectors: &[Vec<u64>]) -> Result<usize> {
    let Some(first) = vectors.first() else {
        return Ok(0);
    };
    let cols = first.len();
    let mut buf = Vec::with_capacity(vectors.len() * cols);
    for v in vectors {
        if v.len() != cols {
            return Err(Error::DimensionMismatch(format!(
                "mixed vector lengths {} and {cols}",
                v.len()
            )));
        }
        buf.extend(v.iter().map(|&e| field.reduce(e) as u32));
    }
    Ok(rank_in_place(&field, &mut buf, vectors.len(), cols))
}

/// Incremental echelon basis: vectors are reduced against the stored pivots in
/// insertion order and kept when a nonzero remainder survives.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    field: FieldSpec,
    len: usize,
    pivots: Vec<(usize, Vec<u64>)>,
}

impl EchelonBasis {
    pub fn new(field: FieldSpec, len: usize) -> Self {
        Self {
            field,
            len,
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let f = self.field;
        let mut w: Vec<u64> = v.iter().map(|&e| f.reduce(e)).collect();
        for (col, row) in &self.pivots {
            let c = w[*col];
            if c == 0 {
                continue;
            }
            let neg = f.neg(c);
            for (x, &y) in w[*col..].iter_mut().zip(&row[*col..]) {
                *x = f.mul_add(*x, neg, y);
            }
        }
        w
    }

    /// Adds `v` if it is independent of the current span.
    pub fn insert(&mut self, v: &[u64]) -> Result<bool> {
        if v.len() != self.len {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} into a basis of length {}",
                v.len(),
                self.len
            )));
        }
        let mut w = self.reduce(v);
        let Some(col) = w.iter().position(|&e| e != 0) else {
            return Ok(false);
        };
        let inv = self.field.inv(w[col]);
        for e in &mut w[col..] {
            *e = self.field.mul(*e, inv);
        }
        self.pivots.push((col, w));
        Ok(true)
    }

    pub fn contains(&self, v: &[u64]) -> Result<bool> {
        if v.len() != self.len {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against a basis of length {}",
                v.len(),
                self.len
            )));
        }
        Ok(self.reduce(v).iter().all(|&e| e == 0))
    }
}

/// Indices of a maximal independent subset, chosen greedily in input order.
pub fn independent_indices(field: FieldSpec, vectors: &[Vec<u64>]) -> Result<Vec<usize>> {
    let Some(first) = vectors.first() else {
        return Ok(Vec::new());
    };
    let mut basis = EchelonBasis::new(field, first.len());
    let mut keep = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        if basis.insert(v)? {
            keep.push(i);
        }
    }
    Ok(keep)
}

/// A maximal linearly independent subset, first-seen greedy.
pub fn independent_basis(field: FieldSpec, vectors: &[Vec<u64>]) -> Result<Vec<Vec<u64>>> {
    Ok(independent_indices(field, vectors)?
        .into_iter()
        .map(|i| vectors[i].iter().map(|&e| field.reduce(e)).collect())
        .collect())
}

/// Derives an independent sub-seed for stream `stream` of a draw seeded by
/// `seed` (splitmix64 finaliser), so one logged seed identifies every sample
/// of a trial.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(seed ^ mix(stream))
}

/// `dim` independent uniformly random vectors of length `ambient_dim`.
///
/// Draws from a ChaCha8 stream seeded by `seed`, continuing the same stream
/// whenever a draw lands in the span of the previous ones.
pub fn random_subspace(
    field: FieldSpec,
    ambient_dim: usize,
    dim: usize,
    seed: u64,
) -> Result<Vec<Vec<u64>>> {
    if dim > ambient_dim {
        return Err(Error::InvalidArgument(format!(
            "subspace dimension {dim} exceeds ambient dimension {ambient_dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis = EchelonBasis::new(field, ambient_dim);
    let mut out = Vec::with_capacity(dim);
    while out.len() < dim {
        let v: Vec<u64> = (0..ambient_dim).map(|_| field.random(&mut rng)).collect();
        if basis.insert(&v)? {
            out.push(v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big() -> FieldSpec {
        FieldSpec::default()
    }

    fn m(rows: usize, cols: usize, e: &[u64]) -> Matrix {
        Matrix::new(big(), rows, cols, e.to_vec()).unwrap()
    }

    #[test]
    fn rank_basics() {
        assert_eq!(Matrix::identity(big(), 3).rank(), 3);
        assert_eq!(Matrix::zeros(big(), 4, 7).rank(), 0);
        assert_eq!(m(2, 2, &[1, 2, 2, 4]).rank(), 1);
        assert_eq!(Matrix::zeros(big(), 0, 5).rank(), 0);
    }

    #[test]
    fn rank_small_field() {
        let f2 = FieldSpec::new(2).unwrap();
        // [[1,1],[1,1]] has rank 1 everywhere, [[1,1],[1,0]] rank 2
        assert_eq!(Matrix::new(f2, 2, 2, vec![1, 1, 1, 1]).unwrap().rank(), 1);
        assert_eq!(Matrix::new(f2, 2, 2, vec![1, 1, 1, 0]).unwrap().rank(), 2);
        // [[1,1],[1,3]] is singular mod 2 only
        assert_eq!(Matrix::new(f2, 2, 2, vec![1, 1, 1, 3]).unwrap().rank(), 1);
        assert_eq!(m(2, 2, &[1, 1, 1, 3]).rank(), 2);
    }

    #[test]
    fn rref_is_reduced() {
        let a = m(3, 4, &[2, 4, 6, 8, 1, 1, 1, 1, 3, 5, 7, 9]);
        let (r, piv) = a.rref();
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(r.row(0)[..2], [1, 0]);
        assert_eq!(r.row(1)[..2], [0, 1]);
        assert!(r.row(2).iter().all(|&e| e == 0));
    }

    #[test]
    fn independent_basis_examples() {
        let f = big();
        let e1 = vec![1, 0];
        let e2 = vec![0, 1];
        let s = vec![1, 1];
        let b = independent_basis(f, &[e1.clone(), e2.clone(), s]).unwrap();
        assert_eq!(b, vec![e1, e2]);
        assert!(independent_basis(f, &[]).unwrap().is_empty());
        assert!(independent_basis(f, &[vec![1, 2], vec![1]]).is_err());
    }

    #[test]
    fn independent_basis_of_random_vectors() {
        let f = big();
        let vs = Matrix::random(f, 10, 5, 7);
        let rows: Vec<Vec<u64>> = (0..10).map(|i| vs.row(i).to_vec()).collect();
        let b = independent_basis(f, &rows).unwrap();
        assert_eq!(b.len(), 5);
        assert_eq!(rank_of_vectors(f, &b).unwrap(), 5);
        assert_eq!(rank_of_vectors(f, &rows).unwrap(), 5);
    }

    #[test]
    fn kron_examples() {
        let f = big();
        let i6 = Matrix::identity(f, 2).kron(&Matrix::identity(f, 3)).unwrap();
        assert_eq!(i6, Matrix::identity(f, 6));
        let b = m(2, 3, &[1, 2, 3, 4, 5, 6]);
        let z = m(1, 1, &[0]).kron(&b).unwrap();
        assert_eq!(z, Matrix::zeros(f, 2, 3));
    }

    #[test]
    fn kron_matches_two_tensor_action() {
        // out[a][b] = sum_{i,j} A[a][i] B[b][j] X[i][j]
        let f = big();
        let a = Matrix::random(f, 3, 2, 1);
        let b = Matrix::random(f, 4, 3, 2);
        let x = Matrix::random(f, 2, 3, 3);
        let lhs = a.kron(&b).unwrap().apply(x.entries()).unwrap();
        let mut rhs = vec![0u64; 12];
        for p in 0..3 {
            for q in 0..4 {
                let mut acc = 0;
                for i in 0..2 {
                    for j in 0..3 {
                        acc = f.add(acc, f.mul(f.mul(a.get(p, i), b.get(q, j)), x.get(i, j)));
                    }
                }
                rhs[p * 4 + q] = acc;
            }
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn random_subspace_examples() {
        let f = big();
        assert!(random_subspace(f, 9, 0, 1).unwrap().is_empty());
        let full = random_subspace(f, 9, 9, 1).unwrap();
        assert_eq!(rank_of_vectors(f, &full).unwrap(), 9);
        let three = random_subspace(f, 9, 3, 42).unwrap();
        assert_eq!(three.len(), 3);
        assert_eq!(rank_of_vectors(f, &three).unwrap(), 3);
        assert_eq!(three, random_subspace(f, 9, 3, 42).unwrap());
        assert!(random_subspace(f, 3, 4, 0).is_err());
    }

    #[test]
    fn random_subspace_small_field_resamples() {
        let f2 = FieldSpec::new(2).unwrap();
        for seed in 0..20 {
            let b = random_subspace(f2, 4, 4, seed).unwrap();
            assert_eq!(rank_of_vectors(f2, &b).unwrap(), 4);
        }
    }

    #[test]
    fn parallel_kernel_matches_serial_rref() {
        let f = big();
        // rank-deficient 300 x 250 product, large enough to take the parallel path
        let a = Matrix::random(f, 300, 120, 5);
        let b = Matrix::random(f, 120, 250, 6);
        let c = a.mul(&b).unwrap();
        assert_eq!(c.rank(), 120);
        assert_eq!(c.rref().1.len(), 120);
    }
}
