//! Dense order-k tensors and the restriction action.
//!
//! Entries are row-major with the last index fastest. All constructors reduce
//! entries into the field; tensors are immutable values after construction.

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::linalg::Matrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TensorJson", into = "TensorJson")]
pub struct Tensor {
    shape: Vec<usize>,
    entries: Vec<u64>,
    field: FieldSpec,
}

/// On-disk layout: `{"shape":[...],"modulus":p,"entries":[...]}`.
#[derive(Serialize, Deserialize)]
struct TensorJson {
    shape: Vec<usize>,
    modulus: u64,
    entries: Vec<u64>,
}

impl TryFrom<TensorJson> for Tensor {
    type Error = Error;

    fn try_from(j: TensorJson) -> Result<Self> {
        let field = FieldSpec::new(j.modulus)?;
        if j.entries.iter().any(|&e| e >= j.modulus) {
            return Err(Error::Parse("tensor entry not reduced mod p".into()));
        }
        Tensor::new(field, j.shape, j.entries)
    }
}

impl From<Tensor> for TensorJson {
    fn from(t: Tensor) -> Self {
        TensorJson {
            shape: t.shape,
            modulus: t.field.modulus(),
            entries: t.entries,
        }
    }
}

pub(crate) fn numel(shape: &[usize]) -> usize {
    shape.iter().product()
}

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

/// Calls `f(flat, multi_index)` for every index of `shape` in row-major order.
pub(crate) fn for_each_index(shape: &[usize], mut f: impl FnMut(usize, &[usize])) {
    let total = numel(shape);
    if total == 0 {
        return;
    }
    let mut idx = vec![0usize; shape.len()];
    for flat in 0..total {
        f(flat, &idx);
        for d in (0..shape.len()).rev() {
            idx[d] += 1;
            if idx[d] < shape[d] {
                break;
            }
            idx[d] = 0;
        }
    }
}

impl Tensor {
    pub fn new(field: FieldSpec, shape: Vec<usize>, entries: Vec<u64>) -> Result<Self> {
        if shape.is_empty() {
            return Err(Error::InvalidArgument("tensor order must be at least 1".into()));
        }
        if entries.len() != numel(&shape) {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for shape {shape:?}",
                entries.len()
            )));
        }
        let entries = entries.into_iter().map(|e| field.reduce(e)).collect();
        Ok(Self {
            shape,
            entries,
            field,
        })
    }

    pub fn zeros(field: FieldSpec, shape: &[usize]) -> Self {
        assert!(!shape.is_empty(), "tensor order must be at least 1");
        Self {
            shape: shape.to_vec(),
            entries: vec![0; numel(shape)],
            field,
        }
    }

    pub fn from_fn(field: FieldSpec, shape: &[usize], mut f: impl FnMut(&[usize]) -> u64) -> Self {
        let mut t = Self::zeros(field, shape);
        for_each_index(shape, |flat, idx| t.entries[flat] = field.reduce(f(idx)));
        t
    }

    /// Uniformly random entries from a ChaCha8 stream.
    pub fn random(field: FieldSpec, shape: &[usize], seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Self::zeros(field, shape);
        for e in &mut t.entries {
            *e = field.random(&mut rng);
        }
        t
    }

    /// The unit tensor `I_r` of order `k`: ones at `(i, ..., i)`.
    pub fn diagonal(field: FieldSpec, r: usize, k: usize) -> Self {
        Self::diagonal_in(field, &vec![r; k], r)
    }

    /// `I_r` padded with zeros into a larger shape.
    pub fn diagonal_in(field: FieldSpec, shape: &[usize], r: usize) -> Self {
        let mut t = Self::zeros(field, shape);
        let st = strides(shape);
        let step: usize = st.iter().sum();
        for i in 0..r {
            t.entries[i * step] = 1 % field.modulus();
        }
        t
    }

    #[inline]
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.shape.len()
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

    pub fn numel(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    fn flat_index(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.order() {
            return Err(Error::DimensionMismatch(format!(
                "index of length {} for order {}",
                idx.len(),
                self.order()
            )));
        }
        let mut flat = 0;
        for (d, (&i, &n)) in idx.iter().zip(&self.shape).enumerate() {
            if i >= n {
                return Err(Error::OutOfRange(format!("index {i} on leg {d} of size {n}")));
            }
            flat = flat * n + i;
        }
        Ok(flat)
    }

    pub fn get(&self, idx: &[usize]) -> Result<u64> {
        Ok(self.entries[self.flat_index(idx)?])
    }

    pub fn set(&mut self, idx: &[usize], value: u64) -> Result<()> {
        let flat = self.flat_index(idx)?;
        self.entries[flat] = self.field.reduce(value);
        Ok(())
    }

    /// Reinterprets the entries over another prime field, reducing them.
    pub fn with_field(&self, field: FieldSpec) -> Self {
        Self {
            shape: self.shape.clone(),
            entries: self.entries.iter().map(|&e| field.reduce(e)).collect(),
            field,
        }
    }

    /// Applies `m` to leg `leg`: `out[.., a, ..] = sum_b m[a, b] * T[.., b, ..]`.
    pub fn mode_product(&self, leg: usize, m: &Matrix) -> Result<Tensor> {
        self.field.check_same(&m.field())?;
        if leg >= self.order() {
            return Err(Error::OutOfRange(format!("leg {leg} of an order-{} tensor", self.order())));
        }
        let n = self.shape[leg];
        if m.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "map with {} columns on leg {leg} of size {n}",
                m.cols()
            )));
        }
        let f = self.field;
        let pre: usize = self.shape[..leg].iter().product();
        let post: usize = self.shape[leg + 1..].iter().product();
        let rows = m.rows();
        let mut shape = self.shape.clone();
        shape[leg] = rows;
        let mut out = vec![0u64; pre * rows * post];
        for p in 0..pre {
            for a in 0..rows {
                let dst = &mut out[(p * rows + a) * post..(p * rows + a + 1) * post];
                for b in 0..n {
                    let c = m.get(a, b);
                    if c == 0 {
                        continue;
                    }
                    let src = &self.entries[(p * n + b) * post..(p * n + b + 1) * post];
                    for (d, &s) in dst.iter_mut().zip(src) {
                        *d = f.mul_add(*d, c, s);
                    }
                }
            }
        }
        Ok(Tensor {
            shape,
            entries: out,
            field: f,
        })
    }

    /// The multilinear action `(M_1 (x) ... (x) M_k) T`, one map per leg.
    pub fn restrict(&self, maps: &[Matrix]) -> Result<Tensor> {
        if maps.len() != self.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} maps for an order-{} tensor",
                maps.len(),
                self.order()
            )));
        }
        let mut t = self.clone();
        for (leg, m) in maps.iter().enumerate() {
            t = t.mode_product(leg, m)?;
        }
        Ok(t)
    }

    /// Fixes leg `leg` to `idx`, giving an order-(k-1) tensor.
    ///
    /// Legs are 0-based. Slicing an order-1 tensor is rejected since tensors
    /// have order at least 1; use [`Tensor::slice_entries`] for the raw data.
    pub fn slice(&self, leg: usize, idx: usize) -> Result<Tensor> {
        if self.order() < 2 {
            return Err(Error::InvalidArgument("cannot slice an order-1 tensor".into()));
        }
        let entries = self.slice_entries(leg, idx)?;
        let mut shape = self.shape.clone();
        shape.remove(leg);
        Ok(Tensor {
            shape,
            entries,
            field: self.field,
        })
    }

    /// Row-major entries of the slice at `idx` along `leg`.
    pub fn slice_entries(&self, leg: usize, idx: usize) -> Result<Vec<u64>> {
        if leg >= self.order() {
            return Err(Error::OutOfRange(format!("leg {leg} of an order-{} tensor", self.order())));
        }
        let n = self.shape[leg];
        if idx >= n {
            return Err(Error::OutOfRange(format!("slice {idx} on leg {leg} of size {n}")));
        }
        let pre: usize = self.shape[..leg].iter().product();
        let post: usize = self.shape[leg + 1..].iter().product();
        let mut out = Vec::with_capacity(pre * post);
        for p in 0..pre {
            out.extend_from_slice(&self.entries[(p * n + idx) * post..(p * n + idx + 1) * post]);
        }
        Ok(out)
    }

    /// Reassembles order-(k-1) slices along a new leg at position `leg`.
    pub fn stack(slices: &[Tensor], leg: usize) -> Result<Tensor> {
        let first = slices
            .first()
            .ok_or_else(|| Error::InvalidArgument("no slices to stack".into()))?;
        let inner = first.shape.clone();
        if leg > inner.len() {
            return Err(Error::OutOfRange(format!("leg {leg} for order {}", inner.len() + 1)));
        }
        for s in slices {
            first.field.check_same(&s.field)?;
            if s.shape != inner {
                return Err(Error::DimensionMismatch("slices of different shapes".into()));
            }
        }
        let n = slices.len();
        let pre: usize = inner[..leg].iter().product();
        let post: usize = inner[leg..].iter().product();
        let mut entries = Vec::with_capacity(pre * n * post);
        for p in 0..pre {
            for s in slices {
                entries.extend_from_slice(&s.entries[p * post..(p + 1) * post]);
            }
        }
        let mut shape = inner;
        shape.insert(leg, n);
        Ok(Tensor {
            shape,
            entries,
            field: first.field,
        })
    }

    /// Block-diagonal direct sum of shape `(n_i + m_i)`.
    pub fn direct_sum(&self, other: &Tensor) -> Result<Tensor> {
        self.field.check_same(&other.field)?;
        if self.order() != other.order() {
            return Err(Error::DimensionMismatch(format!(
                "direct sum of orders {} and {}",
                self.order(),
                other.order()
            )));
        }
        let shape: Vec<usize> = self.shape.iter().zip(&other.shape).map(|(a, b)| a + b).collect();
        let mut out = Tensor::zeros(self.field, &shape);
        let st = strides(&shape);
        for_each_index(&self.shape, |flat, idx| {
            let o: usize = idx.iter().zip(&st).map(|(i, s)| i * s).sum();
            out.entries[o] = self.entries[flat];
        });
        for_each_index(&other.shape, |flat, idx| {
            let o: usize = idx
                .iter()
                .zip(&self.shape)
                .zip(&st)
                .map(|((i, n), s)| (i + n) * s)
                .sum();
            out.entries[o] = other.entries[flat];
        });
        Ok(out)
    }

    fn zip_with(&self, other: &Tensor, op: impl Fn(u64, u64) -> u64) -> Result<Tensor> {
        self.field.check_same(&other.field)?;
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch(format!(
                "shapes {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        Ok(Tensor {
            shape: self.shape.clone(),
            entries: self.entries.iter().zip(&other.entries).map(|(&a, &b)| op(a, b)).collect(),
            field: self.field,
        })
    }

    /// Entrywise sum.
    pub fn pointwise_sum(&self, other: &Tensor) -> Result<Tensor> {
        let f = self.field;
        self.zip_with(other, |a, b| f.add(a, b))
    }

    pub fn pointwise_diff(&self, other: &Tensor) -> Result<Tensor> {
        let f = self.field;
        self.zip_with(other, |a, b| f.sub(a, b))
    }

    /// The restriction of `self` to a box of index ranges.
    pub fn subtensor(&self, ranges: &[Range<usize>]) -> Result<Tensor> {
        if ranges.len() != self.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} ranges for order {}",
                ranges.len(),
                self.order()
            )));
        }
        for (d, (r, &n)) in ranges.iter().zip(&self.shape).enumerate() {
            if r.start > r.end || r.end > n {
                return Err(Error::OutOfRange(format!("range {r:?} on leg {d} of size {n}")));
            }
        }
        let shape: Vec<usize> = ranges.iter().map(|r| r.end - r.start).collect();
        let st = strides(&self.shape);
        let mut out = Tensor::zeros(self.field, &shape);
        for_each_index(&shape, |flat, idx| {
            let src: usize = idx
                .iter()
                .zip(ranges)
                .zip(&st)
                .map(|((i, r), s)| (i + r.start) * s)
                .sum();
            out.entries[flat] = self.entries[src];
        });
        Ok(out)
    }
}

/// Whether a multi-index lies in `[r]^k` off the main diagonal.
pub(crate) fn in_offdiagonal_block(idx: &[usize], r: usize) -> bool {
    idx.iter().all(|&i| i < r) && idx.iter().any(|&i| i != idx[0])
}

/// A random element of `X_r`: the `[r]^k` corner block is zero off its
/// diagonal, the `r` diagonal entries are uniform nonzero, every other entry
/// is uniform.
pub fn sample_x_r(field: FieldSpec, shape: &[usize], r: usize, seed: u64) -> Result<Tensor> {
    let min = shape.iter().copied().min().unwrap_or(0);
    if r > min {
        return Err(Error::InvalidArgument(format!("r = {r} exceeds min(shape) = {min}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(Tensor::from_fn(field, shape, |idx| {
        if idx.iter().all(|&i| i < r) {
            if idx.iter().all(|&i| i == idx[0]) {
                field.random_nonzero(&mut rng)
            } else {
                0
            }
        } else {
            field.random(&mut rng)
        }
    }))
}
