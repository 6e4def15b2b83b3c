//! Subspaces of a tensor space `K^{n_1,...,n_k}`.
//!
//! A subspace is either spanned by coordinate unit tensors (kept as a sorted
//! position list, so `Y_r` over a large ambient costs nothing to build) or by an
//! explicit independent list of flattened tensors. The ambient shape may be
//! empty, which stands for the one-dimensional space `K`.

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::linalg::{independent_basis, rank_in_place, random_subspace, EchelonBasis};
use crate::tensor::{for_each_index, in_offdiagonal_block, numel, strides, Tensor};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Basis {
    /// Sorted, deduplicated flat positions.
    Coordinates(Vec<usize>),
    Vectors(Vec<Vec<u64>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorSubspace {
    shape: Vec<usize>,
    field: FieldSpec,
    basis: Basis,
}

impl TensorSubspace {
    /// Wraps an explicit basis, rejecting dependent or misshapen vectors.
    pub fn from_basis(field: FieldSpec, shape: &[usize], vectors: Vec<Vec<u64>>) -> Result<Self> {
        let len = numel(shape);
        let mut echelon = EchelonBasis::new(field, len);
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != len {
                return Err(Error::DimensionMismatch(format!(
                    "basis vector {i} has length {}, ambient {shape:?} has {len}",
                    v.len()
                )));
            }
            if !echelon.insert(v)? {
                return Err(Error::Dependent(format!("basis vector {i} lies in the span of the previous ones")));
            }
        }
        let vectors = vectors
            .into_iter()
            .map(|v| v.into_iter().map(|e| field.reduce(e)).collect())
            .collect();
        Ok(Self {
            shape: shape.to_vec(),
            field,
            basis: Basis::Vectors(vectors),
        })
    }

    /// Span of arbitrary vectors; dependent ones are dropped (first-seen greedy).
    pub fn span(field: FieldSpec, shape: &[usize], vectors: &[Vec<u64>]) -> Result<Self> {
        let len = numel(shape);
        if let Some(v) = vectors.iter().find(|v| v.len() != len) {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in ambient {shape:?}",
                v.len()
            )));
        }
        Ok(Self {
            shape: shape.to_vec(),
            field,
            basis: Basis::Vectors(independent_basis(field, vectors)?),
        })
    }

    pub fn from_tensors(tensors: &[Tensor]) -> Result<Self> {
        let first = tensors
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty tensor list; use TensorSubspace::zero".into()))?;
        for t in tensors {
            first.field().check_same(&t.field())?;
            if t.shape() != first.shape() {
                return Err(Error::DimensionMismatch("tensors of different shapes".into()));
            }
        }
        Self::from_basis(
            first.field(),
            first.shape(),
            tensors.iter().map(|t| t.entries().to_vec()).collect(),
        )
    }

    /// Span of the unit tensors at the given flat positions.
    pub fn coordinates(field: FieldSpec, shape: &[usize], mut positions: Vec<usize>) -> Result<Self> {
        let len = numel(shape);
        positions.sort_unstable();
        positions.dedup();
        if let Some(&p) = positions.last() {
            if p >= len {
                return Err(Error::OutOfRange(format!("position {p} in ambient of size {len}")));
            }
        }
        Ok(Self {
            shape: shape.to_vec(),
            field,
            basis: Basis::Coordinates(positions),
        })
    }

    pub fn zero(field: FieldSpec, shape: &[usize]) -> Self {
        Self {
            shape: shape.to_vec(),
            field,
            basis: Basis::Coordinates(Vec::new()),
        }
    }

    pub fn full(field: FieldSpec, shape: &[usize]) -> Self {
        Self {
            shape: shape.to_vec(),
            field,
            basis: Basis::Coordinates((0..numel(shape)).collect()),
        }
    }

    /// A uniformly random subspace of dimension `dim`.
    pub fn random(field: FieldSpec, shape: &[usize], dim: usize, seed: u64) -> Result<Self> {
        let vectors = random_subspace(field, numel(shape), dim, seed)?;
        Ok(Self {
            shape: shape.to_vec(),
            field,
            basis: Basis::Vectors(vectors),
        })
    }

    #[inline]
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    #[inline]
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        numel(&self.shape)
    }

    pub fn dim(&self) -> usize {
        match &self.basis {
            Basis::Coordinates(p) => p.len(),
            Basis::Vectors(v) => v.len(),
        }
    }

    pub fn is_coordinate(&self) -> bool {
        matches!(self.basis, Basis::Coordinates(_))
    }

    pub fn coordinate_positions(&self) -> Option<&[usize]> {
        match &self.basis {
            Basis::Coordinates(p) => Some(p),
            Basis::Vectors(_) => None,
        }
    }

    /// Flattened basis vectors.
    pub fn vectors(&self) -> Vec<Vec<u64>> {
        match &self.basis {
            Basis::Vectors(v) => v.clone(),
            Basis::Coordinates(p) => {
                let len = self.ambient_dim();
                let one = 1 % self.field.modulus();
                p.iter()
                    .map(|&i| {
                        let mut v = vec![0; len];
                        v[i] = one;
                        v
                    })
                    .collect()
            }
        }
    }

    pub fn basis_tensors(&self) -> Result<Vec<Tensor>> {
        self.vectors()
            .into_iter()
            .map(|v| Tensor::new(self.field, self.shape.clone(), v))
            .collect()
    }

    pub fn contains(&self, v: &[u64]) -> Result<bool> {
        if v.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in ambient {:?}",
                v.len(),
                self.shape
            )));
        }
        match &self.basis {
            Basis::Coordinates(p) => Ok(v
                .iter()
                .enumerate()
                .all(|(i, &e)| self.field.reduce(e) == 0 || p.binary_search(&i).is_ok())),
            Basis::Vectors(vs) => {
                let mut e = EchelonBasis::new(self.field, v.len());
                for b in vs {
                    e.insert(b)?;
                }
                e.contains(v)
            }
        }
    }

    /// Same data, different shape with the same number of entries; used to
    /// insert or squeeze singleton axes.
    pub fn reshaped(&self, shape: &[usize]) -> Result<Self> {
        if numel(shape) != self.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot reshape {:?} into {shape:?}",
                self.shape
            )));
        }
        Ok(Self {
            shape: shape.to_vec(),
            field: self.field,
            basis: self.basis.clone(),
        })
    }

    /// Reorders axes: new axis `m` is old axis `perm[m]`. Basis order is kept.
    pub fn permute_axes(&self, perm: &[usize]) -> Result<Self> {
        let k = self.shape.len();
        let mut seen = vec![false; k];
        if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation of {k} axes")));
        }
        let new_shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let old_strides = strides(&self.shape);
        // map[new_flat] = old_flat
        let mut map = vec![0usize; self.ambient_dim()];
        for_each_index(&new_shape, |flat, idx| {
            map[flat] = idx.iter().zip(perm).map(|(&i, &p)| i * old_strides[p]).sum();
        });
        let basis = match &self.basis {
            Basis::Coordinates(pos) => {
                let mut inverse = vec![0usize; map.len()];
                for (new, &old) in map.iter().enumerate() {
                    inverse[old] = new;
                }
                let mut p: Vec<usize> = pos.iter().map(|&o| inverse[o]).collect();
                p.sort_unstable();
                Basis::Coordinates(p)
            }
            Basis::Vectors(vs) => Basis::Vectors(
                vs.iter()
                    .map(|v| map.iter().map(|&old| v[old]).collect())
                    .collect(),
            ),
        };
        Ok(Self {
            shape: new_shape,
            field: self.field,
            basis,
        })
    }

    /// Embeds along `axis` into a longer axis of size `new_size`, placing the
    /// old index `t` at `offset + t`.
    pub fn embed_along(&self, axis: usize, new_size: usize, offset: usize) -> Result<Self> {
        if axis >= self.shape.len() || offset + self.shape[axis] > new_size {
            return Err(Error::OutOfRange(format!(
                "cannot embed axis {axis} of {:?} at offset {offset} into size {new_size}",
                self.shape
            )));
        }
        let n = self.shape[axis];
        let pre: usize = self.shape[..axis].iter().product();
        let post: usize = self.shape[axis + 1..].iter().product();
        let mut shape = self.shape.clone();
        shape[axis] = new_size;
        let map = |flat: usize| {
            let q = flat % post;
            let t = (flat / post) % n;
            let p = flat / (post * n);
            (p * new_size + offset + t) * post + q
        };
        let new_len = pre * new_size * post;
        let basis = match &self.basis {
            Basis::Coordinates(pos) => Basis::Coordinates(pos.iter().map(|&i| map(i)).collect()),
            Basis::Vectors(vs) => Basis::Vectors(
                vs.iter()
                    .map(|v| {
                        let mut w = vec![0u64; new_len];
                        for (i, &e) in v.iter().enumerate() {
                            w[map(i)] = e;
                        }
                        w
                    })
                    .collect(),
            ),
        };
        Ok(Self {
            shape,
            field: self.field,
            basis,
        })
    }

    /// Concatenates bases of subspaces sharing an ambient, failing unless the
    /// sum is direct.
    pub fn direct_union(parts: &[TensorSubspace]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("no subspaces to join".into()))?;
        let mut vectors = Vec::new();
        for p in parts {
            check_compatible(first, p)?;
            vectors.extend(p.vectors());
        }
        Self::from_basis(first.field, &first.shape, vectors)
    }

    /// Splits the basis into its first `count` vectors and the rest.
    pub fn split_basis(&self, count: usize) -> Result<(Self, Self)> {
        if count > self.dim() {
            return Err(Error::OutOfRange(format!("split at {count} of a {}-dim basis", self.dim())));
        }
        let (a, b) = match &self.basis {
            Basis::Coordinates(p) => (
                Basis::Coordinates(p[..count].to_vec()),
                Basis::Coordinates(p[count..].to_vec()),
            ),
            Basis::Vectors(v) => (Basis::Vectors(v[..count].to_vec()), Basis::Vectors(v[count..].to_vec())),
        };
        let make = |basis| Self {
            shape: self.shape.clone(),
            field: self.field,
            basis,
        };
        Ok((make(a), make(b)))
    }
}

fn check_compatible(a: &TensorSubspace, b: &TensorSubspace) -> Result<()> {
    a.field.check_same(&b.field)?;
    if a.shape != b.shape {
        return Err(Error::DimensionMismatch(format!(
            "subspaces of ambients {:?} and {:?}",
            a.shape, b.shape
        )));
    }
    Ok(())
}

/// `X[leg] = K^n (x) X` with the new factor placed at position `leg`:
/// the subspace of tensors whose slices along `leg` all lie in `X`.
///
/// Basis order is `e_t (x) b` with `t` outer and `b` inner.
pub fn lift_subspace(x: &TensorSubspace, leg: usize, n: usize) -> Result<TensorSubspace> {
    if leg > x.shape.len() {
        return Err(Error::OutOfRange(format!(
            "leg {leg} for a lift of an order-{} subspace",
            x.shape.len()
        )));
    }
    let pre: usize = x.shape[..leg].iter().product();
    let post: usize = x.shape[leg..].iter().product();
    let mut shape = x.shape.clone();
    shape.insert(leg, n);
    let place = |flat: usize, t: usize| {
        let (p, q) = (flat / post, flat % post);
        (p * n + t) * post + q
    };
    let basis = match &x.basis {
        Basis::Coordinates(pos) => {
            let mut out: Vec<usize> = (0..n).flat_map(|t| pos.iter().map(move |&i| place(i, t))).collect();
            out.sort_unstable();
            Basis::Coordinates(out)
        }
        Basis::Vectors(vs) => {
            let len = pre * n * post;
            let mut out = Vec::with_capacity(n * vs.len());
            for t in 0..n {
                for v in vs {
                    let mut w = vec![0u64; len];
                    for (i, &e) in v.iter().enumerate() {
                        if e != 0 {
                            w[place(i, t)] = e;
                        }
                    }
                    out.push(w);
                }
            }
            Basis::Vectors(out)
        }
    };
    Ok(TensorSubspace {
        shape,
        field: x.field,
        basis,
    })
}

/// Dimension of the sum of subspaces sharing one ambient.
///
/// Coordinate parts are handled exactly by projection:
/// `dim(U + span(e_c : c in C)) = |C| + rank(U restricted to the columns outside C)`.
pub fn sum_rank(parts: &[&TensorSubspace]) -> Result<usize> {
    let Some(first) = parts.first() else {
        return Ok(0);
    };
    for p in parts {
        check_compatible(first, p)?;
    }
    let len = first.ambient_dim();
    let mut covered = vec![false; len];
    for p in parts {
        if let Basis::Coordinates(pos) = &p.basis {
            for &i in pos {
                covered[i] = true;
            }
        }
    }
    let coord_count = covered.iter().filter(|&&c| c).count();
    let free: Vec<usize> = (0..len).filter(|&i| !covered[i]).collect();
    let ncols = free.len();
    let nrows: usize = parts
        .iter()
        .map(|p| match &p.basis {
            Basis::Vectors(v) => v.len(),
            Basis::Coordinates(_) => 0,
        })
        .sum();
    if ncols == 0 || nrows == 0 {
        return Ok(coord_count);
    }
    let mut buf = Vec::with_capacity(nrows * ncols);
    for p in parts {
        if let Basis::Vectors(vs) = &p.basis {
            for v in vs {
                buf.extend(free.iter().map(|&c| v[c] as u32));
            }
        }
    }
    Ok(coord_count + rank_in_place(&first.field, &mut buf, nrows, ncols))
}

/// Whether the subspaces together span their common ambient.
pub fn spans_ambient(parts: &[&TensorSubspace]) -> Result<bool> {
    let Some(first) = parts.first() else {
        return Ok(false);
    };
    Ok(sum_rank(parts)? == first.ambient_dim())
}

/// `W_r`: unit tensors of `K^{r,r,r}` whose index triple has a repeated value.
/// Dimension `3r^2 - 2r`.
pub fn basis_w_r(field: FieldSpec, r: usize) -> TensorSubspace {
    let shape = [r, r, r];
    let mut pos = Vec::new();
    for_each_index(&shape, |flat, idx| {
        if idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2] {
            pos.push(flat);
        }
    });
    TensorSubspace {
        shape: shape.to_vec(),
        field,
        basis: Basis::Coordinates(pos),
    }
}

/// Order-k analogue of `W_r`: positions where all indices except possibly one
/// coincide.
///
/// This is the span of the lifted corner slices `P_i[i]` of a tensor in `X_r`
/// for order k, which for `k = 3` is exactly [`basis_w_r`]. Whether a strong
/// criterion built on it characterises generic subrank for `k > 3` has not been
/// established.
#[cfg(feature = "experimental")]
pub fn basis_w_r_order_k(field: FieldSpec, r: usize, k: usize) -> TensorSubspace {
    let shape = vec![r; k];
    let mut pos = Vec::new();
    for_each_index(&shape, |flat, idx| {
        let hit = (0..k).any(|skip| {
            let mut rest = idx.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v);
            match rest.next() {
                Some(v0) => rest.all(|v| v == v0),
                None => true,
            }
        });
        if hit {
            pos.push(flat);
        }
    });
    TensorSubspace {
        shape,
        field,
        basis: Basis::Coordinates(pos),
    }
}

/// `Y_r`: every unit tensor except those in the `[r]^k` corner block off its
/// diagonal. Dimension `prod(n_i) - r^k + r`.
pub fn basis_y_r(field: FieldSpec, shape: &[usize], r: usize) -> Result<TensorSubspace> {
    let min = shape.iter().copied().min().unwrap_or(0);
    if r > min {
        return Err(Error::InvalidArgument(format!("r = {r} exceeds min(shape) = {min}")));
    }
    let mut pos = Vec::new();
    for_each_index(shape, |flat, idx| {
        if !in_offdiagonal_block(idx, r) {
            pos.push(flat);
        }
    });
    Ok(TensorSubspace {
        shape: shape.to_vec(),
        field,
        basis: Basis::Coordinates(pos),
    })
}
