//! Exact subrank facts for small tensors: restriction certificates,
//! exhaustive search over tiny fields, and the non-additivity construction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::upper_bound_generic;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::linalg::Matrix;
use crate::tensor::{for_each_index, in_offdiagonal_block, strides, Tensor};

/// Maps `(A_1, ..., A_k)`, each `r x n_i`, with `(A_1 (x) ... (x) A_k) T = I_r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CertificateJson", into = "CertificateJson")]
pub struct RestrictionCertificate {
    pub r: usize,
    pub maps: Vec<Matrix>,
    pub field: FieldSpec,
}

/// `{"r":r,"modulus":p,"cols":[n_1,..],"maps":[[row-major entries],..]}`
///
/// `cols` keeps the shapes recoverable when `r = 0`.
#[derive(Serialize, Deserialize)]
struct CertificateJson {
    r: usize,
    modulus: u64,
    cols: Vec<usize>,
    maps: Vec<Vec<u64>>,
}

impl From<RestrictionCertificate> for CertificateJson {
    fn from(c: RestrictionCertificate) -> Self {
        CertificateJson {
            r: c.r,
            modulus: c.field.modulus(),
            cols: c.maps.iter().map(Matrix::cols).collect(),
            maps: c.maps.into_iter().map(Matrix::into_entries).collect(),
        }
    }
}

impl TryFrom<CertificateJson> for RestrictionCertificate {
    type Error = Error;

    fn try_from(j: CertificateJson) -> Result<Self> {
        let field = FieldSpec::new(j.modulus)?;
        if j.cols.len() != j.maps.len() {
            return Err(Error::Parse(format!("{} column counts for {} maps", j.cols.len(), j.maps.len())));
        }
        if j.maps.iter().flatten().any(|&e| e >= j.modulus) {
            return Err(Error::Parse("map entry not reduced mod p".into()));
        }
        let maps = j
            .maps
            .into_iter()
            .zip(&j.cols)
            .map(|(m, &c)| Matrix::new(field, j.r, c, m))
            .collect::<Result<_>>()?;
        Ok(Self { r: j.r, maps, field })
    }
}

fn check_shapes(cert: &RestrictionCertificate, t: &Tensor) -> Result<()> {
    cert.field.check_same(&t.field())?;
    if cert.maps.len() != t.order() {
        return Err(Error::DimensionMismatch(format!(
            "{} maps for an order-{} tensor",
            cert.maps.len(),
            t.order()
        )));
    }
    for (i, (m, &n)) in cert.maps.iter().zip(t.shape()).enumerate() {
        if m.rows() != cert.r || m.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "map {i} is {}x{}, expected {}x{n}",
                m.rows(),
                m.cols(),
                cert.r
            )));
        }
    }
    Ok(())
}

/// True iff the maps send `t` exactly to the unit tensor `I_r`.
pub fn verify_certificate(cert: &RestrictionCertificate, t: &Tensor) -> Result<bool> {
    check_shapes(cert, t)?;
    if cert.r == 0 {
        return Ok(true);
    }
    Ok(t.restrict(&cert.maps)? == Tensor::diagonal(cert.field, cert.r, t.order()))
}

/// Certificate for a tensor whose `[r]^k` corner is diagonal with nonzero
/// diagonal: truncating projections on every leg, the last one scaled by the
/// inverse diagonal.
pub fn certificate_for_diagonal(t: &Tensor, r: usize) -> Result<RestrictionCertificate> {
    let field = t.field();
    let k = t.order();
    if t.shape().iter().any(|&n| n < r) {
        return Err(Error::NotXrForm(format!("r = {r} exceeds a side of {:?}", t.shape())));
    }
    let mut bad = None;
    for_each_index(t.shape(), |flat, idx| {
        if bad.is_none() && in_offdiagonal_block(idx, r) && t.entries()[flat] != 0 {
            bad = Some(idx.to_vec());
        }
    });
    if let Some(idx) = bad {
        return Err(Error::NotXrForm(format!("nonzero off-diagonal entry at {idx:?}")));
    }
    let step: usize = strides(t.shape()).iter().sum();
    let diag: Vec<u64> = (0..r).map(|i| t.entries()[i * step]).collect();
    if let Some(i) = diag.iter().position(|&d| d == 0) {
        return Err(Error::NotXrForm(format!("zero diagonal entry at position {i}")));
    }
    let maps = t
        .shape()
        .iter()
        .enumerate()
        .map(|(leg, &n)| {
            let mut m = Matrix::zeros(field, r, n);
            for (i, &d) in diag.iter().enumerate() {
                m.set(i, i, if leg + 1 == k { field.inv(d) } else { 1 });
            }
            m
        })
        .collect();
    Ok(RestrictionCertificate { r, maps, field })
}

/// Exhaustive searches refuse to start beyond this many candidate map tuples.
pub const BRUTE_CAP: u128 = 100_000_000;

fn search_size(q: u128, dims: &[usize]) -> u128 {
    let total: u32 = dims.iter().sum::<usize>() as u32;
    let top = *dims.iter().min().unwrap();
    (1..=top as u32)
        .map(|r| q.checked_pow(r * total).unwrap_or(u128::MAX))
        .fold(0u128, |a, b| a.saturating_add(b))
}

/// The `idx`-th `rows x cols` matrix over `GF(q)` in base-`q` order.
fn nth_matrix(field: FieldSpec, rows: usize, cols: usize, mut idx: u64) -> Matrix {
    let q = field.modulus();
    let entries = (0..rows * cols)
        .map(|_| {
            let e = idx % q;
            idx /= q;
            e
        })
        .collect();
    Matrix::new(field, rows, cols, entries).expect("entries match the shape")
}

/// Contracts leg `leg` of a row-major tensor with `m`, the hand-rolled way.
fn contract(field: FieldSpec, shape: &[usize], data: &[u64], leg: usize, m: &Matrix) -> (Vec<usize>, Vec<u64>) {
    let pre: usize = shape[..leg].iter().product();
    let post: usize = shape[leg + 1..].iter().product();
    let n = shape[leg];
    let r = m.rows();
    let mut out = vec![0u64; pre * r * post];
    for p in 0..pre {
        for i in 0..r {
            for t in 0..n {
                let c = m.get(i, t);
                if c == 0 {
                    continue;
                }
                for s in 0..post {
                    let o = (p * r + i) * post + s;
                    out[o] = field.mul_add(out[o], c, data[(p * n + t) * post + s]);
                }
            }
        }
    }
    let mut new_shape = shape.to_vec();
    new_shape[leg] = r;
    (new_shape, out)
}

/// Rows of the last map, found independently: row `j` must send the partial
/// contraction `p` (shape `[r; k-1] x n_last`) to the indicator of `(j, ..., j)`.
fn solve_last_leg(field: FieldSpec, p: &[u64], r: usize, k: usize, n_last: usize) -> Option<Matrix> {
    let q = field.modulus();
    let cells = r.pow(k as u32 - 1);
    let diag_step: usize = (0..k - 1).map(|d| r.pow(d as u32)).sum();
    let mut rows = Vec::with_capacity(r);
    for j in 0..r {
        let target = j * diag_step;
        let total = q.pow(n_last as u32);
        let found = (0..total).find_map(|idx| {
            let c = nth_matrix(field, 1, n_last, idx);
            let c = c.row(0);
            let ok = (0..cells).all(|cell| {
                let mut acc = 0u64;
                for (t, &ct) in c.iter().enumerate() {
                    acc = field.mul_add(acc, ct, p[cell * n_last + t]);
                }
                acc == u64::from(cell == target)
            });
            ok.then(|| c.to_vec())
        })?;
        rows.push(found);
    }
    Some(Matrix::from_rows(field, n_last, &rows).expect("rows of equal length"))
}

/// Enumerates legs `leg..k-1` below a fixed prefix, returning the first full certificate.
fn search_from(
    field: FieldSpec,
    shape: &[usize],
    data: &[u64],
    r: usize,
    leg: usize,
    prefix: &mut Vec<Matrix>,
) -> Option<Vec<Matrix>> {
    let k = shape.len();
    if leg + 1 == k {
        let last = solve_last_leg(field, data, r, k, shape[leg])?;
        let mut maps = prefix.clone();
        maps.push(last);
        return Some(maps);
    }
    let n = shape[leg];
    let total = field.modulus().pow((r * n) as u32);
    for idx in 0..total {
        let m = nth_matrix(field, r, n, idx);
        if m.rank() < r {
            continue;
        }
        let (s, d) = contract(field, shape, data, leg, &m);
        prefix.push(m);
        let found = search_from(field, &s, &d, r, leg + 1, prefix);
        prefix.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

fn check_searchable(t: &Tensor) -> Result<()> {
    if t.order() < 2 {
        return Err(Error::InvalidArgument("exhaustive search needs order at least 2".into()));
    }
    let candidates = search_size(u128::from(t.field().modulus()), t.shape());
    if candidates > BRUTE_CAP {
        return Err(Error::SearchTooLarge {
            candidates,
            cap: BRUTE_CAP,
        });
    }
    Ok(())
}

/// First certificate at exactly `r` in enumeration order, if any.
///
/// The first leg's candidates are split across threads; the result does not
/// depend on scheduling.
pub fn brute_certificate(t: &Tensor, r: usize) -> Result<Option<RestrictionCertificate>> {
    check_searchable(t)?;
    let field = t.field();
    if r == 0 {
        let maps = t.shape().iter().map(|&n| Matrix::zeros(field, 0, n)).collect();
        return Ok(Some(RestrictionCertificate { r, maps, field }));
    }
    if r > *t.shape().iter().min().unwrap() {
        return Ok(None);
    }
    let shape = t.shape().to_vec();
    let n0 = shape[0];
    let total = field.modulus().pow((r * n0) as u32);
    let maps = (0..total).into_par_iter().find_map_first(|idx| {
        let m = nth_matrix(field, r, n0, idx);
        if m.rank() < r {
            return None;
        }
        let (s, d) = contract(field, &shape, t.entries(), 0, &m);
        let mut prefix = vec![m];
        search_from(field, &s, &d, r, 1, &mut prefix)
    });
    Ok(maps.map(|maps| RestrictionCertificate { r, maps, field }))
}

/// Exact subrank over the tensor's own (small) field: the largest `r` for
/// which some maps over `GF(q)` restrict `t` to `I_r`.
///
/// Refuses with [`Error::SearchTooLarge`] when `sum_r prod_i q^(r n_i)`
/// exceeds [`BRUTE_CAP`].
pub fn brute_subrank(t: &Tensor) -> Result<usize> {
    check_searchable(t)?;
    let top = *t.shape().iter().min().unwrap();
    // I_r restricts to I_{r-1}, so the first failure going up is final.
    let mut best = 0;
    for r in 1..=top {
        if brute_certificate(t, r)?.is_none() {
            break;
        }
        best = r;
    }
    Ok(best)
}

/// One row of the scan for the first `n` where two summand bounds fall short.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub n: usize,
    /// `2 * floor(sqrt(3n - 2))`
    pub generic_sum: usize,
    pub gap: bool,
}

/// Two order-3 tensors `T` and `S = I_n - T` whose direct sum restricts to
/// `T + S = I_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonAdditivityReport {
    pub n: usize,
    pub seed: u64,
    pub modulus: FieldSpec,
    pub t: Tensor,
    pub s: Tensor,
    /// Certificate on `T (+) S`: each map is `[I_n | I_n]`.
    pub certificate: RestrictionCertificate,
    pub verified: bool,
    /// Certified lower bound on the subrank of the sum.
    pub certified_sum_lower: usize,
    /// Upper bound for a generic `n x n x n` tensor; applies to `T` and `S`
    /// only as a statement about generic tensors, not to this instance.
    pub generic_summand_upper: usize,
    pub generic_sum_upper: usize,
    /// First `n` with `2 floor(sqrt(3n - 2)) < n`.
    pub threshold: usize,
    pub scan: Vec<ThresholdRow>,
}

fn threshold_row(n: usize) -> ThresholdRow {
    let b = upper_bound_generic(&[n, n, n]).expect("n >= 1");
    ThresholdRow {
        n,
        generic_sum: 2 * b,
        gap: 2 * b < n,
    }
}

/// First `n >= 2` with `2 floor(sqrt(3n - 2)) < n`; every larger `n` has the gap as well.
pub fn non_additivity_threshold() -> usize {
    (2..).find(|&n| threshold_row(n).gap).expect("the gap opens eventually")
}

/// Samples `T`, builds `S = I_n - T`, and certifies `Q(T (+) S) >= n`.
pub fn non_additivity_demo(field: FieldSpec, n: usize, seed: u64) -> Result<NonAdditivityReport> {
    let t = Tensor::random(field, &[n, n, n], seed);
    non_additivity_for(&t, seed)
}

/// The construction for a given `T`.
pub fn non_additivity_for(t: &Tensor, seed: u64) -> Result<NonAdditivityReport> {
    let field = t.field();
    let n = t.shape()[0];
    if n < 2 || t.shape() != [n, n, n] {
        return Err(Error::InvalidArgument(format!("need an n x n x n tensor with n >= 2, got {:?}", t.shape())));
    }
    let s = Tensor::diagonal(field, n, 3).pointwise_diff(t)?;
    let sum = t.direct_sum(&s)?;
    let mut sum_map = Matrix::zeros(field, n, 2 * n);
    for i in 0..n {
        sum_map.set(i, i, 1);
        sum_map.set(i, n + i, 1);
    }
    let certificate = RestrictionCertificate {
        r: n,
        maps: vec![sum_map; 3],
        field,
    };
    let verified = verify_certificate(&certificate, &sum)?;
    let b = upper_bound_generic(&[n, n, n])?;
    let threshold = non_additivity_threshold();
    Ok(NonAdditivityReport {
        n,
        seed,
        modulus: field,
        t: t.clone(),
        s,
        certificate,
        verified,
        certified_sum_lower: if verified { n } else { 0 },
        generic_summand_upper: b,
        generic_sum_upper: 2 * b,
        threshold,
        scan: (2..=n.max(threshold)).map(threshold_row).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    #[test]
    fn unit_tensor_certificates() {
        let f = gf(7);
        let t = Tensor::diagonal(f, 3, 3);
        let c = certificate_for_diagonal(&t, 3).unwrap();
        assert!(verify_certificate(&c, &t).unwrap());
        let z = Tensor::zeros(f, &[3, 3, 3]);
        assert!(!verify_certificate(&c, &z).unwrap());
        let c0 = certificate_for_diagonal(&z, 0).unwrap();
        assert!(verify_certificate(&c0, &z).unwrap());
        assert!(certificate_for_diagonal(&z, 1).is_err());
    }

    #[test]
    fn certificate_json_round_trip() {
        let f = gf(5);
        let t = crate::tensor::sample_x_r(f, &[4, 3, 5], 2, 9).unwrap();
        let c = certificate_for_diagonal(&t, 2).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: RestrictionCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }

    #[test]
    fn small_brute_values() {
        let f = gf(2);
        assert_eq!(brute_subrank(&Tensor::diagonal(f, 2, 3)).unwrap(), 2);
        assert_eq!(brute_subrank(&Tensor::zeros(f, &[2, 2, 2])).unwrap(), 0);
        let mut w = Tensor::zeros(f, &[2, 2, 2]);
        for idx in [[0, 0, 1], [0, 1, 0], [1, 0, 0]] {
            w.set(&idx, 1).unwrap();
        }
        assert_eq!(brute_subrank(&w).unwrap(), 1);
        let c = brute_certificate(&w, 1).unwrap().unwrap();
        assert!(verify_certificate(&c, &w).unwrap());
        assert!(matches!(
            brute_subrank(&Tensor::zeros(f, &[3, 3, 3])),
            Err(Error::SearchTooLarge { .. })
        ));
    }

    #[test]
    fn demo_verifies() {
        let r = non_additivity_demo(FieldSpec::default(), 5, 1).unwrap();
        assert!(r.verified);
        assert_eq!(r.certified_sum_lower, 5);
        assert_eq!(r.threshold, 11);
        let zero = Tensor::zeros(FieldSpec::default(), &[3, 3, 3]);
        assert!(non_additivity_for(&zero, 0).unwrap().verified);
    }
}
