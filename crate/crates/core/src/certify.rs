//! Randomized one-sided certification of generic subrank lower bounds.
//!
//! For `r <= n_i`, sample generic subspaces `X_i` of `(K^r)^{(x)(k-1)}` of
//! dimension `n_i - r` and test whether their lifts `X_i[i]` span `K^{r^k}`
//! (weak criterion), or, for order 3, span it together with `W_r` (strong
//! criterion). Spanning is the nonvanishing of an integer polynomial minor, so
//! success over `GF(p)` proves `Q(n_1,...,n_k) >= r` over characteristic zero.
//! Failure proves nothing and is reported as [`Outcome::Inconclusive`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::upper_bound_generic;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::linalg::derive_seed;
use crate::subspace::{basis_w_r, lift_subspace, spans_ambient, sum_rank, TensorSubspace};
use crate::tensor::{numel, sample_x_r};

pub const DEFAULT_RETRIES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Weak,
    Strong,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Weak => "weak",
            Mode::Strong => "strong",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(Mode::Weak),
            "strong" => Ok(Mode::Strong),
            other => Err(Error::Parse(format!("unknown mode {other:?}, expected weak or strong"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Certified,
    Inconclusive,
}

/// Why a certification finished without running the full retry loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shortcut {
    /// Some `n_i - r >= r^(k-1)`: that leg's subspace is everything.
    FullLeg,
    /// Fewer lifted vectors than coordinates to cover.
    DimensionDeficit,
    /// `r = 0` needs no witness.
    Trivial,
    /// Read off a verified decomposition witness.
    Witness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certification {
    pub r: usize,
    pub outcome: Outcome,
    /// First attempt seed; attempt `j` uses `seed + j`.
    pub seed: u64,
    /// Attempts actually sampled.
    pub attempts: usize,
    /// Seed of the attempt that spanned.
    pub certified_seed: Option<u64>,
    pub shortcut: Option<Shortcut>,
}

impl Certification {
    pub fn is_certified(&self) -> bool {
        self.outcome == Outcome::Certified
    }
}

/// One line of a report's trial log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trial {
    pub r: usize,
    pub seed: u64,
    pub retries: usize,
    pub outcome: Outcome,
}

impl From<&Certification> for Trial {
    fn from(c: &Certification) -> Self {
        Trial {
            r: c.r,
            seed: c.seed,
            retries: c.attempts,
            outcome: c.outcome,
        }
    }
}

/// Result of a downward search for the largest certified `r`.
///
/// `certified_lower <= upper_bound` is not enforced here; a violation would
/// expose a bug, since the upper bound holds unconditionally.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericSubrankReport {
    pub dims: Vec<usize>,
    pub mode: Mode,
    #[serde(rename = "upper")]
    pub upper_bound: usize,
    #[serde(rename = "lower")]
    pub certified_lower: usize,
    #[serde(rename = "modulus")]
    pub field: FieldSpec,
    pub trials: Vec<Trial>,
}

fn validate(dims: &[usize], r: usize, mode: Mode) -> Result<()> {
    if dims.len() < 2 {
        return Err(Error::InvalidArgument(format!("need at least two legs, got {dims:?}")));
    }
    if dims.contains(&0) {
        return Err(Error::InvalidArgument(format!("zero dimension in {dims:?}")));
    }
    let min = *dims.iter().min().unwrap();
    if r > min {
        return Err(Error::InvalidArgument(format!("r = {r} exceeds min(dims) = {min}")));
    }
    if mode == Mode::Strong && dims.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "strong criterion is defined for order 3 only, got order {}",
            dims.len()
        )));
    }
    Ok(())
}

/// The generic subspaces `X_i` of one attempt, before lifting.
///
/// Leg `i` draws from `derive_seed(seed, i)`; the sample does not depend on
/// the mode, so weak and strong runs at one seed see the same subspaces.
pub fn sample_leg_subspaces(field: FieldSpec, dims: &[usize], r: usize, seed: u64) -> Result<Vec<TensorSubspace>> {
    let k = dims.len();
    let shape = vec![r; k - 1];
    let cap = numel(&shape);
    dims.iter()
        .enumerate()
        .map(|(i, &n)| TensorSubspace::random(field, &shape, (n - r).min(cap), derive_seed(seed, i as u64)))
        .collect()
}

/// Whether the lifts of the given leg subspaces (plus `W_r` in strong mode)
/// span `K^{r^k}`.
pub fn leg_subspaces_span(xs: &[TensorSubspace], r: usize, mode: Mode) -> Result<bool> {
    let lifts = xs
        .iter()
        .enumerate()
        .map(|(i, x)| lift_subspace(x, i, r))
        .collect::<Result<Vec<_>>>()?;
    let mut parts: Vec<&TensorSubspace> = lifts.iter().collect();
    let w;
    if mode == Mode::Strong {
        w = basis_w_r(xs[0].field(), r);
        parts.push(&w);
    }
    spans_ambient(&parts)
}

/// Tries to certify `Q(dims) >= r` with up to `retries` independent samples.
pub fn certify_lower(
    field: FieldSpec,
    dims: &[usize],
    r: usize,
    mode: Mode,
    seed: u64,
    retries: usize,
) -> Result<Certification> {
    validate(dims, r, mode)?;
    let done = |outcome, attempts, certified_seed, shortcut| Certification {
        r,
        outcome,
        seed,
        attempts,
        certified_seed,
        shortcut,
    };
    if r == 0 {
        return Ok(done(Outcome::Certified, 0, None, Some(Shortcut::Trivial)));
    }
    let k = dims.len();
    let cap = r.pow(k as u32 - 1);
    if dims.iter().any(|&n| n - r >= cap) {
        return Ok(done(Outcome::Certified, 0, None, Some(Shortcut::FullLeg)));
    }
    let supplied: usize = dims.iter().map(|&n| r * (n - r)).sum();
    let needed = match mode {
        Mode::Weak => r.pow(k as u32),
        Mode::Strong => r * (r - 1) * (r.saturating_sub(2)),
    };
    if supplied < needed {
        return Ok(done(Outcome::Inconclusive, 0, None, Some(Shortcut::DimensionDeficit)));
    }
    for attempt in 0..retries {
        let s = seed.wrapping_add(attempt as u64);
        let xs = sample_leg_subspaces(field, dims, r, s)?;
        if leg_subspaces_span(&xs, r, mode)? {
            return Ok(done(Outcome::Certified, attempt + 1, Some(s), None));
        }
    }
    Ok(done(Outcome::Inconclusive, retries, None, None))
}

/// Rank of the differential of `psi_r` at `(I, ..., I, T)` for a random
/// `T in X_r`, i.e. `dim(L^[1] + M^[2] + N^[3] + Y_r)` for order 3.
///
/// The hatted spans are the `r x ... x r` corners of the slices in each
/// direction. Their lifts live inside the corner block, and `Y_r` is every
/// coordinate outside that block plus its diagonal, so the rank is
/// `(prod n_i - r^k) + dim(lifts + diagonal)` computed inside `K^{r^k}`.
pub fn differential_image_rank(field: FieldSpec, dims: &[usize], r: usize, seed: u64) -> Result<usize> {
    validate(dims, r, Mode::Weak)?;
    let total = numel(dims);
    if r == 0 {
        return Ok(total);
    }
    let t = sample_x_r(field, dims, r, seed)?;
    let k = dims.len();
    let corner_shape = vec![r; k - 1];
    let mut lifts = Vec::with_capacity(k);
    for (leg, &n) in dims.iter().enumerate() {
        let mut slice_dims = dims.to_vec();
        slice_dims.remove(leg);
        let corners: Vec<Vec<u64>> = (0..n)
            .map(|idx| {
                let s = t.slice_entries(leg, idx)?;
                Ok(corner(&s, &slice_dims, r))
            })
            .collect::<Result<_>>()?;
        let hat = TensorSubspace::span(field, &corner_shape, &corners)?;
        lifts.push(lift_subspace(&hat, leg, r)?);
    }
    let block = vec![r; k];
    let step: usize = crate::tensor::strides(&block).iter().sum();
    let diag = TensorSubspace::coordinates(field, &block, (0..r).map(|i| i * step).collect())?;
    let mut parts: Vec<&TensorSubspace> = lifts.iter().collect();
    parts.push(&diag);
    Ok(total - r.pow(k as u32) + sum_rank(&parts)?)
}

/// Entries of the `[r]^m` corner of a row-major tensor of shape `shape`.
fn corner(entries: &[u64], shape: &[usize], r: usize) -> Vec<u64> {
    let block = vec![r; shape.len()];
    let st = crate::tensor::strides(shape);
    let mut out = Vec::with_capacity(numel(&block));
    crate::tensor::for_each_index(&block, |_, idx| {
        let flat: usize = idx.iter().zip(&st).map(|(i, s)| i * s).sum();
        out.push(entries[flat]);
    });
    out
}

/// Searches `r` downward from the upper bound and reports the first
/// certified value. Every probe at `r` uses the seed family starting at
/// `base_seed`.
pub fn generic_subrank_estimate(
    field: FieldSpec,
    dims: &[usize],
    mode: Mode,
    base_seed: u64,
    retries: usize,
) -> Result<GenericSubrankReport> {
    validate(dims, 0, mode)?;
    let upper = upper_bound_generic(dims)?;
    let mut trials = Vec::new();
    let mut lower = 0;
    for r in (1..=upper).rev() {
        let c = certify_lower(field, dims, r, mode, base_seed, retries)?;
        trials.push(Trial::from(&c));
        if c.is_certified() {
            lower = r;
            break;
        }
    }
    Ok(GenericSubrankReport {
        dims: dims.to_vec(),
        mode,
        upper_bound: upper,
        certified_lower: lower,
        field,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> FieldSpec {
        FieldSpec::default()
    }

    #[test]
    fn pigeonhole_case() {
        let c = certify_lower(f(), &[2, 2, 2], 2, Mode::Strong, 0, 5).unwrap();
        assert!(c.is_certified());
        assert_eq!(c.attempts, 1);
    }

    #[test]
    fn q7_is_four() {
        let c = certify_lower(f(), &[7, 7, 7], 4, Mode::Strong, 0, 5).unwrap();
        assert!(c.is_certified());
        let c = certify_lower(f(), &[7, 7, 7], 5, Mode::Strong, 0, 5).unwrap();
        assert!(!c.is_certified());
    }

    #[test]
    fn weak_dimension_deficit() {
        let c = certify_lower(f(), &[12, 12, 12], 6, Mode::Weak, 0, 5).unwrap();
        assert_eq!(c.outcome, Outcome::Inconclusive);
        assert_eq!(c.shortcut, Some(Shortcut::DimensionDeficit));
    }

    #[test]
    fn errors() {
        assert!(certify_lower(f(), &[3, 3], 4, Mode::Weak, 0, 5).is_err());
        assert!(certify_lower(f(), &[3, 3, 3, 3], 2, Mode::Strong, 0, 5).is_err());
        assert!(generic_subrank_estimate(f(), &[3, 3, 3, 3], Mode::Strong, 0, 5).is_err());
    }

    #[test]
    fn full_leg_shortcut() {
        let c = certify_lower(f(), &[12, 3, 3], 2, Mode::Weak, 0, 5).unwrap();
        assert_eq!(c.shortcut, Some(Shortcut::FullLeg));
        assert!(c.is_certified());
    }

    #[test]
    fn differential_examples() {
        assert_eq!(differential_image_rank(f(), &[3, 4, 5], 0, 1).unwrap(), 60);
        assert_eq!(differential_image_rank(f(), &[2, 2, 2], 2, 1).unwrap(), 8);
        // r above the upper bound cannot reach full rank
        assert!(differential_image_rank(f(), &[4, 4, 4], 4, 1).unwrap() < 64);
        assert_eq!(differential_image_rank(f(), &[4, 4, 4], 3, 1).unwrap(), 64);
    }

    #[test]
    fn estimate_small_cubes() {
        let rep = generic_subrank_estimate(f(), &[2, 2, 2], Mode::Strong, 0, 5).unwrap();
        assert_eq!((rep.upper_bound, rep.certified_lower), (2, 2));
        let rep = generic_subrank_estimate(f(), &[12, 12, 12], Mode::Strong, 0, 5).unwrap();
        assert_eq!((rep.upper_bound, rep.certified_lower), (5, 5));
        assert_eq!(rep.trials.len(), 1);
    }

    #[test]
    fn report_json_layout() {
        let rep = generic_subrank_estimate(f(), &[4, 4, 4], Mode::Strong, 3, 5).unwrap();
        let s = serde_json::to_string(&rep).unwrap();
        assert!(s.starts_with(r#"{"dims":[4,4,4],"mode":"strong","upper":3,"lower":3,"modulus":2147483647,"trials":[{"r":3,"seed":3,"retries":1,"outcome":"certified"}]}"#), "{s}");
        let back: GenericSubrankReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rep);
    }
}
