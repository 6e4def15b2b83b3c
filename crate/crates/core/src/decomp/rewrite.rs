//! Membership-preserving rewrites of a spec, carried out on witnesses.

use std::fmt;

use super::{DecompSpec, DecompWitness, DerivationStep};
use crate::error::{Error, Result};
use crate::linalg::derive_seed;
use crate::subspace::TensorSubspace;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rewrite {
    /// New leg `j` is old leg `perm[j]`.
    Permute(Vec<usize>),
    /// Appends a column `[1; 0]`.
    AppendTrivial,
    /// Merges two legs with `n = 1` into one at the smaller index, adding their `a`.
    RefineMerge(usize, usize),
    /// Splits a leg with `n = 1` into `[1 1; first a-first]`, the second
    /// column inserted right after it.
    RefineSplit { leg: usize, first: usize },
}

impl fmt::Display for Rewrite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rewrite::Permute(p) => write!(f, "permute {p:?}"),
            Rewrite::AppendTrivial => f.write_str("append [1;0]"),
            Rewrite::RefineMerge(i, j) => write!(f, "merge legs {i},{j}"),
            Rewrite::RefineSplit { leg, first } => write!(f, "split leg {leg} at {first}"),
        }
    }
}

/// Applies `rule` to a witness and re-verifies the result.
///
/// The output carries the input's derivation plus one step. Only a merge
/// whose two subspaces overlap needs randomness: it then samples a generic
/// subspace of the merged dimension, attempt `j` using `derive_seed(seed + j, 0)`,
/// for at most `retries` attempts.
pub fn rewrite_spec(w: &DecompWitness, rule: &Rewrite, seed: u64, retries: usize) -> Result<DecompWitness> {
    let spec = w.spec();
    let n = spec.dims();
    let a = spec.a_values();
    let d = spec.order();
    let mut derivation = w.derivation().to_vec();
    match rule {
        Rewrite::Permute(perm) => {
            let mut seen = vec![false; d];
            if perm.len() != d || perm.iter().any(|&p| p >= d || std::mem::replace(&mut seen[p], true)) {
                return Err(Error::RuleNotApplicable(format!("{perm:?} is not a permutation of {d} legs")));
            }
            let new_spec = DecompSpec::new(
                &perm.iter().map(|&p| n[p]).collect::<Vec<_>>(),
                &perm.iter().map(|&p| a[p]).collect::<Vec<_>>(),
            )?;
            let mut subs = Vec::with_capacity(d);
            for (j, &s) in perm.iter().enumerate() {
                // old leg q sits at axis q (or q - 1 past s) of X_s's ambient
                let axes: Vec<usize> = (0..d)
                    .filter(|&l| l != j)
                    .map(|l| {
                        let q = perm[l];
                        if q < s {
                            q
                        } else {
                            q - 1
                        }
                    })
                    .collect();
                subs.push(w.subspace(s).permute_axes(&axes)?);
            }
            derivation.push(DerivationStep::new(rule.to_string(), &new_spec));
            DecompWitness::verified(new_spec, subs, derivation)
        }
        Rewrite::AppendTrivial => {
            let new_spec = DecompSpec::new(
                &n.iter().copied().chain([1]).collect::<Vec<_>>(),
                &a.iter().copied().chain([0]).collect::<Vec<_>>(),
            )?;
            let mut subs = Vec::with_capacity(d + 1);
            for (i, x) in w.subspaces().iter().enumerate() {
                subs.push(x.reshaped(&new_spec.leg_ambient(i))?);
            }
            subs.push(TensorSubspace::zero(w.field(), &n));
            derivation.push(DerivationStep::new(rule.to_string(), &new_spec));
            DecompWitness::verified(new_spec, subs, derivation)
        }
        Rewrite::RefineMerge(i, j) => {
            let (lo, hi) = ((*i).min(*j), (*i).max(*j));
            if lo == hi || hi >= d || n[lo] != 1 || n[hi] != 1 {
                return Err(Error::RuleNotApplicable(format!(
                    "merge needs two distinct legs of size 1, got {lo},{hi} in {spec}"
                )));
            }
            let mut new_n = n.clone();
            let mut new_a = a.clone();
            new_a[lo] += a[hi];
            new_n.remove(hi);
            new_a.remove(hi);
            let new_spec = DecompSpec::new(&new_n, &new_a)?;
            let mut subs = Vec::with_capacity(d - 1);
            for l in (0..d).filter(|&l| l != hi && l != lo) {
                let nl = if l < hi { l } else { l - 1 };
                subs.push(w.subspace(l).reshaped(&new_spec.leg_ambient(nl))?);
            }
            let shape = new_spec.leg_ambient(lo);
            let x_lo = w.subspace(lo).reshaped(&shape)?;
            let x_hi = w.subspace(hi).reshaped(&shape)?;
            let merged_at = |subs: &[TensorSubspace], m: TensorSubspace| {
                let mut all = subs.to_vec();
                all.insert(lo, m);
                all
            };
            derivation.push(DerivationStep::new(rule.to_string(), &new_spec));
            match TensorSubspace::direct_union(&[x_lo, x_hi]) {
                Ok(m) => DecompWitness::verified(new_spec, merged_at(&subs, m), derivation),
                Err(Error::Dependent(_)) => {
                    for attempt in 0..retries as u64 {
                        let s = seed.wrapping_add(attempt);
                        let m = TensorSubspace::random(w.field(), &shape, new_a[lo], derive_seed(s, 0))?;
                        let mut out = DecompWitness::new(new_spec.clone(), merged_at(&subs, m))?;
                        if out.verify()? {
                            let last = derivation.len() - 1;
                            derivation[last] =
                                DerivationStep::seeded(rule.to_string(), &new_spec, seed, attempt as usize + 1);
                            return Ok(out.with_derivation(derivation));
                        }
                    }
                    Err(Error::Inconclusive {
                        step: rule.to_string(),
                        attempts: retries,
                    })
                }
                Err(e) => Err(e),
            }
        }
        Rewrite::RefineSplit { leg, first } => {
            let i = *leg;
            if i >= d || n[i] != 1 || *first > a[i] {
                return Err(Error::RuleNotApplicable(format!(
                    "split needs a leg of size 1 with a >= {first}, got leg {i} of {spec}"
                )));
            }
            let mut new_n = n.clone();
            let mut new_a = a.clone();
            new_a[i] = *first;
            new_n.insert(i + 1, 1);
            new_a.insert(i + 1, a[i] - first);
            let new_spec = DecompSpec::new(&new_n, &new_a)?;
            let mut subs = Vec::with_capacity(d + 1);
            for (l, x) in w.subspaces().iter().enumerate() {
                if l == i {
                    let shape = new_spec.leg_ambient(i);
                    let (x1, x2) = x.split_basis(*first)?;
                    subs.push(x1.reshaped(&shape)?);
                    subs.push(x2.reshaped(&shape)?);
                } else {
                    let nl = if l < i { l } else { l + 1 };
                    subs.push(x.reshaped(&new_spec.leg_ambient(nl))?);
                }
            }
            derivation.push(DerivationStep::new(rule.to_string(), &new_spec));
            DecompWitness::verified(new_spec, subs, derivation)
        }
    }
}
