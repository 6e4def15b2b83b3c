//! Explicit and randomized witness constructions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::rewrite::{rewrite_spec, Rewrite};
use super::{DecompSpec, DecompWitness, DerivationStep};
use crate::certify::{Certification, Outcome, Shortcut};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::linalg::derive_seed;
use crate::subspace::TensorSubspace;
use crate::tensor::{for_each_index, numel, strides};

/// How to obtain the `[3 3 3; 3 3 3]` witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Chain of explicit bases and direct sums.
    Derived,
    /// Three random 3-dimensional subspaces of `Mat_{3,3}`.
    Random,
}

/// Every witness of a derivation chain, in construction order.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub witnesses: Vec<DecompWitness>,
}

impl Derivation {
    pub fn result(&self) -> &DecompWitness {
        self.witnesses.last().expect("derivation without steps")
    }

    pub fn into_result(mut self) -> DecompWitness {
        self.witnesses.pop().expect("derivation without steps")
    }
}

/// A generic subspace of the given dimension, skipping randomness at the extremes.
fn generic(field: FieldSpec, shape: &[usize], dim: usize, seed: u64) -> Result<TensorSubspace> {
    if dim == 0 {
        Ok(TensorSubspace::zero(field, shape))
    } else if dim == numel(shape) {
        Ok(TensorSubspace::full(field, shape))
    } else {
        TensorSubspace::random(field, shape, dim, seed)
    }
}

/// Witness for a spec in which every `a_i` is `0` or the whole complement.
pub fn trivial_witness(field: FieldSpec, spec: &DecompSpec) -> Result<DecompWitness> {
    let mut subs = Vec::with_capacity(spec.order());
    for (i, leg) in spec.legs().iter().enumerate() {
        let shape = spec.leg_ambient(i);
        subs.push(match leg.a {
            0 => TensorSubspace::zero(field, &shape),
            a if a == numel(&shape) => TensorSubspace::full(field, &shape),
            a => {
                return Err(Error::InvalidArgument(format!(
                    "leg {i} of {spec}: a = {a} is neither 0 nor full"
                )))
            }
        });
    }
    DecompWitness::verified(spec.clone(), subs, vec![DerivationStep::new("trivial", spec)])
}

/// Tries `retries` generic realizations of `spec`, attempt `j` drawing leg `i`
/// from `derive_seed(seed + j, i)`.
pub fn random_witness(field: FieldSpec, spec: &DecompSpec, seed: u64, retries: usize) -> Result<DecompWitness> {
    for attempt in 0..retries {
        let s = seed.wrapping_add(attempt as u64);
        let subs = (0..spec.order())
            .map(|i| generic(field, &spec.leg_ambient(i), spec.legs()[i].a, derive_seed(s, i as u64)))
            .collect::<Result<Vec<_>>>()?;
        let mut w = DecompWitness::new(spec.clone(), subs)?;
        if w.verify()? {
            w.push_step(DerivationStep::seeded("random", spec, seed, attempt + 1));
            return Ok(w);
        }
    }
    Err(Error::Inconclusive {
        step: format!("random {spec}"),
        attempts: retries,
    })
}

/// `[2 2 2; 0 3 1]`: symmetric `2 x 2` matrices on leg 1 and the identity
/// matrix on leg 2.
///
/// Built in the labeling `[2 2 2; 3 0 1]` and then relabeled by swapping the
/// first two legs.
pub fn witness_2220_31(field: FieldSpec) -> Result<DecompWitness> {
    let spec = DecompSpec::new(&[2, 2, 2], &[3, 0, 1])?;
    let one = 1u64;
    // 2x2 matrices, row-major: E11, E12 + E21, E22
    let symmetric = TensorSubspace::from_basis(
        field,
        &[2, 2],
        vec![vec![one, 0, 0, 0], vec![0, one, one, 0], vec![0, 0, 0, one]],
    )?;
    let identity = TensorSubspace::from_basis(field, &[2, 2], vec![vec![one, 0, 0, one]])?;
    let w = DecompWitness::verified(
        spec.clone(),
        vec![symmetric, TensorSubspace::zero(field, &[2, 2]), identity],
        vec![DerivationStep::new("explicit", &spec)],
    )?;
    rewrite_spec(&w, &Rewrite::Permute(vec![1, 0, 2]), 0, 1)
}

/// `[n n 1; k 0 n^2-kn]`: the first `k` basis vectors on leg 0 and every
/// matrix supported on the last `n - k` columns on leg 2.
pub fn coordinate_witness(field: FieldSpec, n: usize, k: usize) -> Result<DecompWitness> {
    if k > n || n == 0 {
        return Err(Error::InvalidArgument(format!("coordinate witness needs k <= n, got n = {n}, k = {k}")));
    }
    let spec = DecompSpec::new(&[n, n, 1], &[k, 0, n * n - k * n])?;
    let x0 = TensorSubspace::coordinates(field, &[n, 1], (0..k).collect())?;
    let x1 = TensorSubspace::zero(field, &[n, 1]);
    let cols: Vec<usize> = (0..n).flat_map(|i| (k..n).map(move |j| i * n + j)).collect();
    let x2 = TensorSubspace::coordinates(field, &[n, n], cols)?;
    DecompWitness::verified(spec.clone(), vec![x0, x1, x2], vec![DerivationStep::new("coordinate", &spec)])
}

/// Generic subspaces for every leg of `spec` except `shared`, which gets `w`.
/// Returns them if the factor's lifts span.
fn sample_factor(
    field: FieldSpec,
    spec: &DecompSpec,
    shared: usize,
    w: &TensorSubspace,
    seed: u64,
    stream: u64,
) -> Result<Option<Vec<TensorSubspace>>> {
    let subs = (0..spec.order())
        .map(|j| {
            if j == shared {
                Ok(w.clone())
            } else {
                generic(field, &spec.leg_ambient(j), spec.legs()[j].a, derive_seed(seed, stream + j as u64))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let factor = DecompWitness::new(spec.clone(), subs)?;
    Ok(factor.spans()?.then(|| factor.subspaces().to_vec()))
}

/// Direct sum of two specs along `leg`.
///
/// The specs must agree in `n_j` for `j != leg` and in `a_leg`. Each attempt
/// samples one shared subspace for `leg` and generic subspaces for the other
/// legs of each factor, checks that both factors span, embeds the factors
/// side by side along `leg` and verifies the sum. Attempt `j` uses seed
/// `seed + j`; after `retries` failures the result is [`Error::Inconclusive`].
pub fn direct_sum_combine(
    field: FieldSpec,
    a: &DecompSpec,
    b: &DecompSpec,
    leg: usize,
    seed: u64,
    retries: usize,
) -> Result<DecompWitness> {
    let d = a.order();
    if b.order() != d || leg >= d {
        return Err(Error::RuleNotApplicable(format!("cannot combine {a} and {b} along leg {leg}")));
    }
    for j in 0..d {
        let (la, lb) = (a.legs()[j], b.legs()[j]);
        if (j != leg && la.n != lb.n) || (j == leg && la.a != lb.a) {
            return Err(Error::RuleNotApplicable(format!(
                "{a} and {b} disagree at leg {j} for a sum along leg {leg}"
            )));
        }
    }
    let mut n = a.dims();
    n[leg] += b.dims()[leg];
    let sum_a: Vec<usize> = (0..d)
        .map(|j| if j == leg { a.legs()[j].a } else { a.legs()[j].a + b.legs()[j].a })
        .collect();
    let out = DecompSpec::new(&n, &sum_a)?;
    let offset = a.dims()[leg];
    let op = format!("direct sum on leg {leg}");
    for attempt in 0..retries {
        let s = seed.wrapping_add(attempt as u64);
        let shared = generic(field, &out.leg_ambient(leg), out.legs()[leg].a, derive_seed(s, 0))?;
        let Some(xa) = sample_factor(field, a, leg, &shared, s, 1)? else {
            continue;
        };
        let Some(xb) = sample_factor(field, b, leg, &shared, s, 1 + d as u64)? else {
            continue;
        };
        let mut subs = Vec::with_capacity(d);
        for j in 0..d {
            if j == leg {
                subs.push(shared.clone());
                continue;
            }
            let axis = if leg < j { leg } else { leg - 1 };
            let left = xa[j].embed_along(axis, n[leg], 0)?;
            let right = xb[j].embed_along(axis, n[leg], offset)?;
            subs.push(TensorSubspace::direct_union(&[left, right])?);
        }
        let mut w = DecompWitness::new(out.clone(), subs)?;
        if w.verify()? {
            w.push_step(DerivationStep::seeded(op, &out, seed, attempt + 1));
            return Ok(w);
        }
    }
    Err(Error::Inconclusive {
        step: format!("{op}: {a} + {b}"),
        attempts: retries,
    })
}

/// Appends the derivation steps of `w` to `log`.
fn absorb(log: &mut Vec<DerivationStep>, w: &DecompWitness) {
    log.extend(w.derivation().iter().cloned());
}

/// The chain ending in `[3 3 3; 3 3 3]`, with every intermediate witness.
pub fn derive_333(field: FieldSpec, seed: u64, retries: usize) -> Result<Derivation> {
    let spec = |n: &[usize], a: &[usize]| DecompSpec::new(n, a);
    let mut out = Vec::new();
    let mut step = 0u64;
    let mut combine = |x: &DecompWitness, y: &DecompWitness, leg: usize| {
        step += 1;
        direct_sum_combine(field, x.spec(), y.spec(), leg, derive_seed(seed, step), retries)
    };

    let b = witness_2220_31(field)?;
    let t_122 = trivial_witness(field, &spec(&[1, 2, 2], &[0, 0, 2])?)?;
    let t_a = trivial_witness(field, &spec(&[3, 1, 1], &[1, 0, 0])?)?;
    let t_b = trivial_witness(field, &spec(&[3, 1, 1], &[0, 3, 0])?)?;
    let t_c = trivial_witness(field, &spec(&[3, 1, 1], &[0, 0, 3])?)?;

    // [3 2 2; 0 3 3]
    let s1 = combine(&b, &t_122, 0)?;
    // [3 1 2; 1 3 0]
    let s2 = combine(&t_a, &t_b, 2)?;
    // [3 3 2; 1 3 3]
    let s3 = combine(&s1, &s2, 1)?;
    // [3 2 1; 2 0 0], then [3 3 1; 2 0 3]
    let s4 = combine(&t_a, &t_a, 1)?;
    let s5 = combine(&s4, &t_c, 1)?;
    // [3 3 3; 3 3 3]
    let s6 = combine(&s5, &s3, 2)?;

    let mut log = Vec::new();
    for w in [&b, &t_122, &t_a, &t_b, &t_c, &s1, &s2, &s3, &s4, &s5] {
        absorb(&mut log, w);
    }
    absorb(&mut log, &s6);
    let last = s6.clone().with_derivation(log);
    out.extend([b, t_122, t_a, t_b, t_c, s1, s2, s3, s4, s5, last]);
    Ok(Derivation { witnesses: out })
}

/// A verified witness for `[3 3 3; 3 3 3]`.
pub fn witness_333(field: FieldSpec, method: Method, seed: u64) -> Result<DecompWitness> {
    const RETRIES: usize = 5;
    match method {
        Method::Derived => Ok(derive_333(field, seed, RETRIES)?.into_result()),
        Method::Random => random_witness(field, &DecompSpec::repeated(3, 3, 3)?, seed, RETRIES),
    }
}

/// Searches for a `[3 3 3; 3 3 3]` witness whose basis matrices have entries
/// in `{0, 1}`, trying at most `max_attempts` random candidates.
pub fn witness_333_binary(field: FieldSpec, seed: u64, max_attempts: usize) -> Result<DecompWitness> {
    let spec = DecompSpec::repeated(3, 3, 3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempts: for attempt in 0..max_attempts {
        let mut subs = Vec::with_capacity(3);
        for _ in 0..3 {
            let basis: Vec<Vec<u64>> = (0..3).map(|_| (0..9).map(|_| rng.gen_range(0..2u64)).collect()).collect();
            match TensorSubspace::from_basis(field, &[3, 3], basis) {
                Ok(x) => subs.push(x),
                Err(Error::Dependent(_)) => continue 'attempts,
                Err(e) => return Err(e),
            }
        }
        let mut w = DecompWitness::new(spec.clone(), subs)?;
        if w.verify()? {
            w.push_step(DerivationStep::seeded("binary search", &spec, seed, attempt + 1));
            return Ok(w);
        }
    }
    Err(Error::Inconclusive {
        step: "binary [3 3 3; 3 3 3]".into(),
        attempts: max_attempts,
    })
}

/// `(a_i, b_i)` for the `n` factors `[n n 1; a_i b_i n^2-(a_i+b_i)n]` that sum
/// to `[n n n; n n n^3-2n^2]`. Every `a_i + b_i` is at most 3 and both
/// columns sum to `n`.
pub fn order_n_schedule(n: usize) -> Vec<(usize, usize)> {
    let mut out = vec![(0, 0); n];
    if n < 3 {
        return out;
    }
    let m = n / 2;
    if n % 2 == 0 {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = if i < m { (2, 0) } else { (0, 2) };
        }
    } else {
        out[0] = (3, 0);
        for slot in &mut out[1..m] {
            *slot = (2, 0);
        }
        out[m] = (0, 1);
        for slot in &mut out[m + 1..] {
            *slot = (0, 2);
        }
    }
    out
}

/// A verified witness for `[n; n^{n-2}]^{(.)n}`, giving `Q(n^{(x)n}) >= n`
/// style certificates for order-`n` tensors.
///
/// `n = 3` returns the derived `[3 3 3; 3 3 3]` witness. For `n >= 4` the
/// coordinate witnesses `[n n 1 1; a_i b_i n ...]` are summed along the third
/// leg, the last leg is refined into `n - 3` legs, and then each singleton
/// leg in turn is grown to size `n` by an `n`-fold direct sum. The final
/// verification runs on an `n^n`-dimensional space, so `n >= 5` is costly.
pub fn witness_order_n(field: FieldSpec, n: usize, seed: u64, retries: usize) -> Result<DecompWitness> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("order-n witness needs n >= 3, got {n}")));
    }
    if n == 3 {
        return Ok(derive_333(field, seed, retries)?.into_result());
    }
    let mut log = Vec::new();
    let mut step = 0u64;
    let mut next_seed = || {
        step += 1;
        derive_seed(seed, step)
    };

    // n factors [n n 1 1; a b n n^2-(a+b+1)n]
    let mut factors = Vec::with_capacity(n);
    for (a, b) in order_n_schedule(n) {
        let base = if b == 0 {
            coordinate_witness(field, n, a)?
        } else {
            rewrite_spec(&coordinate_witness(field, n, b)?, &Rewrite::Permute(vec![1, 0, 2]), 0, 1)?
        };
        let f = rewrite_spec(&base, &Rewrite::RefineSplit { leg: 2, first: n }, 0, 1)?;
        absorb(&mut log, &f);
        factors.push(f.spec().clone());
    }
    let mut acc = factors[0].clone();
    let mut w = None;
    for f in &factors[1..] {
        let next = direct_sum_combine(field, &acc, f, 2, next_seed(), retries)?;
        absorb(&mut log, &next);
        acc = next.spec().clone();
        w = Some(next);
    }
    // [n n n 1; n n n n^3-3n^2] refined into [n n n 1 ... 1; n n n n^2 ... n^2]
    let mut w = w.expect("n >= 4 factors");
    for t in 0..n - 4 {
        w = rewrite_spec(&w.with_derivation(Vec::new()), &Rewrite::RefineSplit { leg: 3 + t, first: n * n }, 0, 1)?;
        absorb(&mut log, &w);
    }
    // grow leg d from 1 to n
    for d in 3..n {
        let p = w.spec().clone();
        let mut acc = p.clone();
        for _ in 1..n {
            w = direct_sum_combine(field, &acc, &p, d, next_seed(), retries)?;
            absorb(&mut log, &w);
            acc = w.spec().clone();
        }
    }
    Ok(w.with_derivation(log))
}

/// Blows up a verified witness by `d`: `[n; a] -> [n d; a d^{k-1}]`.
///
/// Each `X_i` becomes `X_i (x) (K^d)^{(x)(k-1)}`, with index `(x, s)` of a
/// blown-up side placed at `x d + s`.
pub fn blow_up_witness(w: &DecompWitness, d: usize) -> Result<DecompWitness> {
    if !w.is_verified() {
        return Err(Error::Unverified(format!("blow-up of an unverified witness for {}", w.spec())));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("blow-up factor must be positive".into()));
    }
    let spec = w.spec();
    let k = spec.order();
    let scale = d.pow(k as u32 - 1);
    let new_spec = DecompSpec::new(
        &spec.dims().iter().map(|&n| n * d).collect::<Vec<_>>(),
        &spec.a_values().iter().map(|&a| a * scale).collect::<Vec<_>>(),
    )?;
    let mut subs = Vec::with_capacity(k);
    for (i, x) in w.subspaces().iter().enumerate() {
        let old_shape = x.shape().to_vec();
        let new_shape = new_spec.leg_ambient(i);
        let st = strides(&new_shape);
        let mut base = vec![0usize; x.ambient_dim()];
        for_each_index(&old_shape, |flat, idx| {
            base[flat] = idx.iter().zip(&st).map(|(&a, &s)| a * d * s).sum();
        });
        let mut shift = Vec::with_capacity(scale);
        for_each_index(&vec![d; k - 1], |_, idx| {
            shift.push(idx.iter().zip(&st).map(|(&s, &t)| s * t).sum::<usize>());
        });
        let len = numel(&new_shape);
        let blown = match x.coordinate_positions() {
            Some(pos) => {
                let (base, shift) = (&base, &shift);
                let p = pos.iter().flat_map(|&q| shift.iter().map(move |&s| base[q] + s)).collect();
                TensorSubspace::coordinates(x.field(), &new_shape, p)?
            }
            None => {
                let mut vs = Vec::with_capacity(x.dim() * scale);
                for y in x.vectors() {
                    for &s in &shift {
                        let mut v = vec![0u64; len];
                        for (q, &e) in y.iter().enumerate() {
                            if e != 0 {
                                v[base[q] + s] = e;
                            }
                        }
                        vs.push(v);
                    }
                }
                TensorSubspace::from_basis(x.field(), &new_shape, vs)?
            }
        };
        subs.push(blown);
    }
    let mut log = w.derivation().to_vec();
    log.push(DerivationStep::new(format!("blow up by {d}"), &new_spec));
    DecompWitness::verified(new_spec, subs, log)
}

/// Certifies `Q(dims) >= r` from a verified witness for a spec with every
/// `n_i = r` and `a_i <= dims_i - r`.
///
/// Generic subspaces of dimension `min(dims_i - r, r^{k-1})` contain generic
/// subspaces of dimension `a_i`, so spanning for the witness's spec implies
/// spanning for the certification problem.
pub fn certify_with_witness(dims: &[usize], w: &DecompWitness) -> Result<Certification> {
    let spec = w.spec();
    let r = spec.dims()[0];
    if spec.dims().iter().any(|&n| n != r) || spec.order() != dims.len() {
        return Err(Error::InvalidArgument(format!(
            "witness {spec} does not match an order-{} cube certificate",
            dims.len()
        )));
    }
    for (i, (&n, leg)) in dims.iter().zip(spec.legs()).enumerate() {
        if n < r || leg.a > n - r {
            return Err(Error::InvalidArgument(format!(
                "leg {i}: witness needs a = {} but only {} is available",
                leg.a,
                n.saturating_sub(r)
            )));
        }
    }
    if !w.spans()? {
        return Err(Error::Unverified(format!("witness for {spec} does not span")));
    }
    Ok(Certification {
        r,
        outcome: Outcome::Certified,
        seed: 0,
        attempts: 0,
        certified_seed: None,
        shortcut: Some(Shortcut::Witness),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> FieldSpec {
        FieldSpec::default()
    }

    #[test]
    fn base_witness_shape() {
        let w = witness_2220_31(f()).unwrap();
        assert_eq!(w.spec().to_string(), "[2 2 2; 0 3 1]");
        assert!(w.is_verified());
        let x = w.subspace(1);
        assert!(x.contains(&[1, 0, 0, 0]).unwrap());
        assert!(!x.contains(&[0, 1, 0, 0]).unwrap());
    }

    #[test]
    fn schedule_sums() {
        for n in 3..12 {
            let s = order_n_schedule(n);
            assert_eq!(s.iter().map(|p| p.0).sum::<usize>(), n);
            assert_eq!(s.iter().map(|p| p.1).sum::<usize>(), n);
            assert!(s.iter().all(|&(a, b)| a + b <= 3 && a * b == 0));
        }
    }

    #[test]
    fn coordinate_witnesses_verify() {
        for n in 1..6 {
            for k in 0..=n {
                assert!(coordinate_witness(f(), n, k).unwrap().is_verified());
            }
        }
    }

    #[test]
    fn combine_rejects_mismatch() {
        let a: DecompSpec = "3,1,1;1,0,0".parse().unwrap();
        let b: DecompSpec = "3,1,1;0,3,0".parse().unwrap();
        assert!(direct_sum_combine(f(), &a, &b, 0, 0, 3).is_err());
        let w = direct_sum_combine(f(), &a, &b, 2, 0, 3).unwrap();
        assert_eq!(w.spec().to_string(), "[3 1 2; 1 3 0]");
    }

    #[test]
    fn derived_333() {
        let d = derive_333(f(), 0, 5).unwrap();
        let w = d.result();
        assert_eq!(w.spec().to_string(), "[3 3 3; 3 3 3]");
        assert!(w.is_verified());
        assert!(d.witnesses.iter().all(|w| w.is_verified() && w.spec().is_balanced()));
        assert!(w.derivation().len() >= 6);
    }

    #[test]
    fn order_4() {
        let w = witness_order_n(f(), 4, 0, 5).unwrap();
        assert_eq!(w.spec().to_string(), "[4 4 4 4; 16 16 16 16]");
        assert!(w.is_verified());
        let c = certify_with_witness(&[20, 20, 20, 20], &w).unwrap();
        assert!(c.is_certified());
        assert_eq!(c.r, 4);
        assert!(certify_with_witness(&[19, 20, 20, 20], &w).is_err());
    }

    #[test]
    fn blow_up_333() {
        let w = witness_333(f(), Method::Random, 0).unwrap();
        let b = blow_up_witness(&w, 2).unwrap();
        assert_eq!(b.spec().to_string(), "[6 6 6; 12 12 12]");
        assert!(b.is_verified());
        let c = blow_up_witness(&coordinate_witness(f(), 3, 1).unwrap(), 2).unwrap();
        assert!(c.is_verified());
    }
}
