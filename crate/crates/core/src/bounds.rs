//! Closed-form bounds on the generic subrank, in exact integer arithmetic.

use crate::error::{Error, Result};

/// Largest `t` with `t^exp <= value`, by binary search.
pub fn integer_root(value: u64, exp: u32) -> u64 {
    assert!(exp >= 1, "root of exponent zero");
    if exp == 1 || value < 2 {
        return value;
    }
    let fits = |t: u64| t.checked_pow(exp).is_some_and(|p| p <= value);
    let (mut lo, mut hi) = (1u64, value);
    // invariant: fits(lo), !fits(hi + 1) or hi == value
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least two legs, got {dims:?}"
        )));
    }
    if dims.contains(&0) {
        return Err(Error::InvalidArgument(format!("zero dimension in {dims:?}")));
    }
    Ok(())
}

/// `floor((sum n_i - (k - 1))^(1/(k - 1)))`, the dimension-count bound itself.
pub fn generic_root_bound(dims: &[usize]) -> Result<usize> {
    check_dims(dims)?;
    let k = dims.len();
    let s: usize = dims.iter().sum::<usize>() - (k - 1);
    Ok(integer_root(s as u64, (k - 1) as u32) as usize)
}

/// Upper bound on the generic subrank of `K^{n_1,...,n_k}`.
///
/// The dimension-count bound, capped at `min(n_i)` since no tensor has
/// subrank above its smallest side. The cap only binds for `k = 2` or for
/// lopsided shapes; for cubes of order 3 it gives `floor(sqrt(3n - 2))`.
pub fn upper_bound_generic(dims: &[usize]) -> Result<usize> {
    let root = generic_root_bound(dims)?;
    Ok(root.min(*dims.iter().min().unwrap()))
}

/// `prod n_i - r (r^(k-1) - sum n_i + (k - 1))`, the bound on `dim C_r`.
///
/// The value may exceed `prod n_i`, in which case it carries no information.
pub fn dim_cr_upper(dims: &[usize], r: usize) -> Result<i128> {
    check_dims(dims)?;
    let min = *dims.iter().min().unwrap();
    if r > min {
        return Err(Error::InvalidArgument(format!("r = {r} exceeds min(dims) = {min}")));
    }
    let k = dims.len() as i128;
    let prod: i128 = dims.iter().map(|&n| n as i128).product();
    let sum: i128 = dims.iter().map(|&n| n as i128).sum();
    let r = r as i128;
    Ok(prod - r * (r.pow(dims.len() as u32 - 1) - sum + (k - 1)))
}

/// `3 * floor(sqrt(n/3 + 1/4) - 1/2)`, computed as `3d` for the largest `d`
/// with `3d^2 + 3d <= n`.
pub fn lower_bound_formula(n: usize) -> usize {
    let mut d = 0usize;
    while 3 * (d + 1) * (d + 1) + 3 * (d + 1) <= n {
        d += 1;
    }
    3 * d
}

/// Largest `d` with `n - 3d >= 3d^2`, i.e. the blow-up factor usable at side `n`.
pub fn blow_up_factor(n: usize) -> usize {
    lower_bound_formula(n) / 3
}
