//! Rank of the differential at a random point of X_r, against the strong criterion.

use subrank::bounds::upper_bound_generic;
use subrank::certify::{certify_lower, differential_image_rank, Mode};
use subrank::FieldSpec;

fn main() -> subrank::Result<()> {
    let f = FieldSpec::default();
    for n in [4, 7, 10, 13] {
        let ub = upper_bound_generic(&[n, n, n])?;
        for r in [ub, ub + 1] {
            let rank = differential_image_rank(f, &[n, n, n], r, 0)?;
            let strong = certify_lower(f, &[n, n, n], r, Mode::Strong, 0, 1)?;
            println!(
                "n = {n:2}, r = {r:2}: rank {rank:5} of {:5}, strong criterion {:?}",
                n * n * n,
                strong.outcome
            );
        }
    }
    Ok(())
}
