//! Witness for [n; n^(n-2)] repeated n times, and the certificate it gives.
//!
//! cargo run --release --example order_n_witness -- 4

use subrank::bounds::upper_bound_generic;
use subrank::decomp::{certify_with_witness, witness_order_n};
use subrank::FieldSpec;

fn main() -> subrank::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(4, |s| s.parse().expect("n"));
    let w = witness_order_n(FieldSpec::default(), n, 0, 5)?;
    println!("{} verified = {} in {} steps", w.spec(), w.is_verified(), w.derivation().len());
    let side = n + n.pow(n as u32 - 2);
    let dims = vec![side; n];
    let c = certify_with_witness(&dims, &w)?;
    println!("Q({side}^{n}) >= {} (upper bound {})", c.r, upper_bound_generic(&dims)?);
    Ok(())
}
