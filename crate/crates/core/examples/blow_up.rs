//! Blow-up of the [3 3 3; 3 3 3] witness into lower bounds 3d for large n.

use subrank::bounds::{lower_bound_formula, upper_bound_generic};
use subrank::decomp::{blow_up_witness, certify_with_witness, witness_333, Method};
use subrank::FieldSpec;

fn main() -> subrank::Result<()> {
    let base = witness_333(FieldSpec::default(), Method::Derived, 0)?;
    for d in 1..=3 {
        let w = blow_up_witness(&base, d)?;
        let n = 3 * d + 3 * d * d;
        let c = certify_with_witness(&[n, n, n], &w)?;
        println!(
            "d = {d}: {} verified, Q({n},{n},{n}) >= {} (formula {}, upper {})",
            w.spec(),
            c.r,
            lower_bound_formula(n),
            upper_bound_generic(&[n, n, n])?
        );
    }
    Ok(())
}
