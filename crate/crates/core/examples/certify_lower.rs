//! Certify a lower bound on the generic subrank by random sampling.
//!
//! cargo run --example certify_lower -- 7 4

use subrank::certify::{certify_lower, generic_subrank_estimate, Mode};
use subrank::FieldSpec;

fn main() -> subrank::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(7, |s| s.parse().expect("n"));
    let r: usize = args.next().map_or(4, |s| s.parse().expect("r"));
    let field = FieldSpec::default();
    for mode in [Mode::Weak, Mode::Strong] {
        let c = certify_lower(field, &[n, n, n], r, mode, 0, 5)?;
        println!("Q({n},{n},{n}) >= {r} [{mode}]: {:?} after {} attempts", c.outcome, c.attempts);
    }
    let report = generic_subrank_estimate(field, &[n, n, n], Mode::Strong, 0, 5)?;
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}
