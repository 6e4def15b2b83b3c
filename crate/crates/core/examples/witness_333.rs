//! The [3 3 3; 3 3 3] decomposition, derived step by step and sampled at random.

use subrank::decomp::{derive_333, witness_333, witness_333_binary, Method};
use subrank::FieldSpec;

fn main() -> subrank::Result<()> {
    let f = FieldSpec::default();
    let chain = derive_333(f, 0, 5)?;
    for w in &chain.witnesses {
        println!("{:<18} verified = {}", w.spec().to_string(), w.is_verified());
    }
    for step in chain.result().derivation() {
        println!("  {:<22} -> {}", step.op, step.spec);
    }
    let random = witness_333(f, Method::Random, 0)?;
    println!("random method: verified = {}", random.is_verified());
    let binary = witness_333_binary(f, 0, 10_000)?;
    println!("0/1 entries: found after {} tries", binary.derivation()[0].attempts);
    for (i, x) in binary.subspaces().iter().enumerate() {
        println!("  leg {i}: {:?}", x.vectors());
    }
    Ok(())
}
