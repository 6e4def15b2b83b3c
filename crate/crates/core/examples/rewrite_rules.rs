//! Spec rewrites carried out on a witness, each step re-verified.

use subrank::decomp::{direct_sum_combine, rewrite_spec, witness_2220_31, Rewrite};
use subrank::FieldSpec;

fn main() -> subrank::Result<()> {
    let f = FieldSpec::default();
    let w = witness_2220_31(f)?;
    println!("start: {}", w.spec());
    let w = rewrite_spec(&w, &Rewrite::AppendTrivial, 0, 5)?;
    println!("append: {}", w.spec());
    let w = rewrite_spec(&w, &Rewrite::Permute(vec![3, 0, 1, 2]), 0, 5)?;
    println!("permute: {}", w.spec());
    let a = "3,1,1;1,0,0".parse()?;
    let b = "3,1,1;0,3,0".parse()?;
    let c = direct_sum_combine(f, &a, &b, 2, 0, 5)?;
    println!("{a} + {b} on leg 2 = {}", c.spec());
    let s = rewrite_spec(&c, &Rewrite::AppendTrivial, 0, 5)?;
    let s = rewrite_spec(&s, &Rewrite::RefineMerge(3, 3), 0, 5);
    println!("merging a leg with itself: {}", s.map(|_| "ok".to_string()).unwrap_or_else(|e| e.to_string()));
    Ok(())
}
