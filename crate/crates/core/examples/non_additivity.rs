//! Two tensors whose direct sum has larger subrank than the generic bounds allow the parts.

use subrank::oracle::non_additivity_demo;
use subrank::FieldSpec;

fn main() -> subrank::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(13, |s| s.parse().expect("n"));
    let r = non_additivity_demo(FieldSpec::default(), n, 0)?;
    println!("Q(T + S) >= {} certified: {}", r.certified_sum_lower, r.verified);
    println!(
        "generic bound per summand {}, sum {}; gap opens at n = {}",
        r.generic_summand_upper, r.generic_sum_upper, r.threshold
    );
    for row in &r.scan {
        println!("  n = {:2}: 2 floor(sqrt(3n-2)) = {:2} gap = {}", row.n, row.generic_sum, row.gap);
    }
    Ok(())
}
