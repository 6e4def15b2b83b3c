//! Exact subrank over GF(2) by exhaustive search.

use subrank::oracle::{brute_certificate, brute_subrank};
use subrank::{FieldSpec, Tensor};

fn main() -> subrank::Result<()> {
    let gf2 = FieldSpec::new(2)?;
    let mut w = Tensor::zeros(gf2, &[2, 2, 2]);
    for idx in [[0, 0, 1], [0, 1, 0], [1, 0, 0]] {
        w.set(&idx, 1)?;
    }
    println!("Q(I_2) = {}", brute_subrank(&Tensor::diagonal(gf2, 2, 3))?);
    println!("Q(W) = {}", brute_subrank(&w)?);
    if let Some(c) = brute_certificate(&w, 1)? {
        println!("certificate: {}", serde_json::to_string(&c)?);
    }
    let mut histogram = [0usize; 3];
    for bits in 0u32..256 {
        let t = Tensor::new(gf2, vec![2, 2, 2], (0..8).map(|i| u64::from(bits >> i & 1)).collect())?;
        histogram[brute_subrank(&t)?] += 1;
    }
    println!("2x2x2 tensors over GF(2) by subrank: {histogram:?}");
    Ok(())
}
