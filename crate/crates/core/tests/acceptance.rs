//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Runs without the libtest harness so the lines always reach the output.

use std::process::ExitCode;
use std::time::Instant;

use subrank::bounds::{dim_cr_upper, lower_bound_formula, upper_bound_generic};
use subrank::certify::{certify_lower, differential_image_rank, generic_subrank_estimate, Mode};
use subrank::decomp::{
    blow_up_witness, certify_with_witness, derive_333, verify_witness, witness_2220_31, witness_333,
    witness_order_n, DecompWitness, Method,
};
use subrank::io::{tightness_table, RunConfig};
use subrank::linalg::Matrix;
use subrank::oracle::{brute_certificate, brute_subrank, non_additivity_demo, verify_certificate, RestrictionCertificate};
use subrank::{FieldSpec, Tensor};

type Check = std::result::Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn f() -> FieldSpec {
    FieldSpec::default()
}

/// `floor(sqrt(m))` by counting up.
fn isqrt(m: usize) -> usize {
    let mut t = 0;
    while (t + 1) * (t + 1) <= m {
        t += 1;
    }
    t
}

fn tightness(lo: usize, hi: usize) -> Check {
    let config = RunConfig::default();
    let rows = tightness_table(&config, hi, Mode::Strong, false).map_err(|e| e.to_string())?;
    for row in rows.iter().filter(|r| r.n >= lo) {
        let expect = isqrt(3 * row.n - 2);
        ensure!(
            row.upper == expect && row.certified_lower == expect && row.matches,
            "n = {}: upper {}, certified {}, expected {expect}",
            row.n,
            row.upper,
            row.certified_lower
        );
    }
    Ok(())
}

fn tightness_to_60() -> Check {
    tightness(2, 60)
}

fn tightness_stretch_to_100() -> Check {
    tightness(61, 100)
}

fn lower_bound_chain() -> Check {
    let base = witness_333(f(), Method::Derived, 0).map_err(|e| e.to_string())?;
    let mut blown: Vec<Option<DecompWitness>> = vec![None; 8];
    for n in 6..=48 {
        let formula = lower_bound_formula(n);
        // independent evaluation of 3 floor(sqrt(n/3 + 1/4) - 1/2): largest d with (2d+1)^2 <= (4n+3)/3
        let d_ref = (0..n).take_while(|&d| 3 * (2 * d + 1) * (2 * d + 1) <= 4 * n + 3).last().unwrap_or(0);
        ensure!(formula == 3 * d_ref, "n = {n}: formula {formula}, reference {}", 3 * d_ref);
        let report = generic_subrank_estimate(f(), &[n, n, n], Mode::Weak, 0, 5).map_err(|e| e.to_string())?;
        ensure!(
            report.certified_lower >= formula,
            "n = {n}: weak certified {} below {formula}",
            report.certified_lower
        );
        for d in 1..blown.len() {
            if n < 3 * d + 3 * d * d {
                continue;
            }
            if blown[d].is_none() {
                blown[d] = Some(blow_up_witness(&base, d).map_err(|e| e.to_string())?);
            }
            let w = blown[d].as_ref().unwrap();
            let c = certify_with_witness(&[n, n, n], w).map_err(|e| e.to_string())?;
            ensure!(c.is_certified() && c.r == 3 * d, "n = {n}, d = {d}: blow-up route failed");
        }
    }
    Ok(())
}

/// Largest `t <= min(dims)` with `t^(k-1) <= sum - (k-1)`, by linear scan.
fn upper_reference(dims: &[usize]) -> usize {
    let k = dims.len() as u32;
    let s = dims.iter().sum::<usize>() - (k as usize - 1);
    let min = *dims.iter().min().unwrap();
    (0..=min).take_while(|t| t.pow(k - 1) <= s).last().unwrap()
}

fn upper_bound_formulas() -> Check {
    let mut grid: Vec<Vec<usize>> = Vec::new();
    for n in 1..=20 {
        grid.push(vec![n; 3]);
    }
    for n in 1..=15 {
        grid.push(vec![n; 4]);
    }
    for n in 1..=15 {
        grid.push(vec![n; 5]);
    }
    ensure!(grid.len() == 50, "grid has {} cases", grid.len());
    for dims in &grid {
        let got = upper_bound_generic(dims).map_err(|e| e.to_string())?;
        ensure!(got == upper_reference(dims), "{dims:?}: {got} vs {}", upper_reference(dims));
    }
    let hand: [(&[usize], usize); 9] = [
        (&[10, 10, 10], 5),
        (&[4, 4, 4], 3),
        (&[7, 7, 7], 4),
        (&[12, 12, 12], 5),
        (&[34, 34, 34], 10),
        (&[100, 100, 100], 17),
        (&[4, 4, 4, 4], 2),
        (&[20, 20, 20, 20], 4),
        (&[2, 2], 2),
    ];
    for (dims, want) in hand {
        let got = upper_bound_generic(dims).map_err(|e| e.to_string())?;
        ensure!(got == want, "{dims:?}: {got}, hand value {want}");
    }
    // sum n_i^2 + (prod n_i - r^k + r) - sum (n_i (n_i - r) + r)
    for dims in [vec![5, 5, 5], vec![3, 4, 5], vec![6, 2, 7], vec![3, 3, 3, 3], vec![2, 3, 4, 5, 6]] {
        let k = dims.len() as u32;
        for r in 0..=*dims.iter().min().unwrap() {
            let sq: i128 = dims.iter().map(|&n| (n * n) as i128).sum();
            let prod: i128 = dims.iter().map(|&n| n as i128).product();
            let ri = r as i128;
            let stab: i128 = dims.iter().map(|&n| (n as i128) * (n as i128 - ri) + ri).sum();
            let expect = sq + (prod - ri.pow(k) + ri) - stab;
            let got = dim_cr_upper(&dims, r).map_err(|e| e.to_string())?;
            ensure!(got == expect, "{dims:?}, r = {r}: {got} vs {expect}");
        }
    }
    Ok(())
}

fn check_witness(label: &str, w: &DecompWitness) -> Check {
    let mut copy = w.clone();
    ensure!(verify_witness(&mut copy).map_err(|e| e.to_string())?, "{label}: {} does not span", w.spec());
    ensure!(w.spec().is_balanced(), "{label}: {} unbalanced", w.spec());
    for step in w.derivation() {
        ensure!(step.spec.is_balanced(), "{label}: step {} gives unbalanced {}", step.op, step.spec);
    }
    Ok(())
}

fn decomposition_witnesses() -> Check {
    let e = |e: subrank::Error| e.to_string();
    let base = witness_2220_31(f()).map_err(e)?;
    check_witness("2220_31", &base)?;
    let x = base.subspace(1);
    ensure!(
        x.contains(&[1, 0, 0, 0]).map_err(e)? && !x.contains(&[0, 1, 0, 0]).map_err(e)?,
        "2220_31: leg 1 is not the symmetric matrices"
    );
    check_witness("333 derived", &witness_333(f(), Method::Derived, 0).map_err(e)?)?;
    check_witness("333 random", &witness_333(f(), Method::Random, 0).map_err(e)?)?;
    let chain = derive_333(f(), 0, 5).map_err(e)?;
    let wanted = [
        "[3 2 2; 0 3 3]",
        "[3 1 2; 1 3 0]",
        "[3 3 2; 1 3 3]",
        "[3 2 1; 2 0 0]",
        "[3 3 1; 2 0 3]",
        "[3 3 3; 3 3 3]",
    ];
    let specs: Vec<String> = chain.witnesses.iter().map(|w| w.spec().to_string()).collect();
    for s in wanted {
        ensure!(specs.iter().any(|x| x == s), "chain lacks {s}");
    }
    for w in &chain.witnesses {
        check_witness("chain step", w)?;
    }
    let w3 = witness_order_n(f(), 3, 0, 5).map_err(e)?;
    check_witness("order 3", &w3)?;
    let w4 = witness_order_n(f(), 4, 0, 5).map_err(e)?;
    check_witness("order 4", &w4)?;
    ensure!(w4.spec().to_string() == "[4 4 4 4; 16 16 16 16]", "order 4 spec {}", w4.spec());
    let b = blow_up_witness(&witness_333(f(), Method::Random, 0).map_err(e)?, 2).map_err(e)?;
    check_witness("blow-up 2", &b)?;
    ensure!(b.spec().to_string() == "[6 6 6; 12 12 12]", "blow-up spec {}", b.spec());
    Ok(())
}

fn criterion_equivalence() -> Check {
    let mut cases = 0;
    for n in 2..=20 {
        let ub = upper_bound_generic(&[n, n, n]).unwrap();
        for r in [ub - 1, ub, ub + 1] {
            if r == 0 || r > n {
                continue;
            }
            for seed in 0..4 {
                let full = differential_image_rank(f(), &[n, n, n], r, seed).map_err(|e| e.to_string())? == n * n * n;
                let cert = certify_lower(f(), &[n, n, n], r, Mode::Strong, seed, 1).map_err(|e| e.to_string())?;
                ensure!(
                    full == cert.is_certified(),
                    "n = {n}, r = {r}, seed = {seed}: differential full = {full}, strong = {:?}",
                    cert.outcome
                );
                cases += 1;
            }
        }
    }
    ensure!(cases > 150, "only {cases} cases");
    Ok(())
}

fn tensor_from_bits(bits: u32, shape: &[usize], field: FieldSpec) -> Tensor {
    let len: usize = shape.iter().product();
    Tensor::new(field, shape.to_vec(), (0..len).map(|i| u64::from((bits >> i) & 1)).collect()).unwrap()
}

/// Rank over GF(2) as log2 of the number of distinct row combinations.
fn gf2_rank(rows: &[Vec<u64>]) -> usize {
    let mut span = std::collections::BTreeSet::new();
    for mask in 0u32..(1 << rows.len()) {
        let mut v = vec![0u64; rows[0].len()];
        for (i, row) in rows.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for (a, b) in v.iter_mut().zip(row) {
                    *a ^= b;
                }
            }
        }
        span.insert(v);
    }
    span.len().trailing_zeros() as usize
}

fn oracle_suite() -> Check {
    let e = |e: subrank::Error| e.to_string();
    let gf2 = FieldSpec::new(2).unwrap();
    ensure!(brute_subrank(&Tensor::diagonal(gf2, 2, 3)).map_err(e)? == 2, "Q(I_2) != 2");
    let w = tensor_from_bits(0b0001_0110, &[2, 2, 2], gf2);
    ensure!(w.get(&[0, 0, 1]).unwrap() == 1 && w.get(&[1, 0, 0]).unwrap() == 1, "W tensor layout");
    ensure!(brute_subrank(&w).map_err(e)? == 1, "Q(W) != 1");

    // every 2x2 map over GF(2), for sampled restrictions
    let maps: Vec<Matrix> = (0..16u64)
        .map(|m| Matrix::new(gf2, 2, 2, (0..4).map(|i| (m >> i) & 1).collect()).unwrap())
        .collect();
    let lines: Vec<Matrix> = (0..4u64)
        .map(|m| Matrix::new(gf2, 1, 2, vec![m & 1, (m >> 1) & 1]).unwrap())
        .collect();
    let values: Vec<usize> = (0..256u32)
        .map(|bits| brute_subrank(&tensor_from_bits(bits, &[2, 2, 2], gf2)))
        .collect::<subrank::Result<_>>()
        .map_err(e)?;
    for bits in 0..256u32 {
        let t = tensor_from_bits(bits, &[2, 2, 2], gf2);
        let q = values[bits as usize];
        // soundness: any certificate at r, found or guessed, keeps q >= r
        for r in 1..=2 {
            if let Some(c) = brute_certificate(&t, r).map_err(e)? {
                ensure!(verify_certificate(&c, &t).map_err(e)?, "tensor {bits}: found certificate fails");
                ensure!(q >= r, "tensor {bits}: certificate at {r} but Q = {q}");
            }
        }
        for (a, b) in [(0usize, 1usize), (3, 5), (7, 2)] {
            for c in 0..4 {
                let cert = RestrictionCertificate {
                    r: 1,
                    maps: vec![lines[a % 4].clone(), lines[b % 4].clone(), lines[c].clone()],
                    field: gf2,
                };
                if verify_certificate(&cert, &t).map_err(e)? {
                    ensure!(q >= 1, "tensor {bits}: verified guess at 1 but Q = 0");
                }
            }
        }
        // monotone under restriction
        for (i, j, k) in [(1, 6, 9), (3, 3, 3), (6, 9, 15), (15, 0, 6), (9, 9, 6)] {
            let s = t.restrict(&[maps[i].clone(), maps[j].clone(), maps[k].clone()]).map_err(e)?;
            let s_bits = s.entries().iter().enumerate().fold(0u32, |acc, (p, &v)| acc | ((v as u32) << p));
            ensure!(values[s_bits as usize] <= q, "tensor {bits}: restriction {s_bits} has larger subrank");
        }
    }
    // order 2: subrank is matrix rank
    for n in [2usize, 3] {
        for bits in 0..(1u32 << (n * n)) {
            let t = tensor_from_bits(bits, &[n, n], gf2);
            let rows: Vec<Vec<u64>> = t.entries().chunks(n).map(|c| c.to_vec()).collect();
            let q = brute_subrank(&t).map_err(e)?;
            ensure!(q == gf2_rank(&rows), "{n}x{n} matrix {bits}: subrank {q}, rank {}", gf2_rank(&rows));
        }
    }
    Ok(())
}

fn non_additivity() -> Check {
    for n in 13..=20 {
        let report = non_additivity_demo(f(), n, n as u64).map_err(|e| e.to_string())?;
        ensure!(report.verified && report.certified_sum_lower == n, "n = {n}: certificate did not verify");
        let bound = isqrt(3 * n - 2);
        ensure!(2 * bound < n, "n = {n}: no gap, 2 * {bound} >= {n}");
        ensure!(report.generic_sum_upper == 2 * bound, "n = {n}: report bound {}", report.generic_sum_upper);
        // T + S = I_n entrywise, and the [I | I] maps add the two blocks
        let id = Tensor::diagonal(f(), n, 3);
        let sum = report.t.pointwise_sum(&report.s).map_err(|e| e.to_string())?;
        ensure!(sum == id, "n = {n}: T + S != I_n");
        for m in &report.certificate.maps {
            for i in 0..n {
                for j in 0..2 * n {
                    let want = u64::from(j == i || j == n + i);
                    ensure!(m.get(i, j) == want, "n = {n}: map entry ({i}, {j})");
                }
            }
        }
    }
    Ok(())
}

fn order_4_spot_check() -> Check {
    let e = |e: subrank::Error| e.to_string();
    let w = witness_order_n(f(), 4, 0, 5).map_err(e)?;
    let dims = [20, 20, 20, 20];
    let c = certify_with_witness(&dims, &w).map_err(e)?;
    ensure!(c.is_certified() && c.r == 4, "witness route did not certify 4");
    ensure!(upper_bound_generic(&dims).map_err(e)? == 4, "upper bound is not 4");
    let direct = certify_lower(f(), &dims, 4, Mode::Weak, 0, 5).map_err(e)?;
    ensure!(direct.is_certified(), "sampled weak criterion did not certify 4");
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("tightness table, strong mode, n = 2..60", tightness_to_60),
        ("tightness table stretch, n = 61..100", tightness_stretch_to_100),
        ("lower-bound chain, n = 6..48, weak and blow-up routes", lower_bound_chain),
        ("upper-bound formulas, 50-case grid and dim C_r polynomial", upper_bound_formulas),
        ("decomposition witnesses and derivation chain", decomposition_witnesses),
        ("criterion equivalence, n <= 20", criterion_equivalence),
        ("oracle suite over GF(2)", oracle_suite),
        ("non-additivity demo, n = 13..20", non_additivity),
        ("order-4 spot check, (20,20,20,20) at r = 4", order_4_spot_check),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("PASS  {name}  ({secs:.1}s)"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name}  ({secs:.1}s): {msg}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
