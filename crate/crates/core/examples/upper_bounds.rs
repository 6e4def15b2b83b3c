//! Upper bounds on the generic subrank for a few shapes.
//!
//! cargo run --example upper_bounds -- 10,10,10

use subrank::bounds::{dim_cr_upper, generic_root_bound, upper_bound_generic};

fn main() -> subrank::Result<()> {
    let shapes: Vec<Vec<usize>> = match std::env::args().nth(1) {
        Some(arg) => vec![arg.split(',').map(|x| x.trim().parse().expect("integer side")).collect()],
        None => vec![vec![4, 4, 4], vec![10, 10, 10], vec![100, 100, 100], vec![4, 4, 4, 4], vec![20; 4], vec![2, 2]],
    };
    for dims in shapes {
        let q = upper_bound_generic(&dims)?;
        println!(
            "{dims:?}: Q <= {q} (root bound {}), dim C_r bound at r = {q}: {}",
            generic_root_bound(&dims)?,
            dim_cr_upper(&dims, q)?
        );
    }
    Ok(())
}
