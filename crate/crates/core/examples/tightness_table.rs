//! Upper bound against certified lower bound for n x n x n tensors.
//!
//! cargo run --release --example tightness_table -- 40

use subrank::certify::Mode;
use subrank::io::{table_csv, tightness_table, RunConfig};

fn main() -> subrank::Result<()> {
    let max_n = std::env::args().nth(1).map_or(30, |s| s.parse().expect("max n"));
    let rows = tightness_table(&RunConfig::default(), max_n, Mode::Strong, false)?;
    print!("{}", table_csv(&rows));
    let gaps: Vec<usize> = rows.iter().filter(|r| !r.matches).map(|r| r.n).collect();
    eprintln!("rows without a match: {gaps:?}");
    Ok(())
}
