//! Run configuration, the tightness table, and JSON files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::certify::{generic_subrank_estimate, Mode, DEFAULT_RETRIES};
use crate::error::{Error, Result};
use crate::field::FieldSpec;

/// Environment variable read for the default modulus.
pub const MODULUS_ENV: &str = "SUBRANK_MODULUS";

/// Largest `n` the table accepts without an explicit override.
pub const TABLE_GUARD: usize = 100;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Parse(format!("unknown format {other:?}, expected json or csv"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub field: FieldSpec,
    pub base_seed: u64,
    pub retries: usize,
    /// Worker threads; `0` means one per core.
    pub workers: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            field: FieldSpec::default(),
            base_seed: 0,
            retries: DEFAULT_RETRIES,
            workers: 0,
            output: None,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    /// Defaults, with the modulus taken from [`MODULUS_ENV`] when set.
    pub fn from_env() -> Result<Self> {
        let mut c = Self::default();
        if let Ok(v) = std::env::var(MODULUS_ENV) {
            let p = v
                .trim()
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("{MODULUS_ENV}={v:?}: {e}")))?;
            c.field = FieldSpec::new(p)?;
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.retries == 0 {
            return Err(Error::InvalidArgument("retries must be at least 1".into()));
        }
        Ok(())
    }

    pub fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
    }
}

/// One line of the `n x n x n` tightness table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub upper: usize,
    pub certified_lower: usize,
    #[serde(rename = "match")]
    pub matches: bool,
    /// Wall-clock time for the row; the only nondeterministic column.
    pub seconds: f64,
}

/// Rows for `n = 1..=max_n`, computed in parallel and returned in order of `n`.
///
/// `max_n` above [`TABLE_GUARD`] is refused unless `allow_large` is set.
pub fn tightness_table(config: &RunConfig, max_n: usize, mode: Mode, allow_large: bool) -> Result<Vec<TableRow>> {
    config.validate()?;
    if max_n > TABLE_GUARD && !allow_large {
        return Err(Error::InvalidArgument(format!(
            "max n = {max_n} exceeds the guard of {TABLE_GUARD}; pass the override to run it"
        )));
    }
    let pool = config.pool()?;
    pool.install(|| {
        (1..=max_n)
            .into_par_iter()
            .map(|n| {
                let start = Instant::now();
                let report = generic_subrank_estimate(config.field, &[n, n, n], mode, config.base_seed, config.retries)?;
                Ok(TableRow {
                    n,
                    upper: report.upper_bound,
                    certified_lower: report.certified_lower,
                    matches: report.upper_bound == report.certified_lower,
                    seconds: start.elapsed().as_secs_f64(),
                })
            })
            .collect()
    })
}

/// Column order: `n,upper,certified_lower,match,seconds`.
pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from("n,upper,certified_lower,match,seconds\n");
    for r in rows {
        writeln!(out, "{},{},{},{},{:.3}", r.n, r.upper, r.certified_lower, r.matches, r.seconds).unwrap();
    }
    out
}

/// Pretty JSON with a trailing newline; the canonical on-disk form.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

pub fn save_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    fs::write(path, to_json(value)?)?;
    Ok(())
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    from_json(&fs::read_to_string(path)?)
}
