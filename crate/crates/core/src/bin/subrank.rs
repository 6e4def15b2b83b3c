//! Command-line front end.
//!
//! Exit codes: 0 certified or verified, 2 inconclusive or unverified,
//! 1 usage, input or I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use subrank::bounds::upper_bound_generic;
use subrank::certify::{certify_lower, Mode, Outcome};
use subrank::decomp::{
    blow_up_witness, random_witness, trivial_witness, witness_2220_31, witness_333, witness_333_binary,
    witness_order_n, DecompSpec, DecompWitness,
};
use subrank::io::{self, Format, RunConfig, MODULUS_ENV};
use subrank::oracle::{brute_certificate, brute_subrank, non_additivity_demo};
use subrank::{Error, FieldSpec, Result, Tensor};

#[derive(Parser)]
#[command(name = "subrank", version, about = "Generic tensor subrank bounds and certificates")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Prime modulus of the working field.
    #[arg(long, global = true, env = MODULUS_ENV)]
    modulus: Option<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 5)]
    retries: usize,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Weak,
    Strong,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Weak => Mode::Weak,
            ModeArg::Strong => Mode::Strong,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Derived,
    Random,
    Binary,
}

#[derive(Subcommand)]
enum Cmd {
    /// Upper bound on the generic subrank.
    Upper {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
    },
    /// Try to certify a lower bound r.
    Certify {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        r: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Strong)]
        mode: ModeArg,
    },
    /// Upper bound and certified lower bound for n x n x n, n = 1..=max_n.
    Table {
        #[arg(long)]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Strong)]
        mode: ModeArg,
        /// Allow max_n above 100.
        #[arg(long)]
        allow_large: bool,
    },
    /// Build a decomposition witness.
    Witness {
        /// Spec as "n1,n2,..;a1,a2,..".
        #[arg(long, conflicts_with = "order_n", required_unless_present = "order_n")]
        spec: Option<String>,
        #[arg(long, value_enum, default_value_t = MethodArg::Derived)]
        method: MethodArg,
        /// Witness for [n; n^(n-2)] repeated n times.
        #[arg(long)]
        order_n: Option<usize>,
        /// Blow the witness up by this factor.
        #[arg(long)]
        blow_up: Option<usize>,
    },
    /// Recheck a witness file.
    VerifyWitness {
        #[arg(long)]
        file: PathBuf,
    },
    /// Exact subrank of a small tensor over GF(q) by exhaustive search.
    Brute {
        #[arg(long)]
        tensor: PathBuf,
        /// Field size q (prime); defaults to the tensor file's modulus.
        #[arg(long)]
        field: Option<u64>,
    },
    /// Random T and S = I_n - T with a certificate for their direct sum.
    DemoNonadditive {
        #[arg(long)]
        n: usize,
    },
}

enum Status {
    Ok,
    Negative,
}

#[derive(Serialize)]
struct CertifyOutput {
    dims: Vec<usize>,
    r: usize,
    mode: Mode,
    outcome: Outcome,
    seed: u64,
    attempts: usize,
    certified_seed: Option<u64>,
    modulus: FieldSpec,
}

#[derive(Serialize)]
struct BruteOutput {
    subrank: usize,
    modulus: FieldSpec,
    certificate: Option<subrank::oracle::RestrictionCertificate>,
}

fn config(g: &Global) -> Result<RunConfig> {
    let mut c = RunConfig::default();
    if let Some(p) = g.modulus {
        c.field = FieldSpec::new(p)?;
    }
    c.base_seed = g.seed;
    c.retries = g.retries;
    c.workers = g.workers;
    c.output = g.out.clone();
    c.format = match g.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    c.validate()?;
    Ok(c)
}

fn emit(c: &RunConfig, text: &str) -> Result<()> {
    match &c.output {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn build_witness(c: &RunConfig, spec: Option<&str>, method: MethodArg, order_n: Option<usize>) -> Result<DecompWitness> {
    let f = c.field;
    if let Some(n) = order_n {
        return witness_order_n(f, n, c.base_seed, c.retries);
    }
    let spec: DecompSpec = spec.expect("clap requires spec or order-n").parse()?;
    match method {
        MethodArg::Random => random_witness(f, &spec, c.base_seed, c.retries),
        MethodArg::Binary if spec == DecompSpec::repeated(3, 3, 3)? => witness_333_binary(f, c.base_seed, 10_000),
        MethodArg::Binary => Err(Error::InvalidArgument("binary search is available for 3,3,3;3,3,3 only".into())),
        MethodArg::Derived if spec == DecompSpec::repeated(3, 3, 3)? => {
            witness_333(f, subrank::decomp::Method::Derived, c.base_seed)
        }
        MethodArg::Derived if spec.to_string() == "[2 2 2; 0 3 1]" => witness_2220_31(f),
        MethodArg::Derived => trivial_witness(f, &spec).map_err(|_| {
            Error::InvalidArgument(format!("no derivation known for {spec}; try --method random"))
        }),
    }
}

fn run(cli: Cli) -> Result<Status> {
    let c = config(&cli.global)?;
    match cli.cmd {
        Cmd::Upper { dims } => {
            emit(&c, &format!("{}\n", upper_bound_generic(&dims)?))?;
            Ok(Status::Ok)
        }
        Cmd::Certify { dims, r, mode } => {
            let mode = Mode::from(mode);
            let cert = certify_lower(c.field, &dims, r, mode, c.base_seed, c.retries)?;
            let out = CertifyOutput {
                dims,
                r,
                mode,
                outcome: cert.outcome,
                seed: cert.seed,
                attempts: cert.attempts,
                certified_seed: cert.certified_seed,
                modulus: c.field,
            };
            emit(&c, &io::to_json(&out)?)?;
            Ok(if cert.is_certified() { Status::Ok } else { Status::Negative })
        }
        Cmd::Table { max_n, mode, allow_large } => {
            let rows = io::tightness_table(&c, max_n, mode.into(), allow_large)?;
            let text = match c.format {
                Format::Csv => io::table_csv(&rows),
                Format::Json => io::to_json(&rows)?,
            };
            emit(&c, &text)?;
            Ok(Status::Ok)
        }
        Cmd::Witness {
            spec,
            method,
            order_n,
            blow_up,
        } => {
            let w = match build_witness(&c, spec.as_deref(), method, order_n) {
                Ok(w) => w,
                Err(e @ Error::Inconclusive { .. }) => {
                    eprintln!("{e}");
                    return Ok(Status::Negative);
                }
                Err(e) => return Err(e),
            };
            let w = match blow_up {
                Some(d) => blow_up_witness(&w, d)?,
                None => w,
            };
            emit(&c, &io::to_json(&w)?)?;
            Ok(if w.is_verified() { Status::Ok } else { Status::Negative })
        }
        Cmd::VerifyWitness { file } => {
            let mut w: DecompWitness = io::load_json(&file)?;
            let ok = w.verify()?;
            emit(&c, &format!("{}: {}\n", w.spec(), if ok { "verified" } else { "unverified" }))?;
            Ok(if ok { Status::Ok } else { Status::Negative })
        }
        Cmd::Brute { tensor, field } => {
            let t: Tensor = io::load_json(&tensor)?;
            let t = match field {
                Some(q) => t.with_field(FieldSpec::new(q)?),
                None => t,
            };
            let q = brute_subrank(&t)?;
            match c.format {
                Format::Json if c.output.is_some() => {
                    let out = BruteOutput {
                        subrank: q,
                        modulus: t.field(),
                        certificate: brute_certificate(&t, q)?,
                    };
                    emit(&c, &io::to_json(&out)?)?;
                }
                _ => emit(&c, &format!("{q}\n"))?,
            }
            Ok(Status::Ok)
        }
        Cmd::DemoNonadditive { n } => {
            let report = non_additivity_demo(c.field, n, c.base_seed)?;
            emit(&c, &io::to_json(&report)?)?;
            Ok(if report.verified { Status::Ok } else { Status::Negative })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Negative) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
