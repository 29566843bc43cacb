use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use covarkit::criteria::DEFAULT_FIXPOINT_TOL;
use covarkit::operators::Polynomial;
use covarkit::oracle::Norm;
use covarkit::problem::{Problem, ProblemFile};
use covarkit::report::{self, error_exit_code, EXIT_INVALID};
use covarkit::scalar::parse_scalar;
use covarkit::Error;
use serde::Serialize;

const SEED_ENV: &str = "COVARKIT_SEED";

#[derive(Parser)]
#[command(
    name = "covarkit",
    version,
    about = "Decide AB = BF(A) and BA = F(A)B for concrete operator pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the relation and cross-check it numerically.
    Check {
        path: PathBuf,
        #[command(flatten)]
        oracle: OracleFlags,
        #[arg(long)]
        json: bool,
    },
    /// Residual of the relation on each test function.
    Oracle {
        path: PathBuf,
        #[command(flatten)]
        oracle: OracleFlags,
        #[arg(long)]
        json: bool,
    },
    /// List the coefficient values for which the relation holds.
    Search {
        path: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Real fixed points of F, from a problem file or coefficients `d0,d1,...`.
    Fixpoints {
        source: String,
        #[arg(long, default_value_t = DEFAULT_FIXPOINT_TOL)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct OracleFlags {
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, value_parser = parse_norm)]
    norm: Option<Norm>,
    #[arg(long)]
    tau_pass: Option<f64>,
    #[arg(long)]
    tau_fail: Option<f64>,
    /// Seed for the random test functions; the COVARKIT_SEED variable wins.
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_norm(s: &str) -> Result<Norm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl OracleFlags {
    fn apply(&self, p: &mut Problem) -> Result<(), Error> {
        let cfg = &mut p.oracle;
        if let Some(g) = self.grid {
            cfg.grid = g;
        }
        if let Some(n) = self.norm {
            cfg.norm = n;
        }
        if let Some(t) = self.tau_pass {
            cfg.tau_pass = t;
        }
        if let Some(t) = self.tau_fail {
            cfg.tau_fail = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Ok(s) = std::env::var(SEED_ENV) {
            cfg.seed = s
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("{SEED_ENV} must be an unsigned integer, got {s:?}")))?;
        }
        cfg.validate()
    }
}

fn load(path: &Path) -> Result<Problem, Error> {
    ProblemFile::load(path)?.build()
}

fn emit<T: Serialize + std::fmt::Display>(value: &T, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
    } else {
        print!("{value}");
    }
}

fn polynomial_source(source: &str) -> Result<Polynomial, Error> {
    let path = Path::new(source);
    if path.is_file() {
        return Ok(load(path)?.f);
    }
    let coeffs = source
        .split(',')
        .map(parse_scalar)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse(format!("{source:?} is neither a file nor a coefficient list: {e}")))?;
    Ok(Polynomial::new(coeffs))
}

fn run(cmd: Command) -> Result<i32, Error> {
    match cmd {
        Command::Check { path, oracle, json } => {
            let mut p = load(&path)?;
            oracle.apply(&mut p)?;
            let r = report::run_check(&p)?;
            emit(&r, json);
            Ok(r.exit_code)
        }
        Command::Oracle { path, oracle, json } => {
            let mut p = load(&path)?;
            oracle.apply(&mut p)?;
            emit(&report::run_oracle(&p)?, json);
            Ok(0)
        }
        Command::Search { path, json } => {
            let p = load(&path)?;
            emit(&report::run_search(&p)?, json);
            Ok(0)
        }
        Command::Fixpoints { source, tol, json } => {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
            }
            let f = polynomial_source(&source)?;
            emit(&report::run_fixpoints(&f, tol)?, json);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_INVALID as u8);
        }
    };
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
