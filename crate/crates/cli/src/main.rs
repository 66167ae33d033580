use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use posinorm::cli::{exit_code, run, FamilySource, OutputFormat, RunConfig};
use posinorm::scalar::{parse_rational, Backend};
use posinorm::sequences::CATALOG_ENV;
use posinorm::Rational;

#[derive(Parser, Debug)]
#[command(
    name = "posinorm",
    version,
    about = "Interrupter pairs and diagonal certificates for operators on l2"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Registered families
    Families {
        #[command(subcommand)]
        action: FamiliesCmd,
    },
    /// Exact interrupter identities
    Verify {
        #[command(subcommand)]
        action: VerifyCmd,
    },
    /// Diagonal certificate for posinormal, coposinormal or hyponormal
    Certify,
    /// Exact feasible interval for delta
    DeltaSearch,
    /// Window check Q >= D >= P >= 0
    Theorem5,
    /// Weighted shift classification
    Shift {
        #[command(subcommand)]
        action: ShiftCmd,
    },
    /// Floating-point falsification
    Falsify {
        #[command(subcommand)]
        action: FalsifyCmd,
    },
    /// Smallest consistent gamma on a compression
    Gamma,
    /// Dominance quantity for n = 3..N
    Dominance,
    /// Identity for A - r on a finite instance
    ShiftedIdentity,
}

#[derive(Subcommand, Debug)]
enum FamiliesCmd {
    List,
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    Identity,
}

#[derive(Subcommand, Debug)]
enum ShiftCmd {
    Classify,
}

#[derive(Subcommand, Debug)]
enum FalsifyCmd {
    Hyponormal,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn key_value(s: &str) -> Result<(String, Rational), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    Ok((k.trim().to_string(), rational(v.trim())?))
}

#[derive(Args, Debug)]
struct Common {
    /// Registered family name
    #[arg(long, global = true, conflicts_with_all = ["family_json", "weights", "shift"])]
    family: Option<String>,
    /// Registered shift name
    #[arg(long, global = true, conflicts_with_all = ["family_json", "weights"])]
    shift: Option<String>,
    /// Family spec JSON file
    #[arg(long, global = true, conflicts_with = "weights")]
    family_json: Option<PathBuf>,
    /// Shift weights, repeated periodically
    #[arg(long, global = true, value_delimiter = ',', value_parser = rational, allow_negative_numbers = true)]
    weights: Option<Vec<Rational>>,
    /// Family parameter NAME=VALUE
    #[arg(long = "param", global = true, value_parser = key_value)]
    params: Vec<(String, Rational)>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    k_max: Option<usize>,
    /// Start of the tail enclosure in compressions
    #[arg(long = "K", global = true)]
    tail_start: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exact rationals (default)
    #[arg(long, global = true, conflicts_with = "float")]
    exact: bool,
    /// Floating point, for numerics commands
    #[arg(long, global = true)]
    float: bool,
    /// Slack factor added to PSD thresholds, times n * max|m_ij|
    #[arg(long, global = true)]
    slack: Option<f64>,
    /// posinormal, coposinormal or hyponormal
    #[arg(long, global = true)]
    claim: Option<String>,
    #[arg(long, global = true, value_parser = rational)]
    delta1: Option<Rational>,
    #[arg(long, global = true, value_parser = rational)]
    delta2: Option<Rational>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// First entry of P for the shift pair
    #[arg(long, global = true, value_parser = rational)]
    p0: Option<Rational>,
    /// Last index of the zero prefix (-1 for none)
    #[arg(long, global = true, allow_negative_numbers = true)]
    n_zero: Option<i64>,
    /// Leading entries of D
    #[arg(long = "d", global = true, value_delimiter = ',', value_parser = rational)]
    d: Vec<Rational>,
    /// Value of d_k past the given entries
    #[arg(long, global = true, value_parser = rational)]
    d_tail: Option<Rational>,
    /// JSON file {"a": [[...]], "q": [...], "p": [...]}
    #[arg(long, global = true)]
    matrix: Option<PathBuf>,
    /// Shift value r (repeatable)
    #[arg(long = "r", global = true, value_parser = rational, allow_negative_numbers = true)]
    r: Vec<Rational>,
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Families {
            action: FamiliesCmd::List,
        } => "families list",
        Cmd::Verify {
            action: VerifyCmd::Identity,
        } => "verify identity",
        Cmd::Certify => "certify",
        Cmd::DeltaSearch => "delta-search",
        Cmd::Theorem5 => "theorem5",
        Cmd::Shift {
            action: ShiftCmd::Classify,
        } => "shift classify",
        Cmd::Falsify {
            action: FalsifyCmd::Hyponormal,
        } => "falsify hyponormal",
        Cmd::Gamma => "gamma",
        Cmd::Dominance => "dominance",
        Cmd::ShiftedIdentity => "shifted-identity",
    }
}

fn config(cli: Cli) -> RunConfig {
    let c = cli.common;
    let mut cfg = RunConfig::new(command_name(&cli.command));
    cfg.family = match (c.family.or(c.shift), c.family_json, c.weights) {
        (Some(name), _, _) => Some(FamilySource::Named(name)),
        (_, Some(path), _) => Some(FamilySource::JsonFile(path)),
        (_, _, Some(w)) => Some(FamilySource::Weights(w)),
        _ => None,
    };
    cfg.params = c.params.into_iter().collect();
    cfg.n = c.n;
    cfg.k_max = c.k_max;
    cfg.tail_start = c.tail_start;
    cfg.backend = if c.float { Backend::Float } else { Backend::Exact };
    if let Some(s) = c.slack {
        cfg.slack_factor = s;
    }
    cfg.format = match c.format {
        Format::Json => OutputFormat::Json,
        Format::Csv => OutputFormat::Csv,
    };
    cfg.out = c.out;
    cfg.catalog_dir = std::env::var_os(CATALOG_ENV).map(PathBuf::from);
    cfg.claim = c.claim;
    cfg.delta1 = c.delta1;
    cfg.delta2 = c.delta2;
    cfg.gamma = c.gamma;
    cfg.p0 = c.p0;
    cfg.n_zero = c.n_zero;
    cfg.d_prefix = c.d;
    cfg.d_tail = c.d_tail;
    cfg.matrix = c.matrix;
    cfg.r = c.r;
    cfg
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
    let cfg = config(cli);
    match run(&cfg) {
        Ok(text) => {
            if cfg.out.is_none() {
                print!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
