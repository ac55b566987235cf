//! Command-line surface. Every text output starts with (CSV) or contains
//! (JSON) the full [`RunConfig`], and `--config <output>` replays it.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::conv::{batch_profiles, Method, Tables};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::experiment::{scaling_study, write_residual_csv, LemmaOptions, StudyOptions};
use crate::hooley::{lemma1_report, lemma2_report, lemma3_report, lemma4_report, LemmaId};
use crate::series::{default_d_param, theta_zero, SeriesContext, TruncationConfig, DEFAULT_PRIME_CUTOFF};
use crate::sieve::{cache_file, PrimeTable, SpfTable};
use crate::verify::{run_suite, write_table, Fault};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

pub const DEFAULT_LIMIT: u64 = 1 << 14;
pub const DEFAULT_SCALING: [u64; 4] = [1 << 12, 1 << 13, 1 << 14, 1 << 15];
const CONFIG_PREFIX: &str = "# config: ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Compute,
    Mainterm,
    Verify,
    Report,
    Hooley,
    Sieve,
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub n_limit: u64,
    /// `null` selects `sqrt(N) / (ln N)^3` (raised to 4 at small `N`).
    pub d_param: Option<f64>,
    pub prime_cutoff: u64,
    pub method: Method,
    pub workers: usize,
    pub theta: f64,
    pub limits: Vec<u64>,
    pub binary: bool,
    pub lemma: Option<LemmaId>,
    pub omega: f64,
    pub h: Option<i64>,
    pub modulus_bound: u64,
    pub quick: bool,
    pub cache: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub residuals: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            n_limit: DEFAULT_LIMIT,
            d_param: None,
            prime_cutoff: DEFAULT_PRIME_CUTOFF,
            method: Method::Direct,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            theta: theta_zero() / 2.0,
            limits: DEFAULT_SCALING.to_vec(),
            binary: false,
            lemma: None,
            omega: 1.0,
            h: None,
            modulus_bound: 8,
            quick: false,
            cache: None,
            out: None,
            residuals: None,
        }
    }

    pub fn effective_d_param(&self, n_limit: u64) -> f64 {
        self.d_param.unwrap_or_else(|| default_d_param(n_limit))
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::invalid("--workers must be positive"));
        }
        if !(self.theta > 0.0 && self.theta < 0.5) {
            return Err(Error::invalid(format!("--theta {} must lie in (0, 1/2)", self.theta)));
        }
        if self.prime_cutoff < 3 {
            return Err(Error::invalid(format!("--cutoff {} must be at least 3", self.prime_cutoff)));
        }
        if !(self.omega > 0.0) {
            return Err(Error::invalid(format!("--omega {} must be positive", self.omega)));
        }
        let needs_limit = !matches!(self.command, CommandKind::Verify | CommandKind::Report);
        if needs_limit && self.n_limit < 4 {
            return Err(Error::invalid(format!("--limit {} must be at least 4", self.n_limit)));
        }
        if self.command == CommandKind::Hooley && self.n_limit < 16 {
            return Err(Error::invalid(format!("hooley needs --limit >= 16, got {}", self.n_limit)));
        }
        if self.command == CommandKind::Report {
            if self.limits.is_empty() || self.limits.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid("--limits must be a nonempty strictly ascending list"));
            }
            if self.limits[0] < 64 {
                return Err(Error::invalid("report limits must be at least 64"));
            }
        }
        if let Some(d) = self.d_param {
            let ns: Vec<u64> = match self.command {
                CommandKind::Report => self.limits.clone(),
                _ => vec![self.n_limit],
            };
            for n in ns {
                if !(d > 1.0 && d < n as f64 / d) {
                    return Err(Error::invalid(format!("--d-param {d} must satisfy 1 < D < N/D for N = {n}")));
                }
            }
        }
        Ok(())
    }

    fn exec(&self) -> Result<Exec> {
        Exec::with_workers(self.workers)
    }

    fn header_line(&self) -> Result<String> {
        Ok(format!("{CONFIG_PREFIX}{}\n", serde_json::to_string(self)?))
    }

    /// The config embedded in an output file: the first line of a CSV or
    /// text output, or the top-level `config` key of a JSON output.
    pub fn from_output(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        if let Some(rest) = text.strip_prefix(CONFIG_PREFIX) {
            let line = rest.lines().next().unwrap_or("");
            return Ok(serde_json::from_str(line)?);
        }
        let v: serde_json::Value = serde_json::from_str(&text)?;
        match v.get("config") {
            Some(c) => Ok(serde_json::from_value(c.clone())?),
            None => Err(Error::Format(format!("{} has no embedded config", path.display()))),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "goldweight", version, about = "Weighted binary Goldbach sums and their main terms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Profile of J, R, T, S1, S2, S3 for every even n <= N
    Compute(CommonArgs),
    /// Main terms M_R, M_T for every even n <= N
    Mainterm(CommonArgs),
    /// Run the invariant suite against brute-force oracles
    Verify(CommonArgs),
    /// Error sums, normalized ratios and a scaling study
    Report(CommonArgs),
    /// Lemma meters
    Hooley(CommonArgs),
    /// Build (and optionally cache) the prime table
    Sieve(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Table limit N
    #[arg(long)]
    pub limit: Option<u64>,
    /// Divisor cut D (default sqrt(N)/(ln N)^3, at least 4)
    #[arg(long = "d-param")]
    pub d_param: Option<f64>,
    /// Euler-product prime cutoff P
    #[arg(long)]
    pub cutoff: Option<u64>,
    /// direct or convolution
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Exceptional-set exponent
    #[arg(long)]
    pub theta: Option<f64>,
    /// Directory for prime-table caches
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Small-N subset (verify)
    #[arg(long)]
    pub quick: bool,
    /// Replay the config embedded in an earlier output
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated N grid (report)
    #[arg(long, value_delimiter = ',')]
    pub limits: Option<Vec<u64>>,
    /// GWPR binary profile instead of CSV (compute)
    #[arg(long)]
    pub binary: bool,
    /// Which lemma, 1-4 (hooley; all when absent)
    #[arg(long, value_parser = parse_lemma)]
    pub lemma: Option<LemmaId>,
    #[arg(long)]
    pub omega: Option<f64>,
    /// Prime difference h (hooley lemma 2; scans all h when absent)
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<i64>,
    /// Modulus bound K (hooley lemma 1)
    #[arg(long = "modulus-bound")]
    pub modulus_bound: Option<u64>,
    /// Residual CSV path (report)
    #[arg(long)]
    pub residuals: Option<PathBuf>,
    #[arg(long = "inject-fault", hide = true)]
    pub inject_fault: Option<Fault>,
}

fn parse_lemma(s: &str) -> std::result::Result<LemmaId, String> {
    match s.trim_start_matches(['L', 'l']) {
        "1" => Ok(LemmaId::L1),
        "2" => Ok(LemmaId::L2),
        "3" => Ok(LemmaId::L3),
        "4" => Ok(LemmaId::L4),
        _ => Err(format!("unknown lemma '{s}' (expected 1, 2, 3 or 4)")),
    }
}

impl CommonArgs {
    fn into_config(self, command: CommandKind) -> Result<(RunConfig, Option<Fault>)> {
        let mut c = match &self.config {
            Some(path) => {
                let c = RunConfig::from_output(path)?;
                if c.command != command {
                    return Err(Error::invalid(format!(
                        "{} was written by '{:?}', not this command",
                        path.display(),
                        c.command
                    )));
                }
                c
            }
            None => RunConfig::new(command),
        };
        macro_rules! set {
            ($($f:ident => $g:ident),*) => { $(if let Some(v) = self.$f { c.$g = v; })* };
        }
        set!(limit => n_limit, cutoff => prime_cutoff, method => method, workers => workers,
             theta => theta, limits => limits, omega => omega, modulus_bound => modulus_bound);
        if self.d_param.is_some() {
            c.d_param = self.d_param;
        }
        if self.lemma.is_some() {
            c.lemma = self.lemma;
        }
        if self.h.is_some() {
            c.h = self.h;
        }
        if self.cache.is_some() {
            c.cache = self.cache;
        }
        if self.out.is_some() {
            c.out = self.out;
        }
        if self.residuals.is_some() {
            c.residuals = self.residuals;
        }
        c.quick |= self.quick;
        c.binary |= self.binary;
        c.validate()?;
        Ok((c, self.inject_fault))
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::Format(_) => EXIT_USAGE,
        Error::Resource(_) | Error::Io(_) => EXIT_RESOURCE,
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let (kind, args) = match cli.command {
        Command::Compute(a) => (CommandKind::Compute, a),
        Command::Mainterm(a) => (CommandKind::Mainterm, a),
        Command::Verify(a) => (CommandKind::Verify, a),
        Command::Report(a) => (CommandKind::Report, a),
        Command::Hooley(a) => (CommandKind::Hooley, a),
        Command::Sieve(a) => (CommandKind::Sieve, a),
    };
    let (config, fault) = args.into_config(kind)?;
    execute(&config, fault)
}

/// Runs a validated config.
pub fn execute(config: &RunConfig, fault: Option<Fault>) -> Result<i32> {
    match config.command {
        CommandKind::Compute => cmd_compute(config),
        CommandKind::Mainterm => cmd_mainterm(config),
        CommandKind::Verify => cmd_verify(config, fault),
        CommandKind::Report => cmd_report(config),
        CommandKind::Hooley => cmd_hooley(config),
        CommandKind::Sieve => cmd_sieve(config),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes)?,
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn json_bytes(value: &serde_json::Value) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(value)?;
    s.push(b'\n');
    Ok(s)
}

fn prime_table(config: &RunConfig, n_limit: u64, exec: &Exec) -> Result<PrimeTable> {
    match &config.cache {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            PrimeTable::load_or_build(n_limit, &cache_file(dir, n_limit), exec)
        }
        None => PrimeTable::build_with(n_limit, exec),
    }
}

fn cmd_compute(config: &RunConfig) -> Result<i32> {
    let exec = config.exec()?;
    let tables = Tables::from_prime_table(prime_table(config, config.n_limit, &exec)?, &exec)?;
    let profile = batch_profiles(&tables, config.method, config.effective_d_param(config.n_limit), &exec)?;
    let mut buf = Vec::new();
    if config.binary {
        profile.write_binary(&mut buf)?;
        let out = config
            .out
            .as_deref()
            .ok_or_else(|| Error::invalid("--binary needs --out"))?;
        emit(Some(out), &buf)?;
        // the binary layout is fixed, so the config travels alongside
        let side = sidecar_path(out);
        emit(Some(&side), &json_bytes(&json!({ "config": config }))?)?;
    } else {
        buf.extend_from_slice(config.header_line()?.as_bytes());
        profile.write_csv(&mut buf)?;
        emit(config.out.as_deref(), &buf)?;
    }
    Ok(EXIT_OK)
}

/// `<out>.config.json`, the config companion of a binary output.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".config.json");
    PathBuf::from(s)
}

fn series_context(config: &RunConfig, exec: &Exec) -> Result<SeriesContext> {
    SeriesContext::new_with(TruncationConfig::new(config.prime_cutoff)?, exec)
}

fn cmd_mainterm(config: &RunConfig) -> Result<i32> {
    let exec = config.exec()?;
    let ctx = series_context(config, &exec)?;
    let spf = SpfTable::build(config.n_limit)?;
    let table = ctx.build_main_term_table(config.n_limit, &spf, &exec)?;
    let mut buf = config.header_line()?.into_bytes();
    table.write_csv(&mut buf)?;
    emit(config.out.as_deref(), &buf)?;
    Ok(EXIT_OK)
}

fn cmd_verify(config: &RunConfig, fault: Option<Fault>) -> Result<i32> {
    let exec = config.exec()?;
    let results = run_suite(config.quick, fault, config.prime_cutoff, &exec)?;
    let mut buf = config.header_line()?.into_bytes();
    write_table(&results, &mut buf)?;
    emit(config.out.as_deref(), &buf)?;
    if config.out.is_some() {
        write_table(&results, io::stdout().lock())?;
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("failing invariants: {}", failed.join("; "));
        Ok(EXIT_VERIFY_FAILED)
    }
}

fn cmd_report(config: &RunConfig) -> Result<i32> {
    let exec = config.exec()?;
    let ctx = series_context(config, &exec)?;
    let opts = StudyOptions {
        d_param: config.d_param,
        method: config.method,
        theta: config.theta,
        lemmas: Some(LemmaOptions {
            modulus_bound: config.modulus_bound,
            omega: config.omega,
        }),
    };
    let (report, last) = scaling_study(&config.limits, &opts, &ctx, &exec, config.cache.as_deref())?;
    let doc = json!({ "config": config, "truncation": ctx.config(), "report": report });
    emit(config.out.as_deref(), &json_bytes(&doc)?)?;
    if let Some(path) = &config.residuals {
        let mut buf = config.header_line()?.into_bytes();
        write_residual_csv(&last.profile, &last.mains, &mut buf)?;
        emit(Some(path), &buf)?;
    }
    Ok(EXIT_OK)
}

fn cmd_hooley(config: &RunConfig) -> Result<i32> {
    let exec = config.exec()?;
    let n = config.n_limit;
    let tables = Tables::from_prime_table(prime_table(config, n, &exec)?, &exec)?;
    let lemmas = match config.lemma {
        Some(l) => vec![l],
        None => vec![LemmaId::L1, LemmaId::L2, LemmaId::L3, LemmaId::L4],
    };
    let mut reports = Vec::new();
    for l in lemmas {
        reports.push(match l {
            LemmaId::L1 => {
                let ctx = series_context(config, &exec)?;
                lemma1_report(n, config.modulus_bound, &tables, &ctx, &exec)?
            }
            LemmaId::L2 => lemma2_report(n, config.h, &tables, &exec)?,
            LemmaId::L3 => lemma3_report(n, config.omega, &tables)?,
            LemmaId::L4 => lemma4_report(n, config.omega, &tables, &exec)?,
        });
    }
    let doc = json!({ "config": config, "reports": reports });
    emit(config.out.as_deref(), &json_bytes(&doc)?)?;
    Ok(EXIT_OK)
}

fn cmd_sieve(config: &RunConfig) -> Result<i32> {
    let exec = config.exec()?;
    let table = prime_table(config, config.n_limit, &exec)?;
    let doc = json!({
        "config": config,
        "limit": table.limit(),
        "prime_count": table.len(),
        "largest_prime": table.primes().last(),
        "cache_file": config.cache.as_deref().map(|d| cache_file(d, config.n_limit)),
    });
    emit(config.out.as_deref(), &json_bytes(&doc)?)?;
    Ok(EXIT_OK)
}
