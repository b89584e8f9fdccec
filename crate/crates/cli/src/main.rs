//! Command-line driver for the ideal-sieve library: field inspection, ideal
//! table caching, the headline divisor-weight sums, and the verification
//! battery.
//!
//! Exit codes: 0 success / all checks pass, 1 verification failure, 2 usage
//! or configuration error, 3 environment error (cache I/O).
//!
//! Reports go to stdout; progress and diagnostics go to stderr. With a fixed
//! configuration the stdout bytes are identical regardless of thread count;
//! wall-clock timings are reported as zero unless `--timings` is given so
//! that repeated runs stay byte-identical.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use bvsieve_core::cache;
use bvsieve_core::constants::{self, ResidueEstimate, SiegelPolicy};
use bvsieve_core::lemmas::{default_grid, GRID_MAX_COUNTING, GRID_MAX_DEFAULT};
use bvsieve_core::sums;
use bvsieve_core::{
    enumerate_ideals, Baseline, Error, IdealTable, LemmaCtx, LemmaReport, NumberField,
    DEFAULT_MEMORY_BUDGET,
};

const DEFAULT_CACHE_DIR: &str = ".bvsieve-cache";
const ENV_CACHE_DIR: &str = "BVSIEVE_CACHE_DIR";
const ENV_THREADS: &str = "BVSIEVE_THREADS";

// ---------------------------------------------------------------------------
// Command-line grammar
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "bvsieve",
    version,
    about = "Ideal counting, divisor-weight sums and verification for number fields",
    propagate_version = true
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GlobalOpts {
    /// TOML configuration file; command-line flags take precedence
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Cache directory [env: BVSIEVE_CACHE_DIR] [default: ./.bvsieve-cache]
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    /// Worker threads [env: BVSIEVE_THREADS] [default: available parallelism]
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Report format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Report wall-clock timings (off by default to keep output reproducible)
    #[arg(long, global = true)]
    timings: bool,
    /// Maximum number of ideals to hold in memory
    #[arg(long, global = true, value_name = "N")]
    memory_budget: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Inspect a number field
    #[command(subcommand)]
    Field(FieldCmd),
    /// Build or reuse ideal tables
    #[command(subcommand)]
    Ideals(IdealsCmd),
    /// Evaluate the headline sums over an ideal table
    #[command(subcommand)]
    Sum(SumCmd),
    /// Run asymptotic checks and report pass/fail per statement
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum FieldCmd {
    /// Parse a defining polynomial and print the field invariants
    Info(FieldArgs),
}

#[derive(Args)]
struct FieldArgs {
    /// Ascending comma-separated integer coefficients, e.g. "1,0,1" for x^2+1
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
}

#[derive(Subcommand)]
enum IdealsCmd {
    /// Enumerate all integral ideals of norm <= limit, caching the table
    Enumerate(EnumerateArgs),
}

#[derive(Args)]
struct EnumerateArgs {
    /// Ascending comma-separated integer coefficients of the defining polynomial
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// Norm bound for the table
    #[arg(long)]
    limit: Option<u64>,
}

#[derive(Subcommand)]
enum SumCmd {
    /// Quadratic sum of ramp-weighted divisor sums over ideals of norm <= x
    Bv(SumArgs),
    /// Bilinear sum of two truncated logarithm weights
    Bilinear(SumArgs),
    /// Norm-damped quadratic sum (exponent alpha in (1/2, 1))
    Weighted(SumArgs),
}

#[derive(Args)]
struct SumArgs {
    /// Ascending comma-separated integer coefficients of the defining polynomial
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// Outer summation bound
    #[arg(long)]
    x: f64,
    /// Lower weight cutoff (first truncation level for `bilinear`)
    #[arg(long)]
    w: f64,
    /// Upper weight cutoff (second truncation level for `bilinear`)
    #[arg(long)]
    y: f64,
    /// Damping exponent; only the `weighted` sum takes one
    #[arg(long)]
    alpha: Option<f64>,
    /// Cache key: table norm bound [default: ceil of x]
    #[arg(long)]
    limit: Option<u64>,
    /// Build and cache the table if it is missing
    #[arg(long)]
    build: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Ascending comma-separated integer coefficients of the defining polynomial
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// Statement id to check, e.g. 3.6 (repeatable)
    #[arg(long = "lemma", value_name = "ID", conflicts_with = "all")]
    lemmas: Vec<String>,
    /// Run the whole battery
    #[arg(long)]
    all: bool,
    /// Table norm bound [default: largest grid point]
    #[arg(long)]
    limit: Option<u64>,
    /// Comma-separated evaluation grid, e.g. 1e3,1e4,1e5 (floats truncated)
    #[arg(long)]
    grid: Option<String>,
    /// Read tolerance bands from FILE instead of the built-in baseline
    #[arg(long, value_name = "FILE")]
    baseline: Option<PathBuf>,
    /// Write observed band constants (with 2x headroom) to FILE
    #[arg(long, value_name = "FILE")]
    write_baseline: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

// ---------------------------------------------------------------------------
// Configuration file and resolution
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    poly: Option<String>,
    limit: Option<u64>,
    cache_dir: Option<PathBuf>,
    threads: Option<usize>,
    format: Option<Format>,
    memory_budget: Option<usize>,
    #[serde(default)]
    residue: ResidueConfig,
    #[serde(default)]
    siegel: SiegelConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResidueConfig {
    /// One of "auto", "numeric", "user".
    method: Option<String>,
    user_value: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SiegelConfig {
    assume_none: Option<bool>,
    beta0: Option<f64>,
    zeta_prime: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ResidueSel {
    Auto,
    Numeric,
    User,
}

/// Flags, environment and config file merged; precedence flag > env > file.
struct Resolved {
    cache_dir: PathBuf,
    threads: Option<usize>,
    format: Format,
    timings: bool,
    poly: Option<String>,
    limit: Option<u64>,
    memory_budget: usize,
    residue_method: ResidueSel,
    residue_user_value: Option<f64>,
    policy: SiegelPolicy,
}

struct Fail {
    code: u8,
    msg: String,
}

impl Fail {
    fn usage(msg: impl Into<String>) -> Fail {
        Fail {
            code: 2,
            msg: msg.into(),
        }
    }

    fn env(msg: impl Into<String>) -> Fail {
        Fail {
            code: 3,
            msg: msg.into(),
        }
    }
}

impl From<Error> for Fail {
    fn from(err: Error) -> Fail {
        let code = match err {
            Error::MissingCache | Error::CacheMismatch(_) | Error::Io(_) | Error::CacheFormat(_) => {
                3
            }
            _ => 2,
        };
        Fail {
            code,
            msg: err.to_string(),
        }
    }
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig, Fail> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Fail::env(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Fail::usage(format!("bad config {}: {e}", path.display())))
}

fn resolve(global: &GlobalOpts, file: FileConfig) -> Result<Resolved, Fail> {
    let cache_dir = global
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os(ENV_CACHE_DIR).map(PathBuf::from))
        .or(file.cache_dir)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR));

    let threads = match (global.threads, std::env::var(ENV_THREADS).ok()) {
        (Some(t), _) => Some(t),
        (None, Some(s)) => Some(
            s.trim()
                .parse::<usize>()
                .map_err(|_| Fail::usage(format!("{ENV_THREADS}={s:?} is not a thread count")))?,
        ),
        (None, None) => file.threads,
    };
    if threads == Some(0) {
        return Err(Fail::usage("thread count must be at least 1"));
    }

    let residue_method = match file.residue.method.as_deref() {
        None | Some("auto") => ResidueSel::Auto,
        Some("numeric") => ResidueSel::Numeric,
        Some("user") => ResidueSel::User,
        Some(other) => {
            return Err(Fail::usage(format!(
                "residue.method {other:?} is not one of auto, numeric, user"
            )))
        }
    };
    if residue_method == ResidueSel::User && file.residue.user_value.is_none() {
        return Err(Fail::usage(
            "residue.method = \"user\" requires residue.user_value",
        ));
    }

    let policy = SiegelPolicy {
        assume_none: file.siegel.assume_none.unwrap_or(true),
        beta0: file.siegel.beta0,
        zeta_prime_at_beta0: file.siegel.zeta_prime,
    };

    Ok(Resolved {
        cache_dir,
        threads,
        format: global.format.or(file.format).unwrap_or(Format::Json),
        timings: global.timings,
        poly: file.poly,
        limit: file.limit,
        memory_budget: global
            .memory_budget
            .or(file.memory_budget)
            .unwrap_or(DEFAULT_MEMORY_BUDGET),
        residue_method,
        residue_user_value: file.residue.user_value,
        policy,
    })
}

impl Resolved {
    fn poly<'a>(&'a self, flag: &'a Option<String>) -> Result<&'a str, Fail> {
        flag.as_deref()
            .or(self.poly.as_deref())
            .ok_or_else(|| Fail::usage("missing --poly (or poly in the config file)"))
    }

    fn limit(&self, flag: Option<u64>, fallback: Option<u64>) -> Result<u64, Fail> {
        let limit = flag
            .or(self.limit)
            .or(fallback)
            .ok_or_else(|| Fail::usage("missing --limit (or limit in the config file)"))?;
        if limit < 1 {
            return Err(Fail::usage("limit must be at least 1"));
        }
        Ok(limit)
    }

    fn residue(
        &self,
        field: &NumberField,
        table: &IdealTable,
    ) -> bvsieve_core::Result<ResidueEstimate> {
        match self.residue_method {
            ResidueSel::Auto => constants::residue(field, table),
            ResidueSel::Numeric => constants::residue_numeric(field.degree(), table),
            ResidueSel::User => constants::residue_user(
                self.residue_user_value
                    .expect("checked when the config was resolved"),
            ),
        }
    }
}

fn init_thread_pool(threads: Option<usize>) -> Result<(), Fail> {
    let Some(t) = threads else { return Ok(()) };
    rayon::ThreadPoolBuilder::new()
        .num_threads(t)
        .build_global()
        .map_err(|e| Fail::usage(format!("cannot configure {t} threads: {e}")))
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

/// Big integer as a JSON number when it fits in i64, else a decimal string.
fn bigint_json<T>(v: &T) -> serde_json::Value
where
    for<'a> i64: TryFrom<&'a T>,
    T: std::fmt::Display,
{
    match i64::try_from(v) {
        Ok(n) => serde_json::Value::from(n),
        Err(_) => serde_json::Value::from(v.to_string()),
    }
}

fn json_line<T: serde::Serialize>(value: &T) -> Result<(), Fail> {
    let line = serde_json::to_string(value)
        .map_err(|e| Fail::env(format!("cannot serialize report: {e}")))?;
    println!("{line}");
    Ok(())
}

fn lemma_csv_header() -> &'static str {
    "lemma,field,grid_last,lhs_last,main_last,residual_last,exponent,pass"
}

fn lemma_csv_row(r: &LemmaReport) -> String {
    let last = r.grid.len().saturating_sub(1);
    let get = |v: &[f64]| v.get(last).copied().unwrap_or(f64::NAN);
    format!(
        "{},{},{},{},{},{},{},{}",
        r.lemma,
        r.field,
        r.grid.last().copied().unwrap_or(0),
        get(&r.lhs),
        get(&r.main),
        get(&r.residual),
        r.exponent.map_or(String::new(), |e| e.to_string()),
        r.pass
    )
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_field_info(cfg: &Resolved, args: &FieldArgs) -> Result<ExitCode, Fail> {
    let field = NumberField::parse(cfg.poly(&args.poly)?)?;
    match cfg.format {
        Format::Json => {
            let v = serde_json::json!({
                "poly": field.spec.coeffs,
                "label": field.label(),
                "degree": field.inv.n_k,
                "poly_disc": bigint_json(&field.inv.poly_disc),
                "d_k": bigint_json(&field.inv.d_k),
                "signature": { "r1": field.inv.r1, "r2": field.inv.r2 },
                "maximality_certified": field.inv.maximality_certified,
            });
            println!("{v}");
        }
        Format::Csv => {
            println!("label,degree,poly_disc,d_k,r1,r2,maximality_certified");
            println!(
                "{},{},{},{},{},{},{}",
                field.label(),
                field.inv.n_k,
                field.inv.poly_disc,
                field.inv.d_k,
                field.inv.r1,
                field.inv.r2,
                field.inv.maximality_certified
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Reads the cached table when present, otherwise builds it; `write` controls
/// whether a freshly built table is persisted.
fn table_for(
    cfg: &Resolved,
    field: &NumberField,
    limit: u64,
    build_if_missing: bool,
    write: bool,
) -> Result<IdealTable, Fail> {
    match cache::read_table(&cfg.cache_dir, &field.spec.coeffs, limit) {
        Ok(table) => {
            eprintln!(
                "cache hit: {}",
                cache::cache_path(&cfg.cache_dir, &field.spec.coeffs, limit).display()
            );
            Ok(table)
        }
        Err(Error::MissingCache) if build_if_missing => {
            eprintln!("cache miss: enumerating ideals up to {limit}");
            let table = enumerate_ideals(field, limit, cfg.memory_budget)?;
            if write {
                let path = cache::write_table(&cfg.cache_dir, &table)?;
                eprintln!("cache written: {}", path.display());
            }
            Ok(table)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_enumerate(cfg: &Resolved, args: &EnumerateArgs) -> Result<ExitCode, Fail> {
    let field = NumberField::parse(cfg.poly(&args.poly)?)?;
    let limit = cfg.limit(args.limit, None)?;
    let table = table_for(cfg, &field, limit, true, true)?;
    // The numeric residue estimator needs a few decades of data; report null
    // below its floor instead of failing the enumeration.
    let residue = match cfg.residue(&field, &table) {
        Ok(est) => Some(est),
        Err(err @ Error::TableTooSmall { .. }) => {
            eprintln!("residue unavailable: {err}");
            None
        }
        Err(err) => return Err(err.into()),
    };
    match cfg.format {
        Format::Json => {
            let v = serde_json::json!({
                "poly": field.spec.coeffs,
                "label": field.label(),
                "limit": limit,
                "count": table.len(),
                "residue": residue,
                "cache_file": cache::cache_file_name(&field.spec.coeffs, limit),
            });
            println!("{v}");
        }
        Format::Csv => {
            println!("label,limit,count,residue_value,residue_method,residue_error_bound");
            let (rv, rm, re) = residue.map_or((String::new(), String::new(), String::new()), |r| {
                let method = serde_json::to_value(r.method)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_owned))
                    .unwrap_or_default();
                (r.value.to_string(), method, r.error_bound.to_string())
            });
            println!("{},{},{},{},{},{}", field.label(), limit, table.len(), rv, rm, re);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sum(cfg: &Resolved, which: &SumCmd) -> Result<ExitCode, Fail> {
    let (args, kind) = match which {
        SumCmd::Bv(a) => (a, "bv"),
        SumCmd::Bilinear(a) => (a, "bilinear"),
        SumCmd::Weighted(a) => (a, "weighted"),
    };
    if args.alpha.is_some() && kind != "weighted" {
        return Err(Fail::usage("--alpha only applies to `sum weighted`"));
    }
    if kind == "weighted" && args.alpha.is_none() {
        return Err(Fail::usage("`sum weighted` requires --alpha"));
    }
    let field = NumberField::parse(cfg.poly(&args.poly)?)?;
    if !(args.x.is_finite() && args.x >= 1.0) {
        return Err(Error::ParamOrder.into());
    }
    let limit = cfg.limit(args.limit, Some(args.x.ceil() as u64))?;
    let table = table_for(cfg, &field, limit, args.build, true)?;
    let c_beta0 = constants::c_beta0(&cfg.policy)?;

    let start = Instant::now();
    let mut report = match kind {
        "bv" => sums::barban_vehov_sum(&table, args.x, args.w, args.y, c_beta0)?,
        "bilinear" => sums::bilinear_sum(&table, args.x, args.w, args.y, c_beta0)?,
        _ => {
            let alpha = args.alpha.expect("validated before the table was built");
            sums::weighted_sum(&table, args.x, args.w, args.y, alpha, c_beta0)?
        }
    };
    if cfg.timings {
        report.elapsed_ms = start.elapsed().as_millis() as u64;
    }

    match cfg.format {
        Format::Json => json_line(&report)?,
        Format::Csv => {
            println!("{}", sums::SumReport::csv_header());
            println!("{}", report.csv_row());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_grid(text: &str) -> Result<Vec<u64>, Fail> {
    let mut grid = Vec::new();
    for tok in text.split(',') {
        let tok = tok.trim();
        let v: f64 = tok
            .parse()
            .map_err(|_| Fail::usage(format!("grid entry {tok:?} is not a number")))?;
        if !(v.is_finite() && v >= 1.0 && v < 2f64.powi(63)) {
            return Err(Fail::usage(format!("grid entry {tok:?} is out of range")));
        }
        grid.push(v.trunc() as u64);
    }
    if grid.is_empty() {
        return Err(Fail::usage("grid is empty"));
    }
    Ok(grid)
}

/// Statements scanned on the long (cheap, counting-style) grid; everything
/// else defaults to the shorter per-term grid.
fn uses_long_grid(id: &str) -> bool {
    matches!(id, "3.1" | "3.12")
}

fn cmd_verify(cfg: &Resolved, args: &VerifyArgs) -> Result<ExitCode, Fail> {
    if !args.all && args.lemmas.is_empty() {
        return Err(Fail::usage("pass --all or at least one --lemma ID"));
    }
    let field = NumberField::parse(cfg.poly(&args.poly)?)?;
    let grid = args.grid.as_deref().map(parse_grid).transpose()?;
    let limit = cfg.limit(
        args.limit,
        Some(grid.as_ref().map_or(GRID_MAX_COUNTING, |g| {
            g.iter().copied().max().unwrap_or(GRID_MAX_COUNTING)
        })),
    )?;

    eprintln!("building ideal table for {} up to {limit}", field.label());
    let table = enumerate_ideals(&field, limit, cfg.memory_budget)?;
    let s_k = cfg.residue(&field, &table)?.value;
    let zeta2 = constants::zeta_k_at_2(&field, limit.clamp(100, 1_000_000))?;
    let baseline = match &args.baseline {
        Some(path) => {
            let file = std::fs::File::open(path)
                .map_err(|e| Fail::env(format!("cannot read baseline {}: {e}", path.display())))?;
            Baseline::from_reader(file)?
        }
        None => Baseline::builtin(),
    };
    let ctx = LemmaCtx::new(&field, &table, s_k, zeta2.value, cfg.policy, &baseline);

    let started = Instant::now();
    let reports = if args.all {
        ctx.verify_all(grid.as_deref())?
    } else {
        let mut out = Vec::new();
        for id in &args.lemmas {
            let g = match &grid {
                Some(g) => g.clone(),
                None => default_grid(
                    limit,
                    if uses_long_grid(id) {
                        GRID_MAX_COUNTING
                    } else {
                        GRID_MAX_DEFAULT
                    },
                ),
            };
            out.extend(ctx.verify_lemma(id, &g)?);
        }
        out
    };

    if cfg.format == Format::Csv {
        println!("{}", lemma_csv_header());
    }
    for report in &reports {
        match cfg.format {
            Format::Json => json_line(report)?,
            Format::Csv => println!("{}", lemma_csv_row(report)),
        }
    }

    let passed = reports.iter().filter(|r| r.pass).count();
    if cfg.timings {
        eprintln!(
            "{passed}/{} checks passed in {} ms",
            reports.len(),
            started.elapsed().as_millis()
        );
    } else {
        eprintln!("{passed}/{} checks passed", reports.len());
    }

    if let Some(path) = &args.write_baseline {
        let mut bands = Baseline::empty();
        for report in &reports {
            bands.record(&report.field, &report.lemma, report.band_metric_max);
        }
        let text = serde_json::to_string_pretty(&bands)
            .map_err(|e| Fail::env(format!("cannot serialize baseline: {e}")))?;
        std::fs::write(path, text + "\n")
            .map_err(|e| Fail::env(format!("cannot write baseline {}: {e}", path.display())))?;
        eprintln!("baseline written: {}", path.display());
    }

    Ok(if passed == reports.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

// ---------------------------------------------------------------------------

fn run(cli: &Cli) -> Result<ExitCode, Fail> {
    let file = load_file_config(cli.global.config.as_deref())?;
    let cfg = resolve(&cli.global, file)?;
    init_thread_pool(cfg.threads)?;
    match &cli.cmd {
        Cmd::Field(FieldCmd::Info(args)) => cmd_field_info(&cfg, args),
        Cmd::Ideals(IdealsCmd::Enumerate(args)) => cmd_enumerate(&cfg, args),
        Cmd::Sum(which) => cmd_sum(&cfg, which),
        Cmd::Verify(args) => cmd_verify(&cfg, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(fail) => {
            eprintln!("error: {}", fail.msg);
            ExitCode::from(fail.code)
        }
    }
}
