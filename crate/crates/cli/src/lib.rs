//! Argument handling and report emitters for the `dilates` binary.
//!
//! [`dispatch`] never touches the process: it returns the exit code and the
//! text destined for stdout and stderr, which keeps every subcommand
//! testable in-process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use dilates::bounds::{self, BoundReport};
use dilates::intset::{canonicalize, dilate_sum};
use dilates::search::{self, ProbeRow, SearchConfig, SearchResult};
use dilates::{AffineMap, DilateSpec, Error, IntSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RANGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dilates", version, about = "Exact sums of dilates of finite integer sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print |Σ m·A| and its elements.
    Sum {
        #[arg(long, value_parser = parse_csv_ints, allow_hyphen_values = true)]
        set: CsvInts,
        #[arg(long, value_parser = parse_csv_ints, allow_hyphen_values = true)]
        coeffs: CsvInts,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Run every applicable bound checker on A with odd prime k.
    Check {
        #[arg(long, value_parser = parse_csv_ints, allow_hyphen_values = true)]
        set: CsvInts,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Minimize |Σ m·A| over canonical n-subsets of [0, range].
    Search {
        #[arg(long, value_parser = parse_csv_ints, allow_hyphen_values = true)]
        coeffs: CsvInts,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        range: i64,
        #[arg(long)]
        no_prune: bool,
        #[arg(long)]
        no_reflect: bool,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Also prune leaves with the component-count lower bound.
        #[arg(long)]
        component_bound: bool,
        #[arg(long, default_value_t = search::DEFAULT_WITNESS_CAP)]
        witness_cap: usize,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Tabulate minima and deficiencies for a range of cardinalities.
    Probe {
        #[arg(long, value_parser = parse_csv_ints, allow_hyphen_values = true)]
        coeffs: CsvInts,
        #[arg(long)]
        n_from: usize,
        #[arg(long)]
        n_to: usize,
        #[arg(long)]
        range: i64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Exact |2·P + k·P| for the progression P = {0, ..., n-1}, verified.
    Ap {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[command(flatten)]
        format: FormatArgs,
    },
}

#[derive(Debug, Args)]
struct FormatArgs {
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

impl FormatArgs {
    fn format(&self) -> Format {
        match (self.json, self.csv) {
            (true, _) => Format::Json,
            (_, true) => Format::Csv,
            _ => Format::Text,
        }
    }
}

#[derive(Debug, Clone)]
struct CsvInts(Vec<i64>);

fn parse_csv_ints(s: &str) -> Result<CsvInts, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<i64>()
                .map_err(|e| format!("`{t}` is not a 64-bit integer: {e}"))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(CsvInts)
}

/// The machine-readable envelope of one invocation. Only `command`,
/// `params` and `results` are serialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport<P, R> {
    pub command: String,
    pub params: P,
    pub results: R,
    #[serde(skip)]
    pub timestamp: u64,
    #[serde(skip)]
    pub exit_status: i32,
}

impl<P, R> RunReport<P, R> {
    fn new(command: &str, params: P, results: R, exit_status: i32) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        RunReport { command: command.to_string(), params, results, timestamp, exit_status }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumParams {
    pub set: Vec<i64>,
    pub coeffs: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumResults {
    pub size: usize,
    pub elements: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckParams {
    pub set: Vec<i64>,
    pub k: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResults {
    /// The input differs from its canonical form, which some checkers used.
    pub normalized: bool,
    pub canonical_set: IntSet,
    pub affine_map: AffineMap,
    pub reports: Vec<BoundReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchParams {
    pub coeffs: Vec<i64>,
    pub n: usize,
    pub range: i64,
    pub prune: bool,
    pub reflect: bool,
    pub threads: usize,
    pub component_bound: bool,
    pub witness_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeParams {
    pub coeffs: Vec<i64>,
    pub n_from: usize,
    pub n_to: usize,
    pub range: i64,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApParams {
    pub n: usize,
    pub k: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApResults {
    pub value: i64,
    pub report: BoundReport,
}

pub type SumReport = RunReport<SumParams, SumResults>;
pub type CheckReport = RunReport<CheckParams, CheckResults>;
pub type SearchReport = RunReport<SearchParams, SearchResult>;
pub type ProbeReport = RunReport<ProbeParams, Vec<ProbeRow>>;
pub type ApReport = RunReport<ApParams, ApResults>;

/// What one invocation produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Outcome { code, stdout, stderr: String::new() }
    }

    fn error(err: &Error) -> Self {
        let code = if err.is_range_error() { EXIT_RANGE } else { EXIT_USAGE };
        Outcome { code, stdout: String::new(), stderr: format!("error: {err}\n") }
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn dispatch<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: rendered }
            } else {
                Outcome::ok(EXIT_OK, rendered)
            };
        }
    };
    match run(cli.command) {
        Ok(outcome) => outcome,
        Err(Failure::Lib(e)) => Outcome::error(&e),
        Err(Failure::Emit(msg)) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

enum Failure {
    Lib(Error),
    Emit(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Emit(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Emit(e.to_string())
    }
}

fn run(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Sum { set, coeffs, format } => run_sum(set.0, coeffs.0, format.format()),
        Command::Check { set, k, format } => run_check(set.0, k, format.format()),
        Command::Search {
            coeffs,
            n,
            range,
            no_prune,
            no_reflect,
            threads,
            component_bound,
            witness_cap,
            format,
        } => {
            let params = SearchParams {
                coeffs: coeffs.0,
                n,
                range,
                prune: !no_prune,
                reflect: !no_reflect,
                threads,
                component_bound,
                witness_cap,
            };
            run_search(params, format.format())
        }
        Command::Probe { coeffs, n_from, n_to, range, threads, format } => {
            let params = ProbeParams { coeffs: coeffs.0, n_from, n_to, range, threads };
            run_probe(params, format.format())
        }
        Command::Ap { n, k, format } => run_ap(ApParams { n, k }, format.format()),
    }
}

fn join(v: impl IntoIterator<Item = i64>, sep: &str) -> String {
    v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn csv_string<F>(write_rows: F) -> Result<String, Failure>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<(), csv::Error>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    write_rows(&mut w)?;
    let bytes = w.into_inner().map_err(|e| Failure::Emit(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Emit(e.to_string()))
}

fn run_sum(set: Vec<i64>, coeffs: Vec<i64>, format: Format) -> Result<Outcome, Failure> {
    let a = IntSet::try_from_distinct(set.clone())?;
    let spec = DilateSpec::new(coeffs.clone())?;
    let s = dilate_sum(&a, &spec)?;
    let results = SumResults { size: s.len(), elements: s.into_vec() };
    let out = match format {
        Format::Json => json(&RunReport::new("sum", SumParams { set, coeffs }, results, EXIT_OK))?,
        Format::Csv => csv_string(|w| {
            w.write_record(["size", "elements"])?;
            w.write_record([results.size.to_string(), join(results.elements.iter().copied(), " ")])
        })?,
        Format::Text => format!(
            "size {}\nelements {}\n",
            results.size,
            join(results.elements.iter().copied(), ",")
        ),
    };
    Ok(Outcome::ok(EXIT_OK, out))
}

const REPORT_COLUMNS: [&str; 8] = [
    "statement_id",
    "hypotheses_met",
    "lhs",
    "rhs",
    "slack",
    "verdict",
    "normalized",
    "context",
];

fn report_record(r: &BoundReport) -> [String; 8] {
    [
        r.statement_id.to_string(),
        r.hypotheses_met.to_string(),
        r.lhs.to_string(),
        r.rhs.to_string(),
        r.slack.to_string(),
        r.verdict.to_string(),
        r.normalized.to_string(),
        r.context.clone(),
    ]
}

fn run_check(set: Vec<i64>, k: i64, format: Format) -> Result<Outcome, Failure> {
    let a = IntSet::try_from_distinct(set.clone())?;
    let reports = bounds::check_suite(&a, k)?;
    let (canonical_set, affine_map) = canonicalize(&a)?;
    let code = if reports.iter().any(BoundReport::fails) { EXIT_FAILED_CHECK } else { EXIT_OK };
    let results = CheckResults {
        normalized: canonical_set != a,
        canonical_set,
        affine_map,
        reports,
    };
    let out = match format {
        Format::Json => json(&RunReport::new("check", CheckParams { set, k }, results, code))?,
        Format::Csv => csv_string(|w| {
            w.write_record(REPORT_COLUMNS)?;
            for r in &results.reports {
                w.write_record(report_record(r))?;
            }
            Ok(())
        })?,
        Format::Text => {
            let mut s = String::new();
            if results.normalized {
                let _ = writeln!(
                    s,
                    "normalized: checkers needing 0 in A and gcd 1 use {} (shift {}, scale {})",
                    results.canonical_set, results.affine_map.shift, results.affine_map.scale
                );
            }
            for r in &results.reports {
                let _ = write!(
                    s,
                    "{:<22} {:<15} lhs {:>8} rhs {:>8} slack {:>8}",
                    r.statement_id.as_str(),
                    r.verdict.as_str(),
                    r.lhs,
                    r.rhs,
                    r.slack
                );
                if !r.hypotheses_met {
                    let _ = write!(s, "  unmet: {}", r.failed_hypotheses().join("; "));
                } else if !r.context.is_empty() {
                    let _ = write!(s, "  ({})", r.context);
                }
                s.push('\n');
            }
            s
        }
    };
    Ok(Outcome::ok(code, out))
}

fn run_search(params: SearchParams, format: Format) -> Result<Outcome, Failure> {
    let spec = DilateSpec::new(params.coeffs.clone())?;
    let mut config = SearchConfig::new(spec, params.n, params.range);
    config.pruning = params.prune;
    config.reflection_quotient = params.reflect;
    config.parallel_width = params.threads;
    config.component_pruning = params.component_bound;
    config.witness_cap = params.witness_cap;
    let result = search::min_dilate_sum(&config)?;
    let out = match format {
        Format::Json => json(&RunReport::new("search", params, result, EXIT_OK))?,
        Format::Csv => csv_string(|w| {
            w.write_record([
                "minimum",
                "witness_count",
                "nodes_visited",
                "nodes_pruned",
                "range_max",
                "touches_range",
                "witness",
            ])?;
            for wit in &result.witnesses {
                w.write_record([
                    result.minimum.to_string(),
                    result.witness_count.to_string(),
                    result.nodes_visited.to_string(),
                    result.nodes_pruned.to_string(),
                    result.range_max.to_string(),
                    result.touches_range.to_string(),
                    join(wit.iter(), " "),
                ])?;
            }
            Ok(())
        })?,
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "minimum {}", result.minimum);
            let _ = writeln!(
                s,
                "witnesses {} (showing {})",
                result.witness_count,
                result.witnesses.len()
            );
            for w in &result.witnesses {
                let _ = writeln!(s, "  {w}");
            }
            let _ = writeln!(
                s,
                "nodes visited {}, pruned {}",
                result.nodes_visited, result.nodes_pruned
            );
            if result.touches_range {
                let _ = writeln!(range_caveat(&mut s), "{}", result.range_max);
            }
            s
        }
    };
    Ok(Outcome::ok(EXIT_OK, out))
}

fn range_caveat(s: &mut String) -> &mut String {
    s.push_str("note: a witness reaches the range limit; this is the minimum over [0, R] only, R = ");
    s
}

const PROBE_COLUMNS: [&str; 7] = [
    "n",
    "minimum",
    "deficiency",
    "witness",
    "witness_count",
    "ap_extremal",
    "touches_range",
];

fn run_probe(params: ProbeParams, format: Format) -> Result<Outcome, Failure> {
    let spec = DilateSpec::new(params.coeffs.clone())?;
    let rows = search::conjecture_probe(&spec, params.n_from, params.n_to, params.range, params.threads)?;
    let out = match format {
        Format::Json => json(&RunReport::new("probe", params, rows, EXIT_OK))?,
        Format::Csv => csv_string(|w| {
            w.write_record(PROBE_COLUMNS)?;
            for r in &rows {
                w.write_record([
                    r.n.to_string(),
                    r.minimum.to_string(),
                    r.deficiency.to_string(),
                    join(r.witness.iter(), " "),
                    r.witness_count.to_string(),
                    r.ap_extremal.to_string(),
                    r.touches_range.to_string(),
                ])?;
            }
            Ok(())
        })?,
        Format::Text => {
            let mut s = format!(
                "{:>4} {:>8} {:>10} {:>8} {:>11}  witness\n",
                "n", "minimum", "deficiency", "count", "ap_extremal"
            );
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:>4} {:>8} {:>10} {:>8} {:>11}  {}{}",
                    r.n,
                    r.minimum,
                    r.deficiency,
                    r.witness_count,
                    r.ap_extremal,
                    r.witness,
                    if r.touches_range { "  (reaches R)" } else { "" }
                );
            }
            if rows.iter().any(|r| r.touches_range) {
                let _ = writeln!(range_caveat(&mut s), "{}", params.range);
            }
            s
        }
    };
    Ok(Outcome::ok(EXIT_OK, out))
}

fn run_ap(params: ApParams, format: Format) -> Result<Outcome, Failure> {
    let value = bounds::ap_exact_size(params.n, params.k)?;
    let report = bounds::verify_ap_exact(params.n, params.k)?;
    let code = if report.fails() { EXIT_FAILED_CHECK } else { EXIT_OK };
    let out = match format {
        Format::Csv => csv_string(|w| {
            w.write_record(["n", "k", "value", "recomputed", "verdict"])?;
            w.write_record([
                params.n.to_string(),
                params.k.to_string(),
                value.to_string(),
                report.lhs.to_string(),
                report.verdict.to_string(),
            ])
        })?,
        Format::Json => json(&RunReport::new("ap", params, ApResults { value, report }, code))?,
        Format::Text => format!(
            "(k+2)n - 2k = {value}\nrecomputed |2·P + k·P| = {}\nverdict {}\n",
            report.lhs, report.verdict
        ),
    };
    Ok(Outcome::ok(code, out))
}
