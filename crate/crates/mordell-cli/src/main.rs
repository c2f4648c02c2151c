//! Command-line front end for the Mordell family toolkit.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or degenerate
//! input, 3 resource limits (factorization budget). Defaults are resolved
//! flag > environment (`MORDELL_PRECISION`) > config file (`--config`,
//! key=value lines) > built-in.

mod output;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use mordell::family::{
    all_pass, mutation_targets, specialize, stage_n, Family, NTable, StageName,
};
use mordell::gram::gram_regulator;
use mordell::heights::{HeightContext, Normalization, DEFAULT_PRECISION};
use mordell::rational::parse_rational;
use mordell::search::{scan, ScanRequest, SearchConfig};
use mordell::Error;

use output::{
    render, IdentityOut, OutputRecord, PointOut, RegulatorInputs, RegulatorResults, ScanInputs,
    ScanResults, ScanRowOut, ShowInputs, ShowResults, VerifyInputs, VerifyResults, SCHEMA_VERSION,
};

#[derive(Parser)]
#[command(
    name = "mordell",
    version,
    about = "Construct, verify, and measure a family of Mordell curves y² = x³ + d with three independent rational points"
)]
struct Cli {
    /// Config file with key=value defaults (precision, denom_bound,
    /// numer_bound, jobs).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every parametric identity of the family symbolically in ℚ(n).
    Verify {
        /// Emit a JSON record instead of text.
        #[arg(long)]
        json: bool,
        /// Bump one printed coefficient by one before checking (diagnostic;
        /// see the documented target list).
        #[arg(long, value_name = "ID")]
        mutate: Option<String>,
    },
    /// Print the curve and points, at a parameter value or symbolically.
    Show {
        /// Parameter value, e.g. 3 or -7/5.
        #[arg(long, value_name = "RAT")]
        n: Option<String>,
        /// Symbolic stage view (no parameter value): m, k, or n.
        #[arg(long, value_enum, value_name = "STAGE")]
        stage: Option<StageArg>,
        /// Emit a JSON record instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Heights, Gram matrix, regulator, and rank lower bound at a parameter.
    Regulator {
        /// Parameter value, e.g. 3 or -7/5.
        #[arg(long, value_name = "RAT")]
        n: String,
        /// Working precision in decimal digits.
        #[arg(long, value_name = "DIGITS")]
        precision: Option<u32>,
        /// Emit a JSON record instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Search the curves at a list of parameter values and certify ranks.
    Scan {
        /// Input file: one rational per line, '#' starts a comment.
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        /// Bound on b when sweeping x = A/b² on the integral model.
        #[arg(long, value_name = "B")]
        denom_bound: Option<u32>,
        /// Bound on |A|.
        #[arg(long, value_name = "A")]
        numer_bound: Option<i64>,
        /// Worker threads for the scan.
        #[arg(long, value_name = "J")]
        jobs: Option<usize>,
        /// Working precision in decimal digits.
        #[arg(long, value_name = "DIGITS")]
        precision: Option<u32>,
        /// Also write the rows as CSV to this path.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
        /// Also write the full JSON record to this path.
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StageArg {
    M,
    K,
    N,
}

impl From<StageArg> for StageName {
    fn from(s: StageArg) -> Self {
        match s {
            StageArg::M => StageName::M,
            StageArg::K => StageName::K,
            StageArg::N => StageName::N,
        }
    }
}

/// A failure destined for the process exit code.
struct Failure {
    code: u8,
    /// Printed to stderr when nonempty (some paths report on stdout first).
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn silent(code: u8) -> Self {
        Failure {
            code,
            message: String::new(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::FactorBudgetExceeded { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Defaults picked up from the optional config file.
#[derive(Default)]
struct FileDefaults {
    precision: Option<u32>,
    denom_bound: Option<u32>,
    numer_bound: Option<i64>,
    jobs: Option<usize>,
}

fn load_defaults(path: Option<&Path>) -> Result<FileDefaults, Failure> {
    let mut d = FileDefaults::default();
    let Some(path) = path else { return Ok(d) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Failure::usage(format!(
                "config {} line {}: expected key=value",
                path.display(),
                idx + 1
            ))
        })?;
        let value = value.trim();
        let bad = |what: &str| {
            Failure::usage(format!(
                "config {} line {}: {what} must be an integer, got {value:?}",
                path.display(),
                idx + 1
            ))
        };
        match key.trim() {
            "precision" => d.precision = Some(value.parse().map_err(|_| bad("precision"))?),
            "denom_bound" => d.denom_bound = Some(value.parse().map_err(|_| bad("denom_bound"))?),
            "numer_bound" => d.numer_bound = Some(value.parse().map_err(|_| bad("numer_bound"))?),
            "jobs" => d.jobs = Some(value.parse().map_err(|_| bad("jobs"))?),
            other => {
                return Err(Failure::usage(format!(
                    "config {} line {}: unknown key {other:?} (expected precision, denom_bound, numer_bound, or jobs)",
                    path.display(),
                    idx + 1
                )))
            }
        }
    }
    Ok(d)
}

fn resolve_precision(flag: Option<u32>, cfg: &FileDefaults) -> Result<u32, Failure> {
    if let Some(p) = flag {
        return Ok(p);
    }
    if let Ok(s) = std::env::var("MORDELL_PRECISION") {
        return s.trim().parse().map_err(|_| {
            Failure::usage(format!("MORDELL_PRECISION must be an integer, got {s:?}"))
        });
    }
    Ok(cfg.precision.unwrap_or(DEFAULT_PRECISION))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| -> Result<(), Failure> {
        let cfg = load_defaults(cli.config.as_deref())?;
        match cli.command {
            Command::Verify { json, mutate } => cmd_verify(json, mutate),
            Command::Show { n, stage, json } => cmd_show(n, stage, json),
            Command::Regulator { n, precision, json } => {
                cmd_regulator(&n, resolve_precision(precision, &cfg)?, json)
            }
            Command::Scan {
                input,
                denom_bound,
                numer_bound,
                jobs,
                precision,
                csv,
                json,
            } => cmd_scan(
                &input,
                SearchConfig {
                    denom_bound: denom_bound.or(cfg.denom_bound).unwrap_or(30),
                    numer_bound: numer_bound.or(cfg.numer_bound).unwrap_or(100_000),
                    time_budget: None,
                },
                jobs.or(cfg.jobs),
                resolve_precision(precision, &cfg)?,
                csv.as_deref(),
                json.as_deref(),
            ),
        }
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn cmd_verify(json: bool, mutate: Option<String>) -> Result<(), Failure> {
    let started = Instant::now();
    let family = match &mutate {
        Some(id) => {
            let table = NTable::mutated(id).map_err(|e| {
                Failure::usage(format!(
                    "{e}; valid targets: {}",
                    mutation_targets().join(", ")
                ))
            })?;
            Family::with_table(&table)
        }
        None => Family::new(),
    };
    let checks = family.verify();
    let ok = all_pass(&checks);
    let mut timings = BTreeMap::new();
    timings.insert("verify", started.elapsed().as_millis());
    if json {
        let record = OutputRecord {
            schema_version: SCHEMA_VERSION,
            command: "verify",
            inputs: VerifyInputs { mutate },
            results: VerifyResults {
                identities: checks
                    .iter()
                    .map(|c| IdentityOut {
                        name: c.name,
                        pass: c.pass,
                    })
                    .collect(),
                all_pass: ok,
            },
            timings,
        };
        print!("{}", render(&record));
    } else {
        for c in &checks {
            println!("{}  {}", if c.pass { "PASS" } else { "FAIL" }, c.name);
        }
        let failed = checks.iter().filter(|c| !c.pass).count();
        if ok {
            println!("{} identities checked: all hold", checks.len());
        } else {
            println!("{} identities checked: {failed} FAILED", checks.len());
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::silent(1))
    }
}

fn cmd_show(n: Option<String>, stage: Option<StageArg>, json: bool) -> Result<(), Failure> {
    match (n, stage) {
        (Some(_), Some(_)) => Err(Failure::usage(
            "--n and --stage are mutually exclusive: stages are symbolic views, \
             parameter values specialize the full family",
        )),
        (None, None) => Err(Failure::usage("pass either --n <rat> or --stage <m|k|n>")),
        (Some(n), None) => show_specialized(&n, json),
        (None, Some(stage)) => show_symbolic(stage.into(), json),
    }
}

fn show_specialized(n: &str, json: bool) -> Result<(), Failure> {
    let started = Instant::now();
    let n0 = parse_rational(n).map_err(Failure::from)?;
    let spec = match specialize(&stage_n(), &n0) {
        Ok(s) => Some(s),
        Err(Error::DegenerateParameter { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let mut timings = BTreeMap::new();
    timings.insert("specialize", started.elapsed().as_millis());
    if json {
        let results = match &spec {
            Some(s) => ShowResults::Specialization {
                n: n0.to_string(),
                degenerate: false,
                d: Some(s.d.to_string()),
                points: Some(
                    s.points
                        .iter()
                        .enumerate()
                        .map(|(i, p)| PointOut {
                            label: format!("P{}", i + 1),
                            x: p.x().expect("affine").to_string(),
                            y: p.y().expect("affine").to_string(),
                        })
                        .collect(),
                ),
                coincident_points: Some(s.flags.coincident_points),
                torsion_hits: Some(s.flags.torsion_hits),
            },
            None => ShowResults::Specialization {
                n: n0.to_string(),
                degenerate: true,
                d: None,
                points: None,
                coincident_points: None,
                torsion_hits: None,
            },
        };
        let record = OutputRecord {
            schema_version: SCHEMA_VERSION,
            command: "show",
            inputs: ShowInputs {
                n: Some(n0.to_string()),
                stage: None,
            },
            results,
            timings,
        };
        print!("{}", render(&record));
    } else {
        match &spec {
            Some(s) => {
                println!("n = {n0}");
                println!("curve: y^2 = x^3 + d");
                println!("d = {}", s.d);
                for (i, p) in s.points.iter().enumerate() {
                    println!(
                        "P{} = ({}, {})",
                        i + 1,
                        p.x().expect("affine"),
                        p.y().expect("affine")
                    );
                }
                if s.flags.coincident_points {
                    println!("note: two points share an x-coordinate at this parameter");
                }
                if s.flags.torsion_hits {
                    println!("note: a point is torsion at this parameter");
                }
            }
            None => {
                println!("n = {n0} is degenerate: a denominator of the family vanishes, no curve is defined");
            }
        }
    }
    Ok(())
}

fn show_symbolic(stage: StageName, json: bool) -> Result<(), Failure> {
    let started = Instant::now();
    let family = Family::new();
    let st = family.stage(stage);
    let var = stage.variable();
    let mut timings = BTreeMap::new();
    timings.insert("construct", started.elapsed().as_millis());
    if json {
        let record = OutputRecord {
            schema_version: SCHEMA_VERSION,
            command: "show",
            inputs: ShowInputs {
                n: None,
                stage: Some(var.to_string()),
            },
            results: ShowResults::Symbolic {
                stage: var.to_string(),
                d: st.d_display.clone(),
                points: st
                    .points
                    .iter()
                    .map(|p| PointOut {
                        label: p.label.to_string(),
                        x: p.display.0.clone(),
                        y: p.display.1.clone(),
                    })
                    .collect(),
            },
            timings,
        };
        print!("{}", render(&record));
    } else {
        println!("stage {var}: y^2 = x^3 + d({var})");
        println!("d({var}) = {}", st.d_display);
        for p in &st.points {
            println!("{}.x = {}", p.label, p.display.0);
            println!("{}.y = {}", p.label, p.display.1);
        }
    }
    Ok(())
}

fn cmd_regulator(n: &str, precision: u32, json: bool) -> Result<(), Failure> {
    let spec_started = Instant::now();
    let n0 = parse_rational(n).map_err(Failure::from)?;
    let spec = specialize(&stage_n(), &n0).map_err(Failure::from)?;
    let specialize_ms = spec_started.elapsed().as_millis();

    let heights_started = Instant::now();
    let hctx = HeightContext::new(precision).map_err(Failure::from)?;
    let report = gram_regulator(&hctx, &spec.curve, &spec.points).map_err(Failure::from)?;
    let heights_ms = heights_started.elapsed().as_millis();

    let r = hctx.real();
    let fmt = |v| r.to_default_string(v);
    let normalization = match hctx.normalization() {
        Normalization::Full => "full",
        Normalization::Halved => "halved",
    };
    let mut timings = BTreeMap::new();
    timings.insert("specialize", specialize_ms);
    timings.insert("heights", heights_ms);
    if json {
        let record = OutputRecord {
            schema_version: SCHEMA_VERSION,
            command: "regulator",
            inputs: RegulatorInputs {
                n: n0.to_string(),
                precision,
            },
            results: RegulatorResults {
                n: n0.to_string(),
                d: spec.d.to_string(),
                precision,
                normalization,
                gram_matrix: report
                    .matrix
                    .iter()
                    .map(|row| row.iter().map(fmt).collect())
                    .collect(),
                regulator: fmt(&report.regulator),
                eigenvalues: report.eigenvalues.iter().map(fmt).collect(),
                min_eigenvalue: fmt(&report.eigenvalues[0]),
                rank_lower_bound: report.rank_lower_bound,
            },
            timings,
        };
        print!("{}", render(&record));
    } else {
        println!("n = {n0}");
        println!("d = {}", spec.d);
        println!("precision = {precision} digits, normalization = {normalization}");
        println!("gram matrix:");
        for row in &report.matrix {
            let cells: Vec<String> = row.iter().map(fmt).collect();
            println!("  [ {} ]", cells.join("  "));
        }
        println!("regulator        = {}", fmt(&report.regulator));
        println!("min eigenvalue   = {}", fmt(&report.eigenvalues[0]));
        println!("rank lower bound = {}", report.rank_lower_bound);
    }
    Ok(())
}

fn cmd_scan(
    input: &Path,
    search: SearchConfig,
    jobs: Option<usize>,
    precision: u32,
    csv_path: Option<&Path>,
    json_path: Option<&Path>,
) -> Result<(), Failure> {
    let parse_started = Instant::now();
    let text = std::fs::read_to_string(input)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", input.display())))?;
    let mut n_values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v = parse_rational(line).map_err(|e| {
            Failure::usage(format!("{} line {}: {e}", input.display(), idx + 1))
        })?;
        n_values.push(v);
    }
    if n_values.is_empty() {
        return Err(Failure::usage(format!(
            "{} contains no parameter values",
            input.display()
        )));
    }
    let parse_ms = parse_started.elapsed().as_millis();

    let scan_started = Instant::now();
    let request = ScanRequest {
        n_values,
        precision,
        search: search.clone(),
    };
    let rows = match jobs {
        Some(j) if j > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Failure::usage(format!("cannot build a {j}-thread pool: {e}")))?
            .install(|| scan(&request)),
        _ => scan(&request),
    };
    let scan_ms = scan_started.elapsed().as_millis();

    let out_rows: Vec<ScanRowOut> = rows
        .iter()
        .map(|row| ScanRowOut {
            n: row.n0.to_string(),
            d: row.d.as_ref().map(|d| d.to_string()),
            rank_lower_bound: row.rank_lower_bound,
            regulator: row.regulator.clone(),
            num_points: row.num_points,
            truncated: row.truncated,
            error: row.error.clone(),
        })
        .collect();

    let write_started = Instant::now();
    if let Some(path) = csv_path {
        write_csv(path, &out_rows)?;
    }
    let mut timings = BTreeMap::new();
    timings.insert("parse", parse_ms);
    timings.insert("scan", scan_ms);
    if let Some(path) = json_path {
        timings.insert("write", write_started.elapsed().as_millis());
        let record = OutputRecord {
            schema_version: SCHEMA_VERSION,
            command: "scan",
            inputs: ScanInputs {
                input: input.display().to_string(),
                precision,
                denom_bound: search.denom_bound,
                numer_bound: search.numer_bound,
                jobs,
            },
            results: ScanResults { rows: out_rows.clone() },
            timings,
        };
        std::fs::write(path, render(&record)).map_err(|e| Failure {
            code: 3,
            message: format!("cannot write {}: {e}", path.display()),
        })?;
    }

    for row in &out_rows {
        match &row.error {
            Some(err) => println!("n = {}: error: {err}", row.n),
            None => {
                let trunc = if row.truncated { " (search truncated)" } else { "" };
                println!(
                    "n = {}: rank_lower_bound = {}, regulator = {}, points = {}{trunc}",
                    row.n,
                    row.rank_lower_bound.unwrap_or(0),
                    row.regulator.as_deref().unwrap_or("-"),
                    row.num_points.unwrap_or(0),
                );
            }
        }
    }
    let errors = out_rows.iter().filter(|r| r.error.is_some()).count();
    println!("{} rows, {errors} errors", out_rows.len());
    Ok(())
}

fn write_csv(path: &Path, rows: &[ScanRowOut]) -> Result<(), Failure> {
    let io_err = |e: csv::Error| Failure {
        code: 3,
        message: format!("cannot write {}: {e}", path.display()),
    };
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    w.write_record(["n", "d", "rank_lower_bound", "regulator", "num_points", "error"])
        .map_err(io_err)?;
    for row in rows {
        w.write_record([
            row.n.as_str(),
            row.d.as_deref().unwrap_or(""),
            &row.rank_lower_bound.map_or(String::new(), |v| v.to_string()),
            row.regulator.as_deref().unwrap_or(""),
            &row.num_points.map_or(String::new(), |v| v.to_string()),
            row.error.as_deref().unwrap_or(""),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(|e| Failure {
        code: 3,
        message: format!("cannot write {}: {e}", path.display()),
    })?;
    Ok(())
}
