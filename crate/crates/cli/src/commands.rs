use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use elliptic_qdet::properties::{check_p_to_zero, resample, Detail, Tolerances, DEFAULT_P_SEQUENCE};
use elliptic_qdet::qdet::{self, QdetResult};
use elliptic_qdet::{build_r, Error, LogComplex, ModelParams, RKind, Sampler, SuiteConfig};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::literal::{parse_complex, parse_grid, parse_tolerance, ComplexArg};
use crate::output::{csv_row, text_row, Format, ParamsRecord, ReportRecord, Sink, CSV_HEADER, VERSION};

/// Failure that ends the run with a specific exit status.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Pole { .. } | Error::Truncation { .. } | Error::Convergence(_) | Error::Singular { .. } => {
                EXIT_NUMERICAL
            }
            _ => EXIT_CONFIG,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::config(format!("output: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::config(format!("serialization: {e}"))
    }
}

/// Options shared by every subcommand.
#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Rank N of gl_N.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Quantum parameter as a+bi, or "random".
    #[arg(long, default_value = "random", value_parser = parse_complex, allow_hyphen_values = true)]
    pub q: ComplexArg,
    /// Elliptic nome as a+bi, or "random".
    #[arg(long, default_value = "random", value_parser = parse_complex, allow_hyphen_values = true)]
    pub p: ComplexArg,
    /// Spectral argument; random generic points when omitted.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: Option<ComplexArg>,
    /// Second spectral argument for two-point checks.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub w: Option<ComplexArg>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance override name=value; a family prefix such as "ybe" covers every kind.
    #[arg(long = "tol", value_parser = parse_tolerance)]
    pub tol: Vec<(String, f64)>,
    /// Run directory; files inside it are created once and never overwritten.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Number of random spectral points per check.
    #[arg(long)]
    pub points: Option<usize>,
    /// Record wall-clock runtimes (reports are then no longer byte-reproducible).
    #[arg(long)]
    pub timings: bool,
}

/// Parameters and spectral arguments after resolving "random" from the seed.
pub struct Resolved {
    pub params: ModelParams,
    pub sampler: Sampler,
    pub z: Option<LogComplex>,
    pub w: Option<LogComplex>,
    pub tolerances: Tolerances,
}

fn to_log(arg: Option<ComplexArg>) -> Result<Option<LogComplex>, CliError> {
    match arg.and_then(ComplexArg::value) {
        Some(z) => Ok(Some(LogComplex::from_value(z)?)),
        None => Ok(None),
    }
}

impl Common {
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let mut sampler = Sampler::new(self.seed);
        let params = match (self.q.value(), self.p.value()) {
            (None, None) => sampler.params(self.n)?,
            (q, p) => {
                let log_q = match q {
                    Some(q) => LogComplex::from_value(q)?,
                    None => sampler.q(),
                };
                let log_p = match p {
                    Some(p) => LogComplex::from_value(p)?,
                    None => sampler.p(),
                };
                ModelParams::new(self.n, log_q, log_p)?
            }
        };
        for warning in params.genericity_warnings() {
            eprintln!("warning: {warning}");
        }
        let mut tolerances = Tolerances::default();
        for (name, value) in &self.tol {
            tolerances = tolerances.with_override(name, *value)?;
        }
        Ok(Resolved {
            params,
            sampler,
            z: to_log(self.z)?,
            w: to_log(self.w)?,
            tolerances,
        })
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

/// Everything needed to reproduce a run, embedded in JSON outputs.
#[derive(Serialize)]
struct RunRecord<'a> {
    command: &'a str,
    params: ParamsRecord,
    log_q: [f64; 2],
    log_p: [f64; 2],
    z: Option<[f64; 2]>,
    w: Option<[f64; 2]>,
    seed: u64,
    points: usize,
    tolerance_overrides: BTreeMap<String, f64>,
    version: &'static str,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl<'a> RunRecord<'a> {
    fn new(command: &'a str, common: &Common, resolved: &Resolved, points: usize) -> Self {
        RunRecord {
            command,
            params: (&resolved.params).into(),
            log_q: pair(resolved.params.log_q.log()),
            log_p: pair(resolved.params.log_p.log()),
            z: resolved.z.map(|z| pair(z.value())),
            w: resolved.w.map(|w| pair(w.value())),
            seed: common.seed,
            points,
            tolerance_overrides: common.tol.iter().cloned().collect(),
            version: VERSION,
        }
    }
}

#[derive(Serialize)]
struct Summary {
    checks: usize,
    passed: usize,
    failed: usize,
    canaries: usize,
    canaries_failed_as_expected: usize,
}

impl Summary {
    fn of(records: &[ReportRecord]) -> Self {
        let canaries: Vec<_> = records.iter().filter(|r| r.expect_fail).collect();
        Summary {
            checks: records.len() - canaries.len(),
            passed: records.iter().filter(|r| r.passed && !r.expect_fail).count(),
            failed: records.iter().filter(|r| r.is_failure()).count(),
            canaries: canaries.len(),
            canaries_failed_as_expected: canaries.iter().filter(|r| !r.passed).count(),
        }
    }

    fn line(&self) -> String {
        format!(
            "{} of {} checks passed; {} of {} canaries failed as expected\n",
            self.passed, self.checks, self.canaries_failed_as_expected, self.canaries
        )
    }
}

fn exit_status(records: &[ReportRecord]) -> u8 {
    if records.iter().any(ReportRecord::is_failure) {
        EXIT_CHECK_FAILED
    } else {
        0
    }
}

fn render_reports(
    format: Format,
    run: &RunRecord,
    records: &[ReportRecord],
    extra: Option<(&str, serde_json::Value)>,
) -> Result<String, CliError> {
    let summary = Summary::of(records);
    Ok(match format {
        Format::Json => {
            let mut doc = serde_json::json!({
                "run": run,
                "reports": records,
                "summary": summary,
            });
            if let Some((key, value)) = extra {
                doc[key] = value;
            }
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Format::Csv => {
            let mut out = format!("{CSV_HEADER}\n");
            for r in records {
                out.push_str(&csv_row(r));
                out.push('\n');
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for r in records {
                out.push_str(&text_row(r));
                out.push('\n');
            }
            out.push_str(&summary.line());
            out
        }
    })
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Restrict to the named checks; all applicable checks by default.
    #[arg(long = "check")]
    pub checks: Vec<String>,
}

pub fn verify(args: &VerifyArgs) -> Result<u8, CliError> {
    let common = &args.common;
    let resolved = common.resolve()?;
    let mut config = SuiteConfig::new(resolved.params.clone(), common.seed);
    config.points = common.points.unwrap_or(10);
    config.tolerances = resolved.tolerances.clone();
    config.z = resolved.z;
    config.w = resolved.w;

    let available = config.check_names();
    let names: Vec<String> = if args.checks.is_empty() {
        available
    } else {
        for name in &args.checks {
            if !available.contains(name) {
                return Err(CliError::config(format!(
                    "check '{name}' does not apply at N={}; available: {}",
                    config.params.n,
                    available.join(", ")
                )));
            }
        }
        args.checks.clone()
    };

    // Checks are independent and seeded by name, so parallel dispatch keeps reports reproducible.
    let records: Vec<ReportRecord> = names
        .par_iter()
        .map(|name| ReportRecord::new(config.run_check(name), &config.params, common.seed, common.timings))
        .collect();

    let format = common.format(Format::Json);
    let run = RunRecord::new("verify", common, &resolved, config.points);
    let body = render_reports(format, &run, &records, None)?;
    Sink::new(common.out.clone())?.write(&format!("verify.{}", format.extension()), body.as_bytes())?;
    Ok(exit_status(&records))
}

#[derive(Args, Debug)]
pub struct MatrixArgs {
    #[command(flatten)]
    pub common: Common,
    /// R-matrix family: elliptic, elliptic-hat, eightvertex, homogeneous, principal, nonelliptic.
    #[arg(long)]
    pub kind: String,
}

fn sci(z: Complex64) -> String {
    format!("{:.16e} {:+.16e}i", z.re, z.im)
}

pub fn matrix(args: &MatrixArgs) -> Result<u8, CliError> {
    let common = &args.common;
    let kind: RKind = args.kind.parse()?;
    let mut resolved = common.resolve()?;
    let params = &resolved.params;
    if !kind.supports(params.n) {
        return Err(CliError::config(format!("{kind} is defined for N = 2 only")));
    }
    let z = match resolved.z {
        Some(z) => z,
        None => resolved.sampler.generic_z(params, &[kind])?,
    };
    let r = build_r(params, kind, z)?;

    let policy = &params.policy;
    let header: Vec<(String, String)> = vec![
        ("kind".into(), kind.to_string()),
        ("N".into(), params.n.to_string()),
        ("q".into(), sci(params.q())),
        ("p".into(), sci(params.p())),
        ("z".into(), sci(z.value())),
        ("log z".into(), sci(z.log())),
        (
            "truncation".into(),
            format!("abs_floor={:e} max_terms={}", policy.abs_floor, policy.max_terms),
        ),
        ("seed".into(), common.seed.to_string()),
        ("version".into(), VERSION.into()),
    ];
    let (name, body) = match common.format(Format::Text) {
        Format::Json => {
            let header: BTreeMap<_, _> = header.into_iter().collect();
            let doc = serde_json::json!({ "header": header, "matrix": r });
            (
                format!("matrix_{kind}.json"),
                serde_json::to_string_pretty(&doc)? + "\n",
            )
        }
        Format::Csv | Format::Text => {
            let mut buf = Vec::new();
            r.write_dump(&mut buf, &header)?;
            (
                format!("matrix_{kind}.dat"),
                String::from_utf8(buf).expect("dump is ASCII"),
            )
        }
    };
    Sink::new(common.out.clone())?.write(&name, body.as_bytes())?;
    Ok(0)
}

#[derive(Serialize)]
struct QdetRecord {
    z: [f64; 2],
    log_z: [f64; 2],
    m_k: Vec<[f64; 2]>,
    deviations: BTreeMap<String, f64>,
    tolerance: f64,
    passed: bool,
    m_matrix: elliptic_qdet::TensorOperator,
}

impl QdetRecord {
    fn new(result: QdetResult, tolerance: f64) -> Self {
        let d = &result.deviations;
        let passed = [
            "product_vs_identity",
            "closed_form_vs_one",
            "k_spread",
            "sum_vs_product",
        ]
        .iter()
        .all(|k| d.get(*k).is_some_and(|v| *v <= tolerance));
        QdetRecord {
            z: pair(result.z_point.value()),
            log_z: pair(result.z_point.log()),
            m_k: result.m_k_values.iter().map(|m| pair(*m)).collect(),
            deviations: result.deviations,
            tolerance,
            passed,
            m_matrix: result.m_matrix,
        }
    }
}

pub fn qdet(common: &Common) -> Result<u8, CliError> {
    let mut resolved = common.resolve()?;
    let params = resolved.params.clone();
    if params.n > qdet::QDET_PRODUCT_MAX_N {
        return Err(CliError::config(format!(
            "the operator product is dense on (C^N)^(N+1) and capped at N = {}",
            qdet::QDET_PRODUCT_MAX_N
        )));
    }
    let count = common.points.unwrap_or(5).max(1);
    let tolerance = resolved.tolerances.get("qdet_product", params.n).unwrap_or(1e-8);
    let kinds = [RKind::EllipticR, RKind::EllipticRhat];
    let mut records = Vec::with_capacity(count);
    for i in 0..count {
        let result = match resolved.z {
            Some(z) if i == 0 => qdet::evaluate(&params, z)?,
            _ => resample(&mut resolved.sampler, |s| {
                let z = s.generic_z(&params, &kinds)?;
                qdet::evaluate(&params, z)
            })?,
        };
        records.push(QdetRecord::new(result, tolerance));
    }

    let format = common.format(Format::Json);
    let body = match format {
        Format::Json => {
            let doc = serde_json::json!({
                "run": RunRecord::new("qdet", common, &resolved, count),
                "results": records,
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Format::Csv | Format::Text => {
            let keys: Vec<&String> = records[0].deviations.keys().collect();
            let sep = if format == Format::Csv { "," } else { " " };
            let mut out = String::new();
            let mut head = vec!["z_re".to_string(), "z_im".to_string()];
            head.extend(keys.iter().map(|k| k.to_string()));
            head.push("passed".into());
            writeln!(out, "{}", head.join(sep)).expect("string write");
            for r in &records {
                let mut row = vec![format!("{:.16e}", r.z[0]), format!("{:.16e}", r.z[1])];
                row.extend(keys.iter().map(|k| format!("{:.3e}", r.deviations[*k])));
                row.push(r.passed.to_string());
                writeln!(out, "{}", row.join(sep)).expect("string write");
            }
            out
        }
    };
    Sink::new(common.out.clone())?.write(&format!("qdet.{}", format.extension()), body.as_bytes())?;
    Ok(if records.iter().all(|r| r.passed) {
        0
    } else {
        EXIT_CHECK_FAILED
    })
}

#[derive(Args, Debug)]
pub struct LimitsArgs {
    #[command(flatten)]
    pub common: Common,
    /// Decreasing nomes, comma separated.
    #[arg(long = "p-seq", value_delimiter = ',')]
    pub p_seq: Vec<f64>,
}

fn series(report: &ReportRecord, key: &str) -> Vec<f64> {
    match report.details.get(key) {
        Some(Detail::Series(v)) => v.clone(),
        _ => Vec::new(),
    }
}

pub fn limits(args: &LimitsArgs) -> Result<u8, CliError> {
    let common = &args.common;
    let mut resolved = common.resolve()?;
    let params = resolved.params.clone();
    let p_seq = if args.p_seq.is_empty() {
        DEFAULT_P_SEQUENCE.to_vec()
    } else {
        args.p_seq.clone()
    };
    let z = match resolved.z {
        Some(z) => z,
        None => resolved
            .sampler
            .generic_z(&params, &[RKind::NonElliptic, RKind::EllipticRhat])?,
    };
    let tolerance = resolved.tolerances.get("p_to_zero", params.n);
    let report = check_p_to_zero(&params, z, &p_seq, tolerance)?;
    let record = ReportRecord::new(report, &params, common.seed, common.timings);
    let residuals = series(&record, "residuals");
    let table: Vec<[f64; 2]> = p_seq.iter().zip(&residuals).map(|(p, r)| [*p, *r]).collect();

    let format = common.format(Format::Json);
    let body = match format {
        Format::Json => {
            let run = RunRecord::new("limits", common, &resolved, 1);
            render_reports(
                format,
                &run,
                std::slice::from_ref(&record),
                Some(("table", serde_json::json!(table))),
            )?
        }
        Format::Csv | Format::Text => {
            let sep = if format == Format::Csv { "," } else { " " };
            let mut out = format!("p{sep}residual\n");
            for [p, r] in &table {
                writeln!(out, "{p:.3e}{sep}{r:.16e}").expect("string write");
            }
            if format == Format::Text {
                out.push_str(&text_row(&record));
                out.push('\n');
            }
            out
        }
    };
    Sink::new(common.out.clone())?.write(&format!("limits.{}", format.extension()), body.as_bytes())?;
    Ok(exit_status(std::slice::from_ref(&record)))
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: Common,
    /// Grid of |q| by |p| values spanning the sampling annuli.
    #[arg(long, default_value = "4x4", value_parser = parse_grid)]
    pub grid: (usize, usize),
    /// Check re-run at every grid point.
    #[arg(long = "check", default_value = "qdet_closed_form")]
    pub check: String,
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![(lo + hi) / 2.0];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

pub fn scan(args: &ScanArgs) -> Result<u8, CliError> {
    let common = &args.common;
    let resolved = common.resolve()?;
    let base = &resolved.params;
    let (q_phase, p_phase) = (base.log_q.log().im, base.log_p.log().im);
    let mut grid = Vec::new();
    for q in linspace(0.3, 0.8, args.grid.0) {
        for p in linspace(0.05, 0.5, args.grid.1) {
            let mut params = base.clone();
            params.log_q = LogComplex::from_parts(q.ln(), q_phase);
            params.log_p = LogComplex::from_parts(p.ln(), p_phase);
            params.validate()?;
            for warning in params.genericity_warnings() {
                eprintln!("warning: at |q|={q:.3}, |p|={p:.3}: {warning}");
            }
            grid.push(params);
        }
    }
    let points = common.points.unwrap_or(3);
    let configs: Vec<SuiteConfig> = grid
        .into_iter()
        .map(|params| {
            let mut config = SuiteConfig::new(params, common.seed);
            config.points = points;
            config.tolerances = resolved.tolerances.clone();
            config.z = resolved.z;
            config.w = resolved.w;
            config
        })
        .collect();
    if !configs[0].check_names().contains(&args.check) {
        return Err(CliError::config(format!(
            "check '{}' does not apply at N={}",
            args.check, base.n
        )));
    }
    let records: Vec<ReportRecord> = configs
        .par_iter()
        .map(|c| ReportRecord::new(c.run_check(&args.check), &c.params, common.seed, common.timings))
        .collect();

    let format = common.format(Format::Json);
    let run = RunRecord::new("scan", common, &resolved, points);
    let body = render_reports(format, &run, &records, None)?;
    Sink::new(common.out.clone())?.write(&format!("scan.{}", format.extension()), body.as_bytes())?;
    Ok(exit_status(&records))
}
