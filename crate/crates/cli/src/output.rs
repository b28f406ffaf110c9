//! Report records and where they are written.

use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::PathBuf;

use clap::ValueEnum;
use elliptic_qdet::properties::{Detail, SamplePoint};
use elliptic_qdet::{ModelParams, PropertyReport};
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamsRecord {
    #[serde(rename = "N")]
    pub n: usize,
    pub q: [f64; 2],
    pub p: [f64; 2],
    pub c: f64,
}

impl From<&ModelParams> for ParamsRecord {
    fn from(params: &ModelParams) -> Self {
        let (q, p) = (params.q(), params.p());
        ParamsRecord {
            n: params.n,
            q: [q.re, q.im],
            p: [p.re, p.im],
            c: params.central_charge,
        }
    }
}

/// The format-stable report object.
#[derive(Clone, Debug, Serialize)]
pub struct ReportRecord {
    pub check: String,
    pub params: ParamsRecord,
    pub sample_points: Vec<SamplePoint>,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// `None` unless timings were requested, so reports stay reproducible byte for byte.
    pub runtime_ms: Option<f64>,
    pub seed: u64,
    pub version: &'static str,
    pub expect_fail: bool,
    pub details: std::collections::BTreeMap<String, Detail>,
}

impl ReportRecord {
    pub fn new(report: PropertyReport, params: &ModelParams, seed: u64, timings: bool) -> Self {
        ReportRecord {
            check: report.name,
            params: params.into(),
            sample_points: report.sample_points,
            residual: report.residual,
            tolerance: report.tolerance,
            passed: report.passed,
            runtime_ms: timings.then_some(report.runtime_ms),
            seed,
            version: VERSION,
            expect_fail: report.expect_fail,
            details: report.details,
        }
    }

    pub fn is_failure(&self) -> bool {
        !self.passed && !self.expect_fail
    }
}

pub const CSV_HEADER: &str =
    "check,N,q_re,q_im,p_re,p_im,c,residual,tolerance,passed,expect_fail,runtime_ms,seed,version";

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6e}")).unwrap_or_default()
}

pub fn csv_row(r: &ReportRecord) -> String {
    format!(
        "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e},{:.16e},{},{},{},{},{}",
        r.check,
        r.params.n,
        r.params.q[0],
        r.params.q[1],
        r.params.p[0],
        r.params.p[1],
        r.params.c,
        r.residual,
        r.tolerance,
        r.passed,
        r.expect_fail,
        opt(r.runtime_ms),
        r.seed,
        r.version
    )
}

pub fn text_row(r: &ReportRecord) -> String {
    let verdict = match (r.passed, r.expect_fail) {
        (true, false) => "PASS",
        (false, false) => "FAIL",
        (false, true) => "CANARY-OK",
        (true, true) => "CANARY-MISSED",
    };
    let mut line = format!(
        "{verdict:<13} {:<34} N={} residual={:.3e} tolerance={:.1e}",
        r.check, r.params.n, r.residual, r.tolerance
    );
    if let Some(ms) = r.runtime_ms {
        line.push_str(&format!(" {ms:.1}ms"));
    }
    if let Some(Detail::Text(e)) = r.details.get("error") {
        line.push_str(&format!(" error: {e}"));
    }
    line
}

/// Standard output, or a file created fresh inside the run directory.
pub enum Sink {
    Stdout,
    Dir(PathBuf),
}

impl Sink {
    pub fn new(out: Option<PathBuf>) -> io::Result<Self> {
        match out {
            None => Ok(Sink::Stdout),
            Some(dir) => {
                fs::create_dir_all(&dir)?;
                Ok(Sink::Dir(dir))
            }
        }
    }

    /// Writes `contents` to `name`; files are never overwritten.
    pub fn write(&self, name: &str, contents: &[u8]) -> io::Result<()> {
        match self {
            Sink::Stdout => io::stdout().lock().write_all(contents),
            Sink::Dir(dir) => {
                let path = dir.join(name);
                let mut file = OpenOptions::new()
                    .write(true)
                    .create_new(true)
                    .open(&path)
                    .map_err(|e| {
                        if e.kind() == io::ErrorKind::AlreadyExists {
                            io::Error::new(
                                e.kind(),
                                format!("{} already exists; outputs are write-once", path.display()),
                            )
                        } else {
                            e
                        }
                    })?;
                file.write_all(contents)
            }
        }
    }
}
