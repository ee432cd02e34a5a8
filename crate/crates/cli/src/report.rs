use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::args::ReportFormat;

pub const SCHEMA: u32 = 1;

/// What a command produced, before formatting.
pub struct Outcome {
    pub command: &'static str,
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub params: Value,
    pub result: Value,
    /// `None` for commands without a verdict.
    pub passed: Option<bool>,
    /// Named `(N, value)` series for the CSV projection.
    pub curves: Vec<(String, Vec<(usize, f64)>)>,
    /// Printed to stderr when `passed == Some(false)`.
    pub failure_note: Option<String>,
}

impl Outcome {
    pub fn new(command: &'static str, params: &impl Serialize, result: &impl Serialize) -> Self {
        Outcome {
            command,
            seed: None,
            n: None,
            params: to_value(params),
            result: to_value(result),
            passed: None,
            curves: Vec::new(),
            failure_note: None,
        }
    }
}

pub fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: u32,
    tool: &'static str,
    tool_version: &'static str,
    command: &'a str,
    seed: Option<u64>,
    threads: usize,
    params: &'a Value,
    n: Option<usize>,
    passed: Option<bool>,
    result: &'a Value,
}

pub fn render(o: &Outcome, format: ReportFormat, threads: usize) -> String {
    match format {
        ReportFormat::Json => {
            let env = Envelope {
                schema: SCHEMA,
                tool: env!("CARGO_BIN_NAME"),
                tool_version: env!("CARGO_PKG_VERSION"),
                command: o.command,
                seed: o.seed,
                threads,
                params: &o.params,
                n: o.n,
                passed: o.passed,
                result: &o.result,
            };
            let mut s = serde_json::to_string_pretty(&env).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut s = String::from("series,n,value\n");
            for (name, points) in &o.curves {
                for (n, v) in points {
                    writeln!(s, "\"{name}\",{n},{v}").expect("write to string");
                }
            }
            s
        }
    }
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
