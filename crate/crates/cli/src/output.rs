//! Output files: a `# key=value` header block followed by CSV.

use std::fmt::Display;
use std::fs;
use std::path::Path;

use crate::{CliError, CliResult};

/// Configuration record written at the top of every CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct Header(Vec<(String, String)>);

impl Header {
    pub fn new(command: &str) -> Self {
        Header(vec![
            ("version".into(), env!("CARGO_PKG_VERSION").into()),
            ("command".into(), command.into()),
        ])
    }

    pub fn with(mut self, key: &str, value: impl Display) -> Self {
        self.0.push((key.into(), value.to_string()));
        self
    }

    pub fn render(&self) -> String {
        self.0.iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
    }

    /// Pairs as a JSON object, for JSON outputs.
    pub fn to_json(&self) -> serde_json::Value {
        self.0
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect::<serde_json::Map<_, _>>()
            .into()
    }
}

/// Shortest round-trip text of `v`, in exponent form when very small or large.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

/// `0.5;0.5`: vectors inside a header value, kept free of commas.
pub fn join(v: &[f64]) -> String {
    v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(";")
}

/// CSV text from a column list and rows.
pub fn csv_text<I, R>(columns: &[&str], rows: I) -> CliResult<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let runtime = |e: csv::Error| CliError::Runtime(e.to_string());
    w.write_record(columns).map_err(runtime)?;
    for row in rows {
        w.write_record(row).map_err(runtime)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Runtime(e.to_string()))
}

pub fn write_csv(path: &Path, header: &Header, body: &str) -> CliResult<()> {
    fs::write(path, format!("{}{body}", header.render()))?;
    Ok(())
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Header pairs and data records of a file written by [`write_csv`].
pub type CsvFile = (Vec<(String, String)>, Vec<csv::StringRecord>);

pub fn read_csv(path: &Path) -> CliResult<CsvFile> {
    let text = fs::read_to_string(path)?;
    let header = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .filter_map(|l| l[1..].trim().split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let rows = reader
        .records()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    Ok((header, rows))
}

pub fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))
}
