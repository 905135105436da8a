use crate::error::CliError;
use serde_json::Value;
use std::fs::File;
use std::path::{Path, PathBuf};

/// Fifteen significant digits in scientific notation.
pub fn sig15(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.14e}")
    }
}

/// JSON number rounded to fifteen significant digits; infinities become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(sig15(x).parse::<f64>().expect("formatted float parses"))
    } else {
        Value::String(sig15(x))
    }
}

pub fn write_json(dir: &Path, name: &str, value: &Value) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

/// CSV file flushed after every row, so an interrupted run leaves a valid
/// header and complete rows only.
pub struct CsvSink {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl CsvSink {
    pub fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self, CliError> {
        let path = dir.join(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut sink = Self { path, writer: csv::Writer::from_writer(file) };
        sink.row(header.iter().map(|s| s.to_string()))?;
        Ok(sink)
    }

    pub fn row(&mut self, fields: impl IntoIterator<Item = String>) -> Result<(), CliError> {
        let fields: Vec<String> = fields.into_iter().collect();
        let io = |p: &Path, e: csv::Error| CliError::io(p, std::io::Error::other(e));
        self.writer.write_record(&fields).map_err(|e| io(&self.path, e))?;
        self.writer.flush().map_err(|e| CliError::io(&self.path, e))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}
