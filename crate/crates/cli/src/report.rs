use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};
use crate::CliError;

/// Tabular evidence for CSV output.
#[derive(Debug, Default)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Self {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.rows.push(row.into_iter().map(|s| s.to_string()).collect());
    }
}

pub struct Report {
    pub command: &'static str,
    pub pass: bool,
    pub result: Value,
    pub table: Table,
    pub summary: Vec<String>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    version: &'static str,
    command: &'static str,
    config: &'a RunConfig,
    pass: bool,
    result: &'a Value,
}

/// Joins a vector as `a;b;c` for a CSV cell.
pub fn cell(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

impl Report {
    fn render(&self, config: &RunConfig, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Json => {
                let env = Envelope {
                    version: hypcompact_core::VERSION,
                    command: self.command,
                    config,
                    pass: self.pass,
                    result: &self.result,
                };
                let mut out = serde_json::to_vec_pretty(&env).map_err(CliError::failure)?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.table.headers).map_err(CliError::failure)?;
                for row in &self.table.rows {
                    w.write_record(row).map_err(CliError::failure)?;
                }
                w.into_inner().map_err(CliError::failure)
            }
            Format::Text => {
                let mut out = String::new();
                for line in &self.summary {
                    out.push_str(line);
                    out.push('\n');
                }
                Ok(out.into_bytes())
            }
        }
    }

    /// Writes to `--out` when given, otherwise to stdout.
    pub fn emit(&self, config: &RunConfig, format: Format) -> Result<(), CliError> {
        let bytes = self.render(config, format)?;
        match &config.output {
            Some(path) => std::fs::write(path, bytes)
                .map_err(|e| CliError::Failure(format!("{}: {e}", path.display()))),
            None => std::io::stdout()
                .write_all(&bytes)
                .map_err(CliError::failure),
        }
    }
}
