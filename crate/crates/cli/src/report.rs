use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use crate::args::Format;
use crate::CliError;

pub const TOOL: &str = "riesz";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Envelope shared by every JSON report. No timestamps, so reruns with the
/// same configuration are byte-identical.
#[derive(Debug, Serialize)]
pub struct Report<C: Serialize, T: Serialize, B: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: C,
    pub tolerances: T,
    pub result: B,
}

impl<C: Serialize, T: Serialize, B: Serialize> Report<C, T, B> {
    pub fn new(command: &'static str, config: C, tolerances: T, result: B) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command,
            config,
            tolerances,
            result,
        }
    }
}

pub struct Sink {
    pub format: Format,
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(format: Format, dir: Option<PathBuf>) -> Self {
        Self { format, dir }
    }

    fn emit(&self, command: &str, ext: &str, bytes: &[u8]) -> Result<(), CliError> {
        match &self.dir {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                fs::write(dir.join(format!("{command}.{ext}")), bytes)?;
            }
            None => std::io::stdout().lock().write_all(bytes)?,
        }
        Ok(())
    }

    pub fn json(&self, command: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.emit(command, "json", text.as_bytes())
    }

    pub fn csv<R: Serialize>(&self, command: &str, rows: &[R]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        self.emit(command, "csv", &bytes)
    }

    pub fn text(&self, command: &str, text: &str) -> Result<(), CliError> {
        self.emit(command, "txt", text.as_bytes())
    }
}
