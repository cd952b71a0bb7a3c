//! CSV plumbing shared by the commands: `#` metadata lines ahead of a
//! mandatory header row, complex values as paired re/im columns, floats in
//! shortest round-trip form.

use crate::config::RunConfig;
use anyhow::Context;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

pub fn open_output(cfg: &RunConfig) -> anyhow::Result<Box<dyn Write>> {
    Ok(match &cfg.output.path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_meta<W: Write + ?Sized>(w: &mut W, pairs: &[(&str, String)]) -> io::Result<()> {
    for (k, v) in pairs {
        writeln!(w, "# {k}={v}")?;
    }
    Ok(())
}

/// A CSV input held in memory so errors can name the physical line.
pub struct CsvSource {
    pub path: PathBuf,
    text: String,
}

impl CsvSource {
    pub fn open(path: &Path) -> anyhow::Result<CsvSource> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(CsvSource { path: path.to_path_buf(), text })
    }

    pub fn reader(&self) -> csv::Reader<&[u8]> {
        csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(self.text.as_bytes())
    }

    /// 1-based line of the record starting at byte offset `byte`; blank
    /// lines ahead of the record are skipped.
    pub fn line_at(&self, byte: u64) -> usize {
        let bytes = self.text.as_bytes();
        let mut end = (byte as usize).min(bytes.len());
        while end < bytes.len() && (bytes[end] == b'\n' || bytes[end] == b'\r') {
            end += 1;
        }
        1 + bytes[..end].iter().filter(|b| **b == b'\n').count()
    }

    pub fn at_line(&self, byte: u64, msg: impl std::fmt::Display) -> anyhow::Error {
        anyhow::anyhow!("{}: line {}: {msg}", self.path.display(), self.line_at(byte))
    }

    pub fn error(&self, e: csv::Error) -> anyhow::Error {
        let pos = match e.kind() {
            csv::ErrorKind::Deserialize { pos: Some(p), .. } => Some(p.byte()),
            csv::ErrorKind::UnequalLengths { pos: Some(p), .. } => Some(p.byte()),
            _ => e.position().map(|p| p.byte()),
        };
        let msg = match e.kind() {
            csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
            csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
                format!("expected {expected_len} fields, found {len}")
            }
            _ => e.to_string(),
        };
        match pos {
            Some(b) => self.at_line(b, msg),
            None => anyhow::anyhow!("{}: {msg}", self.path.display()),
        }
    }
}

/// Shortest representation that parses back to the same f64.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}
