//! CSV files with `#` provenance comments and fixed float formatting.

use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// 17 significant digits, `.` separator; round-trips every `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// File-name fragment for a maturity.
pub fn maturity_tag(t: f64) -> String {
    format!("t{t}")
}

/// Comment block plus CSV body.
#[derive(Debug, Default)]
pub struct CsvDoc {
    pub comments: Vec<String>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl CsvDoc {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            ..Default::default()
        }
    }

    pub fn comment(&mut self, key: &str, value: impl AsRef<str>) {
        self.comments.push(format!("# {key}: {}", value.as_ref()));
    }

    /// Lines before the first data row.
    pub fn preamble_lines(&self) -> usize {
        self.comments.len() + 1
    }

    pub fn render(&self) -> CliResult<Vec<u8>> {
        let mut buf = Vec::new();
        for c in &self.comments {
            buf.extend_from_slice(c.as_bytes());
            buf.push(b'\n');
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        let fail = |e: csv::Error| CliError::numerical("csv encoding", e);
        w.write_record(&self.header).map_err(fail)?;
        for r in &self.rows {
            w.write_record(r).map_err(fail)?;
        }
        w.flush().map_err(|e| CliError::numerical("csv encoding", e))?;
        drop(w);
        Ok(buf)
    }

    pub fn write(&self, path: &Path) -> CliResult<PathBuf> {
        write_file(path, &self.render()?)
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<PathBuf> {
    std::fs::write(path, bytes).map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
    Ok(path.to_path_buf())
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::config(format!("cannot create output directory {}: {e}", dir.display())))
}
