//! Filesystem helpers: atomic writes, locale-independent number formatting,
//! CSV emission, output-directory resolution.

use std::fs;
use std::path::{Path, PathBuf};

use crate::errors::{CliError, Result};

/// Environment variable overriding the output directory for every command.
pub const OUT_DIR_ENV: &str = "PINNSPECT_OUT";

/// Resolve the output directory: `--out` flag beats [`OUT_DIR_ENV`] beats the
/// current directory. Creates the directory if needed.
pub fn resolve_out_dir(flag: Option<&str>) -> Result<PathBuf> {
    let dir = match flag {
        Some(d) => PathBuf::from(d),
        None => match std::env::var_os(OUT_DIR_ENV) {
            Some(d) => PathBuf::from(d),
            None => PathBuf::from("."),
        },
    };
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    Ok(dir)
}

/// Read a whole file.
pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

/// Read a whole file as UTF-8 text.
pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Atomic write: write to `<name>.tmp` in the same directory, then rename
/// over the target (same filesystem, so the rename is atomic).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp_name = path.file_name().map(|n| n.to_os_string()).ok_or_else(|| {
        CliError::Usage(format!("output path `{}` has no file name", path.display()))
    })?;
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// Locale-independent float formatting for CSV cells: shortest string that
/// round-trips through `f64::from_str`, always with an exponent (`1.5e0`,
/// `-2e-3`, `0e0`), never a locale-dependent separator.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

/// One CSV file under construction. Headers are fixed by the caller and the
/// encoding is plain UTF-8 with `\n` line endings.
pub struct Csv {
    buf: String,
}

impl Csv {
    /// Start a CSV with the given header row.
    pub fn new(header: &str) -> Self {
        let mut buf = String::new();
        buf.push_str(header);
        buf.push('\n');
        Csv { buf }
    }

    /// Start a CSV with a `# key=value …` comment line before the header.
    pub fn with_comment(comment: &str, header: &str) -> Self {
        let mut buf = String::new();
        buf.push_str("# ");
        buf.push_str(comment);
        buf.push('\n');
        buf.push_str(header);
        buf.push('\n');
        Csv { buf }
    }

    /// Start a headerless CSV (matrix emission) with a `#` comment line.
    pub fn comment_only(comment: &str) -> Self {
        let mut buf = String::new();
        buf.push_str("# ");
        buf.push_str(comment);
        buf.push('\n');
        Csv { buf }
    }

    /// Append one row of preformatted cells.
    pub fn row(&mut self, cells: &[String]) {
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    /// Write the file atomically.
    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.buf.as_bytes())
    }

    /// The accumulated text.
    #[cfg(test)]
    pub fn as_str(&self) -> &str {
        &self.buf
    }
}

/// Parse a snapshot CSV (`x,u` columns, `#` comments tolerated) into columns.
pub fn parse_xu_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = read_text(path)?;
    let mut x = Vec::new();
    let mut u = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cells = line.split(',');
        let parsed = match (cells.next(), cells.next()) {
            (Some(a), Some(b)) => a.trim().parse::<f64>().ok().zip(b.trim().parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some((a, b)) => {
                x.push(a);
                u.push(b);
            }
            // The first non-numeric row is the header; any later one is bad data.
            None if x.is_empty() => continue,
            None => {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected `x,u` numeric row, got `{line}`",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    if x.is_empty() {
        return Err(CliError::Usage(format!(
            "{}: no data rows found",
            path.display()
        )));
    }
    Ok((x, u))
}
