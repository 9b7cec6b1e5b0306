//! CSV output with a provenance comment line, and tolerant CSV input.

use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// First 12 hex digits of the SHA-256 of `bytes`.
pub fn config_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

/// Write `# qdspin <version> config=<hash>`, the header row and the rows.
pub fn write_table<W: Write>(
    out: W,
    config_hash: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut out = out;
    writeln!(out, "# qdspin {VERSION} config={config_hash}").map_err(io_err("<output>"))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush().map_err(io_err("<output>"))?;
    Ok(())
}

/// A parsed CSV file: header names and numeric rows. Lines starting with `#`
/// are skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl NumericTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

pub fn read_numeric(path: &Path) -> Result<NumericTable> {
    let text = std::fs::read_to_string(path).map_err(io_err(&path.display().to_string()))?;
    parse_numeric(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_numeric(text: &str) -> Result<NumericTable> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = r
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let vals: std::result::Result<Vec<f64>, _> = rec.iter().map(|s| s.parse::<f64>()).collect();
        let vals = vals.map_err(|e| Error::Parse(format!("row {}: {e}", line + 1)))?;
        if vals.len() != header.len() {
            return Err(Error::Parse(format!(
                "row {} has {} fields, expected {}",
                line + 1,
                vals.len(),
                header.len()
            )));
        }
        rows.push(vals);
    }
    Ok(NumericTable { header, rows })
}

pub fn io_err(path: &str) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_string(),
        source,
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut buf = Vec::new();
        let rows = vec![vec!["1".to_string(), "2.5".to_string()]];
        write_table(&mut buf, "abc", &["x", "y"], &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# qdspin "));
        let t = parse_numeric(&text).unwrap();
        assert_eq!(t.header, vec!["x", "y"]);
        assert_eq!(t.column("y").unwrap(), vec![2.5]);
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(config_hash(b""), "e3b0c44298fc");
        assert_eq!(config_hash(b"a").len(), 12);
    }

    #[test]
    fn bad_rows() {
        assert!(parse_numeric("x,y\n1,zz\n").is_err());
        assert!(parse_numeric("x,y\n1\n").is_err());
    }
}
