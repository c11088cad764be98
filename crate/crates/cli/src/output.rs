use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use flexinfo_core::io::to_canonical;
use serde_json::Value;

use crate::CliError;

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| CliError::Input(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let fail = |e: std::io::Error| CliError::Numeric(format!("writing {}: {e}", path.display()));
    let mut f = fs::File::create(&tmp).map_err(fail)?;
    f.write_all(bytes).map_err(fail)?;
    f.sync_all().map_err(fail)?;
    drop(f);
    fs::rename(&tmp, path).map_err(fail)
}

/// Files written by one command, in write order.
#[derive(Debug, Default)]
pub struct Written(pub Vec<PathBuf>);

impl Written {
    pub fn json(&mut self, dir: &Path, name: &str, v: &Value) -> Result<(), CliError> {
        self.bytes(dir, name, to_canonical(v).as_bytes())
    }

    pub fn text(&mut self, dir: &Path, name: &str, s: &str) -> Result<(), CliError> {
        self.bytes(dir, name, s.as_bytes())
    }

    pub fn csv(&mut self, dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        self.bytes(dir, name, &csv_bytes(header, rows)?)
    }

    fn bytes(&mut self, dir: &Path, name: &str, b: &[u8]) -> Result<(), CliError> {
        let p = dir.join(name);
        write_atomic(&p, b)?;
        self.0.push(p);
        Ok(())
    }
}

pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Numeric(format!("csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    w.into_inner().map_err(|e| CliError::Numeric(format!("csv: {e}")))
}

/// Float text at 12 significant digits, matching the JSON reports.
pub fn fmt_num(x: f64) -> String {
    flexinfo_core::scalar::round_sig(x).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn csv_has_header() {
        let b = csv_bytes(&["x", "v"], &[vec!["0".into(), "1".into()]]).unwrap();
        assert_eq!(String::from_utf8(b).unwrap(), "x,v\n0,1\n");
    }
}
