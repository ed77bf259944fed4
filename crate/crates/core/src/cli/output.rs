use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "RADIAL_SHOOTING_OUT";
pub const DEFAULT_OUT: &str = "runs";

/// Version stamped into every CSV header comment.
pub const CSV_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

/// Provenance of one invocation, written as `run.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub config_hash: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub artifacts: Vec<String>,
    pub verdicts: VerdictCounts,
    pub exit_code: i32,
}

pub fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// `<root>/<command>-<hash prefix>`, created on first write.
#[derive(Debug)]
pub struct RunDir {
    pub path: PathBuf,
    pub command: String,
    pub hash: String,
    started: f64,
    artifacts: Vec<String>,
}

impl RunDir {
    pub fn new(root: &Path, command: &str, config: &ExperimentConfig) -> Self {
        let hash = config.hash();
        let path = root.join(format!("{command}-{}", &hash[..16]));
        RunDir { path, command: command.to_string(), hash, started: unix_now(), artifacts: Vec::new() }
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.path.join(name)
    }

    fn ensure(&self) -> Result<()> {
        fs::create_dir_all(&self.path).map_err(|e| Error::io(&self.path, e))
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<PathBuf> {
        self.ensure()?;
        let path = self.file(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.record(name);
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn record(&mut self, name: &str) {
        if !self.artifacts.iter().any(|a| a == name) {
            self.artifacts.push(name.to_string());
        }
    }

    pub fn finish(mut self, config: &ExperimentConfig, verdicts: VerdictCounts, exit_code: i32) -> Result<RunRecord> {
        self.write("config.toml", config.to_toml().as_bytes())?;
        let mut artifacts = self.artifacts.clone();
        artifacts.push("run.json".into());
        let record = RunRecord {
            command: self.command.clone(),
            config_hash: self.hash.clone(),
            started_unix: self.started,
            finished_unix: unix_now(),
            artifacts,
            verdicts,
            exit_code,
        };
        self.write_json("run.json", &record)?;
        Ok(record)
    }
}

/// CSV text: a version line, `key=value` metadata lines, a header, then rows.
pub struct CsvTable {
    kind: &'static str,
    meta: Vec<(String, String)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(kind: &'static str, columns: &[&'static str]) -> Self {
        CsvTable { kind, meta: Vec::new(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn preamble(&self) -> String {
        let mut out = format!("# radial-shooting {} csv v{CSV_VERSION}\n", self.kind);
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out
    }

    pub fn render(&self) -> Result<Vec<u8>> {
        let mut buf = self.preamble().into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.columns).map_err(csv_err)?;
            for r in &self.rows {
                w.write_record(r).map_err(csv_err)?;
            }
            w.flush().map_err(|e| Error::io("csv buffer", e))?;
        }
        Ok(buf)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidInput(format!("csv: {e}"))
}

/// Shortest round-trip form; exponent notation outside `[1e-5, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e15).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Reads the data rows of a CSV written by [`CsvTable`], skipping `#` lines.
pub fn read_rows(path: &Path) -> Result<Vec<csv::StringRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(false)
        .from_path(path)
        .map_err(csv_err)?;
    rdr.records().collect::<std::result::Result<Vec<_>, _>>().map_err(csv_err)
}

/// Append-only CSV used while a sweep is running; rows arrive in completion order.
pub struct PartialWriter {
    file: fs::File,
    path: PathBuf,
}

impl PartialWriter {
    pub fn open(path: &Path, header: &str) -> Result<Self> {
        let exists = path.exists();
        let mut file = fs::OpenOptions::new().create(true).append(true).open(path).map_err(|e| Error::io(path, e))?;
        if !exists {
            file.write_all(header.as_bytes()).map_err(|e| Error::io(path, e))?;
        }
        Ok(PartialWriter { file, path: path.to_path_buf() })
    }

    pub fn append(&mut self, row: &[String]) -> Result<()> {
        let mut buf = Vec::new();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(row).map_err(csv_err)?;
        }
        self.file.write_all(&buf).and_then(|_| self.file.flush()).map_err(|e| Error::io(&self.path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_renders_preamble_and_rows() {
        let mut t = CsvTable::new("demo", &["a", "b"]).meta("profile", "euclidean");
        t.push(vec![num(1.0), num(0.1)]);
        let text = String::from_utf8(t.render().unwrap()).unwrap();
        assert_eq!(text, "# radial-shooting demo csv v1\n# profile=euclidean\na,b\n1,0.1\n");
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, -0.0, 1.0, 0.1, 1e-300, -2.5e200, 123456.789, 1e-5, 9.99e14, f64::INFINITY] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(num(1e-7), "1e-7");
        assert_eq!(num(0.25), "0.25");
    }

    #[test]
    fn rows_read_back_without_comments() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = CsvTable::new("demo", &["a", "b"]);
        t.push(vec!["1".into(), "x".into()]);
        t.push(vec!["2".into(), "".into()]);
        let path = dir.path().join("t.csv");
        fs::write(&path, t.render().unwrap()).unwrap();
        let rows = read_rows(&path).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(&rows[1][0], "2");
    }
}
