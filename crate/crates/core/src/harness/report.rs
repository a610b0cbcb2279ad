use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::{Error, Result};

pub const RESULTS_FILE: &str = "results.jsonl";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const PROVENANCE_FILE: &str = "provenance.json";

/// Output of one experiment. The summary table is a projection of the
/// records onto `columns`, so every summary cell also appears in the
/// machine-readable output.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub records: Vec<Map<String, Value>>,
    pub columns: Vec<String>,
    pub provenance: Map<String, Value>,
    /// Overall verdict for experiments with thresholds.
    pub passed: Option<bool>,
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

impl Report {
    pub fn new(columns: &[&str]) -> Self {
        Report { records: Vec::new(), columns: columns.iter().map(|c| c.to_string()).collect(), provenance: Map::new(), passed: None }
    }

    /// Appends a record; it must serialize to a JSON object.
    pub fn push(&mut self, record: impl serde::Serialize) -> Result<()> {
        match serde_json::to_value(record).map_err(|e| Error::Io(e.to_string()))? {
            Value::Object(m) => {
                self.records.push(m);
                Ok(())
            }
            other => Err(Error::Argument(format!("record is not an object: {other}"))),
        }
    }

    pub fn results_jsonl(&self) -> String {
        self.records.iter().map(|r| Value::Object(r.clone()).to_string() + "\n").collect()
    }

    pub fn summary_rows(&self) -> Vec<Vec<String>> {
        self.records.iter().map(|r| self.columns.iter().map(|c| cell(r.get(c))).collect()).collect()
    }

    pub fn summary_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for row in self.summary_rows() {
            w.write_record(&row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn provenance_json(&self) -> String {
        let mut p = self.provenance.clone();
        if let Some(ok) = self.passed {
            p.insert("passed".into(), Value::Bool(ok));
        }
        serde_json::to_string_pretty(&Value::Object(p)).expect("maps serialize") + "\n"
    }

    /// Writes the three report files into `dir`, each through a temporary
    /// file that is renamed into place.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        write_atomic(&dir.join(RESULTS_FILE), &self.results_jsonl())?;
        write_atomic(&dir.join(SUMMARY_FILE), &self.summary_csv()?)?;
        write_atomic(&dir.join(PROVENANCE_FILE), &self.provenance_json())
    }
}

pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn summary_is_projection_of_records() {
        let mut r = Report::new(&["group", "p_hat"]);
        r.push(json!({"group": "sym(3)", "p_hat": 0.5, "extra": [1, 2]})).unwrap();
        r.push(json!({"group": "a,b"})).unwrap();
        assert_eq!(r.summary_csv().unwrap(), "group,p_hat\nsym(3),0.5\n\"a,b\",\n");
        assert!(r.push(json!(3)).is_err());
        assert_eq!(r.results_jsonl().lines().count(), 2);
    }

    #[test]
    fn writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = Report::new(&["x"]);
        r.push(json!({"x": 1})).unwrap();
        r.passed = Some(true);
        r.write(dir.path()).unwrap();
        for f in [RESULTS_FILE, SUMMARY_FILE, PROVENANCE_FILE] {
            assert!(dir.path().join(f).exists());
        }
        let prov = std::fs::read_to_string(dir.path().join(PROVENANCE_FILE)).unwrap();
        assert!(prov.contains("\"passed\": true"));
    }
}
