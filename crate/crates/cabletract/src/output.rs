//! CSV tables with a provenance comment line, and an all-or-nothing
//! writer for a batch of output files.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{io_err, Result};
use crate::scenario::ScenarioParams;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct RunContext {
    pub seed: u64,
    pub params: ScenarioParams,
    /// SHA-256 of the override file bytes; the empty-input digest for defaults.
    pub params_sha256: String,
}

impl RunContext {
    pub fn new(seed: u64, params_text: Option<&str>) -> Result<Self> {
        let text = params_text.unwrap_or("");
        let params = ScenarioParams::from_overrides(text)?;
        let digest = Sha256::digest(text.as_bytes());
        Ok(Self {
            seed,
            params,
            params_sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        })
    }

    pub fn header_line(&self) -> String {
        format!(
            "# cabletract {} seed={} params_sha256={}",
            VERSION, self.seed, self.params_sha256
        )
    }
}

pub trait Cell {
    fn cell(&self) -> String;
}

impl Cell for f64 {
    fn cell(&self) -> String {
        if self.is_finite() {
            format!("{self}")
        } else if self.is_nan() {
            "nan".to_string()
        } else if *self > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        }
    }
}

impl Cell for Option<f64> {
    fn cell(&self) -> String {
        self.map(|v| v.cell()).unwrap_or_default()
    }
}

macro_rules! display_cell {
    ($($t:ty),*) => {$(
        impl Cell for $t {
            fn cell(&self) -> String {
                self.to_string()
            }
        }
    )*};
}
display_cell!(usize, u32, u64, i64, bool, str, String);

impl<T: Cell + ?Sized> Cell for &T {
    fn cell(&self) -> String {
        (**self).cell()
    }
}

#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => {
        vec![$($crate::output::Cell::cell(&$x)),*]
    };
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match header");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self, comment: &str) -> Result<Vec<u8>> {
        let mut buf = format!("{comment}\n").into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.columns)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush().map_err(io_err("<memory>"))?;
        }
        Ok(buf)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Csv(Table),
    /// A CSV body produced elsewhere; the comment line is prepended.
    RawCsv(Vec<u8>),
    Json(serde_json::Value),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    /// Path relative to the output root, `/`-separated.
    pub path: String,
    pub payload: Payload,
}

impl Output {
    pub fn csv(path: impl Into<String>, t: Table) -> Self {
        Self {
            path: path.into(),
            payload: Payload::Csv(t),
        }
    }

    pub fn table(&self) -> Option<&Table> {
        match &self.payload {
            Payload::Csv(t) => Some(t),
            _ => None,
        }
    }

    pub fn render(&self, ctx: &RunContext) -> Result<Vec<u8>> {
        match &self.payload {
            Payload::Csv(t) => t.to_csv(&ctx.header_line()),
            Payload::RawCsv(body) => {
                let mut v = format!("{}\n", ctx.header_line()).into_bytes();
                v.extend_from_slice(body);
                Ok(v)
            }
            Payload::Json(j) => {
                let mut j = j.clone();
                if let Some(obj) = j.as_object_mut() {
                    obj.insert(
                        "generator".to_string(),
                        serde_json::json!({ "name": "cabletract", "version": VERSION, "seed": ctx.seed, "params_sha256": ctx.params_sha256 }),
                    );
                }
                let mut s = serde_json::to_vec_pretty(&j).expect("json serialises");
                s.push(b'\n');
                Ok(s)
            }
        }
    }
}

pub fn find<'a>(outputs: &'a [Output], path: &str) -> Option<&'a Output> {
    outputs.iter().find(|o| o.path == path)
}

/// Writes every output under `root`. Each file is staged next to its
/// target and renamed only once all of them rendered and staged; on any
/// failure the staged and already-renamed files are removed.
pub fn write_all(root: &Path, ctx: &RunContext, outputs: &[Output]) -> Result<Vec<PathBuf>> {
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::with_capacity(outputs.len());
    let mut done: Vec<PathBuf> = Vec::new();
    let result = (|| -> Result<()> {
        for o in outputs {
            let target = root.join(&o.path);
            if let Some(dir) = target.parent() {
                fs::create_dir_all(dir).map_err(io_err(dir))?;
            }
            let tmp = target.with_extension(format!(
                "{}.partial",
                target.extension().and_then(|e| e.to_str()).unwrap_or("")
            ));
            let bytes = o.render(ctx)?;
            staged.push((tmp.clone(), target));
            fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
        }
        for (tmp, target) in &staged {
            fs::rename(tmp, target).map_err(io_err(target))?;
            done.push(target.clone());
        }
        Ok(())
    })();
    match result {
        Ok(()) => Ok(done),
        Err(e) => {
            for (tmp, _) in &staged {
                let _ = fs::remove_file(tmp);
            }
            for f in &done {
                let _ = fs::remove_file(f);
            }
            Err(e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_quoting() {
        let ctx = RunContext::new(7, None).unwrap();
        let mut t = Table::new(&["a", "b"]);
        t.push(row!["x,y", 1.5]);
        let s = String::from_utf8(t.to_csv(&ctx.header_line()).unwrap()).unwrap();
        assert!(s.starts_with("# cabletract "));
        assert!(s.contains("seed=7"));
        assert!(s.contains("e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"));
        assert!(s.ends_with("a,b\n\"x,y\",1.5\n"));
    }

    #[test]
    fn cells() {
        assert_eq!(f64::INFINITY.cell(), "inf");
        assert_eq!(None::<f64>.cell(), "");
        assert_eq!(0.1f64.cell(), "0.1");
    }

    #[test]
    fn failed_batch_leaves_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let ctx = RunContext::new(1, None).unwrap();
        let ok = Output::csv("tables/a.csv", Table::new(&["x"]));
        // a directory where a file must go makes the second write fail
        fs::create_dir_all(dir.path().join("tables/b.csv.partial")).unwrap();
        let bad = Output::csv("tables/b.csv", Table::new(&["x"]));
        assert!(write_all(dir.path(), &ctx, &[ok.clone(), bad]).is_err());
        assert!(!dir.path().join("tables/a.csv").exists());
        assert!(!dir.path().join("tables/a.csv.partial").exists());
        let written = write_all(dir.path(), &ctx, &[ok]).unwrap();
        assert_eq!(written.len(), 1);
    }
}
