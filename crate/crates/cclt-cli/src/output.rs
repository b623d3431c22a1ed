//! Result tables, JSON documents and the run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde_json::{Map, Value};

use crate::config::{Format, Settings};

/// Column-ordered table; cells are JSON values so one table serves both formats.
#[derive(Debug, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

/// Non-finite numbers become empty cells / `null`; `-0` prints as `0`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x + 0.0)
    } else {
        Value::Null
    }
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell_text))?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), v.clone()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// What a subcommand hands back: a table and/or a document, plus summary
/// lines for the terminal and the manifest.
#[derive(Debug, Default)]
pub struct Artifact {
    pub table: Option<Table>,
    pub document: Option<Value>,
    pub summary: Vec<(String, String)>,
}

pub struct Written {
    pub files: Vec<PathBuf>,
}

/// Write the result file and print it. With `--format json` a table and a
/// document are combined as `{"rows": ..., ...document}`.
pub fn write_results(command: &str, s: &Settings, a: &Artifact) -> Result<Written> {
    fs::create_dir_all(&s.out)
        .with_context(|| format!("creating output directory {}", s.out.display()))?;
    let mut files = Vec::new();
    let (body, ext) = match (s.format, &a.table, &a.document) {
        (Format::Csv, Some(t), _) => (t.to_csv()?, "csv"),
        (Format::Json, Some(t), doc) => {
            let mut obj = Map::new();
            obj.insert("rows".into(), t.to_json());
            if let Some(Value::Object(d)) = doc {
                obj.extend(d.clone());
            }
            (pretty(&Value::Object(obj))?, "json")
        }
        (_, None, Some(d)) => (pretty(d)?, "json"),
        (_, None, None) => (String::new(), "txt"),
    };
    let path = s.out.join(format!("{command}.{ext}"));
    fs::write(&path, &body).with_context(|| format!("writing {}", path.display()))?;
    print!("{body}");
    files.push(path);
    // A CSV run still keeps the structured document alongside.
    if let (Format::Csv, Some(_), Some(d)) = (s.format, &a.table, &a.document) {
        let path = s.out.join(format!("{command}.json"));
        fs::write(&path, pretty(d)?).with_context(|| format!("writing {}", path.display()))?;
        files.push(path);
    }
    for (k, v) in &a.summary {
        println!("{k}: {v}");
    }
    Ok(Written { files })
}

fn pretty(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

pub struct Manifest<'a> {
    pub command: &'a str,
    pub argv: Vec<String>,
    pub settings: &'a Settings,
    pub started: SystemTime,
    pub wall: Duration,
    pub outputs: &'a [PathBuf],
    pub summary: &'a [(String, String)],
    pub error: Option<String>,
}

pub fn write_manifest(m: &Manifest) -> Result<PathBuf> {
    fs::create_dir_all(&m.settings.out)
        .with_context(|| format!("creating output directory {}", m.settings.out.display()))?;
    let path = m.settings.out.join(format!("{}.manifest.txt", m.command));
    let mut f = fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    let started = m.started.duration_since(UNIX_EPOCH).unwrap_or_default();
    writeln!(f, "command={}", m.command)?;
    writeln!(f, "argv={}", m.argv.join(" "))?;
    for (k, v) in m.settings.echo() {
        writeln!(f, "config.{k}={v}")?;
    }
    writeln!(f, "seed={}", m.settings.seed)?;
    writeln!(f, "cclt_version={}", cclt::VERSION)?;
    writeln!(f, "cli_version={}", env!("CARGO_PKG_VERSION"))?;
    writeln!(f, "parallel={}", cclt::PARALLEL)?;
    writeln!(f, "started_unix={:.3}", started.as_secs_f64())?;
    writeln!(f, "wall_seconds={:.3}", m.wall.as_secs_f64())?;
    for o in m.outputs {
        writeln!(f, "output={}", file_name(o))?;
    }
    for (k, v) in m.summary {
        writeln!(f, "result.{k}={v}")?;
    }
    match &m.error {
        Some(e) => writeln!(f, "status=error: {e}")?,
        None => writeln!(f, "status=ok")?,
    }
    Ok(path)
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_and_blanks() {
        let mut t = Table::new(&["model", "x", "y"]);
        t.push(vec!["a,b \"c\"".into(), num(0.25), num(f64::NAN)]);
        assert_eq!(t.to_csv().unwrap(), "model,x,y\r\n\"a,b \"\"c\"\"\",0.25,\r\n");
        assert_eq!(t.to_json()[0]["y"], Value::Null);
    }
}
