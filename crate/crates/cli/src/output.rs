//! Report serialization: CSV and JSON emitters over the same field lists,
//! with every float printed at 17 significant digits so a parsed value
//! round-trips bit-exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

/// A cell value: floats carry full precision, integers print plainly.
#[derive(Debug, Clone)]
pub enum Value {
    Float(f64),
    Int(u64),
    Text(String),
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::Float(x) => format_f64(*x),
            Value::Int(n) => n.to_string(),
            Value::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> String {
        match self {
            Value::Float(x) => format_f64(*x),
            Value::Int(n) => n.to_string(),
            Value::Text(s) => format!("\"{s}\""),
        }
    }
}

/// 17 significant digits: lossless for f64 and a valid JSON number.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A rectangular report: fixed column names, rows of cells.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Table {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Value::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("[\n");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str("  {");
            for (j, (name, cell)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "\"{name}\": {}", cell.json());
            }
            out.push('}');
            if i + 1 < self.rows.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("]\n");
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Format, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("expected csv or json, got `{other}`")),
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Write to the given path, or stdout when the path is "-".
pub fn emit(path: &str, content: &str) -> std::io::Result<()> {
    if path == "-" {
        std::io::stdout().write_all(content.as_bytes())
    } else {
        if let Some(parent) = Path::new(path).parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)?;
            }
        }
        fs::write(path, content)
    }
}

/// Companion path for the rate-fit table: `<stem>_ratefit.<ext>`.
pub fn ratefit_path(out: &str, format: Format) -> String {
    if out == "-" {
        return "-".to_string();
    }
    let path = Path::new(out);
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "audit".to_string());
    let dir = path.parent().map(|p| p.to_path_buf()).unwrap_or_default();
    dir.join(format!("{stem}_ratefit.{}", format.extension()))
        .to_string_lossy()
        .into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, 2.966_383_218e-1, 1e-300, 12345.678] {
            let s = format_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn csv_and_json_share_values() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![Value::Int(3), Value::Float(0.5)]);
        let csv = t.to_csv();
        assert!(csv.starts_with("a,b\n"));
        let json = t.to_json();
        assert!(json.contains("\"a\": 3"));
        assert!(json.contains("\"b\": 5.0000000000000000e-1"));
    }

    #[test]
    fn ratefit_companion_path() {
        assert_eq!(ratefit_path("out/audit.csv", Format::Csv), "out/audit_ratefit.csv");
        assert_eq!(ratefit_path("-", Format::Json), "-");
    }
}
