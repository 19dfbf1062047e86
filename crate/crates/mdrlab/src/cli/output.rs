//! Table assembly and serialization for the experiment runner.
//!
//! CSV output keeps a one-line header and 17-significant-digit decimal
//! floats so files round-trip losslessly; JSON mirrors the same columns as
//! arrays under the column names, in column order. Files are written to a
//! temporary sibling and atomically renamed, so a failed run never leaves
//! a partial artifact behind.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{Map, Number, Value};

use super::{CliError, Result};

/// Output format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    /// File extension without the dot.
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }

    /// Parses a format label.
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(CliError::Config(format!(
                "unknown format {other:?} (expected csv or json)"
            ))),
        }
    }
}

/// One named column of uniform type.
#[derive(Debug, Clone)]
pub enum Column {
    Floats(Vec<f64>),
    Ints(Vec<i64>),
    Texts(Vec<String>),
    Flags(Vec<bool>),
}

impl Column {
    fn len(&self) -> usize {
        match self {
            Column::Floats(v) => v.len(),
            Column::Ints(v) => v.len(),
            Column::Texts(v) => v.len(),
            Column::Flags(v) => v.len(),
        }
    }

    fn cell(&self, row: usize) -> String {
        match self {
            Column::Floats(v) => fmt_float(v[row]),
            Column::Ints(v) => v[row].to_string(),
            Column::Texts(v) => v[row].clone(),
            Column::Flags(v) => v[row].to_string(),
        }
    }

    fn json_value(&self) -> Value {
        match self {
            Column::Floats(v) => Value::Array(
                v.iter()
                    .map(|&x| {
                        Value::Number(
                            Number::from_f64(x).expect("non-finite value in output column"),
                        )
                    })
                    .collect(),
            ),
            Column::Ints(v) => Value::Array(v.iter().map(|&x| Value::from(x)).collect()),
            Column::Texts(v) => Value::Array(v.iter().map(|s| Value::from(s.clone())).collect()),
            Column::Flags(v) => Value::Array(v.iter().map(|&b| Value::from(b)).collect()),
        }
    }
}

/// A rectangular table with named, ordered columns.
#[derive(Debug, Default)]
pub struct Table {
    cols: Vec<(String, Column)>,
}

impl Table {
    pub fn new() -> Self {
        Table::default()
    }

    /// Appends a column; all columns must share one length.
    pub fn push(&mut self, name: &str, col: Column) {
        assert!(
            !name.contains(',') && !name.contains('\n'),
            "column name would corrupt the CSV header"
        );
        if let Some((_, first)) = self.cols.first() {
            assert_eq!(first.len(), col.len(), "ragged column {name:?}");
        }
        self.cols.push((name.to_string(), col));
    }

    /// Number of data rows.
    pub fn rows(&self) -> usize {
        self.cols.first().map(|(_, c)| c.len()).unwrap_or(0)
    }

    /// Serializes in the requested format, with a trailing newline.
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        let names: Vec<&str> = self.cols.iter().map(|(n, _)| n.as_str()).collect();
        out.push_str(&names.join(","));
        out.push('\n');
        for row in 0..self.rows() {
            let cells: Vec<String> = self.cols.iter().map(|(_, c)| c.cell(row)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let mut map = Map::new();
        for (name, col) in &self.cols {
            map.insert(name.clone(), col.json_value());
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(map))
            .expect("table serialization cannot fail");
        text.push('\n');
        text
    }
}

/// Full-precision decimal rendering (17 significant digits), enough to
/// reconstruct the exact f64 bit pattern.
pub fn fmt_float(x: f64) -> String {
    assert!(x.is_finite(), "non-finite value in output column");
    format!("{x:.16e}")
}

/// Writes `contents` through a temporary file in the destination directory
/// and atomically renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir: PathBuf = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)
        .map_err(|e| CliError::Io(format!("creating temp file in {}: {e}", dir.display())))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| CliError::Io(format!("renaming into {}: {e}", path.display())))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new();
        t.push("x", Column::Floats(vec![1.0, 0.5]));
        t.push("label", Column::Texts(vec!["a".into(), "b".into()]));
        t.push("ok", Column::Flags(vec![true, false]));
        t
    }

    #[test]
    fn csv_has_one_header_line_and_full_precision_floats() {
        let text = sample().render(OutputFormat::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,label,ok");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("1.0000000000000000e0,a,true"), "{}", lines[1]);
    }

    #[test]
    fn float_formatting_round_trips_the_bit_pattern() {
        for x in [std::f64::consts::SQRT_2, 0.1, 3.0e-15, 12345.678_9] {
            let back: f64 = fmt_float(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {}", fmt_float(x));
        }
    }

    #[test]
    fn json_mirrors_columns_as_arrays() {
        let text = sample().render(OutputFormat::Json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["x"][1], serde_json::json!(0.5));
        assert_eq!(v["label"][0], serde_json::json!("a"));
        assert_eq!(v["ok"][1], serde_json::json!(false));
        // Column order is preserved in the rendered text.
        let x_pos = text.find("\"x\"").unwrap();
        let label_pos = text.find("\"label\"").unwrap();
        assert!(x_pos < label_pos);
    }

    #[test]
    #[should_panic(expected = "ragged column")]
    fn ragged_columns_are_refused() {
        let mut t = Table::new();
        t.push("x", Column::Floats(vec![1.0, 2.0]));
        t.push("y", Column::Floats(vec![1.0]));
    }

    #[test]
    fn atomic_write_replaces_the_target_in_one_step() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("table.csv");
        write_atomic(&path, "first\n").unwrap();
        write_atomic(&path, "second\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "second\n");
        // No stray temp files left behind.
        let extras: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .filter(|e| e.as_ref().unwrap().file_name() != "table.csv")
            .collect();
        assert!(extras.is_empty(), "leftover files: {extras:?}");
    }
}
