//! Result tables and helpers for the CSV output format.
//!
//! Tables carry a snake_case header row; floats are printed with 17
//! significant digits so a written baseline reparses to the same bits.

/// Formats a float with 17 significant digits (lossless f64 round trip).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A rectangular result table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    /// CSV body: header row then one line per row. Metadata lines, if any,
    /// are prepended by the caller as `# key: value` comments.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}
