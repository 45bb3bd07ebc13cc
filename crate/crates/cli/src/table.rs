use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Twelve significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    // Adding zero folds -0 into 0.
    format!("{:.11e}", x + 0.0)
}

/// CSV table with `#` comment lines above the column header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { comments: Vec::new(), columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn push_floats(&mut self, values: &[f64]) {
        self.rows.push(values.iter().map(|&x| fmt_float(x)).collect());
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Parses column `name` of every row as a float.
    pub fn floats(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column(name)?;
        self.rows.iter().map(|r| r[k].parse().ok()).collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }

    /// Writes to `path`, or to stdout when `path` is `None`.
    pub fn write_to(&self, path: Option<&Path>) -> Result<(), CliError> {
        let text = self.render();
        match path {
            Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
            None => std::io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
        }
    }
}
