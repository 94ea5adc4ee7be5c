//! Plain CSV tables with a `#` comment line recording the parameters.

use std::fmt::Write;

pub struct Table {
    text: String,
}

impl Table {
    /// `params` are `(key, value)` pairs; string values are quoted.
    pub fn new(command: &str, params: &[(&str, String)], columns: &[&str]) -> Self {
        let mut text = format!("# finlap {command}");
        for (k, v) in params {
            write!(text, " {k}={v}").unwrap();
        }
        text.push('\n');
        text.push_str(&columns.join(","));
        text.push('\n');
        Table { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub fn quoted(s: &str) -> String {
    format!("{s:?}")
}

pub fn list(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}
