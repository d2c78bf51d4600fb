//! CSV text with a `#` comment header and 17 significant digits.

use std::fmt::Write as _;

/// Round-trippable float: 17 significant digits in scientific notation.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_17_digits() {
        assert_eq!(num(0.5), "5.0000000000000000e-1");
        assert_eq!(num(-2.0 / std::f64::consts::PI), "-6.3661977236758138e-1");
        for v in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, 0.0] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn render_layout() {
        let mut t = Table::new(["x", "y"]);
        t.comment("padfs 0.1.0");
        t.push(vec!["1".into(), "2".into()]);
        assert_eq!(t.render(), "# padfs 0.1.0\nx,y\n1,2\n");
        assert_eq!(Table::new(["a"]).render(), "a\n");
    }
}
