//! Number formatting and CSV tables.

use anyhow::Result;

/// Version tag written in the first line of every CSV file.
pub const SCHEMA_VERSION: &str = "v1";

/// `x` rounded to 12 significant digits, printed in the shortest form that
/// reads back to the rounded value.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

/// The value a reader of [`sig12`] output sees.
pub fn round12(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.11e}").parse().expect("formatted float parses")
    } else {
        x
    }
}

/// A CSV document: a `# randci <command> v1 ...` line, optional `# ` comment
/// lines, a header row and numeric rows. Empty cells stand for values that
/// were not computed.
pub struct Table {
    pub command: &'static str,
    pub meta: Vec<(String, String)>,
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(command: &'static str, header: Vec<String>) -> Self {
        Table {
            command,
            meta: Vec::new(),
            comments: Vec::new(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = format!("# randci {} {}", self.command, SCHEMA_VERSION);
        for (k, v) in &self.meta {
            out.push_str(&format!(" {k}={v}"));
        }
        out.push('\n');
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.map(sig12).unwrap_or_default()))?;
        }
        out.push_str(std::str::from_utf8(&w.into_inner()?)?);
        Ok(out)
    }

    /// Column `name` as printed (rounded) values; `None` for empty cells.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i].map(round12)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits_round_trip() {
        assert_eq!(sig12(0.1), "0.1");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(0.652452850181), "0.652452850181");
        assert_eq!(sig12(0.6524528501817), "0.652452850182");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(2.5e-13), "0.00000000000025");
        let x = 0.123456789012345;
        assert_eq!(sig12(x).parse::<f64>().unwrap(), round12(x));
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("coverage", vec!["theta".into(), "value".into()]).meta("n", 10);
        t.comments.push("note".into());
        t.rows.push(vec![Some(0.5), None]);
        assert_eq!(
            t.to_csv().unwrap(),
            "# randci coverage v1 n=10\n# note\ntheta,value\n0.5,\n"
        );
    }
}
