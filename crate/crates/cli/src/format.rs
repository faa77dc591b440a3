//! Output helpers shared by every command.

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

/// Three significant figures for human-readable tables.
pub fn sig3(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(2 - mag);
    let rounded = (x * scale).round() / scale;
    // rounding may carry into the next decade (9.996 -> 10.0)
    let mag = rounded.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{rounded:.2e}");
    }
    let decimals = (2 - mag).max(0) as usize;
    format!("{rounded:.decimals$}")
}

/// Full-precision rendering used in CSV; `{}` on f64 is the shortest string
/// that parses back to the same value.
pub fn full(x: f64) -> String {
    x.to_string()
}

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) {
        self.rows.push(cells.into_iter().map(Into::into).collect());
    }

    /// Left-aligns the first column and right-aligns the rest.
    pub fn render(&self, bold_header: bool) -> String {
        let cols = self.header.len();
        let mut width = vec![0; cols];
        for r in std::iter::once(&self.header).chain(&self.rows) {
            for (i, c) in r.iter().enumerate().take(cols) {
                width[i] = width[i].max(c.chars().count());
            }
        }
        let line = |r: &[String]| {
            let cells: Vec<String> = r
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    if i == 0 {
                        format!("{c:<w$}", w = width[i])
                    } else {
                        format!("{c:>w$}", w = width[i])
                    }
                })
                .collect();
            cells.join("  ").trim_end().to_string()
        };
        let mut out = String::new();
        let head = line(&self.header);
        if bold_header {
            out.push_str(&format!("\x1b[1m{head}\x1b[0m\n"));
        } else {
            out.push_str(&head);
            out.push('\n');
        }
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}

pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    // writing to a Vec cannot fail
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_significant_figures() {
        assert_eq!(sig3(127.214), "127");
        assert_eq!(sig3(5.50790), "5.51");
        assert_eq!(sig3(0.0939827), "0.0940");
        assert_eq!(sig3(9.996), "10.0");
        assert_eq!(sig3(-4.5678), "-4.57");
        assert_eq!(sig3(12345.0), "12300");
        assert_eq!(sig3(0.0), "0");
        assert_eq!(sig3(2.5e7), "2.50e7");
    }

    #[test]
    fn table_alignment() {
        let mut t = Table::new(["metric", "value"]);
        t.row(["npv", "5.51"]);
        t.row(["lcoe", "127"]);
        assert_eq!(
            t.render(false),
            "metric  value\nnpv      5.51\nlcoe      127\n"
        );
    }
}
