//! CSV inputs: power curves and cost observations.

use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Trim};
use tidal_econ::CostObservation;

use crate::error::{CliError, CliResult};

pub const POWER_CURVE_HEADER: [&str; 2] = ["n_t", "p_avg_mw"];
pub const TOTAL_HEADER: [&str; 2] = ["n_t", "total_gbp_m"];
pub const PER_MW_HEADER: [&str; 3] = ["capacity_mw", "per_mw_gbp_m", "rate_to_gbp"];

fn open(path: &Path) -> CliResult<(StringRecord, Vec<(u64, StringRecord)>)> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rdr = ReaderBuilder::new()
        .trim(Trim::All)
        .from_reader(text.as_bytes());
    let malformed = |e: csv::Error| {
        let line = e.position().map(|p| p.line()).unwrap_or(0);
        CliError::input(format!("{}: line {line}: {e}", path.display()))
    };
    let header = rdr.headers().map_err(malformed)?.clone();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(malformed)?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        rows.push((line, rec));
    }
    Ok((header, rows))
}

fn header_is(header: &StringRecord, want: &[&str]) -> bool {
    header.iter().eq(want.iter().copied())
}

fn field<T: std::str::FromStr>(
    path: &Path,
    line: u64,
    rec: &StringRecord,
    i: usize,
    name: &str,
) -> CliResult<T> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse().map_err(|_| {
        CliError::input(format!(
            "{}: line {line}: cannot parse {name} from '{raw}'",
            path.display()
        ))
    })
}

/// Reads `n_t,p_avg_mw` rows.
pub fn read_power_curve(path: &Path) -> CliResult<Vec<(u32, f64)>> {
    let (header, rows) = open(path)?;
    if !header_is(&header, &POWER_CURVE_HEADER) {
        return Err(CliError::input(format!(
            "{}: line 1: expected header '{}'",
            path.display(),
            POWER_CURVE_HEADER.join(",")
        )));
    }
    if rows.is_empty() {
        return Err(CliError::input(format!("{}: no data rows", path.display())));
    }
    rows.iter()
        .map(|(line, rec)| {
            let n: u32 = field(path, *line, rec, 0, "n_t")?;
            let p: f64 = field(path, *line, rec, 1, "p_avg_mw")?;
            if n == 0 {
                return Err(CliError::input(format!(
                    "{}: line {line}: n_t must be at least 1",
                    path.display()
                )));
            }
            Ok((n, p))
        })
        .collect()
}

/// Reads cost observations in either the total or the per-MW layout.
/// Per-MW rows need `rating_mw` to turn capacity into a turbine count.
pub fn read_observations(path: &Path, rating_mw: Option<f64>) -> CliResult<Vec<CostObservation>> {
    let (header, rows) = open(path)?;
    let per_mw = if header_is(&header, &TOTAL_HEADER) {
        false
    } else if header_is(&header, &PER_MW_HEADER) {
        true
    } else {
        return Err(CliError::input(format!(
            "{}: line 1: expected header '{}' or '{}'",
            path.display(),
            TOTAL_HEADER.join(","),
            PER_MW_HEADER.join(",")
        )));
    };
    if rows.is_empty() {
        return Err(CliError::input(format!("{}: no data rows", path.display())));
    }
    rows.iter()
        .map(|(line, rec)| {
            if per_mw {
                let rating = rating_mw.ok_or_else(|| {
                    CliError::input(format!(
                        "{}: per-MW observations need a turbine rating",
                        path.display()
                    ))
                })?;
                let cap: f64 = field(path, *line, rec, 0, "capacity_mw")?;
                let cost: f64 = field(path, *line, rec, 1, "per_mw_gbp_m")?;
                let rate: f64 = field(path, *line, rec, 2, "rate_to_gbp")?;
                Ok(CostObservation::per_mw(cap, rating, cost).with_rate(rate))
            } else {
                let n: f64 = field(path, *line, rec, 0, "n_t")?;
                let cost: f64 = field(path, *line, rec, 1, "total_gbp_m")?;
                Ok(CostObservation::total(n, cost))
            }
        })
        .collect()
}
