//! Suite reports and their CSV form.
//!
//! Every row compares a measured quantity (`oracle`) with the value it is
//! checked against (`bound`); `ratio` is `oracle / bound`.

use std::cmp::Ordering;
use std::io::{Read, Write};
use std::path::Path;
use std::time::Duration;

use crate::error::{Error, Result};

pub const HEADER: [&str; 7] = ["suite", "check", "params", "oracle", "bound", "ratio", "pass"];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub check: String,
    pub params: Vec<(String, f64)>,
    pub oracle: f64,
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
}

impl Row {
    pub fn new(check: impl Into<String>, params: &[(&str, f64)], oracle: f64, bound: f64, pass: bool) -> Self {
        // 0/0 carries a sign bit that text cannot represent.
        let ratio = oracle / bound;
        let ratio = if ratio.is_nan() { f64::NAN } else { ratio };
        Self {
            check: check.into(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            oracle,
            bound,
            ratio,
            pass,
        }
    }

    /// `oracle ≤ bound`.
    pub fn at_most(check: impl Into<String>, params: &[(&str, f64)], oracle: f64, bound: f64) -> Self {
        Self::new(check, params, oracle, bound, oracle <= bound)
    }

    /// `oracle ≥ bound`.
    pub fn at_least(check: impl Into<String>, params: &[(&str, f64)], oracle: f64, bound: f64) -> Self {
        Self::new(check, params, oracle, bound, oracle >= bound)
    }

    fn cmp_key(&self, other: &Self) -> Ordering {
        self.check.cmp(&other.check).then_with(|| {
            for (a, b) in self.params.iter().zip(&other.params) {
                let o = a.0.cmp(&b.0).then(a.1.total_cmp(&b.1));
                if o != Ordering::Equal {
                    return o;
                }
            }
            self.params.len().cmp(&other.params.len())
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub rows: Vec<Row>,
    pub wall_time: Duration,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            rows: Vec::new(),
            wall_time: Duration::ZERO,
        }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    /// True iff every row passes.
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }

    /// Rows ordered by check name, then parameter tuple.
    pub fn sort_rows(&mut self) {
        self.rows.sort_by(Row::cmp_key);
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_params(params: &[(String, f64)]) -> String {
    params
        .iter()
        .map(|(k, v)| format!("{k}={}", fmt_f64(*v)))
        .collect::<Vec<_>>()
        .join(";")
}

/// Writes the header and every report's rows.
pub fn write_csv<W: Write>(reports: &[&SuiteReport], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for rep in reports {
        for r in &rep.rows {
            w.write_record([
                rep.suite.clone(),
                r.check.clone(),
                fmt_params(&r.params),
                fmt_f64(r.oracle),
                fmt_f64(r.bound),
                fmt_f64(r.ratio),
                r.pass.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(report: &SuiteReport, path: &Path) -> Result<()> {
    emit_all(&[report], path)
}

pub fn emit_all(reports: &[&SuiteReport], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(reports, file).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_err(path: &Path, msg: String) -> Error {
    Error::Config { line: 0, message: format!("{}: {msg}", path.display()) }
}

fn parse_f64(path: &Path, s: &str) -> Result<f64> {
    s.parse().map_err(|_| parse_err(path, format!("bad number {s:?}")))
}

/// Reads a CSV written by [`write_csv`] back into one report per suite, in
/// order of first appearance. Wall times are not stored and come back zero.
pub fn parse_csv<R: Read>(input: R, path: &Path) -> Result<Vec<SuiteReport>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(csv_err)?.clone();
    if header.iter().ne(HEADER) {
        return Err(parse_err(path, format!("unexpected header {header:?}")));
    }
    let mut reports: Vec<SuiteReport> = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(csv_err)?;
        let mut params = Vec::new();
        if !rec[2].is_empty() {
            for kv in rec[2].split(';') {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| parse_err(path, format!("bad parameter {kv:?}")))?;
                params.push((k.to_string(), parse_f64(path, v)?));
            }
        }
        let pass = match &rec[6] {
            "true" => true,
            "false" => false,
            other => return Err(parse_err(path, format!("bad pass flag {other:?}"))),
        };
        let row = Row {
            check: rec[1].to_string(),
            params,
            oracle: parse_f64(path, &rec[3])?,
            bound: parse_f64(path, &rec[4])?,
            ratio: parse_f64(path, &rec[5])?,
            pass,
        };
        match reports.iter_mut().find(|r| r.suite == rec[0]) {
            Some(r) => r.rows.push(row),
            None => {
                let mut r = SuiteReport::new(&rec[0]);
                r.rows.push(row);
                reports.push(r);
            }
        }
    }
    Ok(reports)
}

pub fn load_csv(path: &Path) -> Result<Vec<SuiteReport>> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(file, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SuiteReport {
        let mut r = SuiteReport::new("demo");
        r.push(Row::at_most("b", &[("t", 0.1), ("r", 1.0 / 3.0)], 1e-300, 2.5));
        r.push(Row::at_least("a", &[], -0.0, f64::MIN_POSITIVE));
        r.push(Row::at_most("b", &[("t", 0.05), ("r", 7.0)], std::f64::consts::PI, f64::INFINITY));
        r.sort_rows();
        r
    }

    #[test]
    fn empty_report_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&[&SuiteReport::new("x")], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "suite,check,params,oracle,bound,ratio,pass\n");
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let rep = sample();
        let mut buf = Vec::new();
        write_csv(&[&rep], &mut buf).unwrap();
        let back = parse_csv(&buf[..], Path::new("mem")).unwrap();
        assert_eq!(back.len(), 1);
        for (a, b) in rep.rows.iter().zip(&back[0].rows) {
            assert_eq!(a.check, b.check);
            assert_eq!(a.pass, b.pass);
            for (x, y) in [(a.oracle, b.oracle), (a.bound, b.bound), (a.ratio, b.ratio)] {
                assert_eq!(x.to_bits(), y.to_bits());
            }
            for (p, q) in a.params.iter().zip(&b.params) {
                assert_eq!(p.0, q.0);
                assert_eq!(p.1.to_bits(), q.1.to_bits());
            }
        }
    }

    #[test]
    fn rows_sorted_by_inputs() {
        let rep = sample();
        assert_eq!(rep.rows[0].check, "a");
        assert_eq!(rep.rows[1].params[0].1, 0.05);
        assert!(!rep.passed());
    }
}
