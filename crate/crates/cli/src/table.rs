//! CSV tables: `g,phi,value,p_d,region_flag` curves and
//! `replication,g_hat,stderr,crb_ratio` estimation runs.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{CliError, Result};

pub const CURVE_HEADER: [&str; 5] = ["g", "phi", "value", "p_d", "region_flag"];
pub const ESTIMATE_HEADER: [&str; 4] = ["replication", "g_hat", "stderr", "crb_ratio"];

/// 17 significant digits, `nan` for undefined values.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn parse_value(s: &str) -> Result<f64> {
    if s.eq_ignore_ascii_case("nan") {
        return Ok(f64::NAN);
    }
    s.parse()
        .map_err(|_| CliError::Validation(format!("'{s}' is not a number")))
}

fn same(a: f64, b: f64) -> bool {
    a == b || (a.is_nan() && b.is_nan())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionFlag {
    Inside,
    Outside,
}

impl fmt::Display for RegionFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionFlag::Inside => "inside",
            RegionFlag::Outside => "outside",
        })
    }
}

impl FromStr for RegionFlag {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inside" => Ok(RegionFlag::Inside),
            "outside" => Ok(RegionFlag::Outside),
            other => Err(CliError::Validation(format!("unknown region flag '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CurveRow {
    pub g: f64,
    pub phi: f64,
    /// `NaN` where post-selection never succeeds.
    pub value: f64,
    pub p_d: f64,
    pub region: RegionFlag,
}

impl PartialEq for CurveRow {
    fn eq(&self, o: &Self) -> bool {
        same(self.g, o.g)
            && same(self.phi, o.phi)
            && same(self.value, o.value)
            && same(self.p_d, o.p_d)
            && self.region == o.region
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CurveTable {
    pub rows: Vec<CurveRow>,
}

impl CurveTable {
    /// Rows for one angle, in grid order.
    pub fn series(&self, phi: f64) -> Vec<CurveRow> {
        self.rows.iter().filter(|r| r.phi == phi).copied().collect()
    }

    /// Distinct angles in order of first appearance.
    pub fn phis(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !out.iter().any(|p| same(*p, r.phi)) {
                out.push(r.phi);
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(CURVE_HEADER)?;
        for r in &self.rows {
            w.write_record([
                format_value(r.g),
                format_value(r.phi),
                format_value(r.value),
                format_value(r.p_d),
                r.region.to_string(),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(input);
        let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
        if header != CURVE_HEADER {
            return Err(CliError::Validation(format!("unexpected curve header {header:?}")));
        }
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            rows.push(CurveRow {
                g: parse_value(&rec[0])?,
                phi: parse_value(&rec[1])?,
                value: parse_value(&rec[2])?,
                p_d: parse_value(&rec[3])?,
                region: rec[4].parse()?,
            });
        }
        Ok(Self { rows })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ReplicationRow {
    pub replication: u64,
    pub g_hat: f64,
    pub stderr: f64,
    pub crb_ratio: f64,
}

pub fn write_replications<W: Write>(rows: &[ReplicationRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(ESTIMATE_HEADER)?;
    for r in rows {
        w.write_record([
            r.replication.to_string(),
            format_value(r.g_hat),
            format_value(r.stderr),
            format_value(r.crb_ratio),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
