//! Tabular export of Fisher curves.
//!
//! CSV header: `eta,curve_label,fisher_value,method,error_estimate,divergent`.
//! Numbers are written in scientific notation with 17 significant digits and
//! rows end in `\n`. A divergent point has an empty `fisher_value` and
//! `divergent = true`. JSON carries the same rows with `null` for divergent
//! values.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::analysis::ComparisonCurve;
use crate::error::{Error, Result};
use crate::fisher::Method;

use super::config::SCHEMA_VERSION;

pub const CSV_HEADER: [&str; 6] = ["eta", "curve_label", "fisher_value", "method", "error_estimate", "divergent"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub eta: f64,
    pub curve_label: String,
    pub fisher_value: Option<f64>,
    pub method: Method,
    pub error_estimate: f64,
    pub divergent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub schema_version: u32,
    pub rows: Vec<Row>,
}

/// Rows ordered curve by curve, then by η.
pub fn table_from_curves(curves: &[ComparisonCurve]) -> Table {
    let rows = curves
        .iter()
        .flat_map(|c| {
            c.eta_grid.iter().zip(&c.values).map(|(eta, v)| Row {
                eta: eta.get(),
                curve_label: c.label.clone(),
                fisher_value: v.value(),
                method: v.method,
                error_estimate: v.error_estimate,
                divergent: v.is_divergent(),
            })
        })
        .collect();
    Table {
        schema_version: SCHEMA_VERSION,
        rows,
    }
}

/// `{:.16e}`: 17 significant digits, enough to round-trip any f64.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in &table.rows {
        w.write_record([
            format_number(r.eta),
            r.curve_label.clone(),
            r.fisher_value.map(format_number).unwrap_or_default(),
            r.method.as_str().to_string(),
            format_number(r.error_estimate),
            r.divergent.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses CSV written by [`write_csv`].
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Table> {
    let mut r = csv::ReaderBuilder::new().from_reader(input);
    let bad = |msg: String| Error::Config(format!("CSV: {msg}"));
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("'{s}': {e}")));
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let method: Method = serde_json::from_value(serde_json::Value::String(rec[3].to_string()))
            .map_err(|e| bad(e.to_string()))?;
        rows.push(Row {
            eta: num(&rec[0])?,
            curve_label: rec[1].to_string(),
            fisher_value: if rec[2].is_empty() { None } else { Some(num(&rec[2])?) },
            method,
            error_estimate: num(&rec[4])?,
            divergent: rec[5].parse().map_err(|e: std::str::ParseBoolError| bad(e.to_string()))?,
        });
    }
    Ok(Table {
        schema_version: SCHEMA_VERSION,
        rows,
    })
}

pub fn write_json<W: Write, T: Serialize>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::FisherResult;
    use crate::types::{DarkCount, DetectorModel, Efficiency, ProbeState};

    fn curve() -> ComparisonCurve {
        ComparisonCurve {
            label: "fock:1".into(),
            probe: ProbeState::fock(1),
            detector: DetectorModel::onoff(DarkCount::NONE),
            repetitions: 1,
            eta_grid: vec![Efficiency::new(0.1).unwrap(), Efficiency::ONE],
            values: vec![FisherResult::closed_form(1.0 / 0.09), FisherResult::divergent(Method::ClosedForm)],
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&table_from_curves(&[curve()]), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], "eta,curve_label,fisher_value,method,error_estimate,divergent");
        assert!(lines[1].starts_with("1.0000000000000001e-1,fock:1,1.1111111111111111e1,closed_form,"));
        assert!(lines[2].starts_with("1.0000000000000000e0,fock:1,,closed_form,"));
        assert!(lines[2].ends_with(",true"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn csv_and_json_roundtrip() {
        let table = table_from_curves(&[curve()]);
        let mut buf = Vec::new();
        write_csv(&table, &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), table);
        let mut buf = Vec::new();
        write_json(&table, &mut buf).unwrap();
        let back: Table = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, table);
    }
}
