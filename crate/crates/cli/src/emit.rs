//! Writing the report and its CSV series.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::OutputConfig;
use crate::error::CliError;
use crate::report::{Ratio, Real, Report};

#[derive(Clone, Debug, PartialEq)]
pub struct Written {
    pub report: PathBuf,
    pub margins: PathBuf,
    pub scaling: PathBuf,
}

#[derive(Serialize)]
struct ScalingCsvRow {
    set: usize,
    m_list: String,
    s: Real,
    epsilon: Real,
    t: Real,
    value: Real,
    slope: Real,
    analytic_slope: Real,
}

#[derive(Serialize)]
struct MarginCsvRow {
    delta: Real,
    epsilon: Ratio,
    margin: Real,
    c_cert: Real,
    pass: bool,
}

fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = T>) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    // written by hand so an empty series still has a header
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

/// Writes `report.json`, `margins.csv` and `scaling.csv` into `dir`.
pub fn emit(report: &Report, dir: &Path, names: &OutputConfig) -> Result<Written, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let out = Written {
        report: dir.join(&names.report),
        margins: dir.join(&names.margins),
        scaling: dir.join(&names.scaling),
    };
    fs::write(&out.report, report.to_json()?).map_err(|e| CliError::io(&out.report, e))?;
    write_csv(
        &out.margins,
        &["delta", "epsilon", "margin", "c_cert", "pass"],
        report.margins.iter().map(|m| MarginCsvRow {
            delta: m.delta,
            epsilon: m.epsilon,
            margin: m.margin,
            c_cert: m.c_cert,
            pass: m.pass,
        }),
    )?;
    let rows = report.scaling.iter().enumerate().flat_map(|(i, s)| {
        s.rows.iter().map(move |r| ScalingCsvRow {
            set: i,
            m_list: s.m_list.iter().map(u32::to_string).collect::<Vec<_>>().join(" "),
            s: s.s,
            epsilon: s.epsilon,
            t: r.t,
            value: r.value,
            slope: s.slope,
            analytic_slope: s.analytic_slope,
        })
    });
    write_csv(
        &out.scaling,
        &["set", "m_list", "s", "epsilon", "t", "value", "slope", "analytic_slope"],
        rows,
    )?;
    Ok(out)
}
