//! CSV and JSON writers. CSV files use `.` decimals, LF line endings and a
//! header row; floats are printed in Rust's shortest round-trip form.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use alpha_bandits::{RegretTrace, SummaryGroup};
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const TRACES_CSV: &str = "traces.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const MANIFEST_JSON: &str = "manifest.json";
pub const BOUND_CURVE_CSV: &str = "bound_curve.csv";
pub const BOUNDS_JSON: &str = "bounds.json";
pub const CONCENTRATION_CSV: &str = "concentration.csv";
pub const DIVERGENCE_JSON: &str = "divergence.json";
pub const PRIOR_MASS_JSON: &str = "prior_mass.json";

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}", dir.display()), e))
}

pub fn csv_writer(path: &Path) -> CliResult<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| CliError::io(format!("cannot create {}", path.display()), e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file)))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::io(
        format!("cannot write {}", path.display()),
        std::io::Error::other(e.to_string()),
    )
}

pub fn fmt_alpha(alpha: Option<f64>) -> String {
    alpha.map(|a| a.to_string()).unwrap_or_default()
}

pub fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
}

pub fn write_traces(dir: &Path, traces: &[RegretTrace<f64>]) -> CliResult<PathBuf> {
    let path = dir.join(TRACES_CSV);
    let rows = traces.iter().flat_map(|tr| {
        let alpha = fmt_alpha(tr.alpha);
        tr.cum_regret.iter().enumerate().map(move |(t, c)| {
            vec![
                tr.algorithm_label.clone(),
                alpha.clone(),
                tr.replicate_id.to_string(),
                (t + 1).to_string(),
                c.to_string(),
            ]
        })
    });
    write_rows(&path, &["algorithm", "alpha", "replicate", "t", "cum_regret"], rows)?;
    Ok(path)
}

/// Expects groups aggregated at the 10th, 50th and 90th percentiles.
pub fn write_summary(dir: &Path, groups: &[SummaryGroup<f64>]) -> CliResult<PathBuf> {
    let path = dir.join(SUMMARY_CSV);
    let rows = groups.iter().flat_map(|g| {
        let alpha = fmt_alpha(g.alpha);
        (0..g.horizon()).map(move |t| {
            vec![
                g.algorithm.clone(),
                alpha.clone(),
                (t + 1).to_string(),
                g.curves[0][t].to_string(),
                g.curves[1][t].to_string(),
                g.curves[2][t].to_string(),
            ]
        })
    });
    write_rows(&path, &["algorithm", "alpha", "t", "p10", "p50", "p90"], rows)?;
    Ok(path)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    let mut f = File::create(path).map_err(|e| CliError::io(format!("cannot create {}", path.display()), e))?;
    f.write_all(text.as_bytes())
        .map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
}
