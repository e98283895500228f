use std::collections::HashSet;
use std::path::{Path, PathBuf};

use lowlight_core::metrics::{self, statistical_states};
use lowlight_core::{enhance_full, io, Diagnostics, EnhanceConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult, Kind};

pub const REPORT_COLUMNS: [&str; 11] = [
    "id",
    "gamma_star",
    "fit_mse",
    "delta_e",
    "psnr",
    "mssim",
    "loe",
    "dv_m",
    "ds_m",
    "d_m",
    "total_ms",
];

#[derive(Debug, Clone, Deserialize)]
struct RawRow {
    id: String,
    low: String,
    #[serde(rename = "ref", default)]
    reference: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub id: String,
    pub low: PathBuf,
    pub reference: Option<PathBuf>,
}

/// Reads `id,low,ref` rows; relative paths are taken from the manifest's
/// directory.
pub fn read_manifest(path: &Path) -> CliResult<Vec<ManifestRow>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new(""));
    let resolve = |p: &str| {
        let p = Path::new(p.trim());
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for (i, rec) in reader.deserialize::<RawRow>().enumerate() {
        let raw =
            rec.map_err(|e| CliError::config(format!("{}: row {}: {e}", path.display(), i + 1)))?;
        if !seen.insert(raw.id.clone()) {
            return Err(CliError::config(format!(
                "{}: duplicate id {:?}",
                path.display(),
                raw.id
            )));
        }
        rows.push(ManifestRow {
            low: resolve(&raw.low),
            reference: raw.reference.filter(|r| !r.is_empty()).map(|r| resolve(&r)),
            id: raw.id,
        });
    }
    if rows.is_empty() {
        return Err(CliError::config(format!(
            "{}: manifest has no rows",
            path.display()
        )));
    }
    Ok(rows)
}

/// Scores of one successfully processed row. Full-reference scores are
/// missing when the row has no reference image.
#[derive(Debug, Clone, Serialize)]
pub struct RowScores {
    pub delta_e: Option<f64>,
    pub psnr: Option<f64>,
    pub mssim: Option<f64>,
    pub loe: f64,
    pub dv_m: f64,
    pub ds_m: f64,
    pub d_m: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RowReport {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scores: Option<RowScores>,
}

impl RowReport {
    fn values(&self) -> Option<[Option<f64>; 10]> {
        let (d, s) = (self.diagnostics.as_ref()?, self.scores.as_ref()?);
        Some([
            Some(d.gamma_star),
            Some(d.curve.fit_mse),
            s.delta_e,
            s.psnr,
            s.mssim,
            Some(s.loe),
            Some(s.dv_m),
            Some(s.ds_m),
            Some(s.d_m),
            Some(d.timings.total_ms),
        ])
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport<'a> {
    pub config: &'a EnhanceConfig,
    pub rows: &'a [RowReport],
}

fn process(
    row: &ManifestRow,
    cfg: &EnhanceConfig,
    out_dir: Option<&Path>,
) -> Result<(Diagnostics, RowScores), String> {
    let low = io::load_rgb(&row.low).map_err(|e| e.to_string())?;
    let (enhanced, diagnostics) = enhance_full(&low, cfg).map_err(|e| e.to_string())?;
    if let Some(dir) = out_dir {
        io::save_rgb(&enhanced, dir.join(format!("{}.png", row.id))).map_err(|e| e.to_string())?;
    }
    let states = statistical_states(&enhanced, &low).map_err(|e| e.to_string())?;
    let loe = metrics::loe(&enhanced, &low).map_err(|e| e.to_string())?;
    let mut scores = RowScores {
        delta_e: None,
        psnr: None,
        mssim: None,
        loe,
        dv_m: states.dv_m,
        ds_m: states.ds_m,
        d_m: states.d_m,
    };
    if let Some(path) = &row.reference {
        let reference = io::load_rgb(path).map_err(|e| e.to_string())?;
        let full = (|| -> lowlight_core::Result<_> {
            Ok((
                metrics::delta_e(&enhanced, &reference)?,
                metrics::psnr(&enhanced, &reference)?,
                metrics::mssim(&enhanced, &reference)?,
            ))
        })()
        .map_err(|e| e.to_string())?;
        scores.delta_e = Some(full.0);
        scores.psnr = Some(full.1);
        scores.mssim = Some(full.2);
    }
    Ok((diagnostics, scores))
}

/// Processes every row, in parallel up to `jobs` threads (0 = all cores).
/// Reports come back in manifest order.
pub fn run_rows(
    rows: &[ManifestRow],
    cfg: &EnhanceConfig,
    jobs: usize,
    out_dir: Option<&Path>,
) -> CliResult<Vec<RowReport>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::new(Kind::Internal, e.to_string()))?;
    Ok(pool.install(|| {
        rows.par_iter()
            .map(|row| match process(row, cfg, out_dir) {
                Ok((diagnostics, scores)) => RowReport {
                    id: row.id.clone(),
                    error: None,
                    diagnostics: Some(diagnostics),
                    scores: Some(scores),
                },
                Err(error) => RowReport {
                    id: row.id.clone(),
                    error: Some(error),
                    diagnostics: None,
                    scores: None,
                },
            })
            .collect()
    }))
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Per-row records followed by a `mean` record over successful rows; each
/// column averages the rows where it is present.
pub fn write_report<W: std::io::Write>(out: W, reports: &[RowReport]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_COLUMNS)?;
    let mut sums = [(0.0, 0usize); 10];
    for r in reports {
        match r.values() {
            Some(values) => {
                let mut rec = vec![r.id.clone()];
                for (v, acc) in values.iter().zip(sums.iter_mut()) {
                    if let Some(x) = v {
                        acc.0 += x;
                        acc.1 += 1;
                    }
                    rec.push(cell(*v));
                }
                w.write_record(&rec)?;
            }
            None => {
                let mut rec = vec![r.id.clone(), "error".to_string()];
                rec.resize(REPORT_COLUMNS.len(), String::new());
                w.write_record(&rec)?;
            }
        }
    }
    let mut mean = vec!["mean".to_string()];
    mean.extend(
        sums.iter()
            .map(|&(s, n)| cell((n > 0).then(|| s / n as f64))),
    );
    w.write_record(&mean)?;
    w.flush()?;
    Ok(())
}
