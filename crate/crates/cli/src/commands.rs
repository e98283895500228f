use std::io::Write;
use std::path::{Path, PathBuf};

use lowlight_core::{enhance_full, io, ops, tone, Diagnostics, EnhanceConfig, MetricsReport};
use serde::Serialize;

use crate::error::CliResult;

#[derive(Debug, Serialize)]
struct EnhanceOutput<'a> {
    input: &'a Path,
    output: &'a Path,
    #[serde(flatten)]
    diagnostics: Diagnostics,
}

pub fn enhance(input: &Path, output: &Path, cfg: &EnhanceConfig) -> CliResult<()> {
    let image = io::load_rgb(input)?;
    let (enhanced, diagnostics) = enhance_full(&image, cfg)?;
    io::save_rgb(&enhanced, output)?;
    for w in &diagnostics.warnings {
        eprintln!("warning: {w}");
    }
    let report = EnhanceOutput {
        input,
        output,
        diagnostics,
    };
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}

#[derive(Debug, Serialize)]
struct CurveFooter {
    a: f64,
    b: f64,
    c: f64,
    fit_mse: f64,
    sweep_mse: f64,
    degenerate: bool,
}

pub fn curve(input: &Path, sweep: (f64, f64, f64), cfg: &EnhanceConfig) -> CliResult<()> {
    let image = io::load_rgb(input)?;
    let v = ops::rgb_to_v(&image)?;
    let (lo, hi, step) = sweep;
    let result = tone::gamma_sweep(&v, cfg, lo, hi, step)?;

    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    {
        let mut w = csv::Writer::from_writer(&mut lock);
        for row in &result.rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    let p = &result.params;
    let footer = CurveFooter {
        a: p.a,
        b: p.b,
        c: p.c,
        fit_mse: p.fit_mse,
        sweep_mse: result.sweep_mse,
        degenerate: p.degenerate,
    };
    writeln!(lock, "{}", serde_json::to_string(&footer)?)?;
    Ok(())
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn metrics(enhanced: &Path, reference: &Path, low: Option<&PathBuf>) -> CliResult<()> {
    let e = io::load_rgb(enhanced)?;
    let r = io::load_rgb(reference)?;
    let l = low.map(io::load_rgb).transpose()?;
    let report = MetricsReport::compute(stem(enhanced), &e, &r, l.as_ref())?;
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}
