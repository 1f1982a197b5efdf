use std::path::PathBuf;

use admlab_core::analysis::{
    bode_sweep, dedup_values, energy, frontier_point, resonance_peak, tail_std, trace_metrics, validate_spec,
    FrontierPoint,
};
use admlab_core::sim::{simulate, SimScenario, SimTrace};
use admlab_core::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::Result;
use crate::output::{
    bode_csv, compare_csv, file_in, frontier_csv, trace_csv, trace_json, write_atomic, write_json, CompareRow,
    MetricsJson,
};

fn ext(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// Metrics of a trace; contact fields are absent when no contact occurred.
pub fn metrics_for(tr: &SimTrace, sc: &SimScenario, threshold: f64, window: f64) -> Result<MetricsJson> {
    match trace_metrics(tr, threshold, window) {
        Ok(m) => Ok(m.into()),
        Err(Error::NoContact) => Ok(MetricsJson {
            peak_force: tr.f_meas.iter().fold(0.0, |m: f64, f| m.max(f.abs())),
            energy: energy(&tr.f_meas, &tr.v_robot, sc.cp.h),
            rms_noise: tail_std(&tr.f_raw, window, sc.cp.h),
            dominant_mode: None,
            time_to_contact: None,
            contact_velocity: None,
        }),
        Err(e) => Err(e.into()),
    }
}

/// Runs the scenario and writes `trace.{csv,json}` and `metrics.json`.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let sc = cfg.scenario()?;
    let tr = simulate(&sc)?;
    let m = metrics_for(&tr, &sc, cfg.simulation.contact_threshold, cfg.simulation.noise_window)?;
    let dir = &cfg.output.dir;
    let trace_path = file_in(dir, "trace", ext(cfg.output.format));
    let body = match cfg.output.format {
        Format::Csv => trace_csv(&tr),
        Format::Json => trace_json(&tr),
    };
    write_atomic(&trace_path, body.as_bytes())?;
    let metrics_path = dir.join("metrics.json");
    write_json(&metrics_path, &m)?;
    Ok(vec![trace_path, metrics_path])
}

#[derive(Debug, Serialize)]
struct BodeSummary {
    label: String,
    peak_magnitude: f64,
    peak_omega: f64,
    peak_hz: f64,
}

#[derive(Serialize)]
struct CurveJson<'a> {
    label: &'a str,
    omega: &'a [f64],
    magnitude: &'a [f64],
}

/// One curve file per variant plus `bode_summary.json` with the refined peaks.
pub fn cmd_bode(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let variants = cfg.bode_variants()?;
    let grid = cfg.bode_grid()?;
    let cp = cfg.controller_params();
    cp.validate()?;
    let pp = cfg.plant_params()?;
    pp.validate()?;
    let which = cfg.bode_response();
    let results = variants
        .par_iter()
        .map(|v| {
            let model = v.model(&cp, &pp)?;
            let curve = bode_sweep(&model, which, &grid, v.label())?;
            let (mag, w) = resonance_peak(&model, which, &grid)?;
            Ok((curve, mag, w))
        })
        .collect::<std::result::Result<Vec<_>, Error>>()?;
    let dir = &cfg.output.dir;
    let mut written = Vec::new();
    let mut summary = Vec::new();
    for (curve, mag, w) in &results {
        let path = file_in(dir, &format!("bode_{}", curve.label), ext(cfg.output.format));
        match cfg.output.format {
            Format::Csv => write_atomic(&path, bode_csv(curve).as_bytes())?,
            Format::Json => write_json(
                &path,
                &CurveJson {
                    label: &curve.label,
                    omega: &curve.omegas,
                    magnitude: &curve.magnitudes,
                },
            )?,
        }
        written.push(path);
        summary.push(BodeSummary {
            label: curve.label.clone(),
            peak_magnitude: *mag,
            peak_omega: *w,
            peak_hz: w / (2.0 * std::f64::consts::PI),
        });
    }
    let path = dir.join("bode_summary.json");
    write_json(&path, &summary)?;
    written.push(path);
    Ok(written)
}

#[derive(Serialize)]
struct FrontierJson {
    value: f64,
    min_ba: Option<f64>,
    max_kl: Option<f64>,
}

/// Minimum stable `Ba` and maximum stable `Kl` per sweep value; the
/// points are evaluated in parallel.
pub fn cmd_frontier(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let cp = cfg.controller_params();
    cp.validate()?;
    let pp = cfg.plant_params()?;
    pp.validate()?;
    let spec = cfg.frontier_spec();
    validate_spec(&spec)?;
    let points = dedup_values(&spec.values)
        .par_iter()
        .map(|&v| frontier_point(&cp, &pp, &spec, v))
        .collect::<std::result::Result<Vec<FrontierPoint>, Error>>()?;
    let path = file_in(&cfg.output.dir, "frontier", ext(cfg.output.format));
    match cfg.output.format {
        Format::Csv => write_atomic(&path, frontier_csv(&points).as_bytes())?,
        Format::Json => {
            let rows: Vec<FrontierJson> = points
                .iter()
                .map(|p| FrontierJson {
                    value: p.value,
                    min_ba: p.min_stable_ba,
                    max_kl: p.max_stable_kl,
                })
                .collect();
            write_json(&path, &rows)?
        }
    }
    Ok(vec![path])
}

/// Simulates every comparison variant on the base scenario and writes one
/// metrics row per variant.
pub fn cmd_compare(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    if cfg.compare.variants.is_empty() {
        return Err(crate::error::CliError::config(
            "compare.variants must list at least one variant",
        ));
    }
    let base = cfg.scenario()?;
    let (threshold, window) = (cfg.simulation.contact_threshold, cfg.simulation.noise_window);
    let rows = cfg
        .compare
        .variants
        .par_iter()
        .map(|v| {
            let sc = v.to_delta().apply(&base);
            sc.validate()?;
            let tr = simulate(&sc)?;
            Ok(CompareRow {
                label: v.label.clone(),
                metrics: metrics_for(&tr, &sc, threshold, window)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let path = file_in(&cfg.output.dir, "compare", ext(cfg.output.format));
    match cfg.output.format {
        Format::Csv => write_atomic(&path, compare_csv(&rows).as_bytes())?,
        Format::Json => write_json(&path, &rows)?,
    }
    Ok(vec![path])
}

/// Reads `ADMLAB_THREADS`; `None` leaves the rayon default.
pub fn thread_cap(value: Option<&str>) -> Result<Option<usize>> {
    match value {
        None => Ok(None),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(crate::error::CliError::config(format!(
                "ADMLAB_THREADS must be a positive integer, got `{s}`"
            ))),
        },
    }
}
