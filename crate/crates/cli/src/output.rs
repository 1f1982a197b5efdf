//! CSV and JSON writers. Files are written to a temporary sibling and
//! renamed into place.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use admlab_core::analysis::{BodeCurve, ContactMetrics, FrontierPoint};
use admlab_core::sim::SimTrace;
use serde::Serialize;

use crate::error::{CliError, Result};

/// Writes `contents` to `path` atomically.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("output serializes to JSON");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Full-precision float: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A column of a CSV table.
pub enum Column<'a> {
    Float(&'a [f64]),
    Bool(&'a [bool]),
    Text(&'a [String]),
    OptFloat(&'a [Option<f64>]),
}

impl Column<'_> {
    fn len(&self) -> usize {
        match self {
            Column::Float(v) => v.len(),
            Column::Bool(v) => v.len(),
            Column::Text(v) => v.len(),
            Column::OptFloat(v) => v.len(),
        }
    }

    fn cell(&self, i: usize, out: &mut String) {
        match self {
            Column::Float(v) => out.push_str(&fmt_f64(v[i])),
            Column::Bool(v) => out.push(if v[i] { '1' } else { '0' }),
            Column::Text(v) => out.push_str(&v[i]),
            Column::OptFloat(v) => {
                if let Some(x) = v[i] {
                    out.push_str(&fmt_f64(x));
                }
            }
        }
    }
}

/// Comma-separated table with a header row and LF line endings.
pub fn csv_table(columns: &[(&str, Column)]) -> String {
    let n = columns.first().map_or(0, |c| c.1.len());
    assert!(columns.iter().all(|c| c.1.len() == n), "csv columns differ in length");
    let mut out = String::new();
    let header: Vec<&str> = columns.iter().map(|c| c.0).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..n {
        for (j, (_, col)) in columns.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            col.cell(i, &mut out);
        }
        out.push('\n');
    }
    out
}

pub fn trace_csv(tr: &SimTrace) -> String {
    csv_table(&[
        ("t", Column::Float(&tr.t)),
        ("f_meas", Column::Float(&tr.f_meas)),
        ("f_raw", Column::Float(&tr.f_raw)),
        ("x_cmd", Column::Float(&tr.x_cmd)),
        ("x_robot", Column::Float(&tr.x_robot)),
        ("x_payload", Column::Float(&tr.x_payload)),
        ("v_robot", Column::Float(&tr.v_robot)),
        ("v_filtered", Column::Float(&tr.v_filtered)),
        ("ba", Column::Float(&tr.ba)),
        ("contact", Column::Bool(&tr.contact)),
        ("detected", Column::Bool(&tr.detected)),
    ])
}

#[derive(Serialize)]
struct TraceJson<'a> {
    t: &'a [f64],
    f_meas: &'a [f64],
    f_raw: &'a [f64],
    x_cmd: &'a [f64],
    x_robot: &'a [f64],
    x_payload: &'a [f64],
    v_robot: &'a [f64],
    v_filtered: &'a [f64],
    ba: &'a [f64],
    contact: &'a [bool],
    detected: &'a [bool],
}

pub fn trace_json(tr: &SimTrace) -> String {
    let j = TraceJson {
        t: &tr.t,
        f_meas: &tr.f_meas,
        f_raw: &tr.f_raw,
        x_cmd: &tr.x_cmd,
        x_robot: &tr.x_robot,
        x_payload: &tr.x_payload,
        v_robot: &tr.v_robot,
        v_filtered: &tr.v_filtered,
        ba: &tr.ba,
        contact: &tr.contact,
        detected: &tr.detected,
    };
    let mut s = serde_json::to_string(&j).expect("trace serializes");
    s.push('\n');
    s
}

/// Metrics file contents. Contact-dependent fields are `null` when the
/// force never crossed the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct MetricsJson {
    pub peak_force: f64,
    pub energy: f64,
    pub rms_noise: f64,
    pub dominant_mode: Option<f64>,
    pub time_to_contact: Option<f64>,
    pub contact_velocity: Option<f64>,
}

impl From<ContactMetrics> for MetricsJson {
    fn from(m: ContactMetrics) -> Self {
        MetricsJson {
            peak_force: m.peak_force,
            energy: m.energy,
            rms_noise: m.rms_noise,
            dominant_mode: Some(m.dominant_mode),
            time_to_contact: Some(m.time_to_contact),
            contact_velocity: Some(m.contact_velocity),
        }
    }
}

pub fn bode_csv(curve: &BodeCurve) -> String {
    csv_table(&[
        ("omega", Column::Float(&curve.omegas)),
        ("magnitude", Column::Float(&curve.magnitudes)),
    ])
}

pub fn frontier_csv(points: &[FrontierPoint]) -> String {
    let value: Vec<f64> = points.iter().map(|p| p.value).collect();
    let ba: Vec<Option<f64>> = points.iter().map(|p| p.min_stable_ba).collect();
    let kl: Vec<Option<f64>> = points.iter().map(|p| p.max_stable_kl).collect();
    csv_table(&[
        ("value", Column::Float(&value)),
        ("min_ba", Column::OptFloat(&ba)),
        ("max_kl", Column::OptFloat(&kl)),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub label: String,
    #[serde(flatten)]
    pub metrics: MetricsJson,
}

pub fn compare_csv(rows: &[CompareRow]) -> String {
    let labels: Vec<String> = rows.iter().map(|r| r.label.clone()).collect();
    let col = |f: fn(&MetricsJson) -> Option<f64>| rows.iter().map(|r| f(&r.metrics)).collect::<Vec<_>>();
    let peak = col(|m| Some(m.peak_force));
    let mode = col(|m| m.dominant_mode);
    let energy = col(|m| Some(m.energy));
    let ttc = col(|m| m.time_to_contact);
    let vel = col(|m| m.contact_velocity);
    let noise = col(|m| Some(m.rms_noise));
    csv_table(&[
        ("label", Column::Text(&labels)),
        ("peak_force", Column::OptFloat(&peak)),
        ("dominant_mode", Column::OptFloat(&mode)),
        ("energy", Column::OptFloat(&energy)),
        ("time_to_contact", Column::OptFloat(&ttc)),
        ("contact_velocity", Column::OptFloat(&vel)),
        ("rms_noise", Column::OptFloat(&noise)),
    ])
}

/// `dir/stem.ext` with the extension picked by the format.
pub fn file_in(dir: &Path, stem: &str, ext: &str) -> PathBuf {
    dir.join(format!("{stem}.{ext}"))
}
