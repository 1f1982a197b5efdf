use alloc::string::String;
use alloc::vec::Vec;

use super::spectrum::dominant_frequency;
use crate::discrete::Method;
use crate::error::{Error, Result};
use crate::sim::{simulate, SimScenario, SimTrace};

/// Scalars extracted from one contact trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactMetrics {
    /// `max |F|` (N).
    pub peak_force: f64,
    /// Largest post-contact spectral peak (Hz).
    pub dominant_mode: f64,
    /// `sum |F v| h` (J).
    pub energy: f64,
    /// First time `|F|` exceeds the threshold (s).
    pub time_to_contact: f64,
    /// Robot speed at that instant (m/s).
    pub contact_velocity: f64,
    /// Standard deviation of the raw sensor force over the final window (N).
    pub rms_noise: f64,
}

/// Extracts contact metrics from a trace.
///
/// `threshold` is the contact force level and `window` the length (s) of
/// the quiescent tail used for the noise estimate.
pub fn trace_metrics(tr: &SimTrace, threshold: f64, window: f64) -> Result<ContactMetrics> {
    if tr.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let h = sample_time(tr);
    let peak_force = tr.f_meas.iter().fold(0.0, |m: f64, f| m.max(f.abs()));
    let energy = energy(&tr.f_meas, &tr.v_robot, h);
    let rms_noise = tail_std(&tr.f_raw, window, h);
    let i = tr
        .f_meas
        .iter()
        .position(|f| f.abs() > threshold)
        .ok_or(Error::NoContact)?;
    let dominant_mode = dominant_frequency(&tr.f_meas[i..], h)?;
    Ok(ContactMetrics {
        peak_force,
        dominant_mode,
        energy,
        time_to_contact: tr.t[i],
        contact_velocity: tr.v_robot[i].abs(),
        rms_noise,
    })
}

fn sample_time(tr: &SimTrace) -> f64 {
    if tr.len() >= 2 {
        tr.t[1] - tr.t[0]
    } else {
        1.0
    }
}

/// `sum |F_i v_i| h`
pub fn energy(f: &[f64], v: &[f64], h: f64) -> f64 {
    f.iter().zip(v).map(|(f, v)| (f * v).abs()).sum::<f64>() * h
}

/// Population standard deviation of the last `window` seconds of `x`.
pub fn tail_std(x: &[f64], window: f64, h: f64) -> f64 {
    let n = (libm::round(window / h) as usize).clamp(1, x.len());
    let tail = &x[x.len() - n..];
    let mean = tail.iter().sum::<f64>() / n as f64;
    libm::sqrt(tail.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64)
}

/// Numerical derivative of `x` smoothed by a trailing moving average.
pub fn smoothed_rate(x: &[f64], h: f64, window: usize) -> Vec<f64> {
    let window = window.max(1);
    let diff: Vec<f64> = core::iter::once(0.0)
        .chain(x.windows(2).map(|w| (w[1] - w[0]) / h))
        .collect();
    let mut out = Vec::with_capacity(diff.len());
    let mut acc = 0.0;
    for i in 0..diff.len() {
        acc += diff[i];
        if i >= window {
            acc -= diff[i - window];
        }
        out.push(acc / (i + 1).min(window) as f64);
    }
    out
}

/// Changes applied to a base scenario for one comparison row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VariantDelta {
    pub label: String,
    pub ba: Option<f64>,
    pub kl: Option<f64>,
    pub bfb: Option<f64>,
    pub mp_hat: Option<f64>,
    pub ke: Option<f64>,
    pub collision_response: Option<bool>,
    pub full_stop: Option<bool>,
    pub discretization: Option<Method>,
}

impl VariantDelta {
    pub fn new(label: &str) -> Self {
        VariantDelta {
            label: String::from(label),
            ..VariantDelta::default()
        }
    }

    pub fn apply(&self, base: &SimScenario) -> SimScenario {
        let mut sc = base.clone();
        if let Some(v) = self.ba {
            sc.cp.ba = v;
        }
        if let Some(v) = self.kl {
            sc.cp.kl = v;
        }
        if let Some(v) = self.bfb {
            sc.cp.bfb = v;
        }
        if let Some(v) = self.mp_hat {
            sc.cp.mp_hat = v;
        }
        if let Some(v) = self.ke {
            sc.pp.ke = v;
        }
        if let Some(v) = self.collision_response {
            sc.collision_response = v;
        }
        if let Some(v) = self.full_stop {
            sc.full_stop = v;
        }
        if let Some(v) = self.discretization {
            sc.discretization = v;
        }
        sc
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub label: String,
    pub metrics: ContactMetrics,
}

/// Simulates each variant with the base seed and force profile and
/// returns one metrics row per variant, in input order.
pub fn compare_variants(
    base: &SimScenario,
    variants: &[VariantDelta],
    threshold: f64,
    window: f64,
) -> Result<Vec<MetricsRow>> {
    variants
        .iter()
        .map(|v| {
            let tr = simulate(&v.apply(base))?;
            Ok(MetricsRow {
                label: v.label.clone(),
                metrics: trace_metrics(&tr, threshold, window)?,
            })
        })
        .collect()
}
