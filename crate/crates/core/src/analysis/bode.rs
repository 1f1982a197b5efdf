use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::plant::{build_loop, ControllerParams, DelayModel, LoopModel, PlantParams};

/// Which loop transfer function to sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Response {
    /// Free-space admittance `V/F`.
    G,
    /// Force tracking `F/F^d`.
    Closed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BodeCurve {
    pub label: String,
    /// rad/s, strictly increasing.
    pub omegas: Vec<f64>,
    pub magnitudes: Vec<f64>,
}

impl BodeCurve {
    pub fn magnitudes_db(&self) -> Vec<f64> {
        self.magnitudes.iter().map(|m| 20.0 * libm::log10(*m)).collect()
    }
}

/// `n` log-spaced angular frequencies between `f_lo` and `f_hi` (Hz).
pub fn log_grid(f_lo: f64, f_hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![2.0 * PI * f_lo];
    }
    let (a, b) = (libm::log10(f_lo), libm::log10(f_hi));
    (0..n)
        .map(|i| 2.0 * PI * libm::pow(10.0, a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

/// 200 points over 0.05–100 Hz.
pub fn default_grid() -> Vec<f64> {
    log_grid(0.05, 100.0, 200)
}

/// Response at one frequency with the robot delay evaluated exactly.
pub fn response(model: &LoopModel, which: Response, omega: f64) -> Result<f64> {
    let v = match which {
        Response::G => model.g_response(omega, DelayModel::Exact)?,
        Response::Closed => model.closed_response(omega, DelayModel::Exact)?,
    };
    Ok(v.norm())
}

pub fn bode_sweep(model: &LoopModel, which: Response, omegas: &[f64], label: &str) -> Result<BodeCurve> {
    if omegas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("frequency grid must be strictly increasing"));
    }
    let magnitudes = omegas
        .iter()
        .map(|&w| response(model, which, w))
        .collect::<Result<Vec<_>>>()?;
    Ok(BodeCurve {
        label: String::from(label),
        omegas: omegas.to_vec(),
        magnitudes,
    })
}

/// Largest magnitude on the grid, refined by golden-section search between
/// the neighbouring grid points. Returns `(magnitude, omega)`.
pub fn resonance_peak(model: &LoopModel, which: Response, omegas: &[f64]) -> Result<(f64, f64)> {
    let curve = bode_sweep(model, which, omegas, "")?;
    let (i, &m) = curve
        .magnitudes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(Error::InvalidParameter("frequency grid is empty"))?;
    if i == 0 || i + 1 == omegas.len() {
        return Ok((m, omegas[i]));
    }
    let f = |w: f64| response(model, which, w);
    let (mut a, mut b) = (omegas[i - 1], omegas[i + 1]);
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let (wm, fm) = if fc > fd { (c, fc) } else { (d, fd) };
    Ok(if fm > m { (fm, wm) } else { (m, omegas[i]) })
}

/// Controller configurations compared in the frequency-domain study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Baseline,
    Lead,
    LeadFeedback,
    IdealAcceleration,
    FilteredAcceleration,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Baseline,
        Variant::Lead,
        Variant::LeadFeedback,
        Variant::IdealAcceleration,
        Variant::FilteredAcceleration,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Variant::Baseline => "baseline",
            Variant::Lead => "lead",
            Variant::LeadFeedback => "lead_feedback",
            Variant::IdealAcceleration => "ideal_acceleration",
            Variant::FilteredAcceleration => "filtered_acceleration",
        }
    }

    pub fn parse(s: &str) -> Option<Variant> {
        Variant::ALL.into_iter().find(|v| v.label() == s)
    }

    /// Controller settings for this variant, starting from `cp` (whose `kl`
    /// and `bfb` are the enabled values) and the payload mass `mp`.
    /// Returns the parameters and whether `O_a = s²`.
    pub fn configure(self, cp: &ControllerParams, mp: f64) -> (ControllerParams, bool) {
        let mut c = cp.clone();
        c.mp_hat = 0.0;
        let ideal = match self {
            Variant::Baseline => {
                c.kl = 0.0;
                c.bfb = 0.0;
                false
            }
            Variant::Lead => {
                c.bfb = 0.0;
                false
            }
            Variant::LeadFeedback => false,
            Variant::IdealAcceleration => {
                c.bfb = 0.0;
                c.mp_hat = mp;
                true
            }
            Variant::FilteredAcceleration => {
                c.bfb = 0.0;
                c.mp_hat = mp;
                false
            }
        };
        (c, ideal)
    }

    pub fn model(self, cp: &ControllerParams, pp: &PlantParams) -> Result<LoopModel> {
        let (c, ideal) = self.configure(cp, pp.mp);
        build_loop(&c, pp, ideal)
    }
}
