use crate::error::Result;
use crate::lti::RationalTF;
use crate::plant::ControllerParams;

use super::difference::{discretize, Method};

/// Translational plus rotational channels.
pub const CHANNELS: usize = 6;
/// Channels checked by the collision detector.
pub const TRANSLATIONAL: usize = 3;

/// Three-tap coefficients of the admittance-plus-lead recursion,
/// `a0 x_{t+1} + a1 x_t + a2 x_{t-1} = b0 u_{t+1} + b1 u_t + b2 u_{t-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmittanceCoeffs {
    pub a: [f64; 3],
    pub b: [f64; 3],
}

impl AdmittanceCoeffs {
    /// Hand-expanded Tustin form:
    /// `(1 + Ba h/2Ma) x_{t+1} = 2 x_t - (1 - Ba h/2Ma) x_{t-1}
    ///  + (h²/4Ma)[(1 + 2Kl/h) u_{t+1} + 2 u_t + (1 - 2Kl/h) u_{t-1}]`.
    pub fn tustin(ma: f64, ba: f64, kl: f64, h: f64) -> Self {
        let r = ba * h / (2.0 * ma);
        let g = h * h / (4.0 * ma);
        let l = 2.0 * kl / h;
        AdmittanceCoeffs {
            a: [1.0 + r, -2.0, 1.0 - r],
            b: [g * (1.0 + l), 2.0 * g, g * (1.0 - l)],
        }
    }

    /// Forward-Euler form, obtained from the generic discretizer.
    pub fn euler(ma: f64, ba: f64, kl: f64, h: f64) -> Result<Self> {
        let g = RationalTF::from_coeffs(&[1.0, kl], &[0.0, ba, ma])?;
        let d = discretize(&g, h, Method::Euler)?;
        let mut out = AdmittanceCoeffs {
            a: [0.0; 3],
            b: [0.0; 3],
        };
        out.a[..d.a().len()].copy_from_slice(d.a());
        out.b[..d.b().len()].copy_from_slice(d.b());
        Ok(out)
    }

    pub fn new(ma: f64, ba: f64, kl: f64, h: f64, method: Method) -> Result<Self> {
        match method {
            Method::Tustin => Ok(AdmittanceCoeffs::tustin(ma, ba, kl, h)),
            Method::Euler => AdmittanceCoeffs::euler(ma, ba, kl, h),
        }
    }

    /// Force contribution `g(u_{t+1}, u_t, u_{t-1}) / a0`.
    pub fn force_term(&self, u: &[f64; 3]) -> f64 {
        (self.b[0] * u[0] + self.b[1] * u[1] + self.b[2] * u[2]) / self.a[0]
    }

    /// Coefficient multiplying the carried increment `x_t - x_{t-1}`.
    pub fn carry(&self) -> f64 {
        self.a[2] / self.a[0]
    }
}

/// State of the discrete admittance controller.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmittanceState {
    /// Latest commanded position `x^d_{t+1}` per channel (m).
    pub xd_next: [f64; CHANNELS],
    pub xd_now: [f64; CHANNELS],
    pub xd_prev: [f64; CHANNELS],
    /// Controller input `u` per channel, newest first.
    pub f_hist: [[f64; 3]; CHANNELS],
    pub was_contact: bool,
    pub last_contact_time: f64,
    pub ba_current: f64,
    /// Time of the last damping update; `None` before the first one.
    pub last_adapt_time: Option<f64>,
    method: Method,
    coeffs: AdmittanceCoeffs,
    coeffs_ba: f64,
}

impl AdmittanceState {
    /// Controller at rest with Tustin discretization.
    pub fn new(cp: &ControllerParams) -> Result<Self> {
        AdmittanceState::with_method(cp, Method::Tustin)
    }

    pub fn with_method(cp: &ControllerParams, method: Method) -> Result<Self> {
        cp.validate()?;
        let ba = match &cp.var_damping {
            Some(vd) => cp.ba.clamp(vd.b_lo, vd.b_hi),
            None => cp.ba,
        };
        Ok(AdmittanceState {
            xd_next: [0.0; CHANNELS],
            xd_now: [0.0; CHANNELS],
            xd_prev: [0.0; CHANNELS],
            f_hist: [[0.0; 3]; CHANNELS],
            was_contact: false,
            last_contact_time: f64::NEG_INFINITY,
            ba_current: ba,
            last_adapt_time: None,
            method,
            coeffs: AdmittanceCoeffs::new(cp.ma, ba, cp.kl, cp.h, method)?,
            coeffs_ba: ba,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Coefficients at the current damping.
    pub fn coeffs(&self, cp: &ControllerParams) -> Result<AdmittanceCoeffs> {
        if self.coeffs_ba == self.ba_current {
            Ok(self.coeffs)
        } else {
            AdmittanceCoeffs::new(cp.ma, self.ba_current, cp.kl, cp.h, self.method)
        }
    }

    fn refresh(&mut self, cp: &ControllerParams) -> Result<()> {
        if self.coeffs_ba != self.ba_current {
            self.coeffs = AdmittanceCoeffs::new(cp.ma, self.ba_current, cp.kl, cp.h, self.method)?;
            self.coeffs_ba = self.ba_current;
        }
        Ok(())
    }

    fn push_input(&mut self, u: &[f64; CHANNELS]) {
        for (hist, &uk) in self.f_hist.iter_mut().zip(u) {
            *hist = [uk, hist[0], hist[1]];
        }
    }

    fn shift(&mut self) {
        self.xd_prev = self.xd_now;
        self.xd_now = self.xd_next;
    }
}

/// Advances the recursion one sample on every channel and returns `x^d_{t+1}`.
///
/// `u` is the controller input `F^d - F` after the deadband.
pub fn admittance_step(
    state: &mut AdmittanceState,
    u: &[f64; CHANNELS],
    cp: &ControllerParams,
) -> Result<[f64; CHANNELS]> {
    state.refresh(cp)?;
    state.push_input(u);
    state.shift();
    let c = state.coeffs;
    for j in 0..CHANNELS {
        let rhs = -c.a[1] * state.xd_now[j] - c.a[2] * state.xd_prev[j]
            + c.b[0] * state.f_hist[j][0]
            + c.b[1] * state.f_hist[j][1]
            + c.b[2] * state.f_hist[j][2];
        state.xd_next[j] = rhs / c.a[0];
    }
    Ok(state.xd_next)
}

/// Zeroes readings whose magnitude is below `f_dead`.
pub fn apply_deadband(f: f64, f_dead: f64) -> f64 {
    if f.abs() < f_dead {
        0.0
    } else {
        f
    }
}

pub fn apply_deadband_all<const N: usize>(f: &[f64; N], f_dead: f64) -> [f64; N] {
    f.map(|x| apply_deadband(x, f_dead))
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `F_j sign(v_j) > F̄` on any translational channel.
pub fn contact_detected(f: &[f64; TRANSLATIONAL], v: &[f64; TRANSLATIONAL], f_bar: f64) -> bool {
    f.iter().zip(v).any(|(&fj, &vj)| fj * sign(vj) > f_bar)
}

/// Collision-aware controller step.
///
/// On a rising contact edge the carried increment of every channel is
/// dropped by holding `x^d` and equalizing the history, so the following
/// step moves only by the force term. The latch re-arms once contact has
/// been absent for `cp.contact_hold`. Returns the command and whether this
/// step was a contact event.
pub fn collision_step(
    state: &mut AdmittanceState,
    u: &[f64; CHANNELS],
    f_next: &[f64; TRANSLATIONAL],
    v: &[f64; TRANSLATIONAL],
    t: f64,
    cp: &ControllerParams,
) -> Result<([f64; CHANNELS], bool)> {
    let contact = contact_detected(f_next, v, cp.f_bar);
    if contact {
        state.last_contact_time = t;
    } else if state.was_contact && t - state.last_contact_time >= cp.contact_hold {
        state.was_contact = false;
    }
    if contact && !state.was_contact {
        state.was_contact = true;
        state.refresh(cp)?;
        state.push_input(u);
        state.shift();
        state.xd_next = state.xd_now;
        state.xd_prev = state.xd_now;
        return Ok((state.xd_next, true));
    }
    Ok((admittance_step(state, u, cp)?, false))
}

/// Speed-scheduled damping update; returns the damping now in force.
///
/// Updates happen on a fixed grid of `update_period`, each moving toward
/// `max(B_hi e^{-c|v|}, B_lo)` by at most `max_delta`.
pub fn adapt_damping(state: &mut AdmittanceState, v: f64, t: f64, cp: &ControllerParams) -> f64 {
    let Some(vd) = &cp.var_damping else {
        return state.ba_current;
    };
    let due = match state.last_adapt_time {
        None => true,
        Some(last) => t - last >= vd.update_period * (1.0 - 1e-9),
    };
    if !due {
        return state.ba_current;
    }
    let target = damping_target(v, vd.b_hi, vd.b_lo, vd.rate_coeff);
    let delta = (target - state.ba_current).clamp(-vd.max_delta, vd.max_delta);
    state.ba_current = (state.ba_current + delta).clamp(vd.b_lo, vd.b_hi);
    state.last_adapt_time = Some(match state.last_adapt_time {
        Some(last) if t - last < 2.0 * vd.update_period => last + vd.update_period,
        _ => t,
    });
    state.ba_current
}

/// `max(b_hi e^{-c|v|}, b_lo)`
pub fn damping_target(v: f64, b_hi: f64, b_lo: f64, rate_coeff: f64) -> f64 {
    (b_hi * libm::exp(-rate_coeff * v.abs())).max(b_lo)
}
