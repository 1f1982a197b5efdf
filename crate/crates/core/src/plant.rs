//! Controller and plant blocks, and the loop transfer functions built from them.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lti::{pade, Polynomial, RationalTF, CANCEL_TOL, DEFAULT_PADE_ORDER};

/// How the estimated payload mass scales the acceleration path.
///
/// The paper names the estimate `P̂ = M_p` but writes `P̂⁻¹` in the loop
/// equation, so both readings are available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompensationGain {
    /// Compensation force `M̂p · a` (mass times acceleration).
    #[default]
    EstimatedMass,
    /// Compensation force `a / M̂p`, the literal `P̂⁻¹` of the loop equation.
    InverseEstimate,
}

/// Speed-scheduled damping `B = max(B_hi e^{-c|v|}, B_lo)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarDamping {
    pub b_hi: f64,
    pub b_lo: f64,
    pub rate_coeff: f64,
    pub update_period: f64,
    pub max_delta: f64,
}

impl Default for VarDamping {
    fn default() -> Self {
        VarDamping {
            b_hi: 800.0,
            b_lo: 550.0,
            rate_coeff: 8.0,
            update_period: 0.01,
            max_delta: 20.0,
        }
    }
}

impl VarDamping {
    pub fn validate(&self) -> Result<()> {
        check(self.b_lo > 0.0, "var_damping.b_lo must be positive")?;
        check(self.b_hi >= self.b_lo, "var_damping.b_hi must be at least b_lo")?;
        check(self.rate_coeff >= 0.0, "var_damping.rate_coeff must be non-negative")?;
        check(self.update_period > 0.0, "var_damping.update_period must be positive")?;
        check(self.max_delta > 0.0, "var_damping.max_delta must be positive")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerParams {
    /// Virtual mass (kg).
    pub ma: f64,
    /// Virtual damping (Ns/m).
    pub ba: f64,
    /// Lead gain (s).
    pub kl: f64,
    /// Feedback damping gain.
    pub bfb: f64,
    /// Velocity filter corner (rad/s).
    pub omega_v: f64,
    /// Acceleration filter corner (rad/s).
    pub omega_a: f64,
    /// Estimated payload mass (kg); zero disables compensation.
    pub mp_hat: f64,
    pub compensation: CompensationGain,
    /// Sample time (s).
    pub h: f64,
    /// Force deadband (N).
    pub f_dead: f64,
    /// Collision threshold (N).
    pub f_bar: f64,
    /// Reference force (N).
    pub fd: f64,
    /// Time without contact before the collision latch re-arms (s).
    pub contact_hold: f64,
    pub var_damping: Option<VarDamping>,
}

impl ControllerParams {
    /// Parameters of the frequency-domain study.
    pub fn nominal() -> Self {
        ControllerParams {
            ma: 10.0,
            ba: 1000.0,
            kl: 0.02,
            bfb: 2e-5,
            omega_v: 120.0,
            omega_a: 200.0,
            mp_hat: 0.0,
            compensation: CompensationGain::EstimatedMass,
            h: 8e-4,
            f_dead: 5.0,
            f_bar: 7.0,
            fd: 30.0,
            contact_hold: 0.05,
            var_damping: None,
        }
    }

    /// Parameters of the contact experiments.
    pub fn contact_experiment() -> Self {
        ControllerParams {
            ma: 13.0,
            kl: 0.013,
            bfb: 7.5e-6,
            ..ControllerParams::nominal()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check(self.ma > 0.0, "Ma must be positive")?;
        check(self.ba > 0.0, "Ba must be positive")?;
        check(self.h > 0.0, "h must be positive")?;
        check(self.kl >= 0.0, "Kl must be non-negative")?;
        check(self.bfb >= 0.0, "Bfb must be non-negative")?;
        check(self.omega_v > 0.0, "omega_v must be positive")?;
        check(self.omega_a > 0.0, "omega_a must be positive")?;
        check(self.mp_hat >= 0.0, "Mp_hat must be non-negative")?;
        check(self.f_dead >= 0.0, "F_dead must be non-negative")?;
        check(self.f_bar > 0.0, "F_bar must be positive")?;
        check(self.fd.is_finite(), "Fd must be finite")?;
        check(self.contact_hold >= 0.0, "contact_hold must be non-negative")?;
        if let Some(vd) = &self.var_damping {
            vd.validate()?;
        }
        Ok(())
    }

    /// Gain applied to the estimated acceleration, zero when compensation is off.
    pub fn compensation_gain(&self) -> f64 {
        if self.mp_hat == 0.0 {
            return 0.0;
        }
        match self.compensation {
            CompensationGain::EstimatedMass => self.mp_hat,
            CompensationGain::InverseEstimate => 1.0 / self.mp_hat,
        }
    }
}

impl Default for ControllerParams {
    fn default() -> Self {
        ControllerParams::nominal()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantParams {
    /// Payload mass (kg).
    pub mp: f64,
    /// Payload damping (Ns/m).
    pub bp: f64,
    /// Coupling stiffness (N/m).
    pub ks: f64,
    /// Environment stiffness (N/m); zero is free space.
    pub ke: f64,
    /// Environment damping (Ns/m).
    pub be: f64,
    /// Robot velocity per commanded position, without delay.
    pub robot: RationalTF,
    /// Input delay of the robot (s).
    pub td: f64,
    /// Wall position (m).
    pub x_wall: f64,
    /// Sensor noise rms (N).
    pub noise_rms: f64,
    /// Optional human admittance, parallel to the environment.
    pub human: Option<RationalTF>,
}

impl PlantParams {
    pub fn nominal() -> Self {
        PlantParams {
            mp: 16.0,
            bp: 630.0,
            ks: 3e5,
            ke: 5e5,
            be: 0.0,
            robot: default_robot(),
            td: 2.4e-3,
            x_wall: 0.01,
            noise_rms: 0.14,
            human: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check(self.mp > 0.0, "Mp must be positive")?;
        check(self.bp >= 0.0, "Bp must be non-negative")?;
        check(self.ks > 0.0, "Ks must be positive")?;
        check(self.ke >= 0.0, "Ke must be non-negative")?;
        check(self.be >= 0.0, "Be must be non-negative")?;
        check(self.td >= 0.0 && self.td.is_finite(), "Td must be non-negative")?;
        check(self.x_wall.is_finite(), "x_wall must be finite")?;
        check(self.noise_rms >= 0.0, "noise_rms must be non-negative")?;
        check(self.robot.delay() == 0.0, "robot model must be delay-free (use Td)")?;
        check(self.robot.is_proper(), "robot model must be proper")
    }

    /// `P = 1/(Mp s + Bp)`
    pub fn payload(&self) -> RationalTF {
        tf(&[1.0], &[self.bp, self.mp])
    }

    /// `E = (Be s + Ke)/s`
    pub fn environment(&self) -> RationalTF {
        tf(&[self.ke, self.be], &[0.0, 1.0])
    }
}

impl Default for PlantParams {
    fn default() -> Self {
        PlantParams::nominal()
    }
}

/// `R = (100s² + 400s)/(5s² + 120s + 400)`
pub fn default_robot() -> RationalTF {
    tf(&[0.0, 400.0, 100.0], &[400.0, 120.0, 5.0])
}

fn tf(num: &[f64], den: &[f64]) -> RationalTF {
    RationalTF::from_coeffs(num, den).expect("fixed block is well formed")
}

fn check(ok: bool, msg: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg))
    }
}

/// Controller blocks of the admittance law.
#[derive(Debug, Clone, PartialEq)]
pub struct Blocks {
    /// `1/(Ma s² + Ba s)`
    pub a: RationalTF,
    /// `Kl s`
    pub cff: RationalTF,
    /// `Bfb ωv s/(s + ωv)`
    pub cfb: RationalTF,
    /// `ωv ωa s²/((s + ωa)(s + ωv))`, or `s²` when ideal.
    pub oa: RationalTF,
}

pub fn build_blocks(cp: &ControllerParams, ideal_acc: bool) -> Blocks {
    let a = tf(&[1.0], &[0.0, cp.ba, cp.ma]);
    let cff = tf(&[0.0, cp.kl], &[1.0]);
    let cfb = tf(&[0.0, cp.bfb * cp.omega_v], &[cp.omega_v, 1.0]);
    let oa = if ideal_acc {
        tf(&[0.0, 0.0, 1.0], &[1.0])
    } else {
        let den = Polynomial::new(alloc::vec![cp.omega_a, 1.0]) * Polynomial::new(alloc::vec![cp.omega_v, 1.0]);
        RationalTF::new(Polynomial::monomial(cp.omega_v * cp.omega_a, 2), den, 0.0)
            .expect("filter denominator is nonzero")
    };
    Blocks { a, cff, cfb, oa }
}

/// How the robot delay is represented when evaluating block responses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayModel {
    Exact,
    Pade(usize),
}

/// Free-space admittance `G = V/F`, contact impedance `Ē = F/V` and the
/// force-tracking loop `F/F^d` as single rational functions.
///
/// The closed loop is `-GĒ/(1 - GĒ)`: with `V = G(F - F^d)` and `F = ĒV`
/// this is the negative-feedback arrangement.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopModel {
    pub g: RationalTF,
    pub e_bar: RationalTF,
    pub closed: RationalTF,
    pub ideal_acc_comp: bool,
    pub pade_order: usize,
    blocks: Blocks,
    comp_gain: f64,
    robot: RationalTF,
    td: f64,
    payload: RationalTF,
    env: RationalTF,
    human: Option<RationalTF>,
    ks: f64,
}

pub fn build_loop(cp: &ControllerParams, pp: &PlantParams, ideal_acc: bool) -> Result<LoopModel> {
    build_loop_with(cp, pp, ideal_acc, DEFAULT_PADE_ORDER)
}

pub fn build_loop_with(
    cp: &ControllerParams,
    pp: &PlantParams,
    ideal_acc: bool,
    pade_order: usize,
) -> Result<LoopModel> {
    cp.validate()?;
    pp.validate()?;
    let blocks = build_blocks(cp, ideal_acc);
    let k = cp.compensation_gain();
    let integ = RationalTF::integrator();

    // A(1 + Cff)
    let ac = blocks.a.series(&RationalTF::unit().parallel(&blocks.cff)?)?;
    // Q = (Cfb - A(1+Cff) k Oa)/s, so that R/(1 + RQ) carries the loop denominator.
    let comp = ac.series(&blocks.oa)?.scale(k);
    let q = blocks.cfb.parallel(&comp.neg())?.series(&integ)?;
    let r = pp.robot.clone().with_delay(pp.td)?;
    let g = ac.neg().series(&r.feedback_pade(&q, pade_order)?)?;

    let e_bar = contact_impedance(pp)?;
    let open = g.series(&e_bar)?.neg();
    let closed = open.feedback_pade(&RationalTF::unit(), pade_order)?;

    Ok(LoopModel {
        g,
        e_bar,
        closed,
        ideal_acc_comp: ideal_acc,
        pade_order,
        blocks,
        comp_gain: k,
        robot: pp.robot.clone(),
        td: pp.td,
        payload: pp.payload(),
        env: pp.environment(),
        human: pp.human.clone(),
        ks: pp.ks,
    })
}

/// `Ē = (Ks/s) W/(W + P Ks/s)` with `W = 1 + P(E + H)`.
fn contact_impedance(pp: &PlantParams) -> Result<RationalTF> {
    let p = pp.payload();
    let spring = RationalTF::integrator().scale(pp.ks);
    let mut load = pp.environment();
    if let Some(hm) = &pp.human {
        load = load.parallel(hm)?;
    }
    let w = RationalTF::unit().parallel(&p.series(&load)?)?;
    let inner = p.series(&spring)?.series(&w.inverse()?)?;
    spring
        .series(&RationalTF::unit().feedback(&inner)?)?
        .minreal(CANCEL_TOL)
}

impl LoopModel {
    pub fn blocks(&self) -> &Blocks {
        &self.blocks
    }

    /// Loop gain `-GĒ`.
    pub fn loop_gain(&self) -> Result<RationalTF> {
        Ok(self.g.series(&self.e_bar)?.neg())
    }

    fn robot_response(&self, s: Complex64, delay: DelayModel) -> Result<Complex64> {
        let r = self.robot.eval(s);
        Ok(match delay {
            DelayModel::Exact => r * (-s * self.td).exp(),
            DelayModel::Pade(n) => r * pade(self.td, n)?.eval(s),
        })
    }

    /// `G(jω)` evaluated block by block.
    pub fn g_response(&self, omega: f64, delay: DelayModel) -> Result<Complex64> {
        let s = jw(omega)?;
        let b = &self.blocks;
        let ac = b.a.eval(s) * (Complex64::new(1.0, 0.0) + b.cff.eval(s));
        let r = self.robot_response(s, delay)?;
        let den = Complex64::new(1.0, 0.0) - ac * r * self.comp_gain * b.oa.eval(s) / s + r * b.cfb.eval(s) / s;
        finite(-ac * r / den, omega)
    }

    /// `Ē(jω)` evaluated block by block.
    pub fn e_bar_response(&self, omega: f64) -> Result<Complex64> {
        let s = jw(omega)?;
        let p = self.payload.eval(s);
        let mut load = self.env.eval(s);
        if let Some(hm) = &self.human {
            load += hm.eval(s);
        }
        let w = Complex64::new(1.0, 0.0) + p * load;
        let ks_s = self.ks / s;
        finite(ks_s * w / (w + p * ks_s), omega)
    }

    /// `F/F^d` at `jω`, `-GĒ/(1 - GĒ)` from block responses.
    pub fn closed_response(&self, omega: f64, delay: DelayModel) -> Result<Complex64> {
        let ge = self.g_response(omega, delay)? * self.e_bar_response(omega)?;
        finite(-ge / (Complex64::new(1.0, 0.0) - ge), omega)
    }
}

fn jw(omega: f64) -> Result<Complex64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidFrequency(omega));
    }
    Ok(Complex64::new(0.0, omega))
}

fn finite(v: Complex64, omega: f64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::PoleOnAxis { omega })
    }
}

/// Payload resonance `√(Ks/Mp)/2π` in Hz.
pub fn natural_frequency(mp: f64, ks: f64) -> f64 {
    libm::sqrt(ks / mp) / (2.0 * PI)
}

/// `ζ = Bp/(2√(Mp Ks))`
pub fn damping_ratio(bp: f64, mp: f64, ks: f64) -> f64 {
    bp / (2.0 * libm::sqrt(mp * ks))
}

/// Payload mass and damping giving resonance `f_n` (Hz) and damping ratio
/// `zeta` on a coupling of stiffness `ks`.
pub fn payload_for_mode(f_n: f64, zeta: f64, ks: f64) -> (f64, f64) {
    let wn = 2.0 * PI * f_n;
    let mp = ks / (wn * wn);
    (mp, 2.0 * zeta * libm::sqrt(mp * ks))
}
