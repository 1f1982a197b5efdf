//! Fixed-step simulation of controller, delayed robot, coupled payload and wall.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::discrete::{
    adapt_damping, admittance_step, apply_deadband, collision_step, AdmittanceState, DiscreteFilter, Method, CHANNELS,
};
use crate::error::{Error, Result};
use crate::lti::RationalTF;
use crate::plant::{build_blocks, ControllerParams, PlantParams};

/// Sensor noise scale once acceleration compensation is active (0.40 N / 0.14 N).
pub const COMPENSATION_NOISE_RATIO: f64 = 0.40 / 0.14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Track `F^d` from rest with the wall `x_wall` ahead of the payload.
    #[default]
    ForceReferenceContact,
    /// External force on the payload, no reference, environment removed.
    FreeSpaceJog,
    /// External force on the payload, no reference, environment present.
    ApproachAndContact,
}

/// Piecewise-linear force over time, held constant outside its span.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceProfile {
    times: Vec<f64>,
    forces: Vec<f64>,
}

impl ForceProfile {
    pub fn new(times: Vec<f64>, forces: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != forces.len() {
            return Err(Error::InvalidParameter(
                "force profile needs matching non-empty times and forces",
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "force profile times must be strictly increasing",
            ));
        }
        if forces.iter().chain(&times).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("force profile values must be finite"));
        }
        Ok(ForceProfile { times, forces })
    }

    pub fn constant(f: f64) -> Self {
        ForceProfile {
            times: alloc::vec![0.0],
            forces: alloc::vec![f],
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn forces(&self) -> &[f64] {
        &self.forces
    }

    pub fn at(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.forces[0];
        }
        if t >= self.times[n - 1] {
            return self.forces[n - 1];
        }
        let i = self.times.partition_point(|&x| x <= t);
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (f0, f1) = (self.forces[i - 1], self.forces[i]);
        f0 + (f1 - f0) * (t - t0) / (t1 - t0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimScenario {
    pub cp: ControllerParams,
    pub pp: PlantParams,
    /// Simulated time (s).
    pub duration: f64,
    pub force_profile: Option<ForceProfile>,
    pub mode: Mode,
    pub discretization: Method,
    pub collision_response: bool,
    pub full_stop: bool,
    pub seed: u64,
    /// Time over which `F^d` ramps from zero (s); zero applies it as a step.
    pub reference_ramp: f64,
    /// Environment also pulls when the payload is behind the wall.
    pub bilateral: bool,
    /// Payload integration substeps per sample.
    pub payload_substeps: usize,
    /// Position magnitude treated as divergence (m).
    pub divergence_bound: f64,
}

impl SimScenario {
    pub fn new(cp: ControllerParams, pp: PlantParams, duration: f64) -> Self {
        SimScenario {
            cp,
            pp,
            duration,
            force_profile: None,
            mode: Mode::ForceReferenceContact,
            discretization: Method::Tustin,
            collision_response: false,
            full_stop: false,
            seed: 0,
            reference_ramp: 0.0,
            bilateral: false,
            payload_substeps: 1,
            divergence_bound: 1.0,
        }
    }

    /// Contact experiment: `F^d = 30 N` toward a compliant wall 10 mm away.
    pub fn contact_experiment() -> Self {
        let pp = PlantParams {
            ke: 3.2e4,
            ..PlantParams::nominal()
        };
        SimScenario::new(ControllerParams::contact_experiment(), pp, 3.0)
    }

    pub fn validate(&self) -> Result<()> {
        self.cp.validate()?;
        self.pp.validate()?;
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(Error::InvalidParameter("duration must be positive"));
        }
        if !(self.reference_ramp >= 0.0) {
            return Err(Error::InvalidParameter("reference_ramp must be non-negative"));
        }
        if self.payload_substeps == 0 {
            return Err(Error::InvalidParameter("payload_substeps must be at least 1"));
        }
        if !(self.divergence_bound > 0.0) {
            return Err(Error::InvalidParameter("divergence_bound must be positive"));
        }
        delay_samples(self.pp.td, self.cp.h)?;
        Ok(())
    }

    /// Noise rms after the compensation inflation.
    pub fn effective_noise(&self) -> f64 {
        if self.cp.mp_hat > 0.0 {
            self.pp.noise_rms * COMPENSATION_NOISE_RATIO
        } else {
            self.pp.noise_rms
        }
    }
}

/// Number of whole samples in `td`.
pub fn delay_samples(td: f64, h: f64) -> Result<usize> {
    let n = libm::round(td / h);
    if (n * h - td).abs() > 1e-9 * td.max(h) {
        return Err(Error::DelayNotMultiple { delay: td, step: h });
    }
    Ok(n as usize)
}

/// Sampled signals of one run, all of equal length.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimTrace {
    pub t: Vec<f64>,
    /// Sensor force after the deadband (N).
    pub f_meas: Vec<f64>,
    /// Sensor force with noise, before the deadband (N).
    pub f_raw: Vec<f64>,
    pub x_cmd: Vec<f64>,
    pub x_robot: Vec<f64>,
    pub x_payload: Vec<f64>,
    pub v_robot: Vec<f64>,
    /// Filtered robot velocity seen by the controller (m/s).
    pub v_filtered: Vec<f64>,
    pub ba: Vec<f64>,
    /// Collision latch state.
    pub contact: Vec<bool>,
    /// Steps at which a contact event fired.
    pub detected: Vec<bool>,
}

impl SimTrace {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Index of the first contact event.
    pub fn first_event(&self) -> Option<usize> {
        self.detected.iter().position(|&d| d)
    }

    fn with_capacity(n: usize) -> Self {
        SimTrace {
            t: Vec::with_capacity(n),
            f_meas: Vec::with_capacity(n),
            f_raw: Vec::with_capacity(n),
            x_cmd: Vec::with_capacity(n),
            x_robot: Vec::with_capacity(n),
            x_payload: Vec::with_capacity(n),
            v_robot: Vec::with_capacity(n),
            v_filtered: Vec::with_capacity(n),
            ba: Vec::with_capacity(n),
            contact: Vec::with_capacity(n),
            detected: Vec::with_capacity(n),
        }
    }
}

/// Payload on the coupling spring, integrated by semi-implicit Euler.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Payload {
    pub x: f64,
    pub v: f64,
}

impl Payload {
    /// Environment reaction on the payload.
    pub fn environment_force(&self, pp: &PlantParams, bilateral: bool) -> f64 {
        let pen = self.x - pp.x_wall;
        if bilateral {
            -pp.ke * pen - pp.be * self.v
        } else if pen > 0.0 {
            (-pp.ke * pen - pp.be * self.v).min(0.0)
        } else {
            0.0
        }
    }

    /// Advances by `h` in `substeps` velocity-first Euler steps with the
    /// robot held at `x_robot`.
    pub fn step(&mut self, pp: &PlantParams, x_robot: f64, f_ext: f64, h: f64, substeps: usize, bilateral: bool) {
        let dt = h / substeps as f64;
        for _ in 0..substeps {
            let f = pp.ks * (x_robot - self.x) - pp.bp * self.v + self.environment_force(pp, bilateral) + f_ext;
            self.v += dt * f / pp.mp;
            self.x += dt * self.v;
        }
    }

    /// Kinetic plus coupling-spring energy.
    pub fn energy(&self, pp: &PlantParams, x_robot: f64) -> f64 {
        let d = x_robot - self.x;
        0.5 * pp.mp * self.v * self.v + 0.5 * pp.ks * d * d
    }
}

/// Runs the scenario and returns the sampled trace.
///
/// Each step: sense `F = Ks(x_r - x_p)` plus noise, apply the deadband and
/// acceleration compensation, form the controller input, run the admittance
/// (or collision) step, subtract the feedback-damping term, pass the command
/// through the delay line and robot model, and advance the payload.
pub fn simulate(sc: &SimScenario) -> Result<SimTrace> {
    sc.validate()?;
    let cp = &sc.cp;
    let pp = &sc.pp;
    let h = cp.h;
    let steps = libm::round(sc.duration / h) as usize;
    let nd = delay_samples(pp.td, h)?;

    let robot_pos = pp.robot.series(&RationalTF::integrator())?;
    let mut robot_x = DiscreteFilter::from_tf(&robot_pos, h, Method::Tustin)?;
    let mut robot_v = DiscreteFilter::from_tf(&pp.robot, h, Method::Tustin)?;
    let vel_filter = RationalTF::from_coeffs(&[0.0, cp.omega_v], &[cp.omega_v, 1.0])?;
    let mut vel = DiscreteFilter::from_tf(&vel_filter, h, Method::Tustin)?;
    let comp_gain = cp.compensation_gain();
    let mut acc = if comp_gain != 0.0 {
        Some(DiscreteFilter::from_tf(&build_blocks(cp, false).oa, h, Method::Tustin)?)
    } else {
        None
    };

    let mut ctrl = AdmittanceState::with_method(cp, sc.discretization)?;
    let mut line: VecDeque<f64> = core::iter::repeat_n(0.0, nd.saturating_sub(1)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
    let noise = sc.effective_noise();
    let detect = sc.collision_response || sc.full_stop;
    let env_pp;
    let plant = if sc.mode == Mode::FreeSpaceJog {
        env_pp = PlantParams {
            ke: 0.0,
            be: 0.0,
            ..pp.clone()
        };
        &env_pp
    } else {
        pp
    };

    let mut x_r = 0.0;
    let mut v_r = 0.0;
    let mut payload = Payload::default();
    let mut frozen: Option<f64> = None;
    let mut tr = SimTrace::with_capacity(steps);

    for k in 0..steps {
        let t = k as f64 * h;
        let n: f64 = StandardNormal.sample(&mut rng);
        let f_raw = pp.ks * (x_r - payload.x) + noise * n;
        let f = apply_deadband(f_raw, cp.f_dead);
        let f_c = match acc.as_mut() {
            Some(a) => f - comp_gain * a.step(x_r),
            None => f,
        };
        let (reference, f_ext) = match sc.mode {
            Mode::ForceReferenceContact => {
                let ramp = if sc.reference_ramp > 0.0 {
                    (t / sc.reference_ramp).min(1.0)
                } else {
                    1.0
                };
                (cp.fd * ramp, 0.0)
            }
            Mode::FreeSpaceJog | Mode::ApproachAndContact => (0.0, sc.force_profile.as_ref().map_or(0.0, |p| p.at(t))),
        };
        let mut u = [0.0; CHANNELS];
        u[0] = reference - f_c;
        let v_f = vel.step(x_r);
        adapt_damping(&mut ctrl, v_f, t, cp);

        let mut event = false;
        let cmd = match frozen {
            Some(x) => x,
            None => {
                let x_adm = if detect {
                    let (x, e) = collision_step(&mut ctrl, &u, &[f, 0.0, 0.0], &[v_f, 0.0, 0.0], t, cp)?;
                    event = e;
                    x[0]
                } else {
                    admittance_step(&mut ctrl, &u, cp)?[0]
                };
                let c = x_adm - cp.bfb * v_f;
                if event && sc.full_stop {
                    frozen = Some(c);
                }
                c
            }
        };

        tr.t.push(t);
        tr.f_meas.push(f);
        tr.f_raw.push(f_raw);
        tr.x_cmd.push(cmd);
        tr.x_robot.push(x_r);
        tr.x_payload.push(payload.x);
        tr.v_robot.push(v_r);
        tr.v_filtered.push(v_f);
        tr.ba.push(ctrl.ba_current);
        tr.contact.push(ctrl.was_contact || frozen.is_some());
        tr.detected.push(event);

        let delayed = if nd == 0 {
            cmd
        } else {
            line.push_back(cmd);
            line.pop_front().unwrap_or(0.0)
        };
        let x_next = robot_x.step(delayed);
        v_r = robot_v.step(delayed);
        payload.step(plant, x_r, f_ext, h, sc.payload_substeps, sc.bilateral);
        x_r = x_next;

        let magnitude = x_r.abs().max(payload.x.abs());
        if !(magnitude <= sc.divergence_bound) {
            return Err(Error::Divergence { time: t + h, magnitude });
        }
    }
    Ok(tr)
}

/// Runs the scenario with the full-stop response: after the first detection
/// the position command is frozen for the rest of the run.
pub fn run_full_stop(sc: &SimScenario) -> Result<SimTrace> {
    let mut sc = sc.clone();
    sc.full_stop = true;
    simulate(&sc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_interpolates() {
        let p = ForceProfile::new(alloc::vec![0.0, 1.0, 2.0], alloc::vec![0.0, 10.0, 0.0]).unwrap();
        assert_eq!(p.at(-1.0), 0.0);
        assert_eq!(p.at(0.5), 5.0);
        assert_eq!(p.at(1.5), 5.0);
        assert_eq!(p.at(3.0), 0.0);
        assert!(ForceProfile::new(alloc::vec![1.0, 1.0], alloc::vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn delay_sample_count() {
        assert_eq!(delay_samples(2.4e-3, 8e-4).unwrap(), 3);
        assert_eq!(delay_samples(0.0, 8e-4).unwrap(), 0);
        assert!(matches!(
            delay_samples(2.5e-3, 8e-4),
            Err(Error::DelayNotMultiple { .. })
        ));
    }

    #[test]
    fn free_space_rest_is_quiet() {
        let pp = PlantParams {
            ke: 0.0,
            noise_rms: 0.0,
            ..PlantParams::nominal()
        };
        let mut sc = SimScenario::new(ControllerParams::nominal(), pp, 0.5);
        sc.mode = Mode::FreeSpaceJog;
        let tr = simulate(&sc).unwrap();
        assert!(tr.f_raw.iter().chain(&tr.x_cmd).chain(&tr.x_robot).all(|&x| x == 0.0));
    }

    #[test]
    fn unilateral_wall_only_pushes() {
        let pp = PlantParams {
            be: 1e3,
            ..PlantParams::nominal()
        };
        let p = Payload {
            x: pp.x_wall + 1e-4,
            v: -1.0,
        };
        assert_eq!(p.environment_force(&pp, false), 0.0);
        assert!(p.environment_force(&pp, true) > 0.0);
    }
}
