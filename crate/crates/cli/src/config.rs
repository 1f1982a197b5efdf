//! Run configuration: a TOML document with one table per concern.
//!
//! Every table and key is optional; missing keys take the defaults below.
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};

use admlab_core::analysis::{FrontierSpec, Response, SweepVariable, Variant, VariantDelta};
use admlab_core::discrete::Method;
use admlab_core::lti::RationalTF;
use admlab_core::plant::{CompensationGain, ControllerParams, PlantParams, VarDamping};
use admlab_core::sim::{ForceProfile, Mode, SimScenario};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub controller: ControllerConfig,
    pub plant: PlantConfig,
    pub simulation: SimulationConfig,
    pub bode: BodeConfig,
    pub frontier: FrontierConfig,
    pub compare: CompareConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compensation {
    #[default]
    EstimatedMass,
    InverseEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerConfig {
    pub ma: f64,
    pub ba: f64,
    pub kl: f64,
    pub bfb: f64,
    pub omega_v: f64,
    pub omega_a: f64,
    pub mp_hat: f64,
    pub compensation: Compensation,
    pub h: f64,
    pub f_dead: f64,
    pub f_bar: f64,
    pub fd: f64,
    pub contact_hold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub var_damping: Option<VarDampingConfig>,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        let c = ControllerParams::nominal();
        ControllerConfig {
            ma: c.ma,
            ba: c.ba,
            kl: c.kl,
            bfb: c.bfb,
            omega_v: c.omega_v,
            omega_a: c.omega_a,
            mp_hat: c.mp_hat,
            compensation: Compensation::EstimatedMass,
            h: c.h,
            f_dead: c.f_dead,
            f_bar: c.f_bar,
            fd: c.fd,
            contact_hold: c.contact_hold,
            var_damping: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VarDampingConfig {
    pub b_hi: f64,
    pub b_lo: f64,
    pub rate_coeff: f64,
    pub update_period: f64,
    pub max_delta: f64,
}

impl Default for VarDampingConfig {
    fn default() -> Self {
        let v = VarDamping::default();
        VarDampingConfig {
            b_hi: v.b_hi,
            b_lo: v.b_lo,
            rate_coeff: v.rate_coeff,
            update_period: v.update_period,
            max_delta: v.max_delta,
        }
    }
}

/// Polynomial coefficients are listed in ascending powers of `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlantConfig {
    pub mp: f64,
    pub bp: f64,
    pub ks: f64,
    pub ke: f64,
    pub be: f64,
    pub robot_num: Vec<f64>,
    pub robot_den: Vec<f64>,
    pub td: f64,
    pub x_wall: f64,
    pub noise_rms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub human_num: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub human_den: Option<Vec<f64>>,
}

impl Default for PlantConfig {
    fn default() -> Self {
        let p = PlantParams::nominal();
        PlantConfig {
            mp: p.mp,
            bp: p.bp,
            ks: p.ks,
            ke: p.ke,
            be: p.be,
            robot_num: p.robot.num().coeffs().to_vec(),
            robot_den: p.robot.den().coeffs().to_vec(),
            td: p.td,
            x_wall: p.x_wall,
            noise_rms: p.noise_rms,
            human_num: None,
            human_den: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeConfig {
    #[default]
    ForceReferenceContact,
    FreeSpaceJog,
    ApproachAndContact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discretization {
    #[default]
    Tustin,
    Euler,
}

impl From<Discretization> for Method {
    fn from(d: Discretization) -> Method {
        match d {
            Discretization::Tustin => Method::Tustin,
            Discretization::Euler => Method::Euler,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileConfig {
    pub times: Vec<f64>,
    pub forces: Vec<f64>,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            times: vec![0.0],
            forces: vec![0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationConfig {
    pub duration: f64,
    pub mode: ModeConfig,
    pub discretization: Discretization,
    pub collision_response: bool,
    pub full_stop: bool,
    pub seed: u64,
    pub reference_ramp: f64,
    pub bilateral: bool,
    pub payload_substeps: usize,
    pub divergence_bound: f64,
    /// Contact threshold for the metrics (N).
    pub contact_threshold: f64,
    /// Tail window for the noise estimate (s).
    pub noise_window: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileConfig>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            duration: 3.0,
            mode: ModeConfig::ForceReferenceContact,
            discretization: Discretization::Tustin,
            collision_response: false,
            full_stop: false,
            seed: 0,
            reference_ramp: 0.0,
            bilateral: false,
            payload_substeps: 1,
            divergence_bound: 1.0,
            contact_threshold: 1.0,
            noise_window: 0.5,
            profile: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseConfig {
    G,
    #[default]
    Closed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BodeConfig {
    pub variants: Vec<String>,
    pub response: ResponseConfig,
    /// Grid bounds in Hz.
    pub f_min: f64,
    pub f_max: f64,
    pub points: usize,
}

impl Default for BodeConfig {
    fn default() -> Self {
        BodeConfig {
            variants: Variant::ALL.iter().map(|v| v.label().to_string()).collect(),
            response: ResponseConfig::Closed,
            f_min: 0.05,
            f_max: 100.0,
            points: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepConfig {
    Ke,
    #[default]
    OmegaN,
    Zeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrontierConfig {
    pub variable: SweepConfig,
    pub values: Vec<f64>,
    /// Damping ratio held fixed in an `omega_n` sweep.
    pub zeta: f64,
    /// Resonance (Hz) held fixed in a `zeta` sweep.
    pub f_n: f64,
    pub min_ba: bool,
    pub ba_bounds: [f64; 2],
    pub max_kl: bool,
    pub kl_bounds: [f64; 2],
    pub rel_tol: f64,
    pub pade_order: usize,
}

impl Default for FrontierConfig {
    fn default() -> Self {
        FrontierConfig {
            variable: SweepConfig::OmegaN,
            values: vec![5.0, 10.0, 15.0, 20.0, 25.0],
            zeta: 0.05,
            f_n: 9.0,
            min_ba: true,
            ba_bounds: [1.0, 1e5],
            max_kl: true,
            kl_bounds: [0.02, 1.0],
            rel_tol: 1e-3,
            pade_order: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariantConfig {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ba: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kl: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bfb: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mp_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ke: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collision_response: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub full_stop: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discretization: Option<Discretization>,
}

impl VariantConfig {
    pub fn to_delta(&self) -> VariantDelta {
        VariantDelta {
            label: self.label.clone(),
            ba: self.ba,
            kl: self.kl,
            bfb: self.bfb,
            mp_hat: self.mp_hat,
            ke: self.ke,
            collision_response: self.collision_response,
            full_stop: self.full_stop,
            discretization: self.discretization.map(Method::from),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareConfig {
    pub variants: Vec<VariantConfig>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        let row = |label: &str, kl: Option<f64>, bfb: Option<f64>| VariantConfig {
            label: label.to_string(),
            kl,
            bfb,
            ..VariantConfig::default()
        };
        CompareConfig {
            variants: vec![
                row("baseline", Some(0.0), Some(0.0)),
                row("lead", None, Some(0.0)),
                row("lead_feedback", None, None),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            format: Format::Csv,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    /// Reads `path` (or starts from the defaults) and applies `key=value`
    /// overrides. Keys are dotted paths such as `controller.ba`; values use
    /// TOML syntax, bare words being taken as strings.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut doc = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                text.parse::<toml::Table>()
                    .map_err(|e| CliError::config(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        toml::Value::Table(doc)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn controller_params(&self) -> ControllerParams {
        let c = &self.controller;
        ControllerParams {
            ma: c.ma,
            ba: c.ba,
            kl: c.kl,
            bfb: c.bfb,
            omega_v: c.omega_v,
            omega_a: c.omega_a,
            mp_hat: c.mp_hat,
            compensation: match c.compensation {
                Compensation::EstimatedMass => CompensationGain::EstimatedMass,
                Compensation::InverseEstimate => CompensationGain::InverseEstimate,
            },
            h: c.h,
            f_dead: c.f_dead,
            f_bar: c.f_bar,
            fd: c.fd,
            contact_hold: c.contact_hold,
            var_damping: c.var_damping.map(|v| VarDamping {
                b_hi: v.b_hi,
                b_lo: v.b_lo,
                rate_coeff: v.rate_coeff,
                update_period: v.update_period,
                max_delta: v.max_delta,
            }),
        }
    }

    pub fn plant_params(&self) -> Result<PlantParams> {
        let p = &self.plant;
        let robot = RationalTF::from_coeffs(&p.robot_num, &p.robot_den)?;
        let human = match (&p.human_num, &p.human_den) {
            (Some(n), Some(d)) => Some(RationalTF::from_coeffs(n, d)?),
            (None, None) => None,
            _ => {
                return Err(CliError::config(
                    "plant.human_num and plant.human_den must be given together",
                ))
            }
        };
        Ok(PlantParams {
            mp: p.mp,
            bp: p.bp,
            ks: p.ks,
            ke: p.ke,
            be: p.be,
            robot,
            td: p.td,
            x_wall: p.x_wall,
            noise_rms: p.noise_rms,
            human,
        })
    }

    /// Validated simulation scenario.
    pub fn scenario(&self) -> Result<SimScenario> {
        let s = &self.simulation;
        let mut sc = SimScenario::new(self.controller_params(), self.plant_params()?, s.duration);
        sc.mode = match s.mode {
            ModeConfig::ForceReferenceContact => Mode::ForceReferenceContact,
            ModeConfig::FreeSpaceJog => Mode::FreeSpaceJog,
            ModeConfig::ApproachAndContact => Mode::ApproachAndContact,
        };
        sc.discretization = s.discretization.into();
        sc.collision_response = s.collision_response;
        sc.full_stop = s.full_stop;
        sc.seed = s.seed;
        sc.reference_ramp = s.reference_ramp;
        sc.bilateral = s.bilateral;
        sc.payload_substeps = s.payload_substeps;
        sc.divergence_bound = s.divergence_bound;
        sc.force_profile = match &s.profile {
            Some(p) => Some(ForceProfile::new(p.times.clone(), p.forces.clone())?),
            None => None,
        };
        sc.validate()?;
        if !(s.contact_threshold > 0.0) {
            return Err(CliError::config("simulation.contact_threshold must be positive"));
        }
        if !(s.noise_window > 0.0) {
            return Err(CliError::config("simulation.noise_window must be positive"));
        }
        Ok(sc)
    }

    pub fn bode_variants(&self) -> Result<Vec<Variant>> {
        if self.bode.variants.is_empty() {
            return Err(CliError::config("bode.variants must name at least one variant"));
        }
        self.bode
            .variants
            .iter()
            .map(|s| Variant::parse(s).ok_or_else(|| CliError::config(format!("unknown bode variant `{s}`"))))
            .collect()
    }

    pub fn bode_response(&self) -> Response {
        match self.bode.response {
            ResponseConfig::G => Response::G,
            ResponseConfig::Closed => Response::Closed,
        }
    }

    pub fn bode_grid(&self) -> Result<Vec<f64>> {
        let b = &self.bode;
        if !(b.f_min > 0.0 && b.f_max > b.f_min && b.f_max.is_finite()) {
            return Err(CliError::config("bode grid needs 0 < f_min < f_max"));
        }
        if b.points < 2 {
            return Err(CliError::config("bode.points must be at least 2"));
        }
        Ok(admlab_core::analysis::log_grid(b.f_min, b.f_max, b.points))
    }

    pub fn frontier_spec(&self) -> FrontierSpec {
        let f = &self.frontier;
        let variable = match f.variable {
            SweepConfig::Ke => SweepVariable::Ke,
            SweepConfig::OmegaN => SweepVariable::OmegaN { zeta: f.zeta },
            SweepConfig::Zeta => SweepVariable::Zeta { f_n: f.f_n },
        };
        FrontierSpec {
            variable,
            values: f.values.clone(),
            ba_bounds: f.min_ba.then_some((f.ba_bounds[0], f.ba_bounds[1])),
            kl_bounds: f.max_kl.then_some((f.kl_bounds[0], f.kl_bounds[1])),
            rel_tol: f.rel_tol,
            pade_order: f.pade_order,
        }
    }
}

fn apply_override(doc: &mut toml::Table, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("override `{spec}` is not of the form key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::config(format!("bad override key `{key}`")));
    }
    let (last, path) = parts.split_last().expect("split yields at least one part");
    let mut table = doc;
    for p in path {
        let entry = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| CliError::config(format!("override key `{key}`: `{p}` is not a table")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_core() {
        let c = RunConfig::default();
        assert_eq!(c.controller_params(), ControllerParams::nominal());
        assert_eq!(c.plant_params().unwrap(), PlantParams::nominal());
    }

    #[test]
    fn override_creates_tables() {
        let c = RunConfig::load(
            None,
            &["controller.ba=800".into(), "simulation.mode=free_space_jog".into()],
        )
        .unwrap();
        assert_eq!(c.controller.ba, 800.0);
        assert_eq!(c.simulation.mode, ModeConfig::FreeSpaceJog);
    }

    #[test]
    fn unknown_key_rejected() {
        let e = RunConfig::from_toml("[controller]\nbeta = 1.0\n").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(RunConfig::load(None, &["plant.nope=1".into()]).is_err());
    }
}
