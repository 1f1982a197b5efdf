//! Discrete-time admittance controller and discretization.

mod admittance;
mod difference;

pub use admittance::{
    adapt_damping, admittance_step, apply_deadband, apply_deadband_all, collision_step, contact_detected,
    damping_target, AdmittanceCoeffs, AdmittanceState, CHANNELS, TRANSLATIONAL,
};
pub use difference::{discretize, DifferenceEq, DiscreteFilter, Method};
