use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lti::DEFAULT_PADE_ORDER;
use crate::plant::{build_loop_with, payload_for_mode, ControllerParams, PlantParams};

/// Quantity varied along a frontier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepVariable {
    /// Environment stiffness (N/m).
    Ke,
    /// Payload resonance (Hz) at fixed damping ratio; `Mp` and `Bp` follow from `Ks`.
    OmegaN { zeta: f64 },
    /// Payload damping ratio at fixed resonance (Hz).
    Zeta { f_n: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    /// Bracket for the minimum stable damping, `None` to skip.
    pub ba_bounds: Option<(f64, f64)>,
    /// Bracket for the maximum stable lead gain, `None` to skip.
    pub kl_bounds: Option<(f64, f64)>,
    pub rel_tol: f64,
    pub pade_order: usize,
}

impl FrontierSpec {
    /// Both frontiers with the default brackets: `Ba` in `[1, 1e5]`,
    /// `Kl` from the controller's own value up to 1 s.
    pub fn new(variable: SweepVariable, values: Vec<f64>, cp: &ControllerParams) -> Self {
        FrontierSpec {
            variable,
            values,
            ba_bounds: Some((1.0, 1e5)),
            kl_bounds: Some((cp.kl, 1.0)),
            rel_tol: 1e-3,
            pade_order: DEFAULT_PADE_ORDER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierPoint {
    pub value: f64,
    pub min_stable_ba: Option<f64>,
    pub max_stable_kl: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityFrontier {
    pub sweep_variable: SweepVariable,
    pub points: Vec<FrontierPoint>,
}

/// Plant with the sweep variable set to `value`. The human block is dropped.
pub fn swept_plant(pp: &PlantParams, variable: SweepVariable, value: f64) -> PlantParams {
    let mut p = pp.clone();
    p.human = None;
    match variable {
        SweepVariable::Ke => p.ke = value,
        SweepVariable::OmegaN { zeta } => {
            let (mp, bp) = payload_for_mode(value, zeta, p.ks);
            p.mp = mp;
            p.bp = bp;
        }
        SweepVariable::Zeta { f_n } => {
            let (mp, bp) = payload_for_mode(f_n, value, p.ks);
            p.mp = mp;
            p.bp = bp;
        }
    }
    p
}

/// Linear stability of the in-contact force loop.
pub fn loop_stable(cp: &ControllerParams, pp: &PlantParams, pade_order: usize) -> Result<bool> {
    let m = build_loop_with(cp, pp, false, pade_order)?;
    Ok(m.closed.stability(pade_order)?.stable)
}

/// Bisects `[lo, hi]` for the point where `stable` changes.
///
/// Returns the bracket `(lo, hi)` after convergence; `stable(lo)` and
/// `stable(hi)` keep their initial, differing values.
pub fn bisect(
    mut stable: impl FnMut(f64) -> Result<bool>,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    let s_lo = stable(lo)?;
    let s_hi = stable(hi)?;
    if s_lo == s_hi {
        return Err(Error::NoBracket {
            lo,
            hi,
            state: if s_lo { "stable" } else { "unstable" },
        });
    }
    while hi - lo > rel_tol * hi.abs() {
        let mid = 0.5 * (lo + hi);
        if stable(mid)? == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Frontier at a single sweep value.
pub fn frontier_point(
    cp: &ControllerParams,
    pp: &PlantParams,
    spec: &FrontierSpec,
    value: f64,
) -> Result<FrontierPoint> {
    let plant = swept_plant(pp, spec.variable, value);
    let order = spec.pade_order;
    let min_stable_ba = match spec.ba_bounds {
        Some((lo, hi)) => {
            let f = |ba: f64| loop_stable(&ControllerParams { ba, ..cp.clone() }, &plant, order);
            let (_, hi) = bisect(f, lo, hi, spec.rel_tol)?;
            Some(hi)
        }
        None => None,
    };
    let max_stable_kl = match spec.kl_bounds {
        Some((lo, hi)) => {
            let f = |kl: f64| loop_stable(&ControllerParams { kl, ..cp.clone() }, &plant, order);
            let (lo, _) = bisect(f, lo, hi, spec.rel_tol)?;
            Some(lo)
        }
        None => None,
    };
    Ok(FrontierPoint {
        value,
        min_stable_ba,
        max_stable_kl,
    })
}

/// Sweep values with exact duplicates removed, first occurrence kept.
pub fn dedup_values(values: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    for &v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Minimum stable `Ba` (bisected downward) and maximum stable `Kl`
/// (bisected upward) at each sweep value.
pub fn scan_frontier(cp: &ControllerParams, pp: &PlantParams, spec: &FrontierSpec) -> Result<StabilityFrontier> {
    validate_spec(spec)?;
    let points = dedup_values(&spec.values)
        .into_iter()
        .map(|v| frontier_point(cp, pp, spec, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilityFrontier {
        sweep_variable: spec.variable,
        points,
    })
}

pub fn validate_spec(spec: &FrontierSpec) -> Result<()> {
    if spec.values.is_empty() {
        return Err(Error::InvalidParameter("frontier needs at least one sweep value"));
    }
    if spec.values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidParameter("sweep values must be finite and non-negative"));
    }
    if !(spec.rel_tol > 0.0 && spec.rel_tol < 1.0) {
        return Err(Error::InvalidParameter("rel_tol must lie in (0, 1)"));
    }
    for (lo, hi) in spec.ba_bounds.iter().chain(spec.kl_bounds.iter()) {
        if !(lo < hi) || *lo < 0.0 {
            return Err(Error::InvalidParameter("frontier bracket must satisfy 0 <= lo < hi"));
        }
    }
    if spec.pade_order == 0 {
        return Err(Error::InvalidParameter("pade order must be at least 1"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_threshold() {
        let (lo, hi) = bisect(|x| Ok(x > 3.7), 0.0, 10.0, 1e-6).unwrap();
        assert!(lo <= 3.7 && hi > 3.7 && hi - lo <= 1e-5);
    }

    #[test]
    fn bisection_needs_bracket() {
        let e = bisect(|_| Ok(true), 0.0, 1.0, 1e-3).unwrap_err();
        assert_eq!(e.class(), "NoBracketError");
    }

    #[test]
    fn dedup_keeps_order() {
        assert_eq!(dedup_values(&[3.0, 1.0, 3.0, 2.0, 1.0]), alloc::vec![3.0, 1.0, 2.0]);
    }
}
