//! Frequency sweeps, stability frontiers and trace metrics.

mod bode;
mod frontier;
mod metrics;
mod spectrum;

pub use bode::{bode_sweep, default_grid, log_grid, resonance_peak, response, BodeCurve, Response, Variant};
pub use frontier::{
    bisect, dedup_values, frontier_point, loop_stable, scan_frontier, swept_plant, validate_spec, FrontierPoint,
    FrontierSpec, StabilityFrontier, SweepVariable,
};
pub use metrics::{
    compare_variants, energy, smoothed_rate, tail_std, trace_metrics, ContactMetrics, MetricsRow, VariantDelta,
};
pub use spectrum::{dominant_frequency, fft, magnitude_spectrum};
