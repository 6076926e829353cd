//! Node grids: states and segment flow-map expansions on an evenly spaced
//! time mesh.

use super::sensitivity::{
    flow_sensitivities, OrbitalDynamics, SensitivityBundle, SensitivityOptions,
};
use super::{DynamicsError, EpochState, ForceModelConfig, SpacecraftParams};
use nalgebra::{Vector3, Vector6};
use rayon::prelude::*;

/// A trajectory sampled at N+1 evenly spaced nodes with the N segment
/// expansions between them.
#[derive(Clone, Debug)]
pub struct NodeGrid {
    /// Node epochs, seconds; length N+1.
    pub epochs: Vec<f64>,
    /// Node states (ECI km, km/s); length N+1.
    pub states: Vec<Vector6<f64>>,
    /// Segment expansions; length N.
    pub bundles: Vec<SensitivityBundle>,
}

impl NodeGrid {
    pub fn num_segments(&self) -> usize {
        self.bundles.len()
    }
}

/// Expand every segment around the given node states and controls. The
/// segments are independent once their expansion points are fixed, so this
/// runs in parallel; results are ordered by segment regardless of schedule.
pub fn segment_bundles(
    epochs: &[f64],
    states: &[Vector6<f64>],
    controls: &[Vector3<f64>],
    dt_s: f64,
    sc: &SpacecraftParams,
    cfg: &ForceModelConfig,
    opts: &SensitivityOptions,
) -> Result<Vec<SensitivityBundle>, DynamicsError> {
    let n = controls.len();
    assert!(states.len() >= n && epochs.len() >= n);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let dynamics = OrbitalDynamics { sc: *sc, cfg: *cfg };
            flow_sensitivities(&dynamics, epochs[i], &states[i], &controls[i], dt_s, opts)
        })
        .collect()
}

fn build_grid(
    x0: &EpochState,
    controls: &[Vector3<f64>],
    dt_s: f64,
    sc: &SpacecraftParams,
    cfg: &ForceModelConfig,
    opts: &SensitivityOptions,
) -> Result<NodeGrid, DynamicsError> {
    if dt_s <= 0.0 {
        return Err(DynamicsError::NonPositiveDuration(dt_s));
    }
    let n = controls.len();
    let dynamics = OrbitalDynamics { sc: *sc, cfg: *cfg };
    let mut epochs = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    epochs.push(x0.epoch_s);
    states.push(x0.to_vector6());
    let mut current = *x0;
    for u in controls {
        current = super::sensitivity::propagate_state(&dynamics, &current, u, dt_s)?;
        epochs.push(current.epoch_s);
        states.push(current.to_vector6());
    }
    let bundles = segment_bundles(&epochs, &states, controls, dt_s, sc, cfg, opts)?;
    Ok(NodeGrid { epochs, states, bundles })
}

/// Ballistic grid: propagate `n_segments` coast arcs of `dt_s` seconds.
pub fn coast_grid(
    x0: &EpochState,
    n_segments: usize,
    dt_s: f64,
    sc: &SpacecraftParams,
    cfg: &ForceModelConfig,
    opts: &SensitivityOptions,
) -> Result<NodeGrid, DynamicsError> {
    let controls = vec![Vector3::zeros(); n_segments];
    build_grid(x0, &controls, dt_s, sc, cfg, opts)
}

/// Controlled grid: chain segments, each flown with its constant control
/// acceleration (ECI km/s^2).
pub fn controlled_grid(
    x0: &EpochState,
    controls: &[Vector3<f64>],
    dt_s: f64,
    sc: &SpacecraftParams,
    cfg: &ForceModelConfig,
    opts: &SensitivityOptions,
) -> Result<NodeGrid, DynamicsError> {
    build_grid(x0, controls, dt_s, sc, cfg, opts)
}
