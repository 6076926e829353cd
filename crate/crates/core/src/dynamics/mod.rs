//! Orbital dynamics: force models, numerical propagation, flow-map
//! sensitivities, frames, and geodetic coordinates.
//!
//! The propagation state is always an ECI Cartesian position/velocity pair in
//! km and km/s; epochs are seconds past the reference epoch (J2000 for the
//! analytic Sun/Moon positions). Segment flow maps are expanded to first
//! order (state transition matrix and control sensitivity) by integrating the
//! variational equations alongside the state, and to second order by central
//! finite differences of that first-order expansion.

mod ephemeris;
mod forces;
mod frames;
mod geodetic;
mod grid;
mod integrator;
mod kepler;
mod sensitivity;

pub use ephemeris::{moon_position, sun_position};
pub use forces::{acceleration, zonal_potential, ExpAtmosphere};
pub use frames::rtn_to_eci;
pub use geodetic::{
    earth_rotation_angle, ecef_to_geodetic, eci_to_ecef, eci_to_geodetic, geodetic_jacobian,
    geodetic_to_ecef, wrap_deg, Geodetic,
};
pub use grid::{coast_grid, controlled_grid, segment_bundles, NodeGrid};
pub use integrator::{DormandPrince54, OdeSystem, StepRecord};
pub use kepler::{period, semi_major_axis, state_from_elements, Elements};
pub use sensitivity::{
    flow_sensitivities, sensitivities, ControlledDynamics, FlowTensor, LinearSystem,
    OrbitalDynamics, SensitivityBundle, SensitivityOptions,
};

use nalgebra::{Vector3, Vector6};
use thiserror::Error;

/// Errors raised by propagation and frame transforms.
#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("segment duration must be positive, got {0} s")]
    NonPositiveDuration(f64),
    #[error("step size underflow at t = {t} s (h = {h} s); dynamics too stiff for tolerances")]
    StepUnderflow { t: f64, h: f64 },
    #[error("integration exceeded {0} steps")]
    TooManySteps(usize),
    #[error("non-finite state encountered at t = {0} s")]
    NonFiniteState(f64),
    #[error("radius {0} km is inside the central body")]
    SubsurfaceRadius(f64),
    #[error("degenerate state: position and velocity are parallel or zero")]
    DegenerateFrame,
}

/// An ECI Cartesian state tagged with its epoch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochState {
    /// Seconds past the reference epoch.
    pub epoch_s: f64,
    /// ECI position [km].
    pub r_km: Vector3<f64>,
    /// ECI velocity [km/s].
    pub v_kms: Vector3<f64>,
}

impl EpochState {
    pub fn new(epoch_s: f64, r_km: Vector3<f64>, v_kms: Vector3<f64>) -> Self {
        Self { epoch_s, r_km, v_kms }
    }

    /// Stacked (position, velocity) 6-vector.
    pub fn to_vector6(&self) -> Vector6<f64> {
        Vector6::new(
            self.r_km.x, self.r_km.y, self.r_km.z, self.v_kms.x, self.v_kms.y, self.v_kms.z,
        )
    }

    pub fn from_vector6(epoch_s: f64, y: &Vector6<f64>) -> Self {
        Self {
            epoch_s,
            r_km: Vector3::new(y[0], y[1], y[2]),
            v_kms: Vector3::new(y[3], y[4], y[5]),
        }
    }
}

/// Ballistic and radiative properties of one spacecraft.
#[derive(Clone, Copy, Debug)]
pub struct SpacecraftParams {
    /// Mass [kg].
    pub mass_kg: f64,
    /// Drag reference area [m^2].
    pub drag_area_m2: f64,
    /// Drag coefficient.
    pub c_d: f64,
    /// SRP reference area [m^2].
    pub srp_area_m2: f64,
    /// Reflectivity coefficient.
    pub c_r: f64,
    /// Hard-body radius [m].
    pub hbr_m: f64,
}

/// Which perturbations act on top of the two-body field.
#[derive(Clone, Copy, Debug)]
pub struct ForceModelConfig {
    /// Highest zonal harmonic degree: 0 (two-body only), 2, 3, or 4.
    pub zonal_degree: u8,
    /// Exponential atmosphere, if drag is modeled.
    pub drag: Option<ExpAtmosphere>,
    /// Cannonball solar radiation pressure (no eclipse model).
    pub srp: bool,
    /// Sun and Moon point-mass accelerations.
    pub third_body: bool,
    /// Earth rotation angle at epoch 0 [rad] (linear sidereal model).
    pub gst0_rad: f64,
}

impl ForceModelConfig {
    /// Two-body field only; rotation angle zero.
    pub fn two_body() -> Self {
        Self { zonal_degree: 0, drag: None, srp: false, third_body: false, gst0_rad: 0.0 }
    }
}

/// Propagate one forced segment: constant ECI control acceleration over a
/// positive duration. This is the building block the planner's node grid is
/// made of.
pub fn propagate_segment(
    state: &EpochState,
    control_kms2: &Vector3<f64>,
    dt_s: f64,
    sc: &SpacecraftParams,
    cfg: &ForceModelConfig,
) -> Result<EpochState, DynamicsError> {
    if dt_s <= 0.0 {
        return Err(DynamicsError::NonPositiveDuration(dt_s));
    }
    propagate_free(state, control_kms2, dt_s, sc, cfg)
}

/// Propagation without the positive-duration restriction; negative durations
/// integrate backward (used to recover the window start from a state given at
/// closest approach).
pub fn propagate_free(
    state: &EpochState,
    control_kms2: &Vector3<f64>,
    dt_s: f64,
    sc: &SpacecraftParams,
    cfg: &ForceModelConfig,
) -> Result<EpochState, DynamicsError> {
    let dynamics = OrbitalDynamics { sc: *sc, cfg: *cfg };
    sensitivity::propagate_state(&dynamics, state, control_kms2, dt_s)
}
