//! Classical orbital elements and conversions to Cartesian state.

use crate::consts::MU_EARTH;
use nalgebra::{Matrix3, Vector3};

use super::EpochState;

/// Classical Keplerian elements. Angles in radians, semi-major axis in km.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Elements {
    pub a_km: f64,
    pub e: f64,
    pub i_rad: f64,
    pub raan_rad: f64,
    pub argp_rad: f64,
    pub true_anom_rad: f64,
}

impl Elements {
    /// Convenience constructor with angles in degrees.
    #[allow(clippy::too_many_arguments)]
    pub fn from_degrees(a_km: f64, e: f64, i: f64, raan: f64, argp: f64, true_anom: f64) -> Self {
        Self {
            a_km,
            e,
            i_rad: i.to_radians(),
            raan_rad: raan.to_radians(),
            argp_rad: argp.to_radians(),
            true_anom_rad: true_anom.to_radians(),
        }
    }
}

/// Rotation about the z axis by `angle`, applied to perifocal coordinates.
fn rot_z(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn rot_x(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

/// Cartesian ECI state from elements at the given epoch.
pub fn state_from_elements(epoch_s: f64, el: &Elements, mu: f64) -> EpochState {
    let p = el.a_km * (1.0 - el.e * el.e);
    let (s_nu, c_nu) = el.true_anom_rad.sin_cos();
    let r_mag = p / (1.0 + el.e * c_nu);
    let r_pf = Vector3::new(r_mag * c_nu, r_mag * s_nu, 0.0);
    let coeff = (mu / p).sqrt();
    let v_pf = Vector3::new(-coeff * s_nu, coeff * (el.e + c_nu), 0.0);
    let dcm = rot_z(el.raan_rad) * rot_x(el.i_rad) * rot_z(el.argp_rad);
    EpochState {
        epoch_s,
        r_km: dcm * r_pf,
        v_kms: dcm * v_pf,
    }
}

/// Osculating semi-major axis from the vis-viva integral, km.
pub fn semi_major_axis(state: &EpochState, mu: f64) -> f64 {
    let r = state.r_km.norm();
    let v2 = state.v_kms.norm_squared();
    1.0 / (2.0 / r - v2 / mu)
}

/// Orbital period for a semi-major axis, seconds.
pub fn period(a_km: f64, mu: f64) -> f64 {
    2.0 * std::f64::consts::PI * (a_km.powi(3) / mu).sqrt()
}
