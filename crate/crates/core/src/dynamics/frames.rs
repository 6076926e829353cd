//! Local orbital frames.

use nalgebra::{Matrix3, Vector3};

use super::DynamicsError;

/// Rotation matrix from the radial / transverse / normal frame to ECI,
/// built from an ECI position and velocity. Columns are the RTN basis
/// vectors expressed in ECI, so `m * v_rtn` maps RTN coordinates to ECI.
pub fn rtn_to_eci(r_km: &Vector3<f64>, v_kms: &Vector3<f64>) -> Result<Matrix3<f64>, DynamicsError> {
    let r_norm = r_km.norm();
    if r_norm < 1.0 {
        return Err(DynamicsError::DegenerateFrame);
    }
    let radial = r_km / r_norm;
    let h = r_km.cross(v_kms);
    let h_norm = h.norm();
    if h_norm < 1e-9 * r_norm {
        return Err(DynamicsError::DegenerateFrame);
    }
    let normal = h / h_norm;
    let transverse = normal.cross(&radial);
    Ok(Matrix3::from_columns(&[radial, transverse, normal]))
}
