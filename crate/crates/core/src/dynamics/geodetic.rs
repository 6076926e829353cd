//! Earth-fixed coordinates: rotation-angle based ECI to ECEF mapping and
//! WGS84 geodetic conversions.
//!
//! Earth orientation is modelled as a uniform spin about the ECI z axis:
//! adequate for station-keeping window geometry, where sub-arcsecond
//! precession and nutation corrections are far below the box widths.

use crate::consts::{OMEGA_EARTH, R_EARTH, WGS84_FLATTENING};
use nalgebra::{SMatrix, Vector3};

use super::EpochState;

/// Geodetic coordinates on the WGS84 ellipsoid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geodetic {
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub alt_km: f64,
}

/// Angle of the Greenwich meridian east of the ECI x axis at elapsed time
/// `t_s`, given its value `gst0_rad` at t = 0. Radians.
pub fn earth_rotation_angle(gst0_rad: f64, t_s: f64) -> f64 {
    gst0_rad + OMEGA_EARTH * t_s
}

/// Map an ECI vector into the Earth-fixed frame for a given rotation angle.
pub fn eci_to_ecef(r_eci_km: &Vector3<f64>, era_rad: f64) -> Vector3<f64> {
    let (s, c) = era_rad.sin_cos();
    Vector3::new(
        c * r_eci_km.x + s * r_eci_km.y,
        -s * r_eci_km.x + c * r_eci_km.y,
        r_eci_km.z,
    )
}

/// Wrap an angle in degrees to (-180, 180].
pub fn wrap_deg(x: f64) -> f64 {
    let mut y = (x + 180.0).rem_euclid(360.0);
    if y == 0.0 {
        y = 360.0;
    }
    y - 180.0
}

/// ECEF position to geodetic coordinates (Bowring's method, two refinement
/// passes, better than a millimetre everywhere off the exact pole axis).
pub fn ecef_to_geodetic(r_ecef_km: &Vector3<f64>) -> Geodetic {
    let a = R_EARTH;
    let f = WGS84_FLATTENING;
    let b = a * (1.0 - f);
    let e2 = f * (2.0 - f);
    let ep2 = e2 / (1.0 - e2);

    let x = r_ecef_km.x;
    let y = r_ecef_km.y;
    let z = r_ecef_km.z;
    let p = x.hypot(y);
    let lon = y.atan2(x);

    if p < 1e-9 {
        let lat = if z >= 0.0 { 90.0 } else { -90.0 };
        return Geodetic { lat_deg: lat, lon_deg: 0.0, alt_km: z.abs() - b };
    }

    let mut beta = (z * a).atan2(p * b);
    let mut lat = 0.0;
    for _ in 0..3 {
        let (sb, cb) = beta.sin_cos();
        lat = (z + ep2 * b * sb.powi(3)).atan2(p - e2 * a * cb.powi(3));
        beta = ((b / a) * lat.tan()).atan();
    }
    let (sl, cl) = lat.sin_cos();
    let n = a / (1.0 - e2 * sl * sl).sqrt();
    let alt = if cl.abs() > 1e-6 {
        p / cl - n
    } else {
        z / sl - n * (1.0 - e2)
    };
    Geodetic {
        lat_deg: lat.to_degrees(),
        lon_deg: lon.to_degrees(),
        alt_km: alt,
    }
}

/// Geodetic coordinates to ECEF position.
pub fn geodetic_to_ecef(g: &Geodetic) -> Vector3<f64> {
    let a = R_EARTH;
    let f = WGS84_FLATTENING;
    let e2 = f * (2.0 - f);
    let lat = g.lat_deg.to_radians();
    let lon = g.lon_deg.to_radians();
    let (sl, cl) = lat.sin_cos();
    let (so, co) = lon.sin_cos();
    let n = a / (1.0 - e2 * sl * sl).sqrt();
    Vector3::new(
        (n + g.alt_km) * cl * co,
        (n + g.alt_km) * cl * so,
        (n * (1.0 - e2) + g.alt_km) * sl,
    )
}

/// Geodetic coordinates of an ECI state, with the rotation angle evaluated
/// at the state's epoch (so epoch 0 corresponds to `gst0_rad`).
pub fn eci_to_geodetic(state: &EpochState, gst0_rad: f64) -> Geodetic {
    let era = earth_rotation_angle(gst0_rad, state.epoch_s);
    ecef_to_geodetic(&eci_to_ecef(&state.r_km, era))
}

/// Jacobian of (latitude, longitude) in degrees with respect to the ECI
/// state, by central differences on the position components. Latitude and
/// longitude do not depend on velocity, so those columns are zero.
pub fn geodetic_jacobian(state: &EpochState, gst0_rad: f64) -> SMatrix<f64, 2, 6> {
    let mut jac = SMatrix::<f64, 2, 6>::zeros();
    let h = 1e-3;
    for k in 0..3 {
        let mut dp = Vector3::zeros();
        dp[k] = h;
        let plus = eci_to_geodetic(
            &EpochState { epoch_s: state.epoch_s, r_km: state.r_km + dp, v_kms: state.v_kms },
            gst0_rad,
        );
        let minus = eci_to_geodetic(
            &EpochState { epoch_s: state.epoch_s, r_km: state.r_km - dp, v_kms: state.v_kms },
            gst0_rad,
        );
        jac[(0, k)] = wrap_deg(plus.lat_deg - minus.lat_deg) / (2.0 * h);
        jac[(1, k)] = wrap_deg(plus.lon_deg - minus.lon_deg) / (2.0 * h);
    }
    jac
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn geodetic_round_trip() {
        for &(lat, lon, alt) in &[
            (0.0, 0.0, 400.0),
            (45.0, -120.0, 35786.0),
            (-80.0, 170.0, 800.0),
            (89.0, 10.0, 500.0),
            (-0.05, -155.08, 35786.0),
        ] {
            let g = Geodetic { lat_deg: lat, lon_deg: lon, alt_km: alt };
            let r = geodetic_to_ecef(&g);
            let back = ecef_to_geodetic(&r);
            assert_relative_eq!(back.lat_deg, lat, epsilon = 1e-9);
            assert_relative_eq!(back.lon_deg, lon, epsilon = 1e-9);
            assert_relative_eq!(back.alt_km, alt, epsilon = 1e-6);
        }
    }

    #[test]
    fn rotation_angle_moves_longitude_west() {
        let r = Vector3::new(42164.0, 0.0, 0.0);
        let g0 = ecef_to_geodetic(&eci_to_ecef(&r, 0.0));
        let g1 = ecef_to_geodetic(&eci_to_ecef(&r, 0.1));
        assert_relative_eq!(g0.lon_deg, 0.0, epsilon = 1e-12);
        // an inertially fixed point drifts west as the Earth spins east
        assert_relative_eq!(g1.lon_deg, -0.1_f64.to_degrees(), epsilon = 1e-9);
    }

    #[test]
    fn jacobian_matches_curvature_radii_at_equator() {
        let alt = 400.0;
        let g = Geodetic { lat_deg: 0.0, lon_deg: 0.0, alt_km: alt };
        let r = geodetic_to_ecef(&g);
        let state = EpochState { epoch_s: 0.0, r_km: r, v_kms: Vector3::new(0.0, 7.7, 0.0) };
        let jac = geodetic_jacobian(&state, 0.0);

        let f = WGS84_FLATTENING;
        let e2 = f * (2.0 - f);
        let m = R_EARTH * (1.0 - e2); // meridian curvature radius at equator
        let expected_dlat_dz = (1.0 / (m + alt)).to_degrees();
        assert_relative_eq!(jac[(0, 2)], expected_dlat_dz, max_relative = 1e-6);

        let p = r.x.hypot(r.y);
        let expected_dlon_dy = (1.0 / p).to_degrees();
        assert_relative_eq!(jac[(1, 1)], expected_dlon_dy, max_relative = 1e-6);

        for col in 3..6 {
            assert_eq!(jac[(0, col)], 0.0);
            assert_eq!(jac[(1, col)], 0.0);
        }
    }

    #[test]
    fn wrap_keeps_half_open_interval() {
        assert_relative_eq!(wrap_deg(190.0), -170.0, epsilon = 1e-12);
        assert_relative_eq!(wrap_deg(-190.0), 170.0, epsilon = 1e-12);
        assert_relative_eq!(wrap_deg(180.0), 180.0, epsilon = 1e-12);
        assert_relative_eq!(wrap_deg(540.0), 180.0, epsilon = 1e-12);
        assert_relative_eq!(wrap_deg(0.0), 0.0, epsilon = 1e-12);
    }
}
