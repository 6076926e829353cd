//! Low-precision analytic Sun and Moon positions.
//!
//! Truncated series of the usual almanac form, good to a few hundredths of a
//! degree for the Sun and a few tenths for the Moon. That is far below the
//! size of third-body and SRP accelerations' influence on day-scale planning
//! windows, and keeps the toolkit free of ephemeris files. Epoch 0 is J2000.

use super::super::consts::{AU_KM, JULIAN_CENTURY_S, R_EARTH};
use nalgebra::Vector3;

fn centuries(epoch_s: f64) -> f64 {
    epoch_s / JULIAN_CENTURY_S
}

fn mean_obliquity(t: f64) -> f64 {
    (23.439291 - 0.0130042 * t).to_radians()
}

/// Geocentric ECI Sun position [km].
pub fn sun_position(epoch_s: f64) -> Vector3<f64> {
    let t = centuries(epoch_s);
    let lambda_m = 280.460 + 36000.771 * t; // mean longitude [deg]
    let m = (357.5291092 + 35999.05034 * t).to_radians();
    let lambda = (lambda_m + 1.914666471 * m.sin() + 0.019994643 * (2.0 * m).sin()).to_radians();
    let r_au = 1.000140612 - 0.016708617 * m.cos() - 0.000139589 * (2.0 * m).cos();
    let eps = mean_obliquity(t);
    let r = r_au * AU_KM;
    Vector3::new(
        r * lambda.cos(),
        r * eps.cos() * lambda.sin(),
        r * eps.sin() * lambda.sin(),
    )
}

/// Geocentric ECI Moon position [km].
pub fn moon_position(epoch_s: f64) -> Vector3<f64> {
    let t = centuries(epoch_s);
    let d = |deg: f64| deg.to_radians();
    let lambda = d(218.32 + 481267.8813 * t)
        + d(6.29) * d(134.9 + 477198.85 * t).sin()
        - d(1.27) * d(259.2 - 413335.38 * t).sin()
        + d(0.66) * d(235.7 + 890534.23 * t).sin()
        + d(0.21) * d(269.9 + 954397.70 * t).sin()
        - d(0.19) * d(357.5 + 35999.05 * t).sin()
        - d(0.11) * d(186.6 + 966404.05 * t).sin();
    let phi = d(5.13) * d(93.3 + 483202.03 * t).sin()
        + d(0.28) * d(228.2 + 960400.87 * t).sin()
        - d(0.28) * d(318.3 + 6003.18 * t).sin()
        - d(0.17) * d(217.6 - 407332.20 * t).sin();
    let parallax = d(0.9508)
        + d(0.0518) * d(134.9 + 477198.85 * t).cos()
        + d(0.0095) * d(259.2 - 413335.38 * t).cos()
        + d(0.0078) * d(235.7 + 890534.23 * t).cos()
        + d(0.0028) * d(269.9 + 954397.70 * t).cos();
    let r = R_EARTH / parallax.sin();
    let eps = mean_obliquity(t);
    let (sl, cl) = (lambda.sin(), lambda.cos());
    let (sp, cp) = (phi.sin(), phi.cos());
    let (se, ce) = (eps.sin(), eps.cos());
    Vector3::new(
        r * cp * cl,
        r * (ce * cp * sl - se * sp),
        r * (se * cp * sl + ce * sp),
    )
}
