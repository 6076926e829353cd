//! Physical and geodetic constants.
//!
//! Values follow the usual WGS-84 / EGM-96 conventions used in conjunction
//! assessment tooling.

/// Earth gravitational parameter [km^3/s^2].
pub const MU_EARTH: f64 = 398600.4418;

/// WGS-84 equatorial radius [km]. Also the reference radius of the zonal
/// harmonic expansion.
pub const R_EARTH: f64 = 6378.137;

/// WGS-84 flattening (dimensionless).
pub const WGS84_FLATTENING: f64 = 1.0 / 298.257223563;

/// Zonal harmonic coefficients (unnormalized). `J2` positive by the usual
/// sign convention, `J3`/`J4` negative.
pub const J2: f64 = 1.082626683e-3;
pub const J3: f64 = -2.532656485e-6;
pub const J4: f64 = -1.619621591e-6;

/// Earth rotation rate [rad/s] (sidereal).
pub const OMEGA_EARTH: f64 = 7.2921158553e-5;

/// Sun gravitational parameter [km^3/s^2].
pub const MU_SUN: f64 = 1.32712440018e11;

/// Moon gravitational parameter [km^3/s^2].
pub const MU_MOON: f64 = 4902.800066;

/// Astronomical unit [km].
pub const AU_KM: f64 = 1.495978707e8;

/// Solar radiation pressure at 1 AU [N/m^2].
pub const SRP_PRESSURE_AU: f64 = 4.56e-6;

/// Seconds per Julian day and per Julian century.
pub const DAY_S: f64 = 86400.0;
pub const JULIAN_CENTURY_S: f64 = 36525.0 * DAY_S;
