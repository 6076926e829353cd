//! Perturbation force models: zonal gravity to J4, exponential-atmosphere
//! drag, cannonball SRP, and Sun/Moon point masses.
//!
//! Everything returns ECI accelerations in km/s^2. The zonal field is
//! validated in tests against a finite-difference gradient of
//! [`zonal_potential`], so the closed-form component expressions below cannot
//! silently carry a sign error.

use super::super::consts::{
    J2, J3, J4, MU_EARTH, MU_MOON, MU_SUN, OMEGA_EARTH, R_EARTH, SRP_PRESSURE_AU, AU_KM,
};
use super::ephemeris::{moon_position, sun_position};
use super::{ForceModelConfig, SpacecraftParams};
use nalgebra::Vector3;

/// Exponential atmosphere: rho(h) = rho0 * exp(-(h - h0)/H) with geocentric
/// altitude h = |r| - R_earth.
#[derive(Clone, Copy, Debug)]
pub struct ExpAtmosphere {
    /// Density at the reference altitude [kg/m^3].
    pub rho0_kgm3: f64,
    /// Reference altitude [km].
    pub ref_alt_km: f64,
    /// Scale height [km].
    pub scale_height_km: f64,
}

impl ExpAtmosphere {
    /// Table values for the 400-450 km band, a reasonable default for the
    /// low-orbit scenarios this toolkit ships with.
    pub fn leo_default() -> Self {
        Self { rho0_kgm3: 3.725e-12, ref_alt_km: 400.0, scale_height_km: 58.515 }
    }

    pub fn density(&self, alt_km: f64) -> f64 {
        self.rho0_kgm3 * (-(alt_km - self.ref_alt_km) / self.scale_height_km).exp()
    }
}

/// Zonal gravity potential per unit mass [km^2/s^2], including the point-mass
/// term, up to the configured degree (0, 2, 3, or 4). The acceleration is the
/// gradient of this function; tests difference it to check the closed forms.
pub fn zonal_potential(r: &Vector3<f64>, degree: u8) -> f64 {
    let rn = r.norm();
    let mut u = MU_EARTH / rn;
    if degree >= 2 {
        let s = r.z / rn; // sin(geocentric latitude)
        let q = R_EARTH / rn;
        let p2 = 0.5 * (3.0 * s * s - 1.0);
        u -= MU_EARTH / rn * J2 * q * q * p2;
        if degree >= 3 {
            let p3 = 0.5 * (5.0 * s * s * s - 3.0 * s);
            u -= MU_EARTH / rn * J3 * q * q * q * p3;
        }
        if degree >= 4 {
            let s2 = s * s;
            let p4 = 0.125 * (35.0 * s2 * s2 - 30.0 * s2 + 3.0);
            u -= MU_EARTH / rn * J4 * q * q * q * q * p4;
        }
    }
    u
}

fn zonal_acceleration(r: &Vector3<f64>, degree: u8) -> Vector3<f64> {
    let rn = r.norm();
    let r2 = rn * rn;
    let mut a = -(MU_EARTH / (r2 * rn)) * r;
    if degree < 2 {
        return a;
    }
    let (x, y, z) = (r.x, r.y, r.z);
    let z2r2 = z * z / r2;

    // J2
    let f2 = -1.5 * J2 * MU_EARTH * R_EARTH * R_EARTH / (r2 * r2 * rn);
    a.x += f2 * x * (1.0 - 5.0 * z2r2);
    a.y += f2 * y * (1.0 - 5.0 * z2r2);
    a.z += f2 * z * (3.0 - 5.0 * z2r2);

    if degree >= 3 {
        let re3 = R_EARTH * R_EARTH * R_EARTH;
        let f3 = -2.5 * J3 * MU_EARTH * re3 / (r2 * r2 * r2 * rn);
        a.x += f3 * x * (3.0 * z - 7.0 * z * z2r2);
        a.y += f3 * y * (3.0 * z - 7.0 * z * z2r2);
        a.z += f3 * (6.0 * z * z - 7.0 * z * z * z2r2 - 0.6 * r2);
    }
    if degree >= 4 {
        let re4 = R_EARTH * R_EARTH * R_EARTH * R_EARTH;
        let f4 = 1.875 * J4 * MU_EARTH * re4 / (r2 * r2 * r2 * rn);
        a.x += f4 * x * (1.0 - 14.0 * z2r2 + 21.0 * z2r2 * z2r2);
        a.y += f4 * y * (1.0 - 14.0 * z2r2 + 21.0 * z2r2 * z2r2);
        a.z += f4 * z * (5.0 - 70.0 / 3.0 * z2r2 + 21.0 * z2r2 * z2r2);
    }
    a
}

fn drag_acceleration(
    r: &Vector3<f64>,
    v: &Vector3<f64>,
    sc: &SpacecraftParams,
    atmo: &ExpAtmosphere,
) -> Vector3<f64> {
    let omega = Vector3::new(0.0, 0.0, OMEGA_EARTH);
    let v_rel = v - omega.cross(r); // km/s, atmosphere co-rotating
    let alt = r.norm() - R_EARTH;
    let rho = atmo.density(alt); // kg/m^3
    // rho * (Cd A / m) has unit 1/m; times km^2/s^2 gives 1000 km/s^2.
    let coeff = -0.5 * rho * sc.c_d * sc.drag_area_m2 / sc.mass_kg * 1.0e3;
    coeff * v_rel.norm() * v_rel
}

fn srp_acceleration(epoch_s: f64, r: &Vector3<f64>, sc: &SpacecraftParams) -> Vector3<f64> {
    let sun = sun_position(epoch_s);
    let d = r - sun; // Sun -> spacecraft
    let dn = d.norm();
    // N/m^2 * m^2 / kg = m/s^2; scale to km/s^2 and to the actual distance.
    let p = SRP_PRESSURE_AU * (AU_KM / dn) * (AU_KM / dn);
    let coeff = p * sc.c_r * sc.srp_area_m2 / sc.mass_kg * 1.0e-3;
    coeff * (d / dn)
}

fn third_body_acceleration(epoch_s: f64, r: &Vector3<f64>) -> Vector3<f64> {
    let mut a = Vector3::zeros();
    for (mu, body) in [(MU_SUN, sun_position(epoch_s)), (MU_MOON, moon_position(epoch_s))] {
        let d = body - r;
        let dn = d.norm();
        let bn = body.norm();
        a += mu * (d / (dn * dn * dn) - body / (bn * bn * bn));
    }
    a
}

/// Total perturbed acceleration [km/s^2] at (t, r, v), excluding any control.
pub fn acceleration(
    epoch_s: f64,
    r: &Vector3<f64>,
    v: &Vector3<f64>,
    sc: &SpacecraftParams,
    cfg: &ForceModelConfig,
) -> Vector3<f64> {
    let mut a = zonal_acceleration(r, cfg.zonal_degree);
    if let Some(atmo) = &cfg.drag {
        a += drag_acceleration(r, v, sc, atmo);
    }
    if cfg.srp {
        a += srp_acceleration(epoch_s, r, sc);
    }
    if cfg.third_body {
        a += third_body_acceleration(epoch_s, r);
    }
    a
}
