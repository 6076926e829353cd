//! Collision risk metrics and covariance bookkeeping.
//!
//! The conjunction is summarized at each node by the relative position of
//! the two objects and the combined position covariance. Three metrics are
//! supported, each paired with the squared-Mahalanobis-distance keep-out
//! level that enforces a threshold on it:
//!
//! * squared Mahalanobis distance itself (the common currency),
//! * instantaneous collision probability, the Gaussian density at the
//!   relative mean times the volume of the combined-hard-body sphere,
//! * the maximum of that probability over all scalings of the covariance,
//!   a dilution-robust worst case,
//! * plus plain miss distance, which is the Mahalanobis machinery with an
//!   identity covariance.
//!
//! Distances in km, covariances in km^2.

use crate::dynamics::{rtn_to_eci, DynamicsError};
use nalgebra::{Cholesky, Matrix3, Matrix6, Vector3, Vector6};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RiskError {
    #[error("covariance is not positive definite")]
    NotPositiveDefinite,
    #[error("covariance condition number {0:.3e} exceeds 1e12")]
    IllConditioned(f64),
    #[error("non-finite value in risk computation")]
    NonFinite,
}

/// Which scalar a keep-out constraint bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricKind {
    /// Instantaneous collision probability, bounded above.
    Ipc,
    /// Covariance-scaling maximum of the probability, bounded above.
    MaxIpc,
    /// Miss distance in km, bounded below.
    Miss,
}

const MAX_CONDITION: f64 = 1e12;

fn checked_cholesky(p: &Matrix3<f64>) -> Result<Cholesky<f64, nalgebra::Const<3>>, RiskError> {
    if !p.iter().all(|v| v.is_finite()) {
        return Err(RiskError::NonFinite);
    }
    let eig = p.symmetric_eigenvalues();
    let (lo, hi) = (eig.min(), eig.max());
    if lo <= 0.0 {
        return Err(RiskError::NotPositiveDefinite);
    }
    let cond = hi / lo;
    if cond > MAX_CONDITION {
        return Err(RiskError::IllConditioned(cond));
    }
    Cholesky::new(*p).ok_or(RiskError::NotPositiveDefinite)
}

fn det_from_cholesky(chol: &Cholesky<f64, nalgebra::Const<3>>) -> f64 {
    let l = chol.l_dirty();
    (l[(0, 0)] * l[(1, 1)] * l[(2, 2)]).powi(2)
}

/// Squared Mahalanobis distance of `mu` under covariance `p`.
pub fn smd(mu: &Vector3<f64>, p: &Matrix3<f64>) -> Result<f64, RiskError> {
    let chol = checked_cholesky(p)?;
    let y = chol.solve(mu);
    let d2 = mu.dot(&y);
    if !d2.is_finite() {
        return Err(RiskError::NonFinite);
    }
    Ok(d2)
}

/// Gradient of the squared Mahalanobis distance with respect to `mu`.
pub fn smd_gradient(mu: &Vector3<f64>, p: &Matrix3<f64>) -> Result<Vector3<f64>, RiskError> {
    let chol = checked_cholesky(p)?;
    Ok(2.0 * chol.solve(mu))
}

/// Instantaneous collision probability: Gaussian density at the relative
/// mean times the volume of a sphere with radius `hbr_km`, clamped to [0, 1].
/// Accurate when the hard-body radius is small against the covariance.
pub fn ipc(mu: &Vector3<f64>, p: &Matrix3<f64>, hbr_km: f64) -> Result<f64, RiskError> {
    let chol = checked_cholesky(p)?;
    let det = det_from_cholesky(&chol);
    let d2 = mu.dot(&chol.solve(mu));
    let value = (2.0 / (std::f64::consts::PI * det)).sqrt() * hbr_km.powi(3) / 3.0
        * (-d2 / 2.0).exp();
    if !value.is_finite() {
        return Err(RiskError::NonFinite);
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Coefficient such that the scaling-maximized probability is C / d^3 with
/// d the Mahalanobis distance under the unscaled covariance.
fn max_ipc_coeff(det: f64, hbr_km: f64) -> f64 {
    (2.0 / (std::f64::consts::PI * det)).sqrt() * hbr_km.powi(3) * 3.0_f64.sqrt()
        * (-1.5_f64).exp()
}

/// Maximum of [`ipc`] over all positive scalings k of the covariance. The
/// probability under k P is proportional to k^(-3/2) exp(-d^2 / (2 k)),
/// maximized at k = d^2 / 3, which gives C / d^3 with C from
/// [`max_ipc_coeff`]. Clamped to [0, 1]; a zero relative separation means
/// certain collision under some scaling, so it returns 1.
pub fn max_ipc(mu: &Vector3<f64>, p: &Matrix3<f64>, hbr_km: f64) -> Result<f64, RiskError> {
    let chol = checked_cholesky(p)?;
    let det = det_from_cholesky(&chol);
    let d2 = mu.dot(&chol.solve(mu));
    if d2 <= 0.0 {
        return Ok(1.0);
    }
    let value = max_ipc_coeff(det, hbr_km) / d2.powf(1.5);
    if !value.is_finite() {
        return Err(RiskError::NonFinite);
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Euclidean miss distance, km.
pub fn miss_distance(mu: &Vector3<f64>) -> f64 {
    mu.norm()
}

/// Evaluate the metric a keep-out constraint bounds.
pub fn metric(
    kind: MetricKind,
    mu: &Vector3<f64>,
    p: &Matrix3<f64>,
    hbr_km: f64,
) -> Result<f64, RiskError> {
    match kind {
        MetricKind::Ipc => ipc(mu, p, hbr_km),
        MetricKind::MaxIpc => max_ipc(mu, p, hbr_km),
        MetricKind::Miss => Ok(miss_distance(mu)),
    }
}

/// Squared-Mahalanobis keep-out level enforcing the metric threshold:
/// staying at or beyond this level keeps the probability at or below the
/// threshold (or the miss distance at or above it). `Ok(None)` means the
/// threshold cannot be violated at any separation, so no constraint is
/// needed. For the miss-distance metric the caller evaluates separations
/// against the identity covariance.
pub fn smd_limit(
    kind: MetricKind,
    p: &Matrix3<f64>,
    hbr_km: f64,
    threshold: f64,
) -> Result<Option<f64>, RiskError> {
    match kind {
        MetricKind::Ipc => {
            let chol = checked_cholesky(p)?;
            let det = det_from_cholesky(&chol);
            let peak = (2.0 / (std::f64::consts::PI * det)).sqrt() * hbr_km.powi(3) / 3.0;
            if threshold >= peak {
                return Ok(None);
            }
            Ok(Some(-2.0 * (threshold / peak).ln()))
        }
        MetricKind::MaxIpc => {
            let chol = checked_cholesky(p)?;
            let det = det_from_cholesky(&chol);
            let c = max_ipc_coeff(det, hbr_km);
            Ok(Some((c / threshold).powf(2.0 / 3.0)))
        }
        MetricKind::Miss => Ok(Some(threshold * threshold)),
    }
}

/// Rotate a 6x6 covariance given in the RTN frame of (r, v) into ECI.
pub fn rtn_cov_to_eci(
    cov_rtn: &Matrix6<f64>,
    r_km: &Vector3<f64>,
    v_kms: &Vector3<f64>,
) -> Result<Matrix6<f64>, DynamicsError> {
    let rot = rtn_to_eci(r_km, v_kms)?;
    let mut big = Matrix6::zeros();
    big.fixed_view_mut::<3, 3>(0, 0).copy_from(&rot);
    big.fixed_view_mut::<3, 3>(3, 3).copy_from(&rot);
    Ok(big * cov_rtn * big.transpose())
}

/// Map a covariance backwards through a state transition matrix: the
/// covariance at the segment start that the given matrix carries into the
/// supplied end-of-segment covariance.
pub fn anchor_covariance(cov_end: &Matrix6<f64>, stm: &Matrix6<f64>) -> Matrix6<f64> {
    let inv = stm.try_inverse().expect("state transition matrices are invertible");
    symmetrize(&(inv * cov_end * inv.transpose()))
}

/// Push a covariance forward through a state transition matrix,
/// symmetrizing to stop round-off drift from accumulating over long chains.
pub fn propagate_covariance(cov: &Matrix6<f64>, stm: &Matrix6<f64>) -> Matrix6<f64> {
    symmetrize(&(stm * cov * stm.transpose()))
}

/// Covariances at every node given the start covariance and the per-segment
/// state transition matrices; output length is `stms.len() + 1`.
pub fn covariance_history(c0: &Matrix6<f64>, stms: &[Matrix6<f64>]) -> Vec<Matrix6<f64>> {
    let mut out = Vec::with_capacity(stms.len() + 1);
    out.push(symmetrize(c0));
    for stm in stms {
        let next = propagate_covariance(out.last().unwrap(), stm);
        out.push(next);
    }
    out
}

/// Position block of a 6x6 covariance.
pub fn position_covariance(cov: &Matrix6<f64>) -> Matrix3<f64> {
    cov.fixed_view::<3, 3>(0, 0).into_owned()
}

/// Covariance of a transformed 3-vector quantity: P = H C Hᵀ for the
/// Jacobian H of the transformation. [`position_covariance`] is the special
/// case H = (I 0).
pub fn transform_covariance(
    cov: &Matrix6<f64>,
    h: &nalgebra::SMatrix<f64, 3, 6>,
) -> Matrix3<f64> {
    let p = h * cov * h.transpose();
    (p + p.transpose()) * 0.5
}

fn symmetrize(m: &Matrix6<f64>) -> Matrix6<f64> {
    (m + m.transpose()) * 0.5
}

/// Relative state (secondary minus primary) from two node states.
pub fn relative_position(primary: &Vector6<f64>, secondary: &Vector6<f64>) -> Vector3<f64> {
    Vector3::new(
        secondary[0] - primary[0],
        secondary[1] - primary[1],
        secondary[2] - primary[2],
    )
}
