//! Adaptive Dormand-Prince 5(4) integration with deterministic step control.
//!
//! Two extras beyond a textbook embedded RK pair:
//!
//! * every accepted step size can be recorded ([`StepRecord`]), and
//! * a later integration can *replay* a recorded sequence verbatim.
//!
//! Replay is what makes finite-difference derivatives of integrated
//! quantities clean: the nominal and the perturbed trajectories share the
//! same discretization, so the difference isolates the physics instead of
//! step-control noise, and differencing a truly linear system yields exact
//! zeros.

use super::DynamicsError;

/// Right-hand side of a first-order ODE system.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]);
}

/// Accepted step sizes of one integration (signed, in seconds).
#[derive(Clone, Debug, Default)]
pub struct StepRecord {
    pub steps: Vec<f64>,
}

/// Dormand-Prince 5(4) with PI-free standard step control.
#[derive(Clone, Copy, Debug)]
pub struct DormandPrince54 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for DormandPrince54 {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-12, max_steps: 2_000_000 }
    }
}

// Butcher tableau (classic DOPRI5 coefficients).
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// 5th-order solution weights equal the last A row; the error weights are the
// difference against the embedded 4th-order solution.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

struct Stages {
    k: Vec<Vec<f64>>, // 7 stage derivative buffers
    y_tmp: Vec<f64>,
    y_new: Vec<f64>,
}

impl Stages {
    fn new(n: usize) -> Self {
        Self { k: vec![vec![0.0; n]; 7], y_tmp: vec![0.0; n], y_new: vec![0.0; n] }
    }
}

impl DormandPrince54 {
    /// One trial step from (t, y) with size h. k[0] must hold f(t, y) on
    /// entry (FSAL). On exit y_new holds the 5th-order solution and the
    /// return value is the scaled error norm.
    fn try_step(&self, sys: &impl OdeSystem, t: f64, y: &[f64], h: f64, st: &mut Stages) -> f64 {
        let n = sys.dim();
        for stage in 0..6 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in st.k.iter().enumerate().take(stage + 1) {
                    let a = A[stage][j];
                    if a != 0.0 {
                        acc += a * kj[i];
                    }
                }
                st.y_tmp[i] = y[i] + h * acc;
            }
            let (head, tail) = st.k.split_at_mut(stage + 1);
            let _ = head;
            sys.rhs(t + C[stage] * h, &st.y_tmp, &mut tail[0]);
        }
        // 5th-order solution is stage 6's y_tmp (A row 6 equals the b weights),
        // and k[6] = f(t+h, y_new) doubles as next step's k[0] (FSAL).
        st.y_new.copy_from_slice(&st.y_tmp);
        let mut err_sq = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (j, kj) in st.k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += E[j] * kj[i];
                }
            }
            e *= h;
            let sc = self.atol + self.rtol * y[i].abs().max(st.y_new[i].abs());
            err_sq += (e / sc) * (e / sc);
        }
        (err_sq / n as f64).sqrt()
    }

    /// Integrate y from t0 over dt (either sign). Returns the accepted step
    /// sizes so the integration can be replayed.
    pub fn integrate(
        &self,
        sys: &impl OdeSystem,
        t0: f64,
        dt: f64,
        y: &mut [f64],
    ) -> Result<StepRecord, DynamicsError> {
        let mut record = StepRecord::default();
        if dt == 0.0 {
            return Ok(record);
        }
        let n = sys.dim();
        debug_assert_eq!(y.len(), n);
        let dir = dt.signum();
        let t_end = t0 + dt;
        let mut t = t0;
        let mut st = Stages::new(n);
        sys.rhs(t, y, &mut st.k[0]);
        let mut h = dir * (dt.abs() / 100.0).min(dt.abs());
        let h_floor = dt.abs() * 1e-14;
        let mut steps = 0usize;
        while (t_end - t) * dir > 0.0 {
            steps += 1;
            if steps > self.max_steps {
                return Err(DynamicsError::TooManySteps(self.max_steps));
            }
            if (t + h - t_end) * dir > 0.0 {
                h = t_end - t;
            }
            let err = self.try_step(sys, t, y, h, &mut st);
            if !err.is_finite() {
                return Err(DynamicsError::NonFiniteState(t));
            }
            if err <= 1.0 {
                t += h;
                record.steps.push(h);
                y.copy_from_slice(&st.y_new);
                st.k.swap(0, 6); // FSAL
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h *= grow;
            } else {
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                if h.abs() < h_floor {
                    return Err(DynamicsError::StepUnderflow { t, h });
                }
            }
        }
        Ok(record)
    }

    /// Re-integrate with a prescribed accepted-step sequence (no error
    /// control, no rejections). The caller guarantees the record came from a
    /// compatible integration over the same interval.
    pub fn replay(
        &self,
        sys: &impl OdeSystem,
        t0: f64,
        record: &StepRecord,
        y: &mut [f64],
    ) -> Result<(), DynamicsError> {
        let n = sys.dim();
        let mut st = Stages::new(n);
        let mut t = t0;
        sys.rhs(t, y, &mut st.k[0]);
        for &h in &record.steps {
            let err = self.try_step(sys, t, y, h, &mut st);
            if !err.is_finite() {
                return Err(DynamicsError::NonFiniteState(t));
            }
            t += h;
            y.copy_from_slice(&st.y_new);
            st.k.swap(0, 6);
        }
        Ok(())
    }
}
