//! Fuel-optimal collision-avoidance maneuver planning for long-term
//! conjunctions.
//!
//! The crate is organized around the pipeline that turns a conjunction
//! scenario into a maneuver plan:
//!
//! * [`dynamics`]: orbital propagation (zonal gravity, drag, SRP, third
//!   body), state-transition and control sensitivities of segment flow maps,
//!   frames and geodetic coordinates.
//! * [`risk`]: covariance propagation and the collision metrics (squared
//!   Mahalanobis distance, instantaneous collision probability and its
//!   covariance-scaling maximum, miss distance) together with the keep-out
//!   ellipsoid sizes they imply.
//! * [`conic`]: a self-contained second-order cone programming solver
//!   (homogeneous self-dual interior point with Nesterov-Todd scaling)
//!   plus problem scaling utilities.
//! * [`scp`]: the sequential convex programming engine: keep-out-zone
//!   projection and linearization, nonlinearity-index trust regions,
//!   lossless control relaxation, virtual controls, and the major/minor
//!   iteration loop.
//! * [`sk`]: station-keeping support: geodetic box constraints and the
//!   long-horizon targeting problem that picks the post-encounter state.
//!
//! Units are km, km/s, and seconds unless a name says otherwise. Angles in
//! public interfaces are degrees when suffixed `_deg`, radians otherwise.

pub mod consts;
pub mod dynamics;
pub mod risk;
