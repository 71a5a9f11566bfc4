//! Time evolution of gravity water waves in holomorphic coordinates, the
//! linearized Eulerian system, conserved quantities and bulk fields.
//!
//! The conformal depth h = H + s follows the mean of η∘X: the state carries
//! W̃ (mean-zero imaginary trace) and the shift s with Im W = Im W̃ + s.

mod bulk;
mod dynamics;
mod linear;
mod state;

pub use bulk::{bulk_fields, dtn_nonlinear, g_trace, pressure_at, surface_terms, BulkFields, PointFields, PointSampler, SurfaceTerms};
pub use dynamics::{aux_fields, gauge_fix, rhs, run, step_rk4, AuxFields, DtPolicy, SolverConfig, StateDerivative, Trajectory};
pub use linear::{linear_energy, linear_exact, linear_rhs, linear_run, linear_step_rk4, measure_dispersion, LinearState, LinearTrajectory};
pub use state::{energy, mass, momentum, HoloState};
