//! Weights, momentum densities and fluxes, local energy and the Morawetz
//! functional, the depth correction Qₘ and the virial inequality.
//!
//! Everything lives on the periodic cell: the weight primitive m jumps by
//! −M at the seam opposite its center (see [`weight`]), so every
//! integration by parts carries a seam term evaluated on one Eulerian column.

mod columns;
mod energy;
mod identities;
mod moments;
mod qm;
pub mod time;
mod weight;

pub use columns::{alpha_of_x, column, Column, Density};
pub use energy::{
    e14_norm, e14_state, energy_density, energy_density_flat, eulerian_surface, local_energy, local_energy_linear, weighted_energy,
    x_norm, x_norm_trajectory, EnergyDensity, LocalEnergyReport, XNormReport, XSnapshot, DEFAULT_WINDOW,
};
pub use identities::{
    linear_identities, normal_form_density, refines, verify_c6, verify_l33, verify_l33_state, virial_check, IdentityCheck,
    LinearIdentityReport, NormalFormReport, TestWeight, VirialHypotheses, VirialReport,
};
pub use moments::{
    column_at, conservation_residual, density_flux, moment_series, morawetz_functional, snapshot_moments, ConservationResidual,
    DensityFluxSeries, Frame, MorawetzFunctional, SnapshotMoments,
};
pub(crate) use energy::windowed;
pub use qm::{bh_form, qm_direct, qm_integrand, qm_symbol};
pub use weight::{make_weight, Weight, WeightKind};

#[cfg(test)]
mod tests;
