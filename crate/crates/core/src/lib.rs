//! Pseudospectral gravity water waves in holomorphic coordinates, with
//! momentum-flux and local-energy diagnostics and the analysis of the
//! depth-induced bilinear kernel.

pub mod error;
pub mod quadrature;
pub mod spectral_ops;
pub mod strip_harmonics;
pub mod conformal_map;
pub mod ww_solver;
pub mod morawetz_diagnostics;
pub mod kernel_analysis;
pub mod verify;

pub use error::{Error, Result};
pub use spectral_ops::{Depth, Grid, SpectralField};
