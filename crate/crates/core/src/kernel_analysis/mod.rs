//! The depth symbol b, its kernel K and the positivity of K.

mod kernel;
mod pv;
mod scans;
mod symbol;
mod table;

pub use kernel::{
    fourier_tail_bound, kernel_antidiagonal_slope, kernel_axis_part, kernel_diagonal, kernel_diagonal_many,
    kernel_diagonal_slope, kernel_fourier_grid, kernel_h, kernel_line, kernel_transport, kernel_transport_many,
    symbol_remainder, FourierParams,
};
pub use pv::{diagonal_pv_asymptotic, diagonal_pv_integral};
pub use symbol::{symbol_b, symbol_bh};
pub use table::{kernel_mass, kernel_table, KernelMethod, KernelTable, KernelTableParams, MassReport};
pub use scans::{
    directional_signs, positivity_scan, qm_lower_bound_check, split_mass, DirectionalReport, PositivityReport, QmBoundReport,
    SignViolation, SplitReport,
};
