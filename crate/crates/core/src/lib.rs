//! Quantum carpets of Schrödinger, Dirac and Klein-Gordon wave packets in a
//! one-dimensional box.
//!
//! The pipeline is: [`spectrum`] gives per-mode energies and Dirac boundary
//! data, [`packet`] expands a Gaussian on a mode window, [`evolution`]
//! evolves the expansion into density grids and revival diagnostics, and
//! [`render`] writes PGM, PNG and CSV files.

pub mod error;
pub mod evolution;
pub mod numeric;
pub mod packet;
pub mod render;
pub mod spectrum;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use evolution::{
    analytic_revival_time, autocorrelation, compare_grids, density_grid, detect_revivals,
    double_sum_oracle, revival_report, wavefunction_at, DensityGrid, GridComparison, GridSpec,
    RevivalPeak, RevivalReport,
};
pub use packet::{build_mode_set, DiracWidth, ModeSet, PacketSpec};
pub use render::ColorMap;
pub use spectrum::{Branch, ModeDescriptor, ModelKind, PhysicalParams};
