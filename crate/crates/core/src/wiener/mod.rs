//! Fourier analysis on grids, band-limited approximate identities, Wiener
//! division and the Toeplitz approximation of operators in the strong topology.

pub mod division;
pub mod grid;
pub mod identity;
pub mod sot;
pub mod spectrum;

pub use division::{division_residual, REGULARITY_THRESHOLD, radial_variation, wiener_divide, DivisionReport, WienerQuotient};
pub use grid::{character, GridFunction, SpectralGrid};
pub use identity::{approx_identity, bump, BandLimitedFamily, PROFILE_VERSION};
pub use sot::{approx_identity_sot_check, ALIASING_LIMIT, conv_band_limited, error_table, lattice_symbol, sot_toeplitz_approximation, ErrorRow, SotStage};
pub use spectrum::{PolarRule, SpatialEvaluator, SpectralFunction};
