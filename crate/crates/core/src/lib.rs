//! Quantum harmonic analysis on finite truncations of the Fock space
//! `F²(ℂⁿ)` and the Bergman space `A²(Bⁿ)`.
//!
//! Operators are dense matrices in the orthonormal monomial basis of degree
//! at most `N`. Every identity that holds for compressions `P S P` of
//! finite-rank operators is exact here up to quadrature error; identities that
//! involve genuinely infinite operators carry a truncation error that is
//! controlled on the leading block `|k| ≤ N/2`.

pub mod bergman;
pub mod conv;
pub mod error;
pub mod fock;
pub mod groups;
pub mod linalg;
pub mod operators;
pub mod quadrature;
pub mod symbol;
pub mod wiener;

pub use error::{Error, Result};
pub use fock::{
    basis_eval, build_quadrature, kernel, normalized_kernel_coeffs, MultiIndex, QuadratureRule,
    SpaceKind, TruncatedSpace,
};
pub use linalg::{CMatrix, CVector, C64};
pub use operators::{
    berezin, op_norm_estimate, parity, phi_op, toeplitz, translate_op, trace, weyl,
    BerezinFunction, OperatorMatrix,
};
pub use symbol::{Symbol, SymbolKind};
pub use bergman::{bergman_toeplitz, density_contraction_check, quasi_radialize, DensityReport};
pub use conv::{
    conv_fo_with, conv_ff_with,
    conv_fo, conv_ff, conv_oo, conv_symbol_op, is_regular_function, ConvQuadrature,
    RegularityReport,
};
pub use groups::{
    act_point, act_symbol, conv_g_op, conv_g_symbol, is_invariant, proj_rep, radialize,
    translate_op_g, GroupElement, GroupFunction, Subgroup, SubgroupKind,
};
pub use wiener::{
    approx_identity, approx_identity_sot_check, sot_toeplitz_approximation, wiener_divide,
    BandLimitedFamily, GridFunction, SpectralFunction, SpectralGrid,
};
