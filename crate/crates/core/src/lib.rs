//! Design and evaluation of dual-polarized uniform rectangular arrays for
//! point-to-point line-of-sight MIMO links.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`). The `*64`
//! and `*32` aliases below fix the precision; the experiment harness and CLI
//! run in `f64`.

// `!(x > 0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod design;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod matrix;
pub mod scalar;
pub mod spectrum;

pub use channel::{
    build_dual, build_unpolarized, channel_gain, kronecker, polarization_matrix, reference_gain,
    ChannelModelKind,
};
pub use design::{
    area_stationarity_check, divisor_pairs, high_snr_capacity, optimal_geometry, optimal_spacing,
    optimize_factorization, polarization_eigenvalues, two_level_allocation, two_level_spectrum,
    GeometryChoice, Objective, PolarizationEigen, TwoLevelAllocation,
};
pub use error::{Error, Result};
pub use geometry::{
    aperture_dimensions, horizontal_index, kappa_from_gamma, vertical_index, ApertureDimensions,
    LinkConfig, Polarization, UraGeometry,
};
pub use matrix::ComplexMatrix;
pub use scalar::Scalar;
pub use spectrum::{
    capacity_of_link, capacity_of_matrix, capacity_single_polarized, gram_spectrum,
    hermitian_eigenvalues, power_budget, waterfill, waterfill_gains, CapacityResult, PowerBudget,
    Spectrum,
};

pub type UraGeometry64 = UraGeometry<f64>;
pub type LinkConfig64 = LinkConfig<f64>;
pub type ComplexMatrix64 = ComplexMatrix<f64>;
pub type Spectrum64 = Spectrum<f64>;
pub type CapacityResult64 = CapacityResult<f64>;
pub type GeometryChoice64 = GeometryChoice<f64>;

pub type UraGeometry32 = UraGeometry<f32>;
pub type LinkConfig32 = LinkConfig<f32>;
pub type ComplexMatrix32 = ComplexMatrix<f32>;
pub type Spectrum32 = Spectrum<f32>;
pub type CapacityResult32 = CapacityResult<f32>;
pub type GeometryChoice32 = GeometryChoice<f32>;
