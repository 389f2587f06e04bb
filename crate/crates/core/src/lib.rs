//! Permanents, permanental means and scaling means of nonnegative matrices
//! and of positive functions on weighted product grids.
//!
//! Every numeric routine is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the bottom of this file fix the common `f64` instantiations.

mod alternating;
mod error;
mod io;
mod matrix;
mod scalar;

pub mod dynamics;
pub mod funcspace;
pub mod means;
pub mod numeric;
pub mod pattern;
pub mod permanent;
pub mod scaling;

pub use alternating::{certified_iteration_budget, contraction_factor};
pub use error::{Error, Result, Unconverged};
pub use io::{format_matrix, parse_matrix};
pub use matrix::NonnegMatrix;
pub use scalar::Scalar;

pub use dynamics::{birkhoff_average, dynamical_matrix, ergodic_average_2d, orbit, IntervalMap};
pub use funcspace::{
    conditional_expectation, discretize, functional_scaling_mean, functional_sinkhorn,
    functional_sinkhorn_from, geometric_mean, two_block_scaling_mean, Axis, FunctionalSinkhorn,
    GridFunction,
};
pub use means::{
    elementary_symmetric, hs_limit, muirhead_limit, muirhead_mean, rep_matrix, symmetric_mean,
    ScaledCoefficients,
};
pub use pattern::{
    decompose_fully_indecomposable, frobenius_konig_witness, max_bipartite_matching, pi_projection,
    Block, FkWitness, PatternReport, Support,
};
pub use permanent::{
    laplace_expansion_check, permanent, permanent_naive, permanent_with, permanental_mean,
    LogPermanent, Parallelism, PermanentOptions,
};
pub use scaling::{
    hilbert_distance, kron, scaling_mean, scaling_mean_2x2, scaling_mean_with, sinkhorn,
    spectral_radius, SinkhornFactorization, SinkhornOptions,
};

pub type Matrix = NonnegMatrix<f64>;
pub type Matrix32 = NonnegMatrix<f32>;
pub type Grid = GridFunction<f64>;
pub type Grid32 = GridFunction<f32>;
pub type Factorization = SinkhornFactorization<f64>;
pub type Coefficients = ScaledCoefficients<f64>;
