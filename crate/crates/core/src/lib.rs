//! Comparative statics of a three-factor, two-good trade model.
//!
//! The crate linearizes the economy around a snapshot of cost shares and
//! substitution elasticities, solves the resulting 5x5 system for any price
//! or endowment shock, and places the economy-wide substitution ratios in the
//! (S′, U′) plane where the Rybczynski sign pattern can be read off.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the `*64` and
//! `*32` aliases below cover the common cases.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimate;
pub mod geometry;
pub mod index;
pub mod io;
pub mod linalg;
pub mod model;
pub mod plot;
pub mod production;
pub mod scalar;
pub mod statics;
pub mod sweep;

pub use error::{Error, Result};
pub use scalar::{Scalar, Sign};

/// Numerical cutoffs shared across modules.
pub mod tol {
    /// Structural identities of a validated economy.
    pub const STRUCTURAL: f64 = 1e-9;
    /// Algebraic identities evaluated on already-validated data.
    pub const IDENTITY: f64 = 1e-12;
    /// Denominators below this are treated as zero.
    pub const DEGENERATE: f64 = 1e-12;
    /// Relative cutoff for the line/boundary quadratic discriminant.
    pub const DISCRIMINANT: f64 = 1e-14;
    /// Distance from a subregion border that counts as on the border.
    pub const BORDER: f64 = 1e-9;
    /// Largest accepted pivot ratio of the linear system.
    pub const CONDITION_LIMIT: f64 = 1e12;
    /// Relative dead band for threshold comparisons on observed data.
    pub const DEAD_BAND: f64 = 1e-10;
}

pub type Economy64 = model::Economy<f64>;
pub type Economy32 = model::Economy<f32>;
pub type EwsMatrix64 = model::EwsMatrix<f64>;
pub type EwsMatrix32 = model::EwsMatrix<f32>;
pub type RatioPoint64 = model::RatioPoint<f64>;
pub type RatioPoint32 = model::RatioPoint<f32>;
pub type Shock64 = statics::Shock<f64>;
pub type Shock32 = statics::Shock<f32>;
pub type Response64 = statics::Response<f64>;
pub type Response32 = statics::Response<f32>;
