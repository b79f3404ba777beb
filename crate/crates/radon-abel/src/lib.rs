//! Reconstruction of piecewise-smooth 2D functions from their Radon
//! transforms.
//!
//! The reconstruction integrates a sinogram against a smooth two-parameter
//! kernel whose peak sharpens as the smoothing parameter `alpha` shrinks.
//! The crate provides:
//!
//! * analytic phantoms (discs and axis-aligned rectangles) with closed-form
//!   Radon transforms and closed-form local averages ([`phantom`]),
//! * the smoothing kernels and their critical-point profile ([`kernel`]),
//! * fixed-grid quadrature rules, including the three-interval split that
//!   resolves the kernel peak ([`quadrature`]),
//! * sinogram sampling and a plain-text sinogram format ([`sinogram`]),
//! * three independent reconstruction paths plus error reporting
//!   ([`reconstruction`], [`grid`]).
//!
//! The `radon-abel` binary exposes the full pipeline on the command line.

pub mod grid;
pub mod kernel;
pub mod phantom;
pub mod quadrature;
pub mod reconstruction;
pub mod sinogram;

pub use grid::{compare, Comparison, GridGeom, ReconGrid};
pub use kernel::{beta, KernelParams, KernelProfile};
pub use phantom::{DiscPiece, Phantom, Piece, PointClass, RectPiece};
pub use quadrature::{integrate_1d, integrate_2d_polar, integrate_split, QuadSpec, Rule, SplitSpec};
pub use reconstruction::{
    abel_naive, abel_oracle, abel_split, reconstruct_grid, sf_grid, Method, RadonSource,
    ReconParams, ReconReport,
};
pub use sinogram::Sinogram;

/// A point in the plane.
pub type Point = [f64; 2];
