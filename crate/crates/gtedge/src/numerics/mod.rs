//! Numerical primitives shared by the rest of the crate.
//!
//! Everything here is independent of Gelfand-Tsetlin patterns: sign-aware
//! log-domain arithmetic, a fixed-precision binary float for long cancelling
//! sums, adaptive Gauss-Legendre quadrature along polygonal paths, root
//! counting by the argument principle, and closed-form Stieltjes moments of
//! piecewise-polynomial measures.

mod quadrature;
mod roots;
mod signed_log;
mod stieltjes;
mod wide;

pub use quadrature::{gauss_legendre, integrate_path, integrate_real};
pub use roots::{bisect_real, count_roots, count_roots_in_disc, refine_root, winding_number, Rect};
pub use signed_log::{ln_factorial, signed_log_sum, SignedLog};
pub use stieltjes::{Piece, PiecewiseMeasure};
pub use wide::Wide;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("adaptive subdivision exceeded depth {0}")]
    DepthExceeded(u32),
    #[error("function vanishes on the contour near {0}")]
    BoundaryZero(num_complex::Complex64),
    #[error("root refinement did not converge from seed {0}")]
    NoConvergence(num_complex::Complex64),
    #[error("non-finite value encountered at {0}")]
    NonFinite(num_complex::Complex64),
}

/// Absolute and relative targets for adaptive routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Tolerance { abs_tol, rel_tol, max_depth: 40 }
    }

    pub fn with_depth(mut self, max_depth: u32) -> Self {
        self.max_depth = max_depth;
        self
    }

    fn target(&self, scale: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * scale)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-12, 1e-12)
    }
}
