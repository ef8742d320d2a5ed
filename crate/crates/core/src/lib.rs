//! Dirichlet eigenvalues and eigenmodes of the Laplacian on smooth planar
//! domains.
//!
//! The eigenvalue problem `(Δ + κ²)u = 0` in Ω, `u = 0` on Γ is recast as a
//! boundary integral equation whose operator `I − 2D(κ) − 2iηS(κ)` is singular
//! exactly at the eigenfrequencies κ. The operator is discretized with
//! spectrally accurate Nyström product quadrature ([`operator`]), and the
//! roots of its determinant are located with a degree-doubling
//! Chebyshev/Fourier root finder ([`rootfind`]). Close or repeated roots are
//! refined by minimizing the smallest singular value instead ([`solver`]).
//! Eigenfunctions are reconstructed from boundary data with Green's
//! representation formula ([`modes`]).
//!
//! ```no_run
//! use drum_core::geometry::{Boundary, Curve};
//! use drum_core::solver::{solve_interval, SolveOptions};
//!
//! let disk = Boundary::simple(Curve::ellipse(1.0, 1.0).unwrap());
//! let sol = solve_interval(&disk, 2.0, 3.0, &SolveOptions::default()).unwrap();
//! assert!((sol.eigenfrequencies[0].kappa - 2.404825557695773).abs() < 1e-10);
//! ```

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod modes;
pub mod operator;
pub mod rootfind;
pub mod solver;
pub mod specfun;

pub(crate) mod par;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// A point in the plane.
pub type Point = [f64; 2];
