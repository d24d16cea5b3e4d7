//! Numerical spectral geometry on Grauert tubes of model manifolds.
//!
//! The crate computes analytic continuations of Laplace eigenfunctions of the
//! circle, flat tori and the round 2-sphere into their Grauert tubes, evaluates
//! tempered pointwise Weyl sums and Husimi distributions, and checks the
//! two-term pointwise Weyl law through metaplectic ground-state matrix
//! elements of linearized Poincaré maps.
//!
//! Modules:
//! - [`symplectic`]: symplectic matrices, classification, polar decomposition
//!   and ground-state matrix elements `G_n`.
//! - [`qfunction`]: the oscillating second-term function `Q(λ)`, its jumps and
//!   the moment reconstruction of the associated spectral measure.
//! - [`geometries`]: exact eigendata, tube points, geodesic flow and Poincaré
//!   data for the circle, flat tori and the round sphere.
//! - [`weyl`]: tempered sums, boundary norms, Husimi functions, smoothing
//!   kernels, period coefficients and two-term residuals.
//! - [`beams`]: Gaussian beams along closed geodesics of surfaces of revolution.
//! - [`verify`]: the end-to-end verification suite.

pub mod beams;
pub mod error;
pub mod geometries;
pub mod linalg;
pub mod qfunction;
pub mod report;
pub mod special;
pub mod summation;
pub mod symplectic;
pub mod verify;
pub mod weyl;

pub use error::{GrauertError, Result};
pub use num_complex::Complex64;
