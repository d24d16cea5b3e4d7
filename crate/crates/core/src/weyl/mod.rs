//! Tempered spectral sums on Grauert tube boundaries: the counting function
//! `P^τ_{[0,λ]}(ζ, ζ̄)`, its jumps, boundary norms and Husimi functions,
//! smoothed densities and recovery of period coefficients.

mod kernel;
mod norms;
mod residual;
mod smoothed;
mod tempered;

pub use kernel::{build_smoothing_kernel, SmoothingKernel};
pub use norms::{husimi, husimi_sup, husimi_with_norm, l2_norm_boundary, HusimiSup, Quadrature, SearchGrid};
pub use residual::{fit_power_law, two_term_residual, FitResult, TwoTermResidual};
pub use smoothed::{calibrate_on_circle, period_coefficient_extract, period_window_sum, smoothed_density};
pub use tempered::{
    jump_at, tempered_series, tempered_sum, tempered_weights, universal_bound, zoll_cluster_center, zoll_cluster_sum,
    TemperedSumSeries, UniversalBound, SPHERE_MASLOV_BETA,
};
