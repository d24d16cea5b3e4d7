use super::kernel::SmoothingKernel;
use super::tempered::tempered_weights;
use crate::error::{GrauertError, Result};
use crate::geometries::{Eigendata, TubePoint};
use crate::summation::Accumulator;
use num_complex::Complex64;

fn window(data: &Eigendata, kernel: &SmoothingKernel, lambda: f64) -> Result<(usize, usize)> {
    let w = kernel.effective_width();
    if lambda + w > data.cutoff {
        return Err(GrauertError::Coverage { cutoff: data.cutoff, requested: lambda + w });
    }
    let lo = data.entries.partition_point(|e| e.lambda < lambda - w);
    let hi = data.entries.partition_point(|e| e.lambda <= lambda + w);
    Ok((lo, hi))
}

/// `Σ_j χ(λ − λ_j) e^{−2τλ_j}|φ_j^ℂ(ζ)|²`.
pub fn smoothed_density(data: &Eigendata, p: &TubePoint, tau: f64, kernel: &SmoothingKernel, lambda: f64) -> Result<f64> {
    let (lo, hi) = window(data, kernel, lambda)?;
    let w = tempered_weights(data, p, tau, hi)?;
    let mut acc = Accumulator::new();
    for (e, wi) in data.entries[lo..hi].iter().zip(&w[lo..]) {
        acc.add(kernel.eval(lambda - e.lambda) * wi);
    }
    Ok(acc.value())
}

/// Raw `Σ_j γ(λ_j − λ) e^{−2τλ_j}|φ_j^ℂ(ζ)|²` with `γ(x) = χ(x)e^{inTx}`.
pub fn period_window_sum(
    data: &Eigendata,
    p: &TubePoint,
    tau: f64,
    kernel: &SmoothingKernel,
    n: u32,
    period: f64,
    lambda: f64,
) -> Result<Complex64> {
    if n == 0 || !(period > 0.0) {
        return Err(GrauertError::Configuration("period windows need n ≥ 1 and T > 0".into()));
    }
    if kernel.support() >= 0.5 * period {
        return Err(GrauertError::Configuration(format!(
            "χ̂ support {} overlaps neighbouring periods (T/2 = {})",
            kernel.support(),
            0.5 * period
        )));
    }
    let (lo, hi) = window(data, kernel, lambda)?;
    let w = tempered_weights(data, p, tau, hi)?;
    let (mut re, mut im) = (Accumulator::new(), Accumulator::new());
    let nt = n as f64 * period;
    for (e, wi) in data.entries[lo..hi].iter().zip(&w[lo..]) {
        let x = e.lambda - lambda;
        let v = kernel.eval(x) * wi;
        let (s, c) = (nt * x).sin_cos();
        re.add(v * c);
        im.add(v * s);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// `𝒢_n` estimate: the window sum demodulated by `e^{iλnT}` and divided by
/// `C'·λ^{(m−1)/2}·γ̂(nT)`, with `γ̂(nT) = χ̂(0) = 1`.
#[allow(clippy::too_many_arguments)]
pub fn period_coefficient_extract(
    data: &Eigendata,
    p: &TubePoint,
    tau: f64,
    kernel: &SmoothingKernel,
    n: u32,
    period: f64,
    lambda: f64,
    calibration: f64,
) -> Result<Complex64> {
    let raw = period_window_sum(data, p, tau, kernel, n, period, lambda)?;
    let m = data.geometry.dim() as f64;
    let scale = calibration * lambda.powf(0.5 * (m - 1.0)) * kernel.transform(0.0);
    Ok(raw * Complex64::from_polar(1.0, lambda * n as f64 * period) / scale)
}

/// Calibration constant `C'` from the circle, where every `𝒢_n = 1`.
pub fn calibrate_on_circle(kernel: &SmoothingKernel, n: u32, lambda: f64, tau: f64) -> Result<f64> {
    let data = crate::geometries::circle_eigendata(lambda + kernel.effective_width() + 1.0)?;
    let p = crate::geometries::tube_point(crate::geometries::Geometry::Circle, &[0.0], &[-1.0], tau)?;
    let raw = period_coefficient_extract(&data, &p, tau, kernel, n, std::f64::consts::TAU, lambda, 1.0)?;
    Ok(raw.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometries::{circle_eigendata, tube_point, Geometry};
    use crate::weyl::{build_smoothing_kernel, tempered_sum};
    use std::f64::consts::TAU;

    #[test]
    fn circle_window_recovers_unit_coefficients() {
        let tau = 0.5;
        let k = build_smoothing_kernel(3.0, 6).unwrap();
        let c = calibrate_on_circle(&k, 1, 100.0, tau).unwrap();
        assert!((c - 1.0).abs() < 1e-8);
        let data = circle_eigendata(400.0).unwrap();
        let p = tube_point(Geometry::Circle, &[0.0], &[-1.0], tau).unwrap();
        for n in [1u32, 2] {
            let g = period_coefficient_extract(&data, &p, tau, &k, n, TAU, 200.0, c).unwrap();
            assert!((g.norm() - 1.0).abs() < 1e-6, "n={n}: {g}");
        }
        let wide = build_smoothing_kernel(3.5, 6).unwrap();
        assert!(matches!(
            period_coefficient_extract(&data, &p, tau, &wide, 1, TAU, 200.0, c),
            Err(GrauertError::Configuration(_))
        ));
        assert!(matches!(period_coefficient_extract(&data, &p, tau, &k, 1, TAU, 390.0, c), Err(GrauertError::Coverage { .. })));
    }

    #[test]
    fn indicator_kernel_tracks_window_increment() {
        let tau = 0.5;
        let width = 9.0;
        let k = SmoothingKernel::indicator_like(width, 40.0, 4, 8192).unwrap();
        let data = circle_eigendata(100.0 + k.effective_width() + 1.0).unwrap();
        let p = tube_point(Geometry::Circle, &[0.0], &[-1.0], tau).unwrap();
        let s = smoothed_density(&data, &p, tau, &k, 100.0).unwrap() * width;
        let inc = tempered_sum(&data, &p, tau, 104.5).unwrap() - tempered_sum(&data, &p, tau, 95.5).unwrap();
        assert!((s / inc - 1.0).abs() < 0.02, "{s} vs {inc}");
    }
}
