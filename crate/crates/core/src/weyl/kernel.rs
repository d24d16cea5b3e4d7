use crate::error::{GrauertError, Result};
use crate::special::ln_gamma;
use std::f64::consts::PI;
use std::sync::Arc;

/// Even test function `χ ∈ 𝒮(ℝ)` with `χ̂(0) = 1` and `supp χ̂ ⊂ [−R, R]`
/// (`χ̂(t) = ∫χ(x)e^{−ixt}dx`).
#[derive(Debug, Clone)]
pub enum SmoothingKernel {
    /// `χ(x) = c·sinc^{2p}(ax)`, `a = R/2p`, whose transform is the
    /// normalized density of a sum of `2p` uniforms on `[−a, a]`.
    BSplinePower { p: usize, support: f64 },
    /// `χ̂` sampled on a uniform grid over `[0, R]` (extended evenly);
    /// `χ` is recovered by quadrature.
    Custom { support: f64, samples: Arc<[f64]> },
}

/// Density of `Y`, a sum of `n` uniforms on `[0, 1]`, at `y`
/// (Irwin–Hall), via the alternating sum.
fn irwin_hall_density(n: usize, y: f64) -> f64 {
    if y <= 0.0 || y >= n as f64 {
        return 0.0;
    }
    // use the symmetric half to limit cancellation
    let y = if y > 0.5 * n as f64 { n as f64 - y } else { y };
    let mut s = 0.0;
    let lf = ln_gamma(n as f64);
    for k in 0..=(y.floor() as usize) {
        let ln_binom = ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0);
        let term = (ln_binom + (n as f64 - 1.0) * (y - k as f64).ln() - lf).exp();
        s += if k % 2 == 0 { term } else { -term };
    }
    s.max(0.0)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Builds the B-spline power kernel with `supp χ̂ = [−R, R]`.
pub fn build_smoothing_kernel(support: f64, p: usize) -> Result<SmoothingKernel> {
    if !(support > 0.0) || !support.is_finite() {
        return Err(GrauertError::Domain(format!("support must be positive, got {support}")));
    }
    if !(1..=24).contains(&p) {
        return Err(GrauertError::Domain(format!("smoothing order p must be in 1..=24, got {p}")));
    }
    Ok(SmoothingKernel::BSplinePower { p, support })
}

impl SmoothingKernel {
    /// Kernel close to `(1/W)·1_{[−W/2, W/2]}`: `χ̂(t) = sinc(Wt/2)·β̂(t)` with
    /// `β̂` the order-`p` B-spline transform of support `R`.
    pub fn indicator_like(width: f64, support: f64, p: usize, samples: usize) -> Result<Self> {
        let base = build_smoothing_kernel(support, p)?;
        if samples < 16 {
            return Err(GrauertError::Domain("at least 16 samples are needed".into()));
        }
        let s: Vec<f64> = (0..samples)
            .map(|i| {
                let t = support * i as f64 / (samples - 1) as f64;
                sinc(0.5 * width * t) * base.transform(t)
            })
            .collect();
        Self::custom(support, s)
    }

    /// `χ̂` samples at `t_i = R·i/(n−1)`; `χ̂(0)` must be 1 and `χ̂(R)` 0.
    pub fn custom(support: f64, samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 2 || !(support > 0.0) {
            return Err(GrauertError::Domain("custom kernel needs a positive support and at least two samples".into()));
        }
        if (samples[0] - 1.0).abs() > 1e-12 {
            return Err(GrauertError::Domain(format!("χ̂(0) = {} ≠ 1", samples[0])));
        }
        if samples.last().is_some_and(|v| v.abs() > 1e-12) {
            return Err(GrauertError::Domain("χ̂ must vanish at the edge of its support".into()));
        }
        Ok(SmoothingKernel::Custom { support, samples: samples.into() })
    }

    pub fn support(&self) -> f64 {
        match self {
            SmoothingKernel::BSplinePower { support, .. } | SmoothingKernel::Custom { support, .. } => *support,
        }
    }

    fn scale(&self) -> (usize, f64) {
        match self {
            SmoothingKernel::BSplinePower { p, support } => (*p, support / (2.0 * *p as f64)),
            SmoothingKernel::Custom { .. } => unreachable!(),
        }
    }

    /// `χ(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SmoothingKernel::BSplinePower { .. } => {
                let (p, a) = self.scale();
                let n = 2 * p;
                // χ̂(t) = f_S(t)/f_S(0), S = 2a(Y − p): c = 1/(2π f_S(0)).
                let fs0 = irwin_hall_density(n, p as f64) / (2.0 * a);
                sinc(a * x).powi(n as i32) / (2.0 * PI * fs0)
            }
            SmoothingKernel::Custom { support, samples } => {
                // (1/π)∫₀^R χ̂(t) cos(xt) dt, trapezoid on the samples
                let n = samples.len();
                let h = support / (n - 1) as f64;
                let mut s = 0.5 * samples[0] + 0.5 * samples[n - 1] * (x * support).cos();
                for (i, v) in samples.iter().enumerate().take(n - 1).skip(1) {
                    s += v * (x * h * i as f64).cos();
                }
                s * h / PI
            }
        }
    }

    /// `χ̂(t)`.
    pub fn transform(&self, t: f64) -> f64 {
        let t = t.abs();
        if t >= self.support() {
            return 0.0;
        }
        match self {
            SmoothingKernel::BSplinePower { .. } => {
                let (p, a) = self.scale();
                let n = 2 * p;
                irwin_hall_density(n, t / (2.0 * a) + p as f64) / irwin_hall_density(n, p as f64)
            }
            SmoothingKernel::Custom { support, samples } => {
                let u = t / support * (samples.len() - 1) as f64;
                let i = (u.floor() as usize).min(samples.len() - 2);
                let f = u - i as f64;
                samples[i] * (1.0 - f) + samples[i + 1] * f
            }
        }
    }

    /// Half-width beyond which `|χ| < 1e−14·χ(0)`.
    pub fn effective_width(&self) -> f64 {
        match self {
            SmoothingKernel::BSplinePower { .. } => {
                let (p, a) = self.scale();
                1e14f64.powf(1.0 / (2.0 * p as f64)) / a
            }
            SmoothingKernel::Custom { .. } => {
                let peak = self.eval(0.0).abs();
                // scan outward for the last non-negligible value
                let step = 0.05 * PI / self.support();
                let mut last = 0.0;
                let mut x = 0.0;
                while x < 1e4 {
                    if self.eval(x).abs() > 1e-14 * peak {
                        last = x;
                    }
                    x += step;
                    if x > 2.0 * last + 200.0 * step {
                        break;
                    }
                }
                last + step
            }
        }
    }
}
