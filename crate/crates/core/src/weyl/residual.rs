use super::tempered::tempered_series;
use crate::error::{GrauertError, Result};
use crate::geometries::{Eigendata, TubePoint};
use crate::special::power_law_fit;

/// Power-law fit `y ≈ A·x^p` on the even-indexed samples, scored on the
/// odd-indexed ones.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub exponent: f64,
    pub amplitude: f64,
    /// Largest `|ln y − ln(A x^p)|` over the held-out samples.
    pub residual: f64,
    pub fit_points: usize,
    pub held_out: usize,
}

pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<FitResult> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(GrauertError::Domain("a power-law fit needs at least 3 paired samples".into()));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(GrauertError::Domain("power-law fits need positive finite samples".into()));
    }
    let (fx, fy): (Vec<f64>, Vec<f64>) = x.iter().zip(y).step_by(2).map(|(a, b)| (*a, *b)).unzip();
    let (amplitude, exponent) = power_law_fit(&fx, &fy);
    let held: Vec<(f64, f64)> = x.iter().zip(y).skip(1).step_by(2).map(|(a, b)| (*a, *b)).collect();
    let residual = held.iter().map(|(a, b)| (b.ln() - amplitude.ln() - exponent * a.ln()).abs()).fold(0.0, f64::max);
    Ok(FitResult { exponent, amplitude, residual, fit_points: fx.len(), held_out: held.len() })
}

/// `r(λ) = P^τ_{[0,λ]}/(c λ^{(m+1)/2}) − 1 − Q(λ)/λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoTermResidual {
    /// Leading constant fitted on the even-indexed grid points.
    pub c: f64,
    /// `(λ, P, Q, r)` at the held-out (odd-indexed) grid points.
    pub samples: Vec<(f64, f64, f64, f64)>,
    /// `sup |r(λ)|·λ` over the held-out points.
    pub scaled_sup: f64,
}

pub fn two_term_residual(
    data: &Eigendata,
    p: &TubePoint,
    tau: f64,
    q: &dyn Fn(f64) -> Result<f64>,
    grid: &[f64],
) -> Result<TwoTermResidual> {
    if grid.len() < 4 || grid.iter().any(|&l| !(l > 0.0)) {
        return Err(GrauertError::Domain("the residual grid needs at least 4 positive points".into()));
    }
    let series = tempered_series(data, p, tau, grid)?;
    let e = 0.5 * (data.geometry.dim() as f64 + 1.0);
    let qs = grid.iter().map(|&l| q(l)).collect::<Result<Vec<f64>>>()?;
    let f: Vec<f64> = grid.iter().zip(&qs).map(|(l, qv)| l.powf(e) * (1.0 + qv / l)).collect();
    let (num, den) = f.iter().zip(&series.values).step_by(2).fold((0.0, 0.0), |(n, d), (fi, pi)| (n + fi * pi, d + fi * fi));
    let c = num / den;
    let samples: Vec<(f64, f64, f64, f64)> = (1..grid.len())
        .step_by(2)
        .map(|i| {
            let l = grid[i];
            let pv = series.values[i];
            (l, pv, qs[i], pv / (c * l.powf(e)) - 1.0 - qs[i] / l)
        })
        .collect();
    let scaled_sup = samples.iter().map(|s| (s.3 * s.0).abs()).fold(0.0, f64::max);
    Ok(TwoTermResidual { c, samples, scaled_sup })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometries::{circle_eigendata, tube_point, Geometry};

    #[test]
    fn exact_power_law() {
        let x: Vec<f64> = (1..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(1.5)).collect();
        let f = fit_power_law(&x, &y).unwrap();
        assert!((f.exponent - 1.5).abs() < 1e-12 && (f.amplitude - 3.0).abs() < 1e-10);
        assert!(f.residual < 1e-12);
        assert_eq!((f.fit_points, f.held_out), (10, 9));
    }

    #[test]
    fn circle_residual_is_bounded() {
        let tau = 0.5;
        let data = circle_eigendata(210.0).unwrap();
        let p = tube_point(Geometry::Circle, &[0.0], &[-1.0], tau).unwrap();
        let grid: Vec<f64> = (0..400).map(|i| 20.0 + 0.45 * i as f64 + 0.013).collect();
        let q = |l: f64| Ok(0.25 - 0.5 * l.fract());
        let r = two_term_residual(&data, &p, tau, &q, &grid).unwrap();
        assert!((r.c - 1.0).abs() < 1e-2);
        assert!(r.scaled_sup < 5.0, "{}", r.scaled_sup);
        // r·λ = C − 1/4 − {λ}/2 when c = 1
        let cst = 1.0 + (-2.0f64).exp() / (1.0 - (-2.0f64).exp());
        let (l, _, _, rv) = r.samples[7];
        assert!(
            (rv * l * r.c - (cst - 0.25 - 0.5 * l.fract()) - (1.0 - r.c) * l * (1.0 + (0.25 - 0.5 * l.fract()) / l)).abs() < 1e-8
        );
    }
}
