//! Special functions and quadrature rules used across the crate.

use num_complex::Complex64;
use std::f64::consts::PI;

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `Γ(a) / Γ(b)` evaluated through log-gamma.
pub fn gamma_ratio(a: f64, b: f64) -> f64 {
    (ln_gamma(a) - ln_gamma(b)).exp()
}

/// Exponentially scaled modified Bessel function `e^{-x} I₀(x)`, `x ≥ 0`,
/// summed from its power series.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    assert!(x >= 0.0, "bessel_i0_scaled: negative argument");
    if x == 0.0 {
        return 1.0;
    }
    let q = 0.25 * x * x;
    if x <= 700.0 {
        let mut term = (-x).exp();
        let mut sum = term;
        let mut k = 1.0;
        loop {
            term *= q / (k * k);
            sum += term;
            if k > x && term < sum * 1e-18 {
                break;
            }
            k += 1.0;
        }
        sum
    } else {
        // log-domain terms, shifted by the peak
        let lx = (0.5 * x).ln();
        let kmax = (x + 40.0 * x.sqrt() + 50.0) as usize;
        let mut sum = 0.0;
        for k in 0..=kmax {
            let kf = k as f64;
            let lt = 2.0 * kf * lx - 2.0 * ln_gamma(kf + 1.0) - x;
            sum += lt.exp();
        }
        sum
    }
}

pub fn bessel_i0(x: f64) -> f64 {
    bessel_i0_scaled(x) * x.exp()
}

/// Legendre polynomial `P_n(z)` at a complex argument (Bonnet recurrence).
pub fn legendre_p(n: usize, z: Complex64) -> Complex64 {
    let mut p0 = Complex64::new(1.0, 0.0);
    if n == 0 {
        return p0;
    }
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = (z * p1 * (2.0 * kf - 1.0) - p0 * (kf - 1.0)) / kf;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Fully normalized associated Legendre factor `Q_n^m(t)`, `m ≥ 0`, such that
/// `Y_n^m(x) = Q_n^m(x₃)·(x₁ + i x₂)^m` on the unit sphere (Condon–Shortley
/// phase, `∫|Y|² dS = 1`). Polynomial in `t`, so complex arguments give the
/// holomorphic extension.
pub fn assoc_legendre_factor(n: usize, m: usize, t: Complex64) -> Complex64 {
    if m > n {
        return Complex64::new(0.0, 0.0);
    }
    let mut qmm = 1.0 / (4.0 * PI).sqrt();
    for j in 1..=m {
        let jf = j as f64;
        qmm *= -((2.0 * jf + 1.0) / (2.0 * jf)).sqrt();
    }
    let qmm = Complex64::new(qmm, 0.0);
    if n == m {
        return qmm;
    }
    let mf = m as f64;
    let mut prev = qmm;
    let mut cur = t * qmm * (2.0 * mf + 3.0).sqrt();
    for k in (m + 2)..=n {
        let kf = k as f64;
        let den = kf * kf - mf * mf;
        let a = ((4.0 * kf * kf - 1.0) / den).sqrt();
        let b = ((2.0 * kf + 1.0) * ((kf - 1.0) * (kf - 1.0) - mf * mf) / ((2.0 * kf - 3.0) * den)).sqrt();
        let next = t * cur * a - prev * b;
        prev = cur;
        cur = next;
    }
    cur
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    (x.iter().map(|&t| c + h * t).collect(), w.iter().map(|&v| v * h).collect())
}

/// Least-squares line `y = a + b x`; returns `(a, b)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

/// Power-law fit `y ≈ A x^p` by log-log regression; returns `(A, p)`.
pub fn power_law_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (a, b) = linear_fit(&lx, &ly);
    (a.exp(), b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i0_small_values() {
        // I₀(1) = 1.2660658777520082
        assert!((bessel_i0(1.0) - 1.2660658777520082).abs() < 1e-14);
        assert!((bessel_i0(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn i0_scaled_branches_agree() {
        let x = 699.0;
        let a = bessel_i0_scaled(x);
        // asymptotic e^{-x} I₀(x) ≈ (2πx)^{-1/2} (1 + 1/(8x) + 9/(128x²))
        let asym = (2.0 * PI * x).powf(-0.5) * (1.0 + 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x));
        assert!((a / asym - 1.0).abs() < 1e-8);
        let b = bessel_i0_scaled(701.0);
        let asym = (2.0 * PI * 701.0f64).powf(-0.5) * (1.0 + 1.0 / (8.0 * 701.0) + 9.0 / (128.0 * 701.0 * 701.0));
        assert!((b / asym - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn legendre_at_one() {
        for n in 0..30 {
            assert!((legendre_p(n, Complex64::new(1.0, 0.0)).re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn highest_factor_matches_gamma_ratio() {
        for n in [0usize, 1, 5, 40] {
            let q = assoc_legendre_factor(n, n, Complex64::new(0.3, 0.0)).norm_sqr();
            let expect = gamma_ratio(n as f64 + 1.5, n as f64 + 1.0) / (2.0 * PI.powf(1.5));
            assert!((q / expect - 1.0).abs() < 1e-12, "n={n}");
        }
    }
}
