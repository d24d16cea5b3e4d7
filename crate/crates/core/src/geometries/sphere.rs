use super::{EigenIndex, Eigendata, EigendataEntry, Geometry};
use crate::error::{GrauertError, Result};
use crate::special::{assoc_legendre_factor, gamma_ratio, legendre_p};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

/// Which spherical harmonics to materialize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereBasis {
    /// All `Y_N^m`, `|m| ≤ N`: a complete orthonormal basis up to `N_max`.
    Full,
    /// Only the highest-weight `Y_N^N` and the zonal `Y_N^0`.
    Extremal,
}

/// `Γ(N+1)/Γ(N+3/2)`: the squared norm of `(x+iy)^N` against the sphere's
/// area measure divided by `2π^{3/2}`.
pub fn highest_weight_norm_ratio(n: usize) -> f64 {
    gamma_ratio(n as f64 + 1.0, n as f64 + 1.5)
}

/// Zonal harmonic `Y_N^0` at a point of the complex quadric, by the Laplace
/// integral `P_N(z) = (1/2π)∫(z + i√(1−z²) cos θ)^N dθ` with the trapezoidal
/// rule on `nodes` points. The integrand is a trigonometric polynomial of
/// degree `N`, so the rule is exact once `nodes > N`.
pub fn zonal_quadrature(n: usize, z3: Complex64, nodes: usize) -> Result<Complex64> {
    if nodes <= n {
        return Err(GrauertError::Accuracy(format!("{nodes} trapezoid nodes cannot resolve a degree-{n} zonal integrand")));
    }
    let root = (Complex64::new(1.0, 0.0) - z3 * z3).sqrt() * Complex64::new(0.0, 1.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..nodes {
        let c = (TAU * j as f64 / nodes as f64).cos();
        acc += (z3 + root * c).powu(n as u32);
    }
    Ok(acc / nodes as f64 * ((2.0 * n as f64 + 1.0) / (4.0 * PI)).sqrt())
}

/// Default trapezoid size for [`zonal_quadrature`].
pub fn zonal_nodes(n: usize) -> usize {
    256.max(8 * n)
}

/// Holomorphic extension of the orthonormal `Y_N^m` (Condon–Shortley) to
/// `ζ ∈ ℂ³`: `Q_N^{|m|}(ζ₃)(ζ₁ ± iζ₂)^{|m|}`. The zonal case uses the
/// Laplace integral.
pub fn sphere_harmonic(n: usize, m: i64, zeta: &[Complex64]) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let am = m.unsigned_abs() as usize;
    if am > n {
        return Complex64::new(0.0, 0.0);
    }
    if m == 0 {
        return zonal_quadrature(n, zeta[2], zonal_nodes(n)).expect("default node count exceeds the degree");
    }
    let q = assoc_legendre_factor(n, am, zeta[2]);
    if m > 0 {
        q * (zeta[0] + i * zeta[1]).powu(am as u32)
    } else {
        let sign = if am % 2 == 0 { 1.0 } else { -1.0 };
        q * (zeta[0] - i * zeta[1]).powu(am as u32) * sign
    }
}

/// `Σ_m |Y_N^m(ζ)|² = (2N+1)/(4π)·P_N(ζ·ζ̄)` (addition theorem).
pub fn sphere_cluster_kernel(n: usize, zeta: &[Complex64]) -> f64 {
    let p: Complex64 = zeta.iter().map(|z| z * z.conj()).sum();
    (2.0 * n as f64 + 1.0) / (4.0 * PI) * legendre_p(n, p).re
}

fn lambda_n(n: usize) -> f64 {
    let nf = n as f64;
    (nf * (nf + 1.0)).sqrt()
}

/// Full orthonormal basis `Y_N^m`, `N ≤ N_max`, with `λ_N = √(N(N+1))`.
pub fn sphere_eigendata(n_max: usize) -> Result<Eigendata> {
    sphere_eigendata_with(n_max, SphereBasis::Full)
}

pub fn sphere_eigendata_with(n_max: usize, basis: SphereBasis) -> Result<Eigendata> {
    let count = (n_max + 1) * (n_max + 1);
    if count as f64 > 5e7 {
        return Err(GrauertError::Resource(format!("{count} spherical harmonics requested")));
    }
    let mut entries = Vec::new();
    for n in 0..=n_max {
        let lambda = lambda_n(n);
        match basis {
            SphereBasis::Full => {
                for m in -(n as i64)..=(n as i64) {
                    entries.push(EigendataEntry { lambda, index: EigenIndex::Sphere { n, m } });
                }
            }
            SphereBasis::Extremal => {
                entries.push(EigendataEntry { lambda, index: EigenIndex::Sphere { n, m: 0 } });
                if n > 0 {
                    entries.push(EigendataEntry { lambda, index: EigenIndex::Sphere { n, m: n as i64 } });
                }
            }
        }
    }
    // A partial basis covers no full eigenspace beyond N = 0.
    let cutoff = match basis {
        SphereBasis::Full => lambda_n(n_max),
        SphereBasis::Extremal => 0.0,
    };
    Ok(Eigendata { geometry: Geometry::Sphere, cutoff, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometries::tube_point;
    use crate::special::ln_gamma;

    fn real(x: [f64; 3]) -> Vec<Complex64> {
        x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
    }

    #[test]
    fn norm_ratio_example() {
        assert!((highest_weight_norm_ratio(2) - 0.601802).abs() < 1e-6);
        // (ln) Γ(3)/Γ(3.5) = 2/3.32335097
        assert!((highest_weight_norm_ratio(2) - 2.0 / 3.32335097).abs() < 1e-8);
    }

    #[test]
    fn constant_and_highest_weight_values() {
        let y00 = sphere_harmonic(0, 0, &real([1.0, 0.0, 0.0]));
        assert!((y00.norm_sqr() - 1.0 / (4.0 * PI)).abs() < 1e-15);
        for n in [1usize, 5, 30] {
            let y = sphere_harmonic(n, n as i64, &real([1.0, 0.0, 0.0]));
            let want = (ln_gamma(n as f64 + 1.5) - ln_gamma(n as f64 + 1.0)).exp() / (2.0 * PI.powf(1.5));
            assert!((y.norm_sqr() / want - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zonal_pole_and_recurrence() {
        for n in [0usize, 1, 7, 40] {
            let y = sphere_harmonic(n, 0, &real([0.0, 0.0, 1.0]));
            let want = ((2.0 * n as f64 + 1.0) / (4.0 * PI)).sqrt();
            assert!((y.re - want).abs() < 1e-12 && y.im.abs() < 1e-12);
            let z = Complex64::new(1.1, -0.4);
            let quad = zonal_quadrature(n, z, zonal_nodes(n)).unwrap();
            let rec = assoc_legendre_factor(n, 0, z);
            assert!((quad - rec).norm() <= 1e-11 * rec.norm().max(1.0));
        }
        assert!(matches!(zonal_quadrature(10, Complex64::new(0.5, 0.0), 10), Err(GrauertError::Accuracy(_))));
    }

    #[test]
    fn addition_theorem_real_points() {
        let x = [0.36, 0.48, 0.8];
        let y = [0.0, 0.6, -0.8];
        for n in 0..=20usize {
            let s: Complex64 =
                (-(n as i64)..=n as i64).map(|m| sphere_harmonic(n, m, &real(x)) * sphere_harmonic(n, m, &real(y)).conj()).sum();
            let c: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            let want = (2.0 * n as f64 + 1.0) / (4.0 * PI) * legendre_p(n, Complex64::new(c, 0.0)).re;
            assert!((s.re - want).abs() < 1e-10 && s.im.abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn complexified_cluster_kernel() {
        let p = tube_point(Geometry::Sphere, &[0.6, 0.0, 0.8], &[0.0, 1.0, 0.0], 0.7).unwrap();
        let z = p.zeta();
        for n in [3usize, 12] {
            let s: f64 = (-(n as i64)..=n as i64).map(|m| sphere_harmonic(n, m, &z).norm_sqr()).sum();
            let k = sphere_cluster_kernel(n, &z);
            assert!((s / k - 1.0).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn eigendata_shape() {
        let e = sphere_eigendata(4).unwrap();
        assert_eq!(e.len(), 25);
        assert!((e.entries[24].lambda - 20f64.sqrt()).abs() < 1e-15);
        let x = sphere_eigendata_with(4, SphereBasis::Extremal).unwrap();
        assert_eq!(x.len(), 9);
    }
}
