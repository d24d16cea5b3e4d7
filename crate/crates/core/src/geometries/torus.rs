use super::{EigenIndex, Eigendata, EigendataEntry, Geometry};
use crate::error::{GrauertError, Result};
use num_complex::Complex64;

/// Entries beyond this many lattice points are refused.
const MAX_ENTRIES: f64 = 5e7;

/// `e^{ikθ}`, `|k| ≤ λ_max`, sorted by `(|k|, k)`.
pub fn circle_eigendata(lambda_max: f64) -> Result<Eigendata> {
    if !(lambda_max >= 0.0) || !lambda_max.is_finite() {
        return Err(GrauertError::Domain(format!("lambda_max must be nonnegative, got {lambda_max}")));
    }
    let kmax = lambda_max.floor() as i64;
    if 2.0 * kmax as f64 + 1.0 > MAX_ENTRIES {
        return Err(GrauertError::Resource(format!("circle eigendata would need {} entries", 2 * kmax + 1)));
    }
    let mut entries = vec![EigendataEntry { lambda: 0.0, index: EigenIndex::Circle(0) }];
    for k in 1..=kmax {
        entries.push(EigendataEntry { lambda: k as f64, index: EigenIndex::Circle(-k) });
        entries.push(EigendataEntry { lambda: k as f64, index: EigenIndex::Circle(k) });
    }
    Ok(Eigendata { geometry: Geometry::Circle, cutoff: lambda_max, entries })
}

/// Volume estimate `|B^m| λ^m` for the lattice-point count.
fn ball_estimate(m: usize, r: f64) -> f64 {
    let half = 0.5 * m as f64;
    std::f64::consts::PI.powf(half) / crate::special::ln_gamma(half + 1.0).exp() * r.powi(m as i32)
}

/// Exact number of `k ∈ ℤ^m` with `|k| ≤ r`.
pub fn lattice_count(m: usize, r: f64) -> usize {
    let r2 = (r * r).floor() as i64;
    let kmax = r.floor() as i64;
    fn rec(m: usize, budget: i64, kmax: i64) -> usize {
        if m == 0 {
            return 1;
        }
        let mut c = 0;
        for k in -kmax..=kmax {
            let rest = budget - k * k;
            if rest >= 0 {
                c += rec(m - 1, rest, kmax);
            }
        }
        c
    }
    rec(m, r2, kmax)
}

/// Plane waves `e^{i⟨x, k⟩}` with `|k| ≤ λ_max`, sorted by `(|k|, k)`.
pub fn torus_eigendata(m: usize, lambda_max: f64) -> Result<Eigendata> {
    if m == 0 {
        return Err(GrauertError::Dimension("torus dimension must be at least 1".into()));
    }
    if !(lambda_max >= 0.0) || !lambda_max.is_finite() {
        return Err(GrauertError::Domain(format!("lambda_max must be nonnegative, got {lambda_max}")));
    }
    let est = ball_estimate(m, lambda_max + 1.0);
    if est > MAX_ENTRIES {
        return Err(GrauertError::Resource(format!(
            "about {est:.3e} lattice points for m={m}, λ_max={lambda_max}; limit is {MAX_ENTRIES:e}"
        )));
    }
    let kmax = lambda_max.floor() as i64;
    let r2 = lambda_max * lambda_max;
    let mut keyed: Vec<(i64, Box<[i64]>)> = Vec::with_capacity(est as usize + 16);
    let mut k = vec![-kmax; m];
    loop {
        let n2: i64 = k.iter().map(|a| a * a).sum();
        if n2 as f64 <= r2 {
            keyed.push((n2, k.clone().into_boxed_slice()));
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == m {
                keyed.sort();
                let entries = keyed
                    .into_iter()
                    .map(|(n2, k)| EigendataEntry { lambda: (n2 as f64).sqrt(), index: EigenIndex::Torus(k) })
                    .collect();
                return Ok(Eigendata { geometry: Geometry::Torus { m }, cutoff: lambda_max, entries });
            }
            k[i] += 1;
            if k[i] <= kmax {
                break;
            }
            k[i] = -kmax;
            i += 1;
        }
    }
}

/// Truncated flat-torus series
/// `Σ_{n≤N} sin(nλ|k|)/(n|k|) · Re[(λ/(n|k| + 2iτ))^{(m−1)/2}]` (principal branch).
pub fn flat_torus_q(k: &[i64], tau: f64, lambda: f64, m: usize, n_terms: usize) -> Result<f64> {
    let kn = k.iter().map(|&a| (a * a) as f64).sum::<f64>().sqrt();
    if kn == 0.0 {
        return Err(GrauertError::Domain("flat_torus_q needs k ≠ 0".into()));
    }
    let p = 0.5 * (m as f64 - 1.0);
    let mut acc = crate::summation::Accumulator::new();
    for n in 1..=n_terms {
        let nf = n as f64;
        let amp = if m == 1 { 1.0 } else { (Complex64::new(lambda, 0.0) / Complex64::new(nf * kn, 2.0 * tau)).powf(p).re };
        acc.add((nf * lambda * kn).sin() / (nf * kn) * amp);
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometries::tube_point;

    #[test]
    fn circle_counts_and_values() {
        let e = circle_eigendata(10.0).unwrap();
        assert_eq!(e.len(), 21);
        let p = tube_point(Geometry::Circle, &[0.4], &[-1.0], 0.5).unwrap();
        let k3 = e.entries.iter().find(|x| x.index == EigenIndex::Circle(3)).unwrap();
        assert!((k3.eval_abs2(&p).unwrap() - 3f64.exp()).abs() < 1e-12);
        assert!((k3.eval_complexified(&p).unwrap().norm_sqr() - 3f64.exp()).abs() < 1e-12);
        let k0 = &e.entries[0];
        assert_eq!(k0.eval_complexified(&p).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn torus_counts() {
        assert_eq!(torus_eigendata(2, 5.0).unwrap().len(), 81);
        assert_eq!(lattice_count(2, 5.0), 81);
        assert_eq!(torus_eigendata(2, 3.0).unwrap().len(), 29);
        assert_eq!(torus_eigendata(3, 2.0).unwrap().len(), lattice_count(3, 2.0));
        assert!(matches!(torus_eigendata(3, 1e4), Err(GrauertError::Resource(_))));
    }

    #[test]
    fn torus_values() {
        let e = torus_eigendata(2, 2.0).unwrap();
        let p = tube_point(Geometry::Torus { m: 2 }, &[0.2, 1.1], &[-1.0, 0.0], 0.5).unwrap();
        let k10 = e.entries.iter().find(|x| x.index == EigenIndex::Torus(vec![1, 0].into())).unwrap();
        assert!((k10.eval_abs2(&p).unwrap() - 1f64.exp()).abs() < 1e-14);
        assert_eq!(e.entries[0].eval_abs2(&p).unwrap(), 1.0);
        // τ = 0 recovers the real plane wave.
        let q = tube_point(Geometry::Torus { m: 2 }, &[0.2, 1.1], &[1.0, 0.0], 0.0).unwrap();
        let v = k10.eval_complexified(&q).unwrap();
        assert!((v - Complex64::from_polar(1.0, 0.2)).norm() < 1e-15);
    }

    #[test]
    fn flat_q_limits() {
        assert_eq!(flat_torus_q(&[1, 0], 0.5, 0.0, 2, 1000).unwrap(), 0.0);
        // m = 1 is the circle sawtooth: 2Σ sin(nx)/n / 2 → (π − x)/2.
        let x = 1.0;
        let q = flat_torus_q(&[1], 0.5, x, 1, 200_000).unwrap();
        assert!((q - (std::f64::consts::PI - x) / 2.0).abs() < 1e-4);
    }
}
