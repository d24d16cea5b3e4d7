use crate::error::{GrauertError, Result};
use crate::geometries::{sphere_harmonic, tube_point, EigenIndex, EigendataEntry, Geometry, TubePoint};
use crate::special::{assoc_legendre_factor, gauss_legendre_on};
use crate::summation::Accumulator;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

/// Node count for boundary integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quadrature {
    /// Chosen from the eigenfunction's bandwidth.
    #[default]
    Auto,
    /// Fixed count per integration variable; refused if below the bandwidth.
    Nodes(usize),
}

fn lattice_norm(k: &[i64]) -> f64 {
    k.iter().map(|&a| (a * a) as f64).sum::<f64>().sqrt()
}

fn resolve(q: Quadrature, auto: usize, minimum: f64, what: &str) -> Result<usize> {
    match q {
        Quadrature::Auto => Ok(auto),
        Quadrature::Nodes(n) if (n as f64) < minimum => {
            Err(GrauertError::Accuracy(format!("{n} nodes under-resolve {what} (need at least {})", minimum.ceil())))
        }
        Quadrature::Nodes(n) => Ok(n),
    }
}

/// `∫_{S^{m−1}_τ} e^{−a·cos θ}` over the radius-`τ` cosphere (fiber integral of
/// a plane wave with `a = 2τ|k|`).
fn fiber_integral(m: usize, tau: f64, a: f64, q: Quadrature) -> Result<f64> {
    match m {
        1 => Ok(2.0 * a.cosh()),
        2 => {
            let n = resolve(q, (1.5 * a).ceil() as usize + 64, a.max(8.0), "the fiber oscillation")?;
            let mut acc = Accumulator::new();
            for j in 0..n {
                acc.add((-a * (TAU * j as f64 / n as f64).cos()).exp());
            }
            Ok(tau * TAU * acc.value() / n as f64)
        }
        _ => {
            // Polar angle θ against k; the remaining S^{m−2} integrates out.
            let n = resolve(q, a.ceil() as usize + 48, (0.5 * a).max(4.0), "the fiber oscillation")?;
            let (t, w) = gauss_legendre_on(n, 0.0, PI);
            let mut acc = Accumulator::new();
            for (ti, wi) in t.iter().zip(&w) {
                acc.add(wi * ti.sin().powi(m as i32 - 2) * (-a * ti.cos()).exp());
            }
            let sub = crate::geometries::Geometry::Torus { m: m - 1 }.boundary_volume(1.0);
            Ok(tau.powi(m as i32 - 1) * sub * acc.value())
        }
    }
}

/// `Y_N^m` through the three-term recurrence only (fast path for integrals).
fn sphere_harmonic_recurrence(n: usize, m: i64, z: &[Complex64]) -> Complex64 {
    if m == 0 {
        assoc_legendre_factor(n, 0, z[2])
    } else {
        sphere_harmonic(n, m, z)
    }
}

/// Point of `∂M_τ` over the sphere at colatitude `θ` (azimuth 0) with fiber
/// angle `ψ` measured from `e_θ` towards `e_φ`.
fn sphere_point(theta: f64, psi: f64, tau: f64) -> TubePoint {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = psi.sin_cos();
    let x = [st, 0.0, ct];
    let v = [cp * ct, sp, -cp * st];
    TubePoint { geometry: Geometry::Sphere, x: x.to_vec(), xi: v.iter().map(|c| tau * c).collect(), tau }
}

/// `‖φ^ℂ‖²_{L²(∂M_τ)}`: normalized base measure times the round measure of the
/// radius-`τ` cosphere.
pub fn l2_norm_boundary(entry: &EigendataEntry, tau: f64, quadrature: Quadrature) -> Result<f64> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(GrauertError::Domain(format!("τ must be positive, got {tau}")));
    }
    match &entry.index {
        EigenIndex::Circle(k) => fiber_integral(1, tau, 2.0 * tau * (*k as f64).abs(), quadrature),
        EigenIndex::Torus(k) => fiber_integral(k.len(), tau, 2.0 * tau * lattice_norm(k), quadrature),
        EigenIndex::Sphere { n, m } => {
            let (n, m) = (*n, *m);
            // |Y_N^m|² is invariant under rotations about the pole, so the base
            // integral reduces to colatitude.
            let bw = 2 * n + (4.0 * n as f64 * tau).ceil() as usize;
            let nodes = resolve(quadrature, bw + 64, 2.0 * n as f64 + 1.0, "a degree-2N integrand")?;
            let (th, wt) = gauss_legendre_on(nodes, 0.0, PI);
            let rows: Vec<f64> = th
                .par_iter()
                .zip(wt.par_iter())
                .map(|(&t, &w)| {
                    let mut acc = Accumulator::new();
                    for j in 0..nodes {
                        let p = sphere_point(t, TAU * j as f64 / nodes as f64, tau);
                        acc.add(sphere_harmonic_recurrence(n, m, &p.zeta()).norm_sqr());
                    }
                    w * t.sin() * acc.value() / nodes as f64
                })
                .collect();
            let mut acc = Accumulator::new();
            rows.iter().for_each(|&r| acc.add(r));
            // (1/4π)·2π·∫sinθ dθ · 2πτ·mean_ψ
            Ok(0.5 * TAU * tau * acc.value())
        }
        EigenIndex::Toy { .. } => Err(GrauertError::Domain("toy entries have no boundary norm".into())),
    }
}

/// `|φ^ℂ(ζ)|² / ‖φ^ℂ‖²`.
pub fn husimi(entry: &EigendataEntry, p: &TubePoint, quadrature: Quadrature) -> Result<f64> {
    let norm2 = l2_norm_boundary(entry, p.tau, quadrature)?;
    husimi_with_norm(entry, p, norm2)
}

/// [`husimi`] with a precomputed squared norm.
pub fn husimi_with_norm(entry: &EigendataEntry, p: &TubePoint, norm2: f64) -> Result<f64> {
    match &entry.index {
        EigenIndex::Sphere { n, m } => Ok(sphere_harmonic_recurrence(*n, *m, &p.zeta()).norm_sqr() / norm2),
        _ => Ok((entry.log_abs2(p)? - norm2.ln()).exp()),
    }
}

/// Grid for [`husimi_sup`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SearchGrid {
    /// Angular step; `None` picks `0.1/√λ`. Steps above `0.2/√λ` are refused.
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HusimiSup {
    pub value: f64,
    pub argmax: TubePoint,
    pub evaluations: usize,
}

/// Maximum of the Husimi function over `∂M_τ`, by a grid search refined with
/// a compass search around the best node.
pub fn husimi_sup(entry: &EigendataEntry, tau: f64, grid: SearchGrid, quadrature: Quadrature) -> Result<HusimiSup> {
    let lam = entry.lambda.max(1.0);
    let limit = 0.2 / lam.sqrt();
    let step = match grid.step {
        None => (0.1 / lam.sqrt()).min(0.1),
        Some(h) if !(h > 0.0) || h > limit => {
            return Err(GrauertError::Accuracy(format!("grid step {h} does not resolve λ = {} (limit {limit})", entry.lambda)))
        }
        Some(h) => h,
    };
    let norm2 = l2_norm_boundary(entry, tau, quadrature)?;
    // Each geometry maps two angles (a, b) to a boundary point.
    let (point, a_range, b_range): (Box<dyn Fn(f64, f64) -> TubePoint + Sync>, f64, f64) = match &entry.index {
        EigenIndex::Circle(_) => {
            let f = move |a: f64, _b: f64| {
                let s = if a < PI { 1.0 } else { -1.0 };
                TubePoint { geometry: Geometry::Circle, x: vec![0.0], xi: vec![s * tau], tau }
            };
            let v = [0.0, PI]
                .iter()
                .map(|&a| {
                    let p = f(a, 0.0);
                    Ok((husimi_with_norm(entry, &p, norm2)?, p))
                })
                .collect::<Result<Vec<_>>>()?;
            let best = v.into_iter().max_by(|x, y| x.0.total_cmp(&y.0)).expect("two candidates");
            return Ok(HusimiSup { value: best.0, argmax: best.1, evaluations: 2 });
        }
        EigenIndex::Torus(k) => match k.len() {
            1 => {
                let f = move |a: f64, _b: f64| {
                    let s = if a < PI { 1.0 } else { -1.0 };
                    TubePoint { geometry: Geometry::Torus { m: 1 }, x: vec![0.0], xi: vec![s * tau], tau }
                };
                (Box::new(f), TAU, 0.0)
            }
            2 => {
                let f = move |a: f64, _b: f64| {
                    tube_point(Geometry::Torus { m: 2 }, &[0.0, 0.0], &[a.cos(), a.sin()], tau).expect("unit direction")
                };
                (Box::new(f), TAU, 0.0)
            }
            3 => {
                let f = move |a: f64, b: f64| {
                    let d = [a.sin() * b.cos(), a.sin() * b.sin(), a.cos()];
                    tube_point(Geometry::Torus { m: 3 }, &[0.0; 3], &d, tau).expect("unit direction")
                };
                (Box::new(f), PI, TAU)
            }
            m => return Err(GrauertError::Domain(format!("husimi_sup searches tori of dimension ≤ 3, got {m}"))),
        },
        EigenIndex::Sphere { .. } => (Box::new(move |a: f64, b: f64| sphere_point(a, b, tau)), PI, TAU),
        EigenIndex::Toy { .. } => return Err(GrauertError::Domain("toy entries have no Husimi function".into())),
    };
    let eval = |a: f64, b: f64| -> f64 { husimi_with_norm(entry, &point(a, b), norm2).unwrap_or(f64::NAN) };
    let na = (a_range / step).ceil().max(1.0) as usize + 1;
    let nb = if b_range > 0.0 { (b_range / step).ceil() as usize } else { 1 };
    let cells: Vec<(f64, f64, f64)> = (0..na * nb)
        .into_par_iter()
        .map(|ij| {
            let a = a_range * (ij / nb) as f64 / (na - 1).max(1) as f64;
            let b = if b_range > 0.0 { b_range * (ij % nb) as f64 / nb as f64 } else { 0.0 };
            (eval(a, b), a, b)
        })
        .collect();
    let mut evaluations = cells.len();
    let (mut best, mut a, mut b) =
        cells.into_iter().fold((f64::NEG_INFINITY, 0.0, 0.0), |acc, c| if c.0 > acc.0 { c } else { acc });
    if !best.is_finite() {
        return Err(GrauertError::Numeric {
            message: "non-finite Husimi value on the search grid".into(),
            matrix: String::new(),
        });
    }
    let mut h = step;
    while h > 1e-12 {
        let mut moved = false;
        let dirs: &[(f64, f64)] =
            if b_range > 0.0 { &[(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] } else { &[(1.0, 0.0), (-1.0, 0.0)] };
        for &(da, db) in dirs {
            let (ta, tb) = ((a + h * da).clamp(0.0, a_range), b + h * db);
            let v = eval(ta, tb);
            evaluations += 1;
            if v > best {
                (best, a, b, moved) = (v, ta, tb, true);
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    Ok(HusimiSup { value: best, argmax: point(a, b), evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometries::sphere_cluster_kernel;
    use crate::special::{bessel_i0, legendre_p};

    fn torus_entry(k: &[i64]) -> EigendataEntry {
        EigendataEntry { lambda: lattice_norm(k), index: EigenIndex::Torus(k.to_vec().into()) }
    }

    fn sphere_entry(n: usize, m: i64) -> EigendataEntry {
        EigendataEntry { lambda: ((n * (n + 1)) as f64).sqrt(), index: EigenIndex::Sphere { n, m } }
    }

    #[test]
    fn torus_norms_match_bessel() {
        let tau = 0.5;
        for k in [[0i64, 0], [1, 0], [3, 4], [20, 0], [120, 160]] {
            let e = torus_entry(&k);
            let a = 2.0 * tau * lattice_norm(&k);
            let want = TAU * tau * bessel_i0(a);
            let got = l2_norm_boundary(&e, tau, Quadrature::Auto).unwrap();
            assert!((got / want - 1.0).abs() < 1e-12, "{k:?}");
        }
        let e = torus_entry(&[2, 1, 2]);
        let a = 2.0 * tau * 3.0;
        let want = 2.0 * TAU * tau * tau * a.sinh() / a;
        assert!((l2_norm_boundary(&e, tau, Quadrature::Auto).unwrap() / want - 1.0).abs() < 1e-12);
        let c = EigendataEntry { lambda: 4.0, index: EigenIndex::Circle(-4) };
        assert!((l2_norm_boundary(&c, tau, Quadrature::Auto).unwrap() - 2.0 * 4f64.cosh()).abs() < 1e-12);
        assert!(matches!(l2_norm_boundary(&torus_entry(&[100, 0]), tau, Quadrature::Nodes(20)), Err(GrauertError::Accuracy(_))));
    }

    #[test]
    fn sphere_cluster_norm_oracle() {
        let tau = 0.4;
        let c0 = l2_norm_boundary(&sphere_entry(0, 0), tau, Quadrature::Auto).unwrap();
        assert!((c0 - tau / 2.0).abs() < 1e-14);
        for n in [3usize, 10] {
            let total: f64 =
                (-(n as i64)..=n as i64).map(|m| l2_norm_boundary(&sphere_entry(n, m), tau, Quadrature::Auto).unwrap()).sum();
            let want = Geometry::Sphere.boundary_volume(tau) * (2.0 * n as f64 + 1.0) / (4.0 * PI)
                * legendre_p(n, Complex64::new((2.0 * tau).cosh(), 0.0)).re;
            assert!((total / want - 1.0).abs() < 1e-10, "n={n}");
            let z = sphere_point(0.7, 1.9, tau).zeta();
            assert!((sphere_cluster_kernel(n, &z) * Geometry::Sphere.boundary_volume(tau) / want - 1.0).abs() < 1e-10);
        }
        assert!(matches!(l2_norm_boundary(&sphere_entry(10, 3), tau, Quadrature::Nodes(12)), Err(GrauertError::Accuracy(_))));
    }

    #[test]
    fn recurrence_matches_laplace_integral() {
        let z = sphere_point(1.1, 0.3, 0.6).zeta();
        for n in [0usize, 4, 25, 80] {
            let a = sphere_harmonic(n, 0, &z);
            let b = sphere_harmonic_recurrence(n, 0, &z);
            assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0), "n={n}");
        }
    }

    #[test]
    fn husimi_integrates_to_one() {
        let tau = 0.5;
        let e = torus_entry(&[3, -2]);
        let norm2 = l2_norm_boundary(&e, tau, Quadrature::Nodes(400)).unwrap();
        let n = 1000;
        let mut acc = 0.0;
        for j in 0..n {
            let a = TAU * j as f64 / n as f64;
            let p = tube_point(Geometry::Torus { m: 2 }, &[0.3, 0.1], &[a.cos(), a.sin()], tau).unwrap();
            acc += husimi_with_norm(&e, &p, norm2).unwrap() * tau * TAU / n as f64;
        }
        assert!((acc - 1.0).abs() < 1e-10);
    }

    #[test]
    fn torus_sup_closed_form() {
        let tau = 0.5;
        let e = torus_entry(&[3, 4]);
        let s = husimi_sup(&e, tau, SearchGrid::default(), Quadrature::Auto).unwrap();
        let a = 2.0 * tau * 5.0;
        let want = a.exp() / (TAU * tau * bessel_i0(a));
        assert!((s.value / want - 1.0).abs() < 1e-10);
        let d = s.argmax.direction();
        assert!((d[0] + 0.6).abs() < 1e-5 && (d[1] + 0.8).abs() < 1e-5);
        assert!(matches!(husimi_sup(&e, tau, SearchGrid { step: Some(0.5) }, Quadrature::Auto), Err(GrauertError::Accuracy(_))));
    }

    #[test]
    fn sphere_highest_weight_sup_location() {
        let tau = 0.5;
        let n = 12;
        let e = sphere_entry(n, n as i64);
        let s = husimi_sup(&e, tau, SearchGrid::default(), Quadrature::Auto).unwrap();
        let z = s.argmax.zeta();
        let w = z[0] + Complex64::new(0.0, 1.0) * z[1];
        assert!((w.norm() - tau.exp()).abs() < 1e-6);
        assert!((s.argmax.x[2]).abs() < 1e-5);
    }
}
