//! Model geometries: the circle, flat tori `ℝ^m/2πℤ^m` and the round 2-sphere,
//! with exact spectra, complexified eigenfunctions on the tube boundary
//! `∂M_τ`, the geodesic flow and linearized Poincaré data.

mod sphere;
mod torus;

pub use sphere::{
    highest_weight_norm_ratio, sphere_cluster_kernel, sphere_eigendata, sphere_eigendata_with, sphere_harmonic, zonal_quadrature,
    SphereBasis,
};
pub use torus::{circle_eigendata, flat_torus_q, lattice_count, torus_eigendata};

use crate::error::{GrauertError, Result};
use crate::linalg::RMat;
use crate::symplectic::{classify, ClassificationTag, SymplecticMap, DEFAULT_TOL};
use num_complex::Complex64;
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Geometry {
    Circle,
    /// Flat torus `ℝ^m / 2πℤ^m`.
    Torus {
        m: usize,
    },
    /// Round unit 2-sphere.
    Sphere,
    /// Synthetic spectra with prescribed weights (tests and toy examples).
    Toy,
}

impl Geometry {
    /// Real dimension `m` of the manifold.
    pub fn dim(&self) -> usize {
        match self {
            Geometry::Circle => 1,
            Geometry::Torus { m } => *m,
            Geometry::Sphere => 2,
            Geometry::Toy => 1,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Geometry::Circle => "circle".into(),
            Geometry::Torus { m } => format!("torus{m}"),
            Geometry::Sphere => "sphere".into(),
            Geometry::Toy => "toy".into(),
        }
    }

    /// `vol(∂M_τ)` for the boundary measure used throughout: the base carries
    /// its normalized (probability) measure, the fiber the round measure of
    /// the radius-`τ` cosphere, so `vol = τ^{m−1}|S^{m−1}|`.
    pub fn boundary_volume(&self, tau: f64) -> f64 {
        let m = self.dim();
        let sphere_area = 2.0 * std::f64::consts::PI.powf(0.5 * m as f64) / crate::special::ln_gamma(0.5 * m as f64).exp();
        tau.powi(m as i32 - 1) * sphere_area
    }
}

/// A point `ζ = E(x, ξ) = exp_x(iξ)` of `∂M_τ`, `|ξ| = τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TubePoint {
    pub geometry: Geometry,
    /// Angles for the circle and tori, a unit 3-vector for the sphere.
    pub x: Vec<f64>,
    /// Covector with `|ξ| = τ`; for the sphere a tangent vector at `x`.
    pub xi: Vec<f64>,
    pub tau: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Builds `E(x, τ·direction)`; `direction` must be a unit (co)vector, and for
/// the sphere tangent to `x`.
pub fn tube_point(geometry: Geometry, x: &[f64], direction: &[f64], tau: f64) -> Result<TubePoint> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(GrauertError::Domain(format!("τ must be nonnegative, got {tau}")));
    }
    let want = match geometry {
        Geometry::Circle => 1,
        Geometry::Torus { m } => m,
        Geometry::Sphere => 3,
        Geometry::Toy => direction.len(),
    };
    if x.len() != want || direction.len() != want {
        return Err(GrauertError::Dimension(format!(
            "{} points need {want} coordinates, got x: {}, direction: {}",
            geometry.name(),
            x.len(),
            direction.len()
        )));
    }
    if (norm(direction) - 1.0).abs() > 1e-10 {
        return Err(GrauertError::Domain(format!("direction has norm {}, expected 1", norm(direction))));
    }
    if geometry == Geometry::Sphere {
        if (norm(x) - 1.0).abs() > 1e-10 {
            return Err(GrauertError::Domain(format!("sphere base point has norm {}", norm(x))));
        }
        if dot(x, direction).abs() > 1e-10 {
            return Err(GrauertError::Domain("sphere direction is not tangent to x".into()));
        }
    }
    Ok(TubePoint { geometry, x: x.to_vec(), xi: direction.iter().map(|d| tau * d).collect(), tau })
}

impl TubePoint {
    /// Unit direction `ξ/|ξ|` (meaningless at `τ = 0`, where `ξ = 0`).
    pub fn direction(&self) -> Vec<f64> {
        let n = norm(&self.xi);
        if n == 0.0 {
            return vec![0.0; self.xi.len()];
        }
        self.xi.iter().map(|v| v / n).collect()
    }

    /// Complex coordinates: `x + iξ` on tori, `cosh τ·x + i sinh τ·v` on the sphere.
    pub fn zeta(&self) -> Vec<Complex64> {
        match self.geometry {
            Geometry::Sphere => {
                let v = self.direction();
                let (c, s) = (self.tau.cosh(), self.tau.sinh());
                self.x.iter().zip(&v).map(|(&a, &b)| Complex64::new(c * a, s * b)).collect()
            }
            _ => self.x.iter().zip(&self.xi).map(|(&a, &b)| Complex64::new(a, b)).collect(),
        }
    }

    /// `|ξ|`, the Grauert tube function.
    pub fn radius(&self) -> f64 {
        norm(&self.xi)
    }

    /// Sphere radius recovered from the complexified distance:
    /// `(1/2i)·arccos(ζ·ζ̄)`.
    pub fn complexified_radius(&self) -> Result<f64> {
        if self.geometry != Geometry::Sphere {
            return Ok(self.radius());
        }
        let z = self.zeta();
        let p: Complex64 = z.iter().map(|w| w * w.conj()).sum();
        let r = p.acos() / Complex64::new(0.0, 2.0);
        Ok(r.norm())
    }
}

/// `g^t(ζ)`: translation along `ξ/|ξ|` on tori, rotation of `(x, v)` in
/// their plane on the sphere.
pub fn geodesic_flow(p: &TubePoint, t: f64) -> TubePoint {
    let mut q = p.clone();
    match p.geometry {
        Geometry::Sphere => {
            let v = p.direction();
            let (s, c) = t.sin_cos();
            q.x = p.x.iter().zip(&v).map(|(a, b)| c * a + s * b).collect();
            q.xi = p.x.iter().zip(&v).map(|(a, b)| p.tau * (-s * a + c * b)).collect();
        }
        _ => {
            let u = p.direction();
            q.x = p.x.iter().zip(&u).map(|(a, b)| (a + t * b).rem_euclid(TAU)).collect();
        }
    }
    q
}

/// Distance between two tube points of the same geometry (angles mod 2π).
pub fn tube_distance(a: &TubePoint, b: &TubePoint) -> f64 {
    let dx: f64 = match a.geometry {
        Geometry::Sphere => a.x.iter().zip(&b.x).map(|(p, q)| (p - q).powi(2)).sum(),
        _ => {
            a.x.iter()
                .zip(&b.x)
                .map(|(p, q)| {
                    let r = (p - q).rem_euclid(TAU);
                    r.min(TAU - r).powi(2)
                })
                .sum()
        }
    };
    let dxi: f64 = a.xi.iter().zip(&b.xi).map(|(p, q)| (p - q).powi(2)).sum();
    (dx + dxi).sqrt()
}

/// Linearized return data at a periodic point.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincareData {
    /// Primitive period (length of the closed geodesic).
    pub period: f64,
    /// For flat tori, the bare `|k|` used inside the flat-torus series.
    pub lattice_period: Option<f64>,
    pub map: SymplecticMap,
    /// Flat tori: the return map is a shear, not semi-simple.
    pub parabolic: bool,
    pub tag: ClassificationTag,
    pub exponents: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Periodicity {
    Periodic(PoincareData),
    NotPeriodic,
}

impl Periodicity {
    pub fn data(&self) -> Option<&PoincareData> {
        match self {
            Periodicity::Periodic(d) => Some(d),
            Periodicity::NotPeriodic => None,
        }
    }
}

/// Largest lattice coordinate searched when deciding whether a torus direction
/// is rational.
pub const LATTICE_SEARCH: i64 = 64;

/// Primitive lattice vector `k` with `k/|k|` equal to `u` within `1e-10`.
pub fn rational_direction(u: &[f64]) -> Option<Vec<i64>> {
    let m = u.len();
    let mut best: Option<Vec<i64>> = None;
    // Scale so the largest coordinate is an integer n and test rounding.
    let imax = (0..m).max_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs()))?;
    for n in 1..=LATTICE_SEARCH {
        let scale = n as f64 / u[imax].abs();
        let k: Vec<i64> = u.iter().map(|v| (v * scale).round() as i64).collect();
        let kn = (k.iter().map(|&a| (a * a) as f64).sum::<f64>()).sqrt();
        if kn == 0.0 {
            continue;
        }
        let err: f64 = k.iter().zip(u).map(|(&a, b)| (a as f64 / kn - b).powi(2)).sum::<f64>().sqrt();
        if err < 1e-10 {
            let g = k.iter().fold(0i64, |g, &a| gcd(g, a.abs()));
            best = Some(k.iter().map(|a| a / g.max(1)).collect());
            break;
        }
    }
    best
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Periodicity and linearized Poincaré map at `p`.
pub fn poincare_data(p: &TubePoint) -> Result<Periodicity> {
    match p.geometry {
        Geometry::Circle => {
            let map = SymplecticMap::identity(0);
            Ok(Periodicity::Periodic(PoincareData {
                period: TAU,
                lattice_period: Some(1.0),
                tag: classify(&map, 1e-9)?,
                map,
                parabolic: false,
                exponents: vec![],
            }))
        }
        Geometry::Torus { m } => {
            if p.radius() == 0.0 {
                return Ok(Periodicity::NotPeriodic);
            }
            match rational_direction(&p.direction()) {
                None => Ok(Periodicity::NotPeriodic),
                Some(k) => {
                    let kn = k.iter().map(|&a| (a * a) as f64).sum::<f64>().sqrt();
                    let period = TAU * kn;
                    let d = m - 1;
                    let map = if d == 0 { SymplecticMap::identity(0) } else { SymplecticMap::shear(d, period) };
                    let tag = if d == 0 { classify(&map, 1e-9)? } else { ClassificationTag::NonSemisimple };
                    Ok(Periodicity::Periodic(PoincareData {
                        period,
                        lattice_period: Some(kn),
                        map,
                        parabolic: d > 0,
                        tag,
                        exponents: vec![],
                    }))
                }
            }
        }
        Geometry::Sphere => {
            let map = SymplecticMap::new(RMat::identity(2, 2), DEFAULT_TOL)?;
            Ok(Periodicity::Periodic(PoincareData {
                period: TAU,
                lattice_period: None,
                tag: classify(&map, 1e-9)?,
                map,
                parabolic: false,
                exponents: vec![0.0],
            }))
        }
        Geometry::Toy => Ok(Periodicity::NotPeriodic),
    }
}

/// Label of an eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub enum EigenIndex {
    /// `e^{ikθ}`.
    Circle(i64),
    /// `e^{i⟨x, k⟩}`.
    Torus(Box<[i64]>),
    /// `Y_N^m`.
    Sphere { n: usize, m: i64 },
    /// Synthetic entry with a fixed `|φ^ℂ|²`.
    Toy { id: usize, abs2: f64 },
}

/// One eigenvalue of `√Δ` with its complexified eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct EigendataEntry {
    pub lambda: f64,
    pub index: EigenIndex,
}

impl EigendataEntry {
    fn check(&self, p: &TubePoint) -> Result<()> {
        let ok = matches!(
            (&self.index, p.geometry),
            (EigenIndex::Circle(_), Geometry::Circle)
                | (EigenIndex::Circle(_), Geometry::Torus { m: 1 })
                | (EigenIndex::Torus(_), Geometry::Torus { .. })
                | (EigenIndex::Sphere { .. }, Geometry::Sphere)
                | (EigenIndex::Toy { .. }, _)
        );
        if !ok {
            return Err(GrauertError::Dimension(format!(
                "{:?} cannot be evaluated on a {} point",
                self.index,
                p.geometry.name()
            )));
        }
        if let EigenIndex::Torus(k) = &self.index {
            if k.len() != p.x.len() {
                return Err(GrauertError::Dimension("lattice vector and point dimensions differ".into()));
            }
        }
        Ok(())
    }

    /// `φ^ℂ(ζ)`.
    pub fn eval_complexified(&self, p: &TubePoint) -> Result<Complex64> {
        self.check(p)?;
        Ok(match &self.index {
            EigenIndex::Circle(k) => {
                let z = p.zeta()[0];
                (Complex64::new(0.0, 1.0) * z * *k as f64).exp()
            }
            EigenIndex::Torus(k) => {
                let z = p.zeta();
                let s: Complex64 = z.iter().zip(k.iter()).map(|(w, &a)| w * a as f64).sum();
                (Complex64::new(0.0, 1.0) * s).exp()
            }
            EigenIndex::Sphere { n, m } => sphere_harmonic(*n, *m, &p.zeta()),
            EigenIndex::Toy { abs2, .. } => Complex64::new(abs2.sqrt(), 0.0),
        })
    }

    /// `ln |φ^ℂ(ζ)|²`, exact in closed form for exponentials.
    pub fn log_abs2(&self, p: &TubePoint) -> Result<f64> {
        self.check(p)?;
        Ok(match &self.index {
            EigenIndex::Circle(k) => -2.0 * p.xi[0] * *k as f64,
            EigenIndex::Torus(k) => -2.0 * p.xi.iter().zip(k.iter()).map(|(x, &a)| x * a as f64).sum::<f64>(),
            EigenIndex::Toy { abs2, .. } => abs2.ln(),
            EigenIndex::Sphere { .. } => self.eval_complexified(p)?.norm_sqr().ln(),
        })
    }

    /// `|φ^ℂ(ζ)|²`.
    pub fn eval_abs2(&self, p: &TubePoint) -> Result<f64> {
        match &self.index {
            EigenIndex::Sphere { .. } => Ok(self.eval_complexified(p)?.norm_sqr()),
            EigenIndex::Toy { abs2, .. } => {
                self.check(p)?;
                Ok(*abs2)
            }
            _ => Ok(self.log_abs2(p)?.exp()),
        }
    }

    /// `e^{−2τλ}|φ^ℂ(ζ)|²`, formed in log space for the exponentials.
    pub fn tempered_weight(&self, p: &TubePoint, tau: f64) -> Result<f64> {
        match &self.index {
            EigenIndex::Sphere { .. } | EigenIndex::Toy { .. } => Ok((-2.0 * tau * self.lambda).exp() * self.eval_abs2(p)?),
            _ => Ok((self.log_abs2(p)? - 2.0 * tau * self.lambda).exp()),
        }
    }
}

/// A finite, index-sorted piece of the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigendata {
    pub geometry: Geometry,
    /// Every eigenvalue `≤ cutoff` is present.
    pub cutoff: f64,
    /// Sorted by `λ`, then by index.
    pub entries: Vec<EigendataEntry>,
}

impl Eigendata {
    /// Synthetic eigendata `{(λ_j, |φ_j|²)}`.
    pub fn toy(values: &[(f64, f64)]) -> Result<Self> {
        if values.iter().any(|&(l, w)| !(l >= 0.0) || !(w >= 0.0)) {
            return Err(GrauertError::Domain("toy eigenvalues and weights must be nonnegative".into()));
        }
        let mut entries: Vec<EigendataEntry> = values
            .iter()
            .enumerate()
            .map(|(id, &(lambda, abs2))| EigendataEntry { lambda, index: EigenIndex::Toy { id, abs2 } })
            .collect();
        entries.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        let cutoff = entries.last().map_or(0.0, |e| e.lambda);
        Ok(Self { geometry: Geometry::Toy, cutoff, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Distinct eigenvalues in increasing order.
    pub fn distinct_eigenvalues(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for e in &self.entries {
            if out.last().is_none_or(|&l| l != e.lambda) {
                out.push(e.lambda);
            }
        }
        out
    }

    /// Half the minimum gap between distinct eigenvalues.
    pub fn half_gap(&self) -> f64 {
        let d = self.distinct_eigenvalues();
        0.5 * d.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Entries with `λ ≤ cutoff`, keeping the order.
    pub fn truncated(&self, cutoff: f64) -> Self {
        let entries = self.entries.iter().filter(|e| e.lambda <= cutoff).cloned().collect();
        Self { geometry: self.geometry, cutoff: cutoff.min(self.cutoff), entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_tube_point_example() {
        let p = tube_point(Geometry::Sphere, &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], 0.5).unwrap();
        let z = p.zeta();
        assert!((z[0] - Complex64::new(0.0, 0.5f64.sinh())).norm() < 1e-15);
        assert!((z[0].im - 0.521095).abs() < 1e-6);
        assert!((z[2].re - 1.127626).abs() < 1e-6);
        let q: Complex64 = z.iter().map(|w| w * w).sum();
        assert!((q - 1.0).norm() < 1e-12);
        assert!((p.complexified_radius().unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn tube_point_validation() {
        assert!(matches!(tube_point(Geometry::Torus { m: 2 }, &[0.0, 0.0], &[1.0, 1.0], 0.5), Err(GrauertError::Domain(_))));
        assert!(tube_point(Geometry::Sphere, &[0.0, 0.0, 1.0], &[0.0, 0.0, 1.0], 0.5).is_err());
        let p = tube_point(Geometry::Sphere, &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], 0.0).unwrap();
        assert_eq!(p.zeta().iter().map(|z| z.re).collect::<Vec<_>>(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn flow_periodicity() {
        let p = tube_point(Geometry::Sphere, &[0.6, 0.0, 0.8], &[0.0, 1.0, 0.0], 0.3).unwrap();
        assert!(tube_distance(&geodesic_flow(&p, TAU), &p) < 1e-12);
        assert!(tube_distance(&geodesic_flow(&p, 0.0), &p) < 1e-15);
        let k = [1.0, 2.0];
        let kn = 5f64.sqrt();
        let q = tube_point(Geometry::Torus { m: 2 }, &[0.3, 0.1], &[k[0] / kn, k[1] / kn], 0.5).unwrap();
        assert!(tube_distance(&geodesic_flow(&q, TAU * kn), &q) < 1e-12);
    }

    #[test]
    fn poincare_examples() {
        let t = tube_point(Geometry::Torus { m: 2 }, &[0.0, 0.0], &[1.0, 0.0], 0.5).unwrap();
        let d = poincare_data(&t).unwrap();
        let d = d.data().unwrap();
        assert!((d.period - TAU).abs() < 1e-15);
        assert_eq!(d.lattice_period, Some(1.0));
        assert!(d.parabolic);
        let s3 = 3f64.sqrt();
        let t = tube_point(Geometry::Torus { m: 2 }, &[0.0, 0.0], &[1.0 / s3, 2f64.sqrt() / s3], 0.5).unwrap();
        assert_eq!(poincare_data(&t).unwrap(), Periodicity::NotPeriodic);
        let c = tube_point(Geometry::Circle, &[0.0], &[-1.0], 0.5).unwrap();
        let d = poincare_data(&c).unwrap();
        assert!((d.data().unwrap().period - TAU).abs() < 1e-15);
    }

    #[test]
    fn boundary_volumes() {
        assert!((Geometry::Torus { m: 2 }.boundary_volume(0.5) - std::f64::consts::PI).abs() < 1e-14);
        assert!((Geometry::Sphere.boundary_volume(0.5) - std::f64::consts::PI).abs() < 1e-14);
        assert!((Geometry::Torus { m: 3 }.boundary_volume(0.5) - std::f64::consts::PI).abs() < 1e-14);
        assert!((Geometry::Circle.boundary_volume(0.5) - 2.0).abs() < 1e-14);
    }
}
