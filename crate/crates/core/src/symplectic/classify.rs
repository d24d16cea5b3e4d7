use super::SymplecticMap;
use crate::error::{GrauertError, Result};
use crate::linalg::{condition_number_c, fmt_matrix, omega, to_complex, CMat};
use nalgebra::linalg::{Schur, SVD};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

/// Eigenvalue-type classification of a linear symplectic map.
///
/// Exponents are listed once per symplectic 2-plane (elliptic, hyperbolic)
/// or once per 4-dimensional quadruple (loxodromic).
#[derive(Debug, Clone, PartialEq)]
pub enum ClassificationTag {
    /// Unit-modulus pairs `e^{±iα}`, `α ∈ (0, 2π)` taken from the
    /// Krein-positive member of each pair.
    Elliptic(Vec<f64>),
    /// Real pairs `e^{±μ}`, `μ > 0`.
    HyperbolicPositive(Vec<f64>),
    /// Negative real pairs `−e^{±μ}`, `μ > 0`.
    InverseHyperbolic(Vec<f64>),
    /// Quadruples `e^{±μ ± iα}` with `α ∈ (0, π)`, `μ > 0`; stored as `(α, μ)`.
    Loxodromic(Vec<(f64, f64)>),
    /// All eigenvalues on the unit circle, some equal to `±1`. Angles as for
    /// `Elliptic`, with `0` for `+1` and `π` for `−1`.
    DegenerateElliptic(Vec<f64>),
    NonSemisimple,
    Mixed(Vec<ClassificationTag>),
}

impl ClassificationTag {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Elliptic(_) => "elliptic",
            Self::HyperbolicPositive(_) => "hyperbolic",
            Self::InverseHyperbolic(_) => "inverse-hyperbolic",
            Self::Loxodromic(_) => "loxodromic",
            Self::DegenerateElliptic(_) => "degenerate-elliptic",
            Self::NonSemisimple => "non-semisimple",
            Self::Mixed(_) => "mixed",
        }
    }

    pub fn is_semisimple(&self) -> bool {
        !matches!(self, Self::NonSemisimple)
    }

    /// Sum of the elliptic angles (zero for tags without rotation part).
    pub fn elliptic_angle_sum(&self) -> f64 {
        match self {
            Self::Elliptic(a) | Self::DegenerateElliptic(a) => a.iter().sum(),
            Self::Mixed(parts) => parts.iter().map(|p| p.elliptic_angle_sum()).sum(),
            _ => 0.0,
        }
    }
}

impl std::fmt::Display for ClassificationTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:.12}")).collect::<Vec<_>>().join(",");
        match self {
            Self::Elliptic(a) | Self::DegenerateElliptic(a) => write!(f, "{}({})", self.name(), list(a)),
            Self::HyperbolicPositive(m) | Self::InverseHyperbolic(m) => write!(f, "{}({})", self.name(), list(m)),
            Self::Loxodromic(p) => {
                let s: Vec<_> = p.iter().map(|(a, m)| format!("({a:.12},{m:.12})")).collect();
                write!(f, "loxodromic({})", s.join(","))
            }
            Self::NonSemisimple => write!(f, "non-semisimple"),
            Self::Mixed(parts) => {
                let s: Vec<_> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "mixed[{}]", s.join(";"))
            }
        }
    }
}

/// Eigen-decomposition data used by [`classify`].
#[derive(Debug, Clone)]
pub struct EigenStructure {
    pub eigenvalues: Vec<Complex64>,
    /// Columns are unit eigenvectors, aligned with `eigenvalues`.
    pub eigenvectors: CMat,
    /// `+1`/`−1` for the sign of `i v*Ωv` on unit-circle eigenvalues, `0` elsewhere.
    pub krein: Vec<i8>,
    pub condition: f64,
    pub semisimple: bool,
}

struct Cluster {
    center: Complex64,
    members: Vec<Complex64>,
}

fn cluster(eigs: &[Complex64], radius: f64) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = Vec::new();
    for &z in eigs {
        match out.iter_mut().find(|c| c.members.iter().any(|m| (m - z).norm() <= radius)) {
            Some(c) => c.members.push(z),
            None => out.push(Cluster { center: z, members: vec![z] }),
        }
    }
    for c in &mut out {
        c.center = c.members.iter().sum::<Complex64>() / c.members.len() as f64;
    }
    out
}

/// Eigenvalues, eigenvectors and Krein signs of `S`.
///
/// `tol` is relative: the working tolerance is `tol · (1 + ‖S‖)`.
pub fn eigen_structure(s: &SymplecticMap, tol: f64) -> Result<EigenStructure> {
    let m = s.matrix();
    let n = m.nrows();
    let numeric = |msg: &str| GrauertError::Numeric { message: msg.to_string(), matrix: fmt_matrix(m) };
    if m.iter().any(|x| !x.is_finite()) {
        return Err(numeric("matrix has non-finite entries"));
    }
    if n == 0 {
        return Ok(EigenStructure {
            eigenvalues: vec![],
            eigenvectors: CMat::zeros(0, 0),
            krein: vec![],
            condition: 1.0,
            semisimple: true,
        });
    }
    let scale = 1.0 + s.norm();
    let schur =
        Schur::try_new(m.clone(), f64::EPSILON, 10_000).ok_or_else(|| numeric("eigenvalue iteration did not converge"))?;
    let eigs: Vec<Complex64> = schur.complex_eigenvalues().iter().cloned().collect();

    let radius = 1e-6 * scale;
    let null_tol = 1e-6 * scale;
    let circle_tol = tol * scale;
    let sm = to_complex(m);
    let om = to_complex(&omega(s.d()));

    let mut values = Vec::with_capacity(n);
    let mut vectors: Vec<nalgebra::DVector<Complex64>> = Vec::with_capacity(n);
    let mut krein = Vec::with_capacity(n);
    let mut semisimple = true;

    for c in cluster(&eigs, radius) {
        let k = c.members.len();
        let shifted = &sm - CMat::identity(n, n) * c.center;
        let svd = SVD::try_new(shifted, false, true, f64::EPSILON, 10_000)
            .ok_or_else(|| numeric("singular value iteration did not converge"))?;
        let v_t = svd.v_t.as_ref().ok_or_else(|| numeric("missing right singular vectors"))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        if svd.singular_values[order[k - 1]] > null_tol {
            semisimple = false;
        }
        // Basis of the (approximate) eigenspace.
        let mut basis = CMat::zeros(n, k);
        for (j, &idx) in order.iter().take(k).enumerate() {
            for i in 0..n {
                basis[(i, j)] = v_t[(idx, i)].conj();
            }
        }
        let on_circle = (c.center.norm() - 1.0).abs() <= circle_tol;
        let real = c.center.im.abs() <= circle_tol;
        if on_circle && !real {
            // Diagonalize the Hermitian Krein form on the eigenspace.
            let kmat = basis.adjoint() * &om * &basis * Complex64::new(0.0, 1.0);
            let kmat = (&kmat + kmat.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = kmat.symmetric_eigen();
            let rotated = &basis * &eig.eigenvectors;
            for j in 0..k {
                let mut v = rotated.column(j).into_owned();
                let nv = v.norm();
                v /= Complex64::new(nv, 0.0);
                values.push(c.members[j]);
                vectors.push(v);
                krein.push(if eig.eigenvalues[j] > 0.0 { 1 } else { -1 });
            }
        } else {
            for j in 0..k {
                let mut v = basis.column(j).into_owned();
                let nv = v.norm();
                v /= Complex64::new(nv, 0.0);
                values.push(c.members[j]);
                vectors.push(v);
                krein.push(0);
            }
        }
    }
    let eigenvectors = CMat::from_columns(&vectors);
    let condition = condition_number_c(&eigenvectors);
    if !(condition <= 1e8) {
        semisimple = false;
    }
    Ok(EigenStructure { eigenvalues: values, eigenvectors, krein, condition, semisimple })
}

/// Classifies `S` by its eigenvalue quadruples.
///
/// `tol` is the relative eigenvalue tolerance (the spec default is `1e-9`),
/// applied as `tol · (1 + ‖S‖)` when deciding `|λ| = 1` or `λ ∈ ℝ`.
pub fn classify(s: &SymplecticMap, tol: f64) -> Result<ClassificationTag> {
    if s.d() == 0 {
        return Ok(ClassificationTag::Elliptic(vec![]));
    }
    let es = eigen_structure(s, tol)?;
    if !es.semisimple {
        return Ok(ClassificationTag::NonSemisimple);
    }
    let t = tol * (1.0 + s.norm());
    let mut elliptic = Vec::new();
    let mut degenerate = Vec::new();
    let mut hyperbolic = Vec::new();
    let mut inverse = Vec::new();
    let mut lox = Vec::new();
    let (mut plus_one, mut minus_one) = (0usize, 0usize);

    for (z, &sign) in es.eigenvalues.iter().zip(&es.krein) {
        let r = z.norm();
        let on_circle = (r - 1.0).abs() <= t;
        let real = z.im.abs() <= t;
        if on_circle && real {
            if z.re > 0.0 {
                plus_one += 1;
            } else {
                minus_one += 1;
            }
        } else if on_circle {
            if z.im > 0.0 {
                let a = z.arg();
                elliptic.push(if sign > 0 { a } else { TAU - a });
            }
        } else if real {
            if r > 1.0 {
                if z.re > 0.0 {
                    hyperbolic.push(r.ln());
                } else {
                    inverse.push(r.ln());
                }
            }
        } else if r > 1.0 && z.im > 0.0 {
            lox.push((z.arg(), r.ln()));
        }
    }
    let sort = |v: &mut Vec<f64>| v.sort_by(f64::total_cmp);
    sort(&mut elliptic);
    sort(&mut hyperbolic);
    sort(&mut inverse);
    lox.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let unit = plus_one + minus_one > 0 || !elliptic.is_empty();
    let has_degenerate = plus_one + minus_one > 0;
    if has_degenerate {
        degenerate.extend(elliptic.iter().copied());
        degenerate.extend(std::iter::repeat(0.0).take(plus_one / 2));
        degenerate.extend(std::iter::repeat(PI).take(minus_one / 2));
        sort(&mut degenerate);
    }

    let mut parts = Vec::new();
    if unit {
        parts.push(if has_degenerate {
            ClassificationTag::DegenerateElliptic(degenerate)
        } else {
            ClassificationTag::Elliptic(elliptic)
        });
    }
    if !hyperbolic.is_empty() {
        parts.push(ClassificationTag::HyperbolicPositive(hyperbolic));
    }
    if !inverse.is_empty() {
        parts.push(ClassificationTag::InverseHyperbolic(inverse));
    }
    if !lox.is_empty() {
        parts.push(ClassificationTag::Loxodromic(lox));
    }
    Ok(if parts.len() == 1 { parts.pop().unwrap() } else { ClassificationTag::Mixed(parts) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn angles(tag: &ClassificationTag) -> Vec<f64> {
        match tag {
            ClassificationTag::Elliptic(a) => a.clone(),
            other => panic!("expected elliptic, got {other}"),
        }
    }

    #[test]
    fn rotation_is_elliptic() {
        let a = angles(&classify(&SymplecticMap::rotation(0.7), 1e-9).unwrap());
        assert!((a[0] - 0.7).abs() < 1e-12);
        // Angles beyond π keep their orientation through the Krein sign.
        let a = angles(&classify(&SymplecticMap::rotation(4.0), 1e-9).unwrap());
        assert!((a[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn hyperbolic_example() {
        let tag = classify(&SymplecticMap::hyperbolic(1.0), 1e-9).unwrap();
        match tag {
            ClassificationTag::HyperbolicPositive(m) => assert!((m[0] - 1.0).abs() < 1e-12),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn loxodromic_example() {
        let tag = classify(&SymplecticMap::loxodromic(0.3, 0.4), 1e-9).unwrap();
        match tag {
            ClassificationTag::Loxodromic(p) => {
                assert_eq!(p.len(), 1);
                assert!((p[0].0 - 0.4).abs() < 1e-10 && (p[0].1 - 0.3).abs() < 1e-10);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn degenerate_and_nonsemisimple() {
        let id = classify(&SymplecticMap::identity(2), 1e-9).unwrap();
        assert_eq!(id, ClassificationTag::DegenerateElliptic(vec![0.0, 0.0]));
        let flip = classify(&SymplecticMap::rotation(std::f64::consts::PI), 1e-9).unwrap();
        assert!(matches!(flip, ClassificationTag::DegenerateElliptic(_)));
        let shear = classify(&SymplecticMap::shear(1, 1.0), 1e-9).unwrap();
        assert_eq!(shear, ClassificationTag::NonSemisimple);
        let shear2 = classify(&SymplecticMap::shear(2, 3.0), 1e-9).unwrap();
        assert_eq!(shear2, ClassificationTag::NonSemisimple);
    }

    #[test]
    fn repeated_rotations_keep_orientation() {
        let s = SymplecticMap::direct_sum(&[SymplecticMap::rotation(1.0), SymplecticMap::rotation(2.0 * PI - 1.0)]);
        let a = angles(&classify(&s, 1e-9).unwrap());
        assert!((a[0] - 1.0).abs() < 1e-9 && (a[1] - (TAU - 1.0)).abs() < 1e-9);
        let s = SymplecticMap::direct_sum(&[SymplecticMap::rotation(1.0), SymplecticMap::rotation(1.0)]);
        let a = angles(&classify(&s, 1e-9).unwrap());
        assert!(a.iter().all(|x| (x - 1.0).abs() < 1e-9));
    }

    #[test]
    fn mixed_blocks() {
        let s = SymplecticMap::direct_sum(&[SymplecticMap::rotation(0.5), SymplecticMap::hyperbolic(0.8)]);
        match classify(&s, 1e-9).unwrap() {
            ClassificationTag::Mixed(parts) => {
                assert_eq!(parts.len(), 2);
                assert!(matches!(parts[0], ClassificationTag::Elliptic(_)));
                assert!(matches!(parts[1], ClassificationTag::HyperbolicPositive(_)));
            }
            other => panic!("{other}"),
        }
        let neg = SymplecticMap::from_trusted(crate::linalg::RMat::from_row_slice(2, 2, &[-2.0, 0.0, 0.0, -0.5]), 1e-12);
        assert!(matches!(classify(&neg, 1e-9).unwrap(), ClassificationTag::InverseHyperbolic(_)));
    }

    #[test]
    fn rejects_non_finite() {
        let m = crate::linalg::RMat::from_row_slice(2, 2, &[f64::NAN, 0.0, 0.0, 1.0]);
        let s = SymplecticMap::from_trusted(m, 1e-12);
        assert!(matches!(classify(&s, 1e-9), Err(GrauertError::Numeric { .. })));
    }
}
