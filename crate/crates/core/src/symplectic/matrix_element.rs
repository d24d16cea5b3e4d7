use super::{classify, polar_decompose, spd_power, unitary_to_symplectic, ClassificationTag, SymplecticMap};
use crate::error::{GrauertError, Result};
use crate::linalg::{blocks, det_c, omega, CMat, RMat};
use nalgebra::linalg::Schur;
use nalgebra::Cholesky;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI, TAU};

/// Which formula produced a [`MatrixElementValue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    BlockDet,
    KeyId,
    Magnitude,
    Oracle,
}

/// Ground-state matrix element of the metaplectic lift of `S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixElementValue {
    pub value: Complex64,
    /// Number of `2π` turns separating the tracked argument of the
    /// determinant from its principal value.
    pub branch_index: i64,
    pub method: Method,
}

/// `det(A + D + i(B − C))`.
fn blockdet_det(m: &RMat) -> Complex64 {
    let (a, b, c, d) = blocks(m);
    let n = a.nrows();
    det_c(&CMat::from_fn(n, n, |i, j| Complex64::new(a[(i, j)] + d[(i, j)], b[(i, j)] - c[(i, j)])))
}

/// `det(I + iJ + S(I − iJ))` with `J = Ω`.
fn keyid_det(m: &RMat) -> Complex64 {
    let n = m.nrows();
    let j = omega(n / 2);
    let i = Complex64::new(0.0, 1.0);
    let id = CMat::identity(n, n);
    let jc = j.map(|x| Complex64::new(x, 0.0));
    let sc = m.map(|x| Complex64::new(x, 0.0));
    det_c(&(&id + &jc * i + sc * (&id - &jc * i)))
}

/// The path `s ↦ U^s·P̂^s` from the identity to `S`, through symplectic matrices.
struct PolarPath {
    schur_vectors: CMat,
    angles: Vec<f64>,
    positive: RMat,
}

impl PolarPath {
    fn new(s: &SymplecticMap) -> Result<Self> {
        let (u, p) = polar_decompose(s)?;
        let uhat = super::holomorphic_block(&u);
        let n = uhat.nrows();
        let (z, t) = if n == 0 {
            (CMat::zeros(0, 0), CMat::zeros(0, 0))
        } else {
            Schur::try_new(uhat, f64::EPSILON, 10_000)
                .ok_or_else(|| GrauertError::Numeric {
                    message: "Schur decomposition of the unitary part failed".into(),
                    matrix: s.to_string(),
                })?
                .unpack()
        };
        let angles = (0..n)
            .map(|k| {
                let mut a = t[(k, k)].arg().rem_euclid(TAU);
                if a > TAU - 1e-10 {
                    a = 0.0;
                }
                a
            })
            .collect();
        Ok(Self { schur_vectors: z, angles, positive: p.matrix().clone() })
    }

    fn at(&self, s: f64) -> RMat {
        let z = &self.schur_vectors;
        let diag = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            self.angles.len(),
            self.angles.iter().map(|&a| Complex64::from_polar(1.0, a * s)),
        ));
        let us = unitary_to_symplectic(&(z * diag * z.adjoint()));
        us * spd_power(&self.positive, s)
    }
}

/// Follows `arg f(path(s))` continuously over `s ∈ [0, 1]`, starting from
/// `phase0` at `s = 0`; returns the unwrapped phase and the final value.
fn track<F>(f: F, initial_samples: usize, phase0: f64, z0: Complex64) -> Result<(f64, Complex64)>
where
    F: Fn(f64) -> Complex64,
{
    let mut phase = phase0;
    let mut prev = z0;
    let mut stack: Vec<(f64, f64)> = Vec::new();
    let n = initial_samples.max(1);
    for k in (0..n).rev() {
        stack.push((k as f64 / n as f64, (k + 1) as f64 / n as f64));
    }
    // Depth-first refinement in order of increasing s.
    while let Some((a, b)) = stack.pop() {
        let zb = f(b);
        if !(zb.norm() > 1e-300) || !zb.re.is_finite() || !zb.im.is_finite() {
            return Err(GrauertError::SingularConfiguration(format!(
                "determinant vanishes or overflows along the branch path at s={b}"
            )));
        }
        // Difference of arguments rather than arg(zb/prev): the quotient
        // overflows once |z| exceeds ~1e154.
        let step = (zb.arg() - prev.arg() + PI).rem_euclid(TAU) - PI;
        if step.abs() >= FRAC_PI_4 && b - a > 1e-12 {
            let mid = 0.5 * (a + b);
            stack.push((mid, b));
            stack.push((a, mid));
            continue;
        }
        phase += step;
        prev = zb;
    }
    Ok((phase, prev))
}

fn finish(z: Complex64, phase: f64, scale: f64, method: Method) -> MatrixElementValue {
    let principal = z.arg();
    let branch_index = ((phase - principal) / TAU).round() as i64;
    let value = Complex64::from_polar(scale * z.norm().powf(-0.5), -0.5 * phase);
    MatrixElementValue { value, branch_index, method }
}

fn check_input(s: &SymplecticMap) -> Result<()> {
    let defect = s.defect();
    let tol = s.tol() * (1.0 + s.norm()).powi(2);
    if defect > tol {
        return Err(GrauertError::NotSymplectic { defect, tol });
    }
    Ok(())
}

fn tracked(s: &SymplecticMap, det: fn(&RMat) -> Complex64, scale: f64, method: Method) -> Result<MatrixElementValue> {
    check_input(s)?;
    let z_end = det(s.matrix());
    if !(z_end.norm() > 1e-300) {
        return Err(GrauertError::SingularConfiguration("determinant vanishes (metaplectic caustic)".into()));
    }
    let path = PolarPath::new(s)?;
    let z0 = det(&RMat::identity(2 * s.d(), 2 * s.d()));
    let (phase, z) = track(|t| det(&path.at(t)), 16 * s.d().max(1), 0.0, z0)?;
    Ok(finish(z, phase, scale, method))
}

/// `2^{d/2} det(A + D + i(B − C))^{−1/2}` with the branch continued from the
/// identity along the polar path.
pub fn matrix_element_blockdet(s: &SymplecticMap) -> Result<MatrixElementValue> {
    tracked(s, blockdet_det, 2f64.powf(0.5 * s.d() as f64), Method::BlockDet)
}

/// `2^d det(I + iJ + S(I − iJ))^{−1/2}`, `J = Ω`, same branch policy.
pub fn matrix_element_keyid(s: &SymplecticMap) -> Result<MatrixElementValue> {
    tracked(s, keyid_det, 2f64.powi(s.d() as i32), Method::KeyId)
}

/// `2^{d/2} det(I + SᵀS)^{−1/4}`.
pub fn matrix_element_magnitude(s: &SymplecticMap) -> f64 {
    let n = 2 * s.d();
    let m = RMat::identity(n, n) + s.matrix().transpose() * s.matrix();
    let det = if n == 0 { 1.0 } else { m.lu().determinant() };
    2f64.powf(0.5 * s.d() as f64) * det.powf(-0.25)
}

/// Normalized Gaussian integral `∫ e^{−(|u|² + |Su|²)/τ} du`, divided by its
/// value at `S = I`, then square-rooted. Independent of `τ`.
pub fn matrix_element_gaussian_oracle(s: &SymplecticMap, levi_scale: f64) -> Result<f64> {
    if !(levi_scale > 0.0) || !levi_scale.is_finite() {
        return Err(GrauertError::Domain(format!("levi_scale must be positive, got {levi_scale}")));
    }
    let n = 2 * s.d();
    if n == 0 {
        return Ok(1.0);
    }
    let quad = (RMat::identity(n, n) + s.matrix().transpose() * s.matrix()) / levi_scale;
    let chol = Cholesky::new(quad).ok_or_else(|| GrauertError::Numeric {
        message: "Gaussian form is not positive definite".into(),
        matrix: s.to_string(),
    })?;
    // ∫ e^{−uᵀMu} = π^{d} det(M)^{−1/2}; log-space to avoid overflow.
    let log_sqrt_det: f64 = chol.l().diagonal().iter().map(|x| x.ln()).sum();
    let log_ref = s.d() as f64 * (2.0 / levi_scale).ln();
    Ok((0.5 * (log_ref - log_sqrt_det)).exp())
}

/// `𝒢_1, …, 𝒢_N` for the iterates `S^n`, with the branch continued along
/// `S^{n−1}·U^s P̂^s`, so that consecutive terms are joined continuously.
pub fn power_sequence(s: &SymplecticMap, n: usize) -> Result<Vec<MatrixElementValue>> {
    check_input(s)?;
    if n == 0 {
        return Err(GrauertError::Domain("power_sequence needs N ≥ 1".into()));
    }
    let tag = classify(s, 1e-9)?;
    if tag == ClassificationTag::NonSemisimple {
        return Err(GrauertError::UnsupportedClass(
            "power_sequence requires a semi-simple map; parabolic maps are handled by their geometry".into(),
        ));
    }
    let d = s.d();
    let scale = 2f64.powf(0.5 * d as f64);
    let path = PolarPath::new(s)?;
    let mut base = RMat::identity(2 * d, 2 * d);
    let mut z = blockdet_det(&base);
    let mut phase = 0.0;
    let mut out = Vec::with_capacity(n);
    let initial = 16 * d.max(1);
    for _ in 0..n {
        let step = track(|t| blockdet_det(&(&base * path.at(t))), initial, phase, z);
        match step {
            Ok((p, zn)) => {
                phase = p;
                z = zn;
                out.push(finish(z, phase, scale, Method::BlockDet));
                base = &base * s.matrix();
            }
            Err(_) if z.norm() > 1e200 => {
                // |𝒢_n| has underflowed; the remaining terms are zero to
                // double precision.
                out.push(MatrixElementValue { value: Complex64::new(0.0, 0.0), branch_index: 0, method: Method::BlockDet });
            }
            Err(e) => return Err(e),
        }
        if base.iter().any(|x| !x.is_finite()) {
            while out.len() < n {
                out.push(MatrixElementValue { value: Complex64::new(0.0, 0.0), branch_index: 0, method: Method::BlockDet });
            }
            break;
        }
    }
    Ok(out)
}
