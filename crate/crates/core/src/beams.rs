//! Gaussian beams along closed geodesics: the Jacobi equation `Ÿ + K Y = 0`
//! in its linear form, the Riccati matrix `Γ = ẎY⁻¹`, monodromy and Floquet
//! exponents, quasi-eigenvalues `r_k`, ground beams and their analytic
//! continuation into the tube.

use crate::error::{GrauertError, Result};
use crate::geometries::{sphere_harmonic, PoincareData};
use crate::linalg::{det_c, max_abs_c, omega, CMat, RMat};
use crate::symplectic::{classify, eigen_structure, ClassificationTag, SymplecticMap};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Drift beyond which an integration is rejected.
pub const WRONSKIAN_LIMIT: f64 = 1e-6;

/// Largest imaginary shift accepted by [`beam_complexify`].
pub const MAX_SIGMA: f64 = 2.0;

/// Scalar curvature profile `κ(s)`; the transverse curvature is `κ(s)·I`.
#[derive(Debug, Clone, PartialEq)]
pub enum CurvatureProfile {
    Constant(f64),
    /// `base + eps·cos(freq·s)`.
    Cosine {
        base: f64,
        eps: f64,
        freq: f64,
    },
    /// Periodic samples on a uniform grid over `[0, period)`, linearly
    /// interpolated; real arguments only.
    Table {
        values: Arc<[f64]>,
        period: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curvature {
    /// Transverse dimension `n = m − 1`.
    pub dim: usize,
    pub profile: CurvatureProfile,
}

impl Curvature {
    /// Round unit sphere along a great circle.
    pub fn sphere() -> Self {
        Self { dim: 1, profile: CurvatureProfile::Constant(1.0) }
    }

    pub fn constant(k: f64) -> Self {
        Self { dim: 1, profile: CurvatureProfile::Constant(k) }
    }

    /// `1 + ε cos(mode·s)`.
    pub fn perturbed_sphere(eps: f64, mode: u32) -> Self {
        Self::cosine(1.0, eps, mode as f64)
    }

    pub fn cosine(base: f64, eps: f64, freq: f64) -> Self {
        Self { dim: 1, profile: CurvatureProfile::Cosine { base, eps, freq } }
    }

    pub fn table(values: Vec<f64>, period: f64) -> Result<Self> {
        if values.is_empty() || !(period > 0.0) || values.iter().any(|v| !v.is_finite()) {
            return Err(GrauertError::Domain("curvature tables need finite samples and a positive period".into()));
        }
        Ok(Self { dim: 1, profile: CurvatureProfile::Table { values: values.into(), period } })
    }

    pub fn with_dim(mut self, n: usize) -> Self {
        self.dim = n;
        self
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self.profile {
            CurvatureProfile::Constant(k) => Some(k),
            CurvatureProfile::Cosine { base, eps, .. } if eps == 0.0 => Some(base),
            _ => None,
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        match &self.profile {
            CurvatureProfile::Constant(k) => *k,
            CurvatureProfile::Cosine { base, eps, freq } => base + eps * (freq * s).cos(),
            CurvatureProfile::Table { values, period } => {
                let n = values.len();
                let u = (s / period).rem_euclid(1.0) * n as f64;
                let i = (u.floor() as usize).min(n - 1);
                let f = u - i as f64;
                values[i] * (1.0 - f) + values[(i + 1) % n] * f
            }
        }
    }

    /// `κ(z)` at complex arclength (analytic profiles only).
    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 {
            return Ok(Complex64::new(self.eval(z.re), 0.0));
        }
        match &self.profile {
            CurvatureProfile::Constant(k) => Ok(Complex64::new(*k, 0.0)),
            CurvatureProfile::Cosine { base, eps, freq } => Ok(*base + *eps * (z * *freq).cos()),
            CurvatureProfile::Table { .. } => Err(GrauertError::Domain("sampled curvature has no analytic continuation".into())),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match &self.profile {
            CurvatureProfile::Constant(k) => k.abs(),
            CurvatureProfile::Cosine { base, eps, .. } => base.abs() + eps.abs(),
            CurvatureProfile::Table { values, .. } => values.iter().fold(0.0, |a, v| a.max(v.abs())),
        }
    }
}

/// `(Y, Ẏ)` sampled on a uniform arclength grid over `[0, L]`.
#[derive(Debug, Clone)]
pub struct JacobiSolution {
    pub grid: Vec<f64>,
    pub y: Vec<CMat>,
    pub ydot: Vec<CMat>,
    pub curvature: Curvature,
    pub length: f64,
    /// Largest Wronskian defect along the grid.
    pub wronskian_drift: f64,
    /// Continuous `arg det Y(s)`, starting from the principal value at `s = 0`.
    pub det_phase: Vec<f64>,
}

/// `max(|Y*Ẏ − Ẏ*Y − iI|, |YᵀẎ − ẎᵀY|)`.
pub fn wronskian_defect(y: &CMat, yd: &CMat) -> f64 {
    let n = y.nrows();
    let herm = y.adjoint() * yd - yd.adjoint() * y - CMat::identity(n, n) * I;
    let sym = y.transpose() * yd - yd.transpose() * y;
    max_abs_c(&herm).max(max_abs_c(&sym))
}

/// One RK4 step of `Y' = Ẏ`, `Ẏ' = −κ(z)Y` with complex step `h`.
fn rk4_step(curv: &Curvature, z: Complex64, h: Complex64, y: &CMat, yd: &CMat) -> Result<(CMat, CMat)> {
    let k0 = curv.eval_complex(z)?;
    let k1 = curv.eval_complex(z + h * 0.5)?;
    let k2 = curv.eval_complex(z + h)?;
    let a1 = yd.clone();
    let b1 = y * (-k0);
    let a2 = yd + &b1 * (h * 0.5);
    let b2 = (y + &a1 * (h * 0.5)) * (-k1);
    let a3 = yd + &b2 * (h * 0.5);
    let b3 = (y + &a2 * (h * 0.5)) * (-k1);
    let a4 = yd + &b3 * h;
    let b4 = (y + &a3 * h) * (-k2);
    let two = Complex64::new(2.0, 0.0);
    let y1 = y + (a1 + &a2 * two + &a3 * two + a4) * (h / 6.0);
    let yd1 = yd + (b1 + &b2 * two + &b3 * two + b4) * (h / 6.0);
    Ok((y1, yd1))
}

fn caustic_check(y: &CMat, det: Complex64, s: f64) -> Result<()> {
    let scale = max_abs_c(y).powi(y.nrows() as i32);
    if !(det.norm() > 1e-12 * scale) {
        return Err(GrauertError::Caustic { s });
    }
    Ok(())
}

/// Fixed-step RK4 for `Ÿ + K(s)Y = 0` on `[0, L]`.
pub fn integrate_jacobi(curv: &Curvature, length: f64, y0: &CMat, yd0: &CMat, steps: usize) -> Result<JacobiSolution> {
    let n = curv.dim;
    if y0.shape() != (n, n) || yd0.shape() != (n, n) {
        return Err(GrauertError::Dimension(format!("initial frame must be {n}×{n}")));
    }
    if !(length > 0.0) || steps == 0 {
        return Err(GrauertError::Domain("need L > 0 and at least one step".into()));
    }
    let w0 = wronskian_defect(y0, yd0);
    if w0 > 1e-10 {
        return Err(GrauertError::Domain(format!("initial frame violates the Wronskian normalization by {w0:e}")));
    }
    let h = length / steps as f64;
    let mut grid = Vec::with_capacity(steps + 1);
    let mut ys = Vec::with_capacity(steps + 1);
    let mut yds = Vec::with_capacity(steps + 1);
    let mut phases = Vec::with_capacity(steps + 1);
    let (mut y, mut yd) = (y0.clone(), yd0.clone());
    let mut det = det_c(&y);
    caustic_check(&y, det, 0.0)?;
    let mut phase = det.arg();
    let mut drift = w0;
    for i in 0..=steps {
        let s = i as f64 * h;
        if i > 0 {
            (y, yd) = rk4_step(curv, Complex64::new(s - h, 0.0), Complex64::new(h, 0.0), &y, &yd)?;
            let next = det_c(&y);
            caustic_check(&y, next, s)?;
            phase += (next / det).arg();
            det = next;
            drift = drift.max(wronskian_defect(&y, &yd));
        }
        grid.push(s);
        ys.push(y.clone());
        yds.push(yd.clone());
        phases.push(phase);
    }
    if drift > WRONSKIAN_LIMIT {
        return Err(GrauertError::StepSize { drift, limit: WRONSKIAN_LIMIT });
    }
    Ok(JacobiSolution { grid, y: ys, ydot: yds, curvature: curv.clone(), length, wronskian_drift: drift, det_phase: phases })
}

/// `Y₀ = cI`, `Ẏ₀ = iωcI` with `ω = √κ`, `c = (2ω)^{−1/2}` for constant
/// `κ > 0`; otherwise `Y₀ = I/√2`, `Ẏ₀ = iI/√2`.
pub fn oscillator_frame(curv: &Curvature) -> (CMat, CMat) {
    let n = curv.dim;
    let id = CMat::identity(n, n);
    match curv.as_constant() {
        Some(k) if k > 0.0 => {
            let w = k.sqrt();
            let c = (2.0 * w).powf(-0.5);
            (&id * Complex64::new(c, 0.0), &id * Complex64::new(0.0, w * c))
        }
        _ => {
            let c = 0.5f64.sqrt();
            (&id * Complex64::new(c, 0.0), &id * Complex64::new(0.0, c))
        }
    }
}

/// `Γ = ẎY⁻¹` with its certificates.
#[derive(Debug, Clone)]
pub struct RiccatiGamma {
    pub gamma: Vec<CMat>,
    /// `max |Γ̇ + Γ² + K|` with `Γ̇` by central differences.
    pub riccati_residual: f64,
    /// `max |Im Γ − ½(YY*)⁻¹|`.
    pub im_identity_defect: f64,
    pub symmetry_defect: f64,
    /// Smallest eigenvalue of `Im Γ` along the grid.
    pub min_im_eigenvalue: f64,
}

fn inverse(y: &CMat, s: f64) -> Result<CMat> {
    y.clone().try_inverse().ok_or(GrauertError::Caustic { s })
}

pub fn riccati_gamma(sol: &JacobiSolution) -> Result<RiccatiGamma> {
    let n = sol.curvature.dim;
    let mut gamma = Vec::with_capacity(sol.grid.len());
    let (mut im_def, mut sym_def, mut min_eig) = (0.0f64, 0.0f64, f64::INFINITY);
    for ((y, yd), &s) in sol.y.iter().zip(&sol.ydot).zip(&sol.grid) {
        let g = yd * inverse(y, s)?;
        let im = g.map(|z| z.im);
        let want = inverse(&(y * y.adjoint()), s)? * Complex64::new(0.5, 0.0);
        im_def = im_def.max(max_abs_c(&(crate::linalg::to_complex(&im) - want)));
        sym_def = sym_def.max(max_abs_c(&(&g - g.transpose())));
        let sym_im: RMat = (&im + im.transpose()) * 0.5;
        min_eig = min_eig.min(sym_im.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min));
        gamma.push(g);
    }
    let mut res = 0.0f64;
    if sol.grid.len() >= 3 {
        let h = sol.grid[1] - sol.grid[0];
        for i in 1..sol.grid.len() - 1 {
            let d = (&gamma[i + 1] - &gamma[i - 1]) / Complex64::new(2.0 * h, 0.0);
            let k = CMat::identity(n, n) * Complex64::new(sol.curvature.eval(sol.grid[i]), 0.0);
            res = res.max(max_abs_c(&(d + &gamma[i] * &gamma[i] + k)));
        }
    }
    Ok(RiccatiGamma {
        gamma,
        riccati_residual: res,
        im_identity_defect: im_def,
        symmetry_defect: sym_def,
        min_im_eigenvalue: min_eig,
    })
}

/// Real monodromy of the state `(Ẏ, Y)` over `[0, L]`.
fn monodromy(curv: &Curvature, length: f64, steps: usize) -> Result<RMat> {
    let n = curv.dim;
    let h = Complex64::new(length / steps as f64, 0.0);
    let mut m = RMat::zeros(2 * n, 2 * n);
    for col in 0..2 * n {
        let mut yd = CMat::zeros(n, 1);
        let mut y = CMat::zeros(n, 1);
        if col < n {
            yd[(col, 0)] = Complex64::new(1.0, 0.0);
        } else {
            y[(col - n, 0)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..steps {
            (y, yd) = rk4_step(curv, h * i as f64, h, &y, &yd)?;
        }
        for r in 0..n {
            m[(r, col)] = yd[(r, 0)].re;
            m[(n + r, col)] = y[(r, 0)].re;
        }
    }
    Ok(m)
}

/// Monodromy of the Jacobi equation over one period in `(Ẏ, Y)` coordinates,
/// in which normalized Jacobi frames have positive Krein signature.
pub fn poincare_from_jacobi(sol: &JacobiSolution) -> Result<PoincareData> {
    let steps = sol.grid.len().saturating_sub(1).max(1);
    let m = monodromy(&sol.curvature, sol.length, steps)?;
    let map = SymplecticMap::new(m, 1e-8)?;
    let tag = classify(&map, 1e-9)?;
    let exponents = match &tag {
        ClassificationTag::Elliptic(a) | ClassificationTag::DegenerateElliptic(a) => a.clone(),
        _ => vec![],
    };
    Ok(PoincareData { period: sol.length, lattice_period: None, map, parabolic: false, tag, exponents })
}

/// Jacobi solution in a Floquet frame `Y(s + L) = Y(s)·diag(e^{iα_j})`, with
/// the exponents lifted continuously from `s = 0`.
#[derive(Debug, Clone)]
pub struct FloquetFrame {
    pub solution: JacobiSolution,
    /// Lifted exponents, ordered by their residues mod 2π.
    pub alphas: Vec<f64>,
}

impl FloquetFrame {
    pub fn alpha_sum(&self) -> f64 {
        self.alphas.iter().sum()
    }
}

pub fn floquet_frame(curv: &Curvature, length: f64, steps: usize) -> Result<FloquetFrame> {
    let n = curv.dim;
    if let Some(k) = curv.as_constant().filter(|&k| k > 0.0) {
        let (y0, yd0) = oscillator_frame(curv);
        let solution = integrate_jacobi(curv, length, &y0, &yd0, steps)?;
        return Ok(FloquetFrame { solution, alphas: vec![k.sqrt() * length; n] });
    }
    let map = SymplecticMap::new(monodromy(curv, length, steps)?, 1e-8)?;
    let es = eigen_structure(&map, 1e-9)?;
    let mut picks: Vec<(f64, usize)> = es
        .eigenvalues
        .iter()
        .zip(&es.krein)
        .enumerate()
        .filter(|(_, (_, &k))| k > 0)
        .map(|(i, (z, _))| (z.arg().rem_euclid(TAU), i))
        .collect();
    if picks.len() != n || !es.semisimple {
        return Err(GrauertError::UnsupportedClass(format!(
            "monodromy is {}; a Floquet frame needs an elliptic return map",
            classify(&map, 1e-9)?
        )));
    }
    picks.sort_by(|a, b| a.0.total_cmp(&b.0));
    let om = crate::linalg::to_complex(&omega(n));
    let mut y0 = CMat::zeros(n, n);
    let mut yd0 = CMat::zeros(n, n);
    for (j, &(_, i)) in picks.iter().enumerate() {
        let v = es.eigenvectors.column(i).clone_owned();
        let h = ((v.adjoint() * &om * &v)[(0, 0)] * I).re;
        let v = v / Complex64::new(h.sqrt(), 0.0);
        for r in 0..n {
            yd0[(r, j)] = v[r];
            y0[(r, j)] = v[n + r];
        }
    }
    let solution = integrate_jacobi(curv, length, &y0, &yd0, steps)?;
    // lift each exponent by following ⟨y_j(0), y_j(s)⟩
    let mut alphas = Vec::with_capacity(n);
    for j in 0..n {
        let c0 = solution.y[0].column(j).clone_owned();
        let mut prev = Complex64::new(1.0, 0.0);
        let mut phase = 0.0;
        for y in &solution.y[1..] {
            let z = (c0.adjoint() * y.column(j))[(0, 0)];
            phase += (z / prev).arg();
            prev = z;
        }
        alphas.push(phase);
    }
    let total = solution.det_phase.last().unwrap() - solution.det_phase[0];
    let mismatch = total - alphas.iter().sum::<f64>();
    if mismatch.abs() > 1e-6 {
        // column overlaps lost track; fall back to the determinant's winding
        let wind = (mismatch / TAU).round() * TAU;
        alphas[0] += wind;
    }
    Ok(FloquetFrame { solution, alphas })
}

/// Ground beam `U₀` along a closed geodesic.
#[derive(Debug, Clone)]
pub struct BeamSpec {
    pub jacobi: JacobiSolution,
    pub alphas: Vec<f64>,
    pub k: i64,
    /// Transverse excitation (ground beams only: all zero).
    pub q: Vec<u32>,
    pub r: f64,
    pub gamma: RiccatiGamma,
    /// `C₀` making `∫∫|U₀|² ds dy = 1` over the tube.
    pub norm: f64,
}

/// `r_k = (2πk + ½Σα_j)/L` and the L²-normalized ground beam.
pub fn beam_spec(frame: &FloquetFrame, k: i64) -> Result<BeamSpec> {
    let sol = &frame.solution;
    let n = sol.curvature.dim;
    let r = (TAU * k as f64 + 0.5 * frame.alpha_sum()) / sol.length;
    if !(r > 0.0) {
        return Err(GrauertError::Domain(format!("k = {k} gives r = {r} ≤ 0")));
    }
    let gamma = riccati_gamma(sol)?;
    if gamma.symmetry_defect > 1e-8 || !(gamma.min_im_eigenvalue > 1e-8) {
        return Err(GrauertError::Numeric {
            message: format!(
                "Γ is not symmetric with positive-definite imaginary part (asymmetry {:e}, min Im eigenvalue {:e})",
                gamma.symmetry_defect, gamma.min_im_eigenvalue
            ),
            matrix: String::new(),
        });
    }
    // ∫|U|² dy = |det Y|^{-1} (π/r)^{n/2} det(Im Γ)^{-1/2}; trapezoid in s
    let dens: Vec<f64> = sol
        .y
        .iter()
        .zip(&gamma.gamma)
        .map(|(y, g)| {
            let im: RMat = g.map(|z| z.im);
            let d = im.determinant();
            (PI / r).powf(0.5 * n as f64) / (det_c(y).norm() * d.sqrt())
        })
        .collect();
    let h = sol.grid[1] - sol.grid[0];
    let total = h * (dens.iter().sum::<f64>() - 0.5 * (dens[0] + dens[dens.len() - 1]));
    Ok(BeamSpec { jacobi: sol.clone(), alphas: frame.alphas.clone(), k, q: vec![0; n], r, gamma, norm: total.powf(-0.5) })
}

impl BeamSpec {
    /// Transverse validity radius `5·r^{−1/2}`.
    pub fn tube_radius(&self) -> f64 {
        5.0 / self.r.sqrt()
    }

    /// `(Y, Ẏ, arg det Y)` at real `s ∈ [0, L]`.
    fn state_at(&self, s: f64) -> Result<(CMat, CMat, f64)> {
        let sol = &self.jacobi;
        if !(0.0..=sol.length).contains(&s) {
            return Err(GrauertError::Domain(format!("s = {s} outside [0, {}]", sol.length)));
        }
        let h = sol.grid[1] - sol.grid[0];
        let i = ((s / h).round() as usize).min(sol.grid.len() - 1);
        let ds = s - sol.grid[i];
        let (y, yd) = if ds == 0.0 {
            (sol.y[i].clone(), sol.ydot[i].clone())
        } else {
            rk4_step(&sol.curvature, Complex64::new(sol.grid[i], 0.0), Complex64::new(ds, 0.0), &sol.y[i], &sol.ydot[i])?
        };
        let d = det_c(&y);
        caustic_check(&y, d, s)?;
        let phase = sol.det_phase[i] + (d / det_c(&sol.y[i])).arg();
        Ok((y, yd, phase))
    }

    fn value(&self, z: Complex64, y: &CMat, yd: &CMat, phase: f64, w: &[Complex64]) -> Result<Complex64> {
        let n = self.jacobi.curvature.dim;
        if w.len() != n {
            return Err(GrauertError::Dimension(format!("transverse vector must have {n} entries")));
        }
        let g = yd * inverse(y, z.re)?;
        let wv = CMat::from_column_slice(n, 1, w);
        let quad = (wv.transpose() * g * &wv)[(0, 0)];
        let det = det_c(y);
        let root = Complex64::from_polar(det.norm().powf(-0.5), -0.5 * phase);
        Ok(Complex64::new(self.norm, 0.0) * (I * self.r * z).exp() * root * (I * 0.5 * self.r * quad).exp())
    }
}

/// `C₀ e^{irs}(det Y(s))^{−1/2} e^{(i/2) r⟨Γ(s)y, y⟩}`.
pub fn beam_eval(spec: &BeamSpec, s: f64, y: &[f64]) -> Result<Complex64> {
    let rad = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if rad > spec.tube_radius() {
        return Err(GrauertError::Domain(format!("|y| = {rad} outside the beam tube ({})", spec.tube_radius())));
    }
    let (ym, yd, phase) = spec.state_at(s)?;
    let w: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    spec.value(Complex64::new(s, 0.0), &ym, &yd, phase, &w)
}

/// The beam continued to `s + iσ` and transverse `y + iη`; `Y` is continued
/// by integrating the Jacobi equation along the vertical segment.
pub fn beam_complexify(spec: &BeamSpec, s: f64, sigma: f64, y: &[f64], eta: &[f64]) -> Result<Complex64> {
    if !(sigma.abs() <= MAX_SIGMA) {
        return Err(GrauertError::Domain(format!("|σ| = {} exceeds {MAX_SIGMA}", sigma.abs())));
    }
    if y.len() != eta.len() {
        return Err(GrauertError::Dimension("y and η differ in length".into()));
    }
    let w: Vec<Complex64> = y.iter().zip(eta).map(|(&a, &b)| Complex64::new(a, b)).collect();
    let rad = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if rad > spec.tube_radius() {
        return Err(GrauertError::Domain(format!("|y + iη| = {rad} outside the beam tube ({})", spec.tube_radius())));
    }
    let (mut ym, mut yd, mut phase) = spec.state_at(s)?;
    let steps = 16usize.max((256.0 * sigma.abs()).ceil() as usize);
    let h = Complex64::new(0.0, sigma / steps as f64);
    let mut det = det_c(&ym);
    for i in 0..steps {
        (ym, yd) = rk4_step(&spec.jacobi.curvature, Complex64::new(s, 0.0) + h * i as f64, h, &ym, &yd)?;
        let next = det_c(&ym);
        caustic_check(&ym, next, s)?;
        phase += (next / det).arg();
        det = next;
    }
    spec.value(Complex64::new(s, sigma), &ym, &yd, phase, &w)
}

/// Ground beam on the equator of the unit sphere with `k = N`, so that
/// `r = N + ½`.
pub fn sphere_equator_beam(n: usize, steps: usize) -> Result<BeamSpec> {
    let frame = floquet_frame(&Curvature::sphere(), TAU, steps)?;
    beam_spec(&frame, n as i64)
}

/// `Y_N^N` at longitude `s` and latitude `y` (Fermi coordinates of the equator).
pub fn highest_weight_on_equator(n: usize, s: f64, y: f64) -> Complex64 {
    let x = [y.cos() * s.cos(), y.cos() * s.sin(), y.sin()];
    let z: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    sphere_harmonic(n, n as i64, &z)
}

/// Relative sup error `ε(N)` between the normalized beam and `Y_N^N` on the
/// real tube `|y| ≤ 5 r^{−1/2}`, after aligning the global phase at `(0, 0)`.
pub fn beam_vs_highest_weight_error(n: usize, steps: usize, samples: usize) -> Result<f64> {
    let spec = sphere_equator_beam(n, steps)?;
    let u0 = beam_eval(&spec, 0.0, &[0.0])?;
    let y0 = highest_weight_on_equator(n, 0.0, 0.0);
    let align = (y0 / u0) / (y0 / u0).norm();
    let rad = spec.tube_radius();
    let mut err = 0.0f64;
    let mut peak = 0.0f64;
    let ns = samples.max(8);
    for i in 0..ns {
        let s = spec.jacobi.length * i as f64 / ns as f64;
        for j in 0..=ns {
            let y = -rad + 2.0 * rad * j as f64 / ns as f64;
            let u = beam_eval(&spec, s, &[y])? * align;
            let exact = highest_weight_on_equator(n, s, y);
            err = err.max((u - exact).norm());
            peak = peak.max(exact.norm());
        }
    }
    Ok(err / peak)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere_solution(steps: usize) -> JacobiSolution {
        let c = Curvature::sphere();
        let (y0, yd0) = oscillator_frame(&c);
        integrate_jacobi(&c, TAU, &y0, &yd0, steps).unwrap()
    }

    #[test]
    fn sphere_frame_is_an_oscillator() {
        let sol = sphere_solution(2000);
        assert!(sol.wronskian_drift < 1e-8);
        for (y, &s) in sol.y.iter().zip(&sol.grid) {
            let want = Complex64::from_polar(0.5f64.sqrt(), s);
            assert!((y[(0, 0)] - want).norm() < 1e-8);
        }
        let g = riccati_gamma(&sol).unwrap();
        assert!(g.gamma.iter().all(|m| (m[(0, 0)] - I).norm() < 1e-8));
        assert!(g.im_identity_defect < 1e-8 && g.riccati_residual < 1e-6);
        assert!((sol.det_phase.last().unwrap() - TAU).abs() < 1e-8);
    }

    #[test]
    fn flat_case_is_linear() {
        let c = Curvature::constant(0.0);
        let (y0, yd0) = oscillator_frame(&c);
        let sol = integrate_jacobi(&c, 3.0, &y0, &yd0, 30).unwrap();
        for (y, &s) in sol.y.iter().zip(&sol.grid) {
            assert!((y[(0, 0)] - (y0[(0, 0)] + yd0[(0, 0)] * s)).norm() < 1e-14);
        }
        let bad = CMat::identity(1, 1);
        assert!(matches!(integrate_jacobi(&c, 3.0, &bad, &bad, 30), Err(GrauertError::Domain(_))));
    }

    #[test]
    fn gamma_is_frame_invariant() {
        let c = Curvature::cosine(1.2, 0.1, 1.0);
        let (y0, yd0) = oscillator_frame(&c);
        let a = integrate_jacobi(&c, TAU, &y0, &yd0, 4000).unwrap();
        let m = Complex64::from_polar(1.0, 0.7);
        let b =
            JacobiSolution { y: a.y.iter().map(|y| y * m).collect(), ydot: a.ydot.iter().map(|y| y * m).collect(), ..a.clone() };
        let (ga, gb) = (riccati_gamma(&a).unwrap(), riccati_gamma(&b).unwrap());
        for (x, y) in ga.gamma.iter().zip(&gb.gamma) {
            assert!(max_abs_c(&(x - y)) < 1e-12);
        }
        assert!(ga.min_im_eigenvalue > 0.0);
    }

    #[test]
    fn perturbed_wronskian_and_riccati() {
        let c = Curvature::cosine(1.0, 0.1, 1.0);
        let (y0, yd0) = oscillator_frame(&c);
        let sol = integrate_jacobi(&c, TAU, &y0, &yd0, 10_000).unwrap();
        assert!(sol.wronskian_drift < 1e-8);
        let g = riccati_gamma(&sol).unwrap();
        assert!(g.riccati_residual < 1e-6 * 1.1, "{}", g.riccati_residual);
        assert!(g.im_identity_defect < 1e-8);
        // Richardson: halving the step shrinks the endpoint error ~16×
        let coarse = integrate_jacobi(&c, TAU, &y0, &yd0, 200).unwrap();
        let mid = integrate_jacobi(&c, TAU, &y0, &yd0, 400).unwrap();
        let e1 = (coarse.y.last().unwrap() - sol.y.last().unwrap()).norm();
        let e2 = (mid.y.last().unwrap() - sol.y.last().unwrap()).norm();
        assert!(e1 / e2 > 12.0, "order ratio {}", e1 / e2);
    }

    #[test]
    fn monodromy_examples() {
        let half = integrate_jacobi(
            &Curvature::sphere(),
            PI,
            &oscillator_frame(&Curvature::sphere()).0,
            &oscillator_frame(&Curvature::sphere()).1,
            2000,
        )
        .unwrap();
        let p = poincare_from_jacobi(&half).unwrap();
        assert!((p.map.matrix() + RMat::identity(2, 2)).amax() < 1e-10);
        let full = sphere_solution(2000);
        let p = poincare_from_jacobi(&full).unwrap();
        assert!((p.map.matrix() - RMat::identity(2, 2)).amax() < 1e-10);
        assert!(matches!(p.tag, ClassificationTag::DegenerateElliptic(_)));
        // 1 + 0.1cos 2s sits inside the first resonance tongue
        let c = Curvature::cosine(1.0, 0.1, 2.0);
        let (y0, yd0) = oscillator_frame(&c);
        let sol = integrate_jacobi(&c, TAU, &y0, &yd0, 4000).unwrap();
        let p = poincare_from_jacobi(&sol).unwrap();
        assert!(!matches!(p.tag, ClassificationTag::Elliptic(_)), "{}", p.tag);
        let c = Curvature::cosine(1.2, 0.1, 1.0);
        let (y0, yd0) = oscillator_frame(&c);
        let sol = integrate_jacobi(&c, TAU, &y0, &yd0, 4000).unwrap();
        let p = poincare_from_jacobi(&sol).unwrap();
        assert!(matches!(p.tag, ClassificationTag::Elliptic(_)));
        assert!(p.map.is_symplectic(1e-8));
    }

    #[test]
    fn floquet_frame_lifts_exponents() {
        let c = Curvature::cosine(1.2, 0.1, 1.0);
        let f = floquet_frame(&c, TAU, 4000).unwrap();
        let y = &f.solution.y;
        let ratio = y.last().unwrap()[(0, 0)] / y[0][(0, 0)];
        assert!((ratio.norm() - 1.0).abs() < 1e-8);
        assert!((Complex64::from_polar(1.0, f.alphas[0]) - ratio).norm() < 1e-8);
        // close to the unperturbed √1.2·2π
        assert!((f.alphas[0] - 1.2f64.sqrt() * TAU).abs() < 0.2);
        let s = f.solution.y[0].clone();
        assert!(wronskian_defect(&s, &f.solution.ydot[0]) < 1e-10);
    }

    #[test]
    fn sphere_beam_properties() {
        let b = sphere_equator_beam(20, 2048).unwrap();
        assert!((b.r - 20.5).abs() < 1e-12);
        let a0 = beam_eval(&b, 0.0, &[0.0]).unwrap().norm();
        for s in [0.3, 1.7, 4.0, TAU] {
            assert!((beam_eval(&b, s, &[0.0]).unwrap().norm() - a0).abs() < 1e-10);
        }
        let y = 0.3;
        let ratio = beam_eval(&b, 1.0, &[y]).unwrap().norm() / beam_eval(&b, 1.0, &[0.0]).unwrap().norm();
        assert!((ratio - (-b.r * y * y / 2.0).exp()).abs() < 1e-10);
        // single-valued around the geodesic
        let u0 = beam_eval(&b, 0.0, &[0.2]).unwrap();
        let u1 = beam_eval(&b, TAU, &[0.2]).unwrap();
        assert!((u0 - u1).norm() < 1e-8 * u0.norm());
        assert!(matches!(beam_eval(&b, 1.0, &[2.0]), Err(GrauertError::Domain(_))));
        // σ = 0, η = 0 reproduces the real beam
        let c = beam_complexify(&b, 1.1, 0.0, &[0.1], &[0.0]).unwrap();
        assert!((c - beam_eval(&b, 1.1, &[0.1]).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn complexified_growth() {
        let tau = 0.5;
        let b = sphere_equator_beam(30, 2048).unwrap();
        let lo = beam_complexify(&b, 0.4, -tau, &[0.0], &[0.0]).unwrap().norm();
        let hi = beam_complexify(&b, 0.4, tau, &[0.0], &[0.0]).unwrap().norm();
        // e^{−2rτ} from the phase, e^{τ} from |det Y|^{−1/2}
        assert!((hi / lo / (-2.0 * b.r * tau + tau).exp() - 1.0).abs() < 1e-8);
        let n = 30.0f64;
        let r = lo / (b.norm * 2f64.powf(0.25) * (n * tau).exp());
        assert!((r - 1.0).abs() < 1e-8);
    }

    #[test]
    fn beam_error_decays() {
        let e25 = beam_vs_highest_weight_error(25, 1024, 48).unwrap();
        let e50 = beam_vs_highest_weight_error(50, 1024, 48).unwrap();
        assert!(e50 < e25 && e50 / e25 < 0.6, "{e25} {e50}");
    }
}
