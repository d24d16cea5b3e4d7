//! The oscillating second-term function `Q(λ) = Σ_{n≥1} Im(e^{iλnT} G_n) / (nT)`,
//! its continuity type, jump set and the spectral measure with moments `G_n`.

use crate::error::{GrauertError, Result};
use crate::summation::Accumulator;
use crate::symplectic::{classify, power_sequence, ClassificationTag, SymplecticMap};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

/// `x mod 2π` in `[0, 2π)`.
pub fn sawtooth(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `2 Σ_{n=1}^{N} sin(nx)/n`, which tends to `π − sawtooth(x)` off `2πℤ`.
pub fn sawtooth_partial_sum(x: f64, n: usize) -> f64 {
    let mut acc = Accumulator::new();
    for k in 1..=n {
        acc.add(2.0 * (k as f64 * x).sin() / k as f64);
    }
    acc.value()
}

/// Coefficient generator `n ↦ G_n`, `n ≥ 1`. `G_{−n} = conj(G_n)` is implied.
#[derive(Clone)]
pub enum Coefficients {
    /// Non-periodic point: `Q ≡ 0`.
    Empty,
    /// `G_n = e^{i n s₀}`.
    Elliptic {
        s0: f64,
    },
    /// `G_n = Π_j (cosh nμ_j)^{−1/2}`.
    Hyperbolic {
        mus: Vec<f64>,
    },
    /// Explicit values `G_1, …, G_len`; the series is cut at the table end.
    Table(Arc<[Complex64]>),
    Function(Arc<dyn Fn(usize) -> Complex64 + Send + Sync>),
}

impl fmt::Debug for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => write!(f, "Empty"),
            Self::Elliptic { s0 } => write!(f, "Elliptic {{ s0: {s0} }}"),
            Self::Hyperbolic { mus } => write!(f, "Hyperbolic {{ mus: {mus:?} }}"),
            Self::Table(t) => write!(f, "Table(len {})", t.len()),
            Self::Function(_) => write!(f, "Function"),
        }
    }
}

fn cosh_inv_sqrt(x: f64) -> f64 {
    // (cosh x)^{−1/2} without overflow.
    let x = x.abs();
    (-0.5 * x).exp() * (2.0 / (1.0 + (-2.0 * x).exp())).sqrt()
}

impl Coefficients {
    pub fn get(&self, n: usize) -> Option<Complex64> {
        match self {
            Self::Empty => None,
            Self::Elliptic { s0 } => Some(Complex64::from_polar(1.0, (n as f64 * s0).rem_euclid(TAU))),
            Self::Hyperbolic { mus } => Some(Complex64::new(mus.iter().map(|&m| cosh_inv_sqrt(n as f64 * m)).product(), 0.0)),
            Self::Table(t) => t.get(n.checked_sub(1)?).copied(),
            Self::Function(f) => Some(f(n)),
        }
    }

    /// Number of available terms, if finite.
    pub fn len(&self) -> Option<usize> {
        match self {
            Self::Empty => Some(0),
            Self::Table(t) => Some(t.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }
}

/// Regularization applied to the (possibly conditionally convergent) series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Summation {
    /// Plain partial sum of the first `N` terms.
    Truncate(usize),
    /// `Σ r^n a_n`, summed until `r^n < 1e-16` or `max_terms`.
    Abel { r: f64, max_terms: usize },
    /// Fejér means `Σ_{n≤N} (1 − n/(N+1)) a_n`.
    Cesaro(usize),
    /// Doubling partial sums until the tail estimate (or the difference of the
    /// sums at `N` and `2N`) is below `tol`; fails with a convergence error at
    /// `max_terms`.
    Adaptive { tol: f64, max_terms: usize },
}

impl Summation {
    /// Abel regularization with `r = 1 − 1/N`.
    pub fn abel(n: usize) -> Self {
        let r = 1.0 - 1.0 / n as f64;
        let max_terms = ((1e-16f64).ln() / r.ln()).ceil() as usize;
        Summation::Abel { r, max_terms }
    }

    pub fn default_abel() -> Self {
        Self::abel(100_000)
    }

    pub fn default_adaptive() -> Self {
        Summation::Adaptive { tol: 1e-10, max_terms: 1_000_000 }
    }
}

/// Everything needed to evaluate `Q` at one periodic point.
#[derive(Clone)]
pub struct QFunctionSpec {
    pub period: f64,
    pub coefficients: Coefficients,
    pub summation: Summation,
    /// Envelope with `|G_n| ≤ tail_bound(n)`.
    pub tail_bound: Option<Arc<dyn Fn(usize) -> f64 + Send + Sync>>,
}

impl fmt::Debug for QFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QFunctionSpec")
            .field("period", &self.period)
            .field("coefficients", &self.coefficients)
            .field("summation", &self.summation)
            .field("tail_bound", &self.tail_bound.is_some())
            .finish()
    }
}

impl QFunctionSpec {
    pub fn new(period: f64, coefficients: Coefficients, summation: Summation) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(GrauertError::Domain(format!("period must be positive, got {period}")));
        }
        Ok(Self { period, coefficients, summation, tail_bound: None })
    }

    pub fn non_periodic() -> Self {
        Self { period: 1.0, coefficients: Coefficients::Empty, summation: Summation::Truncate(0), tail_bound: None }
    }

    /// `G_n = e^{ins₀}` with the default Abel regularization.
    pub fn elliptic(period: f64, s0: f64) -> Result<Self> {
        Self::new(period, Coefficients::Elliptic { s0 }, Summation::default_abel())
    }

    /// `G_n = Π (cosh nμ_j)^{−1/2}` with adaptive truncation and the envelope
    /// `2^{d/2} e^{−n Σμ_j/2}`.
    pub fn hyperbolic(period: f64, mus: Vec<f64>) -> Result<Self> {
        if mus.iter().any(|&m| !(m > 0.0)) {
            return Err(GrauertError::Domain("hyperbolic exponents must be positive".into()));
        }
        let total: f64 = mus.iter().sum();
        let pref = 2f64.powf(0.5 * mus.len() as f64);
        let mut spec = Self::new(period, Coefficients::Hyperbolic { mus }, Summation::default_adaptive())?;
        spec.tail_bound = Some(Arc::new(move |n| pref * (-0.5 * n as f64 * total).exp()));
        Ok(spec)
    }

    /// Coefficients `G_1..G_N` of a linear Poincaré map, tabulated from
    /// [`power_sequence`].
    pub fn from_map(map: &SymplecticMap, period: f64, n_terms: usize, summation: Summation) -> Result<Self> {
        let seq = power_sequence(map, n_terms)?;
        let table: Arc<[Complex64]> = seq.iter().map(|g| g.value).collect();
        Self::new(period, Coefficients::Table(table), summation)
    }

    pub fn with_summation(mut self, summation: Summation) -> Self {
        self.summation = summation;
        self
    }

    fn term(&self, n: usize, g: Complex64, rot: Complex64) -> f64 {
        (rot * g).im / (n as f64 * self.period)
    }
}

/// Streams `(n, Im(e^{iλnT}G_n)/(nT))` for `n = 1..=n_max`, keeping the
/// rotation `e^{iλnT}` by recurrence with periodic exact resynchronization.
fn for_each_term<F: FnMut(usize, f64) -> bool>(spec: &QFunctionSpec, lambda: f64, n_max: usize, mut f: F) -> usize {
    let (phase_step, fold_s0) = match spec.coefficients {
        Coefficients::Elliptic { s0 } => (lambda * spec.period + s0, true),
        _ => (lambda * spec.period, false),
    };
    let step = Complex64::from_polar(1.0, phase_step.rem_euclid(TAU));
    let mut rot = Complex64::new(1.0, 0.0);
    let mut n = 1;
    while n <= n_max {
        if (n - 1) % 256 == 0 {
            rot = Complex64::from_polar(1.0, (phase_step.rem_euclid(TAU) * n as f64).rem_euclid(TAU));
        } else {
            rot *= step;
        }
        let t = if fold_s0 {
            rot.im / (n as f64 * spec.period)
        } else {
            match spec.coefficients.get(n) {
                Some(g) => spec.term(n, g, rot),
                None => return n - 1,
            }
        };
        if !f(n, t) {
            return n;
        }
        n += 1;
    }
    n_max
}

fn partial_sum(spec: &QFunctionSpec, lambda: f64, n: usize) -> (f64, usize) {
    let mut acc = Accumulator::new();
    let used = for_each_term(spec, lambda, n, |_, t| {
        acc.add(t);
        true
    });
    (acc.value(), used)
}

/// Regularized value of `Q(λ)` under `spec.summation`.
pub fn q_eval(spec: &QFunctionSpec, lambda: f64) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(GrauertError::Domain(format!("λ must be finite, got {lambda}")));
    }
    if matches!(spec.coefficients, Coefficients::Empty) {
        return Ok(0.0);
    }
    match spec.summation {
        Summation::Truncate(n) => Ok(partial_sum(spec, lambda, n).0),
        Summation::Cesaro(n) => {
            let mut acc = Accumulator::new();
            let w = (n + 1) as f64;
            for_each_term(spec, lambda, n, |k, t| {
                acc.add((1.0 - k as f64 / w) * t);
                true
            });
            Ok(acc.value())
        }
        Summation::Abel { r, max_terms } => {
            if !(0.0..1.0).contains(&r) {
                return Err(GrauertError::Domain(format!("Abel parameter must lie in [0, 1), got {r}")));
            }
            let needed = ((1e-16f64).ln() / r.ln()).ceil().min(max_terms as f64) as usize;
            if let Some(len) = spec.coefficients.len() {
                if len < needed && r.powi(len as i32) > 1e-12 {
                    return Err(GrauertError::Coverage { cutoff: len as f64, requested: needed as f64 });
                }
            }
            let mut acc = Accumulator::new();
            let mut weight = 1.0;
            for_each_term(spec, lambda, needed, |_, t| {
                weight *= r;
                acc.add(weight * t);
                true
            });
            Ok(acc.value())
        }
        Summation::Adaptive { tol, max_terms } => adaptive(spec, lambda, tol, max_terms),
    }
}

fn adaptive(spec: &QFunctionSpec, lambda: f64, tol: f64, max_terms: usize) -> Result<f64> {
    let t = spec.period;
    let mut n = 64usize.min(max_terms.max(1));
    if let Some(bound) = &spec.tail_bound {
        // Smallest doubling N whose bounded tail Σ_{n>N} |G_n|/(nT) is below tol.
        let tail = |n0: usize| -> f64 {
            let mut acc = Accumulator::new();
            for k in (n0 + 1)..=(16 * n0).min(max_terms.max(n0 + 1)) {
                let b = bound(k) / (k as f64 * t);
                acc.add(b);
                if b < 1e-300 {
                    break;
                }
            }
            acc.value()
        };
        while tail(n) >= tol && 2 * n <= max_terms {
            n *= 2;
        }
    }
    loop {
        let (s1, used1) = partial_sum(spec, lambda, n);
        let (s2, used2) = partial_sum(spec, lambda, (2 * n).min(max_terms));
        let diff = (s2 - s1).abs();
        if diff <= tol {
            return Ok(s2);
        }
        let exhausted = used2 < 2 * n || 2 * n >= max_terms;
        if exhausted || spec.tail_bound.is_some() {
            return Err(GrauertError::Convergence { n: used1, n2: used2, diff, tol });
        }
        n *= 2;
    }
}

/// `q_eval` over many `λ`, in parallel.
pub fn q_eval_many(spec: &QFunctionSpec, lambdas: &[f64]) -> Result<Vec<f64>> {
    lambdas.par_iter().map(|&l| q_eval(spec, l)).collect()
}

/// An arithmetic progression `offset + k·gap`, `k ∈ ℤ`, with `offset ∈ [0, gap)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Progression {
    pub offset: f64,
    pub gap: f64,
}

impl Progression {
    /// Distance from `x` to the nearest member.
    pub fn distance(&self, x: f64) -> f64 {
        let r = (x - self.offset).rem_euclid(self.gap);
        r.min(self.gap - r)
    }

    /// Members in `[lo, hi]`.
    pub fn members(&self, lo: f64, hi: f64) -> Vec<f64> {
        let k0 = ((lo - self.offset) / self.gap).ceil() as i64;
        let mut out = Vec::new();
        let mut k = k0;
        loop {
            let x = self.offset + k as f64 * self.gap;
            if x > hi {
                break;
            }
            out.push(x);
            k += 1;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContinuityKind {
    UniformlyContinuous,
    JumpsAt(Progression),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityReport {
    pub kind: ContinuityKind,
    /// Metaplectic total phase `½Σα_j mod 2π` (`G_n = e^{ins₀}` for normal maps).
    pub s0: Option<f64>,
    /// `Σα_j mod 2π`, the argument of the determinant of the holomorphic block.
    pub det_phase: Option<f64>,
    pub tag: ClassificationTag,
}

impl ContinuityReport {
    pub fn jump_points(&self) -> Option<Progression> {
        match self.kind {
            ContinuityKind::JumpsAt(p) => Some(p),
            ContinuityKind::UniformlyContinuous => None,
        }
    }
}

/// Jump set of `Q` for `G_n = e^{ins₀}`: `{λ : s₀ + λT ∈ 2πℤ}`, the points
/// where the sawtooth `π − {λT + s₀}` is discontinuous.
pub fn elliptic_jump_set(s0: f64, period: f64) -> Progression {
    Progression { offset: sawtooth(-s0) / period, gap: TAU / period }
}

/// Continuity type of `Q` for a periodic point with Poincaré map `S`.
///
/// `Q` jumps exactly when every eigenvalue of `S` is on the unit circle;
/// any hyperbolic or loxodromic factor makes the coefficients decay.
pub fn classify_continuity(map: &SymplecticMap, period: f64) -> Result<ContinuityReport> {
    if !(period > 0.0) {
        return Err(GrauertError::Domain(format!("period must be positive, got {period}")));
    }
    let tag = classify(map, 1e-9)?;
    let angles = match &tag {
        ClassificationTag::NonSemisimple => {
            return Err(GrauertError::UnsupportedClass("non-semisimple Poincaré map; use the geometry's direct formula".into()))
        }
        ClassificationTag::Elliptic(a) | ClassificationTag::DegenerateElliptic(a) => Some(a.clone()),
        _ => None,
    };
    Ok(match angles {
        Some(a) => {
            let sum: f64 = a.iter().sum();
            let s0 = sawtooth(0.5 * sum);
            ContinuityReport {
                kind: ContinuityKind::JumpsAt(elliptic_jump_set(s0, period)),
                s0: Some(s0),
                det_phase: Some(sawtooth(sum)),
                tag,
            }
        }
        None => ContinuityReport { kind: ContinuityKind::UniformlyContinuous, s0: None, det_phase: None, tag },
    })
}

/// `max_λ |Q(λ + h) − Q(λ)|` over a grid.
pub fn modulus_of_continuity(spec: &QFunctionSpec, lambdas: &[f64], h: f64) -> Result<f64> {
    if matches!(spec.coefficients, Coefficients::Empty) {
        return Ok(0.0);
    }
    let diffs: Result<Vec<f64>> = lambdas.par_iter().map(|&l| Ok((q_eval(spec, l + h)? - q_eval(spec, l)?).abs())).collect();
    Ok(diffs?.into_iter().fold(0.0, f64::max))
}

/// A numerically located discontinuity of `Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub location: f64,
    /// `Q(ν⁺) − Q(ν⁻)` from one-sided values at distance `probe`.
    pub height: f64,
}

/// Scans `[lo, hi]` with step `h` for jumps larger than `threshold` and
/// refines each by bisection to width `resolution`. Heights are one-sided
/// limits extrapolated from a quarter step on either side.
pub fn detect_jumps(spec: &QFunctionSpec, lo: f64, hi: f64, h: f64, threshold: f64, resolution: f64) -> Result<Vec<Jump>> {
    if !(h > 0.0) || !(hi > lo) {
        return Err(GrauertError::Domain("detect_jumps needs lo < hi and h > 0".into()));
    }
    let n = ((hi - lo) / h).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|k| lo + k as f64 * h).collect();
    let vals = q_eval_many(spec, &grid)?;
    let mut jumps = Vec::new();
    for k in 0..n {
        let d = vals[k + 1] - vals[k];
        // A jump stands out against both neighbouring increments.
        let left = if k > 0 { (vals[k] - vals[k - 1]).abs() } else { 0.0 };
        let right = if k + 2 <= n { (vals[k + 2] - vals[k + 1]).abs() } else { 0.0 };
        if d.abs() > threshold && d.abs() >= left && d.abs() >= right {
            let (mut a, mut b) = (grid[k], grid[k + 1]);
            let (mut qa, mut qb) = (vals[k], vals[k + 1]);
            while b - a > resolution {
                let m = 0.5 * (a + b);
                let qm = q_eval(spec, m)?;
                if (qm - qa).abs() >= (qb - qm).abs() {
                    b = m;
                    qb = qm;
                } else {
                    a = m;
                    qa = qm;
                }
            }
            let nu = 0.5 * (a + b);
            // One-sided limits by linear extrapolation from ν ± probe, ν ± 2·probe.
            let probe = (0.25 * h).max(10.0 * resolution);
            let right = 2.0 * q_eval(spec, nu + probe)? - q_eval(spec, nu + 2.0 * probe)?;
            let left = 2.0 * q_eval(spec, nu - probe)? - q_eval(spec, nu - 2.0 * probe)?;
            let height = right - left;
            jumps.push(Jump { location: nu, height });
        }
    }
    Ok(jumps)
}

/// One level `s_ℓ = Σα_j(k_j + ½)` of the elliptic quantum spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub s: f64,
    pub multiplicity: usize,
    /// `‖π_Ω v_ℓ‖²`: one on the ground level, zero elsewhere.
    pub ground_overlap: f64,
    pub indices: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticSpectrum {
    pub alphas: Vec<f64>,
    pub levels: Vec<Level>,
    /// `Λ_{ℓ,j} = (2πj + s_ℓ)/T`, `j = 0..=j_max`, one row per level.
    pub lambda_grid: Vec<Vec<f64>>,
}

pub fn elliptic_spectrum(alphas: &[f64], period: f64, k_max: usize, j_max: usize) -> Result<EllipticSpectrum> {
    if alphas.iter().any(|&a| !(a > 0.0 && a < TAU)) {
        return Err(GrauertError::Domain("elliptic angles must lie in (0, 2π)".into()));
    }
    if !(period > 0.0) {
        return Err(GrauertError::Domain(format!("period must be positive, got {period}")));
    }
    let d = alphas.len();
    let count = (k_max + 1)
        .checked_pow(d as u32)
        .filter(|&c| c <= 10_000_000)
        .ok_or_else(|| GrauertError::Resource(format!("(k_max+1)^d = ({}^{d}) multi-indices is too many", k_max + 1)))?;
    let mut levels: Vec<Level> = Vec::new();
    for code in 0..count {
        let mut idx = Vec::with_capacity(d);
        let mut c = code;
        for _ in 0..d {
            idx.push(c % (k_max + 1));
            c /= k_max + 1;
        }
        let s: f64 = alphas.iter().zip(&idx).map(|(a, &k)| a * (k as f64 + 0.5)).sum();
        let ground = idx.iter().all(|&k| k == 0);
        match levels.iter_mut().find(|l| (l.s - s).abs() <= 1e-12 * (1.0 + s.abs())) {
            Some(l) => {
                l.multiplicity += 1;
                l.indices.push(idx);
                if ground {
                    l.ground_overlap = 1.0;
                }
            }
            None => levels.push(Level { s, multiplicity: 1, ground_overlap: if ground { 1.0 } else { 0.0 }, indices: vec![idx] }),
        }
    }
    levels.sort_by(|a, b| a.s.total_cmp(&b.s));
    let lambda_grid = levels.iter().map(|l| (0..=j_max).map(|j| (TAU * j as f64 + l.s) / period).collect()).collect();
    Ok(EllipticSpectrum { alphas: alphas.to_vec(), levels, lambda_grid })
}

/// Fejér reconstruction of a measure on `[0, 2π)` from its moments.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub theta: Vec<f64>,
    /// Point masses at `theta`, summing to `Re G_0 = 1` up to rounding.
    pub mass: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Mass within circular distance `width/2` of `center`.
    pub fn mass_in_window(&self, center: f64, width: f64) -> f64 {
        self.theta
            .iter()
            .zip(&self.mass)
            .filter(|(t, _)| {
                let r = (*t - center).rem_euclid(TAU);
                r.min(TAU - r) <= 0.5 * width
            })
            .map(|(_, m)| m)
            .sum()
    }

    /// Largest window mass over all grid centres, and its centre.
    pub fn max_window_mass(&self, width: f64) -> (f64, f64) {
        self.theta.iter().map(|&c| (self.mass_in_window(c, width), c)).fold((f64::NEG_INFINITY, 0.0), |a, b| {
            if b.0 > a.0 {
                b
            } else {
                a
            }
        })
    }

    /// `∫ e^{inθ} dμ`.
    pub fn moment(&self, n: i64) -> Complex64 {
        self.theta.iter().zip(&self.mass).map(|(&t, &m)| Complex64::from_polar(m, n as f64 * t)).sum()
    }

    /// Atom test: more than 0.9 of the mass within a window of width `2π/√N`.
    pub fn has_atom(&self, n_moments: usize) -> bool {
        self.max_window_mass(TAU / (n_moments as f64).sqrt()).0 > 0.9
    }
}

/// Density `(1/2π) Σ_{|n|≤N} (1 − |n|/(N+1)) G_n e^{−inθ}` on `grid` points.
pub fn spectral_measure_from_moments(spec: &QFunctionSpec, n_moments: usize, grid: usize) -> Result<DiscreteMeasure> {
    if grid == 0 {
        return Err(GrauertError::Domain("grid must be positive".into()));
    }
    let moments: Vec<Complex64> = (1..=n_moments).map(|n| spec.coefficients.get(n).unwrap_or(Complex64::new(0.0, 0.0))).collect();
    let w = (n_moments + 1) as f64;
    let dtheta = TAU / grid as f64;
    let theta: Vec<f64> = (0..grid).map(|k| k as f64 * dtheta).collect();
    let mass = theta
        .par_iter()
        .map(|&t| {
            let mut acc = Accumulator::new();
            acc.add(1.0);
            for (k, g) in moments.iter().enumerate() {
                let n = (k + 1) as f64;
                let f = 1.0 - n / w;
                // G_n e^{−inθ} + conj(G_n) e^{inθ} = 2 Re(G_n e^{−inθ})
                acc.add(2.0 * f * (g * Complex64::from_polar(1.0, -(n * t).rem_euclid(TAU))).re);
            }
            acc.value() / TAU * dtheta
        })
        .collect();
    Ok(DiscreteMeasure { theta, mass })
}

/// The elliptic closed form `π − sawtooth(λT + s₀)`; `Q = (π − sawtooth)/(2T)`
/// away from jumps.
pub fn elliptic_closed_form(lambda: f64, period: f64, s0: f64) -> f64 {
    (PI - sawtooth(lambda * period + s0)) / (2.0 * period)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sawtooth_examples() {
        assert_eq!(sawtooth(0.0), 0.0);
        assert_eq!(sawtooth(TAU), 0.0);
        assert!((sawtooth(-PI) - PI).abs() < 1e-15);
        assert!((sawtooth(7.0) - (7.0 - TAU)).abs() < 1e-15);
    }

    #[test]
    fn sawtooth_series() {
        assert!(sawtooth_partial_sum(PI, 1000).abs() < 1e-10);
        assert_eq!(sawtooth_partial_sum(0.0, 1000), 0.0);
        assert!((sawtooth_partial_sum(PI / 2.0, 100_000) - PI / 2.0).abs() < 1e-3);
        // π − sawtooth(x) away from the jumps.
        for &x in &[0.3, 1.0, 2.5, 4.0, 6.0] {
            assert!((sawtooth_partial_sum(x, 200_000) - (PI - sawtooth(x))).abs() < 1e-3, "x={x}");
        }
    }

    #[test]
    fn empty_and_zero_lambda() {
        assert_eq!(q_eval(&QFunctionSpec::non_periodic(), 3.7).unwrap(), 0.0);
        let h = QFunctionSpec::hyperbolic(TAU, vec![1.0]).unwrap();
        assert_eq!(q_eval(&h, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn elliptic_matches_abel_closed_form() {
        // Σ rⁿ e^{inx}/n = −log(1 − r e^{ix}) is the exact Abel sum.
        let t = 2.0;
        let s0 = 0.7;
        let spec = QFunctionSpec::elliptic(t, s0).unwrap();
        let Summation::Abel { r, .. } = spec.summation else { unreachable!() };
        for &l in &[0.1, 0.9, 1.7, 2.6] {
            let x = l * t + s0;
            let exact = -(Complex64::new(1.0, 0.0) - Complex64::from_polar(r, x)).ln();
            let q = q_eval(&spec, l).unwrap();
            assert!((q - exact.im / t).abs() < 1e-9, "λ={l}");
            assert!((q - elliptic_closed_form(l, t, s0)).abs() < 1e-3);
        }
    }

    #[test]
    fn adaptive_detects_divergence() {
        let spec =
            QFunctionSpec::elliptic(TAU, 0.3).unwrap().with_summation(Summation::Adaptive { tol: 1e-10, max_terms: 10_000 });
        assert!(matches!(q_eval(&spec, 0.2), Err(GrauertError::Convergence { .. })));
    }

    #[test]
    fn hyperbolic_matches_direct_sum() {
        let spec = QFunctionSpec::hyperbolic(TAU, vec![1.0]).unwrap();
        let l = 0.37;
        let direct: f64 = (1..200)
            .map(|n| {
                let n = n as f64;
                (l * n * TAU).sin() / (n * TAU) / n.cosh().sqrt()
            })
            .sum();
        assert!((q_eval(&spec, l).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn continuity_classes() {
        let r = classify_continuity(&SymplecticMap::rotation(1.0), TAU).unwrap();
        let p = r.jump_points().unwrap();
        assert!((p.gap - 1.0).abs() < 1e-14);
        assert!((r.s0.unwrap() - 0.5).abs() < 1e-12);
        assert!((r.det_phase.unwrap() - 1.0).abs() < 1e-12);
        assert!(p.distance((TAU - 0.5) / TAU) < 1e-12);
        let h = classify_continuity(&SymplecticMap::hyperbolic(1.0), TAU).unwrap();
        assert_eq!(h.kind, ContinuityKind::UniformlyContinuous);
        let l = classify_continuity(&SymplecticMap::loxodromic(0.3, 0.4), TAU).unwrap();
        assert_eq!(l.kind, ContinuityKind::UniformlyContinuous);
        assert!(classify_continuity(&SymplecticMap::shear(1, 1.0), TAU).is_err());
    }

    #[test]
    fn spectrum_levels() {
        let s = elliptic_spectrum(&[1.0], 1.0, 2, 0).unwrap();
        let levels: Vec<f64> = s.levels.iter().map(|l| l.s).collect();
        assert_eq!(levels, vec![0.5, 1.5, 2.5]);
        assert_eq!(s.levels[0].ground_overlap, 1.0);
        assert!(s.levels[1..].iter().all(|l| l.ground_overlap == 0.0));

        let r2 = 2f64.sqrt();
        let s = elliptic_spectrum(&[1.0, r2], TAU, 1, 3).unwrap();
        let want = [(1.0 + r2) / 2.0, (3.0 + r2) / 2.0, (1.0 + 3.0 * r2) / 2.0, (3.0 + 3.0 * r2) / 2.0];
        assert_eq!(s.levels.len(), 4);
        for (l, w) in s.levels.iter().zip(want) {
            assert!((l.s - w).abs() < 1e-14);
        }
        assert!((s.lambda_grid[0][2] - (2.0 * TAU + want[0]) / TAU).abs() < 1e-14);
    }

    #[test]
    fn fejer_reconstruction() {
        let n = 400;
        let s0 = 1.3;
        let ell = QFunctionSpec::elliptic(TAU, s0).unwrap();
        let m = spectral_measure_from_moments(&ell, n, 4096).unwrap();
        assert!((m.total() - 1.0).abs() < 1e-10);
        assert!(m.has_atom(n));
        assert!(m.mass_in_window(s0, TAU / (n as f64).sqrt()) > 0.9);

        let zero =
            QFunctionSpec::new(TAU, Coefficients::Table(Arc::from(vec![Complex64::new(0.0, 0.0); n])), Summation::Truncate(n))
                .unwrap();
        let m = spectral_measure_from_moments(&zero, n, 1000).unwrap();
        assert!(m.mass.iter().all(|&x| (x - 1e-3).abs() < 1e-15));

        let hyp = QFunctionSpec::hyperbolic(TAU, vec![1.0]).unwrap();
        let m = spectral_measure_from_moments(&hyp, n, 4096).unwrap();
        assert!(!m.has_atom(n));
        assert!(m.max_window_mass(TAU / (n as f64).sqrt()).0 < 0.5);
        for k in 1..=5 {
            let g = hyp.coefficients.get(k).unwrap();
            assert!((m.moment(k as i64) - g * (1.0 - k as f64 / (n + 1) as f64)).norm() < 1e-10);
        }
    }

    #[test]
    fn jumps_are_detected_at_the_sawtooth_discontinuities() {
        let s0 = 0.5;
        let spec = QFunctionSpec::elliptic(TAU, s0).unwrap().with_summation(Summation::abel(10_000));
        let jumps = detect_jumps(&spec, 0.05, 2.05, 0.01, 0.05, 1e-5).unwrap();
        let set = elliptic_jump_set(s0, TAU);
        assert_eq!(jumps.len(), 2);
        for j in &jumps {
            assert!(set.distance(j.location) < 1e-3);
            // Height of π/T upward for the sawtooth π − {x}.
            assert!((j.height - 0.5).abs() < 1e-2, "{j:?}");
        }
    }
}
