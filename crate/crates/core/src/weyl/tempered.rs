use crate::error::{GrauertError, Result};
use crate::geometries::{EigenIndex, Eigendata, Geometry, TubePoint};
use crate::summation::Accumulator;
use rayon::prelude::*;

fn check_point(data: &Eigendata, p: &TubePoint, tau: f64) -> Result<()> {
    if data.geometry != Geometry::Toy && data.geometry != p.geometry {
        return Err(GrauertError::Dimension(format!(
            "{} eigendata evaluated at a {} point",
            data.geometry.name(),
            p.geometry.name()
        )));
    }
    if data.geometry != Geometry::Toy && (p.radius() - tau).abs() > 1e-12 * tau.max(1.0) {
        return Err(GrauertError::Domain(format!("τ = {tau} but the point has |ξ| = {}", p.radius())));
    }
    Ok(())
}

fn check_coverage(data: &Eigendata, lambda: f64) -> Result<()> {
    if lambda > data.cutoff {
        return Err(GrauertError::Coverage { cutoff: data.cutoff, requested: lambda });
    }
    Ok(())
}

/// Number of leading entries with `λ_j ≤ λ`.
fn prefix_len(data: &Eigendata, lambda: f64) -> usize {
    data.entries.partition_point(|e| e.lambda <= lambda)
}

/// `e^{−2τλ_j}|φ_j^ℂ(ζ)|²` for the first `len` entries, computed in parallel.
/// Each weight is an independent pure computation, so the values do not
/// depend on the worker count.
pub fn tempered_weights(data: &Eigendata, p: &TubePoint, tau: f64, len: usize) -> Result<Vec<f64>> {
    data.entries[..len].par_iter().map(|e| e.tempered_weight(p, tau)).collect()
}

/// `P^τ_{[0,λ]}(ζ, ζ̄) = Σ_{λ_j ≤ λ} e^{−2τλ_j}|φ_j^ℂ(ζ)|²`, accumulated with
/// compensation in the eigendata's index order.
pub fn tempered_sum(data: &Eigendata, p: &TubePoint, tau: f64, lambda: f64) -> Result<f64> {
    check_point(data, p, tau)?;
    check_coverage(data, lambda)?;
    let len = prefix_len(data, lambda);
    let w = tempered_weights(data, p, tau, len)?;
    let mut acc = Accumulator::new();
    w.iter().for_each(|&x| acc.add(x));
    Ok(acc.value())
}

/// `P^τ` sampled on a grid, with per-eigenvalue jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperedSumSeries {
    pub geometry: Geometry,
    pub zeta: TubePoint,
    pub tau: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// `(λ_j, P(λ_j + 0) − P(λ_j − 0))` for each distinct eigenvalue up to the
    /// last grid point.
    pub jump_records: Vec<(f64, f64)>,
}

/// One accumulation pass producing `P^τ` at every grid point (increasing)
/// and the jump at every distinct eigenvalue. Every value is bitwise equal
/// to the corresponding [`tempered_sum`].
pub fn tempered_series(data: &Eigendata, p: &TubePoint, tau: f64, grid: &[f64]) -> Result<TemperedSumSeries> {
    check_point(data, p, tau)?;
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(GrauertError::Domain("grid must be nondecreasing".into()));
    }
    let top = grid.last().copied().unwrap_or(0.0);
    check_coverage(data, top)?;
    let len = prefix_len(data, top);
    let w = tempered_weights(data, p, tau, len)?;
    let mut acc = Accumulator::new();
    let mut values = Vec::with_capacity(grid.len());
    let mut jumps = Vec::new();
    let mut gi = 0;
    let mut i = 0;
    while i < len || gi < grid.len() {
        let next_lambda = if i < len { data.entries[i].lambda } else { f64::INFINITY };
        if gi < grid.len() && grid[gi] < next_lambda {
            values.push(acc.value());
            gi += 1;
            continue;
        }
        let before = acc.value();
        while i < len && data.entries[i].lambda == next_lambda {
            acc.add(w[i]);
            i += 1;
        }
        jumps.push((next_lambda, acc.value() - before));
    }
    Ok(TemperedSumSeries { geometry: data.geometry, zeta: p.clone(), tau, grid: grid.to_vec(), values, jump_records: jumps })
}

/// `P^τ_{[0,λ_j+0]} − P^τ_{[0,λ_j−0]}`: the accumulated total just after the
/// eigenvalue cluster minus the total just before it, on the same
/// accumulation path as [`tempered_sum`].
pub fn jump_at(data: &Eigendata, p: &TubePoint, tau: f64, lambda_j: f64) -> Result<f64> {
    check_point(data, p, tau)?;
    let start = data.entries.partition_point(|e| e.lambda < lambda_j);
    let end = prefix_len(data, lambda_j);
    if start == end {
        return Err(GrauertError::Lookup(lambda_j));
    }
    check_coverage(data, lambda_j)?;
    let w = tempered_weights(data, p, tau, end)?;
    let mut acc = Accumulator::new();
    w[..start].iter().for_each(|&x| acc.add(x));
    let before = acc.value();
    w[start..end].iter().for_each(|&x| acc.add(x));
    Ok(acc.value() - before)
}

/// Tempered contribution of the `N`-th spherical-harmonic cluster.
pub fn zoll_cluster_sum(data: &Eigendata, p: &TubePoint, tau: f64, n: usize) -> Result<f64> {
    if data.geometry != Geometry::Sphere {
        return Err(GrauertError::Domain("Zoll clusters are defined for the sphere".into()));
    }
    check_point(data, p, tau)?;
    let lambda = ((n * (n + 1)) as f64).sqrt();
    check_coverage(data, lambda)?;
    let mut acc = Accumulator::new();
    for e in &data.entries {
        if matches!(e.index, EigenIndex::Sphere { n: k, .. } if k == n) {
            acc.add(e.tempered_weight(p, tau)?);
        }
    }
    Ok(acc.value())
}

/// Zoll cluster centre `N + β/4` with `β = 2` on the round 2-sphere.
pub const SPHERE_MASLOV_BETA: f64 = 2.0;

pub fn zoll_cluster_center(n: usize) -> f64 {
    n as f64 + SPHERE_MASLOV_BETA / 4.0
}

/// Result of fitting `e^{−2τλ_j}|φ_j^ℂ|² ≤ A² λ_j^{(m−1)/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniversalBound {
    /// `A`, the square root of the largest ratio over all entries with `λ ≥ 1`.
    pub a: f64,
    /// Largest ratio among entries in the lower / upper half of the `λ` range.
    pub lower_sup: f64,
    pub upper_sup: f64,
    pub entries: usize,
    /// Entries that exceed `A² λ^{(m−1)/2}` (zero by construction of `A`
    /// unless weights are non-finite).
    pub violations: usize,
}

/// Fits one constant `A` for all entries and points.
pub fn universal_bound(data: &Eigendata, points: &[TubePoint], tau: f64) -> Result<UniversalBound> {
    let m = data.geometry.dim() as f64;
    let p_exp = 0.5 * (m - 1.0);
    let top = data.entries.last().map_or(1.0, |e| e.lambda);
    let mid = 0.5 * (1.0 + top);
    let mut ratios = Vec::new();
    for p in points {
        check_point(data, p, tau)?;
        let w = tempered_weights(data, p, tau, data.entries.len())?;
        for (e, wi) in data.entries.iter().zip(w) {
            if e.lambda >= 1.0 {
                ratios.push((e.lambda, wi / e.lambda.powf(p_exp)));
            }
        }
    }
    let sup = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    let lower_sup = ratios.iter().filter(|r| r.0 <= mid).map(|r| r.1).fold(0.0, f64::max);
    let upper_sup = ratios.iter().filter(|r| r.0 > mid).map(|r| r.1).fold(0.0, f64::max);
    let violations = ratios.iter().filter(|r| !(r.1 <= sup)).count();
    Ok(UniversalBound { a: sup.sqrt(), lower_sup, upper_sup, entries: ratios.len(), violations })
}
