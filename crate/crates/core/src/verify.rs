//! End-to-end verification suite: closed forms, cross-formula agreement and
//! asymptotic exponents on the model geometries. Each suite returns a
//! [`CriterionReport`]; [`verify_all`] runs them in order.

use crate::beams::{
    beam_complexify, beam_spec, beam_vs_highest_weight_error, floquet_frame, highest_weight_on_equator, integrate_jacobi,
    oscillator_frame, riccati_gamma, sphere_equator_beam, Curvature,
};
use crate::error::Result;
use crate::geometries::{
    circle_eigendata, sphere_eigendata, sphere_harmonic, torus_eigendata, tube_point, EigenIndex, Eigendata, EigendataEntry,
    Geometry, TubePoint,
};
use crate::qfunction::{detect_jumps, q_eval_many, sawtooth, QFunctionSpec};
use crate::report::{Check, CriterionReport, Provenance, VerificationReport};
use crate::special::bessel_i0;
use crate::symplectic::random::{random_elliptic, random_hyperbolic, random_symplectic};
use crate::symplectic::{
    eigen_structure, matrix_element_blockdet, matrix_element_keyid, matrix_element_magnitude, power_sequence, SymplecticMap,
};
use crate::weyl::{
    build_smoothing_kernel, calibrate_on_circle, fit_power_law, husimi_sup, jump_at, l2_norm_boundary,
    period_coefficient_extract, tempered_series, tempered_sum, universal_bound, Quadrature, SearchGrid,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};
use std::time::Instant;

use Provenance::{Asymptotic, ClosedForm, CrossFormula};

/// Tube parameter used throughout the suite.
pub const TAU_DEFAULT: f64 = 0.5;

fn run(id: u32, title: &str, f: impl FnOnce() -> Result<Vec<Check>>) -> CriterionReport {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed().as_secs_f64();
    match out {
        Ok(checks) => CriterionReport { id, title: title.into(), checks, elapsed, error: None },
        Err(e) => CriterionReport { id, title: title.into(), checks: vec![], elapsed, error: Some(e.to_string()) },
    }
}

fn runtime(limit: f64, start: Instant) -> Check {
    Check::at_most("runtime_s", start.elapsed().as_secs_f64(), limit, ClosedForm)
}

/// `C(τ) = Σ_{k≥0} e^{−4τk}` minus the `k = 0` term plus one, summed directly.
fn circle_constant(tau: f64) -> f64 {
    let q = (-4.0 * tau).exp();
    let (mut term, mut sum) = (q, 1.0);
    while term > 1e-18 {
        sum += term;
        term *= q;
    }
    sum
}

pub fn circle_closed_form() -> CriterionReport {
    run(1, "circle closed form", || {
        let start = Instant::now();
        let tau = TAU_DEFAULT;
        let data = circle_eigendata(101.0)?;
        let p = tube_point(Geometry::Circle, &[0.0], &[-1.0], tau)?;
        let c = circle_constant(tau);
        let mut checks = Vec::new();
        for lambda in [10.5f64, 25.3, 100.7] {
            let want = lambda - lambda.fract() + c;
            let got = tempered_sum(&data, &p, tau, lambda)?;
            checks.push(Check::close(&format!("P(lambda={lambda})"), want, got, 1e-6, ClosedForm));
        }
        checks.push(runtime(1.0, start));
        Ok(checks)
    })
}

pub fn matrix_element_agreement() -> CriterionReport {
    run(2, "matrix-element cross-formula agreement", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
        let (mut worst_key, mut worst_mag) = (0.0f64, 0.0f64);
        let mut count = 0;
        let mut i = 0usize;
        while count < 100 {
            let d = 1 + i % 3;
            let s = match i % 4 {
                0 => random_symplectic(&mut rng, d, 1.0),
                1 => random_elliptic(&mut rng, d, 0.5),
                2 => random_hyperbolic(&mut rng, d, 0.5),
                _ if d >= 2 => {
                    let mut parts = vec![SymplecticMap::loxodromic(0.4, 1.1)];
                    if d == 3 {
                        parts.push(SymplecticMap::rotation(2.0));
                    }
                    let q = random_symplectic(&mut rng, d, 0.5);
                    q.compose(&SymplecticMap::direct_sum(&parts)).compose(&q.inverse())
                }
                _ => random_symplectic(&mut rng, d, 0.7),
            };
            i += 1;
            if !eigen_structure(&s, 1e-9)?.semisimple {
                continue;
            }
            count += 1;
            let b = matrix_element_blockdet(&s)?.value;
            let k = matrix_element_keyid(&s)?.value;
            worst_key = worst_key.max((b - k).norm());
            worst_mag = worst_mag.max((b.norm() - matrix_element_magnitude(&s)).abs());
        }
        let mut checks = vec![
            Check::at_most("max |blockdet - keyid| (100 maps)", worst_key, 1e-10, CrossFormula),
            Check::at_most("max ||blockdet| - magnitude| (100 maps)", worst_mag, 1e-10, CrossFormula),
        ];
        let mut worst_hyp = 0.0f64;
        for mus in [vec![0.3], vec![1.0, 0.7], vec![0.2, 1.3, 2.1]] {
            let s = SymplecticMap::direct_sum(&mus.iter().map(|&m| SymplecticMap::hyperbolic(m)).collect::<Vec<_>>());
            let seq = power_sequence(&s, 10)?;
            for (n, v) in seq.iter().enumerate() {
                let nf = (n + 1) as f64;
                let want: f64 = mus.iter().map(|m| (nf * m).cosh().powf(-0.5)).product();
                worst_hyp = worst_hyp.max((v.value - want).norm());
            }
        }
        checks.push(Check::at_most("hyperbolic G_n closed form, n <= 10", worst_hyp, 1e-10, ClosedForm));
        checks.push(runtime(5.0, start));
        Ok(checks)
    })
}

pub fn elliptic_sawtooth() -> CriterionReport {
    run(3, "elliptic Q sawtooth", || {
        let period = TAU;
        let alpha = 1.0;
        let s0 = 0.5 * alpha;
        let spec = QFunctionSpec::elliptic(period, s0)?;
        let gap = TAU / period;
        let literal = |l: f64| {
            let x = (s0 + l * period) / TAU;
            (x - x.round()).abs() * TAU / period
        };
        let stated = |l: f64| {
            let x = (s0 + l * period - PI) / TAU;
            (x - x.round()).abs() * TAU / period
        };
        let (lo, hi) = (0.0, 3.0 * gap);
        let grid: Vec<f64> =
            (0..600).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / 600.0).filter(|&l| literal(l) >= 0.1).take(200).collect();
        let q = q_eval_many(&spec, &grid)?;
        let basis: Vec<f64> = grid.iter().map(|l| sawtooth(l * period + s0) - PI).collect();
        let c = q.iter().zip(&basis).map(|(a, b)| a * b).sum::<f64>() / basis.iter().map(|b| b * b).sum::<f64>();
        let dev = q.iter().zip(&basis).map(|(a, b)| (a - c * b).abs()).fold(0.0, f64::max);
        let jumps = detect_jumps(&spec, lo + 0.05, hi - 0.05, 0.01, 0.1, 1e-7)?;
        let worst_stated = jumps.iter().map(|j| stated(j.location)).fold(0.0, f64::max);
        let worst_literal = jumps.iter().map(|j| literal(j.location)).fold(0.0, f64::max);
        Ok(vec![
            Check::flag("grid points away from jumps", "200", &grid.len().to_string(), grid.len() == 200, ClosedForm),
            Check::close("fitted constant c in q = c(sawtooth - pi)", -1.0 / (2.0 * period), c, 1e-4, ClosedForm),
            Check::at_most("max |q - c(sawtooth - pi)|", dev, 1e-3, ClosedForm),
            Check::flag("jumps detected", "3", &jumps.len().to_string(), jumps.len() == 3, ClosedForm),
            Check::at_most("jump distance to {s0 + lambda T in pi + 2piZ}", worst_stated, 1e-3, Asymptotic),
            Check::at_most("jump distance to {s0 + lambda T in 2piZ}", worst_literal, 1e-3, ClosedForm),
        ])
    })
}

fn torus_entry(k: &[i64]) -> EigendataEntry {
    let l = k.iter().map(|&a| (a * a) as f64).sum::<f64>().sqrt();
    EigendataEntry { lambda: l, index: EigenIndex::Torus(k.to_vec().into()) }
}

pub fn torus_suite() -> CriterionReport {
    run(4, "flat torus m=2", || {
        let start = Instant::now();
        let tau = TAU_DEFAULT;
        let data = torus_eigendata(2, 400.0)?;
        let p = tube_point(Geometry::Torus { m: 2 }, &[0.0, 0.0], &[0.6, 0.8], tau)?;
        let grid: Vec<f64> = (0..=60).map(|i| 100.0 + 5.0 * i as f64).collect();
        let series = tempered_series(&data, &p, tau, &grid)?;
        let fit = fit_power_law(&grid, &series.values)?;
        let mut checks = vec![Check::close("(a) tempered sum exponent", 1.5, fit.exponent, 0.03, Asymptotic)];
        let mut worst = 0.0f64;
        for k in [[6i64, 8], [30, 40], [120, 160]] {
            let e = torus_entry(&k);
            let oracle = TAU * tau * bessel_i0(2.0 * tau * e.lambda);
            worst = worst.max((l2_norm_boundary(&e, tau, Quadrature::Auto)? / oracle - 1.0).abs());
        }
        checks.push(Check::at_most("(b) |quadrature/Bessel - 1| at |k| = 10, 50, 200", worst, 1e-10, CrossFormula));
        let ratio = |k: &[i64]| -> Result<f64> {
            let e = torus_entry(k);
            Ok(l2_norm_boundary(&e, tau, Quadrature::Auto)? / ((2.0 * tau * e.lambda).exp() * e.lambda.powf(-0.5)))
        };
        let drift = (ratio(&[200, 0])? / ratio(&[100, 0])? - 1.0).abs();
        checks.push(Check::at_most("(c) L2 asymptotic ratio drift |k| = 100 -> 200", drift, 0.05, Asymptotic));
        let (mut ks, mut sups) = (Vec::new(), Vec::new());
        let mut worst_dir = 0.0f64;
        let mut worst_allow = f64::INFINITY;
        for n in [2i64, 4, 8, 16, 24, 32, 40] {
            let k = [3 * n, 4 * n];
            let e = torus_entry(&k);
            let s = husimi_sup(&e, tau, SearchGrid::default(), Quadrature::Auto)?;
            let d = s.argmax.direction();
            let err = ((d[0] + 0.6).powi(2) + (d[1] + 0.8).powi(2)).sqrt();
            worst_dir = worst_dir.max(err);
            worst_allow = worst_allow.min(0.1 / e.lambda.sqrt());
            ks.push(e.lambda);
            sups.push(s.value);
        }
        let hfit = fit_power_law(&ks, &sups)?;
        checks.push(Check::close("(d) Husimi sup exponent", 0.5, hfit.exponent, 0.05, Asymptotic));
        checks.push(Check::at_most("(d) argmax distance to -k/|k|", worst_dir, worst_allow, ClosedForm));
        checks.push(runtime(60.0, start));
        Ok(checks)
    })
}

pub fn sphere_extremals() -> CriterionReport {
    run(5, "sphere extremals", || {
        let start = Instant::now();
        let tau = TAU_DEFAULT;
        let ns: Vec<usize> = (2..=10).map(|i| 10 * i).collect();
        let (mut hw, mut zonal, mut nf) = (Vec::new(), Vec::new(), Vec::new());
        let mut worst_equator = 0.0f64;
        let mut peak = std::collections::BTreeMap::new();
        for &n in &ns {
            let lam = ((n * (n + 1)) as f64).sqrt();
            let e = EigendataEntry { lambda: lam, index: EigenIndex::Sphere { n, m: n as i64 } };
            let s = husimi_sup(&e, tau, SearchGrid::default(), Quadrature::Auto)?;
            // the lifted equator: x on the equator of the rotation axis and |ζ₁ + iζ₂| = e^τ
            let z = s.argmax.zeta();
            let w = (z[0] + crate::Complex64::new(0.0, 1.0) * z[1]).norm();
            worst_equator = worst_equator.max(s.argmax.x[2].abs()).max((w / tau.exp() - 1.0).abs());
            hw.push(s.value.sqrt());
            peak.insert(n, sphere_harmonic(n, n as i64, &z).norm() / ((n as f64).powf(0.25) * (n as f64 * tau).exp()));
            let e0 = EigendataEntry { lambda: lam, index: EigenIndex::Sphere { n, m: 0 } };
            zonal.push(husimi_sup(&e0, tau, SearchGrid::default(), Quadrature::Auto)?.value.sqrt());
            nf.push(n as f64);
        }
        let fh = fit_power_law(&nf, &hw)?;
        let fz = fit_power_law(&nf, &zonal)?;
        let drift = (peak[&100] / peak[&50] - 1.0).abs();
        Ok(vec![
            Check::close("sqrt-Husimi sup exponent of Y_N^N", 0.5, fh.exponent, 0.05, Asymptotic),
            Check::at_most("argmax distance to the lifted equator", worst_equator, 1e-4, ClosedForm),
            Check::at_most("peak / (N^1/4 e^(N tau)) drift N = 50 -> 100", drift, 0.05, Asymptotic),
            Check::at_most("zonal exponent + 0.2 vs highest weight", fz.exponent + 0.2, fh.exponent, Asymptotic),
            runtime(120.0, start),
        ])
    })
}

pub fn period_coefficients() -> CriterionReport {
    run(6, "period-coefficient recovery", || {
        let tau = TAU_DEFAULT;
        let kernel = build_smoothing_kernel(3.0, 6)?;
        let cal = calibrate_on_circle(&kernel, 1, 100.0, tau)?;
        let w = kernel.effective_width();
        let circle = circle_eigendata(200.0 + w + 1.0)?;
        let p = tube_point(Geometry::Circle, &[0.0], &[-1.0], tau)?;
        let mut checks = vec![Check::close("calibration C' (circle, n=1, lambda=100)", 1.0, cal, 0.05, CrossFormula)];
        for n in [1u32, 2] {
            let g = period_coefficient_extract(&circle, &p, tau, &kernel, n, TAU, 200.0, cal)?;
            checks.push(Check::close(&format!("circle |G_{n}| at lambda=200"), 1.0, g.norm(), 0.05, ClosedForm));
        }
        let torus = torus_eigendata(2, 200.0 + w + 1.0)?;
        let s3 = 3f64.sqrt();
        let q = tube_point(Geometry::Torus { m: 2 }, &[0.0, 0.0], &[1.0 / s3, 2f64.sqrt() / s3], tau)?;
        let g = period_coefficient_extract(&torus, &q, tau, &kernel, 1, TAU, 200.0, cal)?;
        checks.push(Check::at_most("non-periodic torus |G_1| at lambda=200", g.norm(), 0.05, Asymptotic));
        Ok(checks)
    })
}

pub fn beam_suite() -> CriterionReport {
    run(7, "Gaussian beams", || {
        let tau = TAU_DEFAULT;
        let mut checks = Vec::new();
        let c = Curvature::cosine(1.0, 0.1, 1.0);
        let (y0, yd0) = oscillator_frame(&c);
        let sol = integrate_jacobi(&c, TAU, &y0, &yd0, 10_000)?;
        let g = riccati_gamma(&sol)?;
        let sphere = integrate_jacobi(
            &Curvature::sphere(),
            TAU,
            &oscillator_frame(&Curvature::sphere()).0,
            &oscillator_frame(&Curvature::sphere()).1,
            10_000,
        )?;
        let gs = riccati_gamma(&sphere)?;
        let floq = floquet_frame(&Curvature::cosine(1.2, 0.1, 1.0), TAU, 10_000)?;
        let gf = riccati_gamma(&floq.solution)?;
        let drift = sol.wronskian_drift.max(sphere.wronskian_drift).max(floq.solution.wronskian_drift);
        checks.push(Check::at_most("Wronskian drift", drift, 1e-8, ClosedForm));
        let im = g.im_identity_defect.max(gs.im_identity_defect).max(gf.im_identity_defect);
        checks.push(Check::at_most("|Im Gamma - (YY*)^-1 / 2|", im, 1e-8, ClosedForm));
        let iid = gs.gamma.iter().map(|m| (m[(0, 0)] - crate::Complex64::new(0.0, 1.0)).norm()).fold(0.0, f64::max);
        checks.push(Check::at_most("sphere |Gamma - iI|", iid, 1e-8, ClosedForm));
        let e50 = beam_vs_highest_weight_error(50, 2048, 96)?;
        let e100 = beam_vs_highest_weight_error(100, 2048, 96)?;
        checks.push(Check::at_most("eps(100)/eps(50)", e100 / e50, 0.6, Asymptotic));
        let mut ratios = Vec::new();
        for n in [50usize, 100] {
            let b = sphere_equator_beam(n, 2048)?;
            let v = beam_complexify(&b, 0.0, -tau, &[0.0], &[0.0])?.norm();
            let hw = highest_weight_on_equator(n, 0.0, 0.0).norm() * (n as f64 * tau).exp();
            ratios.push((n, v / hw, v / ((n as f64).powf(0.25) * (n as f64 * tau).exp())));
        }
        for &(n, r, _) in &ratios {
            checks.push(Check::close(&format!("complexified beam / exact peak, N={n}"), 1.0, r, 0.05, Asymptotic));
        }
        let form_drift = (ratios[1].2 / ratios[0].2 - 1.0).abs();
        checks.push(Check::at_most("beam / (N^1/4 e^(N tau)) drift N = 50 -> 100", form_drift, 0.05, Asymptotic));
        // quasi-eigenvalue bookkeeping on a non-constant profile
        let b = beam_spec(&floq, 10)?;
        let want = (TAU * 10.0 + 0.5 * floq.alpha_sum()) / TAU;
        checks.push(Check::close("r_k quantization (K = 1.2 + 0.1 cos s)", want, b.r, 1e-12, ClosedForm));
        Ok(checks)
    })
}

fn jump_identity(data: &Eigendata, p: &TubePoint, tau: f64, upto: f64) -> Result<(usize, usize)> {
    let d = data.half_gap().min(0.25);
    let (mut total, mut exact) = (0, 0);
    for l in data.distinct_eigenvalues() {
        if l == 0.0 || l + d > upto {
            continue;
        }
        total += 1;
        let j = jump_at(data, p, tau, l)?;
        let diff = tempered_sum(data, p, tau, l + d)? - tempered_sum(data, p, tau, l - d)?;
        if j.to_bits() == diff.to_bits() {
            exact += 1;
        }
    }
    Ok((exact, total))
}

pub fn jumps_and_universal_bound() -> CriterionReport {
    run(8, "jump identity and universal bound", || {
        let tau = TAU_DEFAULT;
        let mut checks = Vec::new();
        let circle = circle_eigendata(120.0)?;
        let cp = vec![tube_point(Geometry::Circle, &[0.0], &[-1.0], tau)?, tube_point(Geometry::Circle, &[1.3], &[1.0], tau)?];
        let torus = torus_eigendata(2, 40.0)?;
        let tp = vec![
            tube_point(Geometry::Torus { m: 2 }, &[0.0, 0.0], &[0.6, 0.8], tau)?,
            tube_point(Geometry::Torus { m: 2 }, &[0.4, 2.0], &[-1.0, 0.0], tau)?,
            tube_point(Geometry::Torus { m: 2 }, &[0.0, 0.0], &[1.0 / 3f64.sqrt(), (2.0f64 / 3.0).sqrt()], tau)?,
        ];
        let sphere = sphere_eigendata(40)?;
        let sp = vec![
            tube_point(Geometry::Sphere, &[1.0, 0.0, 0.0], &[0.0, -1.0, 0.0], tau)?,
            tube_point(Geometry::Sphere, &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], tau)?,
            tube_point(Geometry::Sphere, &[0.6, 0.0, 0.8], &[0.0, 1.0, 0.0], tau)?,
        ];
        for (name, data, pts) in [("circle", &circle, &cp), ("torus2", &torus, &tp), ("sphere", &sphere, &sp)] {
            let upto = data.cutoff;
            let (exact, total) = jump_identity(data, &pts[0], tau, upto)?;
            checks.push(Check::flag(
                &format!("{name}: jump_at bit-exact"),
                &total.to_string(),
                &exact.to_string(),
                exact == total && total > 0,
                ClosedForm,
            ));
            let ub = universal_bound(data, pts, tau)?;
            checks.push(Check::flag(
                &format!("{name}: weights <= A^2 lambda^((m-1)/2), A = {:.6}", ub.a),
                "0 violations",
                &format!(
                    "{} violations of {} (sup lower/upper half {:.4}/{:.4})",
                    ub.violations, ub.entries, ub.lower_sup, ub.upper_sup
                ),
                ub.violations == 0 && ub.a.is_finite(),
                Asymptotic,
            ));
            // the constant fitted on the lower half must already cover the upper half
            checks.push(Check::at_most(
                &format!("{name}: upper-half sup / lower-half sup"),
                ub.upper_sup / ub.lower_sup,
                1.0 + 1e-12,
                Asymptotic,
            ));
        }
        Ok(checks)
    })
}

/// All eight suites, in order.
pub fn verify_all() -> VerificationReport {
    VerificationReport {
        criteria: vec![
            circle_closed_form(),
            matrix_element_agreement(),
            elliptic_sawtooth(),
            torus_suite(),
            sphere_extremals(),
            period_coefficients(),
            beam_suite(),
            jumps_and_universal_bound(),
        ],
    }
}
