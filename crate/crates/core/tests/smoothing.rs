use grauert::geometries::{circle_eigendata, flat_torus_q, sphere_eigendata, torus_eigendata, tube_point, Geometry};
use grauert::weyl::{
    build_smoothing_kernel, calibrate_on_circle, fit_power_law, period_coefficient_extract, smoothed_density, two_term_residual,
};
use std::f64::consts::TAU;

#[test]
fn circle_density_is_stable_under_cutoff_doubling() {
    let k = build_smoothing_kernel(3.0, 6).unwrap();
    let p = tube_point(Geometry::Circle, &[0.0], &[-1.0], 0.5).unwrap();
    let need = 100.3 + k.effective_width();
    let a = smoothed_density(&circle_eigendata(need + 1.0).unwrap(), &p, 0.5, &k, 100.3).unwrap();
    let b = smoothed_density(&circle_eigendata(2.0 * need).unwrap(), &p, 0.5, &k, 100.3).unwrap();
    assert!(a > 0.0 && (a / b - 1.0).abs() < 0.01, "{a} vs {b}");
}

#[test]
fn torus_density_slope() {
    let k = build_smoothing_kernel(3.0, 6).unwrap();
    let data = torus_eigendata(2, 400.0 + k.effective_width() + 1.0).unwrap();
    let p = tube_point(Geometry::Torus { m: 2 }, &[0.0, 0.0], &[0.6, 0.8], 0.5).unwrap();
    let grid: Vec<f64> = (0..=30).map(|i| 100.0 + 10.0 * i as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&l| smoothed_density(&data, &p, 0.5, &k, l).unwrap()).collect();
    let fit = fit_power_law(&grid, &vals).unwrap();
    assert!((fit.exponent - 0.5).abs() < 0.05, "{}", fit.exponent);
}

#[test]
fn sphere_equator_coefficient_is_stable() {
    let k = build_smoothing_kernel(3.0, 6).unwrap();
    let cal = calibrate_on_circle(&k, 1, 100.0, 0.5).unwrap();
    let data = sphere_eigendata((200.0 + k.effective_width()) as usize + 2).unwrap();
    let p = tube_point(Geometry::Sphere, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 0.5).unwrap();
    let g1 = period_coefficient_extract(&data, &p, 0.5, &k, 1, TAU, 100.0, cal).unwrap().norm();
    let g2 = period_coefficient_extract(&data, &p, 0.5, &k, 1, TAU, 200.0, cal).unwrap().norm();
    assert!(g1 > 1e-3, "{g1}");
    assert!((g2 / g1 - 1.0).abs() < 0.1, "{g1} vs {g2}");
}

#[test]
fn torus_two_term_residual_is_bounded() {
    let data = torus_eigendata(2, 300.0).unwrap();
    let tau = 0.5;
    let p = tube_point(Geometry::Torus { m: 2 }, &[0.0, 0.0], &[-1.0, 0.0], tau).unwrap();
    let grid: Vec<f64> = (0..200).map(|i| 50.0 + 250.0 * (i as f64 + 0.37) / 200.0).collect();
    let q = |l: f64| flat_torus_q(&[1, 0], tau, l, 2, 4000);
    let r = two_term_residual(&data, &p, tau, &q, &grid).unwrap();
    println!("c = {}, sup |r|·λ = {}", r.c, r.scaled_sup);
    assert!(r.c > 0.0 && r.scaled_sup.is_finite());
    // the constant is not pinned; it must not grow across the window
    let half =
        |lo: f64, hi: f64| r.samples.iter().filter(|s| s.0 >= lo && s.0 < hi).map(|s| (s.3 * s.0).abs()).fold(0.0, f64::max);
    let (a, b) = (half(50.0, 175.0), half(175.0, 300.0));
    assert!(b <= 1.5 * a, "{a} then {b}");
}
