use grauert::geometries::{
    circle_eigendata, geodesic_flow, sphere_eigendata, sphere_harmonic, torus_eigendata, tube_distance, tube_point, Geometry,
};
use grauert::qfunction::{q_eval, sawtooth, QFunctionSpec, Summation};
use grauert::special::legendre_p;
use grauert::symplectic::random::{random_elliptic, random_hyperbolic, random_symplectic, random_unitary_symplectic};
use grauert::symplectic::{
    matrix_element_blockdet, matrix_element_keyid, matrix_element_magnitude, polar_decompose, power_sequence, SymplecticMap,
};
use grauert::weyl::{jump_at, tempered_sum};
use grauert::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_tangent(theta: f64, phi: f64, psi: f64) -> ([f64; 3], [f64; 3]) {
    let x = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
    let et = [theta.cos() * phi.cos(), theta.cos() * phi.sin(), -theta.sin()];
    let ep = [-phi.sin(), phi.cos(), 0.0];
    let v = [0, 1, 2].map(|i| psi.cos() * et[i] + psi.sin() * ep[i]);
    (x, v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn products_and_inverses_stay_symplectic(seed in any::<u64>(), d in 1usize..=3) {
        let mut r = rng(seed);
        let a = random_symplectic(&mut r, d, 0.5);
        let b = random_symplectic(&mut r, d, 0.5);
        prop_assert!(a.compose(&b).is_symplectic(1e-10), "defect {}", a.compose(&b).defect());
        prop_assert!(a.inverse().is_symplectic(1e-10), "defect {}", a.inverse().defect());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sawtooth_is_periodic_and_bounded(x in -50.0f64..50.0, k in -5i32..5) {
        let s = sawtooth(x);
        prop_assert!((0.0..TAU).contains(&s));
        let t = sawtooth(x + TAU * k as f64);
        // agreement up to wrap-around at the discontinuity
        let d = (s - t).abs();
        prop_assert!(d < 1e-9 || (d - TAU).abs() < 1e-9);
    }

    #[test]
    fn blockdet_agrees_with_keyid(seed in any::<u64>(), d in 1usize..=3, kind in 0u8..3) {
        let mut r = rng(seed);
        let s = match kind {
            0 => random_symplectic(&mut r, d, 0.8),
            1 => random_elliptic(&mut r, d, 0.5),
            _ => random_hyperbolic(&mut r, d, 0.5),
        };
        let b = matrix_element_blockdet(&s).unwrap().value;
        let k = matrix_element_keyid(&s).unwrap().value;
        prop_assert!((b - k).norm() <= 1e-10, "{b} vs {k}");
        prop_assert!((b.norm() - matrix_element_magnitude(&s)).abs() <= 1e-10);
    }

    #[test]
    fn unitary_maps_have_unit_matrix_element(seed in any::<u64>(), d in 1usize..=3) {
        let s = random_unitary_symplectic(&mut rng(seed), d);
        let g = matrix_element_blockdet(&s).unwrap().value;
        prop_assert!((g.norm() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn hyperbolic_elements_decay(mus in prop::collection::vec(0.05f64..2.0, 1..=3)) {
        let d = mus.len();
        let s = SymplecticMap::direct_sum(&mus.iter().map(|&m| SymplecticMap::hyperbolic(m)).collect::<Vec<_>>());
        let seq = power_sequence(&s, 25).unwrap();
        let mu_min = mus.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut prev = 1.0;
        for (i, g) in seq.iter().enumerate() {
            let n = (i + 1) as f64;
            prop_assert!(g.value.im.abs() <= 1e-12 && g.value.re > 0.0);
            prop_assert!(g.value.re < prev);
            prop_assert!(g.value.re <= 2f64.powf(d as f64 / 2.0) * (-n * mu_min / 2.0).exp() * (1.0 + 1e-12));
            prev = g.value.re;
        }
    }

    #[test]
    fn polar_factors_reproduce_the_map(seed in any::<u64>(), d in 1usize..=3) {
        let s = random_symplectic(&mut rng(seed), d, 0.6);
        let (u, p) = polar_decompose(&s).unwrap();
        let back = u.matrix() * p.matrix();
        prop_assert!((back - s.matrix()).amax() <= 1e-10 * (1.0 + s.norm()));
        let mut ev: Vec<f64> = p.matrix().clone().symmetric_eigenvalues().iter().cloned().collect();
        ev.sort_by(f64::total_cmp);
        for i in 0..d {
            prop_assert!((ev[i] * ev[2 * d - 1 - i] - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn hyperbolic_q_is_periodic(mu in 0.2f64..2.0, period in 0.5f64..5.0, lambda in -10.0f64..10.0) {
        let spec = QFunctionSpec::hyperbolic(period, vec![mu]).unwrap();
        let a = q_eval(&spec, lambda).unwrap();
        let b = q_eval(&spec, lambda + TAU / period).unwrap();
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn sphere_tube_points_satisfy_the_tube_constraint(
        theta in 0.05f64..3.09, phi in 0.0f64..TAU, psi in 0.0f64..TAU, tau in 0.01f64..2.0
    ) {
        let (x, v) = unit_tangent(theta, phi, psi);
        let p = tube_point(Geometry::Sphere, &x, &v, tau).unwrap();
        let z = p.zeta();
        let zz: Complex64 = z.iter().map(|w| w * w).sum();
        prop_assert!((zz - 1.0).norm() <= 1e-10);
        prop_assert!((p.complexified_radius().unwrap() - tau).abs() <= 1e-10);
    }

    #[test]
    fn geodesic_flow_is_a_group_action(
        theta in 0.05f64..3.09, phi in 0.0f64..TAU, psi in 0.0f64..TAU, s in -4.0f64..4.0, t in -4.0f64..4.0
    ) {
        let (x, v) = unit_tangent(theta, phi, psi);
        for p in [
            tube_point(Geometry::Sphere, &x, &v, 0.5).unwrap(),
            tube_point(Geometry::Torus { m: 3 }, &x, &v, 0.5).unwrap(),
        ] {
            let a = geodesic_flow(&p, s + t);
            let b = geodesic_flow(&geodesic_flow(&p, s), t);
            prop_assert!(tube_distance(&a, &b) <= 1e-12);
        }
    }

    #[test]
    fn circle_sum_is_monotone(a in 0.0f64..60.0, b in 0.0f64..60.0, tau in 0.1f64..1.5) {
        let data = circle_eigendata(60.0).unwrap();
        let p = tube_point(Geometry::Circle, &[0.7], &[1.0], tau).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(tempered_sum(&data, &p, tau, lo).unwrap() <= tempered_sum(&data, &p, tau, hi).unwrap());
    }

    #[test]
    fn frozen_weights_decrease_in_tau(t1 in 0.05f64..1.5, t2 in 0.05f64..1.5, k0 in 0usize..200) {
        let data = torus_eigendata(2, 12.0).unwrap();
        let p = tube_point(Geometry::Torus { m: 2 }, &[0.1, 0.2], &[0.6, 0.8], 0.5).unwrap();
        let e = &data.entries[k0 % data.len()];
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!(e.tempered_weight(&p, hi).unwrap() <= e.tempered_weight(&p, lo).unwrap());
    }

    #[test]
    fn torus_jumps_are_bit_exact(x in 0.0f64..TAU, y in 0.0f64..TAU, angle in 0.0f64..TAU, j in 1usize..40) {
        let data = torus_eigendata(2, 10.0).unwrap();
        let p = tube_point(Geometry::Torus { m: 2 }, &[x, y], &[angle.cos(), angle.sin()], 0.5).unwrap();
        let ls = data.distinct_eigenvalues();
        let l = ls[j % ls.len()];
        let d = data.half_gap();
        prop_assume!(l + d <= data.cutoff);
        let diff = tempered_sum(&data, &p, 0.5, l + d).unwrap() - tempered_sum(&data, &p, 0.5, l - d).unwrap();
        prop_assert_eq!(jump_at(&data, &p, 0.5, l).unwrap().to_bits(), diff.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn elliptic_q_is_periodic_away_from_jumps(lambda in 0.0f64..1.0, s0 in 0.0f64..TAU) {
        let period = TAU;
        // stay clear of the discontinuities
        let x = (s0 + lambda * period).rem_euclid(TAU);
        prop_assume!(x > 0.3 && x < TAU - 0.3);
        let spec = QFunctionSpec::elliptic(period, s0).unwrap().with_summation(Summation::abel(20_000));
        let a = q_eval(&spec, lambda).unwrap();
        let b = q_eval(&spec, lambda + 1.0).unwrap();
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn addition_theorem_at_real_points(
        n in 0usize..=20, t1 in 0.0f64..PI, p1 in 0.0f64..TAU, t2 in 0.0f64..PI, p2 in 0.0f64..TAU
    ) {
        let (x, _) = unit_tangent(t1, p1, 0.0);
        let (y, _) = unit_tangent(t2, p2, 0.0);
        let zx: Vec<Complex64> = x.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        let zy: Vec<Complex64> = y.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        let lhs: Complex64 = (-(n as i64)..=n as i64).map(|m| sphere_harmonic(n, m, &zx) * sphere_harmonic(n, m, &zy).conj()).sum();
        let c: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let rhs = (2.0 * n as f64 + 1.0) / (4.0 * PI) * legendre_p(n, Complex64::new(c, 0.0)).re;
        prop_assert!((lhs - rhs).norm() <= 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn sphere_jumps_are_bit_exact(theta in 0.05f64..3.09, phi in 0.0f64..TAU, psi in 0.0f64..TAU, n in 1usize..25) {
        let data = sphere_eigendata(25).unwrap();
        let (x, v) = unit_tangent(theta, phi, psi);
        let p = tube_point(Geometry::Sphere, &x, &v, 0.5).unwrap();
        let l = ((n * (n + 1)) as f64).sqrt();
        let d = data.half_gap();
        let diff = tempered_sum(&data, &p, 0.5, l + d).unwrap() - tempered_sum(&data, &p, 0.5, l - d).unwrap();
        prop_assert_eq!(jump_at(&data, &p, 0.5, l).unwrap().to_bits(), diff.to_bits());
    }
}
