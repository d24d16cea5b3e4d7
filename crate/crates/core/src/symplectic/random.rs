//! Reproducible random symplectic matrices for tests and verification.

use super::{unitary_to_symplectic, SymplecticMap};
use crate::linalg::{from_blocks, CMat, RMat};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

fn gaussian(rng: &mut impl Rng, n: usize, m: usize, scale: f64) -> RMat {
    RMat::from_fn(n, m, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
}

fn symmetric(rng: &mut impl Rng, d: usize, scale: f64) -> RMat {
    let g = gaussian(rng, d, d, scale);
    0.5 * (&g + g.transpose())
}

/// Haar-ish random `d × d` unitary from the QR factorization of a complex
/// Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> CMat {
    let g =
        CMat::from_fn(d, d, |_, _| Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // Fix column phases so the distribution does not depend on QR conventions.
    let phases = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        (0..d).map(|k| {
            let z = r[(k, k)];
            if z.norm() > 0.0 {
                z / z.norm()
            } else {
                Complex64::new(1.0, 0.0)
            }
        }),
    ));
    q * phases
}

/// Random element of `U(d) ∩ Sp(2d)`.
pub fn random_unitary_symplectic(rng: &mut impl Rng, d: usize) -> SymplecticMap {
    SymplecticMap::from_trusted(unitary_to_symplectic(&random_unitary(rng, d)), 1e-10)
}

/// Product of a unitary factor, a lower and an upper shear with symmetric
/// generators, and a block `diag(G, G^{−T})`; `scale` controls the norm.
pub fn random_symplectic(rng: &mut impl Rng, d: usize, scale: f64) -> SymplecticMap {
    let id = RMat::identity(d, d);
    let z = RMat::zeros(d, d);
    let upper = from_blocks(&id, &symmetric(rng, d, scale), &z, &id);
    let lower = from_blocks(&id, &z, &symmetric(rng, d, scale), &id);
    let mut g = &id + gaussian(rng, d, d, 0.3 * scale);
    while g.clone().lu().determinant().abs() < 0.1 {
        g = &id + gaussian(rng, d, d, 0.3 * scale);
    }
    let ginv_t = g.clone().try_inverse().expect("checked invertible").transpose();
    let gl = from_blocks(&g, &z, &z, &ginv_t);
    let u = unitary_to_symplectic(&random_unitary(rng, d));
    SymplecticMap::from_trusted(u * upper * gl * lower, 1e-10)
}

/// `Q · R(α₁) ⊕ … ⊕ R(α_d) · Q⁻¹` with random angles and random `Q`.
pub fn random_elliptic(rng: &mut impl Rng, d: usize, conj_scale: f64) -> SymplecticMap {
    let parts: Vec<_> = (0..d).map(|_| SymplecticMap::rotation(rng.random_range(0.2..(std::f64::consts::TAU - 0.2)))).collect();
    let q = random_symplectic(rng, d, conj_scale);
    q.compose(&SymplecticMap::direct_sum(&parts)).compose(&q.inverse())
}

/// `Q · diag(e^{μ_j}, e^{−μ_j}) · Q⁻¹` with `μ_j ∈ [0.1, 1.5]`.
pub fn random_hyperbolic(rng: &mut impl Rng, d: usize, conj_scale: f64) -> SymplecticMap {
    let parts: Vec<_> = (0..d).map(|_| SymplecticMap::hyperbolic(rng.random_range(0.1..1.5))).collect();
    let q = random_symplectic(rng, d, conj_scale);
    q.compose(&SymplecticMap::direct_sum(&parts)).compose(&q.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_maps_are_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=3 {
            for _ in 0..20 {
                assert!(random_symplectic(&mut rng, d, 1.0).is_symplectic(1e-10));
                assert!(random_unitary_symplectic(&mut rng, d).is_symplectic(1e-12));
                assert!(random_elliptic(&mut rng, d, 0.5).is_symplectic(1e-9));
            }
        }
    }
}
