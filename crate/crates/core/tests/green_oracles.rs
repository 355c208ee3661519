//! Green functions against independent closed forms.

use lempert::plane::{green_plane, lempert_n_plane};
use lempert::{Complex64, PlaneDomain};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Annulus Green function from the reflected-image series
/// `F(z) = log|z - a| - log|1 - conj(a) z| + sum_n [log|1 - R^2n z/a| + log|1 - R^2n a/z|
///         - log|1 - R^2n z conj(a)| - log|1 - R^2n / (z conj(a))|]`,
/// which vanishes on `|z| = 1` and equals `log|a|` on `|z| = R`.
fn annulus_green_series(r: f64, a: Complex64, z: Complex64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    let mut f = (z - a).norm().ln() - (one - a.conj() * z).norm().ln();
    let r2 = r * r;
    let mut q = r2;
    for _ in 0..10_000 {
        let term = (one - q * z / a).norm().ln() + (one - q * a / z).norm().ln()
            - (one - q * z * a.conj()).norm().ln()
            - (one - q / (z * a.conj())).norm().ln();
        f += term;
        if term.abs() < 1e-18 {
            break;
        }
        q *= r2;
    }
    let green = -f + a.norm().ln() / r.ln() * z.norm().ln();
    (-green).exp()
}

fn random_annulus_point(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    let m = r + (1.0 - r) * rng.random_range(0.05..0.95);
    Complex64::from_polar(m, rng.random_range(-PI..PI))
}

#[test]
fn annulus_series_frozen_reference() {
    let a = Complex64::from_polar(0.5, 0.7);
    let z = Complex64::from_polar(0.7, -0.4);
    let oracle = annulus_green_series(0.3, a, z);
    assert!((oracle - 0.9167498186699005).abs() < 1e-14);
    let g = green_plane(PlaneDomain::annulus(0.3).unwrap(), a, z, 1e-14).unwrap();
    assert!((g.value - oracle).abs() < 1e-12);
}

#[test]
fn annulus_matches_image_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &r in &[0.1, 0.3, 0.6, 0.9] {
        let d = PlaneDomain::annulus(r).unwrap();
        for _ in 0..25 {
            let a = random_annulus_point(&mut rng, r);
            let z = random_annulus_point(&mut rng, r);
            let oracle = annulus_green_series(r, a, z);
            let g = green_plane(d, a, z, 1e-13).unwrap();
            assert!(
                (g.value - oracle).abs() <= 1e-9 * oracle,
                "R={r} a={a} z={z}: {} vs {oracle}",
                g.value
            );
        }
    }
}

#[test]
fn punctured_matches_disc() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let a = Complex64::from_polar(rng.random_range(0.02..0.98), rng.random_range(-PI..PI));
        let z = Complex64::from_polar(rng.random_range(0.02..0.98), rng.random_range(-PI..PI));
        let exact = ((a - z) / (Complex64::new(1.0, 0.0) - a.conj() * z)).norm();
        let g = green_plane(PlaneDomain::PuncturedDisc, a, z, 1e-9).unwrap();
        assert!((g.value - exact).abs() <= 1e-9, "{a} {z}: {} vs {exact}", g.value);
        assert!(exact >= g.value * (1.0 - g.tail_bound) && exact <= g.value * (1.0 + g.tail_bound));
    }
}

#[test]
fn partial_products_bracket_green() {
    let d = PlaneDomain::annulus(0.05).unwrap();
    let (a, z) = (Complex64::new(0.3, 0.2), Complex64::new(-0.4, 0.5));
    let g = green_plane(d, a, z, 1e-15).unwrap();
    let mut prev = f64::INFINITY;
    for n in 1..=12 {
        let v = lempert_n_plane(d, a, z, n).unwrap().value;
        assert!(v <= prev && v >= g.value);
        prev = v;
    }
}
