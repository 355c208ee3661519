use num_complex::Complex64;

use crate::error::{Error, Result};

/// `(alpha - z) / (1 - conj(alpha) z)`, the involutive disc automorphism swapping `alpha` and 0.
#[inline]
pub fn moebius(alpha: Complex64, z: Complex64) -> Complex64 {
    (alpha - z) / (1.0 - alpha.conj() * z)
}

/// Pseudo-hyperbolic distance `|moebius(a, z)|`.
#[inline]
pub fn pseudo_hyperbolic(a: Complex64, z: Complex64) -> f64 {
    moebius(a, z).norm()
}

/// `1 - |moebius(a, z)|^2`, evaluated without cancellation for points near the circle.
#[inline]
pub fn moebius_defect(a: Complex64, z: Complex64) -> f64 {
    let den = (1.0 - a.conj() * z).norm_sqr();
    (1.0 - a.norm_sqr()) * (1.0 - z.norm_sqr()) / den
}

/// A disc automorphism of the form `moebius(alpha, .)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusTransform {
    alpha: Complex64,
}

impl MoebiusTransform {
    pub fn new(alpha: Complex64) -> Result<Self> {
        if !(alpha.norm() < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Moebius parameter {alpha} must lie in the open unit disc"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        moebius(self.alpha, z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fixes_expected_points() {
        let a = c(0.3, -0.4);
        assert!((moebius(a, Complex64::new(0.0, 0.0)) - a).norm() < 1e-15);
        assert!(moebius(a, a).norm() < 1e-15);
        let z = c(-0.2, 0.7);
        assert!((moebius(Complex64::new(0.0, 0.0), z) + z).norm() < 1e-15);
    }

    #[test]
    fn rejects_boundary_parameter() {
        assert!(MoebiusTransform::new(c(1.0, 0.0)).is_err());
        assert!(MoebiusTransform::new(c(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn defect_is_accurate_near_the_circle() {
        let a = c(0.5, 0.0);
        let z = c(1.0 - 1e-13, 0.0);
        let d = moebius_defect(a, z);
        let exact = 0.75 * (1.0 - z.re * z.re) / (1.0 - 0.5 * z.re).powi(2);
        assert!((d - exact).abs() <= 1e-12 * exact);
    }

    fn disc_point() -> impl Strategy<Value = Complex64> {
        (0.0..0.99f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
    }

    proptest! {
        #[test]
        fn involution(a in disc_point(), z in disc_point()) {
            let back = moebius(a, moebius(a, z));
            prop_assert!((back - z).norm() < 1e-13);
        }

        #[test]
        fn maps_disc_into_disc(a in disc_point(), z in disc_point()) {
            prop_assert!(moebius(a, z).norm() < 1.0 + 1e-15);
            let d = moebius_defect(a, z);
            prop_assert!((d - (1.0 - moebius(a, z).norm_sqr())).abs() < 1e-12);
        }
    }
}
