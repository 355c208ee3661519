use num_complex::Complex64;

use crate::error::{Error, Result};

/// Roots of `z * moebius(a, z) = mu`, i.e. of `z^2 - a(1+mu) z + mu = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeRoots {
    /// Root with `|small| <= sqrt|mu|`.
    pub small: Complex64,
    /// Root with `|large| >= sqrt|mu|`.
    pub large: Complex64,
}

pub fn solve_node_quadratic(a: f64, mu: Complex64) -> Result<NodeRoots> {
    if !(0.0..1.0).contains(&a) {
        return Err(Error::InvalidParameter(format!("a = {a} must lie in [0, 1)")));
    }
    if !(mu.norm() < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "mu = {mu} must lie in the open unit disc"
        )));
    }
    let b = a * (1.0 + mu);
    let disc = (b * b - 4.0 * mu).sqrt();
    // Pick the sign that avoids cancellation, then recover the other root from the product.
    let (p, m) = (b + disc, b - disc);
    let big = if p.norm_sqr() >= m.norm_sqr() { p } else { m } * 0.5;
    let other = if big.norm_sqr() > 0.0 {
        mu / big
    } else {
        Complex64::new(0.0, 0.0)
    };
    let (mut small, mut large) = if other.norm_sqr() <= big.norm_sqr() {
        (other, big)
    } else {
        (big, other)
    };
    if small.norm() == large.norm() && small != large && !upper_half(small) {
        std::mem::swap(&mut small, &mut large);
    }
    Ok(NodeRoots { small, large })
}

/// Argument in `[0, pi)`, the tie-break for roots of equal modulus.
fn upper_half(z: Complex64) -> bool {
    z.im > 0.0 || (z.im == 0.0 && z.re > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::moebius;
    use proptest::prelude::*;

    #[test]
    fn symmetric_roots_at_zero_parameter() {
        let r = 0.6;
        let roots = solve_node_quadratic(0.0, Complex64::new(-r * r, 0.0)).unwrap();
        assert!((roots.small - Complex64::new(r, 0.0)).norm() < 1e-15);
        assert!((roots.large - Complex64::new(-r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_mu() {
        let roots = solve_node_quadratic(0.5, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(roots.small, Complex64::new(0.0, 0.0));
        assert!((roots.large - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn limits_near_one() {
        let mu = Complex64::new(0.2, -0.3);
        let roots = solve_node_quadratic(1.0 - 1e-6, mu).unwrap();
        assert!((roots.small.norm() - mu.norm()).abs() < 1e-3);
        assert!((roots.large.norm() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(solve_node_quadratic(1.0, Complex64::new(0.1, 0.0)).is_err());
        assert!(solve_node_quadratic(-0.1, Complex64::new(0.1, 0.0)).is_err());
        assert!(solve_node_quadratic(0.5, Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn tiny_mu_keeps_relative_accuracy() {
        let mu = Complex64::new(1e-20, 1e-20);
        let roots = solve_node_quadratic(0.5, mu).unwrap();
        let residual = roots.small * moebius(Complex64::new(0.5, 0.0), roots.small) - mu;
        assert!(residual.norm() < 1e-15 * mu.norm());
    }

    fn mu_strategy() -> impl Strategy<Value = Complex64> {
        (0.0..0.999f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
    }

    proptest! {
        #[test]
        fn roots_solve_and_separate(a in 0.0..0.9999f64, mu in mu_strategy()) {
            let roots = solve_node_quadratic(a, mu).unwrap();
            let s = mu.norm().sqrt();
            prop_assert!(roots.small.norm() <= s + 1e-13);
            prop_assert!(roots.large.norm() >= s - 1e-13);
            prop_assert!(roots.large.norm() < 1.0);
            prop_assert!((roots.small.norm() * roots.large.norm() - mu.norm()).abs() < 1e-13);
            let ac = Complex64::new(a, 0.0);
            for z in [roots.small, roots.large] {
                prop_assert!((z * moebius(ac, z) - mu).norm() < 1e-12);
            }
        }

        #[test]
        fn moduli_continuous_in_a(a in 0.0..0.99f64, mu in mu_strategy()) {
            let h = 1.0 / 4096.0;
            let r0 = solve_node_quadratic(a, mu).unwrap();
            let r1 = solve_node_quadratic(a + h, mu).unwrap();
            prop_assert!((r0.small.norm() - r1.small.norm()).abs() < 0.05);
            prop_assert!((r0.large.norm() - r1.large.norm()).abs() < 0.05);
        }
    }
}
