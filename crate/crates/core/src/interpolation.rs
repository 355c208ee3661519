//! Interpolating self-maps of the disc with prescribed node product, and the product-domain
//! disc built from them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::{DiscExpr, ProductDisc};
use crate::kernel::{solve_node_quadratic, BlaschkeDisc};

/// Bracket scan resolution on `[0, 1)`.
const SCAN_STEP: f64 = 1.0 / 1024.0;
const MAX_BISECTIONS: usize = 200;
/// Accepted distance between the attained and the requested node product.
pub const PRODUCT_TOL: f64 = 1e-11;
/// Starting parameter of the map `z * moebius(alpha, z)` used to move zero targets off 0.
pub const REDUCTION_START: f64 = 0.5;
pub const MAX_TARGETS: usize = 64;

/// Targets `mu` and the requested node product `q` with `prod |mu| < q < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma4Problem {
    mu: Vec<Complex64>,
    q: f64,
}

impl Lemma4Problem {
    pub fn new(mu: Vec<Complex64>, q: f64) -> Result<Self> {
        if mu.is_empty() || mu.len() > MAX_TARGETS {
            return Err(Error::Precondition(format!(
                "between 1 and {MAX_TARGETS} targets required, got {}",
                mu.len()
            )));
        }
        if let Some(m) = mu.iter().find(|m| !(m.norm() < 1.0)) {
            return Err(Error::Precondition(format!("target {m} is not in the open unit disc")));
        }
        let p = modulus_product(&mu);
        if !(q > p && q < 1.0) {
            return Err(Error::Precondition(format!("q = {q} must lie in ({p}, 1)")));
        }
        Ok(Self { mu, q })
    }

    pub fn mu(&self) -> &[Complex64] {
        &self.mu
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

fn modulus_product(z: &[Complex64]) -> f64 {
    z.iter().map(|m| m.norm()).product()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Small,
    Large,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma4Solution {
    pub a: f64,
    pub branch: Branch,
    /// Nodes with `map(eta[j]) = mu[j]`.
    pub eta: Vec<Complex64>,
    /// A self-map of the disc fixing 0.
    pub map: DiscExpr,
    /// Parameter of the outer map `z * moebius(alpha, z)` when zero targets were present.
    pub reduction: Option<f64>,
}

impl Lemma4Solution {
    pub fn node_product(&self) -> f64 {
        modulus_product(&self.eta)
    }

    /// Largest `|map(eta_j) - mu_j|`, together with `|map(0)|`.
    pub fn residual(&self, mu: &[Complex64]) -> f64 {
        self.eta
            .iter()
            .zip(mu)
            .map(|(&e, &m)| (self.map.eval(e) - m).norm())
            .fold(self.map.eval(Complex64::new(0.0, 0.0)).norm(), f64::max)
    }
}

/// `z * moebius(a, z)` as a Blaschke product.
pub fn node_map(a: f64) -> BlaschkeDisc {
    BlaschkeDisc::new(
        std::f64::consts::PI,
        vec![Complex64::new(0.0, 0.0), Complex64::new(a, 0.0)],
    )
    .expect("a lies in [0, 1)")
}

/// Products of the small and of the large roots of `z * moebius(a, z) = mu_j`.
pub fn curves_gh(mu: &[Complex64], a: f64) -> Result<(f64, f64)> {
    if mu.iter().any(|m| m.norm() == 0.0) {
        return Err(Error::Precondition("targets must be nonzero".into()));
    }
    let mut g = 1.0;
    let mut h = 1.0;
    for &m in mu {
        let r = solve_node_quadratic(a, m)?;
        g *= r.small.norm();
        h *= r.large.norm();
    }
    Ok((g, h))
}

pub fn lemma4_solve(problem: &Lemma4Problem) -> Result<Lemma4Solution> {
    if problem.mu.iter().all(|m| m.norm() > 0.0) {
        return solve_nonzero(&problem.mu, problem.q);
    }
    // Move zero targets to alpha through z * moebius(alpha, z); nonzero ones are pulled back along
    // the small root. Shrinking alpha drives the new product to 0, below any q.
    let mut alpha = REDUCTION_START;
    for _ in 0..64 {
        let lifted = problem
            .mu
            .iter()
            .map(|&m| {
                if m.norm() == 0.0 {
                    Ok(Complex64::new(alpha, 0.0))
                } else {
                    Ok(solve_node_quadratic(alpha, m)?.small)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if modulus_product(&lifted) < problem.q * (1.0 - 1e-6) {
            let inner = solve_nonzero(&lifted, problem.q)?;
            return Ok(Lemma4Solution {
                map: DiscExpr::compose(DiscExpr::Blaschke(node_map(alpha)), inner.map),
                reduction: Some(alpha),
                ..inner
            });
        }
        alpha *= 0.5;
    }
    Err(Error::Numerical(
        "zero-target reduction did not lower the node product below q".into(),
    ))
}

fn solve_nonzero(mu: &[Complex64], q: f64) -> Result<Lemma4Solution> {
    let p = modulus_product(mu);
    if !(q > p && q < 1.0) {
        return Err(Error::Precondition(format!("q = {q} must lie in ({p}, 1)")));
    }
    let branch = if q <= p.sqrt() { Branch::Small } else { Branch::Large };
    // Positive at a = 0, nonpositive once the chosen curve has passed q.
    let excess = |a: f64| -> Result<f64> {
        let (g, h) = curves_gh(mu, a)?;
        Ok(match branch {
            Branch::Small => g - q,
            Branch::Large => q - h,
        })
    };
    let a = if excess(0.0)? <= 0.0 {
        0.0
    } else {
        let grid = (1..1024)
            .map(|i| i as f64 * SCAN_STEP)
            .chain((11..=52).map(|m| 1.0 - 2f64.powi(-m)));
        let mut lo = 0.0;
        let mut bracket = None;
        let mut closest = (f64::INFINITY, 0.0);
        for a in grid {
            let e = excess(a)?;
            if e.abs() < closest.0 {
                closest = (e.abs(), a);
            }
            if e <= 0.0 {
                bracket = Some((lo, a));
                break;
            }
            lo = a;
        }
        match bracket {
            Some((mut lo, mut hi)) => {
                for _ in 0..MAX_BISECTIONS {
                    let mid = 0.5 * (lo + hi);
                    if !(mid > lo && mid < hi) {
                        break;
                    }
                    if excess(mid)? > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                if excess(lo)?.abs() <= excess(hi)?.abs() {
                    lo
                } else {
                    hi
                }
            }
            None if closest.0 <= PRODUCT_TOL => closest.1,
            None => {
                return Err(Error::NoBracket(format!(
                    "node product never reached q = {q}; closest miss {:e} at a = {}",
                    closest.0, closest.1
                )))
            }
        }
    };
    let residual = excess(a)?.abs();
    if residual > PRODUCT_TOL {
        return Err(Error::Numerical(format!("node product misses q = {q} by {residual:e}")));
    }
    let eta = mu
        .iter()
        .map(|&m| {
            let r = solve_node_quadratic(a, m)?;
            Ok(match branch {
                Branch::Small => r.small,
                Branch::Large => r.large,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Lemma4Solution {
        a,
        branch,
        eta,
        map: DiscExpr::Blaschke(node_map(a)),
        reduction: None,
    })
}

/// Disc into a product domain through `(z, w)` at 0 and through `(a_j, b)` at every `eta_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductCertificate {
    pub disc: ProductDisc,
    pub eta: Vec<Complex64>,
    /// `prod |eta_j|`, an upper bound for the product-domain Lempert function.
    pub bound: f64,
    pub lemma: Lemma4Solution,
}

impl ProductCertificate {
    /// Largest deviation of the disc from `(z, w)` at 0 and from `(a_j, b)` at the nodes.
    pub fn residual(&self, z: Complex64, w: Complex64, poles: &[Complex64], b: Complex64) -> f64 {
        let (x0, y0) = self.disc.eval(Complex64::new(0.0, 0.0));
        self.eta
            .iter()
            .zip(poles)
            .map(|(&e, &a)| {
                let (x, y) = self.disc.eval(e);
                (x - a).norm().max((y - b).norm())
            })
            .fold((x0 - z).norm().max((y0 - w).norm()), f64::max)
    }
}

/// Given `phi` hitting the poles at `lambda` and `psi` with `psi(zeta) = b`, builds
/// `(phi . f, psi((zeta / alpha) moebius(alpha, B)))` where `f` solves the interpolation problem
/// `lambda` with node product `alpha` and `B` is the normalized Blaschke product on its nodes.
pub fn theorem5_certificate(
    phi: &DiscExpr,
    lambda: &[Complex64],
    psi: &DiscExpr,
    zeta: Complex64,
    alpha: f64,
) -> Result<ProductCertificate> {
    let floor = modulus_product(lambda).max(zeta.norm());
    if !(alpha < 1.0 && alpha > floor) {
        return Err(Error::Precondition(format!("alpha = {alpha} must lie in ({floor}, 1)")));
    }
    let lemma = lemma4_solve(&Lemma4Problem::new(lambda.to_vec(), alpha)?)?;
    let blaschke = BlaschkeDisc::normalized_from_zeros(lemma.eta.clone())?;
    // The attained product, so that the Moebius factor vanishes exactly at B(0).
    let bound = lemma.node_product();
    let second = DiscExpr::chain([
        psi.clone(),
        DiscExpr::Scale(zeta / bound),
        DiscExpr::Moebius(Complex64::new(bound, 0.0)),
        DiscExpr::Blaschke(blaschke),
    ]);
    Ok(ProductCertificate {
        disc: ProductDisc {
            first: DiscExpr::compose(phi.clone(), lemma.map.clone()),
            second,
        },
        eta: lemma.eta.clone(),
        bound,
        lemma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn anchors_at_zero_parameter() {
        let mu = [c(0.3, 0.1), c(-0.5, 0.2), c(0.0, 0.7)];
        let p = modulus_product(&mu);
        let (g, h) = curves_gh(&mu, 0.0).unwrap();
        assert!((g - p.sqrt()).abs() < 1e-12 && (h - p.sqrt()).abs() < 1e-12);
        let (g, h) = curves_gh(&mu, 1.0 - 1e-6).unwrap();
        assert!((g - p).abs() < 1e-3 && (h - 1.0).abs() < 1e-3);
    }

    #[test]
    fn square_root_target_needs_no_search() {
        let mu = vec![c(0.3, 0.1), c(-0.5, 0.2)];
        let q = modulus_product(&mu).sqrt();
        let s = lemma4_solve(&Lemma4Problem::new(mu.clone(), q).unwrap()).unwrap();
        assert_eq!(s.a, 0.0);
        for (e, m) in s.eta.iter().zip(&mu) {
            assert!((e.norm() - m.norm().sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn worked_instance() {
        let mu = vec![c(0.3, 0.0), c(0.0, 0.4)];
        let s = lemma4_solve(&Lemma4Problem::new(mu.clone(), 0.9).unwrap()).unwrap();
        assert_eq!(s.branch, Branch::Large);
        assert!(s.residual(&mu) <= 1e-9);
        assert!((s.node_product() - 0.9).abs() <= 1e-9);
    }

    #[test]
    fn worked_instance_parameter_matches_fine_scan() {
        // Independent check: scan h on a fine grid for the first crossing of 0.9.
        let mu = vec![c(0.3, 0.0), c(0.0, 0.4)];
        let s = lemma4_solve(&Lemma4Problem::new(mu.clone(), 0.9).unwrap()).unwrap();
        let n = 1_000_000;
        let crossing = (0..n)
            .map(|i| i as f64 / n as f64)
            .find(|&a| curves_gh(&mu, a).unwrap().1 >= 0.9)
            .unwrap();
        assert!((crossing - s.a).abs() <= 1.0 / n as f64);
    }

    #[test]
    fn zero_targets_are_reduced() {
        let mu = vec![c(0.0, 0.0), c(0.6, -0.2), c(0.1, 0.3)];
        for q in [0.01, 0.5, 0.97] {
            let s = lemma4_solve(&Lemma4Problem::new(mu.clone(), q).unwrap()).unwrap();
            assert!(s.reduction.is_some());
            assert!(s.residual(&mu) <= 1e-9, "q = {q}: {}", s.residual(&mu));
            assert!((s.node_product() - q).abs() <= 1e-9);
        }
    }

    #[test]
    fn precondition_checks() {
        assert!(Lemma4Problem::new(vec![c(0.5, 0.0)], 0.4).is_err());
        assert!(Lemma4Problem::new(vec![c(0.5, 0.0)], 1.0).is_err());
        assert!(Lemma4Problem::new(vec![], 0.4).is_err());
        assert!(Lemma4Problem::new(vec![c(1.0, 0.0)], 0.4).is_err());
        assert!(curves_gh(&[c(0.0, 0.0)], 0.5).is_err());
    }

    #[test]
    fn deterministic() {
        let mu = vec![c(0.2, 0.3), c(-0.6, 0.1)];
        let p = Lemma4Problem::new(mu, 0.7).unwrap();
        assert_eq!(lemma4_solve(&p).unwrap(), lemma4_solve(&p).unwrap());
    }

    #[test]
    fn certificate_hits_poles() {
        let z = c(0.1, 0.2);
        let w = c(-0.3, 0.1);
        let poles = [c(0.5, 0.1), c(-0.2, -0.6)];
        let b = c(0.4, 0.4);
        let phi = DiscExpr::Moebius(z);
        let lambda: Vec<_> = poles.iter().map(|&a| crate::kernel::moebius(z, a)).collect();
        let psi = DiscExpr::Moebius(w);
        let zeta = crate::kernel::moebius(w, b);
        let floor = modulus_product(&lambda).max(zeta.norm());
        let mut prev = f64::INFINITY;
        for slack in [1e-2, 1e-4, 1e-6] {
            let cert = theorem5_certificate(&phi, &lambda, &psi, zeta, floor + slack).unwrap();
            assert!(cert.residual(z, w, &poles, b) <= 1e-9);
            assert!((cert.bound - (floor + slack)).abs() <= 1e-9);
            assert!(cert.bound < prev);
            prev = cert.bound;
        }
        assert!(theorem5_certificate(&phi, &lambda, &psi, zeta, floor).is_err());
    }

    fn mu_strategy() -> impl Strategy<Value = Complex64> {
        (0.05..0.95f64, -std::f64::consts::PI..std::f64::consts::PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
    }

    proptest! {
        #[test]
        fn vieta_on_the_curves(mu in prop::collection::vec(mu_strategy(), 1..7), a in 0.0..0.999f64) {
            let (g, h) = curves_gh(&mu, a).unwrap();
            prop_assert!((g * h - modulus_product(&mu)).abs() <= 1e-12);
            prop_assert!(g <= modulus_product(&mu).sqrt() + 1e-13);
        }

        #[test]
        fn g_has_no_jumps(mu in prop::collection::vec(mu_strategy(), 1..7), i in 0usize..4000) {
            let a = i as f64 / 4096.0;
            let (g0, _) = curves_gh(&mu, a).unwrap();
            let (g1, _) = curves_gh(&mu, a + 1.0 / 4096.0).unwrap();
            prop_assert!((g0 - g1).abs() <= 1e-2 * mu.len() as f64);
        }

        #[test]
        fn solves_random_instances(mu in prop::collection::vec(mu_strategy(), 1..7), t in 0.001..0.999f64) {
            let p = modulus_product(&mu);
            let q = p + t * (1.0 - p);
            let s = lemma4_solve(&Lemma4Problem::new(mu.clone(), q).unwrap()).unwrap();
            prop_assert!(s.residual(&mu) <= 1e-9);
            prop_assert!((s.node_product() - q).abs() <= 1e-9);
        }
    }
}
