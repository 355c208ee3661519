//! Closed-form extremal values on the unit disc.

use num_complex::Complex64;

use crate::domain::{PlaneDomain, PoleSet, POLE_SEPARATION};
use crate::error::{Error, Result};
use crate::expr::{Certificate, DiscExpr, EvalResult};
use crate::kernel::moebius;

fn require_disc(a: &PoleSet) -> Result<()> {
    if a.domain() != PlaneDomain::UnitDisc {
        return Err(Error::InvalidPoleSet("expected poles in the unit disc".into()));
    }
    Ok(())
}

/// Image of `a` under the automorphism exchanging `z` and 0, with exact hits snapped to 0.
fn node(z: Complex64, a: Complex64) -> Complex64 {
    if (a - z).norm() <= POLE_SEPARATION {
        Complex64::new(0.0, 0.0)
    } else {
        moebius(z, a)
    }
}

/// `prod_a |moebius(a, z)|`, certified by `moebius(z, .)` hitting each pole once.
pub fn lempert_disc(a: &PoleSet, z: Complex64) -> Result<EvalResult> {
    require_disc(a)?;
    PlaneDomain::UnitDisc.require_interior(z)?;
    let nodes: Vec<Complex64> = a.points().iter().map(|&p| node(z, p)).collect();
    Ok(EvalResult {
        value: nodes.iter().map(|n| n.norm()).product(),
        certificate: Certificate {
            map: DiscExpr::Moebius(z),
            nodes,
        },
    })
}

/// `|moebius(a, z)|` for every `n`; the certificate `moebius(z, .) . power(n)` hits `a` at `n` points.
pub fn lempert_disc_n(a: Complex64, z: Complex64, n: usize) -> Result<EvalResult> {
    if n == 0 {
        return Err(Error::InvalidParameter("multiplicity must be positive".into()));
    }
    PlaneDomain::UnitDisc.require_interior(a)?;
    PlaneDomain::UnitDisc.require_interior(z)?;
    let target = node(z, a);
    let value = target.norm();
    if n == 1 {
        return Ok(EvalResult {
            value,
            certificate: Certificate {
                map: DiscExpr::Moebius(z),
                nodes: vec![target],
            },
        });
    }
    let radius = value.powf(1.0 / n as f64);
    let nodes = (0..n)
        .map(|j| Complex64::from_polar(radius, (target.arg() + std::f64::consts::TAU * j as f64) / n as f64))
        .collect();
    Ok(EvalResult {
        value,
        certificate: Certificate {
            map: DiscExpr::compose(DiscExpr::Moebius(z), DiscExpr::Power(n as u32)),
            nodes,
        },
    })
}

/// Green function with poles `a`; equal to the Lempert function on the disc.
pub fn green_disc(a: &PoleSet, z: Complex64) -> Result<f64> {
    Ok(lempert_disc(a, z)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poles(p: &[Complex64]) -> PoleSet {
        PoleSet::new(PlaneDomain::UnitDisc, p.to_vec()).unwrap()
    }

    #[test]
    fn examples() {
        let z0 = c(0.0, 0.0);
        assert!((lempert_disc(&poles(&[c(0.3, 0.4)]), z0).unwrap().value - 0.5).abs() < 1e-15);
        assert!((lempert_disc(&poles(&[c(0.5, 0.0), c(0.0, 0.5)]), z0).unwrap().value - 0.25).abs() < 1e-15);
        assert!((green_disc(&poles(&[c(0.5, 0.0), c(-0.5, 0.0)]), z0).unwrap() - 0.25).abs() < 1e-15);
        let hit = lempert_disc(&poles(&[c(0.5, 0.0), c(0.2, 0.1)]), c(0.2, 0.1)).unwrap();
        assert_eq!(hit.value, 0.0);
        assert!(hit.certificate.nodes.contains(&z0));
    }

    #[test]
    fn multiplicity_does_not_matter() {
        let r = lempert_disc_n(c(0.5, 0.0), c(0.0, 0.0), 7).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        assert_eq!(r.certificate.nodes.len(), 7);
        let p: f64 = r.certificate.nodes.iter().map(|n| n.norm()).product();
        assert!((p - 0.5).abs() < 1e-14);
        for n in &r.certificate.nodes {
            assert!((r.certificate.map.eval(*n) - c(0.5, 0.0)).norm() < 1e-12);
        }
        assert_eq!(lempert_disc_n(c(0.2, 0.2), c(0.2, 0.2), 3).unwrap().value, 0.0);
        assert!(lempert_disc_n(c(0.2, 0.2), c(0.0, 0.0), 0).is_err());
    }

    fn disc_point() -> impl Strategy<Value = Complex64> {
        (0.0..0.95f64, -std::f64::consts::PI..std::f64::consts::PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
    }

    proptest! {
        #[test]
        fn certificate_reproduces_poles(pts in prop::collection::vec(disc_point(), 1..6), z in disc_point()) {
            let Ok(a) = PoleSet::new(PlaneDomain::UnitDisc, pts) else { return Ok(()); };
            let r = lempert_disc(&a, z).unwrap();
            let p: f64 = r.certificate.nodes.iter().map(|n| n.norm()).product();
            prop_assert!((p - r.value).abs() < 1e-12);
            for (n, pole) in r.certificate.nodes.iter().zip(a.points()) {
                prop_assert!((r.certificate.map.eval(*n) - pole).norm() < 1e-11);
            }
            prop_assert!((r.certificate.map.eval(c(0.0, 0.0)) - z).norm() < 1e-15);
        }

        #[test]
        fn monotone_in_pole_set(pts in prop::collection::vec(disc_point(), 2..6), z in disc_point()) {
            let Ok(big) = PoleSet::new(PlaneDomain::UnitDisc, pts.clone()) else { return Ok(()); };
            let small = PoleSet::new(PlaneDomain::UnitDisc, pts[..1].to_vec()).unwrap();
            prop_assert!(lempert_disc(&big, z).unwrap().value <= lempert_disc(&small, z).unwrap().value);
        }

        #[test]
        fn moebius_invariant(pts in prop::collection::vec(disc_point(), 1..5), z in disc_point(), m in disc_point()) {
            let Ok(a) = PoleSet::new(PlaneDomain::UnitDisc, pts.clone()) else { return Ok(()); };
            let moved: Vec<_> = pts.iter().map(|&p| moebius(m, p)).collect();
            let Ok(b) = PoleSet::new(PlaneDomain::UnitDisc, moved) else { return Ok(()); };
            let v1 = lempert_disc(&a, z).unwrap().value;
            let v2 = lempert_disc(&b, moebius(m, z)).unwrap().value;
            prop_assert!((v1 - v2).abs() < 1e-12);
        }
    }
}
