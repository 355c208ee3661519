//! Holomorphic maps out of the unit disc, built from a few closed-form primitives.

use std::fmt;

use num_complex::Complex64;

use crate::cover::CoverMap;
use crate::kernel::{moebius, BlaschkeDisc};

#[derive(Debug, Clone, PartialEq)]
pub enum DiscExpr {
    Identity,
    /// `exp(i theta) * z`.
    Rotation(f64),
    /// `moebius(alpha, z)`.
    Moebius(Complex64),
    Blaschke(BlaschkeDisc),
    /// The normalized universal cover `pi_z` of a plane domain.
    Cover(CoverMap),
    /// `c * z`.
    Scale(Complex64),
    /// `z^n`.
    Power(u32),
    /// `outer(inner(z))`.
    Compose(Box<DiscExpr>, Box<DiscExpr>),
}

impl DiscExpr {
    pub fn compose(outer: DiscExpr, inner: DiscExpr) -> DiscExpr {
        match (outer, inner) {
            (DiscExpr::Identity, e) | (e, DiscExpr::Identity) => e,
            (o, i) => DiscExpr::Compose(Box::new(o), Box::new(i)),
        }
    }

    /// Composes a chain given outermost first.
    pub fn chain(parts: impl IntoIterator<Item = DiscExpr>) -> DiscExpr {
        let parts: Vec<DiscExpr> = parts.into_iter().collect();
        parts
            .into_iter()
            .rev()
            .fold(DiscExpr::Identity, |inner, outer| DiscExpr::compose(outer, inner))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            DiscExpr::Identity => z,
            DiscExpr::Rotation(t) => Complex64::from_polar(1.0, *t) * z,
            DiscExpr::Moebius(a) => moebius(*a, z),
            DiscExpr::Blaschke(b) => b.eval(z),
            DiscExpr::Cover(c) => c.apply(z),
            DiscExpr::Scale(c) => c * z,
            DiscExpr::Power(n) => z.powu(*n),
            DiscExpr::Compose(o, i) => o.eval(i.eval(z)),
        }
    }
}

impl fmt::Display for DiscExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscExpr::Identity => write!(f, "id"),
            DiscExpr::Rotation(t) => write!(f, "rotation({t})"),
            DiscExpr::Moebius(a) => write!(f, "moebius({a})"),
            DiscExpr::Blaschke(b) => {
                write!(f, "blaschke(phase={}, zeros=[", b.phase())?;
                for (i, z) in b.zeros().iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{z}")?;
                }
                write!(f, "])")
            }
            DiscExpr::Cover(c) => write!(
                f,
                "cover({}, base={}, base_lift={})",
                c.domain(),
                c.base(),
                c.base_lift()
            ),
            DiscExpr::Scale(c) => write!(f, "scale({c})"),
            DiscExpr::Power(n) => write!(f, "power({n})"),
            DiscExpr::Compose(o, i) => write!(f, "{o} . {i}"),
        }
    }
}

/// A map of the disc into a product of two plane domains.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductDisc {
    pub first: DiscExpr,
    pub second: DiscExpr,
}

impl ProductDisc {
    pub fn eval(&self, z: Complex64) -> (Complex64, Complex64) {
        (self.first.eval(z), self.second.eval(z))
    }
}

impl fmt::Display for ProductDisc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.first, self.second)
    }
}

/// A disc map together with points of the disc where it hits the poles of interest.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub map: DiscExpr,
    pub nodes: Vec<Complex64>,
}

/// Value of an extremal problem together with the disc realizing it.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub certificate: Certificate,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn chain_applies_innermost_first() {
        let e = DiscExpr::chain([
            DiscExpr::Scale(c(2.0, 0.0)),
            DiscExpr::Rotation(std::f64::consts::FRAC_PI_2),
        ]);
        assert!((e.eval(c(0.25, 0.0)) - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn identity_is_dropped() {
        let e = DiscExpr::compose(DiscExpr::Identity, DiscExpr::Power(2));
        assert_eq!(e, DiscExpr::Power(2));
        assert_eq!(DiscExpr::chain([]), DiscExpr::Identity);
    }

    #[test]
    fn display_nests() {
        let e = DiscExpr::compose(DiscExpr::Moebius(c(0.5, 0.0)), DiscExpr::Power(3));
        assert_eq!(e.to_string(), "moebius(0.5+0i) . power(3)");
    }
}
