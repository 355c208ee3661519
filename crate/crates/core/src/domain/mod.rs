//! Plane domains covered by the disc and finite pole sets inside them.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MIN_ANNULUS_RADIUS: f64 = 1e-6;
pub const MAX_ANNULUS_RADIUS: f64 = 1.0 - 1e-6;
pub const MAX_POLES: usize = 64;
/// Poles closer than this count as one pole.
pub const POLE_SEPARATION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlaneDomain {
    UnitDisc,
    PuncturedDisc,
    /// `{R < |z| < 1}`.
    Annulus {
        inner: f64,
    },
}

impl PlaneDomain {
    pub fn annulus(inner: f64) -> Result<Self> {
        if !(MIN_ANNULUS_RADIUS..=MAX_ANNULUS_RADIUS).contains(&inner) {
            return Err(Error::InvalidParameter(format!(
                "annulus inner radius {inner} must lie in [{MIN_ANNULUS_RADIUS}, {MAX_ANNULUS_RADIUS}]"
            )));
        }
        Ok(Self::Annulus { inner })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        if !(r < 1.0) {
            return false;
        }
        match *self {
            Self::UnitDisc => true,
            Self::PuncturedDisc => r > 0.0,
            Self::Annulus { inner } => r > inner,
        }
    }

    pub fn require_interior(&self, z: Complex64) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::NotInterior {
                point: z,
                domain: self.to_string(),
            })
        }
    }

    pub fn is_simply_connected(&self) -> bool {
        matches!(self, Self::UnitDisc)
    }
}

impl fmt::Display for PlaneDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnitDisc => write!(f, "disc"),
            Self::PuncturedDisc => write!(f, "punctured"),
            Self::Annulus { inner } => write!(f, "annulus:{inner}"),
        }
    }
}

impl FromStr for PlaneDomain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "disc" => Ok(Self::UnitDisc),
            "punctured" => Ok(Self::PuncturedDisc),
            other => {
                let r = other
                    .strip_prefix("annulus:")
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown domain '{other}'")))?;
                let inner: f64 = r
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad annulus radius '{r}'")))?;
                Self::annulus(inner)
            }
        }
    }
}

/// Nonempty finite set of distinct interior points of a plane domain.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet {
    domain: PlaneDomain,
    points: Vec<Complex64>,
}

impl PoleSet {
    pub fn new(domain: PlaneDomain, points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidPoleSet("pole set is empty".into()));
        }
        if points.len() > MAX_POLES {
            return Err(Error::InvalidPoleSet(format!(
                "{} poles exceed the cap of {MAX_POLES}",
                points.len()
            )));
        }
        for &p in &points {
            domain.require_interior(p)?;
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if (points[i] - points[j]).norm() <= POLE_SEPARATION {
                    return Err(Error::InvalidPoleSet(format!(
                        "poles {} and {} coincide",
                        points[i], points[j]
                    )));
                }
            }
        }
        Ok(Self { domain, points })
    }

    pub fn domain(&self) -> PlaneDomain {
        self.domain
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn union(&self, other: &PoleSet) -> Result<PoleSet> {
        if self.domain != other.domain {
            return Err(Error::InvalidPoleSet("pole sets live in different domains".into()));
        }
        let mut pts = self.points.clone();
        pts.extend_from_slice(&other.points);
        PoleSet::new(self.domain, pts)
    }

    pub fn is_disjoint(&self, other: &PoleSet) -> bool {
        self.points
            .iter()
            .all(|p| other.points.iter().all(|q| (p - q).norm() > POLE_SEPARATION))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn membership() {
        let a = PlaneDomain::annulus(0.3).unwrap();
        assert!(a.contains(c(0.5, 0.0)));
        assert!(!a.contains(c(0.3, 0.0)));
        assert!(!a.contains(c(0.0, 1.0)));
        assert!(!PlaneDomain::PuncturedDisc.contains(c(0.0, 0.0)));
        assert!(PlaneDomain::UnitDisc.contains(c(0.0, 0.0)));
        assert!(!PlaneDomain::UnitDisc.contains(c(f64::NAN, 0.0)));
    }

    #[test]
    fn annulus_radius_range() {
        assert!(PlaneDomain::annulus(1e-7).is_err());
        assert!(PlaneDomain::annulus(1.0).is_err());
        assert!(PlaneDomain::annulus(1e-6).is_ok());
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["disc", "punctured", "annulus:0.3"] {
            let d: PlaneDomain = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!("annulus:x".parse::<PlaneDomain>().is_err());
        assert!("square".parse::<PlaneDomain>().is_err());
    }

    #[test]
    fn pole_set_validation() {
        let d = PlaneDomain::UnitDisc;
        assert!(PoleSet::new(d, vec![]).is_err());
        assert!(PoleSet::new(d, vec![c(0.1, 0.0), c(0.1, 5e-13)]).is_err());
        assert!(PoleSet::new(d, vec![c(1.0, 0.0)]).is_err());
        assert!(PoleSet::new(d, vec![c(0.0, 0.0); 65]).is_err());
        let a = PoleSet::new(d, vec![c(0.1, 0.0)]).unwrap();
        let b = PoleSet::new(d, vec![c(0.2, 0.0)]).unwrap();
        assert!(a.is_disjoint(&b));
        assert_eq!(a.union(&b).unwrap().len(), 2);
        assert!(a.union(&a).is_err());
    }
}
