use num_complex::Complex64;

use super::moebius::moebius;
use crate::error::{Error, Result};

/// Finite Blaschke product `exp(i phase) * prod_j moebius(z_j, .)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeDisc {
    phase: f64,
    zeros: Vec<Complex64>,
}

impl BlaschkeDisc {
    pub fn new(phase: f64, zeros: Vec<Complex64>) -> Result<Self> {
        if !phase.is_finite() {
            return Err(Error::InvalidParameter("Blaschke phase must be finite".into()));
        }
        if let Some(z) = zeros.iter().find(|z| !(z.norm() < 1.0)) {
            return Err(Error::InvalidParameter(format!(
                "Blaschke zero {z} is not in the open unit disc"
            )));
        }
        Ok(Self { phase, zeros })
    }

    /// Product whose factors are rotated by `conj(z_j)/|z_j|`, so that its value at 0 is `prod |z_j|`.
    pub fn normalized_from_zeros(zeros: Vec<Complex64>) -> Result<Self> {
        let phase = -zeros.iter().filter(|z| z.norm() > 0.0).map(|z| z.arg()).sum::<f64>();
        Self::new(phase, zeros)
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// Valid on the closed disc.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.zeros
            .iter()
            .fold(Complex64::from_polar(1.0, self.phase), |acc, &zj| acc * moebius(zj, z))
    }
}
