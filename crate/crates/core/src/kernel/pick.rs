use num_complex::Complex64;

use super::hermitian::{hermitian_eigenvalues, min_eigenvalue_in_place};
use crate::error::{Error, Result};

/// Minimum eigenvalue a Pick matrix may have and still count as positive semidefinite.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Nodes closer than this are treated as the same node.
pub const NODE_SEPARATION: f64 = 1e-14;

/// Interpolation data `nodes[i] -> targets[i]` for holomorphic self-maps of the disc.
#[derive(Debug, Clone, PartialEq)]
pub struct PickProblem {
    nodes: Vec<Complex64>,
    targets: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PickVerdict {
    pub feasible: bool,
    pub min_eigenvalue: f64,
}

impl PickProblem {
    pub fn new(nodes: Vec<Complex64>, targets: Vec<Complex64>) -> Result<Self> {
        if nodes.len() != targets.len() || nodes.is_empty() {
            return Err(Error::InvalidParameter(
                "Pick data needs equally many nodes and targets, at least one".into(),
            ));
        }
        if nodes.iter().chain(&targets).any(|z| !(z.norm() < 1.0)) {
            return Err(Error::InvalidParameter(
                "Pick nodes and targets must lie in the open unit disc".into(),
            ));
        }
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                if (nodes[i] - nodes[j]).norm() <= NODE_SEPARATION {
                    return Err(Error::CoincidentNodes);
                }
            }
        }
        Ok(Self { nodes, targets })
    }

    /// Prepends the normalization `0 -> 0`.
    pub fn with_origin(nodes: &[Complex64], targets: &[Complex64]) -> Result<Self> {
        let zero = Complex64::new(0.0, 0.0);
        let n = std::iter::once(zero).chain(nodes.iter().copied()).collect();
        let t = std::iter::once(zero).chain(targets.iter().copied()).collect();
        Self::new(n, t)
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn targets(&self) -> &[Complex64] {
        &self.targets
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    /// Row-major `[(1 - w_i conj(w_j)) / (1 - l_i conj(l_j))]`.
    pub fn matrix(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut m = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                m.push(pick_entry(
                    self.nodes[i],
                    self.nodes[j],
                    self.targets[i],
                    self.targets[j],
                ));
            }
        }
        m
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix(), self.dim())
    }
}

#[inline]
pub fn pick_entry(li: Complex64, lj: Complex64, wi: Complex64, wj: Complex64) -> Complex64 {
    (1.0 - wi * wj.conj()) / (1.0 - li * lj.conj())
}

pub fn pick_feasible(problem: &PickProblem) -> PickVerdict {
    let mut m = problem.matrix();
    let min_eigenvalue = min_eigenvalue_in_place(&mut m, problem.dim());
    PickVerdict {
        feasible: min_eigenvalue >= -FEASIBILITY_TOL,
        min_eigenvalue,
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
    fn identity_case() {
        let p = PickProblem::new(vec![c(0.0, 0.0)], vec![c(0.0, 0.0)]).unwrap();
        let v = pick_feasible(&p);
        assert!(v.feasible);
        assert!((v.min_eigenvalue - 1.0).abs() < 1e-15);
    }

    #[test]
    fn schwarz_lemma_boundary() {
        let ok = PickProblem::with_origin(&[c(0.5, 0.0)], &[c(0.0, 0.45)]).unwrap();
        assert!(pick_feasible(&ok).feasible);
        let tight = PickProblem::with_origin(&[c(0.5, 0.0)], &[c(0.0, 0.5)]).unwrap();
        let v = pick_feasible(&tight);
        assert!(v.feasible && v.min_eigenvalue.abs() < 1e-14);
        let bad = PickProblem::with_origin(&[c(0.5, 0.0)], &[c(0.9, 0.0)]).unwrap();
        let v = pick_feasible(&bad);
        assert!(!v.feasible && v.min_eigenvalue < 0.0);
    }

    #[test]
    fn coincident_nodes_rejected() {
        let err = PickProblem::new(vec![c(0.1, 0.0), c(0.1, 0.0)], vec![c(0.0, 0.0), c(0.2, 0.0)]);
        assert_eq!(err.unwrap_err(), Error::CoincidentNodes);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        assert!(PickProblem::new(vec![c(0.1, 0.0)], vec![]).is_err());
    }

    fn disc_point() -> impl Strategy<Value = Complex64> {
        (0.05..0.95f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
    }

    proptest! {
        #[test]
        fn rotation_invariant(nodes in prop::collection::vec(disc_point(), 1..5),
                              targets in prop::collection::vec(disc_point(), 5),
                              s in 0.0..6.3f64, t in 0.0..6.3f64) {
            let targets = &targets[..nodes.len()];
            let Ok(p) = PickProblem::with_origin(&nodes, targets) else { return Ok(()); };
            let rn: Vec<_> = nodes.iter().map(|z| z * Complex64::from_polar(1.0, s)).collect();
            let rt: Vec<_> = targets.iter().map(|z| z * Complex64::from_polar(1.0, t)).collect();
            let q = PickProblem::with_origin(&rn, &rt).unwrap();
            let (a, b) = (pick_feasible(&p).min_eigenvalue, pick_feasible(&q).min_eigenvalue);
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }

        #[test]
        fn blaschke_values_are_feasible(nodes in prop::collection::vec(disc_point(), 1..5), zero in disc_point()) {
            // Targets produced by an actual self-map fixing 0 always pass.
            let f = |z: Complex64| z * crate::kernel::moebius(zero, z);
            let targets: Vec<_> = nodes.iter().map(|&z| f(z)).collect();
            let Ok(p) = PickProblem::with_origin(&nodes, &targets) else { return Ok(()); };
            prop_assert!(pick_feasible(&p).min_eigenvalue >= -1e-10);
        }
    }
}
