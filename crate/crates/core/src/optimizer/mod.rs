//! Upper bounds for Lempert functions of product domains with product pole sets.
//!
//! For a subset `S` of poles `(a_k, b_l)` we look for nodes `z_kl` in the disc such that both
//! coordinate interpolation problems `0 -> 0, z_kl -> a_k` and `0 -> 0, z_kl -> b_l` are solvable
//! by self-maps of the disc (Pick matrices positive semidefinite), and minimize `prod |z_kl|`.

mod simplex;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cover::CoverMap;
use crate::domain::{PlaneDomain, PoleSet};
use crate::error::{Error, Result};
use crate::kernel::hermitian::{cholesky_succeeds_in_place, min_eigenvalue_in_place};
use crate::kernel::{moebius, pick_feasible, PickProblem, FEASIBILITY_TOL};
use simplex::nelder_mead;

/// Largest subset of poles optimized jointly; the Pick matrices then have dimension at most 8.
pub const MAX_SUBSET: usize = 7;
/// Largest Blaschke degree allowed in the disc families used for plane-domain coordinates.
pub const MAX_FAMILY_DEGREE: usize = 6;
/// Nodes closer than this to each other or to the origin are penalized.
pub const COLLISION_DISTANCE: f64 = 1e-8;
/// Nodes are kept inside this radius so Pick matrices stay well conditioned.
pub const MAX_NODE_MODULUS: f64 = 1.0 - 1e-6;
const MAX_DIM: usize = MAX_SUBSET + 1;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerSettings {
    pub restarts: usize,
    pub seed: u64,
    /// Simplex iterations per restart, across all penalty stages.
    pub max_iterations: usize,
    pub penalty_start: f64,
    pub penalty_growth: f64,
    /// Iterations between penalty increases.
    pub penalty_interval: usize,
    /// Simplex diameter at which a stage stops.
    pub tolerance: f64,
    /// Worker threads; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
    /// Largest pole subset considered.
    pub max_subset: usize,
    /// Lifts per pole tried as interpolation targets in plane-domain coordinates.
    pub lift_choices: usize,
    /// Best restarts per subset refined by shape descent at minimal feasible scale.
    pub polish: usize,
    pub polish_rounds: usize,
    /// Simplex iterations per refinement round.
    pub polish_iterations: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            restarts: 200,
            seed: 0,
            max_iterations: 2000,
            penalty_start: 10.0,
            penalty_growth: 10.0,
            penalty_interval: 500,
            tolerance: 1e-9,
            threads: None,
            max_subset: MAX_SUBSET,
            lift_choices: 3,
            polish: 4,
            polish_rounds: 3,
            polish_iterations: 1000,
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(format!("optimizer settings: {m}")));
        if self.restarts == 0 {
            return bad("restarts must be at least 1");
        }
        if self.max_iterations == 0 || self.penalty_interval == 0 {
            return bad("iteration counts must be positive");
        }
        if !(self.penalty_start > 0.0 && self.penalty_growth >= 1.0) {
            return bad("penalty weights must be positive and nondecreasing");
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance must be positive");
        }
        if self.max_subset == 0 || self.max_subset > MAX_SUBSET {
            return bad("subset size must lie in 1..=7");
        }
        if self.lift_choices == 0 {
            return bad("at least one lift choice is required");
        }
        if self.threads == Some(0) {
            return bad("thread count must be positive");
        }
        Ok(())
    }

    /// Runs `f` on a pool with the configured thread count.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            None => Ok(f()),
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map(|pool| pool.install(f))
                .map_err(|e| Error::Numerical(format!("thread pool: {e}"))),
        }
    }
}

/// A feasible node configuration for a subset of poles `(first index, second index)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeConfig {
    pub subset: Vec<(usize, usize)>,
    pub nodes: Vec<Complex64>,
    /// Interpolation targets after moving the base point to the origin.
    pub first_targets: Vec<Complex64>,
    pub second_targets: Vec<Complex64>,
    pub value: f64,
    /// Smallest eigenvalues of the two Pick matrices.
    pub min_eigenvalues: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: NodeConfig,
    pub value: f64,
    pub subsets_optimized: usize,
    pub subsets_pruned: usize,
    pub feasible_restarts: usize,
}

/// One coordinate's interpolation data: for each distinct pole, candidate targets sorted by modulus.
#[derive(Debug, Clone)]
struct Coordinate {
    candidates: Vec<Vec<Complex64>>,
}

impl Coordinate {
    /// Lower bound on the node product when the poles appear with the given multiplicities.
    fn floor(&self, multiplicity: &[usize]) -> f64 {
        self.candidates
            .iter()
            .zip(multiplicity)
            .map(|(c, &m)| c.iter().take(m).map(|t| t.norm()).product::<f64>())
            .product()
    }
}

fn subsets(n_first: usize, n_second: usize, max_size: usize) -> Vec<Vec<(usize, usize)>> {
    let poles: Vec<(usize, usize)> = (0..n_first).flat_map(|k| (0..n_second).map(move |l| (k, l))).collect();
    let mut out = Vec::new();
    for size in 1..=max_size.min(poles.len()) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.iter().map(|&i| poles[i]).collect());
            let mut i = size;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if idx[i] < poles.len() - size + i {
                    idx[i] += 1;
                    for j in (i + 1)..size {
                        idx[j] = idx[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    out
}

/// Smallest eigenvalue of the Pick matrix of `0 -> 0, nodes -> targets`, or `None` when the
/// matrix is positive definite (a Cholesky factorization exists).
fn pick_deficit(nodes: &[Complex64], targets: &[Complex64], exact: bool) -> f64 {
    let n = nodes.len() + 1;
    let mut m = [Complex64::new(0.0, 0.0); MAX_DIM * MAX_DIM];
    let m = &mut m[..n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = if i == 0 || j == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                (1.0 - targets[i - 1] * targets[j - 1].conj()) / (1.0 - nodes[i - 1] * nodes[j - 1].conj())
            };
        }
    }
    if !exact {
        let mut copy = [Complex64::new(0.0, 0.0); MAX_DIM * MAX_DIM];
        copy[..n * n].copy_from_slice(m);
        if cholesky_succeeds_in_place(&mut copy[..n * n], n) {
            return 0.0;
        }
    }
    (-min_eigenvalue_in_place(m, n)).max(0.0)
}

fn unpack(x: &[f64], nodes: &mut [Complex64]) {
    for (j, z) in nodes.iter_mut().enumerate() {
        *z = Complex64::new(x[2 * j], x[2 * j + 1]);
    }
}

fn too_close(nodes: &[Complex64]) -> bool {
    for i in 0..nodes.len() {
        if nodes[i].norm() < COLLISION_DISTANCE {
            return true;
        }
        for j in (i + 1)..nodes.len() {
            if (nodes[i] - nodes[j]).norm() < COLLISION_DISTANCE {
                return true;
            }
        }
    }
    false
}

/// Penalized objective: `sum log|z|` plus weighted Pick eigenvalue deficits.
fn objective(x: &[f64], t1: &[Complex64], t2: &[Complex64], weight: f64) -> f64 {
    let mut nodes = [Complex64::new(0.0, 0.0); MAX_SUBSET];
    let nodes = &mut nodes[..t1.len()];
    unpack(x, nodes);
    let max_mod = nodes.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(max_mod <= MAX_NODE_MODULUS) {
        return 1e6 * (1.0 + max_mod);
    }
    if too_close(nodes) {
        return 1e5;
    }
    let logs: f64 = nodes.iter().map(|z| z.norm().ln()).sum();
    logs + weight * (pick_deficit(nodes, t1, false) + pick_deficit(nodes, t2, false))
}

/// Smallest common outward scaling `s >= 1` making both Pick matrices positive semidefinite.
/// Feasibility is preserved by outward scaling, since `f(s z)` interpolates the scaled data.
fn restore(nodes: &[Complex64], t1: &[Complex64], t2: &[Complex64]) -> Option<Vec<Complex64>> {
    let feasible = |s: f64| {
        let scaled: Vec<Complex64> = nodes.iter().map(|z| z * s).collect();
        !too_close(&scaled) && pick_deficit(&scaled, t1, true) == 0.0 && pick_deficit(&scaled, t2, true) == 0.0
    };
    let max_mod = nodes.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(max_mod <= MAX_NODE_MODULUS) {
        return None;
    }
    if feasible(1.0) {
        return Some(nodes.to_vec());
    }
    let limit = MAX_NODE_MODULUS / max_mod;
    if !feasible(limit) {
        return None;
    }
    let (mut lo, mut hi) = (1.0, limit);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(nodes.iter().map(|z| z * hi).collect())
}

/// Smallest scale `s` with `s * nodes` feasible, searched up to the modulus cap; positive-definite
/// Pick matrices (a Cholesky factorization) serve as the feasibility test.
fn feasible_scale(nodes: &[Complex64], t1: &[Complex64], t2: &[Complex64]) -> Option<f64> {
    let max_mod = nodes.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(max_mod > 0.0) || too_close(nodes) {
        return None;
    }
    let mut scaled = [Complex64::new(0.0, 0.0); MAX_SUBSET];
    let scaled = &mut scaled[..nodes.len()];
    let mut feasible = |s: f64| {
        for (y, z) in scaled.iter_mut().zip(nodes) {
            *y = z * s;
        }
        pick_deficit(scaled, t1, false) == 0.0 && pick_deficit(scaled, t2, false) == 0.0
    };
    let limit = MAX_NODE_MODULUS / max_mod;
    if !feasible(limit) {
        return None;
    }
    let (mut lo, mut hi) = (0.0, limit);
    while hi - lo > 1e-15 * hi {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Local descent on the node shape with the scale chosen as small as feasibility allows.
fn polish(candidate: &Candidate, settings: &OptimizerSettings) -> Option<Candidate> {
    let n = candidate.nodes.len();
    let (t1, t2) = (&candidate.t1, &candidate.t2);
    let mut f = |x: &[f64]| {
        let mut nodes = [Complex64::new(0.0, 0.0); MAX_SUBSET];
        let nodes = &mut nodes[..n];
        unpack(x, nodes);
        match feasible_scale(nodes, t1, t2) {
            Some(s) => nodes.iter().map(|z| (z * s).norm().ln()).sum(),
            None => f64::INFINITY,
        }
    };
    let mut x: Vec<f64> = candidate.nodes.iter().flat_map(|z| [z.re, z.im]).collect();
    let mut step = 0.02;
    for _ in 0..settings.polish_rounds {
        let r = nelder_mead(&mut f, &x, step, settings.tolerance, settings.polish_iterations);
        x = r.x;
        step *= 0.1;
    }
    let mut nodes = vec![Complex64::new(0.0, 0.0); n];
    unpack(&x, &mut nodes);
    let s = feasible_scale(&nodes, t1, t2)?;
    let nodes: Vec<Complex64> = nodes.iter().map(|z| z * s).collect();
    let nodes = restore(&nodes, t1, t2)?;
    let value = nodes.iter().map(|z| z.norm()).product();
    Some(Candidate {
        restart: candidate.restart,
        nodes,
        t1: t1.clone(),
        t2: t2.clone(),
        value,
    })
}

struct Candidate {
    restart: usize,
    nodes: Vec<Complex64>,
    t1: Vec<Complex64>,
    t2: Vec<Complex64>,
    value: f64,
}

fn run_restart(
    subset_index: usize,
    restart: usize,
    subset: &[(usize, usize)],
    first: &Coordinate,
    second: &Coordinate,
    settings: &OptimizerSettings,
) -> Option<Candidate> {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    rng.set_stream(((subset_index as u64) << 32) | restart as u64);
    let pick = |c: &Coordinate, k: usize, rng: &mut ChaCha8Rng| {
        let list = &c.candidates[k];
        list[rng.random_range(0..list.len().min(settings.lift_choices))]
    };
    let t1: Vec<Complex64> = subset.iter().map(|&(k, _)| pick(first, k, &mut rng)).collect();
    let t2: Vec<Complex64> = subset.iter().map(|&(_, l)| pick(second, l, &mut rng)).collect();
    let n = subset.len();
    let mut x = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let r = rng.random_range(0.3..0.95f64);
        let t = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        x.push(r * t.cos());
        x.push(r * t.sin());
    }
    let stages = settings.max_iterations.div_ceil(settings.penalty_interval);
    let mut weight = settings.penalty_start;
    let mut step = 0.1;
    let mut remaining = settings.max_iterations;
    for _ in 0..stages {
        let budget = remaining.min(settings.penalty_interval);
        let mut f = |y: &[f64]| objective(y, &t1, &t2, weight);
        let r = nelder_mead(&mut f, &x, step, settings.tolerance, budget);
        log::trace!(
            "restart {restart}: weight {weight:e}, {} iterations, value {}",
            r.iterations,
            r.value
        );
        x = r.x;
        remaining -= budget;
        weight *= settings.penalty_growth;
        step = (step * 0.5).max(1e-4);
    }
    let mut nodes = vec![Complex64::new(0.0, 0.0); n];
    unpack(&x, &mut nodes);
    let nodes = restore(&nodes, &t1, &t2)?;
    let value = nodes.iter().map(|z| z.norm()).product();
    Some(Candidate {
        restart,
        nodes,
        t1,
        t2,
        value,
    })
}

fn search(
    n_first: usize,
    n_second: usize,
    first: &Coordinate,
    second: &Coordinate,
    settings: &OptimizerSettings,
) -> Result<SearchOutcome> {
    settings.validate()?;
    settings.install(|| {
        let mut best: Option<NodeConfig> = None;
        let mut optimized = 0;
        let mut pruned = 0;
        let mut feasible_restarts = 0;
        for (index, subset) in subsets(n_first, n_second, settings.max_subset).into_iter().enumerate() {
            let mut m1 = vec![0; n_first];
            let mut m2 = vec![0; n_second];
            for &(k, l) in &subset {
                m1[k] += 1;
                m2[l] += 1;
            }
            let floor = first.floor(&m1).max(second.floor(&m2));
            if let Some(b) = &best {
                if floor >= b.value {
                    pruned += 1;
                    continue;
                }
            }
            optimized += 1;
            let candidates: Vec<Candidate> = if subset.len() == 1 {
                single_pole(first, second, subset[0]).into_iter().collect()
            } else {
                let mut found: Vec<Candidate> = (0..settings.restarts)
                    .into_par_iter()
                    .filter_map(|r| run_restart(index, r, &subset, first, second, settings))
                    .collect();
                feasible_restarts += found.len();
                found.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.restart.cmp(&b.restart)));
                found.truncate(settings.polish);
                let polished: Vec<Candidate> = found.par_iter().filter_map(|c| polish(c, settings)).collect();
                found.extend(polished);
                found
            };
            let Some(winner) = candidates
                .into_iter()
                .min_by(|a, b| a.value.total_cmp(&b.value).then(a.restart.cmp(&b.restart)))
            else {
                log::debug!("subset {subset:?}: no feasible restart");
                continue;
            };
            if best.as_ref().is_none_or(|b| winner.value < b.value) {
                let verdicts = (
                    pick_feasible(&PickProblem::with_origin(&winner.nodes, &winner.t1)?),
                    pick_feasible(&PickProblem::with_origin(&winner.nodes, &winner.t2)?),
                );
                if !(verdicts.0.feasible && verdicts.1.feasible) {
                    return Err(Error::Numerical(format!(
                        "restored configuration for {subset:?} fails re-verification"
                    )));
                }
                best = Some(NodeConfig {
                    subset,
                    value: winner.value,
                    nodes: winner.nodes,
                    first_targets: winner.t1,
                    second_targets: winner.t2,
                    min_eigenvalues: (verdicts.0.min_eigenvalue, verdicts.1.min_eigenvalue),
                });
            }
        }
        let best = best.ok_or_else(|| Error::Numerical("no feasible node configuration found".into()))?;
        Ok(SearchOutcome {
            value: best.value,
            best,
            subsets_optimized: optimized,
            subsets_pruned: pruned,
            feasible_restarts,
        })
    })?
}

/// A single pole `(a, b)` needs one node of modulus `max(|a|, |b|)`.
fn single_pole(first: &Coordinate, second: &Coordinate, (k, l): (usize, usize)) -> Option<Candidate> {
    let (a, b) = (first.candidates[k][0], second.candidates[l][0]);
    let node = if a.norm() >= b.norm() { a } else { b };
    if node.norm() == 0.0 {
        return None;
    }
    Some(Candidate {
        restart: 0,
        nodes: vec![node],
        t1: vec![a],
        t2: vec![b],
        value: node.norm(),
    })
}

/// Upper bound for the Lempert function of the bidisc with poles `A x B` at `(z, w)`.
pub fn bidisc_lempert(
    a: &PoleSet,
    b: &PoleSet,
    z: Complex64,
    w: Complex64,
    settings: &OptimizerSettings,
) -> Result<SearchOutcome> {
    for set in [a, b] {
        if set.domain() != PlaneDomain::UnitDisc {
            return Err(Error::InvalidPoleSet("bidisc poles must lie in the unit disc".into()));
        }
        if set.len() > 4 {
            return Err(Error::InvalidPoleSet("at most four poles per coordinate".into()));
        }
    }
    PlaneDomain::UnitDisc.require_interior(z)?;
    PlaneDomain::UnitDisc.require_interior(w)?;
    let reduce = |base: Complex64, set: &PoleSet| Coordinate {
        candidates: set.points().iter().map(|&p| vec![moebius(base, p)]).collect(),
    };
    search(a.len(), b.len(), &reduce(z, a), &reduce(w, b), settings)
}

/// Upper bound for the Lempert function of `D x G` with poles `A x B` at `(z, w)`, over discs
/// whose coordinates are `pi . B_j` with `pi` the normalized cover and `B_j` Blaschke products
/// fixing 0 (of degree at most the subset size).
pub fn mixed_product_upper(
    a: &PoleSet,
    b: &PoleSet,
    z: Complex64,
    w: Complex64,
    settings: &OptimizerSettings,
) -> Result<SearchOutcome> {
    if settings.max_subset > MAX_FAMILY_DEGREE {
        return Err(Error::CapOverflow(format!(
            "Blaschke degree {} exceeds {MAX_FAMILY_DEGREE}",
            settings.max_subset
        )));
    }
    let lifts = |set: &PoleSet, base: Complex64| -> Result<Coordinate> {
        let cover = CoverMap::new(set.domain(), base)?;
        let depth = settings.lift_choices.max(settings.max_subset);
        Ok(Coordinate {
            candidates: set
                .points()
                .iter()
                .map(|&p| cover.lifts(p, depth).iter().map(|l| l.point).collect())
                .collect(),
        })
    };
    search(a.len(), b.len(), &lifts(a, z)?, &lifts(b, w)?, settings)
}

/// Whether the Pick matrices of a configuration are positive semidefinite within the feasibility
/// tolerance.
pub fn verify_config(config: &NodeConfig) -> Result<bool> {
    let v1 = pick_feasible(&PickProblem::with_origin(&config.nodes, &config.first_targets)?);
    let v2 = pick_feasible(&PickProblem::with_origin(&config.nodes, &config.second_targets)?);
    Ok(v1.min_eigenvalue >= -FEASIBILITY_TOL && v2.min_eigenvalue >= -FEASIBILITY_TOL)
}
