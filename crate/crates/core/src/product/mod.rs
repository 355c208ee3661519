//! Bounds and constructions for Lempert functions of products of plane domains.

mod genericity;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cover::CoverMap;
use crate::domain::{PlaneDomain, PoleSet};
use crate::error::{Error, Result};
use crate::expr::{DiscExpr, ProductDisc};
use crate::interpolation::{theorem5_certificate, ProductCertificate};
use crate::kernel::moebius;
use crate::plane::{find_pole_with_value, green_plane, green_poleset, lempert_poleset_plane, GreenValue};

pub use genericity::genericity_margin;

/// Tolerance for `l_G(b, w) = l_G^N(b, w)` and for level-set equalities.
pub const EQUALITY_TOL: f64 = 1e-10;
/// Tolerance for matching pole sets under a rotation.
pub const ROTATION_TOL: f64 = 1e-12;
/// First gap between the upper bound and the node product of the constructed disc.
pub const CERTIFICATE_SLACK: f64 = 1e-6;
/// Smallest gap tried when tightening the certificate.
pub const CERTIFICATE_SLACK_FLOOR: f64 = 1e-10;
/// Largest residual accepted for a constructed disc.
pub const CERTIFICATE_RESIDUAL: f64 = 1e-9;
/// Pole targets are clamped below 1 so that a pole inside the domain exists.
pub const TARGET_CAP: f64 = 1.0 - 1e-12;
/// Required genericity margin for constructed poles.
pub const GENERICITY_MARGIN: f64 = 1e-6;
pub const GENERICITY_LIFTS: usize = 200;
pub const DIRECTION_RETRIES: usize = 100;
/// Matching tolerance for the automorphism test on sampled level points.
pub const AUTOMORPHISM_TOL: f64 = 1e-8;
/// Tail tolerance for Green function products.
pub const GREEN_TAIL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    /// `max{l_D(A, z), l_G^N(b, w)}` with `N = #A`.
    pub lower: f64,
    /// `max{l_D(A, z), l_G(b, w)}`.
    pub upper: f64,
    /// Node product of the constructed disc, slightly above `upper`.
    pub certified_upper: f64,
    pub first: f64,
    pub second: f64,
    pub second_n: f64,
    /// `l_G(b, w) = l_G^N(b, w)` within `EQUALITY_TOL`.
    pub equality_flag: bool,
    pub certificate: ProductCertificate,
    pub residual: f64,
}

/// Two-sided estimate of `l_{D x G}(A x {b}, (z, w))` together with a disc realizing the upper
/// estimate up to a small slack.
pub fn theorem5_bounds(a: &PoleSet, g: PlaneDomain, b: Complex64, z: Complex64, w: Complex64) -> Result<BoundsReport> {
    g.require_interior(b)?;
    g.require_interior(w)?;
    let first_eval = lempert_poleset_plane(a, z)?;
    let second_set = PoleSet::new(g, vec![b])?;
    let second_eval = lempert_poleset_plane(&second_set, w)?;
    let first = first_eval.value;
    let second = second_eval.value;
    let second_n = lempert_n(g, b, w, a.len())?;
    let lower = first.max(second_n);
    let upper = first.max(second);
    if !(upper < 1.0) || second == 0.0 {
        return Err(Error::Precondition(format!(
            "the upper estimate {upper} leaves no room for a certificate"
        )));
    }
    let build = |slack: f64| -> Result<(ProductCertificate, f64)> {
        let cert = theorem5_certificate(
            &first_eval.certificate.map,
            &first_eval.certificate.nodes,
            &second_eval.certificate.map,
            second_eval.certificate.nodes[0],
            upper + slack,
        )?;
        let residual = cert.residual(z, w, a.points(), b);
        if residual > CERTIFICATE_RESIDUAL {
            return Err(Error::Numerical(format!("certificate residual {residual:e}")));
        }
        Ok((cert, residual))
    };
    let mut slack = CERTIFICATE_SLACK.min(0.5 * (1.0 - upper));
    let (mut cert, mut residual) = build(slack)?;
    while slack > CERTIFICATE_SLACK_FLOOR {
        slack *= 0.1;
        match build(slack) {
            Ok(found) => (cert, residual) = found,
            Err(e) => {
                log::debug!("certificate tightening stopped at slack {slack:e}: {e}");
                break;
            }
        }
    }
    Ok(BoundsReport {
        lower,
        upper,
        certified_upper: cert.bound,
        first,
        second,
        second_n,
        equality_flag: (second - second_n).abs() <= EQUALITY_TOL,
        certificate: cert,
        residual,
    })
}

/// `l_G^n(b, w)`: product of the `n` smallest lift moduli (the disc has a single lift).
fn lempert_n(g: PlaneDomain, b: Complex64, w: Complex64, n: usize) -> Result<f64> {
    Ok(lift_values(g, b, w, n)?.last().copied().unwrap_or(1.0))
}

/// `l_G^k(b, w)` for `k = 1..=n`, from log-moduli so that lifts close to the circle still count.
fn lift_values(g: PlaneDomain, b: Complex64, w: Complex64, n: usize) -> Result<Vec<f64>> {
    g.require_interior(b)?;
    let cover = CoverMap::new(g, w)?;
    let lifts = cover.lifts(b, n);
    let first = lifts[0].log_modulus();
    let mut sum = 0.0;
    Ok((0..n)
        .map(|k| {
            // The disc cover has one lift; l^n then stays at l^1.
            sum += lifts.get(k).map_or(0.0, |l| l.log_modulus());
            if lifts.len() == 1 {
                first.exp()
            } else {
                sum.exp()
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationDecision {
    /// `theta` with `e^{i theta} A = B`, if any.
    pub rotation: Option<f64>,
    /// `l_D(A, 0) = |a_1 a_2|`.
    pub value: f64,
    /// `zeta -> (zeta, e^{i theta} zeta)` through the poles at `A`, when a rotation exists.
    pub certificate: Option<(ProductDisc, Vec<Complex64>)>,
}

fn require_disc_pair(set: &PoleSet, name: &str) -> Result<()> {
    if set.domain() != PlaneDomain::UnitDisc || set.len() != 2 {
        return Err(Error::Precondition(format!(
            "{name} must be a two-point subset of the unit disc"
        )));
    }
    Ok(())
}

/// Whether two-point pole sets with equal Lempert values at the origin differ by a rotation.
pub fn theorem7_decide(a: &PoleSet, b: &PoleSet) -> Result<RotationDecision> {
    require_disc_pair(a, "A")?;
    require_disc_pair(b, "B")?;
    if a.points().iter().chain(b.points()).any(|p| p.norm() == 0.0) {
        return Err(Error::Precondition("the origin must not be a pole".into()));
    }
    let (pa, pb) = (a.points(), b.points());
    let la = pa[0].norm() * pa[1].norm();
    let lb = pb[0].norm() * pb[1].norm();
    if (la - lb).abs() > ROTATION_TOL {
        return Err(Error::Precondition(format!(
            "Lempert values at the origin differ: {la} vs {lb}"
        )));
    }
    let rotation = [(0, 1), (1, 0)].into_iter().find_map(|(i, j)| {
        let turn = pb[i] / pa[0];
        let turn = turn / turn.norm();
        let matches = (turn * pa[0] - pb[i]).norm() <= ROTATION_TOL && (turn * pa[1] - pb[j]).norm() <= ROTATION_TOL;
        matches.then(|| turn.arg())
    });
    let certificate = rotation.map(|theta| {
        (
            ProductDisc {
                first: DiscExpr::Identity,
                second: DiscExpr::Rotation(theta),
            },
            pa.to_vec(),
        )
    });
    Ok(RotationDecision {
        rotation,
        value: la,
        certificate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSample {
    pub w: Complex64,
    /// `|l_D(B, w) - l_D(A, z)|`.
    pub residual: f64,
    /// Whether an automorphism maps `z` to `w` and `A` onto `B`.
    pub automorphism: bool,
}

fn disc_level(set: &[Complex64], w: Complex64) -> f64 {
    set.iter().map(|&p| moebius(p, w).norm()).product()
}

/// Points `w` with `l_D(B, w) = l_D(A, z)`, traced by bisection along random rays from `b_1`.
/// Ray `i` uses the seed `seed ^ i`; samples come back in ray order.
pub fn corollary8_sample(a: &PoleSet, z: Complex64, b: &PoleSet, count: usize, seed: u64) -> Result<Vec<LevelSample>> {
    require_disc_pair(a, "A")?;
    require_disc_pair(b, "B")?;
    PlaneDomain::UnitDisc.require_interior(z)?;
    let level = disc_level(a.points(), z);
    if level == 0.0 {
        return Err(Error::Precondition("z must not be a pole".into()));
    }
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i as u64);
            for _ in 0..16 {
                let dir = Complex64::from_polar(1.0, rng.random_range(-PI..PI));
                if let Some(w) = trace_level(b.points(), level, dir) {
                    let residual = (disc_level(b.points(), w) - level).abs();
                    if residual <= EQUALITY_TOL {
                        return Ok(LevelSample {
                            w,
                            residual,
                            automorphism: related_by_automorphism(a.points(), z, b.points(), w),
                        });
                    }
                }
            }
            Err(Error::NoBracket(format!(
                "level {level} not reached on 16 rays for sample {i}"
            )))
        })
        .collect()
}

fn trace_level(b: &[Complex64], level: f64, dir: Complex64) -> Option<Complex64> {
    let start = b[0];
    let p = (start.conj() * dir).re;
    let exit = -p + (p * p + 1.0 - start.norm_sqr()).sqrt();
    let at = |s: f64| start + dir * s;
    let f = |s: f64| if s >= exit { 1.0 } else { disc_level(b, at(s)) };
    let mut grid: Vec<f64> = (1..256).map(|k| exit * k as f64 / 256.0).collect();
    grid.extend((9..=52).map(|m| exit * (1.0 - 2f64.powi(-m))));
    let mut lo = 0.0;
    let mut hi = None;
    for s in grid {
        if f(s) >= level {
            hi = Some(s);
            break;
        }
        lo = s;
    }
    let mut hi = hi?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if f(mid) >= level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let s = if (f(lo) - level).abs() <= (f(hi) - level).abs() {
        lo
    } else {
        hi
    };
    Some(at(s))
}

/// Automorphisms sending `z` to `w` are `moebius(w, e^{it} moebius(z, .))`; one maps `A` onto `B`
/// exactly when the moved sets differ by a rotation.
fn related_by_automorphism(a: &[Complex64], z: Complex64, b: &[Complex64], w: Complex64) -> bool {
    let ma: Vec<Complex64> = a.iter().map(|&p| moebius(z, p)).collect();
    let mb: Vec<Complex64> = b.iter().map(|&p| moebius(w, p)).collect();
    [(0, 1), (1, 0)].into_iter().any(|(i, j)| {
        if ma[0].norm() == 0.0 {
            return false;
        }
        let turn = mb[i] / ma[0];
        let turn = turn / turn.norm();
        (turn * ma[0] - mb[i]).norm() <= AUTOMORPHISM_TOL && (turn * ma[1] - mb[j]).norm() <= AUTOMORPHISM_TOL
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionReport {
    pub green_first: GreenValue,
    pub green_second: GreenValue,
    /// Lower estimate of `g_D(A_1, z) g_G(B_1, w)` after the tail bounds.
    pub product_lower: f64,
    pub q: f64,
    pub condition_holds: bool,
    /// `max{l_D(A u A_1, z), l_G(B u B_1, w)}`, the right end of the strict inequality.
    pub extended_max: f64,
}

/// `max{l_D(A, z), l_G(B, w)} / U` for an upper bound `U` of the product-domain value.
pub fn extension_ratio(max_lempert: f64, product_upper: f64) -> Result<f64> {
    let q = max_lempert / product_upper;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Precondition(format!("ratio {q} must lie in (0, 1)")));
    }
    Ok(q)
}

/// Checks whether adding the poles `A_1`, `B_1` makes the product property fail, through
/// `g_D(A_1, z) g_G(B_1, w) > q`.
#[allow(clippy::too_many_arguments)]
pub fn prop9_extend(
    a: &PoleSet,
    a1: &PoleSet,
    b: &PoleSet,
    b1: &PoleSet,
    z: Complex64,
    w: Complex64,
    q: f64,
) -> Result<ExtensionReport> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!("q = {q} must lie in (0, 1)")));
    }
    if !a.is_disjoint(a1) || !b.is_disjoint(b1) {
        return Err(Error::InvalidPoleSet(
            "added poles must be disjoint from the original ones".into(),
        ));
    }
    let green_first = green_poleset(a1, z, GREEN_TAIL)?;
    let green_second = green_poleset(b1, w, GREEN_TAIL)?;
    let product_lower =
        green_first.value * (1.0 - green_first.tail_bound) * green_second.value * (1.0 - green_second.tail_bound);
    let extended_max = lempert_poleset_plane(&a.union(a1)?, z)?
        .value
        .max(lempert_poleset_plane(&b.union(b1)?, w)?.value);
    Ok(ExtensionReport {
        green_first,
        green_second,
        product_lower,
        q,
        condition_holds: product_lower > q,
        extended_max,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleConstruction {
    pub poles: PoleSet,
    /// `l_G^k(b, w)` for `k = 1..=N`.
    pub targets: Vec<f64>,
    /// `max_k |l_D(A_k, z) - l_G^k(b, w)|`.
    pub equality_residual: f64,
    pub genericity_margin: f64,
    /// Direction retries used before the margin was met.
    pub retries: usize,
    pub bounds: BoundsReport,
}

/// Poles `a_1, ..., a_N` in `D` with `l_D(A_k, z) = l_G^k(b, w)` for every `k`, chosen along rays
/// so that the first two satisfy the genericity margin.
pub fn prop10_construct(
    d: PlaneDomain,
    g: PlaneDomain,
    z: Complex64,
    w: Complex64,
    b: Complex64,
    n: usize,
) -> Result<PoleConstruction> {
    if g.is_simply_connected() {
        return Err(Error::Precondition(
            "the second domain must not be simply connected".into(),
        ));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("at least two poles are required".into()));
    }
    d.require_interior(z)?;
    g.require_interior(w)?;
    g.require_interior(b)?;
    if (b - w).norm() == 0.0 {
        return Err(Error::Precondition("b must differ from w".into()));
    }
    let targets = lift_values(g, b, w, n)?;
    let cover_g = CoverMap::new(g, w)?;
    let lifts = cover_g.lifts(b, n);
    let steps: Vec<f64> = lifts.iter().map(|l| l.modulus().min(TARGET_CAP)).collect();
    let cover_d = CoverMap::new(d, z)?;
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let mut last_error = None;
    for retry in 0..DIRECTION_RETRIES {
        let poles: Result<Vec<Complex64>> = steps
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                let turn = TAU * ((retry as f64 * golden + k as f64 / n as f64).fract());
                find_pole_with_value(d, z, t, Complex64::from_polar(1.0, turn))
            })
            .collect();
        let poles = match poles.and_then(|p| PoleSet::new(d, p)) {
            Ok(p) => p,
            Err(e) => {
                last_error = Some(e);
                continue;
            }
        };
        let pts = poles.points();
        let margin = genericity_margin(&cover_d, pts[0], pts[1], &cover_g, b, GENERICITY_LIFTS);
        if !(margin > GENERICITY_MARGIN) {
            last_error = Some(Error::Numerical(format!("genericity margin {margin:e}")));
            continue;
        }
        let mut log_sum = 0.0;
        let mut equality_residual: f64 = 0.0;
        for (k, &p) in pts.iter().enumerate() {
            log_sum += cover_d.min_lift(p).log_modulus();
            equality_residual = equality_residual.max((log_sum.exp() - targets[k]).abs());
        }
        let bounds = theorem5_bounds(&poles, g, b, z, w)?;
        return Ok(PoleConstruction {
            poles,
            targets,
            equality_residual,
            genericity_margin: margin,
            retries: retry,
            bounds,
        });
    }
    Err(Error::Numerical(format!(
        "no direction met the genericity margin after {DIRECTION_RETRIES} retries; last failure: {}",
        last_error.map_or_else(|| "none".into(), |e| e.to_string())
    )))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub pair: PoleConstruction,
    /// `l_D(A_2, z) / U` with `U` the certified upper bound for the pair.
    pub q: f64,
    /// `l_D(B, z)` for the added poles `B`.
    pub extra_value: f64,
    /// `U l_D(B, z)`, the left end of the chain.
    pub chain_left: f64,
    /// `l_D(A_2, z)`, the middle of the chain.
    pub pair_value: f64,
    /// `max{l_D(A_2 u B, z), g_G(b, w)}`.
    pub right: f64,
    pub green_second: GreenValue,
    pub strict: bool,
}

/// Adds poles `B` with `l_D(B, z) > q` to a two-pole construction and reports the chain of
/// inequalities separating `l_{D x G}` from `max{l_D, g_G}`.
pub fn prop11_construct(
    d: PlaneDomain,
    g: PlaneDomain,
    z: Complex64,
    w: Complex64,
    b: Complex64,
    extra: &PoleSet,
) -> Result<ChainReport> {
    let pair = prop10_construct(d, g, z, w, b, 2)?;
    if !pair.poles.is_disjoint(extra) {
        return Err(Error::InvalidPoleSet(
            "added poles must avoid the constructed pair".into(),
        ));
    }
    let pair_value = lempert_poleset_plane(&pair.poles, z)?.value;
    let q = extension_ratio(pair_value, pair.bounds.certified_upper)?;
    let extra_value = lempert_poleset_plane(extra, z)?.value;
    if !(extra_value > q) {
        return Err(Error::Precondition(format!(
            "added poles give l_D = {extra_value}, not above q = {q}"
        )));
    }
    let green_second = green_plane(g, b, w, GREEN_TAIL)?;
    let union_value = lempert_poleset_plane(&pair.poles.union(extra)?, z)?.value;
    let right = union_value.max(green_second.value * (1.0 + green_second.tail_bound));
    Ok(ChainReport {
        q,
        extra_value,
        chain_left: pair.bounds.certified_upper * extra_value,
        pair_value,
        right,
        green_second,
        strict: extra_value > q + CERTIFICATE_RESIDUAL,
        pair,
    })
}
