//! Lempert and Green functions of the disc, the punctured disc and annuli, evaluated through
//! lifts to the universal cover.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::cover::{CoverMap, Lift};
use crate::disc::{lempert_disc, lempert_disc_n};
use crate::domain::{PlaneDomain, PoleSet};
use crate::error::{Error, Result};
use crate::expr::{Certificate, DiscExpr, EvalResult};

/// Upper limit on enumerated lifts when summing the Green function.
pub const MAX_LIFTS: usize = 10_000;
pub const MAX_MULTIPLICITY: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenValue {
    pub value: f64,
    /// The exact value lies within relative distance `tail_bound` of `value`.
    pub tail_bound: f64,
    pub lifts: usize,
}

/// Product of the `n` smallest lift moduli of `a` under the cover normalized at `z`.
pub fn lempert_n_plane(domain: PlaneDomain, a: Complex64, z: Complex64, n: usize) -> Result<EvalResult> {
    if n == 0 || n > MAX_MULTIPLICITY {
        return Err(Error::InvalidParameter(format!(
            "multiplicity {n} must lie in 1..={MAX_MULTIPLICITY}"
        )));
    }
    if domain == PlaneDomain::UnitDisc {
        return lempert_disc_n(a, z, n);
    }
    domain.require_interior(a)?;
    let cover = CoverMap::new(domain, z)?;
    let lifts = cover.lifts(a, n);
    Ok(EvalResult {
        value: product_of_moduli(&lifts),
        certificate: Certificate {
            map: DiscExpr::Cover(cover),
            nodes: lifts.iter().map(|l| l.point).collect(),
        },
    })
}

/// `exp(sum log|xi|)`, summed in the order given.
pub fn product_of_moduli(lifts: &[Lift]) -> f64 {
    lifts.iter().map(Lift::log_modulus).sum::<f64>().exp()
}

/// Product over the poles of the least lift modulus; the cover itself is the certificate.
pub fn lempert_poleset_plane(a: &PoleSet, z: Complex64) -> Result<EvalResult> {
    if a.domain() == PlaneDomain::UnitDisc {
        return lempert_disc(a, z);
    }
    let cover = CoverMap::new(a.domain(), z)?;
    let lifts: Vec<Lift> = a.points().iter().map(|&p| cover.min_lift(p)).collect();
    Ok(EvalResult {
        value: product_of_moduli(&lifts),
        certificate: Certificate {
            map: DiscExpr::Cover(cover),
            nodes: lifts.iter().map(|l| l.point).collect(),
        },
    })
}

/// Lempert function with the single pole `a`.
pub fn lempert_single(domain: PlaneDomain, a: Complex64, z: Complex64) -> Result<f64> {
    domain.require_interior(a)?;
    Ok(CoverMap::new(domain, z)?.min_lift(a).modulus())
}

/// Green function with pole `a`: the product of all lift moduli.
pub fn green_plane(domain: PlaneDomain, a: Complex64, z: Complex64, tol_tail: f64) -> Result<GreenValue> {
    if !(tol_tail >= 0.0) {
        return Err(Error::InvalidParameter("tail tolerance must be nonnegative".into()));
    }
    domain.require_interior(a)?;
    let cover = CoverMap::new(domain, z)?;
    let mut walk = cover.walk(a);
    let first = walk.next().expect("every point has a lift");
    if first.defect >= 1.0 || domain == PlaneDomain::UnitDisc {
        return Ok(GreenValue {
            value: first.modulus(),
            tail_bound: 0.0,
            lifts: 1,
        });
    }
    let mut log_sum = -first.log_modulus();
    let mut lifts = 1;
    let mut best = f64::INFINITY;
    match domain {
        PlaneDomain::Annulus { inner } => {
            let period = 2.0 * PI * PI / -inner.ln();
            let weight = first.model.im.cos() * cover.base_model().im.cos();
            loop {
                let (xl, xr) = walk.frontier().expect("walk is past its first lift");
                let tail = annulus_side_tail(xl, weight, period) + annulus_side_tail(xr, weight, period);
                let bound = -(-tail).exp_m1();
                best = best.min(bound);
                // Also run until the remaining terms cannot move the sum, so that the result is
                // never above a partial product over more lifts.
                if bound <= tol_tail && tail <= log_sum * f64::EPSILON / 4.0 {
                    return Ok(GreenValue {
                        value: (-log_sum).exp(),
                        tail_bound: bound,
                        lifts,
                    });
                }
                if lifts >= MAX_LIFTS {
                    break;
                }
                log_sum -= walk.next().expect("infinitely many lifts").log_modulus();
                lifts += 1;
            }
        }
        PlaneDomain::PuncturedDisc => {
            let r = first.model.re;
            let r0 = cover.base_model().re;
            let tail = PuncturedTail::new(r, r0);
            let mut checkpoint = 64;
            loop {
                while lifts < checkpoint {
                    log_sum -= walk.next().expect("infinitely many lifts").log_modulus();
                    lifts += 1;
                }
                let (xl, xr) = walk.frontier().expect("walk is past its first lift");
                if let (Some(l), Some(rt)) = (tail.side(xl), tail.side(xr)) {
                    let bound = (l.1 + rt.1).exp_m1();
                    best = best.min(bound);
                    if bound <= tol_tail {
                        return Ok(GreenValue {
                            value: (-(log_sum + l.0 + rt.0)).exp(),
                            tail_bound: bound,
                            lifts,
                        });
                    }
                }
                if checkpoint >= MAX_LIFTS {
                    break;
                }
                checkpoint = (checkpoint * 2).min(MAX_LIFTS);
            }
        }
        PlaneDomain::UnitDisc => unreachable!(),
    }
    Err(Error::TailNotReached {
        requested: tol_tail,
        achieved: best,
        lifts: MAX_LIFTS,
    })
}

/// Bound on `sum_n -log|xi_n|` over lifts at strip distances `x, x + period, ...`,
/// using `1 - |xi|^2 <= weight / sinh^2(dist / 2)`.
fn annulus_side_tail(x: f64, weight: f64, period: f64) -> f64 {
    if !(x > 0.0) {
        return f64::INFINITY;
    }
    let e = (-x).exp();
    let defects = 4.0 * weight * e / ((1.0 - e).powi(2) * -(-period).exp_m1());
    if defects >= 0.5 {
        return f64::INFINITY;
    }
    defects / (2.0 * (1.0 - defects))
}

/// Tail of the punctured-disc lift sum. Lifts at half-plane height offset `x` contribute
/// `f(x) = log((x^2 + beta^2) / (x^2 + alpha^2)) / 2`, which decays only like `x^-2`,
/// so the remainder is bracketed by trapezoid and midpoint integrals of the convex tail of `f`.
struct PuncturedTail {
    alpha: f64,
    beta: f64,
}

impl PuncturedTail {
    fn new(r: f64, r0: f64) -> Self {
        Self {
            alpha: (r - r0).abs(),
            beta: (r + r0).abs(),
        }
    }

    fn f(&self, x: f64) -> f64 {
        let d = (self.beta - self.alpha) * (self.beta + self.alpha);
        0.5 * (d / (x * x + self.alpha * self.alpha)).ln_1p()
    }

    /// `int_x^inf f`.
    fn integral(&self, x: f64) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        let d = (b - a) * (b + a);
        let atan_term = |c: f64| if c == 0.0 { 0.0 } else { c * (c / x).atan() };
        atan_term(b) - atan_term(a) - 0.5 * x * (d / (x * x + a * a)).ln_1p()
    }

    /// `(estimate, half-width)` for `sum_{n >= 0} f(x + 2 pi n)`, once `f` is convex past `x - pi`.
    fn side(&self, x: f64) -> Option<(f64, f64)> {
        if x - PI <= self.beta {
            return None;
        }
        let lo = 0.5 * self.f(x) + self.integral(x) / TAU;
        let hi = self.integral(x - PI) / TAU;
        Some((0.5 * (lo + hi), 0.5 * (hi - lo).abs()))
    }
}

/// Product of Green functions over a pole set.
pub fn green_poleset(a: &PoleSet, z: Complex64, tol_tail: f64) -> Result<GreenValue> {
    let per_pole = tol_tail / a.len() as f64;
    let mut value = 1.0;
    let mut log_err = 0.0;
    let mut lifts = 0;
    for &p in a.points() {
        let g = green_plane(a.domain(), p, z, per_pole)?;
        value *= g.value;
        log_err += g.tail_bound.ln_1p();
        lifts += g.lifts;
    }
    Ok(GreenValue {
        value,
        tail_bound: log_err.exp_m1(),
        lifts,
    })
}

/// First parameter `s > 0` where the ray `z + s * dir` leaves the domain.
fn ray_exit(domain: PlaneDomain, z: Complex64, dir: Complex64) -> f64 {
    let p = (z.conj() * dir).re;
    let hit = |r: f64| -> Option<f64> {
        let c = z.norm_sqr() - r * r;
        let disc = p * p - c;
        if disc < 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        [-p - sq, -p + sq].into_iter().filter(|&s| s > 0.0).reduce(f64::min)
    };
    let outer = hit(1.0).expect("interior ray meets the unit circle");
    match domain {
        PlaneDomain::UnitDisc => outer,
        PlaneDomain::PuncturedDisc => {
            let through_origin = (z.conj() * dir).im == 0.0 && p < 0.0;
            if through_origin {
                outer.min(z.norm())
            } else {
                outer
            }
        }
        PlaneDomain::Annulus { inner } => hit(inner).map_or(outer, |s| s.min(outer)),
    }
}

/// A point `a` on the ray from `z` in direction `direction` with `l_D({a}, z) = t`,
/// the one closest to `z` when several exist.
pub fn find_pole_with_value(domain: PlaneDomain, z: Complex64, t: f64, direction: Complex64) -> Result<Complex64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidParameter(format!("target value {t} must lie in (0, 1)")));
    }
    if !(direction.norm() > 0.0) || !direction.norm().is_finite() {
        return Err(Error::InvalidParameter(
            "direction must be a nonzero complex number".into(),
        ));
    }
    let dir = direction / direction.norm();
    let cover = CoverMap::new(domain, z)?;
    let exit = ray_exit(domain, z, dir);
    let at = |s: f64| z + dir * s;
    let value = |s: f64| {
        let a = at(s);
        if domain.contains(a) {
            cover.min_lift(a).modulus()
        } else {
            1.0
        }
    };
    // Uniform grid first, then geometric approach to the boundary.
    const GRID: usize = 256;
    let mut samples = Vec::new();
    let mut candidates: Vec<f64> = (1..GRID).map(|i| exit * i as f64 / GRID as f64).collect();
    candidates.extend((9..=60).map(|m| exit * (1.0 - 2f64.powi(-m))));
    let mut lo = 0.0;
    let mut bracket = None;
    for s in candidates {
        if !(s > lo) {
            continue;
        }
        let v = value(s);
        samples.push((s, v));
        if v >= t {
            bracket = Some((lo, s));
            break;
        }
        lo = s;
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| {
        let shown: Vec<String> = samples
            .iter()
            .rev()
            .take(8)
            .map(|(s, v)| format!("l({s:.6e})={v:.6e}"))
            .collect();
        Error::NoBracket(format!(
            "value {t} not reached along the ray; last samples {}",
            shown.join(", ")
        ))
    })?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if value(mid) >= t {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (vl, vh) = (value(lo), value(hi));
    let s = if (vl - t).abs() <= (vh - t).abs() { lo } else { hi };
    Ok(at(s))
}
