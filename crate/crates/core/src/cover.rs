//! Universal covering maps of the punctured disc and the annulus, normalized at a base point,
//! and enumeration of the lifts of a point ordered by modulus.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::domain::PlaneDomain;
use crate::error::Result;
use crate::kernel::{moebius, moebius_defect};

/// `pi_z = pi . moebius(base_lift, .)` with `pi` the fixed cover of the domain.
///
/// Lifts are tracked through model coordinates: the strip `|Im s| < pi/2` with `x = tanh(s/2)`
/// for the annulus, the left half-plane with `x = (w+1)/(w-1)` for the punctured disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverMap {
    domain: PlaneDomain,
    base: Complex64,
    base_winding: i64,
    base_model: Complex64,
    base_lift: Complex64,
}

/// One preimage `xi` of a point under `pi_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lift {
    pub winding: i64,
    /// Model coordinate of `moebius(base_lift, xi)`.
    pub model: Complex64,
    pub point: Complex64,
    /// `1 - |point|^2`, computed from model coordinates without cancellation.
    pub defect: f64,
}

impl Lift {
    pub fn modulus(&self) -> f64 {
        (1.0 - self.defect).max(0.0).sqrt()
    }

    pub fn log_modulus(&self) -> f64 {
        0.5 * (-self.defect).ln_1p()
    }

    /// `1 - |point|`.
    pub fn gap(&self) -> f64 {
        self.defect / (1.0 + self.modulus())
    }
}

/// Stopping rule for lift enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    Count(usize),
    /// Stop once `1 - |xi|` falls below this.
    Gap(f64),
}

fn annulus_len(domain: PlaneDomain) -> f64 {
    match domain {
        PlaneDomain::Annulus { inner } => -inner.ln(),
        _ => unreachable!("strip length requested for a non-annulus"),
    }
}

/// `tanh` that stays finite far out in the strip.
fn tanh_strip(q: Complex64) -> Complex64 {
    if q.re >= 0.0 {
        let e = (-2.0 * q).exp();
        (1.0 - e) / (1.0 + e)
    } else {
        -tanh_strip(-q)
    }
}

fn model_point(domain: PlaneDomain, a: Complex64, k: i64) -> Complex64 {
    let theta = a.arg() + TAU * k as f64;
    match domain {
        PlaneDomain::UnitDisc => a,
        PlaneDomain::PuncturedDisc => Complex64::new(a.norm().ln(), theta),
        PlaneDomain::Annulus { .. } => {
            let len = annulus_len(domain);
            Complex64::new(PI / len * theta, -PI / len * (a.norm().ln() + 0.5 * len))
        }
    }
}

fn model_to_disc(domain: PlaneDomain, m: Complex64) -> Complex64 {
    match domain {
        PlaneDomain::UnitDisc => m,
        PlaneDomain::PuncturedDisc => (m + 1.0) / (m - 1.0),
        PlaneDomain::Annulus { .. } => tanh_strip(0.5 * m),
    }
}

fn model_to_plane(domain: PlaneDomain, m: Complex64) -> Complex64 {
    match domain {
        PlaneDomain::UnitDisc => m,
        PlaneDomain::PuncturedDisc => m.exp(),
        PlaneDomain::Annulus { .. } => {
            let len = annulus_len(domain);
            (Complex64::new(0.0, len / PI) * m - 0.5 * len).exp()
        }
    }
}

fn wrap_angle(t: f64) -> f64 {
    let w = t.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// `cosh(q) / cosh(conj q)`, a unimodular number, without overflow.
fn cosh_phase(q: Complex64) -> Complex64 {
    let e = (-2.0 * q.re.abs()).exp();
    let y = if q.re >= 0.0 { q.im } else { -q.im };
    let u = Complex64::from_polar(1.0, y);
    (u + e * u.conj()) / (u.conj() + e * u)
}

/// `sinh(d) / cosh(e)` for `Re d = Re e`, without overflow.
fn sinh_over_cosh(d: Complex64, e: Complex64) -> Complex64 {
    debug_assert!((d.re - e.re).abs() <= 1e-9 * (1.0 + d.re.abs()));
    let x = d.re;
    let damp = (-2.0 * x.abs()).exp();
    let ud = Complex64::from_polar(1.0, d.im);
    let ue = Complex64::from_polar(1.0, e.im);
    if x >= 0.0 {
        (ud - damp * ud.conj()) / (ue + damp * ue.conj())
    } else {
        (damp * ud - ud.conj()) / (damp * ue + ue.conj())
    }
}

/// The fixed cover `pi` (before normalization).
pub fn raw_cover(domain: PlaneDomain, zeta: Complex64) -> Complex64 {
    match domain {
        PlaneDomain::UnitDisc => zeta,
        PlaneDomain::PuncturedDisc => ((zeta + 1.0) / (zeta - 1.0)).exp(),
        PlaneDomain::Annulus { .. } => {
            let len = annulus_len(domain);
            let s = ((1.0 + zeta) / (1.0 - zeta)).ln();
            (Complex64::new(0.0, len / PI) * s - 0.5 * len).exp()
        }
    }
}

/// `1 - rho^2` for the pseudo-hyperbolic distance between the disc points of two model coordinates.
fn pair_defect(domain: PlaneDomain, m1: Complex64, m0: Complex64) -> f64 {
    match domain {
        PlaneDomain::UnitDisc => moebius_defect(m1, m0),
        PlaneDomain::PuncturedDisc => {
            let dt = m1.im - m0.im;
            let sum = m1.re + m0.re;
            4.0 * m1.re * m0.re / (sum * sum + dt * dt)
        }
        PlaneDomain::Annulus { .. } => {
            let sh = (0.5 * (m1.re - m0.re)).sinh();
            let cs = (0.5 * (m1.im + m0.im)).cos();
            m1.im.cos() * m0.im.cos() / (sh * sh + cs * cs)
        }
    }
}

impl CoverMap {
    /// Normalized cover with the lift of `z` of least modulus as base lift
    /// (ties go to the smallest nonnegative argument).
    pub fn new(domain: PlaneDomain, z: Complex64) -> Result<Self> {
        domain.require_interior(z)?;
        if domain == PlaneDomain::UnitDisc {
            return Ok(Self::with_base_winding_unchecked(domain, z, 0));
        }
        let key = |k: i64| {
            let x = model_to_disc(domain, model_point(domain, z, k));
            (x.norm(), x.arg().rem_euclid(TAU))
        };
        let best = [0, 1, -1]
            .into_iter()
            .min_by(|&i, &j| {
                let (ri, ai) = key(i);
                let (rj, aj) = key(j);
                ri.total_cmp(&rj).then(ai.total_cmp(&aj))
            })
            .expect("nonempty candidates");
        Ok(Self::with_base_winding_unchecked(domain, z, best))
    }

    /// Normalized cover whose base lift is the lift of `z` with the given winding number.
    pub fn with_base_winding(domain: PlaneDomain, z: Complex64, winding: i64) -> Result<Self> {
        domain.require_interior(z)?;
        Ok(Self::with_base_winding_unchecked(domain, z, winding))
    }

    fn with_base_winding_unchecked(domain: PlaneDomain, z: Complex64, winding: i64) -> Self {
        let winding = if domain == PlaneDomain::UnitDisc { 0 } else { winding };
        let base_model = model_point(domain, z, winding);
        Self {
            domain,
            base: z,
            base_winding: winding,
            base_model,
            base_lift: model_to_disc(domain, base_model),
        }
    }

    pub fn domain(&self) -> PlaneDomain {
        self.domain
    }

    pub fn base(&self) -> Complex64 {
        self.base
    }

    pub fn base_lift(&self) -> Complex64 {
        self.base_lift
    }

    pub fn base_winding(&self) -> i64 {
        self.base_winding
    }

    pub(crate) fn base_model(&self) -> Complex64 {
        self.base_model
    }

    /// `pi_z(zeta)`.
    pub fn apply(&self, zeta: Complex64) -> Complex64 {
        match self.domain {
            PlaneDomain::UnitDisc => moebius(self.base, zeta),
            d => model_to_plane(d, self.model_of(zeta)),
        }
    }

    /// Model coordinate of `moebius(base_lift, zeta)`, computed without passing through the
    /// disc point itself (which may sit extremely close to the circle).
    fn model_of(&self, zeta: Complex64) -> Complex64 {
        let m0 = self.base_model;
        match self.domain {
            PlaneDomain::UnitDisc => moebius(self.base, zeta),
            PlaneDomain::PuncturedDisc => {
                let c0 = m0.conj();
                (m0 * (c0 - 1.0) - zeta * c0 * (m0 - 1.0)) / ((c0 - 1.0) + zeta * (m0 - 1.0))
            }
            PlaneDomain::Annulus { .. } => {
                let q0 = 0.5 * m0;
                let r = zeta * cosh_phase(q0);
                let turn = Complex64::from_polar(1.0, 2.0 * q0.im);
                let s = m0 + ((1.0 - r / turn) / (1.0 + r * turn)).ln();
                Complex64::new(s.re, wrap_angle(s.im))
            }
        }
    }

    /// `moebius(base_lift, x)` for the disc point `x` with model coordinate `m`.
    fn point_of_model(&self, m: Complex64) -> Complex64 {
        let m0 = self.base_model;
        match self.domain {
            PlaneDomain::UnitDisc => moebius(self.base, m),
            PlaneDomain::PuncturedDisc => (m0 - m) / (m + m0.conj()) * ((m0.conj() - 1.0) / (m0 - 1.0)),
            PlaneDomain::Annulus { .. } => {
                let q0 = 0.5 * m0;
                let q = 0.5 * m;
                sinh_over_cosh(q0 - q, q0.conj() - q) / cosh_phase(q0)
            }
        }
    }

    /// `log(point)` of a lift split as `constant + mantissa * exp(exponent)`, where the constant
    /// only depends on which end of the model the lift lies towards. Far out in an annulus strip
    /// the second part underflows in plain floating point, so it is kept in scaled form.
    pub(crate) fn log_point(&self, lift: &Lift) -> (Complex64, Complex64, f64) {
        let zero = Complex64::new(0.0, 0.0);
        if !matches!(self.domain, PlaneDomain::Annulus { .. }) {
            return (zero, lift.point.ln(), 0.0);
        }
        let q0 = 0.5 * self.base_model;
        let q = 0.5 * lift.model;
        let log_rho = Complex64::new(0.0, cosh_phase(q0).arg());
        // Right end: log = i(pi - 2 y0) - log rho + ln(1 - e^{2w}) - ln(1 + e^{2v}),
        // w = q0 - q, v = conj(q0) - q; the left end mirrors it with e^{-2w}, e^{-2v}.
        let right = q.re >= q0.re;
        let (constant, w, v) = if right {
            (Complex64::new(0.0, PI - 2.0 * q0.im) - log_rho, q0 - q, q0.conj() - q)
        } else {
            (Complex64::new(0.0, 2.0 * q0.im) - log_rho, q - q0, q - q0.conj())
        };
        let exponent = 2.0 * w.re;
        let u1 = Complex64::from_polar(1.0, 2.0 * w.im);
        let u2 = Complex64::from_polar(1.0, 2.0 * v.im);
        if exponent < -1.0 {
            // sum_k ((-e^{2v})^k - e^{2kw}) / k, divided by e^{exponent}.
            let eps = exponent.exp();
            let (mut p1, mut p2) = (u1, -u2);
            let mut scale = 1.0;
            let mut mantissa = Complex64::new(0.0, 0.0);
            for k in 1..=60 {
                let term = (p2 - p1) * (scale / k as f64);
                mantissa += term;
                if term.norm() <= 1e-17 * mantissa.norm() {
                    break;
                }
                p1 *= u1;
                p2 *= -u2;
                scale *= eps;
            }
            (constant, mantissa, exponent)
        } else {
            let e1 = u1 * exponent.exp();
            let e2 = u2 * exponent.exp();
            (constant, (1.0 - e1).ln() - (1.0 + e2).ln(), 0.0)
        }
    }

    fn lift_at(&self, a: Complex64, k: i64) -> Lift {
        let model = model_point(self.domain, a, k);
        let point = self.point_of_model(model);
        Lift {
            winding: k,
            model,
            point,
            defect: pair_defect(self.domain, model, self.base_model),
        }
    }

    /// Winding number of the lift of `a` closest to the base lift.
    fn nearest_winding(&self, a: Complex64) -> i64 {
        let theta = a.arg();
        let t0 = match self.domain {
            PlaneDomain::UnitDisc => return 0,
            PlaneDomain::PuncturedDisc => self.base_model.im,
            PlaneDomain::Annulus { .. } => self.base_model.re * annulus_len(self.domain) / PI,
        };
        ((t0 - theta) / TAU).round() as i64
    }

    /// Lifts of `a` in order of increasing modulus.
    pub fn walk(&self, a: Complex64) -> LiftWalk<'_> {
        let center = self.nearest_winding(a);
        LiftWalk {
            cover: self,
            a,
            center: Some(self.lift_at(a, center)),
            left: None,
            right: None,
            next_left: center - 1,
            next_right: center + 1,
        }
    }

    /// The `count` lifts of `a` of smallest modulus, ascending.
    pub fn lifts(&self, a: Complex64, count: usize) -> Vec<Lift> {
        self.walk(a).take(count).collect()
    }

    pub fn min_lift(&self, a: Complex64) -> Lift {
        self.walk(a).next().expect("every point has a lift")
    }

    /// Moduli of lifts of `a`, ascending, until the cutoff is met.
    pub fn preimage_moduli(&self, a: Complex64, cutoff: Cutoff) -> Vec<f64> {
        let mut out = Vec::new();
        for lift in self.walk(a) {
            match cutoff {
                Cutoff::Count(k) if out.len() >= k => break,
                Cutoff::Gap(g) if lift.gap() < g => break,
                _ => {}
            }
            out.push(lift.modulus());
        }
        out
    }
}

/// Merges the lifts on both sides of the nearest one; each side is monotone in modulus.
#[derive(Debug, Clone)]
pub struct LiftWalk<'a> {
    cover: &'a CoverMap,
    a: Complex64,
    center: Option<Lift>,
    left: Option<Lift>,
    right: Option<Lift>,
    next_left: i64,
    next_right: i64,
}

impl LiftWalk<'_> {
    fn fill(&mut self) {
        if self.cover.domain == PlaneDomain::UnitDisc {
            return;
        }
        if self.left.is_none() {
            self.left = Some(self.cover.lift_at(self.a, self.next_left));
            self.next_left -= 1;
        }
        if self.right.is_none() {
            self.right = Some(self.cover.lift_at(self.a, self.next_right));
            self.next_right += 1;
        }
    }

    /// Model-coordinate distances from the base lift to the nearest unvisited lift on each side.
    pub(crate) fn frontier(&mut self) -> Option<(f64, f64)> {
        if self.center.is_some() || self.cover.domain == PlaneDomain::UnitDisc {
            return None;
        }
        self.fill();
        let base = self.cover.base_model;
        let dist = |l: &Lift| match self.cover.domain {
            PlaneDomain::PuncturedDisc => (l.model.im - base.im).abs(),
            _ => (l.model.re - base.re).abs(),
        };
        Some((dist(self.left.as_ref()?), dist(self.right.as_ref()?)))
    }
}

impl Iterator for LiftWalk<'_> {
    type Item = Lift;

    fn next(&mut self) -> Option<Lift> {
        if let Some(c) = self.center.take() {
            return Some(c);
        }
        if self.cover.domain == PlaneDomain::UnitDisc {
            return None;
        }
        self.fill();
        let (l, r) = (self.left.unwrap(), self.right.unwrap());
        if l.defect >= r.defect {
            self.left = None;
            Some(l)
        } else {
            self.right = None;
            Some(r)
        }
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
    fn log_point_matches_direct_logarithm() {
        let d = PlaneDomain::annulus(0.3).unwrap();
        let cov = CoverMap::new(d, c(0.2, -0.5)).unwrap();
        for lift in cov.lifts(c(-0.4, 0.6), 7) {
            let (k, m, e) = cov.log_point(&lift);
            let direct = lift.point.ln();
            let split = k + m * e.exp();
            let diff = split - direct;
            let wrapped = Complex64::new(diff.re, wrap_angle(diff.im));
            assert!(wrapped.norm() < 1e-12, "{lift:?} {split} {direct}");
        }
        // Far lifts: the scaled part carries the full modulus deficit.
        for lift in cov.lifts(c(-0.4, 0.6), 40).iter().skip(30) {
            let (_, m, e) = cov.log_point(lift);
            let log_mod = lift.log_modulus();
            assert!(((m.re * e.exp()) - log_mod).abs() <= 1e-9 * log_mod.abs(), "{lift:?}");
        }
    }

    #[test]
    fn raw_covers_at_origin() {
        let r: f64 = 0.3;
        let v = raw_cover(PlaneDomain::annulus(r).unwrap(), c(0.0, 0.0));
        assert!((v - c(r.sqrt(), 0.0)).norm() < 1e-15);
        let v = raw_cover(PlaneDomain::PuncturedDisc, c(0.0, 0.0));
        assert!((v - c((-1.0f64).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn base_lift_has_minimal_modulus() {
        let d = PlaneDomain::annulus(0.3).unwrap();
        let z = c(-0.6, 1e-17);
        let cov = CoverMap::new(d, z).unwrap();
        for k in -3..=3 {
            let other = CoverMap::with_base_winding(d, z, k).unwrap();
            assert!(cov.base_lift().norm() <= other.base_lift().norm() + 1e-15);
        }
    }

    #[test]
    fn tie_breaks_to_nonnegative_argument() {
        let d = PlaneDomain::PuncturedDisc;
        let cov = CoverMap::new(d, c(-0.5, 0.0)).unwrap();
        assert!(cov.base_lift().arg() >= 0.0);
    }

    #[test]
    fn lift_through_base_is_zero() {
        for d in [
            PlaneDomain::UnitDisc,
            PlaneDomain::PuncturedDisc,
            PlaneDomain::annulus(0.2).unwrap(),
        ] {
            let z = c(0.4, 0.5);
            let cov = CoverMap::new(d, z).unwrap();
            let l = cov.min_lift(z);
            assert_eq!(l.defect, 1.0);
            assert!(l.point.norm() < 1e-15);
            assert_eq!(cov.preimage_moduli(z, Cutoff::Count(1)), vec![0.0]);
        }
    }

    #[test]
    fn disc_has_a_single_lift() {
        let cov = CoverMap::new(PlaneDomain::UnitDisc, c(0.1, 0.2)).unwrap();
        assert_eq!(cov.lifts(c(-0.3, 0.0), 5).len(), 1);
    }

    #[test]
    fn moduli_increase_to_one() {
        let d = PlaneDomain::annulus(0.3).unwrap();
        let cov = CoverMap::new(d, c(0.1, 0.7)).unwrap();
        let m = cov.preimage_moduli(c(-0.5, 0.2), Cutoff::Count(6));
        assert!(m.windows(2).all(|w| w[0] <= w[1]));
        let g = cov.preimage_moduli(c(-0.5, 0.2), Cutoff::Gap(1e-9));
        assert!(!g.is_empty() && g.len() < 10);
    }

    #[test]
    fn gap_decays_exponentially_in_the_annulus() {
        let r: f64 = 0.3;
        let d = PlaneDomain::annulus(r).unwrap();
        let cov = CoverMap::new(d, c(0.5, 0.1)).unwrap();
        let lifts = cov.lifts(c(0.6, -0.3), 12);
        // Consecutive lifts on one side sit a deck translation 2 pi^2 / L apart in the strip,
        // and 1 - |xi| decays like exp(-|u|) there.
        let period = 2.0 * PI * PI / -r.ln();
        let same_side: Vec<_> = lifts.iter().filter(|l| l.winding > lifts[0].winding).collect();
        for w in same_side.windows(2) {
            let rate = (w[0].defect / w[1].defect).ln();
            assert!((rate - period).abs() < 1e-6 * period, "{rate} vs {period}");
        }
    }

    fn interior(domain: PlaneDomain) -> impl Strategy<Value = Complex64> {
        let lo = match domain {
            PlaneDomain::Annulus { inner } => inner + 0.01,
            _ => 0.02,
        };
        (lo..0.98f64, -PI..PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
    }

    fn domains() -> impl Strategy<Value = PlaneDomain> {
        prop_oneof![
            Just(PlaneDomain::UnitDisc),
            Just(PlaneDomain::PuncturedDisc),
            Just(PlaneDomain::Annulus { inner: 0.1 }),
            Just(PlaneDomain::Annulus { inner: 0.5 }),
        ]
    }

    proptest! {
        #[test]
        fn maps_into_domain((d, z) in domains().prop_flat_map(|d| (Just(d), interior(d))), r in 0.0..0.999f64, t in -PI..PI) {
            let cov = CoverMap::new(d, z).unwrap();
            prop_assert!(d.contains(cov.apply(Complex64::from_polar(r, t))));
        }

        #[test]
        fn normalized_at_base((d, z) in domains().prop_flat_map(|d| (Just(d), interior(d)))) {
            let cov = CoverMap::new(d, z).unwrap();
            prop_assert!((cov.apply(c(0.0, 0.0)) - z).norm() < 1e-12);
        }

        #[test]
        fn lifts_cover_the_point((d, z, a) in domains().prop_flat_map(|d| (Just(d), interior(d), interior(d)))) {
            let cov = CoverMap::new(d, z).unwrap();
            for l in cov.lifts(a, 6) {
                if l.point.norm() < 0.999 {
                    prop_assert!((cov.apply(l.point) - a).norm() < 1e-11);
                }
                prop_assert!((l.defect - (1.0 - l.point.norm_sqr())).abs() < 1e-12);
            }
        }

        #[test]
        fn deck_invariance((d, z, a) in domains().prop_flat_map(|d| (Just(d), interior(d), interior(d))), shift in -3i64..=3) {
            let cov = CoverMap::new(d, z).unwrap();
            let other = CoverMap::with_base_winding(d, z, cov.base_winding() + shift).unwrap();
            let m1 = cov.preimage_moduli(a, Cutoff::Count(8));
            let m2 = other.preimage_moduli(a, Cutoff::Count(8));
            for (x, y) in m1.iter().zip(&m2) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }

        #[test]
        fn walk_is_sorted((d, z, a) in domains().prop_flat_map(|d| (Just(d), interior(d), interior(d)))) {
            let cov = CoverMap::new(d, z).unwrap();
            let lifts = cov.lifts(a, 40);
            prop_assert!(lifts.windows(2).all(|w| w[0].defect >= w[1].defect));
        }
    }
}
