//! Numerical margin for the genericity condition `xi1 / xi2 != eta / zeta` over lifts
//! `xi1, xi2` of two poles and `eta, zeta` of a second-factor pole.
//!
//! Each ratio is compared through its logarithm, split into a part fixed by which ends of the
//! cover the lifts approach and a remainder kept in scaled form. The discrepancy of two log-ratios
//! `X = c_X + x`, `Y = c_Y + y` is `dist(X - Y, 2 pi i Z) / (|x| + |y|)`, capped at 1. It vanishes
//! exactly when the ratios coincide and does not collapse for lifts far out in the cover, where
//! all ratios crowd towards a few boundary values.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::cover::CoverMap;

/// Bucket width in log-modulus and argument for the same-constant comparison.
const BUCKET: f64 = 0.01;

#[derive(Debug, Clone, Copy)]
struct Scaled {
    mantissa: Complex64,
    exponent: f64,
}

impl Scaled {
    fn is_zero(&self) -> bool {
        self.mantissa == Complex64::new(0.0, 0.0)
    }

    fn ln_norm(&self) -> f64 {
        self.mantissa.norm().ln() + self.exponent
    }

    fn to_f64(self) -> Complex64 {
        if self.exponent < -745.0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.mantissa * self.exponent.exp()
        }
    }

    fn norm(&self) -> f64 {
        self.to_f64().norm()
    }

    fn sub(self, other: Scaled) -> Scaled {
        if self.is_zero() {
            return Scaled {
                mantissa: -other.mantissa,
                exponent: other.exponent,
            };
        }
        if other.is_zero() {
            return self;
        }
        let e = self.exponent.max(other.exponent);
        Scaled {
            mantissa: self.mantissa * (self.exponent - e).exp() - other.mantissa * (other.exponent - e).exp(),
            exponent: e,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct LogRatio {
    constant: Complex64,
    rest: Scaled,
}

fn wrap(c: Complex64) -> Complex64 {
    let t = c.im.rem_euclid(TAU);
    Complex64::new(c.re, if t > PI { t - TAU } else { t })
}

fn log_ratios(cover: &CoverMap, first: Complex64, second: Complex64, count: usize) -> Vec<LogRatio> {
    let logs = |p: Complex64| -> Vec<(Complex64, Scaled)> {
        cover
            .lifts(p, count)
            .iter()
            .map(|l| {
                let (c, m, e) = cover.log_point(l);
                (
                    c,
                    Scaled {
                        mantissa: m,
                        exponent: e,
                    },
                )
            })
            .collect()
    };
    let (l1, l2) = (logs(first), logs(second));
    let mut out = Vec::with_capacity(l1.len() * l2.len());
    for &(c1, s1) in &l1 {
        for &(c2, s2) in &l2 {
            out.push(LogRatio {
                constant: wrap(c1 - c2),
                rest: s1.sub(s2),
            });
        }
    }
    out
}

fn discrepancy(x: &LogRatio, y: &LogRatio) -> f64 {
    let c = wrap(x.constant - y.constant);
    if c == Complex64::new(0.0, 0.0) {
        let (a, b) = (x.rest, y.rest);
        if a.is_zero() && b.is_zero() {
            return 0.0;
        }
        let e = a.exponent.max(b.exponent);
        let am = if a.is_zero() {
            a.mantissa
        } else {
            a.mantissa * (a.exponent - e).exp()
        };
        let bm = if b.is_zero() {
            b.mantissa
        } else {
            b.mantissa * (b.exponent - e).exp()
        };
        let den = am.norm() + bm.norm();
        let num = if e > -1.0 {
            // Values of order one may differ by a multiple of 2 pi i.
            wrap((am - bm) * e.exp()).norm() / e.exp()
        } else {
            (am - bm).norm()
        };
        return (num / den).min(1.0);
    }
    let (a, b) = (x.rest.to_f64(), y.rest.to_f64());
    let num = wrap(c + a - b).norm();
    let den = a.norm() + b.norm();
    if den == 0.0 {
        1.0
    } else {
        (num / den).min(1.0)
    }
}

fn key(v: &Scaled, arg_buckets: i64) -> (i64, i64) {
    let r = (v.ln_norm() / BUCKET).floor() as i64;
    let width = TAU / arg_buckets as f64;
    let t = (((v.mantissa.arg() + PI) / width).floor() as i64).rem_euclid(arg_buckets);
    (r, t)
}

/// Smallest discrepancy between the two sets of log-ratios, capped at 1; pairs never compared
/// exactly are covered by an analytic lower bound.
fn set_margin(xs: &[LogRatio], ys: &[LogRatio]) -> f64 {
    let group = |v: &[LogRatio]| {
        let mut g: HashMap<(u64, u64), Vec<LogRatio>> = HashMap::new();
        for r in v {
            g.entry((r.constant.re.to_bits(), r.constant.im.to_bits()))
                .or_default()
                .push(*r);
        }
        let mut out: Vec<Vec<LogRatio>> = g.into_values().collect();
        out.sort_by(|a, b| {
            let (ca, cb) = (a[0].constant, b[0].constant);
            ca.re.total_cmp(&cb.re).then(ca.im.total_cmp(&cb.im))
        });
        out
    };
    let (gx, gy) = (group(xs), group(ys));
    let mut margin: f64 = 1.0;
    for x_group in &gx {
        for y_group in &gy {
            let c = wrap(x_group[0].constant - y_group[0].constant);
            let m = if c == Complex64::new(0.0, 0.0) {
                same_constant_margin(x_group, y_group)
            } else {
                shifted_margin(x_group, y_group, c.norm())
            };
            margin = margin.min(m);
        }
    }
    margin
}

/// Pairs whose remainders are both small against the constant gap `g` have discrepancy at
/// least 1 and are skipped.
fn shifted_margin(xs: &[LogRatio], ys: &[LogRatio], g: f64) -> f64 {
    let big = |v: &LogRatio| v.rest.norm() > 0.25 * g;
    let mut m: f64 = 1.0;
    for x in xs.iter().filter(|v| big(v)) {
        for y in ys {
            m = m.min(discrepancy(x, y));
        }
    }
    for y in ys.iter().filter(|v| big(v)) {
        for x in xs {
            m = m.min(discrepancy(x, y));
        }
    }
    m
}

/// Relative comparison by buckets in (log-modulus, argument). Two remainders with discrepancy
/// below `tanh(BUCKET / 2)` sit in adjacent buckets, since a modulus ratio `e^h` or an angle `h`
/// between them forces the discrepancy above `tanh(h / 2)` resp. `sin(h / 2)`.
fn same_constant_margin(xs: &[LogRatio], ys: &[LogRatio]) -> f64 {
    let arg_buckets = (TAU / BUCKET).floor() as i64;
    // Zero remainders and remainders of order one (where the 2 pi i wrap matters) are compared
    // with everything.
    let special = |v: &LogRatio| v.rest.is_zero() || v.rest.ln_norm() >= 0.0;
    let mut m = (0.5 * BUCKET).tanh();
    for x in xs.iter().filter(|v| special(v)) {
        for y in ys {
            m = m.min(discrepancy(x, y));
        }
    }
    for y in ys.iter().filter(|v| special(v)) {
        for x in xs {
            m = m.min(discrepancy(x, y));
        }
    }
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, x) in xs.iter().enumerate().filter(|(_, v)| !special(v)) {
        buckets.entry(key(&x.rest, arg_buckets)).or_default().push(i);
    }
    for y in ys.iter().filter(|v| !special(v)) {
        let (r, t) = key(&y.rest, arg_buckets);
        for dr in -1..=1 {
            for dt in -1..=1 {
                let k = (r + dr, (t + dt).rem_euclid(arg_buckets));
                if let Some(list) = buckets.get(&k) {
                    for &i in list {
                        m = m.min(discrepancy(&xs[i], y));
                    }
                }
            }
        }
    }
    m
}

/// Margin of the genericity condition over the first `count` lifts of `a1`, `a2` under `tau`
/// and of `b` under `pi`.
pub fn genericity_margin(
    tau: &CoverMap,
    a1: Complex64,
    a2: Complex64,
    pi: &CoverMap,
    b: Complex64,
    count: usize,
) -> f64 {
    let xs = log_ratios(tau, a1, a2, count);
    let ys = log_ratios(pi, b, b, count);
    set_margin(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::PlaneDomain;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn brute(xs: &[LogRatio], ys: &[LogRatio]) -> f64 {
        let mut m: f64 = 1.0;
        for x in xs {
            for y in ys {
                m = m.min(discrepancy(x, y));
            }
        }
        m
    }

    #[test]
    fn bucketed_margin_matches_brute_force_below_the_bucket_bound() {
        let tau = CoverMap::new(PlaneDomain::annulus(0.3).unwrap(), c(0.1, 0.5)).unwrap();
        let pi = CoverMap::new(PlaneDomain::annulus(0.2).unwrap(), c(-0.4, 0.1)).unwrap();
        let xs = log_ratios(&tau, c(0.6, 0.2), c(-0.3, -0.5), 25);
        let ys = log_ratios(&pi, c(0.2, 0.6), c(0.2, 0.6), 25);
        let fast = set_margin(&xs, &ys);
        let slow = brute(&xs, &ys).min((0.5 * BUCKET).tanh());
        assert_eq!(fast, slow);
    }

    #[test]
    fn coinciding_ratio_has_zero_margin() {
        // With equal covers and a1 = a2 = b, xi1 = eta and xi2 = zeta realize the same ratio.
        let d = PlaneDomain::annulus(0.4).unwrap();
        let tau = CoverMap::new(d, c(0.5, 0.1)).unwrap();
        let m = genericity_margin(&tau, c(0.7, 0.2), c(-0.6, 0.3), &tau, c(0.1, -0.8), 10);
        assert!(m > 1e-6);
        let m = genericity_margin(&tau, c(0.7, 0.2), c(0.7, 0.2), &tau, c(0.7, 0.2), 10);
        assert_eq!(m, 0.0);
    }

    #[test]
    fn far_lifts_stay_resolved() {
        let tau = CoverMap::new(PlaneDomain::annulus(0.3).unwrap(), c(0.1, 0.5)).unwrap();
        let pi = CoverMap::new(PlaneDomain::annulus(0.5).unwrap(), c(-0.6, 0.2)).unwrap();
        let m = genericity_margin(&tau, c(0.6, 0.2), c(-0.3, -0.5), &pi, c(0.1, -0.7), 200);
        assert!(m > 1e-6, "{m}");
    }

    #[test]
    fn scaled_subtraction() {
        let a = Scaled {
            mantissa: c(1.0, 0.0),
            exponent: -1000.0,
        };
        let b = Scaled {
            mantissa: c(0.5, 0.0),
            exponent: -1000.0,
        };
        let d = a.sub(b);
        assert!((d.mantissa.re - 0.5).abs() < 1e-15 && d.exponent == -1000.0);
        assert!((d.ln_norm() - (0.5f64.ln() - 1000.0)).abs() < 1e-12);
    }
}
