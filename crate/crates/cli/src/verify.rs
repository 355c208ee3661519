//! The acceptance criteria, runnable from `lempert verify` and from the `acceptance` test target.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use lempert::cover::CoverMap;
use lempert::interpolation::{curves_gh, lemma4_solve, Lemma4Problem};
use lempert::optimizer::{bidisc_lempert, OptimizerSettings};
use lempert::plane::{green_plane, lempert_n_plane};
use lempert::product::{prop10_construct, theorem5_bounds};
use lempert::{PlaneDomain, PoleSet};

use crate::commands::VerifyArgs;
use crate::json::{self, complexes};
use crate::{Outcome, EXIT_NUMERIC, EXIT_OK, EXIT_VALIDATION};

/// Margin of the bidisc optimum over 1/4 for `A = {0.5, 0.5i}`, `B = {0.5, -0.5}`, obtained offline
/// by a grid over node shapes followed by random local refinement (see `tests/bidisc_oracle.rs`).
pub const FAILURE_CASE_ORACLE_DELTA: f64 = 0.021341188322;

const DEFAULTS: &[(&str, f64)] = &[
    ("c1.instances", 500.0),
    ("c1.tol", 1e-9),
    ("c1.seconds", 10.0),
    ("c2.tol", 1e-12),
    ("c2.grid", 1024.0),
    ("c2.endpoint_tol", 1e-3),
    ("c3.cases", 100.0),
    ("c3.tol", 1e-8),
    ("c3.seconds", 2.0),
    ("c4.cases", 20.0),
    ("c4.tol", 1e-6),
    ("c5.decrement", 1e-12),
    ("c6.cases", 50.0),
    ("c6.order_tol", 1e-12),
    ("c6.equal_tol", 1e-9),
    ("c6.gap", 1e-6),
    ("c7.expected", 0.25),
    ("c7.tol", 1e-6),
    ("c7.floor_tol", 1e-12),
    ("c7.restarts", 200.0),
    ("c7.seconds", 30.0),
    ("c8.restarts", 500.0),
    ("c8.oracle_delta", FAILURE_CASE_ORACLE_DELTA),
    ("c8.tol", 1e-3),
    ("c9.tol", 1e-10),
    ("c9.margin", 1e-6),
    ("c10.threads", 4.0),
];

/// Thresholds and expected values, each adjustable by key.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    values: BTreeMap<&'static str, f64>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            values: DEFAULTS.iter().copied().collect(),
        }
    }
}

impl Config {
    pub fn get(&self, key: &str) -> f64 {
        self.values[key]
    }

    fn count(&self, key: &str) -> usize {
        self.get(key).max(0.0) as usize
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<(), String> {
        match self.values.get_mut(key) {
            Some(v) => {
                *v = value;
                Ok(())
            }
            None => Err(format!("unknown setting `{key}`")),
        }
    }

    /// Applies `KEY=VALUE` overrides.
    pub fn apply(&mut self, overrides: &[String]) -> Result<(), String> {
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| format!("expected KEY=VALUE, got `{o}`"))?;
            let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Le,
    Lt,
    Gt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub op: Op,
    pub limit: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        match self.op {
            Op::Le => self.value <= self.limit,
            Op::Lt => self.value < self.limit,
            Op::Gt => self.value > self.limit,
        }
    }

    /// Signed distance to the limit, positive when passing.
    pub fn margin(&self) -> f64 {
        match self.op {
            Op::Le | Op::Lt => self.limit - self.value,
            Op::Gt => self.value - self.limit,
        }
    }

    fn to_json(&self) -> Value {
        let op = match self.op {
            Op::Le => "<=",
            Op::Lt => "<",
            Op::Gt => ">",
        };
        json!({"name": self.name, "value": self.value, "op": op, "limit": self.limit, "passed": self.passed()})
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub checks: Vec<Check>,
    /// Computed quantities; these are what the determinism criterion compares.
    pub values: Value,
    pub error: Option<String>,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(Check::passed)
    }

    /// Margin of the headline (first) check.
    pub fn margin(&self) -> f64 {
        self.checks.first().map_or(f64::NAN, Check::margin)
    }

    /// One human-readable line.
    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let detail = match &self.error {
            Some(e) => format!("error: {e}"),
            None => self
                .checks
                .iter()
                .filter(|c| !c.passed())
                .chain(
                    self.checks
                        .iter()
                        .filter(|c| c.passed())
                        .take(usize::from(self.passed())),
                )
                .map(|c| format!("{} = {:.6e} (limit {:.3e})", c.name, c.value, c.limit))
                .collect::<Vec<_>>()
                .join("; "),
        };
        format!(
            "{status} {:>2} {:<18} margin {:>11.3e}  {:.2}s  {detail}",
            self.id,
            self.name,
            self.margin(),
            self.seconds
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "name": self.name,
            "passed": self.passed(),
            "margin": self.margin(),
            "seconds": self.seconds,
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            "values": self.values,
            "error": self.error,
        })
    }
}

pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub group: &'static str,
    run: fn(&Config, Option<usize>) -> Result<Measured, String>,
}

struct Measured {
    checks: Vec<Check>,
    values: Value,
}

fn check(name: impl Into<String>, value: f64, op: Op, limit: f64) -> Check {
    Check {
        name: name.into(),
        value,
        op,
        limit,
    }
}

pub const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        name: "lemma4-roundtrip",
        group: "lemma4",
        run: lemma4_roundtrip,
    },
    Criterion {
        id: 2,
        name: "lemma4-anchors",
        group: "lemma4",
        run: lemma4_anchors,
    },
    Criterion {
        id: 3,
        name: "punctured-green",
        group: "green",
        run: punctured_green,
    },
    Criterion {
        id: 4,
        name: "annulus-green",
        group: "green",
        run: annulus_green,
    },
    Criterion {
        id: 5,
        name: "monotonicity",
        group: "green",
        run: monotonicity,
    },
    Criterion {
        id: 6,
        name: "sandwich",
        group: "product",
        run: sandwich,
    },
    Criterion {
        id: 7,
        name: "rotation-equality",
        group: "bidisc",
        run: rotation_equality,
    },
    Criterion {
        id: 8,
        name: "rotation-failure",
        group: "bidisc",
        run: rotation_failure,
    },
    Criterion {
        id: 9,
        name: "construction",
        group: "product",
        run: construction,
    },
    Criterion {
        id: 10,
        name: "determinism",
        group: "determinism",
        run: determinism,
    },
];

impl Criterion {
    /// Whether a `--only` token selects this criterion: its number, its name or its group.
    pub fn selected_by(&self, token: &str) -> bool {
        let t = token.trim();
        t == self.id.to_string() || t == self.name || t == self.group
    }

    pub fn run(&self, config: &Config, threads: Option<usize>) -> CriterionReport {
        let start = Instant::now();
        let (checks, values, error) = match (self.run)(config, threads) {
            Ok(m) => (m.checks, m.values, None),
            Err(e) => (Vec::new(), Value::Null, Some(e)),
        };
        CriterionReport {
            id: self.id,
            name: self.name,
            checks,
            values,
            error,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

/// Criteria picked by `--only` tokens; all when `only` is empty.
pub fn select(only: &[String]) -> Result<Vec<&'static Criterion>, String> {
    if only.is_empty() {
        return Ok(CRITERIA.iter().collect());
    }
    if let Some(t) = only.iter().find(|t| !CRITERIA.iter().any(|c| c.selected_by(t))) {
        return Err(format!("no criterion matches `{t}`"));
    }
    Ok(CRITERIA
        .iter()
        .filter(|c| only.iter().any(|t| c.selected_by(t)))
        .collect())
}

/// `lempert verify`: JSON on stdout, one line per criterion on stderr.
pub fn command(args: &VerifyArgs) -> Outcome {
    let started = Instant::now();
    let mut config = Config::default();
    let chosen = config.apply(&args.overrides).and_then(|_| select(&args.only));
    let chosen = match chosen {
        Ok(c) => c,
        Err(e) => {
            let doc = json!({"error": {"kind": "invalid_parameter", "message": e}});
            return Outcome {
                code: EXIT_VALIDATION,
                stdout: String::new(),
                stderr: json::to_string_pretty(&doc) + "\n",
            };
        }
    };
    let mut stderr = String::new();
    let mut reports = Vec::new();
    for c in chosen {
        let r = c.run(&config, args.threads);
        stderr.push_str(&r.line());
        stderr.push('\n');
        reports.push(r);
    }
    let passed = reports.iter().all(CriterionReport::passed);
    let doc = json!({
        "command": "verify",
        "inputs": {"only": args.only, "threads": args.threads, "set": args.overrides},
        "passed": passed,
        "failed": reports.iter().filter(|r| !r.passed()).map(|r| r.name).collect::<Vec<_>>(),
        "criteria": reports.iter().map(CriterionReport::to_json).collect::<Vec<_>>(),
        "runtime_ms": started.elapsed().as_secs_f64() * 1e3,
    });
    Outcome {
        code: if passed { EXIT_OK } else { EXIT_NUMERIC },
        stdout: json::to_string_pretty(&doc) + "\n",
        stderr,
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn polar(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex64 {
    Complex64::from_polar(
        rng.random_range(lo..hi),
        rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
    )
}

fn err(e: lempert::Error) -> String {
    e.to_string()
}

fn lemma4_targets(rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let n = rng.random_range(1..=6);
    (0..n)
        .map(|_| {
            if rng.random_bool(0.1) {
                c(0.0, 0.0)
            } else {
                polar(rng, 0.05, 0.95)
            }
        })
        .collect()
}

fn lemma4_roundtrip(cfg: &Config, _: Option<usize>) -> Result<Measured, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let (mut residual, mut product_error) = (0.0f64, 0.0f64);
    let mut zeros = 0;
    let instances = cfg.count("c1.instances");
    for _ in 0..instances {
        let mu = lemma4_targets(&mut rng);
        zeros += mu.iter().filter(|m| m.norm() == 0.0).count();
        let p: f64 = mu.iter().map(|m| m.norm()).product();
        let q = p + (1.0 - p) * rng.random_range(f64::EPSILON..1.0);
        let problem = Lemma4Problem::new(mu.clone(), q).map_err(err)?;
        let s = lemma4_solve(&problem).map_err(err)?;
        residual = residual.max(s.residual(&mu));
        product_error = product_error.max((s.node_product() - q).abs());
    }
    let seconds = start.elapsed().as_secs_f64();
    Ok(Measured {
        checks: vec![
            check("max interpolation residual", residual, Op::Le, cfg.get("c1.tol")),
            check("max |prod|eta| - q|", product_error, Op::Le, cfg.get("c1.tol")),
            check("runtime seconds", seconds, Op::Lt, cfg.get("c1.seconds")),
        ],
        values: json!({"instances": instances, "zero_targets": zeros, "residual": residual, "product_error": product_error}),
    })
}

fn lemma4_anchors(cfg: &Config, _: Option<usize>) -> Result<Measured, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let grid = cfg.count("c2.grid");
    let (mut origin, mut product, mut low_end, mut high_end) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..20 {
        let n = rng.random_range(1..=6);
        let mu: Vec<Complex64> = (0..n).map(|_| polar(&mut rng, 0.05, 0.95)).collect();
        let p: f64 = mu.iter().map(|m| m.norm()).product();
        let (g0, h0) = curves_gh(&mu, 0.0).map_err(err)?;
        origin = origin.max((g0 - p.sqrt()).abs()).max((h0 - p.sqrt()).abs());
        for k in 0..grid {
            let (g, h) = curves_gh(&mu, k as f64 / grid as f64).map_err(err)?;
            product = product.max((g * h - p).abs());
        }
        let (g, h) = curves_gh(&mu, 1.0 - 1e-6).map_err(err)?;
        low_end = low_end.max((g - p).abs());
        high_end = high_end.max((h - 1.0).abs());
    }
    let tol = cfg.get("c2.tol");
    let end = cfg.get("c2.endpoint_tol");
    Ok(Measured {
        checks: vec![
            check("max |g(0) - sqrt p|, |h(0) - sqrt p|", origin, Op::Le, tol),
            check("max |g h - p| on grid", product, Op::Le, tol),
            check("max |g(1 - 1e-6) - p|", low_end, Op::Le, end),
            check("max |h(1 - 1e-6) - 1|", high_end, Op::Le, end),
        ],
        values: json!({"origin": origin, "product": product, "low_end": low_end, "high_end": high_end}),
    })
}

fn punctured_green(cfg: &Config, _: Option<usize>) -> Result<Measured, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let start = Instant::now();
    let (mut error, mut uncertified) = (0.0f64, 0usize);
    for _ in 0..cfg.count("c3.cases") {
        let a = polar(&mut rng, 0.02, 0.98);
        let z = polar(&mut rng, 0.02, 0.98);
        let exact = ((a - z) / (1.0 - a.conj() * z)).norm();
        let g = green_plane(PlaneDomain::PuncturedDisc, a, z, 1e-10).map_err(err)?;
        error = error.max((g.value - exact).abs());
        // The truncated product overestimates by at most the certified relative tail.
        if !(exact <= g.value && exact >= g.value * (1.0 - g.tail_bound) - 1e-15) {
            uncertified += 1;
        }
    }
    let seconds = start.elapsed().as_secs_f64();
    Ok(Measured {
        checks: vec![
            check("max |product - |moebius||", error, Op::Le, cfg.get("c3.tol")),
            check("cases outside the tail bound", uncertified as f64, Op::Le, 0.0),
            check("runtime seconds", seconds, Op::Lt, cfg.get("c3.seconds")),
        ],
        values: json!({"error": error}),
    })
}

/// Annulus Green function `exp(-G)` from the image series
/// `F(z) = log|z - a| - log|1 - conj(a) z| + sum_n [log|1 - R^2n z/a| + log|1 - R^2n a/z|
///         - log|1 - R^2n z conj(a)| - log|1 - R^2n / (z conj(a))|]`,
/// which vanishes on `|z| = 1` and equals `log|a|` on `|z| = R`; then
/// `G = -F + log|z| log|a| / log R`.
pub fn annulus_green_series(r: f64, a: Complex64, z: Complex64) -> f64 {
    let one = c(1.0, 0.0);
    let mut f = (z - a).norm().ln() - (one - a.conj() * z).norm().ln();
    let r2 = r * r;
    let mut q = r2;
    for _ in 0..10_000 {
        let term = (one - q * z / a).norm().ln() + (one - q * a / z).norm().ln()
            - (one - q * z * a.conj()).norm().ln()
            - (one - q / (z * a.conj())).norm().ln();
        f += term;
        if term.abs() < 1e-18 {
            break;
        }
        q *= r2;
    }
    (f - a.norm().ln() / r.ln() * z.norm().ln()).exp()
}

fn annulus_point(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    polar(rng, r + 0.05 * (1.0 - r), 1.0 - 0.05 * (1.0 - r))
}

fn annulus_green(cfg: &Config, _: Option<usize>) -> Result<Measured, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let radii = [0.1, 0.3, 0.6];
    let mut worst = 0.0f64;
    for k in 0..cfg.count("c4.cases") {
        let r = radii[k % radii.len()];
        let (a, z) = (annulus_point(&mut rng, r), annulus_point(&mut rng, r));
        let oracle = annulus_green_series(r, a, z);
        let g = green_plane(PlaneDomain::annulus(r).map_err(err)?, a, z, 1e-13).map_err(err)?;
        worst = worst.max((g.value - oracle).abs() / oracle);
    }
    Ok(Measured {
        checks: vec![check("max relative error", worst, Op::Le, cfg.get("c4.tol"))],
        values: json!({"relative_error": worst}),
    })
}

fn monotonicity(cfg: &Config, _: Option<usize>) -> Result<Measured, String> {
    let d = PlaneDomain::annulus(0.3).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut smallest = f64::INFINITY;
    let (mut above, mut below) = (f64::INFINITY, f64::INFINITY);
    let mut decrements = Vec::new();
    for _ in 0..5 {
        let (a, z) = (annulus_point(&mut rng, 0.3), annulus_point(&mut rng, 0.3));
        let lifts = CoverMap::new(d, z).map_err(err)?.lifts(a, 10);
        // l^N - l^(N+1) = l^N (1 - |xi_(N+1)|), which stays accurate where the plain difference cancels.
        let mut dec = Vec::new();
        for (n, next) in lifts.iter().enumerate().skip(1) {
            let ln = lempert_n_plane(d, a, z, n).map_err(err)?.value;
            dec.push(ln * next.gap());
        }
        smallest = dec.iter().copied().fold(smallest, f64::min);
        decrements.push(dec);
        let l10 = lempert_n_plane(d, a, z, 10).map_err(err)?.value;
        let g = green_plane(d, a, z, 1e-13).map_err(err)?;
        above = above.min(l10 - g.value);
        below = below.min(g.value - l10 * (1.0 - g.tail_bound));
    }
    Ok(Measured {
        checks: vec![
            check("min decrement l^N - l^(N+1)", smallest, Op::Gt, cfg.get("c5.decrement")),
            check("min l^10 - green", above, Op::Gt, -1e-15),
            check("min green - l^10 (1 - tail)", below, Op::Gt, -1e-15),
        ],
        values: json!({"decrements": decrements}),
    })
}

/// One product instance: `(D, A, G, b, z, w)` and the checks that apply to it.
fn sandwich_instance(
    rng: &mut ChaCha8Rng,
    k: usize,
) -> Result<(PoleSet, PlaneDomain, Complex64, Complex64, Complex64), String> {
    let d = match k % 3 {
        0 => PlaneDomain::UnitDisc,
        1 => PlaneDomain::PuncturedDisc,
        _ => PlaneDomain::annulus(0.3).map_err(err)?,
    };
    let z = match d {
        PlaneDomain::Annulus { inner } => annulus_point(rng, inner),
        _ => polar(rng, 0.1, 0.8),
    };
    match k % 5 {
        // Second factor a disc: both estimates coincide.
        0 | 1 => {
            let n = rng.random_range(1..=3);
            let a: Vec<Complex64> = (0..n)
                .map(|_| match d {
                    PlaneDomain::Annulus { inner } => annulus_point(rng, inner),
                    _ => polar(rng, 0.1, 0.9),
                })
                .collect();
            let a = PoleSet::new(d, a).map_err(err)?;
            Ok((a, PlaneDomain::UnitDisc, polar(rng, 0.0, 0.8), z, polar(rng, 0.0, 0.8)))
        }
        // Annulus factor with two poles close to z, so the first-factor value sits below l_G^2.
        _ => {
            let inner = [0.05, 0.1, 0.15][k % 3];
            let g = PlaneDomain::annulus(inner).map_err(err)?;
            let a: Vec<Complex64> = (0..2).map(|_| z + polar(rng, 1e-3, 5e-3) * (1.0 - z.norm())).collect();
            let a = PoleSet::new(d, a).map_err(err)?;
            let b = annulus_point(rng, inner);
            let mut w = annulus_point(rng, inner);
            while (w - b).norm() < 0.1 {
                w = annulus_point(rng, inner);
            }
            Ok((a, g, b, z, w))
        }
    }
}

fn sandwich(cfg: &Config, _: Option<usize>) -> Result<Measured, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut order, mut equal, mut gap) = (f64::NEG_INFINITY, 0.0f64, f64::INFINITY);
    let (mut disc_cases, mut gap_cases) = (0, 0);
    for k in 0..cfg.count("c6.cases") {
        let (a, g, b, z, w) = sandwich_instance(&mut rng, k)?;
        let r = theorem5_bounds(&a, g, b, z, w).map_err(err)?;
        order = order.max(r.lower - r.certified_upper);
        match g {
            PlaneDomain::UnitDisc => {
                disc_cases += 1;
                equal = equal.max((r.upper - r.lower).abs());
            }
            _ => {
                gap_cases += 1;
                gap = gap.min(r.upper - r.lower);
            }
        }
    }
    Ok(Measured {
        checks: vec![
            check("max lower - certified upper", order, Op::Le, cfg.get("c6.order_tol")),
            check(
                format!("max |upper - lower|, disc factor ({disc_cases} cases)"),
                equal,
                Op::Le,
                cfg.get("c6.equal_tol"),
            ),
            check(
                format!("min upper - lower, annulus factor ({gap_cases} cases)"),
                gap,
                Op::Gt,
                cfg.get("c6.gap"),
            ),
        ],
        values: json!({"order": order, "equal": equal, "gap": gap}),
    })
}

fn bidisc_case(b: [Complex64; 2], restarts: usize, threads: Option<usize>) -> Result<(f64, Value), String> {
    let a = PoleSet::new(PlaneDomain::UnitDisc, vec![c(0.5, 0.0), c(0.0, 0.5)]).map_err(err)?;
    let b = PoleSet::new(PlaneDomain::UnitDisc, b.to_vec()).map_err(err)?;
    let settings = OptimizerSettings {
        restarts,
        seed: 0,
        threads,
        ..Default::default()
    };
    let zero = c(0.0, 0.0);
    let out = bidisc_lempert(&a, &b, zero, zero, &settings).map_err(err)?;
    Ok((
        out.value,
        json!({"value": out.value, "nodes": complexes(&out.best.nodes)}),
    ))
}

fn rotation_equality(cfg: &Config, threads: Option<usize>) -> Result<Measured, String> {
    let start = Instant::now();
    let (value, values) = bidisc_case([c(0.0, 0.5), c(-0.5, 0.0)], cfg.count("c7.restarts"), threads)?;
    let seconds = start.elapsed().as_secs_f64();
    let expected = cfg.get("c7.expected");
    Ok(Measured {
        checks: vec![
            check(
                "|value - expected|",
                (value - expected).abs(),
                Op::Le,
                cfg.get("c7.tol"),
            ),
            check("expected - value", expected - value, Op::Le, cfg.get("c7.floor_tol")),
            check("runtime seconds", seconds, Op::Lt, cfg.get("c7.seconds")),
        ],
        values,
    })
}

fn rotation_failure(cfg: &Config, threads: Option<usize>) -> Result<Measured, String> {
    let (value, mut values) = bidisc_case([c(0.5, 0.0), c(-0.5, 0.0)], cfg.count("c8.restarts"), threads)?;
    let delta = value - 0.25;
    values["delta"] = json!(delta);
    Ok(Measured {
        checks: vec![
            check(
                "|delta - oracle delta|",
                (delta - cfg.get("c8.oracle_delta")).abs(),
                Op::Le,
                cfg.get("c8.tol"),
            ),
            check("delta", delta, Op::Gt, 0.0),
        ],
        values,
    })
}

fn construction(cfg: &Config, threads: Option<usize>) -> Result<Measured, String> {
    let d = PlaneDomain::annulus(0.3).map_err(err)?;
    let g = PlaneDomain::annulus(0.5).map_err(err)?;
    let run = || prop10_construct(d, g, c(0.55, 0.1), c(0.7, 0.0), c(-0.6, 0.3), 4);
    let r = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| e.to_string())?
            .install(run),
        None => run(),
    }
    .map_err(err)?;
    Ok(Measured {
        checks: vec![
            check(
                "|l_D(A_N, z) - l_G^N(b, w)|",
                r.equality_residual,
                Op::Le,
                cfg.get("c9.tol"),
            ),
            check("genericity margin", r.genericity_margin, Op::Gt, cfg.get("c9.margin")),
        ],
        values: json!({
            "poles": complexes(r.poles.points()),
            "equality_residual": r.equality_residual,
            "genericity_margin": r.genericity_margin,
            "lower": r.bounds.lower,
        }),
    })
}

fn determinism(cfg: &Config, _: Option<usize>) -> Result<Measured, String> {
    let threads = cfg.count("c10.threads").max(1);
    let mut checks = Vec::new();
    let mut values = serde_json::Map::new();
    for id in 7..=9 {
        let criterion = &CRITERIA[id - 1];
        let single = (criterion.run)(cfg, Some(1))?.values;
        let multi = (criterion.run)(cfg, Some(threads))?.values;
        let same = json::to_string(&single) == json::to_string(&multi);
        checks.push(check(
            format!("criterion {id} differs between 1 and {threads} threads"),
            f64::from(u8::from(!same)),
            Op::Le,
            0.0,
        ));
        values.insert(criterion.name.to_string(), single);
    }
    Ok(Measured {
        checks,
        values: Value::Object(values),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let mut cfg = Config::default();
        cfg.apply(&["c7.expected=0.2499".to_string()]).unwrap();
        assert_eq!(cfg.get("c7.expected"), 0.2499);
        assert!(cfg.apply(&["nope=1".to_string()]).is_err());
        assert!(cfg.apply(&["c7.tol".to_string()]).is_err());
    }

    #[test]
    fn selection() {
        let ids = |only: &[&str]| {
            select(&only.iter().map(|s| s.to_string()).collect::<Vec<_>>())
                .map(|v| v.iter().map(|c| c.id).collect::<Vec<_>>())
        };
        assert_eq!(ids(&["lemma4"]).unwrap(), vec![1, 2]);
        assert_eq!(ids(&["9", "sandwich"]).unwrap(), vec![6, 9]);
        assert_eq!(ids(&[]).unwrap().len(), 10);
        assert!(ids(&["bogus"]).is_err());
    }

    #[test]
    fn image_series_reference() {
        let v = annulus_green_series(0.3, Complex64::from_polar(0.5, 0.7), Complex64::from_polar(0.7, -0.4));
        assert!((v - 0.9167498186699005).abs() < 1e-14);
    }

    #[test]
    fn check_margins() {
        assert!(check("x", 1.0, Op::Le, 1.0).passed());
        assert!(!check("x", 1.0, Op::Lt, 1.0).passed());
        assert_eq!(check("x", 3.0, Op::Gt, 1.0).margin(), 2.0);
    }
}
