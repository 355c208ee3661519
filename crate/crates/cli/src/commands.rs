//! Subcommands: argument definitions and the JSON each one produces.

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use lempert::interpolation::{lemma4_solve, Branch, Lemma4Problem};
use lempert::optimizer::{bidisc_lempert, OptimizerSettings};
use lempert::plane::{green_poleset, lempert_n_plane, lempert_poleset_plane};
use lempert::product::{
    corollary8_sample, prop10_construct, prop11_construct, prop9_extend, theorem5_bounds, theorem7_decide,
    BoundsReport, PoleConstruction,
};
use lempert::{Certificate, PlaneDomain, PoleSet, Result};

use crate::json::{complex, complexes};
use crate::parse::{self, format_complex};

#[derive(Debug, Parser)]
#[command(
    name = "lempert",
    version,
    about = "Lempert and Green functions of plane domains and their products"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lempert function of a plane domain with a finite pole set.
    Eval(EvalArgs),
    /// Disc self-map fixing 0 through prescribed targets with a prescribed node product.
    Lemma4(Lemma4Args),
    /// Upper bound for the bidisc Lempert function with product poles.
    Bidisc(BidiscArgs),
    /// Two-sided estimate for a product domain with a single second-factor pole.
    Bounds(BoundsArgs),
    /// Constructions where the product property fails.
    Counterexample(CounterexampleArgs),
    /// Runs the acceptance criteria.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, default_value = "disc", value_parser = parse::domain)]
    pub domain: PlaneDomain,
    #[arg(long, value_parser = parse::complex, value_delimiter = ',', allow_hyphen_values = true)]
    pub poles: Vec<Complex64>,
    /// One or more base points; several give a sweep.
    #[arg(long, value_parser = parse::complex, value_delimiter = ',', allow_hyphen_values = true)]
    pub at: Vec<Complex64>,
    /// Multiplicity of a single pole.
    #[arg(long)]
    pub n: Option<usize>,
    /// Also evaluate the Green function.
    #[arg(long)]
    pub green: bool,
    #[arg(long, default_value_t = 1e-12)]
    pub tail: f64,
    /// Print the value table as CSV instead of JSON.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct Lemma4Args {
    #[arg(long, value_parser = parse::complex, value_delimiter = ',', allow_hyphen_values = true)]
    pub mu: Vec<Complex64>,
    #[arg(long)]
    pub q: f64,
}

#[derive(Debug, Args)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub iterations: usize,
    #[arg(long)]
    pub threads: Option<usize>,
}

impl OptimizerArgs {
    pub fn settings(&self) -> OptimizerSettings {
        OptimizerSettings {
            seed: self.seed,
            restarts: self.restarts,
            max_iterations: self.iterations,
            threads: self.threads,
            ..Default::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct BidiscArgs {
    #[arg(long = "A", value_parser = parse::complex, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Vec<Complex64>,
    #[arg(long = "B", value_parser = parse::complex, value_delimiter = ',', allow_hyphen_values = true)]
    pub b: Vec<Complex64>,
    #[arg(long, default_value = "0+0i", value_parser = parse::complex, allow_hyphen_values = true)]
    pub z: Complex64,
    #[arg(long, default_value = "0+0i", value_parser = parse::complex, allow_hyphen_values = true)]
    pub w: Complex64,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long = "D", value_parser = parse::domain)]
    pub d: PlaneDomain,
    #[arg(long = "A", value_parser = parse::complex, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Vec<Complex64>,
    #[arg(long = "G", value_parser = parse::domain)]
    pub g: PlaneDomain,
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
    pub b: Complex64,
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
    pub z: Complex64,
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
    pub w: Complex64,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[command(subcommand)]
    pub kind: CounterexampleKind,
}

#[derive(Debug, Subcommand)]
pub enum CounterexampleKind {
    /// Rotation test for two-point pole sets in the bidisc.
    Rotation {
        #[arg(long = "A", value_parser = parse::complex, value_delimiter = ',', allow_hyphen_values = true)]
        a: Vec<Complex64>,
        #[arg(long = "B", value_parser = parse::complex, value_delimiter = ',', allow_hyphen_values = true)]
        b: Vec<Complex64>,
    },
    /// Points w with l(B, w) = l(A, z), flagged when an automorphism relates the data.
    Sample {
        #[arg(long = "A", value_parser = parse::complex, value_delimiter = ',', allow_hyphen_values = true)]
        a: Vec<Complex64>,
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        z: Complex64,
        #[arg(long = "B", value_parser = parse::complex, value_delimiter = ',', allow_hyphen_values = true)]
        b: Vec<Complex64>,
        #[arg(long, default_value_t = 16)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Adds poles with large Green product to a pair with a known ratio q.
    Extend {
        #[arg(long = "D", value_parser = parse::domain)]
        d: PlaneDomain,
        #[arg(long = "A", value_parser = parse::complex, value_delimiter = ',', allow_hyphen_values = true)]
        a: Vec<Complex64>,
        #[arg(long = "A1", value_parser = parse::complex, value_delimiter = ',', allow_hyphen_values = true)]
        a1: Vec<Complex64>,
        #[arg(long = "G", value_parser = parse::domain)]
        g: PlaneDomain,
        #[arg(long = "B", value_parser = parse::complex, value_delimiter = ',', allow_hyphen_values = true)]
        b: Vec<Complex64>,
        #[arg(long = "B1", value_parser = parse::complex, value_delimiter = ',', allow_hyphen_values = true)]
        b1: Vec<Complex64>,
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        z: Complex64,
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        w: Complex64,
        #[arg(long)]
        q: f64,
    },
    /// Poles a_1..a_N with l_D(A_k, z) = l_G^k(b, w).
    Construct {
        #[arg(long = "D", value_parser = parse::domain)]
        d: PlaneDomain,
        #[arg(long = "G", value_parser = parse::domain)]
        g: PlaneDomain,
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        z: Complex64,
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        w: Complex64,
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        b: Complex64,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// A constructed pair plus extra poles, with the separating chain of values.
    Chain {
        #[arg(long = "D", value_parser = parse::domain)]
        d: PlaneDomain,
        #[arg(long = "G", value_parser = parse::domain)]
        g: PlaneDomain,
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        z: Complex64,
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        w: Complex64,
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        b: Complex64,
        #[arg(long, value_parser = parse::complex, value_delimiter = ',', allow_hyphen_values = true)]
        extra: Vec<Complex64>,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Criterion numbers or names to run (comma-separated); all by default.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Overrides a tolerance or expected value, e.g. `--set c7.expected=0.2499`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

fn texts(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|&z| Value::String(format_complex(z))).collect())
}

fn certificate(c: &Certificate) -> Value {
    json!({"expression": c.map.to_string(), "nodes": complexes(&c.nodes)})
}

pub fn eval(args: &EvalArgs) -> Result<Value> {
    let poles = PoleSet::new(args.domain, args.poles.clone())?;
    if args.at.is_empty() {
        return Err(lempert::Error::InvalidParameter("--at needs at least one point".into()));
    }
    if args.n.is_some() && poles.len() != 1 {
        return Err(lempert::Error::InvalidParameter("--n applies to a single pole".into()));
    }
    let mut rows = Vec::new();
    for &z in &args.at {
        args.domain.require_interior(z)?;
        let eval = match args.n {
            Some(n) => lempert_n_plane(args.domain, poles.points()[0], z, n)?,
            None => lempert_poleset_plane(&poles, z)?,
        };
        let mut row = json!({
            "at": complex(z),
            "value": eval.value,
            "certificate": certificate(&eval.certificate),
        });
        if args.green {
            let g = green_poleset(&poles, z, args.tail)?;
            row["green"] = json!({"value": g.value, "tail_bound": g.tail_bound, "lifts": g.lifts});
        }
        rows.push(row);
    }
    let value = if rows.len() == 1 {
        rows[0]["value"].clone()
    } else {
        Value::Null
    };
    Ok(json!({
        "command": "eval",
        "inputs": {
            "domain": args.domain.to_string(),
            "poles": texts(poles.points()),
            "at": texts(&args.at),
            "n": args.n,
            "green": args.green,
        },
        "value": value,
        "results": rows,
        "tolerances": {"tail": args.tail},
    }))
}

/// CSV rendering of an `eval` report.
pub fn eval_csv(report: &Value) -> String {
    let mut out = String::from("at_re,at_im,value,green\n");
    for row in report["results"].as_array().into_iter().flatten() {
        let f = |v: &Value| v.as_f64().map_or_else(String::new, |x| format!("{x:.16e}"));
        out.push_str(&format!(
            "{},{},{},{}\n",
            f(&row["at"][0]),
            f(&row["at"][1]),
            f(&row["value"]),
            f(&row["green"]["value"])
        ));
    }
    out
}

pub fn lemma4(args: &Lemma4Args) -> Result<Value> {
    let problem = Lemma4Problem::new(args.mu.clone(), args.q)?;
    let s = lemma4_solve(&problem)?;
    let residual = s.residual(problem.mu());
    let product = s.node_product();
    Ok(json!({
        "command": "lemma4",
        "inputs": {"mu": texts(problem.mu()), "q": args.q},
        "value": product,
        "a": s.a,
        "branch": match s.branch { Branch::Small => "small", Branch::Large => "large" },
        "reduction": s.reduction,
        "certificate": {"expression": s.map.to_string(), "nodes": complexes(&s.eta)},
        "residual": residual,
        "product_error": (product - args.q).abs(),
    }))
}

pub fn bidisc(args: &BidiscArgs) -> Result<Value> {
    let a = PoleSet::new(PlaneDomain::UnitDisc, args.a.clone())?;
    let b = PoleSet::new(PlaneDomain::UnitDisc, args.b.clone())?;
    let settings = args.optimizer.settings();
    let out = bidisc_lempert(&a, &b, args.z, args.w, &settings)?;
    let floor = lempert_poleset_plane(&a, args.z)?
        .value
        .max(lempert_poleset_plane(&b, args.w)?.value);
    let zero = Complex64::new(0.0, 0.0);
    let rotation = if args.z == zero && args.w == zero && a.len() == 2 && b.len() == 2 {
        theorem7_decide(&a, &b)
            .ok()
            .map(|d| json!({"theta": d.rotation, "value": d.value}))
    } else {
        None
    };
    Ok(json!({
        "command": "bidisc",
        "inputs": {
            "A": texts(a.points()), "B": texts(b.points()),
            "z": format_complex(args.z), "w": format_complex(args.w),
            "restarts": settings.restarts, "iterations": settings.max_iterations,
        },
        "seed": settings.seed,
        "value": out.value,
        "bounds": {"lower": floor, "upper": out.value},
        "rotation": rotation,
        "certificate": {
            "subset": out.best.subset.iter().map(|&(k, l)| json!([k, l])).collect::<Vec<_>>(),
            "nodes": complexes(&out.best.nodes),
            "min_eigenvalues": [out.best.min_eigenvalues.0, out.best.min_eigenvalues.1],
        },
        "search": {
            "subsets_optimized": out.subsets_optimized,
            "subsets_pruned": out.subsets_pruned,
            "feasible_restarts": out.feasible_restarts,
        },
        "tolerances": {"optimizer": settings.tolerance, "feasibility": lempert::kernel::FEASIBILITY_TOL},
    }))
}

pub fn bounds_json(r: &BoundsReport) -> Value {
    json!({
        "lower": r.lower,
        "upper": r.upper,
        "certified_upper": r.certified_upper,
        "first": r.first,
        "second": r.second,
        "second_n": r.second_n,
        "equality_flag": r.equality_flag,
        "residual": r.residual,
        "certificate": {
            "expression": r.certificate.disc.to_string(),
            "nodes": complexes(&r.certificate.eta),
        },
    })
}

pub fn bounds(args: &BoundsArgs) -> Result<Value> {
    let a = PoleSet::new(args.d, args.a.clone())?;
    let r = theorem5_bounds(&a, args.g, args.b, args.z, args.w)?;
    Ok(json!({
        "command": "bounds",
        "inputs": {
            "D": args.d.to_string(), "A": texts(a.points()), "G": args.g.to_string(),
            "b": format_complex(args.b), "z": format_complex(args.z), "w": format_complex(args.w),
        },
        "value": r.upper,
        "bounds": bounds_json(&r),
        "tolerances": {
            "equality": lempert::product::EQUALITY_TOL,
            "certificate_residual": lempert::product::CERTIFICATE_RESIDUAL,
        },
    }))
}

pub fn construction_json(c: &PoleConstruction) -> Value {
    json!({
        "poles": complexes(c.poles.points()),
        "targets": c.targets,
        "equality_residual": c.equality_residual,
        "genericity_margin": c.genericity_margin,
        "retries": c.retries,
        "bounds": bounds_json(&c.bounds),
    })
}

pub fn counterexample(args: &CounterexampleArgs) -> Result<Value> {
    let disc = |v: &[Complex64]| PoleSet::new(PlaneDomain::UnitDisc, v.to_vec());
    Ok(match &args.kind {
        CounterexampleKind::Rotation { a, b } => {
            let d = theorem7_decide(&disc(a)?, &disc(b)?)?;
            json!({
                "command": "counterexample rotation",
                "inputs": {"A": texts(a), "B": texts(b)},
                "value": d.value,
                "rotation": d.rotation,
                "product_property": d.rotation.is_some(),
                "certificate": d.certificate.map(|(m, nodes)| json!({"expression": m.to_string(), "nodes": complexes(&nodes)})),
            })
        }
        CounterexampleKind::Sample { a, z, b, count, seed } => {
            let s = corollary8_sample(&disc(a)?, *z, &disc(b)?, *count, *seed)?;
            json!({
                "command": "counterexample sample",
                "inputs": {"A": texts(a), "z": format_complex(*z), "B": texts(b), "count": count},
                "seed": seed,
                "samples": s.iter().map(|x| json!({"w": complex(x.w), "residual": x.residual, "automorphism": x.automorphism})).collect::<Vec<_>>(),
                "automorphic": s.iter().filter(|x| x.automorphism).count(),
            })
        }
        CounterexampleKind::Extend {
            d,
            a,
            a1,
            g,
            b,
            b1,
            z,
            w,
            q,
        } => {
            let r = prop9_extend(
                &PoleSet::new(*d, a.clone())?,
                &PoleSet::new(*d, a1.clone())?,
                &PoleSet::new(*g, b.clone())?,
                &PoleSet::new(*g, b1.clone())?,
                *z,
                *w,
                *q,
            )?;
            json!({
                "command": "counterexample extend",
                "inputs": {
                    "D": d.to_string(), "A": texts(a), "A1": texts(a1), "G": g.to_string(),
                    "B": texts(b), "B1": texts(b1), "z": format_complex(*z), "w": format_complex(*w), "q": q,
                },
                "value": r.product_lower,
                "green_first": {"value": r.green_first.value, "tail_bound": r.green_first.tail_bound},
                "green_second": {"value": r.green_second.value, "tail_bound": r.green_second.tail_bound},
                "condition_holds": r.condition_holds,
                "extended_max": r.extended_max,
            })
        }
        CounterexampleKind::Construct { d, g, z, w, b, n } => {
            let c = prop10_construct(*d, *g, *z, *w, *b, *n)?;
            json!({
                "command": "counterexample construct",
                "inputs": {
                    "D": d.to_string(), "G": g.to_string(), "z": format_complex(*z),
                    "w": format_complex(*w), "b": format_complex(*b), "n": n,
                },
                "value": c.bounds.lower,
                "construction": construction_json(&c),
                "tolerances": {
                    "genericity_margin": lempert::product::GENERICITY_MARGIN,
                    "genericity_lifts": lempert::product::GENERICITY_LIFTS,
                },
            })
        }
        CounterexampleKind::Chain { d, g, z, w, b, extra } => {
            let r = prop11_construct(*d, *g, *z, *w, *b, &PoleSet::new(*d, extra.clone())?)?;
            json!({
                "command": "counterexample chain",
                "inputs": {
                    "D": d.to_string(), "G": g.to_string(), "z": format_complex(*z),
                    "w": format_complex(*w), "b": format_complex(*b), "extra": texts(extra),
                },
                "value": r.chain_left,
                "q": r.q,
                "extra_value": r.extra_value,
                "pair_value": r.pair_value,
                "right": r.right,
                "green_second": {"value": r.green_second.value, "tail_bound": r.green_second.tail_bound},
                "strict": r.strict,
                "construction": construction_json(&r.pair),
            })
        }
    })
}
