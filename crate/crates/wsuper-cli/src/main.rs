//! Command-line front end: builds an algebra from a spec string, runs the
//! identity suites and module constructions, and prints deterministic
//! reports.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use wsuper::cartanw::{CartanW, Projection};
use wsuper::error::Error;
use wsuper::grading::{Functional, GradingOptions, MinimalGrading};
use wsuper::highest::{self, MatchablePair, VermaTruncation, WhittakerModel};
use wsuper::scalar::Scalar;
use wsuper::superalgebra::Family;
use wsuper::wgen::{c0_closed_form, Check, Flavor, WAlgebra, RELATION_SUITE_VERSION};

#[derive(Parser)]
#[command(name = "wsuper", version, about = "Exact computations for minimal finite W-superalgebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// The Lie superalgebra: dimensions and roots.
    Algebra(Common),
    /// The minimal grading and its subspaces.
    Grade(Common),
    /// Generators of the W-superalgebra and its constants.
    Wgen(Common),
    /// Run every identity suite.
    Verify(Common),
    /// A highest weight or Verma module at truncated scale.
    Module(Common),
    /// Block partition of a list of weights (`--lambda "1;2;-1/2"`).
    Blocks(Common),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args, Clone)]
struct Common {
    /// Algebra spec such as `spo:2|3`, `sl:2|1`, `osp:1|2`.
    #[arg(long)]
    algebra: String,
    /// Index of the minimal root among the candidates.
    #[arg(long)]
    theta: Option<usize>,
    /// `finite` or `refined`.
    #[arg(long, default_value = "finite")]
    flavor: String,
    /// Truncation bound (lowering degree for modules, Kazhdan degree for
    /// the Whittaker model).
    #[arg(long)]
    truncate: Option<usize>,
    /// Comma-separated rational coordinates on the h^e basis.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Level.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Seed for sampled property checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Identity(String),
    Unsupported(String),
    Precondition(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnsupportedFamily(_) | Error::Parse(_) | Error::Capacity(_) => Failure::Unsupported(e.to_string()),
            Error::Precondition(_) | Error::Matchability(_) | Error::NotApplicable(_) => {
                Failure::Precondition(e.to_string())
            }
            _ => Failure::Identity(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(Value, bool), Failure>;

fn s(x: &Scalar) -> Value {
    Value::String(x.render())
}

fn fv(f: &[Scalar]) -> Value {
    Value::Array(f.iter().map(s).collect())
}

fn parse_vector(text: &str) -> Result<Functional, Failure> {
    let t = text.trim();
    if t.is_empty() || t == "[]" {
        return Ok(Vec::new());
    }
    t.trim_start_matches('[')
        .trim_end_matches(']')
        .split(',')
        .map(|p| Scalar::parse(p.trim()).map_err(|e| Failure::Precondition(e.to_string())))
        .collect()
}

fn parse_scalar(text: &str) -> Result<Scalar, Failure> {
    Scalar::parse(text.trim()).map_err(|e| Failure::Precondition(e.to_string()))
}

fn config_value(cmd: &str, c: &Common) -> Value {
    json!({
        "command": cmd,
        "algebra": c.algebra,
        "theta": c.theta,
        "flavor": c.flavor,
        "truncate": c.truncate,
        "lambda": c.lambda,
        "c": c.c,
        "seed": c.seed,
    })
}

fn build_grading(c: &Common) -> Result<MinimalGrading, Failure> {
    let fam = Family::parse(&c.algebra)?;
    let opts = GradingOptions { theta_hint: c.theta, he_change: None };
    Ok(MinimalGrading::build(&fam, &opts)?)
}

fn build_w(c: &Common) -> Result<WAlgebra, Failure> {
    let flavor = Flavor::parse(&c.flavor).map_err(|e| Failure::Unsupported(e.to_string()))?;
    Ok(WAlgebra::build(build_grading(c)?, flavor)?)
}

fn lambda_of(c: &Common, w: &WAlgebra) -> Result<Functional, Failure> {
    match &c.lambda {
        Some(t) => parse_vector(t),
        None => Ok(vec![Scalar::zero(); w.gr.rank_he()]),
    }
}

fn checks_json(checks: &[Check]) -> Value {
    Value::Array(
        checks
            .iter()
            .map(|k| json!({"name": k.name, "description": k.description, "passed": k.passed, "residual": k.residual}))
            .collect(),
    )
}

fn cmd_algebra(c: &Common) -> Outcome {
    let gr = build_grading(c)?;
    let g = &gr.base;
    let positive = gr.datum.positive.iter().filter(|&&p| p).count();
    let odd_roots = gr.datum.roots.iter().filter(|r| r.odd).count();
    Ok((
        json!({
            "family": g.family.to_string(),
            "dim_even": g.dim_even(),
            "dim_odd": g.dim_odd(),
            "rank": g.cartan.len(),
            "roots": gr.datum.roots.len(),
            "odd_roots": odd_roots,
            "positive_roots": positive,
            "simple_roots": gr.datum.simple.len(),
        }),
        true,
    ))
}

fn cmd_grade(c: &Common) -> Outcome {
    let gr = build_grading(c)?;
    let dims: Vec<Value> = (-2..=2)
        .zip(gr.dims_per_degree())
        .map(|(i, (e, o))| json!({"degree": i, "even": e, "odd": o}))
        .collect();
    let (ker, sharp, g1, g2) = gr.ge_dimension_check();
    let sub = &gr.subalgebras;
    Ok((
        json!({
            "theta": gr.g.labels[gr.e],
            "parity_type": if gr.odd_type { "odd" } else { "even" },
            "s": gr.s,
            "r": gr.r,
            "rank_he": gr.rank_he(),
            "degrees": dims,
            "centralizer": {"dim": ker, "sharp_rank": sharp, "g1": g1, "g2": g2},
            "subalgebras": {"m": sub.m.len(), "m_prime": sub.m_prime.len(), "n0": sub.n0.len()},
        }),
        ker == sharp + g1 + g2,
    ))
}

fn cmd_wgen(c: &Common) -> Outcome {
    let w = build_w(c)?;
    let gens: Vec<Value> = w
        .gens()
        .iter()
        .enumerate()
        .map(|(k, g)| {
            json!({
                "name": g.name,
                "role": format!("{:?}", g.role),
                "parity": if g.parity { "odd" } else { "even" },
                "kazhdan_degree": g.kdeg,
                "weight": fv(&w.basis.weight(k)),
            })
        })
        .collect();
    Ok((
        json!({
            "flavor": w.flavor.name(),
            "parity_type": if w.gr.odd_type { "odd" } else { "even" },
            "generators": gens,
            "c0": s(&w.c0),
            "c0_closed_form": c0_closed_form(&w.gr).map(|x| s(&x)).unwrap_or(Value::Null),
            "epsilon": w.epsilon.as_ref().map(s),
            "delta_bar": fv(&w.weights.delta_bar),
            "rho_bar": fv(&w.weights.rho_bar),
            "rho_e0_bar": fv(&w.weights.rho_e0_bar),
        }),
        true,
    ))
}

fn cmd_verify(c: &Common) -> Outcome {
    let w = build_w(c)?;
    let mut checks = w.verify_relations()?;
    let cartan = CartanW::build(w.gr.clone())?;
    checks.push(cartan.compare_with_tabulated());
    let center = cartan.center_check(6)?;
    checks.push(Check::from_list(
        "center",
        "center of U(g0, e) is spanned by the Cartan and Casimir monomials",
        if center.passed {
            vec![]
        } else {
            vec![format!("kernel {} vs expected {}", center.kernel_dim, center.expected_dim)]
        },
    ));
    checks.push(Projection::new(&w, &cartan).multiplicativity(100, 6, c.seed)?);
    if let Some(n) = c.truncate {
        let lambda = lambda_of(c, &w)?;
        let level = match &c.c {
            Some(t) => Some(parse_scalar(t)?),
            None if !w.gr.odd_type => Some(Scalar::zero()),
            None => None,
        };
        if !(w.gr.odd_type && w.flavor == Flavor::Refined) {
            let model = WhittakerModel::build(&w, &lambda, level.as_ref(), n as i64)?;
            checks.extend(model.battery());
            let cmp = model.compare_with_verma()?;
            checks.extend(cmp.checks.clone());
            let bad: Vec<String> = cmp
                .spaces
                .iter()
                .filter(|sp| sp.dim != sp.verma_dim)
                .map(|sp| format!("offset {:?}: {} vs {}", sp.offset, sp.dim, sp.verma_dim))
                .collect();
            checks.push(Check::from_list("wh-dims", "Wh(M) and the Verma module have equal weight dimensions", bad));
        }
    }
    let all = checks.iter().all(|k| k.passed);
    Ok((
        json!({
            "c0": s(&w.c0),
            "epsilon": w.epsilon.as_ref().map(s),
            "checks": checks_json(&checks),
            "passed": all,
        }),
        all,
    ))
}

fn module_json(w: &WAlgebra, t: &VermaTruncation, psi: &Scalar) -> Result<Value, Failure> {
    let dims: Vec<Value> = t
        .weight_spaces()
        .iter()
        .map(|ws| json!([fv(&ws.weight), ws.h0.as_ref().map(s), ws.dim()]))
        .collect();
    let sing: Vec<Value> = highest::maximal_vector_scan(t, t.bound)?
        .iter()
        .map(|v| json!({"weight": fv(&v.weight), "vector": t.render(&v.vector)}))
        .collect();
    let cert = highest::type_certificate(t);
    let (even, odd) = t.sdim();
    Ok(json!({
        "lambda": fv(&t.lambda),
        "c": s(&t.c),
        "N": t.bound,
        "sdim": [even, odd],
        "untruncated": t.untruncated(),
        "weight_dims": dims,
        "singular_vectors": sing,
        "psi_C": s(psi),
        "blocks": s(psi),
        "type": if cert.is_type_q() { "Q" } else { "M" },
        "axioms": t.module_axioms(1).passed,
        "dominance": t.dominance_check(w).map(|k| k.passed).unwrap_or(true),
    }))
}

fn cmd_module(c: &Common) -> Outcome {
    let w = build_w(c)?;
    let lambda = lambda_of(c, &w)?;
    let n = c.truncate.unwrap_or(3);
    let level = c.c.as_deref().map(parse_scalar).transpose()?;
    match &level {
        Some(cv) => {
            // explicit level: the Verma module Z(λ, c)
            let pair = MatchablePair { lambda: lambda.clone(), c: cv.clone() };
            let t = highest::verma_truncate(&w, &pair, n)?;
            let v = module_json(&w, &t, cv)?;
            let ok = v["axioms"] == Value::Bool(true);
            Ok((v, ok))
        }
        None => {
            if !w.gr.odd_type {
                return Err(Failure::Precondition("type even needs a level (--c)".into()));
            }
            let cartan = CartanW::build(w.gr.clone())?;
            let t = highest::highest_weight_module(&w, &cartan, &lambda, None, n)?;
            let psi = highest::psi_c(&w, &lambda, None)?;
            let mut v = module_json(&w, &t, &psi)?;
            v["highest_weight"] = fv(&lambda);
            let ok = v["axioms"] == Value::Bool(true);
            Ok((v, ok))
        }
    }
}

fn cmd_blocks(c: &Common) -> Outcome {
    let w = build_w(c)?;
    let text = c.lambda.clone().unwrap_or_default();
    let level = c.c.as_deref().map(parse_scalar).transpose()?;
    let lambdas: Vec<Functional> = text.split(';').map(parse_vector).collect::<Result<_, _>>()?;
    let items: Vec<(Functional, Option<Scalar>)> = lambdas.iter().map(|l| (l.clone(), level.clone())).collect();
    let blocks = highest::block_partition(&w, &items)?;
    let psis: Vec<Value> = items
        .iter()
        .map(|(l, lv)| highest::psi_c(&w, l, lv.as_ref()).map(|x| s(&x)))
        .collect::<Result<_, _>>()?;
    Ok((
        json!({
            "lambdas": lambdas.iter().map(|l| fv(l)).collect::<Vec<_>>(),
            "psi_C": psis,
            "blocks": blocks,
        }),
        true,
    ))
}

fn table(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{}.{}", prefix, k) };
                table(x, &p, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object()) => {
            for (i, x) in a.iter().enumerate() {
                table(x, &format!("{}[{}]", prefix, i), out);
            }
        }
        other => out.push_str(&format!("{:<40} {}\n", prefix, other)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = match &cli.command {
        Command::Algebra(c) => ("algebra", c),
        Command::Grade(c) => ("grade", c),
        Command::Wgen(c) => ("wgen", c),
        Command::Verify(c) => ("verify", c),
        Command::Module(c) => ("module", c),
        Command::Blocks(c) => ("blocks", c),
    };
    let outcome = match &cli.command {
        Command::Algebra(c) => cmd_algebra(c),
        Command::Grade(c) => cmd_grade(c),
        Command::Wgen(c) => cmd_wgen(c),
        Command::Verify(c) => cmd_verify(c),
        Command::Module(c) => cmd_module(c),
        Command::Blocks(c) => cmd_blocks(c),
    };
    let config = config_value(name, common);
    let hash = hex::encode(Sha256::digest(config.to_string().as_bytes()));
    let (report, code) = match outcome {
        Ok((v, true)) => (v, 0u8),
        Ok((v, false)) => (v, 1),
        Err(Failure::Identity(m)) => (json!({"error": m}), 1),
        Err(Failure::Unsupported(m)) => (json!({"error": m}), 2),
        Err(Failure::Precondition(m)) => (json!({"error": m}), 3),
    };
    let doc = json!({
        "config": config,
        "config_hash": hash,
        "relation_suite_version": RELATION_SUITE_VERSION,
        "report": report,
    });
    let out = match common.format {
        Format::Json => serde_json::to_string_pretty(&doc).expect("serializable") + "\n",
        Format::Table => {
            let mut out = String::new();
            table(&doc, "", &mut out);
            out
        }
    };
    // a closed pipe (`| head`) is not an error worth a panic
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    if code != 0 {
        if let Some(m) = doc["report"]["error"].as_str() {
            eprintln!("error: {}", m);
        }
    }
    ExitCode::from(code)
}
