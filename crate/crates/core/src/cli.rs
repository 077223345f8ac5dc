//! The `exc` command line. Standard output carries exactly one JSON document;
//! diagnostics go to standard error.
//!
//! Exit codes: 0 definitive answer, 1 definitive negative, 2 partial or
//! undecided, 3 input or format error.

use crate::catalog::{self, Catalog, DetectionReport, MatchQuality};
use crate::character::DirichletChar;
use crate::embedding::{build_embedding, generated_group_order, trace_fingerprint, verify_presentation, EmbeddingField};
use crate::error::Error;
use crate::galois::galois_group;
use crate::local::{analyze, local_type, FieldAnalysis};
use crate::poly::ZPoly;
use crate::recipe::{corollary_table, enumerate_serre_types, epsilon_p, CorollaryVariant, TwistBound};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use std::io::Write;

pub const CATALOG_ENV: &str = "EXC_CATALOG";

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "exc", version, about = "Serre invariants of exceptional mod-ℓ Galois representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Group, ramification and local types of the field cut out by a quartic or quintic.
    Analyze {
        /// Coefficients, constant term first, e.g. "[3,11,-7,-1,1]".
        #[arg(long)]
        poly: String,
        #[arg(long)]
        ell: u64,
    },
    /// Candidate (N, k, ν) families for all twists up to a conductor bound.
    SerreTypes {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        ell: u64,
        /// Largest conductor exponent of the local twists.
        #[arg(long, default_value_t = 0)]
        twist_bound: u32,
        /// Per-prime override, as p=c; may be repeated.
        #[arg(long = "twist-bound-at", value_parser = parse_prime_bound)]
        twist_bound_at: Vec<(u64, u32)>,
    },
    /// Search a catalog for fields consistent with (N, k, ν, ℓ).
    Detect {
        #[arg(long = "N")]
        n: u64,
        #[arg(long)]
        k: u64,
        /// "trivial" or {"modulus":..,"order":..,"exponents":{..}}.
        #[arg(long, default_value = "trivial")]
        nu: String,
        #[arg(long)]
        ell: u64,
        /// CSV or JSON-lines file; falls back to $EXC_CATALOG, then the built-in corpus.
        #[arg(long)]
        catalog: Option<String>,
    },
    /// The local Galois type at one prime.
    Local {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        p: u64,
    },
    /// (n₂, ε₂) rows for S4 fields with dihedral image of order 8 at ℓ.
    Corollary1 {
        /// unramified_at_2, M2, M3 or M4; all variants when omitted.
        #[arg(long)]
        variant: Option<String>,
        /// Conductor exponent c₂(φ); 0..=4 when omitted.
        #[arg(long)]
        c: Option<u32>,
    },
    /// Check the A5 embedding into PGL₂ over F_q or Z[ζ5].
    EmbedCheck {
        /// "F5", "F81", any F<q> with 5 | q(q²−1), or "Z[zeta5]".
        #[arg(long)]
        field: String,
        #[arg(long, default_value_t = 1)]
        epsilon_power: u32,
    },
}

fn parse_prime_bound(s: &str) -> std::result::Result<(u64, u32), String> {
    let (p, c) = s.split_once('=').ok_or("expected p=c")?;
    Ok((p.trim().parse().map_err(|_| "bad prime")?, c.trim().parse().map_err(|_| "bad bound")?))
}

/// Outcome of one subcommand before printing.
struct Outcome {
    code: i32,
    body: Value,
}

fn ok(body: Value) -> Outcome {
    Outcome { code: EXIT_OK, body }
}

fn exit_code_for(e: &Error) -> i32 {
    match e.root() {
        Error::NotExceptional(_) => EXIT_NEGATIVE,
        Error::ExternalReference(_)
        | Error::Ambiguous { .. }
        | Error::Precision { .. }
        | Error::UnclassifiedTwoAdic(_)
        | Error::UnclassifiedWildRegime(_)
        | Error::Inconsistent(_) => EXIT_PARTIAL,
        _ => EXIT_INPUT,
    }
}

fn error_outcome(e: &Error) -> Outcome {
    let code = exit_code_for(e);
    let status = match code {
        EXIT_NEGATIVE => "negative",
        EXIT_PARTIAL => "undecided",
        _ => "error",
    };
    let reason = match e.root() {
        Error::NotExceptional(why) => why.clone(),
        other => other.to_string(),
    };
    Outcome { code, body: json!({ "status": status, "reason": reason, "detail": e.to_string() }) }
}

fn parse_poly(s: &str) -> crate::Result<ZPoly> {
    s.parse::<ZPoly>().map_err(|e| Error::Format(format!("polynomial {s:?}: {e}")))
}

pub fn parse_nu(s: &str) -> crate::Result<DirichletChar> {
    if s.trim().eq_ignore_ascii_case("trivial") {
        return Ok(DirichletChar::trivial(1));
    }
    serde_json::from_str(s).map_err(|e| Error::Format(format!("ν {s:?}: {e}")))
}

pub fn parse_field(s: &str) -> crate::Result<EmbeddingField> {
    let t = s.trim().to_ascii_lowercase().replace(['_', ' '], "");
    if matches!(t.as_str(), "z[zeta5]" | "zeta5" | "cyclotomic" | "q(zeta5)" | "z[ζ5]") {
        return Ok(EmbeddingField::Cyclotomic);
    }
    let q: u64 = t
        .strip_prefix('f')
        .and_then(|x| x.parse().ok())
        .ok_or_else(|| Error::Format(format!("unknown field {s:?}")))?;
    let f = crate::arith::factorize_u64(q);
    match f.as_slice() {
        [(p, m)] => Ok(EmbeddingField::Finite { ell: *p, m: *m as usize }),
        _ => Err(Error::Format(format!("{q} is not a prime power"))),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable output")
}

fn cmd_analyze(poly: &str, ell: u64) -> crate::Result<Outcome> {
    let f = parse_poly(poly)?;
    let a = analyze(&f, ell)?;
    let code = if a.ell_ramified { EXIT_OK } else { EXIT_NEGATIVE };
    Ok(Outcome { code, body: to_value(&a) })
}

fn families_outcome(a: &FieldAnalysis, bound: &TwistBound) -> crate::Result<Outcome> {
    let families = enumerate_serre_types(a, bound)?;
    let code = if families.is_empty() {
        EXIT_NEGATIVE
    } else if families.iter().any(|f| f.partial) {
        EXIT_PARTIAL
    } else {
        EXIT_OK
    };
    let per_prime: serde_json::Map<String, Value> =
        bound.per_prime.iter().map(|(p, c)| (p.to_string(), json!(c))).collect();
    let body = json!({
        "polynomial": a.polynomial,
        "ell": a.ell,
        "group": a.group,
        "twist_bound": { "default": bound.default, "per_prime": per_prime },
        "families": families,
        "notes": if families.is_empty() {
            vec![format!("ℓ = {} is unramified in K: weight-1 regime, no families", a.ell)]
        } else {
            Vec::new()
        },
    });
    Ok(Outcome { code, body })
}

fn cmd_serre_types(poly: &str, ell: u64, c: u32, at: &[(u64, u32)]) -> crate::Result<Outcome> {
    let f = parse_poly(poly)?;
    let a = analyze(&f, ell)?;
    let mut bound = TwistBound::uniform(c);
    bound.per_prime.extend(at.iter().copied());
    families_outcome(&a, &bound)
}

fn load_catalog(path: Option<&str>, err: &mut dyn Write) -> crate::Result<Catalog> {
    let env = std::env::var(CATALOG_ENV).ok().filter(|s| !s.is_empty());
    match path.map(str::to_string).or(env) {
        Some(p) => {
            let c = catalog::load_catalog(&p)?;
            for r in &c.rejects {
                let _ = writeln!(err, "{p}:{}: rejected: {}", r.line, r.reason);
            }
            Ok(c)
        }
        None => Ok(Catalog { records: catalog::builtin_corpus(), rejects: Vec::new() }),
    }
}

fn detection_code(r: &DetectionReport) -> i32 {
    if r.matches.iter().any(|m| m.quality != MatchQuality::Partial) {
        EXIT_OK
    } else if !r.matches.is_empty() || !r.skipped.is_empty() {
        EXIT_PARTIAL
    } else {
        EXIT_NEGATIVE
    }
}

fn cmd_detect(n: u64, k: u64, nu: &str, ell: u64, path: Option<&str>, err: &mut dyn Write) -> crate::Result<Outcome> {
    let nu = parse_nu(nu)?;
    let cat = load_catalog(path, err)?;
    let report = catalog::detect(n, k, &nu, ell, &cat.records)?;
    let mut body = to_value(&report);
    body["rejects"] = to_value(&cat.rejects);
    Ok(Outcome { code: detection_code(&report), body })
}

fn cmd_local(poly: &str, p: u64) -> crate::Result<Outcome> {
    let f = parse_poly(poly)?;
    if !crate::arith::is_prime_u64(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let group = galois_group(&f)?;
    let t = local_type(&f, &group, p)?;
    let epsilon = match epsilon_p(&t, p) {
        Ok(e) => json!({ "character": e }),
        Err(e) => json!({ "unavailable": e.root().to_string() }),
    };
    Ok(ok(json!({
        "polynomial": f,
        "p": p,
        "group": group,
        "local_type": t,
        "description": t.to_string(),
        "epsilon": epsilon,
    })))
}

fn cmd_corollary(variant: Option<&str>, c: Option<u32>) -> crate::Result<Outcome> {
    let variants: Vec<CorollaryVariant> = match variant {
        Some(v) => vec![CorollaryVariant::parse(v).ok_or_else(|| Error::Format(format!("unknown variant {v:?}")))?],
        None => CorollaryVariant::all().to_vec(),
    };
    let cs: Vec<u32> = c.map_or_else(|| (0..=4).collect(), |c| vec![c]);
    let mut rows = Vec::new();
    for v in variants {
        for &c in &cs {
            let (n, eps) = corollary_table(v, c);
            rows.push(json!({ "variant": v, "c": c, "n": n, "epsilon": eps }));
        }
    }
    Ok(ok(json!({ "rows": rows })))
}

fn cmd_embed(field: &str, power: u32) -> crate::Result<Outcome> {
    let field = parse_field(field)?;
    let e = build_embedding(field, power)?;
    let presentation = verify_presentation(&e.ring, &e.x, &e.y);
    let order = generated_group_order(&e.ring, &e.x, &e.y);
    let fingerprint = trace_fingerprint(&e.ring, &e.y)?;
    let (order_value, order_note) = match &order {
        Ok(n) => (json!(n), Value::Null),
        Err(err) => (Value::Null, json!(err.to_string())),
    };
    let good = presentation && matches!(order, Ok(60));
    Ok(Outcome {
        code: if good { EXIT_OK } else { EXIT_NEGATIVE },
        body: json!({
            "field": field,
            "label": field.to_string(),
            "modulus": e.ring.modulus,
            "epsilon_power": power,
            "epsilon": e.epsilon,
            "x": e.x,
            "y": e.y,
            "presentation_holds": presentation,
            "group_order": order_value,
            "group_order_note": order_note,
            "trace_fingerprint": fingerprint,
        }),
    })
}

fn dispatch(cmd: &Command, err: &mut dyn Write) -> crate::Result<Outcome> {
    match cmd {
        Command::Analyze { poly, ell } => cmd_analyze(poly, *ell),
        Command::SerreTypes { poly, ell, twist_bound, twist_bound_at } => {
            cmd_serre_types(poly, *ell, *twist_bound, twist_bound_at)
        }
        Command::Detect { n, k, nu, ell, catalog } => cmd_detect(*n, *k, nu, *ell, catalog.as_deref(), err),
        Command::Local { poly, p } => cmd_local(poly, *p),
        Command::Corollary1 { variant, c } => cmd_corollary(variant.as_deref(), *c),
        Command::EmbedCheck { field, epsilon_power } => cmd_embed(field, *epsilon_power),
    }
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
        }
    };
    let outcome = dispatch(&cli.command, err).unwrap_or_else(|e| {
        let _ = writeln!(err, "exc: {e}");
        error_outcome(&e)
    });
    let text = serde_json::to_string_pretty(&outcome.body).expect("serializable output");
    let _ = writeln!(out, "{text}");
    outcome.code
}
