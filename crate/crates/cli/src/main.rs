//! Command-line front end: parses flags and JSON documents, dispatches to the
//! library, and emits one report document per invocation.
//!
//! Exit codes: 0 on success, 2 on any validation or parse error (and on
//! failed checks), 3 when a verdict is inconclusive so scripts can branch.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use iwasawa_core::duality::{
    check_diagram, limit_growth_table, tensor_limit_invariants, Diagram, OModuleSpec,
};
use iwasawa_core::invariants::{
    coinvariant_length, coinvariants_finite, exceptional_twists, invariants_from_matrix,
    twist_char_poly, CharPoly, ElementaryModule, Finiteness, FinitenessMode, MonicPoly,
};
use iwasawa_core::ledger::{
    h1_corank_floor, lambda_difference, local_invariants, nonprimitive_lambda, target_corank,
    FieldDatum, FormDatum, PrimeDatum,
};
use iwasawa_core::padic::{is_prime, Character};
use iwasawa_core::selftest::{run_selftest_with_fault, Fault};
use iwasawa_core::series::LambdaElem;
use iwasawa_core::IntPoly;

const DEFAULT_PRECISION: u32 = 8;
const DEFAULT_TRUNCATION: usize = 16;

#[derive(Parser)]
#[command(
    name = "iwasawa",
    about = "Finite-precision computations in the Iwasawa algebra",
    version
)]
struct Cli {
    /// The prime p.
    #[arg(long = "p", global = true)]
    p: Option<u64>,
    /// p-adic precision M: values are known mod p^M (default 8).
    #[arg(long = "M", global = true)]
    precision: Option<u32>,
    /// T-truncation N: series are known mod T^N (default 16).
    #[arg(long = "N", global = true)]
    truncation: Option<usize>,
    /// Input document path (defaults to stdin where a document is needed).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Report path (defaults to stdout).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Precision,
}

#[derive(Subcommand)]
enum Command {
    /// Weierstrass preparation of a series: mu, lambda, P, u.
    Prep {
        /// Little-endian integer coefficients, e.g. "[3,6,4,1]".
        #[arg(long)]
        poly: String,
    },
    /// Invariants of an elementary module or of a presentation matrix.
    Invariants {
        /// Elementary module document, e.g.
        /// {"rank":0,"pi_exponents":[2],"factors":[{"poly":[3,1],"e":1}]}.
        #[arg(long, conflicts_with = "matrix")]
        module: Option<String>,
        /// Square matrix of series, each entry little-endian coefficients.
        #[arg(long)]
        matrix: Option<String>,
    },
    /// Twist a characteristic polynomial by the i-th power of a character.
    Twist {
        /// kappa(gamma) as an integer in 1 + qZ_p.
        #[arg(long)]
        kappa: i64,
        #[arg(long)]
        i: i64,
        /// Monic part, little-endian, e.g. "[0,1]" for t.
        #[arg(long)]
        charpoly: String,
        #[arg(long, default_value_t = 0)]
        mu: u32,
    },
    /// Finiteness of the level-n coinvariants.
    Finiteness {
        #[arg(long)]
        charpoly: String,
        #[arg(long, default_value_t = 0)]
        mu: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Also report the length of the coinvariants when finite (exact
        /// mode only).
        #[arg(long, default_value_t = false)]
        length: bool,
    },
    /// Exceptional twist exponents in a range (exact mode).
    Exceptional {
        #[arg(long)]
        kappa: i64,
        #[arg(long)]
        charpoly: String,
        #[arg(long, default_value_t = 0)]
        mu: u32,
        #[arg(long)]
        imin: i64,
        #[arg(long)]
        imax: i64,
        #[arg(long)]
        nmax: u32,
    },
    /// Verify the self-duality diagrams at one (p, n, m) cell.
    DualityCheck {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        /// One of all, A1-res-cor, A1-cor-res, A3-pi-theta.
        #[arg(long, default_value = "all")]
        diagram: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Level-by-level growth of a tensored module.
    Growth {
        #[arg(long)]
        corank: u32,
        /// Torsion exponents, e.g. "[2]" for O/p^2.
        #[arg(long, default_value = "[]")]
        torsion: String,
        #[arg(long)]
        nmax: u32,
    },
    /// Evaluate a ledger document (from --input or stdin).
    Ledger,
    /// Run the aggregated invariant suite.
    Selftest {
        /// Verification plumbing: inject a known defect; the run must fail.
        #[arg(long, hide = true)]
        fault: Option<String>,
    },
}

/// Ledger input document.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LedgerConfig {
    field: FieldDatum,
    primes: Vec<PrimeDatum>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma0: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    forms: Vec<FormDatum>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleDoc {
    rank: u32,
    #[serde(default)]
    pi_exponents: Vec<u32>,
    #[serde(default)]
    factors: Vec<FactorDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorDoc {
    poly: Vec<i64>,
    e: u32,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let rendered = match cli.format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&outcome.report)
                        .expect("report serializes");
                    s.push('\n');
                    s
                }
                Format::Table => render_table(&outcome.report),
            };
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, rendered) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{rendered}"),
            }
            ExitCode::from(outcome.exit)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

struct Outcome {
    report: Value,
    exit: u8,
}

fn ok(report: Value) -> Result<Outcome, String> {
    Ok(Outcome { report, exit: 0 })
}

fn run(cli: &Cli) -> Result<Outcome, String> {
    match &cli.command {
        Command::Prep { poly } => prep(cli, poly),
        Command::Invariants { module, matrix } => invariants(cli, module, matrix),
        Command::Twist {
            kappa,
            i,
            charpoly,
            mu,
        } => twist(cli, *kappa, *i, charpoly, *mu),
        Command::Finiteness {
            charpoly,
            mu,
            n,
            mode,
            length,
        } => finiteness(cli, charpoly, *mu, *n, *mode, *length),
        Command::Exceptional {
            kappa,
            charpoly,
            mu,
            imin,
            imax,
            nmax,
        } => exceptional(cli, *kappa, charpoly, *mu, *imin, *imax, *nmax),
        Command::DualityCheck {
            n,
            m,
            diagram,
            samples,
        } => duality_check(cli, *n, *m, diagram, *samples),
        Command::Growth {
            corank,
            torsion,
            nmax,
        } => growth(cli, *corank, torsion, *nmax),
        Command::Ledger => ledger(cli),
        Command::Selftest { fault } => selftest(fault.as_deref()),
    }
}

fn require_prime(cli: &Cli) -> Result<u64, String> {
    let p = cli.p.ok_or("missing required flag --p")?;
    if !is_prime(p) {
        return Err(format!("--p {p} is not prime"));
    }
    Ok(p)
}

fn precision_of(cli: &Cli) -> u32 {
    cli.precision.unwrap_or(DEFAULT_PRECISION)
}

fn truncation_of(cli: &Cli) -> usize {
    cli.truncation.unwrap_or(DEFAULT_TRUNCATION)
}

fn parse_coeffs(label: &str, text: &str) -> Result<Vec<i64>, String> {
    serde_json::from_str::<Vec<i64>>(text)
        .map_err(|e| format!("--{label} is not an integer array: {e}"))
}

fn residues_to_json(residues: &[BigUint]) -> Value {
    Value::Array(residues.iter().map(biguint_to_json).collect())
}

fn biguint_to_json(x: &BigUint) -> Value {
    match u64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

fn bigint_to_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

fn charpoly_to_json(f: &CharPoly) -> Value {
    match f.monic() {
        MonicPoly::Exact(poly) => {
            let coeffs: Vec<Value> = if poly.coeffs().is_empty() {
                vec![json!(1)]
            } else {
                poly.coeffs().iter().map(bigint_to_json).collect()
            };
            Value::Array(coeffs)
        }
        MonicPoly::Modular(coeffs) => {
            Value::Array(coeffs.iter().map(|c| biguint_to_json(c.residue())).collect())
        }
    }
}

fn parse_charpoly(p: u64, mu: u32, text: &str) -> Result<CharPoly, String> {
    let coeffs = parse_coeffs("charpoly", text)?;
    CharPoly::new_exact(p, mu, IntPoly::from_i64(&coeffs)).map_err(|e| e.to_string())
}

fn prep(cli: &Cli, poly: &str) -> Result<Outcome, String> {
    let p = require_prime(cli)?;
    let precision = precision_of(cli);
    let truncation = truncation_of(cli);
    let coeffs = parse_coeffs("poly", poly)?;
    let f = LambdaElem::new(p, precision, truncation, &coeffs).map_err(|e| e.to_string())?;
    let form = f.weierstrass_prep().map_err(|e| e.to_string())?;
    let p_coeffs: Vec<BigUint> = form
        .distinguished
        .monic_coeffs()
        .iter()
        .map(|c| c.residue().clone())
        .collect();
    ok(json!({
        "command": "prep",
        "inputs": {"p": p, "M": precision, "N": truncation, "poly": coeffs},
        "result": {
            "mu": form.mu,
            "lambda": form.lambda(),
            "P": residues_to_json(&p_coeffs),
            "u": residues_to_json(&form.unit.trimmed_residues()),
        },
        "status": "ok",
    }))
}

fn invariants(
    cli: &Cli,
    module: &Option<String>,
    matrix: &Option<String>,
) -> Result<Outcome, String> {
    let p = require_prime(cli)?;
    match (module, matrix) {
        (Some(doc), None) => {
            let doc: ModuleDoc =
                serde_json::from_str(doc).map_err(|e| format!("--module: {e}"))?;
            let factors = doc
                .factors
                .iter()
                .map(|f| (IntPoly::from_i64(&f.poly), f.e))
                .collect();
            let module = ElementaryModule::new(p, doc.rank, doc.pi_exponents.clone(), factors)
                .map_err(|e| e.to_string())?;
            let inv = module.invariants();
            let mut result = json!({
                "rank": inv.rank,
                "mu": inv.mu,
                "lambda": inv.lambda,
            });
            if inv.rank == 0 {
                let f = module.char_poly().map_err(|e| e.to_string())?;
                result["charpoly"] = json!({
                    "mu": f.mu(),
                    "monic": charpoly_to_json(&f),
                });
            }
            ok(json!({
                "command": "invariants",
                "inputs": {"p": p, "module": {
                    "rank": doc.rank,
                    "pi_exponents": doc.pi_exponents,
                    "factors": doc.factors.iter().map(|f| json!({"poly": f.poly, "e": f.e})).collect::<Vec<_>>(),
                }},
                "result": result,
                "status": "ok",
            }))
        }
        (None, Some(doc)) => {
            let precision = precision_of(cli);
            let truncation = truncation_of(cli);
            let rows: Vec<Vec<Vec<i64>>> =
                serde_json::from_str(doc).map_err(|e| format!("--matrix: {e}"))?;
            let matrix: Vec<Vec<LambdaElem>> = rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|entry| LambdaElem::new(p, precision, truncation, entry))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            let inv = invariants_from_matrix(&matrix).map_err(|e| e.to_string())?;
            ok(json!({
                "command": "invariants",
                "inputs": {"p": p, "M": precision, "N": truncation, "matrix": rows},
                "result": {
                    "mu": inv.mu,
                    "lambda": inv.lambda,
                    "charpoly": {"mu": inv.char_poly.mu(), "monic": charpoly_to_json(&inv.char_poly)},
                },
                "status": "ok",
            }))
        }
        _ => Err("exactly one of --module or --matrix is required".into()),
    }
}

fn twist(cli: &Cli, kappa: i64, i: i64, charpoly: &str, mu: u32) -> Result<Outcome, String> {
    let p = require_prime(cli)?;
    let precision = precision_of(cli);
    let f = parse_charpoly(p, mu, charpoly)?;
    let character = Character::new(p, precision, kappa).map_err(|e| e.to_string())?;
    let twisted = twist_char_poly(&f, &character, i).map_err(|e| e.to_string())?;
    ok(json!({
        "command": "twist",
        "inputs": {"p": p, "M": precision, "kappa": kappa, "i": i,
                   "charpoly": parse_coeffs("charpoly", charpoly)?, "mu": mu},
        "result": {
            "charpoly": charpoly_to_json(&twisted),
            "mu": twisted.mu(),
            "lambda": twisted.lambda(),
        },
        "status": "ok",
    }))
}

fn finiteness(
    cli: &Cli,
    charpoly: &str,
    mu: u32,
    n: u32,
    mode: Mode,
    length: bool,
) -> Result<Outcome, String> {
    let p = require_prime(cli)?;
    let f = parse_charpoly(p, mu, charpoly)?;
    let (verdict, mode_name, f_used) = match mode {
        Mode::Exact => (
            coinvariants_finite(&f, n, FinitenessMode::Exact).map_err(|e| e.to_string())?,
            "exact",
            f.clone(),
        ),
        Mode::Precision => {
            let precision = precision_of(cli);
            let modular = CharPoly::new_modular(
                p,
                mu,
                f.modular_coeffs(precision).map_err(|e| e.to_string())?,
            )
            .map_err(|e| e.to_string())?;
            (
                coinvariants_finite(&modular, n, FinitenessMode::Precision)
                    .map_err(|e| e.to_string())?,
                "precision",
                modular,
            )
        }
    };
    let verdict_name = match verdict {
        Finiteness::Finite => "finite",
        Finiteness::Infinite => "infinite",
        Finiteness::Inconclusive => "inconclusive",
    };
    let mut result = json!({"verdict": verdict_name});
    if length && verdict == Finiteness::Finite && mode == Mode::Exact {
        result["length"] = json!(coinvariant_length(&f_used, n).map_err(|e| e.to_string())?);
    }
    let exit = if verdict == Finiteness::Inconclusive { 3 } else { 0 };
    Ok(Outcome {
        report: json!({
            "command": "finiteness",
            "inputs": {"p": p, "charpoly": parse_coeffs("charpoly", charpoly)?, "mu": mu,
                       "n": n, "mode": mode_name},
            "result": result,
            "status": "ok",
        }),
        exit,
    })
}

fn exceptional(
    cli: &Cli,
    kappa: i64,
    charpoly: &str,
    mu: u32,
    imin: i64,
    imax: i64,
    nmax: u32,
) -> Result<Outcome, String> {
    let p = require_prime(cli)?;
    let f = parse_charpoly(p, mu, charpoly)?;
    let set = exceptional_twists(&f, &BigInt::from(kappa), imin..=imax, nmax)
        .map_err(|e| e.to_string())?;
    ok(json!({
        "command": "exceptional",
        "inputs": {"p": p, "kappa": kappa, "charpoly": parse_coeffs("charpoly", charpoly)?,
                   "mu": mu, "i_range": [imin, imax], "n_max": nmax},
        "result": {
            "exceptional": set.iter().collect::<Vec<_>>(),
            "searched": format!("i in [{imin}, {imax}], n <= {nmax}"),
        },
        "status": "ok",
    }))
}

fn duality_check(cli: &Cli, n: u32, m: u32, diagram: &str, samples: usize) -> Result<Outcome, String> {
    let p = require_prime(cli)?;
    let diagrams: Vec<Diagram> = if diagram == "all" {
        Diagram::ALL.to_vec()
    } else {
        vec![Diagram::from_name(diagram)
            .ok_or_else(|| format!("unknown diagram `{diagram}`"))?]
    };
    let mut cells = Vec::new();
    let mut all_pass = true;
    for d in diagrams {
        let report = check_diagram(d, p, n, m, samples).map_err(|e| e.to_string())?;
        all_pass &= report.pass;
        cells.push(serde_json::to_value(&report).expect("report serializes"));
    }
    Ok(Outcome {
        report: json!({
            "command": "duality-check",
            "inputs": {"p": p, "n": n, "m": m, "diagram": diagram, "samples": samples},
            "result": {"pass": all_pass, "cells": cells},
            "status": if all_pass { "ok" } else { "failed" },
        }),
        exit: if all_pass { 0 } else { 2 },
    })
}

fn growth(cli: &Cli, corank: u32, torsion: &str, nmax: u32) -> Result<Outcome, String> {
    let p = require_prime(cli)?;
    let torsion: Vec<u32> = serde_json::from_str(torsion)
        .map_err(|e| format!("--torsion is not an integer array: {e}"))?;
    let spec = OModuleSpec { corank, torsion };
    let rows = limit_growth_table(p, &spec, nmax).map_err(|e| e.to_string())?;
    let tensor = tensor_limit_invariants(&spec);
    ok(json!({
        "command": "growth",
        "inputs": {"p": p, "corank": spec.corank, "torsion": spec.torsion, "n_max": nmax},
        "result": {
            "tensor_invariants": tensor,
            "levels": rows,
        },
        "status": "ok",
    }))
}

fn read_document(cli: &Cli) -> Result<String, String> {
    match &cli.input {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display())),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| format!("cannot read stdin: {e}"))?;
            Ok(buf)
        }
    }
}

fn ledger(cli: &Cli) -> Result<Outcome, String> {
    let text = read_document(cli)?;
    let config: LedgerConfig = serde_json::from_str(&text).map_err(|e| format!("{e}"))?;
    for prime in &config.primes {
        prime.validate().map_err(|e| e.to_string())?;
    }
    FieldDatum::new(config.field.r1, config.field.r2).map_err(|e| e.to_string())?;
    let corank = target_corank(&config.field, &config.primes).map_err(|e| e.to_string())?;
    let mut result = json!({
        "h1_corank_floor": h1_corank_floor(&config.field),
        "target_corank": corank,
        "local_invariants": config
            .primes
            .iter()
            .map(|v| (v.id.clone(), serde_json::to_value(local_invariants(v)).unwrap()))
            .collect::<serde_json::Map<String, Value>>(),
    });
    if let Some(sigma0) = &config.sigma0 {
        let mut lambdas = serde_json::Map::new();
        for form in &config.forms {
            let value = nonprimitive_lambda(form, sigma0).map_err(|e| e.to_string())?;
            lambdas.insert(form.label.clone(), json!(value));
        }
        result["nonprimitive_lambda"] = Value::Object(lambdas);
    }
    if config.forms.len() == 2 {
        let report =
            lambda_difference(&config.forms[0], &config.forms[1]).map_err(|e| e.to_string())?;
        result["lambda_difference"] = serde_json::to_value(&report).unwrap();
    }
    ok(json!({
        "command": "ledger",
        "inputs": serde_json::to_value(&config).unwrap(),
        "result": result,
        "status": "ok",
    }))
}

fn selftest(fault: Option<&str>) -> Result<Outcome, String> {
    let fault = match fault {
        None => None,
        Some("padic-mul") => Some(Fault::PadicMulSkew),
        Some("prep-unit") => Some(Fault::PrepUnitSkew),
        Some("twist-exponent") => Some(Fault::TwistExponentSkew),
        Some("phi-negation") => Some(Fault::PhiNegation),
        Some("ledger-sum") => Some(Fault::LedgerSumSkew),
        Some(other) => return Err(format!("unknown fault `{other}`")),
    };
    let report = run_selftest_with_fault(fault);
    let passed = report.passed;
    Ok(Outcome {
        report: json!({
            "command": "selftest",
            "inputs": {"fault": fault.map(|f| format!("{f:?}"))},
            "result": serde_json::to_value(&report).unwrap(),
            "status": if passed { "ok" } else { "failed" },
        }),
        exit: if passed { 0 } else { 2 },
    })
}

/// Plain-text rendering: dotted keys, one line per leaf; arrays of objects
/// become one line per element.
fn render_table(value: &Value) -> String {
    let mut lines = Vec::new();
    flatten("", value, &mut lines);
    let mut out = String::new();
    for (k, v) in lines {
        out.push_str(&format!("{k} = {v}\n"));
    }
    out
}

fn flatten(prefix: &str, value: &Value, lines: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, lines);
            }
        }
        Value::Array(items) if items.iter().any(|v| v.is_object()) => {
            for (idx, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{idx}]"), v, lines);
            }
        }
        other => lines.push((prefix.to_string(), other.to_string())),
    }
}
