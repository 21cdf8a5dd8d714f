use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use monoform::certify::{check_certificate, Certificate, Report, Status};
use monoform::cosets::{decompose, min_value_class};
use monoform::cuts::{run_monomialization, SolveOptions};
use monoform::error::Error;
use monoform::intmat::IMat;
use monoform::lattice::{hilbert_basis, module_generators, preimage_lattice, Which};
use monoform::num::{fmt_q, Q};
use monoform::perron::{perron_step, DEFAULT_CAP};
use monoform::problem::ExtensionProblem;
use monoform::series::parse_poly;
use monoform::valuegroup::{EmbeddingBasis, Value};

mod generate;

#[derive(Parser)]
#[command(
    name = "monoform",
    version,
    about = "Local monomialization with checkable certificates"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve a problem file and emit a certificate.
    Solve {
        problem: PathBuf,
        /// Write the certificate here instead of standard output.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Comparison degree for unit tails.
        #[arg(long)]
        trunc: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        max_steps: usize,
    },
    /// Verify certificates independently of the solver.
    Check {
        #[arg(required = true)]
        certs: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run Perron steps on square-root values, e.g. `--vals sqrt2,sqrt3`.
    Perron {
        #[arg(long, value_delimiter = ',', required = true)]
        vals: Vec<String>,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
    /// Preimage lattice, Hilbert bases and module generators of an exponent matrix.
    Lattice {
        /// Matrix as JSON, e.g. `[[2]]`.
        #[arg(long = "C")]
        c: String,
        /// Class representative Λ as JSON, e.g. `[1]`.
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Split a polynomial into coset classes.
    Decompose {
        #[arg(long = "C")]
        c: String,
        #[arg(long)]
        poly: String,
        /// Values of the variables, to report the class of least value.
        #[arg(long, value_delimiter = ',')]
        vals: Vec<String>,
    },
    /// Print a random admissible problem.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of valued x rows.
        #[arg(long, default_value_t = 2)]
        rows: usize,
        /// Number of valued y variables.
        #[arg(long, default_value_t = 3)]
        vars: usize,
        #[arg(long, default_value_t = 4)]
        tail_degree: u32,
    },
}

/// Exit status: 0 pass, 1 failure, 2 malformed input.
enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.cmd {
        Cmd::Solve {
            problem,
            out,
            trunc,
            max_steps,
        } => solve(cli.format, problem, out.as_deref(), *trunc, *max_steps),
        Cmd::Check { certs, jobs } => check(cli.format, certs, *jobs),
        Cmd::Perron { vals, steps } => {
            emit(cli.format, &perron(vals, *steps)?);
            Ok(Outcome::Pass)
        }
        Cmd::Lattice { c, lambda } => {
            emit(cli.format, &lattice(c, lambda.as_deref())?);
            Ok(Outcome::Pass)
        }
        Cmd::Decompose { c, poly, vals } => {
            emit(cli.format, &decomposition(c, poly, vals)?);
            Ok(Outcome::Pass)
        }
        Cmd::Generate {
            seed,
            rows,
            vars,
            tail_degree,
        } => {
            let p = generate::problem(*seed, *rows, *vars, *tail_degree)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::to_value(&p)?)?
            );
            Ok(Outcome::Pass)
        }
    }
}

fn emit(format: Format, v: &Json) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(v).expect("serializable")),
        Format::Text => print!("{}", text(v, 0)),
    }
}

fn text(v: &Json, indent: usize) -> String {
    let pad = "  ".repeat(indent);
    match v {
        Json::Object(m) => m
            .iter()
            .map(|(k, x)| match x {
                Json::Object(_) => format!("{pad}{k}:\n{}", text(x, indent + 1)),
                Json::Array(a) if a.iter().any(|e| e.is_object()) => format!(
                    "{pad}{k}:\n{}",
                    a.iter()
                        .map(|e| text(e, indent + 1))
                        .collect::<Vec<_>>()
                        .join(&format!("{pad}  --\n"))
                ),
                _ => format!("{pad}{k}: {x}\n"),
            })
            .collect(),
        _ => format!("{pad}{v}\n"),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn solve(
    format: Format,
    path: &Path,
    out: Option<&Path>,
    trunc: Option<u32>,
    max_steps: usize,
) -> Result<Outcome> {
    let problem = ExtensionProblem::from_json(&read(path)?)
        .with_context(|| format!("parsing {}", path.display()))?;
    let cert = run_monomialization(&problem, &SolveOptions { trunc, max_steps })
        .with_context(|| format!("problem {}", problem.name))?;
    let body = cert.to_json()?;
    let summary = summary(&cert);
    match (out, format) {
        (Some(o), _) => {
            std::fs::write(o, &body).with_context(|| format!("writing {}", o.display()))?;
            print!("{summary}");
        }
        (None, Format::Json) => {
            print!("{body}");
            eprint!("{summary}");
        }
        (None, Format::Text) => print!("{summary}"),
    }
    Ok(if cert.status == Status::Ok {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn summary(cert: &Certificate) -> String {
    let mut s = format!(
        "{}: {:?}, {} T-side and {} U-side steps\n",
        cert.problem.name,
        cert.status,
        cert.t_steps.len(),
        cert.u_steps.len()
    );
    if let Some(f) = &cert.final_form {
        s += &format!("rank {}, C = {:?}\n", f.c.len(), f.c);
    }
    if let Some(d) = &cert.diagnosis {
        s += &format!("diagnosis: {d}\n");
    }
    s
}

fn check_one(path: &Path) -> Result<Report> {
    let cert = Certificate::from_json(&read(path)?)
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(check_certificate(&cert))
}

fn check(format: Format, certs: &[PathBuf], jobs: usize) -> Result<Outcome> {
    let jobs = jobs.clamp(1, certs.len().max(1));
    let chunk = certs.len().div_ceil(jobs);
    let results: Vec<Result<Report>> = std::thread::scope(|s| {
        let handles: Vec<_> = certs
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|p| check_one(p)).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("checker thread panicked"))
            .collect()
    });
    let mut all_pass = true;
    let mut docs = Vec::new();
    for (path, res) in certs.iter().zip(results) {
        let rep = res?;
        all_pass &= rep.passed();
        match format {
            Format::Json => docs.push(json!({
                "file": path.display().to_string(),
                "passed": rep.passed(),
                "checks": rep.checks,
            })),
            Format::Text => {
                println!(
                    "{}: {}",
                    path.display(),
                    if rep.passed() { "PASS" } else { "FAIL" }
                );
                print!("{}", rep.text());
            }
        }
    }
    if format == Format::Json {
        println!("{}", serde_json::to_string_pretty(&docs)?);
    }
    Ok(if all_pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn parse_matrix(s: &str) -> Result<IMat> {
    let m: IMat = serde_json::from_str(s).with_context(|| format!("matrix {s:?}"))?;
    Ok(m)
}

fn q_strings(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

fn value_json(v: &Value) -> Json {
    json!({ "basis": v.basis().descriptors(), "coords": q_strings(v.coords()) })
}

/// `sqrt2` or `2` names the generator √2; `1` is the rational generator.
fn generators(names: &[String]) -> Result<Vec<Value>> {
    let ns = names
        .iter()
        .map(|s| {
            let t = s.trim();
            t.strip_prefix("sqrt")
                .unwrap_or(t)
                .parse::<u64>()
                .with_context(|| format!("value {t:?}"))
        })
        .collect::<Result<Vec<_>>>()?;
    let b = EmbeddingBasis::sqrt(&ns)?;
    Ok((0..ns.len()).map(|i| Value::generator(&b, i)).collect())
}

fn perron(names: &[String], steps: usize) -> Result<Json> {
    let mut vals = generators(names)?;
    let mut out = Vec::new();
    for _ in 0..steps {
        let (step, nv) = perron_step(&vals)?;
        out.push(json!({ "A": step.a }));
        vals = nv;
    }
    Ok(json!({ "steps": out, "values": vals.iter().map(value_json).collect::<Vec<_>>() }))
}

fn sorted_rows(rows: &[Vec<Q>]) -> Vec<Vec<String>> {
    let mut v: Vec<Vec<Q>> = rows.to_vec();
    v.sort();
    v.iter().map(|r| q_strings(r)).collect()
}

fn lattice(c: &str, lambda: Option<&str>) -> Result<Json> {
    let c = parse_matrix(c)?;
    let g = preimage_lattice(&c)?;
    let mut doc = json!({
        "index": g.index,
        "basis": g.basis.iter().map(|r| q_strings(r)).collect::<Vec<_>>(),
        "coset_reps": sorted_rows(&g.coset_reps()),
    });
    for (key, which) in [("hilbert_H", Which::H), ("hilbert_I", Which::I)] {
        let h = hilbert_basis(&c, which)?;
        let mut image = h.image.clone();
        image.sort();
        doc[key] = json!({ "v": sorted_rows(&h.hilbert), "image": image });
    }
    if let Some(l) = lambda {
        let lam: Vec<i64> = serde_json::from_str(l).with_context(|| format!("Λ {l:?}"))?;
        let m = module_generators(&c, &lam)?;
        doc["module"] = json!({ "lambda": m.lambda, "gens": sorted_rows(&m.gens) });
    }
    Ok(doc)
}

fn decomposition(c: &str, poly: &str, vals: &[String]) -> Result<Json> {
    let c = parse_matrix(c)?;
    let sbar = c.first().map_or(0, Vec::len);
    let nvars = sbar.max(vals.len());
    let f = parse_poly(poly, nvars)?;
    let parts = decompose(&f, &c)?;
    let classes: Vec<Json> = parts
        .iter()
        .map(|(k, p)| json!({ "class": k.0, "poly": p.to_string() }))
        .collect();
    let mut doc = json!({ "classes": classes });
    if !vals.is_empty() {
        if vals.len() != nvars {
            bail!("{} values given for {nvars} variables", vals.len());
        }
        match min_value_class(&parts, &generators(vals)?) {
            Ok((k, v)) => doc["min_class"] = json!({ "class": k.0, "value": value_json(&v) }),
            Err(e @ Error::Inconsistent(_)) => doc["min_class"] = json!({ "error": e.to_string() }),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(doc)
}
