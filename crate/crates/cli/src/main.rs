use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use perfect_codes::census::{generate_distinct_codes, lower_bound};
use perfect_codes::codespace::{is_perfect, min_distance, rank, Certificate, CertificateKind, Code, Word};
use perfect_codes::combiner::combine;
use perfect_codes::components::{
    build_mollard_phelps_with, build_phelps_with, component_shift, component_verify, BuildStrategy,
    ComponentCertificate, MuComponent,
};
use perfect_codes::decomposer::{decompose, decomposition_verify, DecompositionCheck};
use perfect_codes::gfq::FieldTable;
use perfect_codes::hamming::{hamming_code, perfect_partition};
use perfect_codes::io;
use perfect_codes::quasigroup::qg_count;
use perfect_codes::Error;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "perfect-codes", version, about = "Build, split and verify perfect 1-error-correcting q-ary codes")]
struct Cli {
    /// Print a JSON summary instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file or directory, depending on the command.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[arg(short, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hamming code of redundancy r.
    Hamming { q: u32, r: u32 },
    /// Check that a code is perfect.
    Verify { code: PathBuf },
    /// Minimum distance of a code.
    Mindist { code: PathBuf },
    /// Dimension of the span of a code.
    Rank { code: PathBuf },
    /// Coset partition of F_q^n0 into perfect codes.
    Partition { q: u32, n0: usize },
    /// Number of m-ary quasigroups of the given order.
    QgCount { m: usize, order: u32 },
    /// Build a mu-component from a manifest.
    Component {
        kind: ComponentKind,
        manifest: PathBuf,
        #[arg(long, value_enum, default_value_t = Strategy::Auto)]
        strategy: Strategy,
    },
    /// Combine the components listed in an assembly manifest.
    Combine {
        manifest: PathBuf,
        /// Undo this coordinate transform (a `psi.txt` from `decompose`).
        #[arg(long)]
        psi: Option<PathBuf>,
    },
    /// Move a component with linear sigma to another profile.
    Shift { component: PathBuf, mu: String },
    /// Split a perfect code into mu-components.
    Decompose { code: PathBuf, r: u32 },
    /// Lower bound on the number of perfect codes of length n.
    Bound { n: usize, q: u32 },
    /// Distinct perfect codes from the quasigroup construction.
    Generate {
        n: usize,
        q: u32,
        #[arg(long)]
        limit: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ComponentKind {
    Mollard,
    Phelps,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Auto,
    Filter,
    Solve,
}

impl From<Strategy> for BuildStrategy {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Auto => BuildStrategy::Auto,
            Strategy::Filter => BuildStrategy::Filter,
            Strategy::Solve => BuildStrategy::Solve,
        }
    }
}

/// What a command reports: text lines, a JSON summary, and whether the
/// checked property held.
struct Report {
    text: String,
    json: Value,
    ok: bool,
}

impl Report {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Report {
            text: text.into(),
            json,
            ok: true,
        }
    }

    fn failed(text: impl Into<String>, json: Value) -> Self {
        Report {
            text: text.into(),
            json,
            ok: false,
        }
    }
}

fn certificate_line(c: &Certificate) -> String {
    let kind = match c.kind {
        CertificateKind::Uncovered => "uncovered",
        CertificateKind::DoublyCovered => "doubly-covered",
    };
    format!("certificate {kind} {}", c.word)
}

fn certificate_json(c: &Certificate) -> Value {
    json!({ "kind": format!("{:?}", c.kind), "word": c.word.to_string() })
}

fn component_certificate_line(c: &ComponentCertificate) -> String {
    match c {
        ComponentCertificate::Law { word, profile } => format!("certificate law {word} profile {profile}"),
        ComponentCertificate::Distance { a, b } => format!("certificate distance {a} {b}"),
        ComponentCertificate::Cardinality { expected, actual } => {
            format!("certificate cardinality {actual} expected {expected}")
        }
    }
}

/// Failures that carry a verification verdict rather than bad input.
fn verdict(err: &Error) -> Option<String> {
    match err {
        Error::NotPerfect { certificate, .. }
        | Error::BadVhPair(certificate)
        | Error::OuterNotPerfect(certificate)
        | Error::NotPerfectResult(certificate) => Some(certificate_line(certificate)),
        Error::ComponentLawViolation { mu, certificate } => {
            Some(format!("{} (mu={mu})", component_certificate_line(certificate)))
        }
        Error::StructureViolation(msg) => Some(format!("certificate structure {msg}")),
        _ => None,
    }
}

/// Writes a file body to `--out`, or to stdout unless a JSON summary
/// owns stdout.
fn emit(cli: &Cli, text: &str) -> anyhow::Result<()> {
    match &cli.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None if cli.json => Ok(()),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_code(path: &Path) -> anyhow::Result<Code> {
    io::read_code(path).with_context(|| format!("reading {}", path.display()))
}

fn save_component(cli: &Cli, k: &MuComponent) -> anyhow::Result<()> {
    match &cli.out {
        Some(p) => io::write_component(p, k).with_context(|| format!("writing {}", p.display())),
        None => emit(cli, &io::format_component(k, &[])),
    }
}

fn component_report(k: &MuComponent, cli: &Cli) -> anyhow::Result<Report> {
    let check = component_verify(k);
    let summary = json!({
        "mu": k.mu().to_string(),
        "size": k.code().len(),
        "n": k.code().n(),
        "layout": k.layout().to_string(),
        "valid": check.is_valid(),
    });
    Ok(match check.certificate() {
        None => {
            save_component(cli, k)?;
            let text = if cli.out.is_some() {
                format!("component mu={} with {} words of length {}\n", k.mu(), k.code().len(), k.code().n())
            } else {
                String::new()
            };
            Report::ok(text, summary)
        }
        Some(c) => Report::failed(format!("component fails verification\n{}\n", component_certificate_line(c)), summary),
    })
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    let out = &cli.out;
    Ok(match &cli.command {
        Command::Hamming { q, r } => {
            let c = hamming_code(*q, *r)?;
            emit(cli, &io::format_code(&c, &[]))?;
            Report::ok("", json!({ "q": q, "n": c.n(), "size": c.len() }))
        }
        Command::Verify { code } => {
            let c = read_code(code)?;
            match is_perfect(&c)?.certificate() {
                None => Report::ok(
                    format!("perfect: {} words of length {}\n", c.len(), c.n()),
                    json!({ "perfect": true, "size": c.len(), "n": c.n() }),
                ),
                Some(cert) => Report::failed(
                    format!("not perfect\n{}\n", certificate_line(cert)),
                    json!({ "perfect": false, "certificate": certificate_json(cert) }),
                ),
            }
        }
        Command::Mindist { code } => {
            let d = min_distance(&read_code(code)?)?;
            Report::ok(format!("{d}\n"), json!({ "min_distance": d }))
        }
        Command::Rank { code } => {
            let k = rank(&read_code(code)?)?;
            Report::ok(format!("{k}\n"), json!({ "rank": k }))
        }
        Command::Partition { q, n0 } => {
            let p = perfect_partition(*q, *n0)?;
            emit(cli, &io::format_partition(&p))?;
            Report::ok("", json!({ "q": q, "n0": n0, "parts": p.parts().len() }))
        }
        Command::QgCount { m, order } => {
            let c = qg_count(*m, *order)?;
            Report::ok(format!("{c}\n"), json!({ "m": m, "order": order, "count": c }))
        }
        Command::Component {
            kind,
            manifest,
            strategy,
        } => {
            let k = match kind {
                ComponentKind::Mollard => {
                    let m = io::read_mollard_phelps_manifest(manifest)?;
                    build_mollard_phelps_with(&m.mu, &m.inputs, FieldTable::shared(m.q)?, (*strategy).into())?
                }
                ComponentKind::Phelps => {
                    let m = io::read_phelps_manifest(manifest)?;
                    build_phelps_with(&m.mu, &m.inputs, FieldTable::shared(m.q)?, (*strategy).into())?
                }
            };
            component_report(&k, cli)?
        }
        Command::Combine { manifest, psi } => {
            let a = io::read_assembly(manifest).with_context(|| format!("reading {}", manifest.display()))?;
            let mut c = combine(&a)?;
            if let Some(p) = psi {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                let psi = io::parse_psi(&text)?;
                c = psi.inverse(FieldTable::shared(c.q())?)?.apply(&c)?;
            }
            emit(cli, &io::format_code(&c, &[]))?;
            let text = if out.is_some() {
                format!("perfect code of {} words, length {}\n", c.len(), c.n())
            } else {
                String::new()
            };
            Report::ok(text, json!({ "perfect": true, "size": c.len(), "n": c.n() }))
        }
        Command::Shift { component, mu } => {
            let k = io::read_component(component).with_context(|| format!("reading {}", component.display()))?;
            let target = Word::parse_digits(mu, k.layout().q)?;
            component_report(&component_shift(&k, &target)?, cli)?
        }
        Command::Decompose { code, r } => {
            let c = read_code(code)?;
            let d = decompose(&c, *r)?;
            let check = decomposition_verify(&d, &c, cli.seed)?;
            if let Some(dir) = out {
                io::write_decomposition(dir, &d).with_context(|| format!("writing {}", dir.display()))?;
            }
            let p = &d.layout;
            let summary = json!({
                "layout": p.to_string(),
                "outer_size": d.outer.len(),
                "components": d.components.len(),
                "component_size": d.components.values().next().map(|k| k.code().len()),
                "valid": check.is_valid(),
            });
            match check {
                DecompositionCheck::Valid => Report::ok(
                    format!(
                        "q m r t s l n0 = {p}\nouter code: {} words\ncomponents: {} of {} words\n",
                        d.outer.len(),
                        d.components.len(),
                        p.component_size()
                    ),
                    summary,
                ),
                DecompositionCheck::Invalid(c) => Report::failed(format!("decomposition invalid\ncertificate {c}\n"), summary),
            }
        }
        Command::Bound { n, q } => {
            let b = lower_bound(*n, *q)?;
            Report::ok(
                format!("{b}\n"),
                json!({
                    "n": b.n, "q": b.q, "t": b.t, "Q": b.q_count, "R": b.r_count,
                    "bound": b.bound.to_string(), "provenance": b.provenance.to_string(),
                    "printed_R": [b.printed_r.0, b.printed_r.1],
                }),
            )
        }
        Command::Generate { n, q, limit } => {
            let codes = generate_distinct_codes(*n, *q, *limit)?;
            if let Some(dir) = out {
                fs::create_dir_all(dir)?;
                for (i, c) in codes.iter().enumerate() {
                    io::write_code(&dir.join(format!("code_{i:04}.code")), c)?;
                }
            }
            Report::ok(
                format!("{} distinct perfect codes of length {n}\n", codes.len()),
                json!({ "n": n, "q": q, "count": codes.len() }),
            )
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(2);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", json!({ "ok": report.ok, "result": report.json }));
            } else {
                print!("{}", report.text);
            }
            ExitCode::from(if report.ok { 0 } else { 1 })
        }
        Err(e) => {
            let core = e.downcast_ref::<Error>();
            let certificate = core.and_then(verdict);
            let code = if certificate.is_some() { 1 } else { 2 };
            if cli.json {
                println!("{}", json!({ "ok": false, "error": format!("{e:#}"), "certificate": certificate }));
            } else {
                eprintln!("error: {e:#}");
                if let Some(c) = certificate {
                    println!("{c}");
                }
                if cli.verbose > 0 {
                    eprintln!("{e:?}");
                }
            }
            ExitCode::from(code)
        }
    }
}

