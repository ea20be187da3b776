//! `treeshift` command-line front end.
//!
//! `construct` writes weight dumps, `verify` emits certificates for one
//! property over a probe window, `report` replays certificate files and
//! prints a summary table.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use treeshift::diagnose::{
    adjoint_witness_search, consistency_check, hyponormality_test, phi_unboundedness_witness,
    square_domain_test, tree_admissibility, Admissibility, DEFAULT_MAX_INDEX, DEFAULT_MAX_TERMS,
};
use treeshift::probe::{DEFAULT_DEPTH, DEFAULT_WIDTH};
use treeshift::shift::write_weight_dump;
use treeshift::{
    replay, Certificate, CertificateKind, ConstructionSpec, Exact, FiniteVector, ProbeWindow,
    VertexAddr,
};

pub const EXIT_MATCH: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "treeshift", version, about = "Exact weighted-shift constructions and certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the squared weights of a construction on a probe window.
    Construct(ConstructArgs),
    /// Check one property and emit certificates.
    Verify(VerifyArgs),
    /// Replay certificate files and print a summary table.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Property {
    Consistency,
    Hyponormal,
    SquareTrivial,
    AdjointQuantity,
    PhiUnbounded,
    Admissible,
}

impl Property {
    fn name(self) -> &'static str {
        match self {
            Property::Consistency => "consistency",
            Property::Hyponormal => "hyponormal",
            Property::SquareTrivial => "square-trivial",
            Property::AdjointQuantity => "adjoint-quantity",
            Property::PhiUnbounded => "phi-unbounded",
            Property::Admissible => "admissible",
        }
    }

    /// Window used when `--depth`/`--width` are not given. Divergence
    /// transcripts cost one term per unit of threshold, so square-trivial
    /// probes a small window by default.
    fn default_window(self) -> ProbeWindow {
        match self {
            Property::SquareTrivial => ProbeWindow::new(1, 4),
            _ => ProbeWindow::new(DEFAULT_DEPTH, DEFAULT_WIDTH),
        }
    }
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    /// Probe depth (generations below each base vertex).
    #[arg(long)]
    pub depth: Option<usize>,
    /// Probe width (children per generation).
    #[arg(long)]
    pub width: Option<usize>,
}

impl WindowArgs {
    fn resolve(&self, default: ProbeWindow) -> Result<ProbeWindow, CliError> {
        let w = ProbeWindow::new(
            self.depth.unwrap_or(default.depth),
            self.width.unwrap_or(default.width),
        );
        if w.depth < 1 || w.width < 1 {
            return Err(CliError::Usage("--depth and --width must be at least 1".into()));
        }
        Ok(w)
    }
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// `mode=<sqtrivial|hypo|nonhypo|perturb>;rooted=<0|1>;theta=<p/q>;v0=<address>`
    pub spec: String,
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub property: Property,
    pub spec: String,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Divergence threshold, witness threshold, or bound² for phi-unbounded.
    #[arg(long, default_value = "1000000")]
    pub threshold: Exact,
    /// Number of explicit child terms before the closed-form tail.
    #[arg(long, default_value_t = 8)]
    pub prefix: u64,
    /// Cap on terms consumed by a single divergence transcript.
    #[arg(long, default_value_t = DEFAULT_MAX_TERMS)]
    pub max_terms: u64,
    /// Check a single vertex instead of the window.
    #[arg(long)]
    pub address: Option<VertexAddr>,
    #[arg(long, value_enum, default_value_t = Expect::Pass)]
    pub expect: Expect,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Certificate files in JSON format (one certificate or an array).
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Construct(#[from] treeshift::ConstructError),
    #[error(transparent)]
    Diagnose(#[from] treeshift::DiagnoseError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: not a certificate file: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
}

/// Resolved settings of a `verify` run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: ConstructionSpec,
    pub window: ProbeWindow,
    pub threshold: Exact,
    pub prefix: u64,
    pub max_terms: u64,
    pub address: Option<VertexAddr>,
}

/// Outcome of a `verify` run.
#[derive(Debug, Clone)]
pub struct Verification {
    pub property: Property,
    pub passed: bool,
    pub certificates: Vec<Certificate>,
    pub probed: usize,
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Construct(a) => cmd_construct(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Report(a) => cmd_report(&a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    let (res, name) = match path {
        Some(p) => (fs::write(p, text), p.display().to_string()),
        None => (out.write_all(text.as_bytes()), "<stdout>".to_string()),
    };
    res.map_err(|source| CliError::Io { path: name, source })
}

/// Weight dump for a spec on a window, in the requested format.
pub fn construct_dump(spec: &str, window: &ProbeWindow, format: Format) -> Result<String, CliError> {
    let spec: ConstructionSpec = spec.parse()?;
    let family = spec.build()?;
    let vertices = window.vertices(family.tree());
    Ok(match format {
        Format::Text => write_weight_dump(family.as_ref(), &vertices),
        Format::Json => {
            let rows: Vec<_> = vertices
                .iter()
                .map(|v| {
                    serde_json::json!({
                        "address": v.to_string(),
                        "lambda_sq": family.lambda_sq(v).to_string(),
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&rows).expect("plain json");
            s.push('\n');
            s
        }
    })
}

pub fn cmd_construct(args: &ConstructArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let window = args.window.resolve(ProbeWindow::default())?;
    let dump = construct_dump(&args.spec, &window, args.format)?;
    write_output(args.out.as_deref(), &dump, out)?;
    Ok(EXIT_MATCH)
}

/// Runs one property check over the configured vertices.
pub fn verify(property: Property, config: &RunConfig) -> Result<Verification, CliError> {
    let family = config.spec.build()?;
    let family = family.as_ref();
    let vertices = match &config.address {
        Some(a) if !family.tree().contains(a) => {
            return Err(CliError::Usage(format!("address {a} is not in the tree")))
        }
        Some(a) => vec![a.clone()],
        None => config.window.vertices(family.tree()),
    };
    let base = config
        .address
        .clone()
        .unwrap_or_else(|| config.window.bases(family.tree())[0].clone());
    let mut certificates = Vec::new();
    let passed = match property {
        Property::Consistency => {
            for u in &vertices {
                certificates.push(consistency_check(family, u, config.prefix)?);
            }
            certificates.iter().all(|c| c.verdict)
        }
        Property::Hyponormal => {
            for u in &vertices {
                certificates.push(hyponormality_test(family, u, config.prefix)?);
            }
            certificates.iter().all(|c| c.verdict)
        }
        Property::SquareTrivial => {
            for u in &vertices {
                let f = FiniteVector::basis(u.clone());
                certificates.push(square_domain_test(family, &f, &config.threshold, config.max_terms));
            }
            certificates
                .iter()
                .all(|c| c.kind == CertificateKind::Divergence && c.verdict)
        }
        Property::AdjointQuantity => {
            let c = adjoint_witness_search(family, &vertices, config.prefix, &config.threshold);
            let passed = c.verdict;
            certificates.push(c);
            passed
        }
        Property::PhiUnbounded => {
            let c = phi_unboundedness_witness(family, &base, &config.threshold, DEFAULT_MAX_INDEX)?;
            let passed = c.verdict;
            certificates.push(c);
            passed
        }
        Property::Admissible => match tree_admissibility(family.tree(), &config.window, Some(family)) {
            Admissibility::Admissible { .. } => true,
            Admissibility::Inadmissible { certificate, .. } => {
                certificates.extend(certificate.map(|c| *c));
                false
            }
        },
    };
    Ok(Verification {
        property,
        passed,
        certificates,
        probed: vertices.len(),
    })
}

/// Text rendering: a header per certificate followed by its transcript.
pub fn render_text(certs: &[Certificate]) -> String {
    let mut s = String::new();
    for c in certs {
        let _ = writeln!(
            s,
            "# {} {} {} verdict={} guarantee={}",
            c.inputs.property, c.inputs.address, c.kind, c.verdict, c.guarantee
        );
        for l in &c.transcript {
            let _ = writeln!(s, "  {} {}", l.label, l.value);
        }
        if let Some(text) = conclusion(c) {
            let _ = writeln!(s, "  conclusion (implied by cited external theorem): {text}");
        }
    }
    s
}

/// Operator-level statement a passing certificate feeds into. Not checked
/// here; only the hypothesis quantity is.
fn conclusion(c: &Certificate) -> Option<&'static str> {
    if !c.verdict {
        return None;
    }
    match c.inputs.property.as_str() {
        "adjoint-quantity" => Some("D(S) is not contained in D(S*)"),
        "phi-unbounded" => Some("D(S*) is not contained in D(S)"),
        _ => None,
    }
}

pub fn render_json(certs: &[Certificate]) -> String {
    let mut s = serde_json::to_string_pretty(certs).expect("certificates serialize");
    s.push('\n');
    s
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if !args.threshold.is_positive() {
        return Err(CliError::Usage("--threshold must be positive".into()));
    }
    let config = RunConfig {
        spec: args.spec.parse()?,
        window: args.window.resolve(args.property.default_window())?,
        threshold: args.threshold.clone(),
        prefix: args.prefix,
        max_terms: args.max_terms,
        address: args.address.clone(),
    };
    let v = verify(args.property, &config)?;
    let body = match args.format {
        Format::Text => render_text(&v.certificates),
        Format::Json => render_json(&v.certificates),
    };
    let summary = format!(
        "{} on {}: {} ({} vertices probed, {} certificates)\n",
        v.property.name(),
        config.spec,
        if v.passed { "pass" } else { "fail" },
        v.probed,
        v.certificates.len()
    );
    match &args.out {
        Some(p) => {
            write_output(Some(p), &body, out)?;
            write_output(None, &summary, out)?;
        }
        None => {
            // keep stdout machine-readable for json
            let text = match args.format {
                Format::Json => body,
                Format::Text => body + &summary,
            };
            write_output(None, &text, out)?;
        }
    }
    let expected = args.expect == Expect::Pass;
    Ok(if v.passed == expected {
        EXIT_MATCH
    } else {
        EXIT_MISMATCH
    })
}

/// Reads one certificate file holding a single certificate or an array.
pub fn read_certificates(path: &Path) -> Result<Vec<Certificate>, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let json = |source| CliError::Json {
        path: path.display().to_string(),
        source,
    };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(json)?;
    if value.is_array() {
        serde_json::from_value(value).map_err(json)
    } else {
        Ok(vec![serde_json::from_value(value).map_err(json)?])
    }
}

pub fn cmd_report(args: &ReportArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let mut rows = vec![[
        "property".to_string(),
        "vertex".into(),
        "value".into(),
        "verdict".into(),
        "guarantee".into(),
    ]];
    let mut failed = false;
    for path in &args.files {
        for (i, c) in read_certificates(path)?.iter().enumerate() {
            if let Err(e) = replay(c) {
                failed = true;
                let _ = writeln!(err, "{}: certificate {}: {e}", path.display(), i + 1);
                continue;
            }
            rows.push([
                c.inputs.property.clone(),
                c.inputs.address.clone(),
                c.headline(),
                c.verdict.to_string(),
                c.guarantee.to_string(),
            ]);
        }
    }
    let mut widths = [0usize; 5];
    for r in &rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut table = String::new();
    for r in &rows {
        let cells: Vec<String> = r
            .iter()
            .zip(widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        let _ = writeln!(table, "{}", cells.join("  ").trim_end());
    }
    write_output(None, &table, out)?;
    Ok(if failed { EXIT_MISMATCH } else { EXIT_MATCH })
}
