//! Command-line front end.
//!
//! Exit codes: 0 when every verification passes, 1 when one fails, 2 on
//! usage errors. With `--output json` stdout carries only JSON; diagnostics
//! go to stderr.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{render_ascii, AsciiStyle, Circuit};
use crate::densecoding::{bell_basis, crosscheck_message, gram_deviation, run_protocol, Message, OutcomeJson};
use crate::equivalence::{constrained_equal, unitary_equal, PhaseMode};
use crate::error::{Error, Result};
use crate::qudit::{gate_matrix, BasisState, Dim, Gate, GateKind, StateVector};
use crate::rewrite::{bob_constraint, deconstruct_pipeline_with, expand_cx, STAGE_LABELS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AsciiMode {
    Unicode,
    Plain,
}

impl From<AsciiMode> for AsciiStyle {
    fn from(m: AsciiMode) -> Self {
        match m {
            AsciiMode::Unicode => AsciiStyle::Unicode,
            AsciiMode::Plain => AsciiStyle::Plain,
        }
    }
}

fn parse_dim(s: &str) -> std::result::Result<Dim, String> {
    let d: usize = s.parse().map_err(|e| format!("{e}"))?;
    Dim::new(d).map_err(|e| e.to_string())
}

fn parse_tolerance(s: &str) -> std::result::Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t > 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err("tolerance must be a positive finite number".into())
    }
}

/// Verify the qudit dense-coding derivation.
#[derive(Debug, Parser)]
#[command(name = "qudense", version, about)]
pub struct Cli {
    /// Qudit dimension (2..=16).
    #[arg(long = "d", global = true, default_value = "2", value_parser = parse_dim)]
    pub d: Dim,

    /// Equivalence tolerance.
    #[arg(long, global = true, default_value = "1e-9", value_parser = parse_tolerance)]
    pub tolerance: f64,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,

    /// Glyph set for circuit drawings.
    #[arg(long, global = true, value_enum, default_value_t = AsciiMode::Unicode)]
    pub ascii: AsciiMode,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check gate unitarity and the cX/cZ/H identities.
    Identities,
    /// Run the a–f deconstruction and verify every step.
    Deconstruct {
        /// Also write the trace JSON to this file.
        #[arg(long)]
        emit_json: Option<PathBuf>,
    },
    /// Send one message through the protocol and the automated circuit.
    Protocol {
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: usize,
        /// Sample this many readouts of Bob's pair.
        #[arg(long)]
        shots: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List the Bell basis and its orthogonality.
    Bell,
}

pub struct CliConfig {
    pub dim: Dim,
    pub tolerance: f64,
    pub output: OutputFormat,
    pub style: AsciiStyle,
}

impl From<&Cli> for CliConfig {
    fn from(cli: &Cli) -> Self {
        CliConfig {
            dim: cli.d,
            tolerance: cli.tolerance,
            output: cli.output,
            style: cli.ascii.into(),
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{text}");
            return code;
        }
    };
    let config = CliConfig::from(&cli);
    let result = match cli.command {
        Command::Identities => cmd_identities(&config, out, err),
        Command::Deconstruct { emit_json } => cmd_deconstruct(&config, emit_json.as_deref(), out, err),
        Command::Protocol { x, y, shots, seed } => cmd_protocol(&config, x, y, shots, seed, out, err),
        Command::Bell => cmd_bell(&config, out, err),
    };
    match result {
        Ok(code) => code,
        // A closed downstream pipe is not worth a diagnostic.
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => EXIT_FAILED,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILED
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub max_deviation: f64,
    pub pass: bool,
}

/// Largest entry of `|M M† − I|`.
pub fn unitarity_deviation(m: &ndarray::Array2<Complex64>) -> f64 {
    let prod = m.dot(&m.t().mapv(|c| c.conj()));
    let mut worst = 0.0f64;
    for ((r, c), v) in prod.indexed_iter() {
        let target = if r == c { 1.0 } else { 0.0 };
        worst = worst.max((v - Complex64::new(target, 0.0)).norm());
    }
    worst
}

/// The identity checks behind `identities`, at dimension `dim`.
pub fn identity_checks(dim: Dim, tol: f64) -> Result<Vec<IdentityCheck>> {
    let mut checks = Vec::new();
    let mut push = |name: &str, dev: f64| {
        checks.push(IdentityCheck {
            name: name.to_string(),
            max_deviation: dev,
            pass: dev <= tol,
        });
    };

    let mut worst = 0.0f64;
    for kind in GateKind::ALL {
        let wires: Vec<usize> = (0..kind.arity()).collect();
        for dagger in [false, true] {
            let g = Gate::new(kind, wires.clone(), dagger)?;
            worst = worst.max(unitarity_deviation(&gate_matrix(&g, dim)));
        }
    }
    push("gate_unitarity", worst);

    let two = |gates: Vec<Gate>| Circuit::from_gates(dim, 2, gates);
    let lhs = two(vec![Gate::cx(0, 1), Gate::h(1)])?;
    let rhs = two(vec![Gate::h(1), Gate::cz(0, 1).dag()])?;
    push(
        "fourier_maps_cx_to_cz_dagger",
        unitary_equal(&lhs, &rhs, tol, PhaseMode::Exact)?.max_deviation,
    );

    let cx = two(vec![Gate::cx(0, 1)])?;
    let expanded = expand_cx(&cx, 0)?;
    push(
        "cx_expansion",
        unitary_equal(&cx, &expanded, tol, PhaseMode::Exact)?.max_deviation,
    );

    if dim.is_qubit() {
        let one = |gates: Vec<Gate>| Circuit::from_gates(dim, 1, gates);
        let x = one(vec![Gate::x(0)])?;
        let hzh = one(vec![Gate::h(0), Gate::z(0), Gate::h(0)])?;
        push(
            "x_equals_hzh",
            unitary_equal(&x, &hzh, tol, PhaseMode::Exact)?.max_deviation,
        );
    }
    Ok(checks)
}

#[derive(Serialize)]
struct IdentitiesJson<'a> {
    d: usize,
    checks: &'a [IdentityCheck],
    pass: bool,
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    Ok(writeln!(out, "{text}")?)
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn cmd_identities(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let checks = identity_checks(config.dim, config.tolerance)?;
    let pass = checks.iter().all(|c| c.pass);
    match config.output {
        OutputFormat::Json => emit_json(
            out,
            &IdentitiesJson {
                d: config.dim.get(),
                checks: &checks,
                pass,
            },
        )?,
        OutputFormat::Text => {
            writeln!(out, "identities at d={}", config.dim)?;
            for c in &checks {
                writeln!(
                    out,
                    "  {}  {:<30} max deviation {:.3e}",
                    verdict(c.pass),
                    c.name,
                    c.max_deviation
                )?;
            }
        }
    }
    for c in checks.iter().filter(|c| !c.pass) {
        writeln!(err, "identity {} failed: deviation {:.3e}", c.name, c.max_deviation)?;
    }
    Ok(if pass { EXIT_OK } else { EXIT_FAILED })
}

pub fn cmd_deconstruct(
    config: &CliConfig,
    emit_path: Option<&std::path::Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let trace = match deconstruct_pipeline_with(config.dim, config.tolerance) {
        Ok(trace) => trace,
        Err(Error::VerificationFailed { step, report }) => {
            writeln!(err, "step {step} failed verification")?;
            writeln!(err, "{}", serde_json::to_string_pretty(&report)?)?;
            return Ok(EXIT_FAILED);
        }
        Err(e) => return Err(e),
    };
    let json = trace.to_json();
    if let Some(path) = emit_path {
        std::fs::write(path, format!("{json}\n"))?;
    }

    // The drop must be genuinely conditional, and the two ends must agree
    // once Bob's qudits start in |0⟩.
    let (a, e, f) = (&trace.stages[0], &trace.stages[4], &trace.stages[5]);
    let unconditional = unitary_equal(e, f, config.tolerance, PhaseMode::Exact)?;
    let end_to_end = constrained_equal(a, f, &bob_constraint(), config.tolerance, PhaseMode::Exact)?;
    let ok = !unconditional.pass && end_to_end.pass;

    match config.output {
        OutputFormat::Json => writeln!(out, "{json}")?,
        OutputFormat::Text => {
            for (i, stage) in trace.stages.iter().enumerate() {
                let label = STAGE_LABELS[i];
                if i > 0 {
                    let step = &trace.steps[i - 1];
                    writeln!(
                        out,
                        "{} → {}  {:<30} positions {:?}  {:?}  max deviation {:.3e}  {}",
                        STAGE_LABELS[i - 1],
                        label,
                        step.rule.name(),
                        step.positions,
                        step.report.mode,
                        step.report.max_deviation,
                        verdict(step.report.pass)
                    )?;
                }
                writeln!(out, "\nstage {label}:")?;
                write!(out, "{}", render_ascii(stage, config.style))?;
                writeln!(out)?;
            }
            let witness = unconditional
                .witness
                .as_ref()
                .map(|w| ket_label(w, config.style))
                .unwrap_or_else(|| "none".into());
            let holds = |pass: bool| if pass { "holds" } else { "does not hold" };
            writeln!(
                out,
                "e ≡ f for all inputs: {} (witness {witness})",
                holds(unconditional.pass)
            )?;
            writeln!(
                out,
                "a ≡ f with wires 2,3 in {}: {}, max deviation {:.3e}",
                ket_label(&BasisState::zeros(1), config.style),
                holds(end_to_end.pass),
                end_to_end.max_deviation
            )?;
        }
    }
    if unconditional.pass {
        writeln!(
            err,
            "dropped gate is an unconditional identity; expected it to need the input constraint"
        )?;
    }
    if !end_to_end.pass {
        writeln!(err, "{}", serde_json::to_string_pretty(&end_to_end)?)?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

#[derive(Serialize)]
struct ProtocolJson {
    #[serde(flatten)]
    outcome: OutcomeJson,
    automated_match: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    counts: Option<BTreeMap<String, usize>>,
}

fn ket_label(b: &BasisState, style: AsciiStyle) -> String {
    let s = b.to_string();
    match style {
        AsciiStyle::Unicode => s,
        AsciiStyle::Plain => s.replace('⟩', ">"),
    }
}

/// Samples `shots` computational-basis readouts of `state`.
pub fn sample_counts(state: &StateVector, shots: usize, seed: u64) -> BTreeMap<usize, usize> {
    let mut counts = BTreeMap::new();
    if shots == 0 {
        return counts;
    }
    let dist = WeightedIndex::new(state.probabilities()).expect("normalized state has positive weight");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..shots {
        *counts.entry(dist.sample(&mut rng)).or_insert(0) += 1;
    }
    counts
}

pub fn cmd_protocol(
    config: &CliConfig,
    x: usize,
    y: usize,
    shots: Option<usize>,
    seed: u64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let dim = config.dim;
    let m = match Message::new(dim, x, y) {
        Ok(m) => m,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_USAGE);
        }
    };
    let outcome = run_protocol(dim, m);
    let trace = deconstruct_pipeline_with(dim, config.tolerance)?;
    let case = crosscheck_message(trace.stage('f').expect("six stages"), m, config.tolerance)?;
    let counts = shots.map(|n| {
        sample_counts(&outcome.final_state, n, seed)
            .into_iter()
            .map(|(k, c)| (ket_label(&BasisState::from_index(dim, 2, k), config.style), c))
            .collect::<BTreeMap<_, _>>()
    });

    let ok = case.pass && outcome.decoded == m && (outcome.probability - 1.0).abs() <= config.tolerance;
    match config.output {
        OutputFormat::Json => emit_json(
            out,
            &ProtocolJson {
                outcome: outcome.to_json_value(),
                automated_match: case.pass,
                counts,
            },
        )?,
        OutputFormat::Text => {
            writeln!(
                out,
                "d={dim}  sent (x={x}, y={y})  decoded (x={}, y={})  probability {:.6}",
                outcome.decoded.x, outcome.decoded.y, outcome.probability
            )?;
            let expected = BasisState::new(dim, vec![x, y, x, y])?;
            writeln!(
                out,
                "automated circuit on {}: → {}  deviation {:.3e}  {}",
                ket_label(&BasisState::new(dim, vec![x, y, 0, 0])?, config.style),
                ket_label(&expected, config.style),
                case.deviation,
                verdict(case.pass)
            )?;
            if let Some(counts) = counts {
                writeln!(out, "samples (seed {seed}):")?;
                for (ket, n) in counts {
                    writeln!(out, "  {ket}  {n}")?;
                }
            }
        }
    }
    if !ok {
        writeln!(err, "protocol check failed for message ({x}, {y})")?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

/// `v` to six significant digits.
fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

fn format_amplitude(a: Complex64, dim: Dim, style: AsciiStyle) -> String {
    let re = if a.re.abs() < 1e-12 { 0.0 } else { a.re };
    let im = if a.im.abs() < 1e-12 { 0.0 } else { a.im };
    let sign = if im < 0.0 { "-" } else { "+" };
    let mut s = format!("{}{sign}{}i", sig6(re), sig6(im.abs()));
    let r = 1.0 / (dim.get() as f64).sqrt();
    let root = match style {
        AsciiStyle::Unicode => format!("1/√{dim}"),
        AsciiStyle::Plain => format!("1/sqrt({dim})"),
    };
    let symbolic = [
        (Complex64::new(r, 0.0), root.clone()),
        (Complex64::new(-r, 0.0), format!("-{root}")),
        (Complex64::new(0.0, r), format!("i{root}")),
        (Complex64::new(0.0, -r), format!("-i{root}")),
    ];
    if let Some((_, label)) = symbolic.iter().find(|(v, _)| (a - v).norm() <= 1e-12) {
        s.push_str(&format!("  ({label})"));
    }
    s
}

#[derive(Serialize)]
struct BellStateJson {
    x: usize,
    y: usize,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct BellJson {
    d: usize,
    states: Vec<BellStateJson>,
    max_offdiag_gram: f64,
}

pub fn cmd_bell(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let dim = config.dim;
    let basis = bell_basis(dim);
    let (off, diag) = gram_deviation(&basis);
    let ok = off <= config.tolerance && diag <= config.tolerance;
    match config.output {
        OutputFormat::Json => {
            let states = Message::all(dim)
                .zip(&basis)
                .map(|(m, s)| BellStateJson {
                    x: m.x,
                    y: m.y,
                    amplitudes: s.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
                })
                .collect();
            emit_json(
                out,
                &BellJson {
                    d: dim.get(),
                    states,
                    max_offdiag_gram: off,
                },
            )?;
        }
        OutputFormat::Text => {
            writeln!(out, "Bell basis at d={dim} ({} states)", basis.len())?;
            for (m, s) in Message::all(dim).zip(&basis) {
                writeln!(out, "(x={}, y={}):", m.x, m.y)?;
                for (i, a) in s.amplitudes().iter().enumerate() {
                    if a.norm() > 1e-12 {
                        let ket = ket_label(&BasisState::from_index(dim, 2, i), config.style);
                        writeln!(out, "  {ket}  {}", format_amplitude(*a, dim, config.style))?;
                    }
                }
            }
            writeln!(out, "max off-diagonal Gram magnitude {off:.3e}")?;
        }
    }
    if !ok {
        writeln!(
            err,
            "Bell basis not orthonormal: off-diagonal {off:.3e}, diagonal {diag:.3e}"
        )?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}
