//! `qnet` command-line driver.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage or input error,
//! 3 numerical failure.

pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use qnet_core::netdsl::{parse_document, resolve_document, NetworkDocument, ResolvedModels};
use qnet_core::slh::SlhModel;
use qnet_core::statespace::{physical_realizability_residual, realize, spectral_abscissa, Spectrum};
use qnet_core::uncertainty::{
    behavioral_residuals, cavity_box, cavity_nominal, decompose, stability_sweep, verify_theorem1, verify_theorem2,
    Perturbation, UncertaintyBox,
};
use qnet_core::{Error, DEFAULT_TOL};

pub use report::{RunReport, Status};

/// Limit for transfer-function comparisons, which go through linear solves
/// and are checked more loosely than the algebraic identities.
pub const TRANSFER_TOL: f64 = 1e-8;

/// Diagnostic codes that describe a well-formed document whose models break
/// a physical invariant; `validate` reports these as a verification failure.
const MODEL_CODES: [&str; 4] = ["UNITARITY", "HERMITICITY", "SYMMETRY", "NON_FINITE"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "qnet",
    version,
    about = "Linear quantum network analysis in the SLH formalism"
)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Tolerance for invariants and residuals.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL, value_parser = parse_tol)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Target {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    target: String,
}

#[derive(Debug, clap::Args)]
struct Uncertain {
    #[command(flatten)]
    target: Target,
    #[arg(long)]
    uncertainty: String,
    /// Parameter values `p1=v1,p2=v2`; unnamed parameters take their upper bound.
    #[arg(long, value_parser = parse_assignment, allow_hyphen_values = true)]
    at: Option<Assignment>,
}

#[derive(Debug, Clone)]
struct Assignment(Vec<(String, f64)>);

#[derive(Debug, Subcommand)]
enum Command {
    /// Check every component of a document.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Print the doubled-up realization (A, B, C, D) of a component or chain.
    Statespace(Target),
    /// Print the folded SLH parameters of a chain.
    Cascade(Target),
    /// Split an uncertain system into nominal and uncertain subsystems.
    Decompose(Uncertain),
    /// Check the decomposition componentwise, on the realization, and by transfer function.
    Verify(Uncertain),
    /// Grid the uncertainty box and report the worst spectral abscissa.
    Sweep {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        uncertainty: String,
        #[arg(long)]
        grid: usize,
        #[arg(long, default_value_t = 0.0)]
        margin: f64,
    },
    /// Single-mode cavity with three input channels, perturbed by gamma and delta.
    DemoCavity {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        k1: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        k2: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        k3: f64,
        #[arg(long, default_value_t = 0.21, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
        delta: f64,
    },
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("tolerance must be finite and nonnegative, got {s}"))
    }
}

fn parse_assignment(s: &str) -> Result<Assignment, String> {
    s.split(',')
        .map(|pair| {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| format!("expected name=value, got `{pair}`"))?;
            let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
            if !v.is_finite() {
                return Err(format!("`{k}` must be finite"));
            }
            Ok((k.trim().to_string(), v))
        })
        .collect::<Result<_, _>>()
        .map(Assignment)
}

/// Runs with the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    2
                }
            };
        }
    };
    let start = Instant::now();
    let mut report = execute(&cli.command, cli.tol);
    report.settle();
    report.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    let rendered = match cli.format {
        Format::Text => report.to_text(),
        Format::Json => serde_json::to_string_pretty(&report.to_json()).expect("json values serialize") + "\n",
    };
    let _ = out.write_all(rendered.as_bytes());
    if let Some(e) = &report.error {
        let _ = writeln!(err, "error: {e}");
    }
    report.exit_code()
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NoConvergence { .. } | Error::PoleProximity { .. } | Error::InternalConsistency { .. } => 3,
        _ => 2,
    }
}

/// Early return from a command: `(exit code, message)`.
type Abort = (i32, String);

fn numeric(e: Error) -> Abort {
    (exit_code_for(&e), e.to_string())
}

fn execute(cmd: &Command, tol: f64) -> RunReport {
    let name = match cmd {
        Command::Validate { .. } => "validate",
        Command::Statespace(_) => "statespace",
        Command::Cascade(_) => "cascade",
        Command::Decompose(_) => "decompose",
        Command::Verify(_) => "verify",
        Command::Sweep { .. } => "sweep",
        Command::DemoCavity { .. } => "demo-cavity",
    };
    let mut report = RunReport::new(name);
    let outcome = match cmd {
        Command::Validate { input } => validate(&mut report, input, tol),
        Command::Statespace(t) => statespace(&mut report, t, tol),
        Command::Cascade(t) => cascade_cmd(&mut report, t, tol),
        Command::Decompose(u) => uncertain(&mut report, u, tol, false),
        Command::Verify(u) => uncertain(&mut report, u, tol, true),
        Command::Sweep {
            target,
            uncertainty,
            grid,
            margin,
        } => sweep(&mut report, target, uncertainty, *grid, *margin, tol),
        Command::DemoCavity {
            k1,
            k2,
            k3,
            gamma,
            delta,
        } => demo_cavity(&mut report, [*k1, *k2, *k3], *gamma, *delta, tol),
    };
    if let Err((code, msg)) = outcome {
        report.abort(code, msg);
    }
    report
}

fn read_input(path: &Path) -> Result<Vec<u8>, Abort> {
    std::fs::read(path).map_err(|e| (2, format!("cannot read {}: {e}", path.display())))
}

fn load(report: &mut RunReport, path: &Path, tol: f64) -> Result<NetworkDocument, Abort> {
    let bytes = read_input(path)?;
    parse_document(&bytes, tol).map_err(|diags| {
        let n = diags.len();
        report.diagnostics = diags;
        (2, format!("{} has {n} error(s)", path.display()))
    })
}

fn load_resolved(
    report: &mut RunReport,
    t: &Target,
    tol: f64,
) -> Result<(NetworkDocument, ResolvedModels, SlhModel), Abort> {
    let doc = load(report, &t.input, tol)?;
    let resolved = resolve_document(&doc, tol).map_err(numeric)?;
    let model = resolved
        .models
        .get(&t.target)
        .cloned()
        .ok_or_else(|| (2, format!("unknown component or chain `{}`", t.target)))?;
    Ok((doc, resolved, model))
}

fn bound_box(doc: &NetworkDocument, target: &str, name: &str) -> Result<UncertaintyBox, Abort> {
    let decl = doc
        .uncertainties
        .get(name)
        .ok_or_else(|| (2, format!("unknown uncertainty `{name}`")))?;
    if decl.target != target {
        return Err((
            2,
            format!("uncertainty `{name}` is bound to `{}`, not `{target}`", decl.target),
        ));
    }
    Ok(decl.ubox.clone())
}

fn validate(report: &mut RunReport, input: &Path, tol: f64) -> Result<(), Abort> {
    let bytes = read_input(input)?;
    let doc = match parse_document(&bytes, tol) {
        Ok(doc) => doc,
        Err(diags) => {
            let model_only = diags.iter().all(|d| MODEL_CODES.contains(&d.code));
            let n = diags.len();
            report.diagnostics = diags;
            if model_only {
                report.status = Status::Fail;
                report.lines("summary", vec![format!("{n} model invariant violation(s)")]);
                return Ok(());
            }
            return Err((2, format!("{} has {n} error(s)", input.display())));
        }
    };
    let resolved = resolve_document(&doc, tol).map_err(numeric)?;
    let rows = resolved
        .models
        .iter()
        .map(|(name, g)| {
            let kind = if doc.components.contains_key(name) {
                "component"
            } else {
                "chain"
            };
            vec![
                name.clone(),
                kind.to_string(),
                g.n_modes.to_string(),
                g.m_channels.to_string(),
            ]
        })
        .collect();
    report.table("models", &["name", "kind", "modes", "channels"], rows);
    report.lines(
        "summary",
        vec![
            format!("{} component(s), {} chain(s)", doc.components.len(), doc.chains.len()),
            format!(
                "{} uncertainty box(es), {} analysis request(s)",
                doc.uncertainties.len(),
                doc.analyses.len()
            ),
            "0 diagnostics".to_string(),
        ],
    );
    Ok(())
}

fn spectrum_lines(sp: &Spectrum) -> Vec<String> {
    let mut lines: Vec<String> = sp.eigenvalues.iter().map(|z| report::entry_text(z.re, z.im)).collect();
    lines.push(format!(
        "abscissa {}, {}",
        report::sig6(sp.abscissa),
        if sp.is_stable() { "stable" } else { "not stable" }
    ));
    lines
}

fn statespace(report: &mut RunReport, t: &Target, tol: f64) -> Result<(), Abort> {
    let (_, _, model) = load_resolved(report, t, tol)?;
    let ss = realize(&model).map_err(numeric)?;
    report.matrix("A", &ss.a);
    report.matrix("B", &ss.b);
    report.matrix("C", &ss.c);
    report.matrix("D", &ss.d);
    let sp = spectral_abscissa(&ss).map_err(numeric)?;
    report.lines("eigenvalues of A", spectrum_lines(&sp));
    report.gated("structure", ss.structure_deviation(), tol);
    report.gated(
        "physical_realizability",
        physical_realizability_residual(&ss).map_err(numeric)?,
        tol,
    );
    report.info("abscissa", sp.abscissa);
    Ok(())
}

fn slh_sections(report: &mut RunReport, prefix: &str, g: &SlhModel) {
    report.matrix(format!("{prefix}S"), &g.scattering);
    report.matrix(format!("{prefix}C_minus"), &g.coupling.c_minus);
    report.matrix(format!("{prefix}C_plus"), &g.coupling.c_plus);
    report.matrix(format!("{prefix}Omega_minus"), &g.hamiltonian.omega_minus);
    report.matrix(format!("{prefix}Omega_plus"), &g.hamiltonian.omega_plus);
}

fn cascade_cmd(report: &mut RunReport, t: &Target, tol: f64) -> Result<(), Abort> {
    let (doc, _, model) = load_resolved(report, t, tol)?;
    let members = doc
        .chains
        .get(&t.target)
        .ok_or_else(|| (2, format!("`{}` is not a chain", t.target)))?;
    report.lines("chain", vec![members.join(" <| ")]);
    slh_sections(report, "", &model);
    Ok(())
}

fn values_line(ubox: &UncertaintyBox, values: &[f64]) -> Vec<String> {
    ubox.parameters()
        .iter()
        .zip(values)
        .map(|(p, v)| format!("{} = {v}", p.name))
        .collect()
}

fn uncertain(report: &mut RunReport, u: &Uncertain, tol: f64, full_check: bool) -> Result<(), Abort> {
    let (doc, _, model) = load_resolved(report, &u.target, tol)?;
    let ubox = bound_box(&doc, &u.target.target, &u.uncertainty)?;
    let values = ubox
        .assignment(u.at.as_ref().map_or(&[][..], |a| &a.0[..]))
        .map_err(numeric)?;
    report.lines("parameters", values_line(&ubox, &values));
    let p = ubox.instantiate(&model, &values).map_err(numeric)?;
    if full_check {
        verification(report, &model, &p, tol)
    } else {
        decomposition(report, &model, &p, tol)
    }
}

fn decomposition(report: &mut RunReport, nominal: &SlhModel, p: &Perturbation, tol: f64) -> Result<(), Abort> {
    let dec = decompose(nominal, p).map_err(numeric)?;
    slh_sections(report, "G_n ", &dec.g_nominal);
    slh_sections(report, "Delta ", &dec.g_delta);
    report.matrix("A_prime", &dec.a_prime);
    report.matrix("delta_A", &dec.delta_a);
    report.matrix("A_delta", &dec.a_delta);
    for (name, v) in &dec.residuals {
        report.gated(name.as_str(), *v, tol);
    }
    Ok(())
}

fn verification(report: &mut RunReport, nominal: &SlhModel, p: &Perturbation, tol: f64) -> Result<(), Abort> {
    let t1 = verify_theorem1(nominal, p, tol).map_err(numeric)?;
    for (name, v) in &t1.entries {
        report.gated(format!("slh.{name}"), *v, tol);
    }
    let t2 = verify_theorem2(nominal, p, tol).map_err(numeric)?;
    for (name, v) in &t2.entries {
        report.gated(format!("ss.{name}"), *v, tol);
    }
    let b = behavioral_residuals(nominal, p).map_err(numeric)?;
    report.gated("transfer.shared_mode", b.shared_mode, TRANSFER_TOL.max(tol));
    report.info("transfer.series_connect", b.series_connect);
    report.lines(
        "transfer check",
        vec![
            "shared_mode: realization of G_n <| Delta on the common mode space against the perturbed system".into(),
            "series_connect: G_n and Delta on stacked separate states, reported without a limit".into(),
        ],
    );
    Ok(())
}

fn sweep(
    report: &mut RunReport,
    t: &Target,
    uncertainty: &str,
    grid: usize,
    margin: f64,
    tol: f64,
) -> Result<(), Abort> {
    if !(margin >= 0.0 && margin.is_finite()) {
        return Err((2, format!("margin must be finite and nonnegative, got {margin}")));
    }
    let (doc, _, model) = load_resolved(report, t, tol)?;
    let ubox = bound_box(&doc, &t.target, uncertainty)?;
    let r = stability_sweep(&model, &ubox, grid, margin).map_err(numeric)?;
    let mut header: Vec<&str> = r.parameter_names.iter().map(String::as_str).collect();
    header.push("abscissa");
    let rows = r
        .points
        .iter()
        .map(|pt| {
            let mut row: Vec<String> = pt.values.iter().map(|v| v.to_string()).collect();
            row.push(match (pt.abscissa, &pt.diagnostic) {
                (Some(a), _) => format!("{a:e}"),
                (None, Some(d)) => format!("skipped: {d}"),
                (None, None) => "skipped".into(),
            });
            row
        })
        .collect();
    report.table("grid", &header, rows);
    let mut summary = vec![format!("{} points, {} skipped", r.points.len(), r.skipped())];
    if let (Some(w), Some(pt)) = (r.worst_abscissa, &r.worst_point) {
        summary.push(format!("worst abscissa {w:e}"));
        summary.extend(values_line(&ubox, pt).into_iter().map(|l| format!("at {l}")));
    }
    summary.push(if r.robustly_stable {
        format!("robustly stable on grid (margin {margin})")
    } else {
        format!("not robustly stable on grid (margin {margin})")
    });
    report.lines("verdict", summary);
    report.residuals.push(report::Residual {
        name: "worst_abscissa".into(),
        value: r.worst_abscissa.unwrap_or(f64::NAN),
        limit: Some(-margin),
        strict: true,
    });
    Ok(())
}

fn demo_cavity(report: &mut RunReport, k: [f64; 3], gamma: f64, delta: f64, tol: f64) -> Result<(), Abort> {
    let nominal = cavity_nominal(k).map_err(numeric)?;
    let ubox = cavity_box((gamma, gamma), (delta, delta)).map_err(numeric)?;
    let p = ubox.instantiate(&nominal, &[gamma, delta]).map_err(numeric)?;
    let dec = decompose(&nominal, &p).map_err(numeric)?;
    let ss_n = realize(&nominal).map_err(numeric)?;
    let ss = realize(&dec.g_full).map_err(numeric)?;
    report.lines(
        "cavity",
        vec![
            format!("k = ({}, {}, {}), gamma = {gamma}, delta = {delta}", k[0], k[1], k[2]),
            format!(
                "perturbed first coupling entry {}",
                report::sig6(dec.g_full.coupling.c_minus[(0, 0)].re)
            ),
        ],
    );
    report.matrix("A_n", &ss_n.a);
    report.matrix("A_prime", &dec.a_prime);
    report.matrix("delta_A", &dec.delta_a);
    report.matrix("A_delta", &dec.a_delta);
    report.matrix("A", &ss.a);
    let sp_n = spectral_abscissa(&ss_n).map_err(numeric)?;
    let sp = spectral_abscissa(&ss).map_err(numeric)?;
    report.lines("eigenvalues of A_n", spectrum_lines(&sp_n));
    report.lines("eigenvalues of A", spectrum_lines(&sp));
    for (name, v) in &dec.residuals {
        report.gated(name.as_str(), *v, tol);
    }
    verification(report, &nominal, &p, tol)?;
    report.gated(
        "physical_realizability",
        physical_realizability_residual(&ss).map_err(numeric)?,
        tol,
    );
    report.info("abscissa_nominal", sp_n.abscissa);
    report.info("abscissa_perturbed", sp.abscissa);
    Ok(())
}
