//! Command-line front end. [`run_command`] does all the work and returns the
//! exit code and rendered output, so it can be driven from tests.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 a hypothesis or identity
//! check failed (the report is still printed).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::config::{Config, DEFAULT_TOL};
use crate::error::Error;
use crate::fixtures;
use crate::ginv::{self, IdentityKind, Relation};
use crate::io::{self, IoError};
use crate::perturb::{self, PerturbReport, Route};
use crate::report::{relative, Condition, ConditionReport, Role};
use crate::reshape::{self, rsh, rshrank};
use crate::tensor::{einstein_product, Norm, Tensor};

#[derive(Debug, Parser)]
#[command(
    name = "tginv",
    version,
    about = "Generalized inverses of tensors under the Einstein product"
)]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Options {
    /// Relative tolerance for identity checks.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL, value_parser = positive)]
    tol: f64,
    /// Relative singular-value cutoff for ranks (default max(rows, cols) * eps).
    #[arg(long, global = true, value_parser = positive)]
    rank_tol: Option<f64>,
    /// Norm for gates, ratios and bounds.
    #[arg(long, global = true, value_enum, default_value_t = NormArg::Frobenius)]
    norm: NormArg,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the primary output tensor to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err("must be a positive finite number".into())
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NormArg {
    Frobenius,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
enum RouteArg {
    Multiplicative,
    #[default]
    Rank,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Inner,
    Outer,
    Penrose3,
    Penrose4,
}

/// Tensor arguments are file paths or bundled fixture names (e.g. `ex31_A`).
#[derive(Debug, Subcommand)]
enum Command {
    /// Einstein product A *_n B.
    Product {
        a: String,
        b: String,
        /// Number of contracted axes (default: the column axes of A).
        #[arg(long)]
        order: Option<usize>,
    },
    /// Frobenius and spectral norms.
    Norm { a: String },
    /// Reshape rank.
    Rank { a: String },
    /// Moore-Penrose inverse with Penrose residuals.
    Pinv { a: String },
    /// Outer inverse with range R(B).
    GinvB { a: String, b: String },
    /// Outer inverse with null space N(C).
    GinvC { a: String, c: String },
    /// (B,C)-inverse.
    GinvBc { a: String, b: String, c: String },
    /// Perturbed inner inverse of A + E.
    PerturbInner {
        a: String,
        e: String,
        /// Inner inverse of A to perturb (default: Moore-Penrose).
        #[arg(long)]
        a1: Option<String>,
    },
    /// Perturbed outer inverse of A + E from an outer inverse X of A.
    PerturbOuter { a: String, x: String, e: String },
    /// Perturbed outer inverse with range R(B).
    PerturbB {
        a: String,
        b: String,
        e: String,
        #[arg(long, value_enum, default_value_t)]
        route: RouteArg,
    },
    /// Perturbed outer inverse with null space N(C).
    PerturbC {
        a: String,
        c: String,
        e: String,
        #[arg(long, value_enum, default_value_t)]
        route: RouteArg,
    },
    /// Perturbed (B,C)-inverse.
    PerturbBc {
        a: String,
        b: String,
        c: String,
        e: String,
        #[arg(long, value_enum, default_value_t)]
        route: RouteArg,
    },
    /// Check one defining identity of X against A.
    Verify {
        a: String,
        x: String,
        #[arg(long, value_enum, default_value_t = KindArg::Inner)]
        kind: KindArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    GateFailure,
}

/// A tensor produced by a command, inline or written to `path`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputTensor {
    pub label: String,
    pub shape: Vec<usize>,
    pub split: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<[f64; 2]>>,
}

/// Everything a command reports, rendered as text or JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub command: String,
    pub inputs: Vec<String>,
    pub status: Status,
    pub meta: BTreeMap<String, String>,
    pub scalars: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
    pub conditions: ConditionReport,
    pub outputs: Vec<OutputTensor>,
}

impl ReportDocument {
    fn new(command: String, inputs: &[&str]) -> Self {
        Self {
            command,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            status: Status::Ok,
            meta: BTreeMap::new(),
            scalars: BTreeMap::new(),
            flags: BTreeMap::new(),
            conditions: ConditionReport::new(),
            outputs: Vec::new(),
        }
    }

    pub fn scalar(&self, key: &str) -> Option<f64> {
        self.scalars.get(key).copied()
    }

    fn set_status_from_conditions(&mut self) {
        let ok = self.conditions.role_passed(Role::Gate) && self.conditions.role_passed(Role::Check);
        self.status = if ok { Status::Ok } else { Status::GateFailure };
    }
}

/// Result of one invocation.
#[derive(Debug, Clone)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub report: Option<ReportDocument>,
    /// Text for standard output.
    pub stdout: String,
    /// Text for standard error.
    pub stderr: String,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Io(#[from] IoError),
    #[error("{0}")]
    Lib(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

/// Parses `argv` (program name first) and runs the command.
pub fn run_command<I, T>(argv: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(err) => {
            let text = err.render().to_string();
            let exit_code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let (stdout, stderr) = if exit_code == 0 {
                (text, String::new())
            } else {
                (String::new(), text)
            };
            return CommandOutcome {
                exit_code,
                report: None,
                stdout,
                stderr,
            };
        }
    };
    let echo = argv
        .iter()
        .skip(1)
        .map(|s| s.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");

    match execute(&cli, echo) {
        Ok(report) => {
            let stdout = match cli.opts.format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&report).expect("reports always serialize");
                    s.push('\n');
                    s
                }
                Format::Text => render_text(&report),
            };
            let exit_code = match report.status {
                Status::Ok => 0,
                Status::GateFailure => 2,
            };
            CommandOutcome {
                exit_code,
                report: Some(report),
                stdout,
                stderr: String::new(),
            }
        }
        Err(err) => CommandOutcome {
            exit_code: 1,
            report: None,
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
        },
    }
}

fn resolve(arg: &str) -> Result<Tensor, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        return Ok(io::load_tensor(path)?);
    }
    fixtures::fixture(arg)
        .ok_or_else(|| CliError::Usage(format!("{arg:?} is neither a readable file nor a bundled fixture")))
}

struct Ctx<'a> {
    cfg: Config,
    out: Option<&'a Path>,
}

impl Ctx<'_> {
    /// Adds `t` to the report; the first output goes to `--out` when given.
    fn output(&self, report: &mut ReportDocument, label: &str, t: &Tensor) -> Result<(), CliError> {
        let primary = report.outputs.is_empty();
        let (path, entries) = match (primary, self.out) {
            (true, Some(path)) => {
                io::save_tensor(t, path)?;
                (Some(path.display().to_string()), None)
            }
            _ => (None, Some(t.entries().iter().map(|z| [z.re, z.im]).collect())),
        };
        report.outputs.push(OutputTensor {
            label: label.to_string(),
            shape: t.shape().extents().to_vec(),
            split: t.shape().split(),
            path,
            entries,
        });
        Ok(())
    }
}

fn execute(cli: &Cli, echo: String) -> Result<ReportDocument, CliError> {
    let norm = match cli.opts.norm {
        NormArg::Frobenius => Norm::Frobenius,
        NormArg::Spectral => Norm::Spectral,
    };
    let cfg = Config {
        norm,
        tol: cli.opts.tol,
        rank_tol: cli.opts.rank_tol,
    };
    let ctx = Ctx {
        cfg,
        out: cli.opts.out.as_deref(),
    };

    let mut report = match &cli.command {
        Command::Product { a, b, order } => {
            let mut report = ReportDocument::new(echo, &[a, b]);
            let (ta, tb) = (resolve(a)?, resolve(b)?);
            let n = order.unwrap_or(ta.shape().ndim() - ta.shape().split());
            let p = einstein_product(&ta, &tb, n)?;
            report.scalars.insert("order".into(), n as f64);
            report.scalars.insert("frobenius_norm".into(), p.frobenius_norm());
            ctx.output(&mut report, "product", &p)?;
            report
        }
        Command::Norm { a } => {
            let mut report = ReportDocument::new(echo, &[a]);
            let t = resolve(a)?;
            report.scalars.insert("frobenius".into(), t.frobenius_norm());
            report.scalars.insert("spectral".into(), t.spectral_norm());
            report.scalars.insert("norm".into(), t.norm(cfg.norm));
            report
        }
        Command::Rank { a } => {
            let mut report = ReportDocument::new(echo, &[a]);
            let t = resolve(a)?;
            let s = reshape::singular_values(&rsh(&t));
            report
                .scalars
                .insert("rshrank".into(), rshrank(&t, cfg.rank_tol) as f64);
            report
                .scalars
                .insert("sigma_max".into(), s.first().copied().unwrap_or(0.0));
            report
                .scalars
                .insert("sigma_min".into(), s.last().copied().unwrap_or(0.0));
            report
        }
        Command::Pinv { a } => {
            let mut report = ReportDocument::new(echo, &[a]);
            let t = resolve(a)?;
            let inv = ginv::moore_penrose(&t, &cfg);
            for (i, r) in inv.residuals.iter().enumerate() {
                report
                    .conditions
                    .push(Condition::at_most(format!("penrose_{}", i + 1), *r, cfg.tol));
            }
            report
                .scalars
                .insert("frobenius_norm".into(), inv.inverse.frobenius_norm());
            ctx.output(&mut report, "inverse", &inv.inverse)?;
            report
        }
        Command::GinvB { a, b } => {
            let mut report = ReportDocument::new(echo, &[a, b]);
            let (ta, tb) = (resolve(a)?, resolve(b)?);
            let ranks = [
                ("A*B", rshrank(&ta.dot(&tb)?, cfg.rank_tol)),
                ("B", rshrank(&tb, cfg.rank_tol)),
            ];
            report
                .conditions
                .push(Condition::ranks_equal("rank_chain", &ranks).gate());
            if report.conditions.passed("rank_chain") {
                let x = ginv::outer_inverse_range(&ta, &tb, &cfg)?;
                outer_checks(&mut report, &ta, &x, &cfg)?;
                report
                    .conditions
                    .extend(ginv::subspace_relation(&x, &tb, Relation::RangeEqual, cfg.rank_tol)?);
                ctx.output(&mut report, "inverse", &x)?;
            }
            report
        }
        Command::GinvC { a, c } => {
            let mut report = ReportDocument::new(echo, &[a, c]);
            let (ta, tc) = (resolve(a)?, resolve(c)?);
            let ranks = [
                ("C*A", rshrank(&tc.dot(&ta)?, cfg.rank_tol)),
                ("C", rshrank(&tc, cfg.rank_tol)),
            ];
            report
                .conditions
                .push(Condition::ranks_equal("rank_chain", &ranks).gate());
            if report.conditions.passed("rank_chain") {
                let x = ginv::outer_inverse_null(&ta, &tc, &cfg)?;
                outer_checks(&mut report, &ta, &x, &cfg)?;
                report
                    .conditions
                    .extend(ginv::subspace_relation(&x, &tc, Relation::NullEqual, cfg.rank_tol)?);
                ctx.output(&mut report, "inverse", &x)?;
            }
            report
        }
        Command::GinvBc { a, b, c } => {
            let mut report = ReportDocument::new(echo, &[a, b, c]);
            let (ta, tb, tc) = (resolve(a)?, resolve(b)?, resolve(c)?);
            let ranks = [
                ("C*A*B", rshrank(&tc.dot(&ta)?.dot(&tb)?, cfg.rank_tol)),
                ("C", rshrank(&tc, cfg.rank_tol)),
                ("B", rshrank(&tb, cfg.rank_tol)),
            ];
            report
                .conditions
                .push(Condition::ranks_equal("rank_chain", &ranks).gate());
            if report.conditions.passed("rank_chain") {
                let x = ginv::bc_inverse(&ta, &tb, &tc, &cfg)?;
                outer_checks(&mut report, &ta, &x, &cfg)?;
                let cax = tc.dot(&ta)?.dot(&x)?;
                let xab = x.dot(&ta)?.dot(&tb)?;
                report.conditions.push(Condition::at_most(
                    "left_identity",
                    relative(cax.sub(&tc)?.frobenius_norm(), tc.frobenius_norm()),
                    cfg.tol,
                ));
                report.conditions.push(Condition::at_most(
                    "right_identity",
                    relative(xab.sub(&tb)?.frobenius_norm(), tb.frobenius_norm()),
                    cfg.tol,
                ));
                report
                    .conditions
                    .extend(ginv::subspace_relation(&x, &tb, Relation::RangeEqual, cfg.rank_tol)?);
                report
                    .conditions
                    .extend(ginv::subspace_relation(&x, &tc, Relation::NullEqual, cfg.rank_tol)?);
                ctx.output(&mut report, "inverse", &x)?;
            }
            report
        }
        Command::PerturbInner { a, e, a1 } => {
            let mut inputs = vec![a.as_str(), e.as_str()];
            inputs.extend(a1.as_deref());
            let mut report = ReportDocument::new(echo, &inputs);
            let (ta, te) = (resolve(a)?, resolve(e)?);
            let ta1 = a1.as_deref().map(resolve).transpose()?;
            let rep = perturb::perturb_inner(&ta, &te, ta1.as_ref(), &cfg)?;
            absorb(&ctx, &mut report, rep)?;
            return Ok(report);
        }
        Command::PerturbOuter { a, x, e } => {
            let mut report = ReportDocument::new(echo, &[a, x, e]);
            let (ta, tx, te) = (resolve(a)?, resolve(x)?, resolve(e)?);
            let rep = perturb::perturb_outer(&ta, &tx, &te, &cfg)?;
            absorb(&ctx, &mut report, rep)?;
            return Ok(report);
        }
        Command::PerturbB { a, b, e, route } => {
            let mut report = ReportDocument::new(echo, &[a, b, e]);
            let (ta, tb, te) = (resolve(a)?, resolve(b)?, resolve(e)?);
            let rep = perturb::perturb_b_inverse(&ta, &tb, &te, route_of(*route), &cfg)?;
            absorb(&ctx, &mut report, rep)?;
            return Ok(report);
        }
        Command::PerturbC { a, c, e, route } => {
            let mut report = ReportDocument::new(echo, &[a, c, e]);
            let (ta, tc, te) = (resolve(a)?, resolve(c)?, resolve(e)?);
            let rep = perturb::perturb_c_inverse(&ta, &tc, &te, route_of(*route), &cfg)?;
            absorb(&ctx, &mut report, rep)?;
            return Ok(report);
        }
        Command::PerturbBc { a, b, c, e, route } => {
            let mut report = ReportDocument::new(echo, &[a, b, c, e]);
            let (ta, tb, tc, te) = (resolve(a)?, resolve(b)?, resolve(c)?, resolve(e)?);
            let rep = perturb::perturb_bc_inverse(&ta, &tb, &tc, &te, route_of(*route), &cfg)?;
            absorb(&ctx, &mut report, rep)?;
            return Ok(report);
        }
        Command::Verify { a, x, kind } => {
            let mut report = ReportDocument::new(echo, &[a, x]);
            let (ta, tx) = (resolve(a)?, resolve(x)?);
            let kind = match kind {
                KindArg::Inner => IdentityKind::Inner,
                KindArg::Outer => IdentityKind::Outer,
                KindArg::Penrose3 => IdentityKind::Penrose3,
                KindArg::Penrose4 => IdentityKind::Penrose4,
            };
            report
                .conditions
                .extend(ginv::verify_identity(&ta, &tx, kind, cfg.tol)?);
            report
        }
    };
    report.meta.insert("norm".into(), cfg.norm.name().into());
    report.set_status_from_conditions();
    Ok(report)
}

fn route_of(route: RouteArg) -> Route {
    match route {
        RouteArg::Multiplicative => Route::Multiplicative,
        RouteArg::Rank => Route::Rank,
    }
}

fn outer_checks(report: &mut ReportDocument, a: &Tensor, x: &Tensor, cfg: &Config) -> Result<(), CliError> {
    let r = ginv::identity_residual(a, x, IdentityKind::Outer)?;
    report.conditions.push(Condition::at_most("outer_identity", r, cfg.tol));
    Ok(())
}

fn absorb(ctx: &Ctx, report: &mut ReportDocument, rep: PerturbReport) -> Result<(), CliError> {
    report.meta.insert("norm".into(), ctx.cfg.norm.name().into());
    report.meta.insert("route".into(), rep.route.name().into());
    report.scalars.extend(rep.scalars.iter().map(|(k, v)| (k.clone(), *v)));
    for (key, value) in [
        ("measured_ratio", rep.measured_ratio),
        ("bound", rep.bound),
        ("corollary_bound", rep.corollary_bound),
    ] {
        if let Some(v) = value {
            report.scalars.insert(key.into(), v);
        }
    }
    report.flags.insert("gates_passed".into(), rep.gates_passed);
    report.flags.insert("verified".into(), rep.verified);
    report.flags.insert("bound_holds".into(), rep.bound_holds);
    report.status = if rep.ok() { Status::Ok } else { Status::GateFailure };
    report.conditions = rep.conditions.clone();
    if let Some(d2) = &rep.perturbed_inverse {
        ctx.output(report, "perturbed_inverse", d2)?;
    }
    if let Some(a2) = &rep.unperturbed_inverse {
        ctx.output(report, "unperturbed_inverse", a2)?;
    }
    Ok(())
}

/// At least six significant digits; integers print bare.
pub fn format_scalar(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x.fract() == 0.0 && x.abs() < 1e15 {
        return format!("{x:.0}");
    }
    let mag = x.abs();
    if (1e-4..1e7).contains(&mag) {
        let decimals = (5 - mag.log10().floor() as i32).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.6e}")
    }
}

fn render_text(report: &ReportDocument) -> String {
    let mut s = String::new();
    let status = match report.status {
        Status::Ok => "ok",
        Status::GateFailure => "gate failure",
    };
    let _ = writeln!(s, "command: {}", report.command);
    let _ = writeln!(s, "status:  {status}");
    for (k, v) in &report.meta {
        let _ = writeln!(s, "{k}: {v}");
    }
    if !report.scalars.is_empty() {
        let _ = writeln!(s, "\nscalars");
        for (k, v) in &report.scalars {
            let _ = writeln!(s, "  {k:<22} {}", format_scalar(*v));
        }
    }
    if !report.flags.is_empty() {
        let _ = writeln!(s, "\nflags");
        for (k, v) in &report.flags {
            let _ = writeln!(s, "  {k:<22} {v}");
        }
    }
    if !report.conditions.is_empty() {
        let _ = writeln!(s, "\nconditions");
        for c in report.conditions.iter() {
            let role = match c.role {
                Role::Gate => "gate",
                Role::Check => "check",
                Role::Info => "info",
            };
            let verdict = if c.passed { "pass" } else { "FAIL" };
            let _ = write!(
                s,
                "  {role:<5} {:<24} {verdict}  residual {}  tol {}",
                c.name,
                format_scalar(c.residual),
                format_scalar(c.tolerance)
            );
            if !c.detail.is_empty() {
                let _ = write!(s, "  ({})", c.detail);
            }
            s.push('\n');
        }
    }
    for out in &report.outputs {
        let dims = |v: &[usize]| v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("x");
        let (rows, cols) = out.shape.split_at(out.split);
        let _ = writeln!(s, "\noutput {} ({} | {})", out.label, dims(rows), dims(cols));
        match (&out.path, &out.entries) {
            (Some(path), _) => {
                let _ = writeln!(s, "  written to {path}");
            }
            (None, Some(entries)) => render_slices(&mut s, &out.shape, entries),
            (None, None) => {}
        }
    }
    s
}

/// Prints `T(:, :, k...)` slices, the way the tensors are usually displayed.
fn render_slices(s: &mut String, shape: &[usize], entries: &[[f64; 2]]) {
    // rounds tiny values to an unsigned zero
    let clean = |x: f64| if x.abs() < 5e-7 { 0.0 } else { x };
    let fmt = |z: [f64; 2]| {
        let z = [clean(z[0]), clean(z[1])];
        if z[1] != 0.0 {
            format!("{:.6}{:+.6}i", z[0], z[1])
        } else {
            format!("{:.6}", z[0])
        }
    };
    match shape.len() {
        0 => {
            let _ = writeln!(s, "  {}", fmt(entries[0]));
        }
        1 => {
            for z in entries {
                let _ = writeln!(s, "  {}", fmt(*z));
            }
        }
        _ => {
            let (m, n) = (shape[0], shape[1]);
            let trailing = &shape[2..];
            let slices = trailing.iter().product::<usize>();
            for k in 0..slices {
                let mut idx = Vec::with_capacity(trailing.len());
                let mut rem = k;
                for &ext in trailing {
                    idx.push(rem % ext + 1);
                    rem /= ext;
                }
                let label = std::iter::repeat_n(":".to_string(), 2)
                    .chain(idx.iter().map(|i| i.to_string()))
                    .collect::<Vec<_>>()
                    .join(",");
                let _ = writeln!(s, "  ({label})");
                let base = k * m * n;
                for i in 0..m {
                    let row = (0..n)
                        .map(|j| format!("{:>12}", fmt(entries[base + i + m * j])))
                        .collect::<String>();
                    let _ = writeln!(s, "  {row}");
                }
            }
        }
    }
}
