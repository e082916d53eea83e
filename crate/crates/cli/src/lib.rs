//! Command-line front end: argument parsing, dispatch and report output.
//!
//! Exit codes: 0 when every requested check passes, 1 on a verification
//! failure, 2 on a usage error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qpsi_core::harness::{
    abel_probe, degeneration_suite, limit_probe_suite, orthogonality_suite, shift_chain_suite, to_json, verify,
    verify_all, verify_sweep, CampaignConfig, DegenerationConfig, OrthogonalityConfig, SampleSpec, DEFAULT_TOL,
    N_MAX,
};
use qpsi_core::identity::{lookup, registry};
use qpsi_core::inversion::PairKind;
use qpsi_core::qcore::{Mode, FLOAT_PRECISION_DIGITS};
use qpsi_core::{Error, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "qpsi", version, about = "Verify bilateral q-series summations and their matrix inverses")]
pub struct Cli {
    /// Working precision in decimal digits; only the binary64 value is supported.
    #[arg(long, global = true, env = "QPSI_PRECISION", default_value_t = FLOAT_PRECISION_DIGITS)]
    pub precision: u32,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the registered identities.
    List,
    /// Sample and check one identity.
    Verify(VerifyArgs),
    /// Run every identity campaign and every suite.
    VerifyAll(CampaignArgs),
    /// Check both orthogonality relations of an inverse pair.
    Orthogonality(OrthogonalityArgs),
    /// Check the registered degenerations termwise, and the e = q^l chain.
    Degenerations(DegenerationArgs),
    /// Decay of the large-parameter limits.
    ProbeLimit(ProbeArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub id: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Points per terminating index (exact) or in total (float).
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Defaults to exact for terminating identities, float otherwise.
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Fix the terminating index; without it exact runs sweep `0..=8`.
    #[arg(long)]
    pub n: Option<i64>,
}

#[derive(Args, Debug)]
pub struct CampaignArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Overrides both the exact and the float sample counts.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct OrthogonalityArgs {
    #[arg(long, default_value_t = PairKind::Krattenthaler)]
    pub pair: PairKind,
    /// Window `l n`; every sub-window is checked.
    #[arg(long, num_args = 2, value_names = ["L", "N"], default_values_t = [0, 8])]
    pub window: Vec<i64>,
    #[arg(long, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random contexts.
    #[arg(long, default_value_t = 25)]
    pub contexts: usize,
}

#[derive(Args, Debug)]
pub struct DegenerationArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Points per auxiliary index.
    #[arg(long, default_value_t = 4)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct ProbeArgs {
    /// Growing parameter of the vwp limits; also probed at twice this value.
    #[arg(long = "B", default_value_t = 1e6)]
    pub big_b: f64,
    /// Growing index of the Abel limit.
    #[arg(long, default_value_t = 1_000_000)]
    pub m: i64,
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code. Reports go to `out` unless `--output` is given.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    if cli.precision != FLOAT_PRECISION_DIGITS {
        let _ = writeln!(
            err,
            "error: precision {} not supported; the float backend carries {FLOAT_PRECISION_DIGITS} digits",
            cli.precision
        );
        return EXIT_USAGE;
    }
    match dispatch(&cli) {
        Ok((text, passed)) => {
            if let Err(e) = emit(&cli, &text, out) {
                let _ = writeln!(err, "error: {e}");
                return EXIT_USAGE;
            }
            if passed {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn emit(cli: &Cli, text: &str, out: &mut dyn Write) -> std::io::Result<()> {
    match &cli.output {
        Some(path) => fs::write(path, text),
        None => out.write_all(text.as_bytes()),
    }
}

/// A rendered report and whether it passed. Errors are usage errors.
fn dispatch(cli: &Cli) -> Result<(String, bool)> {
    match &cli.command {
        Command::List => list(cli.format),
        Command::Verify(a) => verify_cmd(a, cli.format),
        Command::VerifyAll(a) => verify_all_cmd(a, cli.format),
        Command::Orthogonality(a) => orthogonality_cmd(a, cli.format),
        Command::Degenerations(a) => degenerations_cmd(a, cli.format),
        Command::ProbeLimit(a) => probe_cmd(a, cli.format),
    }
}

fn render<T: Serialize>(format: Format, report: &T, human: impl FnOnce() -> String) -> Result<String> {
    match format {
        Format::Json => Ok(to_json(report)? + "\n"),
        Format::Human => Ok(human()),
    }
}

fn mark(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Serialize)]
struct ListEntry {
    id: &'static str,
    title: &'static str,
    kind: String,
    exact: bool,
    domain: &'static str,
    degenerations: Vec<&'static str>,
}

fn list(format: Format) -> Result<(String, bool)> {
    let entries: Vec<ListEntry> = registry()
        .iter()
        .map(|r| ListEntry {
            id: r.id,
            title: r.title,
            kind: format!("{:?}", r.kind).to_lowercase(),
            exact: r.supports_exact(),
            domain: r.domain_text,
            degenerations: r.degenerations.iter().map(|d| d.target).collect(),
        })
        .collect();
    let text = render(format, &entries, || {
        let mut s = String::new();
        for e in &entries {
            s += &format!("{:<18} {:<12} {}\n", e.id, e.kind, e.title);
        }
        s
    })?;
    Ok((text, true))
}

fn verify_cmd(a: &VerifyArgs, format: Format) -> Result<(String, bool)> {
    let rec = lookup(&a.id)?;
    let mut spec = SampleSpec::default_for(rec).with_seed(a.seed);
    if let Some(mode) = a.mode {
        if mode == Mode::Exact && !rec.supports_exact() {
            return Err(Error::Mode(format!("`{}` is not terminating; use --mode float", rec.id)));
        }
        spec = SampleSpec::new(rec.id, mode).with_seed(a.seed);
    }
    if let Some(c) = a.count {
        spec = spec.with_count(c);
    }
    spec.tol = a.tol;
    if let Some(n) = a.n {
        if rec.ints.is_empty() {
            return Err(Error::InvalidParameter(format!("`{}` has no terminating index", rec.id)));
        }
        spec = spec.with_n(n);
    }
    let report = if spec.mode == Mode::Exact && spec.fixed_n.is_none() {
        verify_sweep(&spec, N_MAX)?
    } else {
        verify(&spec)?
    };
    let passed = report.passed();
    let text = render(format, &report, || {
        let s = &report.summary;
        let mut t = format!(
            "[{}] {} ({} mode): {} samples, max relative residual {:.3e}, max absolute residual {:.3e}, {} outside error budget\n",
            mark(passed),
            report.id,
            report.spec.mode,
            s.samples,
            s.max_rel_residual,
            s.max_abs_residual,
            s.budget_violations
        );
        for f in &s.failures {
            t += &format!("  sample {}: {}\n", f.index, f.reason);
        }
        t
    })?;
    Ok((text, passed))
}

fn verify_all_cmd(a: &CampaignArgs, format: Format) -> Result<(String, bool)> {
    let mut cfg = CampaignConfig {
        seed: a.seed,
        tol: a.tol,
        ..Default::default()
    };
    if let Some(c) = a.count {
        cfg.exact_count = c;
        cfg.float_count = c;
    }
    let report = verify_all(&cfg);
    let text = render(format, &report, || {
        let mut t = String::new();
        for r in &report.identities {
            t += &format!(
                "[{}] {:<18} {} mode, {} samples, max relative residual {:.3e}{}\n",
                mark(r.passed),
                r.id,
                r.mode,
                r.samples,
                r.max_rel_residual,
                r.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default()
            );
        }
        for r in &report.orthogonality {
            t += &format!("[{}] orthogonality {} ({} contexts)\n", mark(r.passed), r.pair, r.contexts);
        }
        for r in &report.degenerations {
            t += &format!("[{}] degeneration {} -> {} ({})\n", mark(r.passed), r.source, r.target, r.substitution);
        }
        let chain_ok = report.shift_chain.iter().all(|c| c.passed);
        t += &format!("[{}] e = q^l chain ({} cases)\n", mark(chain_ok), report.shift_chain.len());
        for p in &report.probes {
            t += &format!("[{}] limit {} -> {}: ratio {:.4}\n", mark(p.passed), p.source, p.target, p.ratio);
        }
        t += &format!("overall: {}\n", mark(report.passed));
        t
    })?;
    Ok((text, report.passed))
}

fn orthogonality_cmd(a: &OrthogonalityArgs, format: Format) -> Result<(String, bool)> {
    let (l, n) = (a.window[0], a.window[1]);
    if l < 0 || n < l {
        return Err(Error::InvalidParameter(format!("window ({l}, {n}) needs 0 <= l <= n")));
    }
    let cfg = OrthogonalityConfig {
        seed: a.seed,
        contexts: a.contexts,
        windows: vec![(l, n)],
        ..Default::default()
    };
    let report = orthogonality_suite(a.pair, a.mode, &cfg);
    let text = render(format, &report, || {
        let mut t = format!(
            "[{}] {} pair, {} mode, window ({l}, {n}): {} contexts, max off-diagonal {:.3e}, max diagonal deviation {:.3e}",
            mark(report.passed),
            report.pair,
            report.mode,
            report.contexts,
            report.max_offdiag,
            report.max_diag_dev
        );
        if report.product_entries > 0 {
            t += &format!(", {} product-identity entries", report.product_entries);
        }
        t += "\n";
        for f in &report.failures {
            t += &format!("  {f}\n");
        }
        t
    })?;
    Ok((text, report.passed))
}

#[derive(Serialize)]
struct DegenerationOutput {
    links: Vec<qpsi_core::harness::DegenerationReport>,
    shift_chain: Vec<qpsi_core::harness::ChainCase>,
    passed: bool,
}

fn degenerations_cmd(a: &DegenerationArgs, format: Format) -> Result<(String, bool)> {
    let cfg = DegenerationConfig {
        seed: a.seed,
        samples: a.samples,
        ..Default::default()
    };
    let links = degeneration_suite(&cfg);
    let shift_chain = shift_chain_suite(5, DEFAULT_TOL);
    let passed = links.iter().all(|r| r.passed) && shift_chain.iter().all(|c| c.passed);
    let report = DegenerationOutput {
        links,
        shift_chain,
        passed,
    };
    let text = render(format, &report, || {
        let mut t = String::new();
        for r in &report.links {
            t += &format!(
                "[{}] {} -> {} ({}): {} termwise instances\n",
                mark(r.passed),
                r.source,
                r.target,
                r.substitution,
                r.cases
            );
            for f in &r.failures {
                t += &format!("  {f}\n");
            }
        }
        for c in &report.shift_chain {
            t += &format!(
                "[{}] e = q^{} chain: max relative deviation {:.3e}{}\n",
                mark(c.passed),
                c.l,
                c.max_rel_deviation,
                c.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default()
            );
        }
        t
    })?;
    Ok((text, passed))
}

fn probe_cmd(a: &ProbeArgs, format: Format) -> Result<(String, bool)> {
    if a.big_b.is_nan() || a.big_b <= 0.0 || a.m <= 0 {
        return Err(Error::InvalidParameter("--B and --m must be positive".into()));
    }
    let mut probes = limit_probe_suite(a.big_b);
    probes.push(abel_probe(a.m));
    let passed = probes.iter().all(|p| p.passed);
    let text = render(format, &probes, || {
        let mut t = String::new();
        for p in &probes {
            t += &format!(
                "[{}] {} -> {}: deviation {:.3e} at {:e}, {:.3e} at {:e}, ratio {:.4}{}\n",
                mark(p.passed),
                p.source,
                p.target,
                p.deviation.0,
                p.x.0,
                p.deviation.1,
                p.x.1,
                p.ratio,
                p.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default()
            );
        }
        t
    })?;
    Ok((text, passed))
}
