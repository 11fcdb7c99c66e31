//! Command-line front end over the evaluation and verification layers.
//!
//! Six subcommands: `eval` (direct summation), `closed` (canonical closed
//! form), `verify` (dual-route comparison), `identity` (general-identity
//! residual at chosen parameters), `regression` (batch suites), and `cmzv`
//! (level-four colored-zeta expression of a linear spec). Exit code 0 means
//! success or match, 1 a failed check or runtime failure, 2 a usage error.

use std::io;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::identities::{cmzv_expr, reduce_spec, KnownValuesTable};
use crate::numkernel::PrecisionCtx;
use crate::seqcore::SeqTag;
use crate::seriesnum::{sum_spec_numeric, SumSpec};
use crate::verifier::{
    identity_tolerance, run_regression, verify_general_identity, verify_spec, GeneralIdentity,
    Suite, VerifyStatus,
};

const SPEC_HELP: &str = "Sum specs are written F[e1,...,ek;e] with family F one of T, S, R \
(case-insensitive). Every entry is a positive integer order; prefixing an \
entry with `~` alternates the attached sign sequence, so `~3` is the \
ASCII form of the bar accent over a 3. Examples: T[1;2], S[~1,2;~3], \
R[2;2]. The outer entry of an S- or R-style sum may not be a plain 1, \
since that series diverges.";

/// Evaluate alternating Euler sums exactly and numerically.
#[derive(Debug, Parser)]
#[command(name = "eulersums", version, after_long_help = SPEC_HELP)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Args)]
struct ConfigArgs {
    /// Working precision in decimal digits (at least 20).
    #[arg(long, global = true, default_value_t = 50)]
    digits: usize,

    /// Emit one JSON object per result on standard output.
    #[arg(long, global = true)]
    json: bool,

    /// Known-values table file; defaults to known_values.json under the
    /// data directory ($EULERSUMS_DATA_DIR or the bundled data/).
    #[arg(long, global = true, value_name = "PATH")]
    known_values: Option<PathBuf>,

    /// Directory holding the golden tables; same default as above.
    #[arg(long, global = true, value_name = "PATH")]
    golden: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Numerically evaluate a sum spec by direct summation.
    Eval { spec: String },
    /// Print the closed form of a sum spec in the canonical constant basis.
    Closed { spec: String },
    /// Evaluate a spec by closed form and by direct summation and compare.
    Verify { spec: String },
    /// Evaluate the residual of a general identity at chosen parameters.
    Identity {
        /// One of Thm3.1, Thm3.4, Thm4.1, Thm4.4.
        #[arg(long)]
        theorem: String,
        /// Comma-separated orders: p,q for the linear identities,
        /// m,p,q for the quadratic ones; the last order is the outer one.
        #[arg(long, value_delimiter = ',', required = true)]
        params: Vec<u32>,
        /// Comma-separated weight sequences, one per order: Ones or Alt.
        #[arg(long, value_delimiter = ',', required = true)]
        tags: Vec<String>,
    },
    /// Run a batch regression suite.
    Regression {
        /// One of appendix, intext-linear, intext-quadratic, transforms.
        #[arg(long)]
        suite: String,
    },
    /// Print the level-four colored-zeta expression of a linear spec.
    Cmzv { spec: String },
}

/// Resolved front-end configuration.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub digits: usize,
    pub json: bool,
    pub known_values: PathBuf,
    pub golden_dir: PathBuf,
}

fn default_data_dir() -> PathBuf {
    match std::env::var_os("EULERSUMS_DATA_DIR") {
        Some(d) => PathBuf::from(d),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("data"),
    }
}

impl CliConfig {
    fn from_args(a: &ConfigArgs) -> CliConfig {
        let data = default_data_dir();
        CliConfig {
            digits: a.digits,
            json: a.json,
            known_values: a
                .known_values
                .clone()
                .unwrap_or_else(|| data.join("known_values.json")),
            golden_dir: a.golden.clone().unwrap_or(data),
        }
    }
}

/// Entry point for the binary: parse `std::env::args`, write to the
/// standard streams, return the process exit code.
pub fn run() -> i32 {
    let args: Vec<std::ffi::OsString> = std::env::args_os().collect();
    run_args(args, &mut io::stdout().lock(), &mut io::stderr().lock())
}

/// Testable entry point over explicit argument and output streams.
pub fn run_args<I, S>(args: I, out: &mut dyn io::Write, errw: &mut dyn io::Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // clap renders --help and --version through the error path
            let rendered = e.render();
            if e.use_stderr() {
                let _ = write!(errw, "{rendered}");
                return 2;
            }
            let _ = write!(out, "{rendered}");
            return 0;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(errw, "error: {e}");
            exit_for(&e)
        }
    }
}

/// Usage-class errors exit 2; runtime failures exit 1.
fn exit_for(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::Semantic(_)
        | Error::Divergent(_)
        | Error::UnsupportedDegree(_)
        | Error::DomainViolation(_)
        | Error::UnsupportedConstant(_)
        | Error::NonAlternating(_)
        | Error::UndefinedPrimitive(_) => 2,
        _ => 1,
    }
}

fn dispatch(cli: &Cli, out: &mut dyn io::Write) -> Result<i32> {
    let cfg = CliConfig::from_args(&cli.config);
    let ctx = PrecisionCtx::new(cfg.digits)?;
    match &cli.cmd {
        Cmd::Eval { spec } => cmd_eval(&ctx, &cfg, spec, out),
        Cmd::Closed { spec } => cmd_closed(&cfg, spec, out),
        Cmd::Verify { spec } => cmd_verify(&ctx, &cfg, spec, out),
        Cmd::Identity { theorem, params, tags } => {
            cmd_identity(&ctx, &cfg, theorem, params, tags, out)
        }
        Cmd::Regression { suite } => cmd_regression(&ctx, &cfg, suite, out),
        Cmd::Cmzv { spec } => cmd_cmzv(&ctx, &cfg, spec, out),
    }
}

/// Load the known-values table; a missing default file degrades to the
/// empty table, but an explicitly requested file must exist.
fn load_table(cfg: &CliConfig, explicit: bool) -> Result<KnownValuesTable> {
    if cfg.known_values.exists() {
        KnownValuesTable::load(&cfg.known_values)
    } else if explicit {
        Err(Error::Data(format!(
            "known-values table not found at {}",
            cfg.known_values.display()
        )))
    } else {
        Ok(KnownValuesTable::empty())
    }
}

fn emit(out: &mut dyn io::Write, cfg: &CliConfig, obj: Value, text: &str) -> Result<()> {
    if cfg.json {
        writeln!(out, "{obj}")?;
    } else {
        writeln!(out, "{text}")?;
    }
    Ok(())
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Data(format!("serialization failed: {e}")))
}

fn cmd_eval(
    ctx: &PrecisionCtx,
    cfg: &CliConfig,
    spec: &str,
    out: &mut dyn io::Write,
) -> Result<i32> {
    let spec = SumSpec::parse(spec)?;
    let v = sum_spec_numeric(ctx, &spec)?;
    let shown = ctx.format_sig(&v, ctx.display_digits());
    let obj = json!({
        "digits": ctx.display_digits(),
        "spec": spec.to_string(),
        "value": shown,
    });
    emit(out, cfg, obj, &shown)?;
    Ok(0)
}

fn cmd_closed(cfg: &CliConfig, spec: &str, out: &mut dyn io::Write) -> Result<i32> {
    let spec = SumSpec::parse(spec)?;
    let table = load_table(cfg, false)?;
    let red = reduce_spec(&spec, &table)?;
    let text = red.value.to_string();
    let obj = json!({
        "provenance": red.provenance,
        "residual_formals": to_value(&red.residual_formals)?,
        "spec": spec.to_string(),
        "text": text,
        "value": to_value(&red.value)?,
    });
    emit(out, cfg, obj, &text)?;
    Ok(0)
}

fn cmd_verify(
    ctx: &PrecisionCtx,
    cfg: &CliConfig,
    spec: &str,
    out: &mut dyn io::Write,
) -> Result<i32> {
    let spec = SumSpec::parse(spec)?;
    let table = load_table(cfg, false)?;
    let report = verify_spec(ctx, &spec, &table)?;
    let shown = |v: &crate::numkernel::Real| ctx.format_sig(v, ctx.display_digits());
    let obj = json!({
        "matched_digits": report.matched_digits,
        "numeric_series": shown(&report.numeric_series),
        "numeric_symbolic": report.numeric_symbolic.as_ref().map(shown),
        "provenance": report.provenance,
        "spec": report.spec.to_string(),
        "status": report.status.as_str(),
        "symbolic": match &report.symbolic {
            Some(sv) => to_value(sv)?,
            None => Value::Null,
        },
    });
    let mut text = format!("spec: {}\nstatus: {}", report.spec, report.status);
    if let (Some(sv), Some(p)) = (&report.symbolic, &report.provenance) {
        text.push_str(&format!("\nsymbolic: {sv}  ({p})"));
    }
    text.push_str(&format!("\nnumeric (series):   {}", shown(&report.numeric_series)));
    if let Some(ns) = &report.numeric_symbolic {
        text.push_str(&format!("\nnumeric (symbolic): {}", shown(ns)));
        text.push_str(&format!("\nagreed digits: {}", report.matched_digits));
    }
    emit(out, cfg, obj, &text)?;
    Ok(if report.status == VerifyStatus::Mismatch { 1 } else { 0 })
}

fn parse_tag(s: &str) -> Result<SeqTag> {
    match s.trim().to_ascii_lowercase().as_str() {
        "ones" => Ok(SeqTag::Ones),
        "alt" => Ok(SeqTag::Alt),
        _ => Err(Error::Semantic(format!(
            "unknown weight sequence {s:?}; expected Ones or Alt"
        ))),
    }
}

fn tag_name(t: SeqTag) -> &'static str {
    match t {
        SeqTag::Ones => "Ones",
        SeqTag::Alt => "Alt",
    }
}

fn cmd_identity(
    ctx: &PrecisionCtx,
    cfg: &CliConfig,
    theorem: &str,
    params: &[u32],
    tags: &[String],
    out: &mut dyn io::Write,
) -> Result<i32> {
    let which = GeneralIdentity::parse(theorem)?;
    let tags = tags.iter().map(|t| parse_tag(t)).collect::<Result<Vec<_>>>()?;
    let residual = verify_general_identity(ctx, which, params, &tags)?;
    let tol = identity_tolerance(ctx);
    let pass = residual.abs() < tol;
    let rtext = ctx.format_sig(&residual.abs(), 3);
    let ttext = ctx.format_sig(&tol, 1);
    let tag_names: Vec<&str> = tags.iter().map(|&t| tag_name(t)).collect();
    let obj = json!({
        "params": params,
        "pass": pass,
        "residual": rtext,
        "tags": tag_names,
        "theorem": which.as_str(),
        "tolerance": ttext,
    });
    let text = format!(
        "identity {} at orders {:?}, weights ({})\nresidual: {} (tolerance {})\nstatus: {}",
        which,
        params,
        tag_names.join(", "),
        rtext,
        ttext,
        if pass { "pass" } else { "FAIL" },
    );
    emit(out, cfg, obj, &text)?;
    Ok(if pass { 0 } else { 1 })
}

fn cmd_regression(
    ctx: &PrecisionCtx,
    cfg: &CliConfig,
    suite: &str,
    out: &mut dyn io::Write,
) -> Result<i32> {
    let suite = Suite::parse(suite)?;
    let table = load_table(cfg, false)?;
    let summary = run_regression(ctx, suite, &table, &cfg.golden_dir)?;
    let first = summary.first_failure();
    let obj = json!({
        "failed": summary.failed(),
        "first_failure": first.map(|f| json!({ "detail": f.detail, "label": f.label })),
        "headline": summary.headline(),
        "passed": summary.passed(),
        "suite": suite.as_str(),
        "total": summary.total(),
    });
    let mut text = format!("suite {}: {}", suite, summary.headline());
    if let Some(f) = first {
        text.push_str(&format!("\nfirst failure: {}\n  {}", f.label, f.detail));
    }
    emit(out, cfg, obj, &text)?;
    Ok(if summary.all_pass() { 0 } else { 1 })
}

fn cmd_cmzv(
    ctx: &PrecisionCtx,
    cfg: &CliConfig,
    spec: &str,
    out: &mut dyn io::Write,
) -> Result<i32> {
    let spec = SumSpec::parse(spec)?;
    let expr = cmzv_expr(&spec)?;
    let v = expr.numeric(ctx)?;
    let re = ctx.format_sig(&v.re, ctx.display_digits());
    let im = ctx.format_sig(&v.im, 3);
    let obj = json!({
        "expression": expr.to_string(),
        "imag": im,
        "real": re,
        "spec": spec.to_string(),
    });
    let text = format!("{spec} = {expr}\nreal: {re}\nimag: {im}");
    emit(out, cfg, obj, &text)?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_vec(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["eulersums"];
        argv.extend_from_slice(args);
        let code = run_args(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn closed_prints_the_canonical_form() {
        let (code, out, _) = run_vec(&["closed", "T[1;2]"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "-7/2*zeta(3) + pi^2*ln2");
    }

    #[test]
    fn eval_prints_requested_precision() {
        let (code, out, _) = run_vec(&["eval", "S[1;~1]", "--digits", "30"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("1.2337005501"), "got {out}");
        // display digits = digits - guard
        assert_eq!(out.trim().len(), 2 + 20, "got {out}");
    }

    #[test]
    fn verify_reports_match_and_not_reducible() {
        let (code, out, _) = run_vec(&["verify", "T[1;2]", "--digits", "30"]);
        assert_eq!(code, 0);
        assert!(out.contains("status: match"));

        let (code, out, _) = run_vec(&["verify", "T[2;2]", "--digits", "30"]);
        assert_eq!(code, 0);
        assert!(out.contains("status: not-reducible"));
        assert!(out.contains("numeric (series)"));
    }

    #[test]
    fn closed_irreducible_exits_one() {
        let (code, out, err) = run_vec(&["closed", "T[2;2]"]);
        assert_eq!(code, 1);
        assert!(out.is_empty());
        assert!(err.contains("not reducible"));
    }

    #[test]
    fn usage_errors_exit_two() {
        let (code, _, err) = run_vec(&["eval", "T[1;0]"]);
        assert_eq!(code, 2, "{err}");

        let (code, _, err) = run_vec(&["eval", "T[1;2]", "--digits", "10"]);
        assert_eq!(code, 2, "{err}");

        let (code, _, _) = run_vec(&["frobnicate"]);
        assert_eq!(code, 2);

        let (code, _, err) = run_vec(&["cmzv", "T[1,1;2]"]);
        assert_eq!(code, 2);
        assert!(err.contains("degree"));
    }

    #[test]
    fn identity_subcommand_passes_in_domain() {
        let (code, out, _) = run_vec(&[
            "identity",
            "--theorem",
            "Thm3.1",
            "--params",
            "2,3",
            "--tags",
            "Ones,Alt",
            "--digits",
            "30",
        ]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("status: pass"));

        let (code, _, err) = run_vec(&[
            "identity",
            "--theorem",
            "Thm3.1",
            "--params",
            "2,1",
            "--tags",
            "Ones,Ones",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("domain"));
    }

    #[test]
    fn json_output_is_canonical_and_round_trips() {
        let (code, out, _) = run_vec(&["verify", "T[1;2]", "--digits", "30", "--json"]);
        assert_eq!(code, 0);
        let line = out.trim();
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), line);
        assert_eq!(v["status"], "match");
        assert_eq!(v["spec"], "T[1;2]");

        let (_, out2, _) = run_vec(&["verify", "T[1;2]", "--digits", "30", "--json"]);
        assert_eq!(out, out2);
    }

    #[test]
    fn help_mentions_bar_mapping() {
        let (code, out, _) = run_vec(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("~"));
        assert!(out.contains("bar"));
    }

    #[test]
    fn cmzv_emits_expression_and_value() {
        let (code, out, _) = run_vec(&["cmzv", "T[1;2]", "--digits", "25", "--json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(out.trim()).unwrap();
        assert!(v["expression"].as_str().unwrap().contains("Z["));
        let re: f64 = v["real"].as_str().unwrap().parse().unwrap();
        assert!((re - 2.8838761954).abs() < 1e-8);
    }
}
