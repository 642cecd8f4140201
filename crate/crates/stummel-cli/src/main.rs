//! Command-line front end: reads a JSON run configuration, dispatches to
//! the core routines, and emits CSV or JSON reports.
//!
//! Exit codes: 0 on success (for `verify-paper`, agreement of every
//! non-flagged claim); 1 when the claim battery disagrees outside its
//! documented discrepancy flags; 2 on any configuration or parameter error.
//! Outputs are written atomically (temp file, then rename), and identical
//! config plus seed produces byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use stummel_core::{
    check_conditions, check_theorem, claims_agree, classify, modulus_curve, space_norm,
    verify_paper, ClaimRow, ClassificationReport, ConditionReport, HypothesisChecklist,
    IntegralValue, ModulusCurve, NormReport, RadialGrid, ScaleFunction, SpaceSpec, TestFunction,
    TheoremId, TheoremParams,
};

#[derive(Parser)]
#[command(name = "stummel", version, about = "Stummel modulus and Morrey/Lorentz norm analyzer")]
struct Cli {
    #[command(subcommand)]
    command: CommandName,
    /// JSON run configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Sampling seed; overrides the config value.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format; overrides the config value.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Radial grid, written r_min,r_max,points; overrides the config value.
    #[arg(long, global = true, value_name = "R_MIN,R_MAX,POINTS")]
    grid: Option<String>,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum CommandName {
    /// Check the integrability, doubling, and kernel-decay conditions of a scale.
    PsiCheck,
    /// Sample the Stummel modulus of a function over the radial grid.
    Modulus,
    /// Evaluate Morrey, weak-Morrey, Lorentz, or Lebesgue norms.
    Norm,
    /// Classify a function against the bounded and vanishing modulus classes.
    Classify,
    /// Check the hypothesis list of one inclusion statement.
    Inclusion,
    /// Run the frozen claim battery and report agreement.
    VerifyPaper,
}

impl CommandName {
    fn name(self) -> &'static str {
        match self {
            CommandName::PsiCheck => "psi-check",
            CommandName::Modulus => "modulus",
            CommandName::Norm => "norm",
            CommandName::Classify => "classify",
            CommandName::Inclusion => "inclusion",
            CommandName::VerifyPaper => "verify-paper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSpec {
    r_min: f64,
    r_max: f64,
    points: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct OutputSpec {
    path: Option<PathBuf>,
    format: Option<Format>,
}

/// One run, fully described. Unknown fields are rejected so a typo cannot
/// silently drop a parameter.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RunConfig {
    /// Must match the subcommand when present.
    command: Option<String>,
    function: Option<TestFunction>,
    scale: Option<ScaleFunction>,
    /// Second scale, for statements comparing two of them.
    scale2: Option<ScaleFunction>,
    theorem: Option<TheoremId>,
    n: Option<u32>,
    p: Option<f64>,
    p1: Option<f64>,
    p2: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    lambda: Option<f64>,
    kappa: Option<f64>,
    sigma: Option<f64>,
    grid: Option<GridSpec>,
    seed: Option<u64>,
    output: Option<OutputSpec>,
}

/// Everything a dispatch function may emit.
enum Payload {
    Conditions(ConditionReport),
    Curve(ModulusCurve),
    Norms(Vec<NormReport>),
    Classification(ClassificationReport),
    Checklist(HypothesisChecklist),
    Claims(Vec<ClaimRow>),
}

fn main() {
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, String> {
    configure_threads()?;
    let cfg = match &cli.config {
        Some(path) => {
            let raw = fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            serde_json::from_str::<RunConfig>(&raw)
                .map_err(|e| format!("invalid config {}: {e}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(name) = &cfg.command {
        if name != cli.command.name() {
            return Err(format!(
                "config is for command {name:?}, invoked as {:?}",
                cli.command.name()
            ));
        }
    }
    let grid = resolve_grid(&cli, &cfg)?;
    let _seed = cli.seed.or(cfg.seed).unwrap_or(0);

    let payload = match cli.command {
        CommandName::PsiCheck => {
            let psi = require_scale(&cfg)?;
            let n = cfg.n.unwrap_or(1);
            Payload::Conditions(check_conditions(psi, n).map_err(|e| e.to_string())?)
        }
        CommandName::Modulus => {
            let f = require_function(&cfg)?;
            let p = require(cfg.p, "p")?;
            let psi = require_scale(&cfg)?;
            Payload::Curve(modulus_curve(f, p, psi, &grid).map_err(|e| e.to_string())?)
        }
        CommandName::Norm => {
            let f = require_function(&cfg)?;
            let specs = norm_specs(&cfg)?;
            let reports = specs
                .iter()
                .map(|spec| space_norm(f, spec).map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            Payload::Norms(reports)
        }
        CommandName::Classify => {
            let f = require_function(&cfg)?;
            let p = require(cfg.p, "p")?;
            let psi = require_scale(&cfg)?;
            Payload::Classification(classify(f, p, psi, &grid).map_err(|e| e.to_string())?)
        }
        CommandName::Inclusion => {
            let theorem = cfg.theorem.ok_or("missing parameter: theorem")?;
            let params = TheoremParams {
                n: cfg.n,
                p: cfg.p,
                p1: cfg.p1,
                p2: cfg.p2,
                alpha: cfg.alpha,
                beta: cfg.beta,
                lambda: cfg.lambda,
                kappa: cfg.kappa,
                sigma: cfg.sigma,
                psi1: cfg.scale.clone(),
                psi2: cfg.scale2.clone(),
            };
            Payload::Checklist(check_theorem(theorem, &params).map_err(|e| e.to_string())?)
        }
        CommandName::VerifyPaper => Payload::Claims(verify_paper()),
    };

    let exit = match &payload {
        Payload::Claims(rows) if !claims_agree(rows) => 1,
        _ => 0,
    };

    let out_path = cli.out.or_else(|| cfg.output.as_ref().and_then(|o| o.path.clone()));
    let format = cli
        .format
        .or_else(|| cfg.output.as_ref().and_then(|o| o.format))
        .unwrap_or(Format::Json);
    let bytes = render(&payload, format)?;
    match &out_path {
        Some(path) => write_atomic(path, &bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes).map_err(|e| format!("cannot write to stdout: {e}"))?;
        }
    }
    Ok(exit)
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("STUMMEL_THREADS") else { return Ok(()) };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("STUMMEL_THREADS must be a positive integer, got {raw:?}"))?;
    if threads == 0 {
        return Err("STUMMEL_THREADS must be a positive integer, got 0".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| format!("cannot size the worker pool: {e}"))
}

fn require<T>(value: Option<T>, name: &str) -> Result<T, String> {
    value.ok_or_else(|| format!("missing parameter: {name}"))
}

fn require_function(cfg: &RunConfig) -> Result<&TestFunction, String> {
    cfg.function.as_ref().ok_or_else(|| "missing parameter: function".into())
}

fn require_scale(cfg: &RunConfig) -> Result<&ScaleFunction, String> {
    cfg.scale.as_ref().ok_or_else(|| "missing parameter: scale".into())
}

fn resolve_grid(cli: &Cli, cfg: &RunConfig) -> Result<RadialGrid, String> {
    let spec = match (&cli.grid, &cfg.grid) {
        (Some(flag), _) => parse_grid_flag(flag)?,
        (None, Some(spec)) => *spec,
        (None, None) => GridSpec { r_min: 1e-12, r_max: 1e2, points: 48 },
    };
    if !(spec.r_min < spec.r_max) {
        return Err(format!("grid needs r_min < r_max, got {} and {}", spec.r_min, spec.r_max));
    }
    if spec.points < 8 {
        return Err(format!("grid needs at least 8 points, got {}", spec.points));
    }
    RadialGrid::logspace(spec.r_min, spec.r_max, spec.points).map_err(|e| e.to_string())
}

fn parse_grid_flag(raw: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = raw.split(',').collect();
    let [r_min, r_max, points] = parts.as_slice() else {
        return Err(format!("grid flag must be r_min,r_max,points, got {raw:?}"));
    };
    Ok(GridSpec {
        r_min: r_min.trim().parse().map_err(|_| format!("bad grid r_min {r_min:?}"))?,
        r_max: r_max.trim().parse().map_err(|_| format!("bad grid r_max {r_max:?}"))?,
        points: points.trim().parse().map_err(|_| format!("bad grid points {points:?}"))?,
    })
}

/// Builds the space list the `norm` command evaluates: exactly one of
/// `kappa`, `lambda`, `scale` picks the family, none of them means plain
/// Lebesgue. Morrey families report the weak variant alongside the strong
/// one.
fn norm_specs(cfg: &RunConfig) -> Result<Vec<SpaceSpec>, String> {
    let p = require(cfg.p, "p")?;
    match (cfg.kappa, cfg.lambda, &cfg.scale) {
        (Some(kappa), None, None) => Ok(vec![SpaceSpec::Lorentz { kappa, p }]),
        (None, Some(lambda), None) => Ok(vec![
            SpaceSpec::ClassicalMorrey { p, lambda },
            SpaceSpec::ClassicalWeakMorrey { p, lambda },
        ]),
        (None, None, Some(scale)) => Ok(vec![
            SpaceSpec::Morrey { p, scale: scale.clone() },
            SpaceSpec::WeakMorrey { p, scale: scale.clone() },
        ]),
        (None, None, None) => Ok(vec![SpaceSpec::Lebesgue { p }]),
        _ => Err("norm takes at most one of kappa, lambda, scale".into()),
    }
}

fn render(payload: &Payload, format: Format) -> Result<Vec<u8>, String> {
    match format {
        Format::Json => {
            let text = match payload {
                Payload::Conditions(v) => serde_json::to_string_pretty(v),
                Payload::Curve(v) => serde_json::to_string_pretty(v),
                Payload::Norms(v) => serde_json::to_string_pretty(v),
                Payload::Classification(v) => serde_json::to_string_pretty(v),
                Payload::Checklist(v) => serde_json::to_string_pretty(v),
                Payload::Claims(v) => serde_json::to_string_pretty(v),
            }
            .map_err(|e| format!("cannot serialize report: {e}"))?;
            Ok((text + "\n").into_bytes())
        }
        Format::Csv => render_csv(payload),
    }
}

fn render_csv(payload: &Payload) -> Result<Vec<u8>, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let emit = |w: &mut csv::Writer<Vec<u8>>, record: &[String]| {
        w.write_record(record).map_err(|e| format!("cannot write csv record: {e}"))
    };
    match payload {
        Payload::Conditions(report) => {
            emit(&mut w, &headers(&["condition", "status", "constant"]))?;
            let rows: [(&str, _, Option<f64>); 4] = [
                ("integrability", report.integrability, None),
                ("doubling", report.doubling, report.doubling_const),
                ("kernel_decay", report.kernel_decay, report.kernel_decay_const),
                ("right_doubling", report.right_doubling, report.right_doubling_const),
            ];
            for (name, status, constant) in rows {
                emit(
                    &mut w,
                    &[name.into(), enum_str(&status), constant.map(fmt17).unwrap_or_default()],
                )?;
            }
        }
        Payload::Curve(curve) => {
            emit(&mut w, &headers(&["r", "eta"]))?;
            for (r, value) in curve.radii.iter().zip(&curve.values) {
                let cell = match value {
                    IntegralValue::Finite(v) => fmt17(*v),
                    IntegralValue::Divergent => "inf".into(),
                };
                emit(&mut w, &[fmt17(*r), cell])?;
            }
        }
        Payload::Norms(reports) => {
            emit(&mut w, &headers(&["space", "value", "witness_center", "witness_r", "witness_t"]))?;
            for report in reports {
                let center = report
                    .witness
                    .center
                    .as_ref()
                    .map(|c| c.iter().map(|x| fmt17(*x)).collect::<Vec<_>>().join(" "))
                    .unwrap_or_default();
                emit(
                    &mut w,
                    &[
                        report.space.clone(),
                        report.value.finite().map(fmt17).unwrap_or_else(|| "inf".into()),
                        center,
                        report.witness.r.map(fmt17).unwrap_or_default(),
                        report.witness.t.map(fmt17).unwrap_or_default(),
                    ],
                )?;
            }
        }
        Payload::Classification(report) => {
            emit(
                &mut w,
                &headers(&["class", "status", "limit_estimate", "lower_bound", "divergent_at"]),
            )?;
            for verdict in [&report.vanishing, &report.bounded] {
                emit(
                    &mut w,
                    &[
                        verdict.space.clone(),
                        enum_str(&verdict.status),
                        verdict.evidence.limit_estimate.map(fmt17).unwrap_or_default(),
                        verdict.evidence.lower_bound.map(fmt17).unwrap_or_default(),
                        verdict.evidence.divergent_at.map(fmt17).unwrap_or_default(),
                    ],
                )?;
            }
        }
        Payload::Checklist(checklist) => {
            emit(&mut w, &headers(&["item", "status", "certificate"]))?;
            for item in &checklist.items {
                emit(
                    &mut w,
                    &[
                        item.description.clone(),
                        enum_str(&item.status),
                        item.certificate.map(fmt17).unwrap_or_default(),
                    ],
                )?;
            }
            emit(&mut w, &["conclusion".into(), enum_str(&checklist.conclusion), String::new()])?;
        }
        Payload::Claims(rows) => {
            emit(
                &mut w,
                &headers(&[
                    "claim_id",
                    "paper_anchor",
                    "params",
                    "expected",
                    "computed",
                    "agrees",
                    "note",
                    "flagged",
                ]),
            )?;
            for row in rows {
                emit(
                    &mut w,
                    &[
                        row.claim_id.clone(),
                        row.paper_anchor.clone(),
                        serde_json::to_string(&row.params)
                            .map_err(|e| format!("cannot serialize claim params: {e}"))?,
                        row.expected.clone(),
                        row.computed.clone(),
                        row.agrees.to_string(),
                        row.note.clone(),
                        row.flagged.to_string(),
                    ],
                )?;
            }
        }
    }
    w.into_inner().map_err(|e| format!("cannot finish csv: {e}"))
}

fn headers(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// 17 significant digits: lossless round-trip for every double.
fn fmt17(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

/// The serde name of a unit enum variant, for CSV cells.
fn enum_str<T: Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

/// Writes through a sibling temp file so a crash never leaves a partial
/// report at the target path.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), String> {
    let name = path
        .file_name()
        .ok_or_else(|| format!("output path {} has no file name", path.display()))?;
    let dir = match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => parent.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, bytes).map_err(|e| format!("cannot write {}: {e}", tmp.display()))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        format!("cannot rename into {}: {e}", path.display())
    })
}
