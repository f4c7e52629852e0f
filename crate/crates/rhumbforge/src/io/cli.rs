//! Command-line interface.
//!
//! Five subcommands: `surface` exports a triangulated mesh, `loxodrome`
//! integrates one constant-angle course, `arclength` re-measures a stored
//! curve, `verify` runs invariant checks on a surface, and `examples`
//! reproduces the built-in reference courses.
//!
//! Exit codes: 0 on success, 1 on file I/O failure, 2 on validation errors,
//! 3 on numerical failures. Numerical failures print a JSON diagnostic on
//! stderr. The `RHUMBFORGE_TOL` environment variable overrides the default
//! integration tolerance when `--tol` is not given.

use crate::expr::{depends_on_var, evaluate, parse_expression, Interval};
use crate::io::{
    export_curve, export_surface_mesh, load_curve_csv, CurveFormat, ExportError, Scene,
    SceneConfig,
};
use crate::loxodrome::{Branch, Family, LoxodromeSpec, SlopeError, SlopeField};
use crate::numerics::{
    arc_length_with_tolerance, integrate_loxodrome, ArcLengthError, FailureKind, IntegrationError,
    IntegratorConfig, Polyline,
};
use crate::oracle::{example_fixture, ExampleId};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

const TOL_ENV_VAR: &str = "RHUMBFORGE_TOL";

#[derive(Parser)]
#[command(
    name = "rhumbforge",
    version,
    about = "Constant-angle courses on twisted surfaces of revolution",
    after_help = "Scalar flags accept plain numbers or constant expressions such as 'pi/6'.\n\
                  Set RHUMBFORGE_TOL to override the default integration tolerance."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export a surface as a triangulated Wavefront OBJ mesh.
    Surface(SurfaceArgs),
    /// Integrate one constant-angle course and report a summary.
    Loxodrome(LoxodromeArgs),
    /// Re-measure the arc length of a stored CSV curve.
    Arclength(ArclengthArgs),
    /// Run invariant checks on a surface.
    Verify(VerifyArgs),
    /// Reproduce the built-in reference courses.
    Examples(ExamplesArgs),
}

/// Surface definition, either a JSON scene file or inline flags.
#[derive(Args)]
struct SurfaceSource {
    /// Scene configuration file (JSON).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Ring offset a.
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    a: Option<String>,

    /// Twist rate b.
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    b: Option<String>,

    /// Profile component f(y).
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    f: Option<String>,

    /// Profile component g(y).
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    g: Option<String>,

    /// Profile domain "LO,HI".
    #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
    y_domain: Option<String>,

    /// Sweep interval "LO,HI"; defaults to two full turns.
    #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
    x_domain: Option<String>,
}

#[derive(Args)]
struct SurfaceArgs {
    #[command(flatten)]
    source: SurfaceSource,

    /// Grid resolution along x (default 64 or the config value).
    #[arg(long, value_name = "N")]
    nx: Option<usize>,

    /// Grid resolution along y (default 64 or the config value).
    #[arg(long, value_name = "N")]
    ny: Option<usize>,

    /// Mesh output path; without it the mesh is written to stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Course branch; accepted for interface uniformity, meshes ignore it.
    #[arg(long, value_name = "plus|minus")]
    branch: Option<String>,

    /// Tolerance; accepted for interface uniformity, meshes ignore it.
    #[arg(long, value_name = "TOL")]
    tol: Option<String>,
}

#[derive(Args)]
struct LoxodromeArgs {
    #[command(flatten)]
    source: SurfaceSource,

    /// Course index into the configuration's loxodrome list.
    #[arg(long, value_name = "N")]
    index: Option<usize>,

    /// Family the course cuts: meridian or parallel.
    #[arg(long, value_name = "FAMILY")]
    family: Option<String>,

    /// Constant cut angle in radians, strictly between 0 and pi.
    #[arg(long, value_name = "ANGLE", allow_hyphen_values = true)]
    angle: Option<String>,

    /// Start point "X,Y" in surface coordinates.
    #[arg(long, value_name = "X,Y", allow_hyphen_values = true)]
    start: Option<String>,

    /// Span "LO,HI" of the integration parameter.
    #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
    span: Option<String>,

    /// Slope branch (default minus).
    #[arg(long, value_name = "plus|minus")]
    branch: Option<String>,

    /// Integration tolerance (absolute and relative).
    #[arg(long, value_name = "TOL")]
    tol: Option<String>,

    /// Curve output path.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Curve output format (default csv).
    #[arg(long, value_name = "csv|obj")]
    format: Option<String>,
}

#[derive(Args)]
struct ArclengthArgs {
    #[command(flatten)]
    source: SurfaceSource,

    /// CSV curve to re-measure.
    #[arg(long, value_name = "PATH")]
    curve: PathBuf,

    /// Course index into the configuration's loxodrome list.
    #[arg(long, value_name = "N")]
    index: Option<usize>,

    /// Family the course cuts: meridian or parallel.
    #[arg(long, value_name = "FAMILY")]
    family: Option<String>,

    /// Constant cut angle in radians.
    #[arg(long, value_name = "ANGLE", allow_hyphen_values = true)]
    angle: Option<String>,

    /// Course start "X,Y"; enables branch-fold detection at the start.
    #[arg(long, value_name = "X,Y", allow_hyphen_values = true)]
    start: Option<String>,

    /// Slope branch (default minus).
    #[arg(long, value_name = "plus|minus")]
    branch: Option<String>,

    /// Quadrature tolerance for the re-measurement.
    #[arg(long, value_name = "TOL")]
    tol: Option<String>,

    /// Write the summary JSON here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: SurfaceSource,

    /// Random samples per check.
    #[arg(long, value_name = "N", default_value_t = 100)]
    samples: usize,

    /// RNG seed.
    #[arg(long, value_name = "SEED", default_value_t = 7)]
    seed: u64,

    /// Branch for the probe course (default minus).
    #[arg(long, value_name = "plus|minus")]
    branch: Option<String>,

    /// Integration tolerance for the probe course.
    #[arg(long, value_name = "TOL")]
    tol: Option<String>,

    /// Write the report JSON here in addition to the check lines.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExamplesArgs {
    /// Restrict the table to one example id (1, 2, or 3).
    #[arg(long, value_name = "ID")]
    id: Option<String>,

    /// Branch; accepted for interface uniformity, fixtures pin their own.
    #[arg(long, value_name = "plus|minus")]
    branch: Option<String>,

    /// Integration tolerance override for the re-integration.
    #[arg(long, value_name = "TOL")]
    tol: Option<String>,

    /// Write the table here in addition to stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

enum CliError {
    Validation(String),
    Io(String),
    Numerical(serde_json::Value),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 1,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(format!("could not write output: {err}"))
    }
}

fn validation(message: impl Into<String>) -> CliError {
    CliError::Validation(message.into())
}

/// Parses and runs one invocation, returning the process exit code.
///
/// Output is written to the supplied streams, which makes the interface
/// testable without spawning a process.
pub fn run_cli<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let rendered = err.render().to_string();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{rendered}");
                    2
                }
            };
        }
    };
    let result = match cli.command {
        Command::Surface(args) => run_surface(args, stdout),
        Command::Loxodrome(args) => run_loxodrome(args, stdout),
        Command::Arclength(args) => run_arclength(args, stdout),
        Command::Verify(args) => run_verify(args, stdout),
        Command::Examples(args) => run_examples(args, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            match &err {
                CliError::Validation(message) | CliError::Io(message) => {
                    let _ = writeln!(stderr, "error: {message}");
                }
                CliError::Numerical(diagnostic) => {
                    let text = serde_json::to_string_pretty(diagnostic)
                        .unwrap_or_else(|_| "{}".to_string());
                    let _ = writeln!(stderr, "{text}");
                }
            }
            err.exit_code()
        }
    }
}

/// Parses a scalar flag: a plain number, or a constant expression.
fn parse_scalar(label: &str, text: &str) -> Result<f64, CliError> {
    let value = if let Ok(number) = text.trim().parse::<f64>() {
        number
    } else {
        let expr = parse_expression(text)
            .map_err(|err| validation(format!("invalid {label} '{text}': {err}")))?;
        if depends_on_var(&expr) {
            return Err(validation(format!(
                "{label} must be constant, but '{text}' references y"
            )));
        }
        evaluate(&expr, 0.0)
            .map_err(|err| validation(format!("invalid {label} '{text}': {err}")))?
    };
    if !value.is_finite() {
        return Err(validation(format!("{label} '{text}' is not finite")));
    }
    Ok(value)
}

fn parse_pair(label: &str, text: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(validation(format!(
            "invalid {label} '{text}': expected two comma-separated values"
        )));
    }
    Ok((
        parse_scalar(label, parts[0])?,
        parse_scalar(label, parts[1])?,
    ))
}

fn parse_interval_flag(label: &str, text: &str) -> Result<Interval, CliError> {
    let (lo, hi) = parse_pair(label, text)?;
    Interval::new(lo, hi).map_err(|err| validation(format!("invalid {label} '{text}': {err}")))
}

fn parse_branch(text: Option<&str>) -> Result<Branch, CliError> {
    match text {
        None => Ok(Branch::default()),
        Some(word) => word.parse().map_err(validation),
    }
}

fn parse_family(text: &str) -> Result<Family, CliError> {
    text.parse().map_err(validation)
}

/// Tolerance from the `--tol` flag, else `RHUMBFORGE_TOL`, else `None`.
fn resolve_tolerance(flag: Option<&str>) -> Result<Option<f64>, CliError> {
    let (label, text) = match flag {
        Some(text) => ("--tol", text.to_string()),
        None => match std::env::var(TOL_ENV_VAR) {
            Ok(text) => (TOL_ENV_VAR, text),
            Err(_) => return Ok(None),
        },
    };
    let value = parse_scalar(label, &text)?;
    if value <= 0.0 {
        return Err(validation(format!("{label} must be positive, got {value}")));
    }
    Ok(Some(value))
}

fn apply_tolerance(config: &mut IntegratorConfig, tol: Option<f64>) {
    if let Some(tol) = tol {
        config.abs_tol = tol;
        config.rel_tol = tol;
    }
}

impl SurfaceSource {
    fn inline_flags_present(&self) -> bool {
        self.a.is_some()
            || self.b.is_some()
            || self.f.is_some()
            || self.g.is_some()
            || self.y_domain.is_some()
            || self.x_domain.is_some()
    }

    /// Builds the scene from the config file or from inline flags.
    fn resolve(&self) -> Result<Scene, CliError> {
        if let Some(path) = &self.config {
            if self.inline_flags_present() {
                return Err(validation(
                    "--config cannot be combined with inline surface flags",
                ));
            }
            let config = SceneConfig::from_file(path).map_err(|err| match err {
                crate::io::ConfigError::Io { path, source } => {
                    CliError::Io(format!("could not read {}: {source}", path.display()))
                }
                other => validation(other.to_string()),
            })?;
            return config.build().map_err(|err| validation(err.to_string()));
        }

        let mut missing = Vec::new();
        for (flag, value) in [
            ("--a", &self.a),
            ("--b", &self.b),
            ("--f", &self.f),
            ("--g", &self.g),
            ("--y-domain", &self.y_domain),
        ] {
            if value.is_none() {
                missing.push(flag);
            }
        }
        if !missing.is_empty() {
            return Err(validation(format!(
                "missing surface flags: {} (or pass --config)",
                missing.join(", ")
            )));
        }

        let a = parse_scalar("--a", self.a.as_deref().unwrap())?;
        let b = parse_scalar("--b", self.b.as_deref().unwrap())?;
        let y_domain = parse_interval_flag("--y-domain", self.y_domain.as_deref().unwrap())?;
        let x_domain = self
            .x_domain
            .as_deref()
            .map(|text| parse_interval_flag("--x-domain", text))
            .transpose()?;
        let surface_config = crate::io::SurfaceConfig {
            a,
            b,
            f: self.f.clone().unwrap(),
            g: self.g.clone().unwrap(),
            y_domain,
            x_domain,
        };
        let surface = surface_config
            .build()
            .map_err(|err| validation(err.to_string()))?;
        Ok(Scene {
            surface,
            specs: Vec::new(),
            export: crate::io::ExportConfig::default(),
        })
    }
}

fn slope_cause_token(err: &SlopeError) -> &'static str {
    match err {
        SlopeError::Irregular { .. } => "irregular_point",
        SlopeError::SingularDenominator { .. } => "singular_denominator",
        SlopeError::Eval(crate::expr::EvalError::Domain { .. }) => "function_domain",
        SlopeError::Eval(crate::expr::EvalError::NonFinite) => "non_finite",
        SlopeError::Eval(crate::expr::EvalError::OutOfDomain { .. }) => "out_of_domain",
    }
}

fn failure_kind_token(kind: &FailureKind) -> &'static str {
    match kind {
        FailureKind::InvalidConfig => "invalid_config",
        FailureKind::StepUnderflow { .. } => "step_underflow",
        FailureKind::SingularityHit { .. } => "singularity_hit",
        FailureKind::DomainExit { .. } => "domain_exit",
        FailureKind::MaxStepsExceeded { .. } => "max_steps_exceeded",
    }
}

fn integration_diagnostic(err: &IntegrationError) -> serde_json::Value {
    let mut diagnostic = json!({
        "error": "integration_failure",
        "kind": failure_kind_token(&err.kind),
        "message": err.to_string(),
        "partial_samples": err.partial.len(),
    });
    let fields = diagnostic.as_object_mut().unwrap();
    match err.kind {
        FailureKind::StepUnderflow { u } => {
            fields.insert("u".into(), json!(u));
        }
        FailureKind::SingularityHit { u, v } | FailureKind::DomainExit { u, v } => {
            fields.insert("u".into(), json!(u));
            fields.insert("v".into(), json!(v));
        }
        _ => {}
    }
    if let Some(cause) = &err.cause {
        fields.insert("cause".into(), json!(slope_cause_token(cause)));
        fields.insert("cause_message".into(), json!(cause.to_string()));
    }
    diagnostic
}

fn numerical(err: &IntegrationError) -> CliError {
    CliError::Numerical(integration_diagnostic(err))
}

fn write_json(
    value: &serde_json::Value,
    out_path: Option<&PathBuf>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|err| CliError::Io(format!("could not serialize summary: {err}")))?;
    if let Some(path) = out_path {
        std::fs::write(path, format!("{text}\n")).map_err(|err| {
            CliError::Io(format!("could not write {}: {err}", path.display()))
        })?;
    }
    writeln!(stdout, "{text}")?;
    Ok(())
}

fn run_surface(args: SurfaceArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    parse_branch(args.branch.as_deref())?;
    if let Some(text) = args.tol.as_deref() {
        parse_scalar("--tol", text)?;
    }
    let scene = args.source.resolve()?;
    let nx = args.nx.unwrap_or(scene.export.nx);
    let ny = args.ny.unwrap_or(scene.export.ny);
    if nx < 2 || ny < 2 {
        return Err(validation(format!(
            "mesh resolution {nx} x {ny} is too coarse: need at least 2 x 2"
        )));
    }
    let out_path = args.out.or_else(|| scene.export.mesh_path.clone());
    match out_path {
        Some(path) => {
            export_surface_mesh(&scene.surface, nx, ny, &path).map_err(|err| match err {
                ExportError::File { path, source } => {
                    CliError::Io(format!("could not write {}: {source}", path.display()))
                }
                other => validation(other.to_string()),
            })?;
        }
        None => {
            let mut buffer = Vec::new();
            crate::io::write_surface_mesh(&scene.surface, nx, ny, &mut buffer)
                .map_err(|err| validation(err.to_string()))?;
            stdout.write_all(&buffer)?;
        }
    }
    Ok(())
}

/// Course parameters after merging config entries with inline flags.
struct CourseRequest {
    family: Family,
    angle: f64,
    branch: Branch,
    start: Option<(f64, f64)>,
    span: Option<Interval>,
    config: IntegratorConfig,
}

fn resolve_course(
    scene: &Scene,
    index: Option<usize>,
    family: Option<&str>,
    angle: Option<&str>,
    start: Option<&str>,
    span: Option<&str>,
    branch: Option<&str>,
    tol: Option<&str>,
) -> Result<CourseRequest, CliError> {
    let base: Option<&LoxodromeSpec> = if scene.specs.is_empty() {
        if let Some(index) = index {
            return Err(validation(format!(
                "--index {index} given, but the configuration lists no courses"
            )));
        }
        None
    } else {
        let index = index.unwrap_or(0);
        Some(scene.specs.get(index).ok_or_else(|| {
            validation(format!(
                "--index {index} is out of range: the configuration lists {} course(s)",
                scene.specs.len()
            ))
        })?)
    };

    let family = match family {
        Some(text) => parse_family(text)?,
        None => base
            .map(|spec| spec.family())
            .ok_or_else(|| validation("missing --family (or pass --config with courses)"))?,
    };
    let angle = match angle {
        Some(text) => parse_scalar("--angle", text)?,
        None => base
            .map(|spec| spec.angle())
            .ok_or_else(|| validation("missing --angle (or pass --config with courses)"))?,
    };
    let branch = match branch {
        Some(text) => text.parse().map_err(validation)?,
        None => base.map(|spec| spec.branch()).unwrap_or_default(),
    };
    let start = match start {
        Some(text) => Some(parse_pair("--start", text)?),
        None => base.map(|spec| spec.start()),
    };
    let span = match span {
        Some(text) => Some(parse_interval_flag("--span", text)?),
        None => base.map(|spec| spec.span()),
    };
    let mut config = base
        .map(|spec| spec.config().clone())
        .unwrap_or_default();
    apply_tolerance(&mut config, resolve_tolerance(tol)?);
    Ok(CourseRequest {
        family,
        angle,
        branch,
        start,
        span,
        config,
    })
}

/// Deviation of a measured cut angle from the requested one, folding the
/// supplement: the oriented tangent may realize either angle.
fn angle_deviation(measured: f64, angle: f64) -> f64 {
    (measured - angle)
        .abs()
        .min((std::f64::consts::PI - measured - angle).abs())
}

/// Largest deviation of the measured cut angle from the requested one over
/// the polyline samples. Samples where the tangent degenerates (a branch
/// fold) are skipped.
fn max_angle_deviation(field: &SlopeField<'_>, curve: &Polyline, angle: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for sample in curve.samples() {
        if let Ok(measured) = field.cut_angle(sample.u, sample.v) {
            worst = worst.max(angle_deviation(measured, angle));
        }
    }
    worst
}

fn run_loxodrome(args: LoxodromeArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let scene = args.source.resolve()?;
    let request = resolve_course(
        &scene,
        args.index,
        args.family.as_deref(),
        args.angle.as_deref(),
        args.start.as_deref(),
        args.span.as_deref(),
        args.branch.as_deref(),
        args.tol.as_deref(),
    )?;
    let start = request
        .start
        .ok_or_else(|| validation("missing --start (or pass --config with courses)"))?;
    let span = request
        .span
        .ok_or_else(|| validation("missing --span (or pass --config with courses)"))?;
    let format = match args.format.as_deref() {
        None => CurveFormat::default(),
        Some(text) => text.parse().map_err(validation)?,
    };

    let spec = LoxodromeSpec::new(
        request.family,
        request.angle,
        request.branch,
        start,
        span,
        request.config,
    )
    .map_err(|err| validation(err.to_string()))?;

    let run = integrate_loxodrome(&scene.surface, &spec).map_err(|err| numerical(&err))?;
    let curve = &run.polyline;

    let field = SlopeField::for_spec(&scene.surface, &spec).map_err(|err| {
        CliError::Numerical(json!({
            "error": "integration_failure",
            "kind": "singularity_hit",
            "cause": slope_cause_token(&err),
            "message": err.to_string(),
        }))
    })?;
    let deviation = max_angle_deviation(&field, curve, spec.angle());

    if let Some(path) = &args.out {
        export_curve(curve, path, format).map_err(|err| match err {
            ExportError::File { path, source } => {
                CliError::Io(format!("could not write {}: {source}", path.display()))
            }
            other => CliError::Io(other.to_string()),
        })?;
    }

    let first = curve.first();
    let last = curve.last();
    let summary = json!({
        "family": spec.family().to_string(),
        "angle": spec.angle(),
        "branch": spec.branch().to_string(),
        "start": [spec.start().0, spec.start().1],
        "span": [spec.span().lo(), spec.span().hi()],
        "samples": curve.len(),
        "endpoints": {
            "u": [first.u, last.u],
            "v": [first.v, last.v],
        },
        "arc_length": curve.total_length(),
        "max_angle_deviation": deviation,
        "error_estimate": run.err_estimate,
        "steps": run.steps,
        "rejected_steps": run.rejected_steps,
        "fold_at": field.fold_at(),
        "curve_written": args.out.as_ref().map(|p| p.display().to_string()),
    });
    write_json(&summary, None, stdout)
}

fn run_arclength(args: ArclengthArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let scene = args.source.resolve()?;
    let request = resolve_course(
        &scene,
        args.index,
        args.family.as_deref(),
        args.angle.as_deref(),
        args.start.as_deref(),
        None,
        args.branch.as_deref(),
        args.tol.as_deref(),
    )?;

    let curve = load_curve_csv(&args.curve).map_err(|err| match err {
        crate::io::CurveReadError::Io { path, source } => {
            CliError::Io(format!("could not read {}: {source}", path.display()))
        }
        other => validation(other.to_string()),
    })?;

    let field = match request.start {
        Some(start) => {
            let start_u = match request.family {
                Family::Meridian => start.0,
                Family::Parallel => start.1,
            };
            let lo = curve.first().u.min(start_u);
            let mut hi = curve.last().u.max(start_u);
            if hi <= lo {
                hi = lo + (1.0 + lo.abs()) * 1e-9;
            }
            let span = Interval::new(lo, hi).map_err(|err| validation(err.to_string()))?;
            let spec = LoxodromeSpec::new(
                request.family,
                request.angle,
                request.branch,
                start,
                span,
                request.config.clone(),
            )
            .map_err(|err| validation(err.to_string()))?;
            SlopeField::for_spec(&scene.surface, &spec).map_err(|err| {
                CliError::Numerical(json!({
                    "error": "arclength_failure",
                    "cause": slope_cause_token(&err),
                    "message": err.to_string(),
                }))
            })?
        }
        None => SlopeField::plain(
            &scene.surface,
            request.family,
            request.angle,
            request.branch,
        ),
    };

    let tol = resolve_tolerance(args.tol.as_deref())?.unwrap_or(1e-10);
    let measured = arc_length_with_tolerance(&field, &curve, tol).map_err(|err| {
        let (cause, message) = match &err {
            ArcLengthError::Slope(slope) => (Some(slope_cause_token(slope)), err.to_string()),
            ArcLengthError::NonConvergence { .. } => (None, err.to_string()),
        };
        CliError::Numerical(json!({
            "error": "arclength_failure",
            "cause": cause,
            "message": message,
        }))
    })?;

    let stored = curve.total_length();
    let difference = (measured - stored).abs();
    let summary = json!({
        "curve": args.curve.display().to_string(),
        "samples": curve.len(),
        "stored_length": stored,
        "measured_length": measured,
        "difference": difference,
        "relative_difference": difference / measured.abs().max(f64::EPSILON),
    });
    write_json(&summary, args.out.as_ref(), stdout)
}

struct CheckOutcome {
    name: &'static str,
    passed: bool,
    worst: f64,
    threshold: f64,
    detail: String,
}

fn report_check(
    outcome: &CheckOutcome,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let status = if outcome.passed { "PASS" } else { "FAIL" };
    writeln!(
        stdout,
        "{status} {name}: worst {worst:.3e} vs threshold {threshold:.0e} ({detail})",
        name = outcome.name,
        worst = outcome.worst,
        threshold = outcome.threshold,
        detail = outcome.detail,
    )?;
    Ok(())
}

fn run_verify(args: VerifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if args.samples == 0 {
        return Err(validation("--samples must be at least 1"));
    }
    let scene = args.source.resolve()?;
    let surface = &scene.surface;
    let branch = parse_branch(args.branch.as_deref())?;
    let tol = resolve_tolerance(args.tol.as_deref())?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);

    let x_domain = surface.x_domain();
    let y_domain = surface.y_domain();
    let sample_x = |rng: &mut ChaCha8Rng| x_domain.lerp(rng.random_range(0.02..0.98));
    let sample_y = |rng: &mut ChaCha8Rng| y_domain.lerp(rng.random_range(0.02..0.98));

    let mut checks = Vec::new();

    // The closed-form metric coefficients must agree with inner products of
    // the tangent vectors.
    {
        let mut worst: f64 = 0.0;
        let threshold = 1e-9;
        for _ in 0..args.samples {
            let (x, y) = (sample_x(&mut rng), sample_y(&mut rng));
            let metric = surface
                .metric(x, y)
                .map_err(|err| validation(format!("metric evaluation failed: {err}")))?;
            let (tx, ty) = surface
                .eval_partials(x, y)
                .map_err(|err| validation(format!("partial evaluation failed: {err}")))?;
            let scale = 1.0f64.max(metric.g11.abs().max(metric.g22.abs()));
            worst = worst
                .max((metric.g11 - tx.inner(tx)).abs() / scale)
                .max((metric.g12 - tx.inner(ty)).abs() / scale)
                .max((metric.g22 - ty.inner(ty)).abs() / scale);
        }
        checks.push(CheckOutcome {
            name: "metric-equivalence",
            passed: worst <= threshold,
            worst,
            threshold,
            detail: format!("{} samples", args.samples),
        });
    }

    // Tangent vectors must agree with central differences of the embedding.
    {
        let mut worst: f64 = 0.0;
        let threshold = 1e-5;
        let h = 1e-6;
        for _ in 0..args.samples {
            let (x, y) = (sample_x(&mut rng), sample_y(&mut rng));
            let (tx, ty) = surface
                .eval_partials(x, y)
                .map_err(|err| validation(format!("partial evaluation failed: {err}")))?;
            let eval = |x: f64, y: f64| {
                surface
                    .eval_point(x, y)
                    .map_err(|err| validation(format!("point evaluation failed: {err}")))
            };
            let fd_x = (eval(x + h, y)? - eval(x - h, y)?) * (0.5 / h);
            let fd_y = (eval(x, y + h)? - eval(x, y - h)?) * (0.5 / h);
            let scale = 1.0f64.max(tx.norm().max(ty.norm()));
            worst = worst
                .max((fd_x - tx).norm() / scale)
                .max((fd_y - ty).norm() / scale);
        }
        checks.push(CheckOutcome {
            name: "tangent-differences",
            passed: worst <= threshold,
            worst,
            threshold,
            detail: format!("{} samples, step {h:.0e}", args.samples),
        });
    }

    // The slope roots must reproduce the requested cut angle.
    {
        let mut worst: f64 = 0.0;
        let threshold = 1e-9;
        let mut tested = 0usize;
        for _ in 0..args.samples {
            let (x, y) = (sample_x(&mut rng), sample_y(&mut rng));
            let angle = rng.random_range(0.1..std::f64::consts::PI - 0.1);
            for family in [Family::Meridian, Family::Parallel] {
                for branch in [Branch::Plus, Branch::Minus] {
                    let field = SlopeField::plain(surface, family, angle, branch);
                    let (u, v) = match family {
                        Family::Meridian => (x, y),
                        Family::Parallel => (y, x),
                    };
                    match field.cut_angle(u, v) {
                        Ok(measured) => {
                            worst = worst.max(angle_deviation(measured, angle));
                            tested += 1;
                        }
                        Err(SlopeError::SingularDenominator { .. }) => {}
                        Err(err) => {
                            return Err(validation(format!("slope evaluation failed: {err}")))
                        }
                    }
                }
            }
        }
        checks.push(CheckOutcome {
            name: "root-residuals",
            passed: worst <= threshold,
            worst,
            threshold,
            detail: format!("{tested} family/branch cases"),
        });
    }

    // A short probe course must hold its angle everywhere.
    {
        let threshold = 1e-6;
        let angle = std::f64::consts::FRAC_PI_4;
        let lo = x_domain.lerp(0.35);
        let hi = x_domain.lerp(0.65);
        let span = Interval::new(lo, hi).map_err(|err| validation(err.to_string()))?;
        let start = (lo, y_domain.midpoint());
        let mut config = IntegratorConfig::default();
        apply_tolerance(&mut config, tol);
        let spec = LoxodromeSpec::new(Family::Meridian, angle, branch, start, span, config)
            .map_err(|err| validation(err.to_string()))?;
        // A probe course that runs into a singularity or the domain edge
        // still witnesses angle constancy on the portion it covered.
        let (curve, note) = match integrate_loxodrome(surface, &spec) {
            Ok(run) => (run.polyline, String::new()),
            Err(err) if err.partial.len() >= 8 => {
                let note = format!(", stopped early: {}", failure_kind_token(&err.kind));
                let curve = Polyline::new(err.partial.clone()).map_err(|_| numerical(&err))?;
                (curve, note)
            }
            Err(err) => return Err(numerical(&err)),
        };
        let field = SlopeField::for_spec(surface, &spec)
            .map_err(|err| validation(format!("slope field rejected the start: {err}")))?;
        let worst = max_angle_deviation(&field, &curve, angle);
        checks.push(CheckOutcome {
            name: "angle-constancy",
            passed: worst <= threshold,
            worst,
            threshold,
            detail: format!("{} integrated samples{note}", curve.len()),
        });
    }

    // An untwisted surface must have a diagonal metric and the classical
    // slope.
    if surface.b() == 0.0 {
        let mut worst: f64 = 0.0;
        let threshold = 1e-12;
        for _ in 0..args.samples {
            let (x, y) = (sample_x(&mut rng), sample_y(&mut rng));
            let angle = rng.random_range(0.1..std::f64::consts::PI - 0.1);
            let metric = surface
                .metric(x, y)
                .map_err(|err| validation(format!("metric evaluation failed: {err}")))?;
            worst = worst.max(metric.g12.abs());
            let field = SlopeField::plain(surface, Family::Meridian, angle, Branch::Minus);
            if let Ok(slope) = field.slope(x, y) {
                let classical = (metric.g11 / metric.g22).sqrt() * angle.tan();
                let scale = 1.0f64.max(classical.abs());
                worst = worst.max((slope - classical).abs() / scale);
            }
        }
        checks.push(CheckOutcome {
            name: "untwisted-reduction",
            passed: worst <= threshold,
            worst,
            threshold,
            detail: format!("{} samples", args.samples),
        });
    }

    for outcome in &checks {
        report_check(outcome, stdout)?;
    }
    let all_passed = checks.iter().all(|outcome| outcome.passed);
    let report = json!({
        "seed": args.seed,
        "samples": args.samples,
        "passed": all_passed,
        "checks": checks.iter().map(|outcome| {
            json!({
                "name": outcome.name,
                "passed": outcome.passed,
                "worst": outcome.worst,
                "threshold": outcome.threshold,
            })
        }).collect::<Vec<_>>(),
    });
    if let Some(path) = &args.out {
        let text = serde_json::to_string_pretty(&report)
            .map_err(|err| CliError::Io(format!("could not serialize report: {err}")))?;
        std::fs::write(path, format!("{text}\n")).map_err(|err| {
            CliError::Io(format!("could not write {}: {err}", path.display()))
        })?;
    }
    if all_passed {
        Ok(())
    } else {
        Err(CliError::Numerical(report))
    }
}

fn run_examples(args: ExamplesArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    parse_branch(args.branch.as_deref())?;
    let tol = resolve_tolerance(args.tol.as_deref())?;
    let ids: Vec<ExampleId> = match args.id.as_deref() {
        None => ExampleId::ALL.to_vec(),
        Some(text) => vec![text
            .parse()
            .map_err(|err: String| validation(err))?],
    };

    let mut lines = Vec::new();
    lines.push(format!(
        "{:<2}  {:>14}  {:>14}  {:>14}  {:>14}  {:>14}  {:>14}  {:<6}",
        "id",
        "v(lo)",
        "closed v(lo)",
        "v(hi)",
        "closed v(hi)",
        "arc length",
        "reference",
        "status"
    ));

    let mut all_passed = true;
    let mut failures = Vec::new();
    for id in ids {
        let example = example_fixture(id);
        let mut spec = example.spec().clone();
        if let Some(tol) = tol {
            let mut config = spec.config().clone();
            apply_tolerance(&mut config, Some(tol));
            spec = spec.with_config(config);
        }
        let run =
            integrate_loxodrome(example.surface(), &spec).map_err(|err| numerical(&err))?;
        let curve = &run.polyline;

        let (v_lo, v_hi) = (curve.first().v, curve.last().v);
        let closed_lo = example.closed_form(curve.first().u);
        let closed_hi = example.closed_form(curve.last().u);
        let arc = curve.total_length();
        let (ref_lo, ref_hi) = example.reference_endpoints();

        let endpoints_ok = example.endpoint_tolerance().admits(ref_lo, v_lo)
            && example.endpoint_tolerance().admits(ref_hi, v_hi);
        let arc_ok = example
            .arc_length_tolerance()
            .admits(example.reference_arc_length(), arc);
        let passed = endpoints_ok && arc_ok;
        all_passed &= passed;
        if !passed {
            failures.push(json!({
                "id": id.to_string(),
                "endpoints": [v_lo, v_hi],
                "reference_endpoints": [ref_lo, ref_hi],
                "arc_length": arc,
                "reference_arc_length": example.reference_arc_length(),
            }));
        }

        lines.push(format!(
            "{:<2}  {:>14.9}  {:>14.9}  {:>14.9}  {:>14.9}  {:>14.9}  {:>14.9}  {:<6}",
            id.to_string(),
            v_lo,
            closed_lo,
            v_hi,
            closed_hi,
            arc,
            example.reference_arc_length(),
            if passed { "PASS" } else { "FAIL" },
        ));
    }

    let table = lines.join("\n");
    writeln!(stdout, "{table}")?;
    if let Some(path) = &args.out {
        std::fs::write(path, format!("{table}\n")).map_err(|err| {
            CliError::Io(format!("could not write {}: {err}", path.display()))
        })?;
    }

    if all_passed {
        Ok(())
    } else {
        Err(CliError::Numerical(json!({
            "error": "examples_failure",
            "message": "one or more reference courses missed their tolerance windows",
            "failures": failures,
        })))
    }
}
