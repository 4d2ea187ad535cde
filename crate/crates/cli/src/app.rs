//! Argument parsing and command dispatch for the `disclination` binary.

use crate::classify_cmd::run_classify;
use crate::error::{CliError, CliResult, EXIT_CHECK, EXIT_OK, EXIT_USAGE};
use crate::expr::parse_constant;
use crate::profile_spec::{ProfileKind, ProfileSpec};
use crate::sample::{sample_field, OutputFormat, SampleGridSpec, Section};
use crate::transport_cmd::{run_transport, PathSpec};
use crate::verify::run_verify;
use clap::{Args, Parser, Subcommand, ValueEnum};
use disclination_core::nfield::Construction;
use disclination_core::Vec3;
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "disclination",
    version,
    about = "Point disclinations from flat SO(3) connections"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the flatness, ODE, unit-norm, covariant-derivative and transport checks.
    Verify(VerifyArgs),
    /// Sample the director field on a grid and export CSV or JSON.
    Sample(SampleArgs),
    /// Parallel-transport the frame along a path and compare with the closed form.
    Transport(TransportArgs),
    /// Classify the field at the origin.
    Classify(ClassifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileName {
    Zero,
    ExpDecay,
    Gauss,
    Rational,
    Custom,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    /// Profile family; defaults to `custom` when --expr is given, else `exp-decay`.
    #[arg(long, value_enum)]
    pub profile: Option<ProfileName>,
    /// Amplitude f(0) of the preset families (constant expression, e.g. `pi/2`).
    #[arg(long, default_value = "pi/2", allow_hyphen_values = true)]
    pub amplitude: String,
    /// Decay rate of exp-decay and gauss.
    #[arg(long, default_value = "1")]
    pub rate: String,
    /// Length scale of rational, f = a / (1 + r/s).
    #[arg(long, default_value = "1")]
    pub scale: String,
    /// Custom profile f(r), e.g. `pi*exp(-r^2)`.
    #[arg(long, allow_hyphen_values = true)]
    pub expr: Option<String>,
    /// Declared f(inf) of a custom profile.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub f_infinity: String,
}

impl ProfileArgs {
    pub fn spec(&self) -> CliResult<ProfileSpec> {
        let name = match (self.profile, &self.expr) {
            (None, Some(_)) => ProfileName::Custom,
            (None, None) => ProfileName::ExpDecay,
            (Some(ProfileName::Custom), None) => {
                return Err(CliError::Usage("--profile custom needs --expr".into()));
            }
            (Some(p), Some(_)) if p != ProfileName::Custom => {
                return Err(CliError::Usage("--expr only applies to --profile custom".into()));
            }
            (Some(p), _) => p,
        };
        let amplitude = || parse_constant(&self.amplitude);
        let rate = || parse_constant(&self.rate);
        let kind = match name {
            ProfileName::Zero => ProfileKind::Zero,
            ProfileName::ExpDecay => ProfileKind::ExpDecay {
                amplitude: amplitude()?,
                rate: rate()?,
            },
            ProfileName::Gauss => ProfileKind::Gauss {
                amplitude: amplitude()?,
                rate: rate()?,
            },
            ProfileName::Rational => ProfileKind::Rational {
                amplitude: amplitude()?,
                scale: parse_constant(&self.scale)?,
            },
            ProfileName::Custom => ProfileKind::Custom {
                expression: self.expr.clone().unwrap_or_default(),
                f_infinity: parse_constant(&self.f_infinity)?,
            },
        };
        Ok(ProfileSpec::new(kind))
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random points per check.
    #[arg(long, default_value_t = 100)]
    pub npoints: usize,
    /// Multiply the profile derivative by this factor (negative control).
    #[arg(long, default_value_t = 1.0)]
    pub derivative_scale: f64,
    /// Also write the JSON report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SectionArg {
    X2zero,
    X3zero,
    Volume,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstructionArg {
    SpherSym,
    Hedgehog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, value_enum, default_value_t = SectionArg::X2zero)]
    pub section: SectionArg,
    /// Half-width of the grid.
    #[arg(long, default_value_t = 3.0)]
    pub extent: f64,
    /// Points per axis.
    #[arg(long, default_value_t = 21)]
    pub resolution: usize,
    /// Grid points closer than this to the origin are dropped.
    #[arg(long, default_value_t = 0.05)]
    pub exclusion: f64,
    #[arg(long, value_enum, default_value_t = ConstructionArg::SpherSym)]
    pub construction: ConstructionArg,
    #[arg(long)]
    pub out: PathBuf,
    /// Output format; inferred from the --out extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathKind {
    Ray,
    Polyline,
    Arc,
}

#[derive(Debug, Args)]
pub struct TransportArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Start point `x1,x2,x3` (end point for a ray).
    #[arg(long, allow_hyphen_values = true)]
    pub from: String,
    #[arg(long, value_enum, default_value_t = PathKind::Ray)]
    pub path: PathKind,
    /// Polyline vertices after --from, `x1,x2,x3;x1,x2,x3;...`.
    #[arg(long, allow_hyphen_values = true)]
    pub vertices: Option<String>,
    /// End point of an arc.
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<String>,
    /// Also write the JSON report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Seed for the sampled directions.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the JSON report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `x1,x2,x3`; each component may be a constant expression.
pub fn parse_point(s: &str) -> CliResult<Vec3> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!("expected `x1,x2,x3`, got `{s}`")));
    }
    Ok(Vec3::new(
        parse_constant(parts[0].trim())?,
        parse_constant(parts[1].trim())?,
        parse_constant(parts[2].trim())?,
    ))
}

fn emit_json<T: Serialize>(report: &T, out: Option<&Path>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| CliError::io("serializing report", e.into()))?;
    text.push('\n');
    if let Some(path) = out {
        std::fs::write(path, &text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    }
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(text.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|e| CliError::io("writing to stdout", e))
}

#[derive(Serialize)]
struct SampleSummary<'a> {
    out: String,
    format: &'static str,
    profile: &'a str,
    records: usize,
    skipped: usize,
}

fn cmd_verify(args: &VerifyArgs) -> CliResult<i32> {
    let spec = args.profile.spec()?;
    let mut f = spec.build_unchecked()?;
    if args.derivative_scale != 1.0 {
        f = f.with_scaled_derivative(args.derivative_scale);
    }
    let report = run_verify(&f, args.seed, args.npoints);
    eprint!("{}", report.summary());
    emit_json(&report, args.out.as_deref())?;
    Ok(if report.pass { EXIT_OK } else { EXIT_CHECK })
}

fn cmd_sample(args: &SampleArgs) -> CliResult<i32> {
    let spec = args.profile.spec()?;
    let f = spec.build()?;
    let section = match args.section {
        SectionArg::X2zero => Section::PlaneX2Zero,
        SectionArg::X3zero => Section::PlaneX3Zero,
        SectionArg::Volume => Section::Volume,
    };
    let grid = SampleGridSpec::new(section, args.extent, args.resolution, args.exclusion)?;
    let construction = match args.construction {
        ConstructionArg::SpherSym => Construction::SpherSym,
        ConstructionArg::Hedgehog => Construction::Hedgehog,
    };
    let format = match args.format {
        Some(FormatArg::Csv) => OutputFormat::Csv,
        Some(FormatArg::Json) => OutputFormat::Json,
        None if args.out.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => OutputFormat::Json,
        None => OutputFormat::Csv,
    };
    let set = sample_field(&spec, &f, &grid, construction)?;
    set.write_file(&args.out, format)?;
    eprintln!(
        "wrote {} records ({} skipped) to {}",
        set.records.len(),
        set.skipped,
        args.out.display()
    );
    let summary = SampleSummary {
        out: args.out.display().to_string(),
        format: match format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        },
        profile: &spec.label,
        records: set.records.len(),
        skipped: set.skipped,
    };
    emit_json(&summary, None)?;
    Ok(EXIT_OK)
}

fn cmd_transport(args: &TransportArgs) -> CliResult<i32> {
    let f = args.profile.spec()?.build()?;
    let from = parse_point(&args.from)?;
    let path = match args.path {
        PathKind::Ray => PathSpec::Ray,
        PathKind::Polyline => {
            let v = args
                .vertices
                .as_deref()
                .ok_or_else(|| CliError::Usage("--path polyline needs --vertices".into()))?;
            PathSpec::Polyline(v.split(';').map(parse_point).collect::<CliResult<_>>()?)
        }
        PathKind::Arc => {
            let to = args
                .to
                .as_deref()
                .ok_or_else(|| CliError::Usage("--path arc needs --to".into()))?;
            PathSpec::Arc(parse_point(to)?)
        }
    };
    let report = run_transport(&f, from, &path)?;
    eprint!("{}", report.summary());
    emit_json(&report, args.out.as_deref())?;
    Ok(if report.pass { EXIT_OK } else { EXIT_CHECK })
}

fn cmd_classify(args: &ClassifyArgs) -> CliResult<i32> {
    let f = args.profile.spec()?.build()?;
    let report = run_classify(&f, args.seed);
    eprint!("{}", report.summary());
    emit_json(&report, args.out.as_deref())?;
    Ok(EXIT_OK)
}

pub fn dispatch(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Transport(a) => cmd_transport(a),
        Command::Classify(a) => cmd_classify(a),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
