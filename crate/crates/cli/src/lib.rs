//! Subcommand implementations for the `ktd` binary.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ktd_core::datagen::{generate_suite, OutlierPlacement, SyntheticSpec};
use ktd_core::diagram::{build_diagram, DiagramMode, DiagramModel, DiagramOptions};
use ktd_core::formats::{
    read_populations_csv, write_populations_csv, CoordinatesDocument, ModeSelection,
};
use ktd_core::kernel_embedding::mmd_sq_u_with;
use ktd_core::kernels::{BandwidthSpec, Kernel, KernelConfig};
use ktd_core::population::{standardize_to_reference, Population};
use ktd_core::render_svg::{render, RenderOptions};
use thiserror::Error;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<ktd_core::Error> for CliError {
    fn from(e: ktd_core::Error) -> Self {
        if e.is_internal() {
            CliError::Internal(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Classic and kernelized Taylor diagrams from the command line.
#[derive(Debug, Parser)]
#[command(name = "ktd", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the seeded synthetic populations and draw both diagrams.
    Demo(DemoArgs),
    /// Compute diagram coordinates for populations read from a CSV file.
    Compute(ComputeArgs),
    /// Render an SVG from a coordinates JSON document.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Taylor,
    Ktd,
    Both,
}

impl From<ModeArg> for ModeSelection {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Taylor => ModeSelection::Taylor,
            ModeArg::Ktd => ModeSelection::Ktd,
            ModeArg::Both => ModeSelection::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SingleModeArg {
    Taylor,
    Ktd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Estimator {
    /// Biased V-statistic; the one drawn.
    V,
    /// Unbiased U-statistic; reported in `extra.mmd_sq_u`, never drawn.
    U,
}

/// `median` or a positive number.
pub fn parse_sigma(s: &str) -> Result<BandwidthSpec, String> {
    if s.eq_ignore_ascii_case("median") {
        return Ok(BandwidthSpec::MedianHeuristic);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(BandwidthSpec::Fixed(v)),
        _ => Err(format!("expected `median` or a positive number, got `{s}`")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    /// Gaussian kernel width: `median` (one global median-heuristic value over
    /// all populations) or a fixed positive number.
    #[arg(long, default_value = "median", value_parser = parse_sigma)]
    pub sigma: BandwidthSpec,
    /// Standardize kernel inputs with the reference's per-dimension mean and std.
    #[arg(long)]
    pub standardize: bool,
}

impl KernelArgs {
    fn options(&self) -> DiagramOptions {
        DiagramOptions {
            kernel: KernelConfig::gaussian(self.sigma),
            standardize: self.standardize,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DemoArgs {
    /// Seed for every random draw.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Samples per population.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Standard deviation of the additive noise.
    #[arg(long, default_value_t = 0.1)]
    pub noise_std: f64,
    /// Number of outliers in X_O.
    #[arg(long, default_value_t = 2)]
    pub outlier_count: usize,
    /// Mean of the outlier distribution.
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub outlier_mean: f64,
    /// Standard deviation of the outlier distribution.
    #[arg(long, default_value_t = 1.0)]
    pub outlier_std: f64,
    /// Append outliers to X_O instead of replacing its last samples.
    #[arg(long)]
    pub append_outliers: bool,
    /// Diagrams to produce.
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    pub mode: ModeArg,
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Directory receiving populations.csv, coordinates.json and the SVGs.
    #[arg(long, default_value = "ktd-demo")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ComputeArgs {
    /// Input CSV with header `label,dim0[,dim1,...]`.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Label of the reference population.
    #[arg(long, short)]
    pub reference: String,
    /// Diagrams to compute.
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    pub mode: ModeArg,
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// MMD estimator to report.
    #[arg(long, value_enum, default_value_t = Estimator::V)]
    pub estimator: Estimator,
    /// Output JSON path; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Also write the parsed populations back out as CSV.
    #[arg(long)]
    pub echo_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    /// Coordinates JSON produced by `compute` or `demo`.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Diagram to draw; required when the document holds both.
    #[arg(long, value_enum)]
    pub mode: Option<SingleModeArg>,
    /// Output SVG path.
    #[arg(long, short)]
    pub output: PathBuf,
    #[command(flatten)]
    pub style: StyleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct StyleArgs {
    #[arg(long, default_value_t = 720)]
    pub width: u32,
    #[arg(long, default_value_t = 720)]
    pub height: u32,
    /// Approximate number of radial grid rings.
    #[arg(long, default_value_t = 4)]
    pub radial_ticks: u32,
    /// Comma-separated similarity values for angular spokes.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub spokes: Option<Vec<f64>>,
    /// Omit the dashed chord from the reference to each point.
    #[arg(long)]
    pub no_chords: bool,
    #[arg(long, default_value_t = 13)]
    pub font_size: u32,
    /// Figure title; defaults to the diagram kind.
    #[arg(long)]
    pub title: Option<String>,
}

impl StyleArgs {
    pub fn options(&self) -> RenderOptions {
        let defaults = RenderOptions::default();
        RenderOptions {
            width_px: self.width,
            height_px: self.height,
            radial_ticks: self.radial_ticks,
            similarity_spokes: self.spokes.clone().unwrap_or(defaults.similarity_spokes),
            show_chord_arcs: !self.no_chords,
            font_size_px: self.font_size,
            title: self.title.clone(),
        }
    }
}

impl Default for StyleArgs {
    fn default() -> Self {
        let d = RenderOptions::default();
        Self {
            width: d.width_px,
            height: d.height_px,
            radial_ticks: d.radial_ticks,
            spokes: None,
            no_chords: false,
            font_size: d.font_size_px,
            title: None,
        }
    }
}

/// Writes via a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let io = |e: std::io::Error| CliError::Data(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(0o644))
            .map_err(io)?;
    }
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn build_models(
    populations: &[Population],
    reference: &Population,
    modes: ModeSelection,
    options: &DiagramOptions,
) -> CliResult<Vec<DiagramModel>> {
    modes
        .modes()
        .iter()
        .map(|&mode| {
            build_diagram(populations, reference, mode, options).map_err(|e| {
                let err: CliError = e.into();
                match err {
                    CliError::Data(msg) => {
                        CliError::Data(format!("{} diagram: {msg}", mode.as_str()))
                    }
                    other => other,
                }
            })
        })
        .collect()
}

fn csv_bytes<'a>(pops: impl IntoIterator<Item = &'a Population>) -> CliResult<Vec<u8>> {
    let mut out = Vec::new();
    write_populations_csv(&mut out, pops)?;
    Ok(out)
}

pub const DEMO_CSV: &str = "populations.csv";
pub const DEMO_JSON: &str = "coordinates.json";

pub fn demo_svg_name(mode: DiagramMode) -> &'static str {
    match mode {
        DiagramMode::Taylor => "taylor.svg",
        DiagramMode::KernelizedTaylor => "ktd.svg",
    }
}

/// Runs the synthetic experiment and returns the written file paths.
pub fn cmd_demo(args: &DemoArgs) -> CliResult<Vec<PathBuf>> {
    let spec = SyntheticSpec {
        n_samples: args.samples,
        noise_std: args.noise_std,
        outlier_count: args.outlier_count,
        outlier_mean: args.outlier_mean,
        outlier_std: args.outlier_std,
        outlier_placement: if args.append_outliers {
            OutlierPlacement::Append
        } else {
            OutlierPlacement::Replace
        },
        seed: args.seed,
    };
    spec.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let suite = generate_suite(&spec)?;
    let models = build_models(
        &suite.populations,
        &suite.reference,
        args.mode.into(),
        &args.kernel.options(),
    )?;
    let doc = CoordinatesDocument::from_models(&models)?;

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", args.out_dir.display())))?;
    let mut written = Vec::new();
    let mut emit = |name: &str, bytes: &[u8]| -> CliResult<()> {
        let path = args.out_dir.join(name);
        write_atomic(&path, bytes)?;
        written.push(path);
        Ok(())
    };
    emit(DEMO_CSV, &csv_bytes(suite.all())?)?;
    emit(DEMO_JSON, doc.to_json()?.as_bytes())?;
    let opts = RenderOptions::default();
    for m in &models {
        emit(demo_svg_name(m.mode), render(m, &opts)?.as_bytes())?;
    }
    Ok(written)
}

/// Splits ingested populations into (others, reference).
pub fn split_reference(
    populations: Vec<Population>,
    label: &str,
) -> CliResult<(Vec<Population>, Population)> {
    let (refs, others): (Vec<_>, Vec<_>) =
        populations.into_iter().partition(|p| p.label() == label);
    let reference = refs.into_iter().next().ok_or_else(|| {
        CliError::Data(format!(
            "reference label `{label}` does not name any population"
        ))
    })?;
    if others.is_empty() {
        return Err(CliError::Data(format!(
            "input holds only the reference `{label}`; at least one other population is required"
        )));
    }
    Ok((others, reference))
}

/// Computes the coordinates document for a CSV input.
pub fn compute_document(args: &ComputeArgs) -> CliResult<(CoordinatesDocument, Vec<Population>)> {
    let file = std::fs::File::open(&args.input)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", args.input.display())))?;
    let populations = read_populations_csv(std::io::BufReader::new(file))
        .map_err(|e| CliError::Data(format!("{}: {e}", args.input.display())))?;
    let all = populations.clone();
    let (others, reference) = split_reference(populations, &args.reference)?;
    let options = args.kernel.options();
    let models = build_models(&others, &reference, args.mode.into(), &options)?;
    let mut doc = CoordinatesDocument::from_models(&models)?;

    if args.estimator == Estimator::U {
        if let (Some(section), Some(sigma)) = (doc.ktd.as_mut(), doc.sigma) {
            let kernel = Kernel::gaussian(sigma)?;
            let (others, reference) = if options.standardize {
                standardize_to_reference(&others, &reference)?
            } else {
                (others, reference)
            };
            for (point, pop) in section.points.iter_mut().zip(&others) {
                point.extra.mmd_sq_u = Some(mmd_sq_u_with(pop, &reference, &kernel)?);
            }
        }
    }
    Ok((doc, all))
}

pub fn cmd_compute(args: &ComputeArgs) -> CliResult<()> {
    let (doc, all) = compute_document(args)?;
    let json = doc.to_json()?;
    match &args.output {
        Some(path) => write_atomic(path, json.as_bytes())?,
        None => print!("{json}"),
    }
    if let Some(path) = &args.echo_csv {
        write_atomic(path, &csv_bytes(&all)?)?;
    }
    Ok(())
}

/// Loads a coordinates document and renders one diagram.
pub fn render_document(
    json: &str,
    mode: Option<SingleModeArg>,
    opts: &RenderOptions,
) -> CliResult<String> {
    let doc = CoordinatesDocument::from_json(json)?;
    let mode = match (mode, doc.mode) {
        (Some(SingleModeArg::Taylor), _) => DiagramMode::Taylor,
        (Some(SingleModeArg::Ktd), _) => DiagramMode::KernelizedTaylor,
        (None, ModeSelection::Taylor) => DiagramMode::Taylor,
        (None, ModeSelection::Ktd) => DiagramMode::KernelizedTaylor,
        (None, ModeSelection::Both) => {
            return Err(CliError::Usage(
                "document holds both diagrams; pass --mode taylor or --mode ktd".into(),
            ))
        }
    };
    let model = doc.model(mode)?;
    render(&model, opts).map_err(|e| match e {
        ktd_core::Error::InvalidParameter(m) => CliError::Usage(m),
        other => other.into(),
    })
}

pub fn cmd_render(args: &RenderArgs) -> CliResult<()> {
    let json = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", args.input.display())))?;
    let svg = render_document(&json, args.mode, &args.style.options()).map_err(|e| match e {
        CliError::Data(m) => CliError::Data(format!("{}: {m}", args.input.display())),
        other => other,
    })?;
    write_atomic(&args.output, svg.as_bytes())
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Demo(args) => {
            for path in cmd_demo(args)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Compute(args) => cmd_compute(args),
        Command::Render(args) => cmd_render(args),
    }
}
