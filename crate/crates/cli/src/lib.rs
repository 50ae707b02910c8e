//! Command-line front end: `analyze`, `boundary` and `compare` write scene
//! documents for the viewer and print a short summary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use hqview_core::analysis::{analyze, analyze_boundary, Analysis, AnalysisError, AnalysisOptions, BoundaryReference, Param};
use hqview_core::boundary::{boundary_csv, BoundaryError, SignMode};
use hqview_core::io::{load_mesh, load_reference_surface, LoadError, MeshFormat, SurfaceFormat};
use hqview_core::quality::quality_csv;
use hqview_core::scene::{BoundarySection, CompareDocument, SceneBody, SceneDocument};
use hqview_core::Mesh;

pub const THREADS_ENV: &str = "HQVIEW_THREADS";

#[derive(Debug, Parser)]
#[command(name = "hqview", version, about = "Hex and quad mesh quality analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quality, glyphs, clusters, feature edges and overlaps for one mesh.
    Analyze(AnalyzeArgs),
    /// Boundary error of a mesh against a reference mesh or surface.
    Boundary(BoundaryArgs),
    /// Analyze two meshes with identical parameters.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Largest glyph radius, or `auto` (half the average edge length).
    #[arg(long = "rmax", default_value = "auto")]
    pub r_max: Param,
    /// Smallest displayed glyph radius, or `auto` (a tenth of r_max).
    #[arg(long = "rdmin", default_value = "auto")]
    pub r_dmin: Param,
    /// Feature-edge quality threshold, or `auto` (0.2 above the median, at most 1).
    #[arg(long = "eqmax", default_value = "auto")]
    pub e_qmax: Param,
    /// Overlap distance relative to the bounding-box diagonal.
    #[arg(long = "epsilon-overlap", default_value_t = hqview_core::overlap::DEFAULT_EPSILON_REL)]
    pub epsilon_overlap: f64,
    /// Histogram bin count.
    #[arg(long, default_value_t = hqview_core::analysis::DEFAULT_BINS)]
    pub bins: usize,
    /// Mesh file format.
    #[arg(long, default_value = "auto")]
    pub format: MeshFormat,
    /// Record the current UTC time outside the hashed scene body.
    #[arg(long)]
    pub timestamp: bool,
}

impl ParamArgs {
    pub fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            r_max: self.r_max,
            r_dmin: self.r_dmin,
            e_qmax: self.e_qmax,
            epsilon_overlap: self.epsilon_overlap,
            bins: self.bins,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[arg(short = 'm', long)]
    pub mesh: PathBuf,
    #[arg(short = 'o', long, default_value = "scene.json")]
    pub out: PathBuf,
    /// Also write `vertex,quality` rows to this file.
    #[arg(long)]
    pub quality_csv: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Auto,
    Signed,
    Unsigned,
}

impl From<SignArg> for SignMode {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Auto => SignMode::Auto,
            SignArg::Signed => SignMode::Signed,
            SignArg::Unsigned => SignMode::Unsigned,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BoundaryArgs {
    #[arg(long)]
    pub original: PathBuf,
    /// Reference hex/quad mesh, or OBJ/VTK surface for hex originals.
    #[arg(long)]
    pub reference: PathBuf,
    /// Store the reference UV of every closest point.
    #[arg(long)]
    pub uv_from_reference: bool,
    #[arg(long, value_enum, default_value_t = SignArg::Auto)]
    pub sign: SignArg,
    #[arg(short = 'o', long, default_value = "scene.json")]
    pub out: PathBuf,
    /// Also write `vertex,loop,arc_length,b_error` rows to this file.
    #[arg(long)]
    pub boundary_csv: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[arg(long = "mesh-a")]
    pub mesh_a: PathBuf,
    #[arg(long = "mesh-b")]
    pub mesh_b: PathBuf,
    #[arg(short = 'o', long, default_value = "compare.json")]
    pub out: PathBuf,
    #[arg(long = "label-a", default_value = "before")]
    pub label_a: String,
    #[arg(long = "label-b", default_value = "after")]
    pub label_b: String,
    /// Shared model name; defaults to the file stem of mesh A.
    #[arg(long)]
    pub model: Option<String>,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Load(#[from] LoadError),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("{0}")]
    Impossible(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Load(LoadError::NoCells(_)) => 3,
            CliError::Load(_) | CliError::Write { .. } => 1,
            CliError::InvalidArgument(_) => 2,
            CliError::Impossible(_) => 3,
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::InvalidParameter(_) => CliError::InvalidArgument(e.to_string()),
            AnalysisError::Boundary(BoundaryError::UnsignedOnly) => CliError::InvalidArgument(format!(
                "{e}; rerun with --sign auto or --sign unsigned"
            )),
            _ => CliError::Impossible(e.to_string()),
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn path_string(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn load(path: &Path, params: &ParamArgs) -> Result<Mesh, CliError> {
    Ok(load_mesh(path, params.format)?)
}

fn finish(mut doc: SceneDocument, params: &ParamArgs) -> SceneDocument {
    if params.timestamp {
        doc.generated_at = Some(utc_now());
    }
    doc
}

fn utc_now() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let (days, rem) = (secs / 86_400, secs % 86_400);
    // Civil-from-days for the proleptic Gregorian calendar.
    let z = days as i64 + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = yoe + era * 400 + i64::from(m <= 2);
    format!(
        "{y:04}-{m:02}-{d:02}T{:02}:{:02}:{:02}Z",
        rem / 3600,
        rem % 3600 / 60,
        rem % 60
    )
}

/// Summary lines printed after `analyze`.
pub fn summary(a: &Analysis) -> String {
    let (worst_vertex, worst) = a.quality.worst().expect("non-empty analysis");
    format!(
        "mesh: {}\nvertices: {}\ncells: {}\nworst J_m: {worst} (vertex {worst_vertex})\nmedian J_m: {}\ndisplayed glyphs: {}\nclusters: {}\nemphasized edges: {}\noverlapping vertex pairs: {}\noverlapping cell incidents: {}\n",
        a.mesh.name(),
        a.mesh.vertex_count(),
        a.mesh.cell_count(),
        a.quality.median(),
        a.glyphs.displayed_ids().len(),
        a.clusters.len(),
        a.features.emphasized.len(),
        a.overlaps.vertex_pairs.len(),
        a.overlaps.containments.len(),
    )
}

/// Runs `analyze` and returns the scene plus its summary.
pub fn run_analyze(args: &AnalyzeArgs) -> Result<(SceneDocument, String), CliError> {
    let mesh = load(&args.mesh, &args.params)?;
    let model = mesh.name().to_string();
    let a = analyze(mesh, &args.params.options())?;
    if let Some(path) = &args.quality_csv {
        write_file(path, &quality_csv(&a.quality))?;
    }
    let body = SceneBody::from_analysis(&model, vec![path_string(&args.mesh)], &a, None);
    let doc = finish(SceneDocument::new(body), &args.params);
    write_file(&args.out, &doc.to_json())?;
    Ok((doc, summary(&a)))
}

fn load_reference(path: &Path, dimension: usize, params: &ParamArgs) -> Result<BoundaryReference, CliError> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    if ext == "obj" {
        return Ok(BoundaryReference::Surface(load_reference_surface(path, SurfaceFormat::Obj)?));
    }
    match load_mesh(path, params.format) {
        Ok(m) => Ok(BoundaryReference::Mesh(m)),
        // A VTK polygon surface is a valid 3D reference but not a volume mesh.
        Err(mesh_err) if dimension == 3 && ext == "vtk" => match load_reference_surface(path, SurfaceFormat::VtkLegacy) {
            Ok(s) => Ok(BoundaryReference::Surface(s)),
            Err(_) => Err(mesh_err.into()),
        },
        Err(e) => Err(e.into()),
    }
}

pub fn run_boundary(args: &BoundaryArgs) -> Result<(SceneDocument, String), CliError> {
    let mesh = load(&args.original, &args.params)?;
    let reference = load_reference(&args.reference, mesh.dimension(), &args.params)?;
    if args.uv_from_reference {
        let has_uv = matches!(&reference, BoundaryReference::Surface(s) if s.uv().is_some());
        if !has_uv {
            return Err(CliError::InvalidArgument(format!(
                "--uv-from-reference: {} carries no UV map",
                args.reference.display()
            )));
        }
    }
    let model = mesh.name().to_string();
    let a = analyze(mesh, &args.params.options())?;
    let mode = SignMode::from(args.sign);
    let b = analyze_boundary(&a.mesh, &a.adjacency, &reference, mode)?;
    let mut section = BoundarySection::new(&path_string(&args.reference), mode, &b);
    if !args.uv_from_reference {
        section.uv = None;
    }
    if let Some(path) = &args.boundary_csv {
        write_file(path, &boundary_csv(&b.series, &b.records))?;
    }
    let body = SceneBody::from_analysis(
        &model,
        vec![path_string(&args.original), path_string(&args.reference)],
        &a,
        Some(section),
    );
    let doc = finish(SceneDocument::new(body), &args.params);
    write_file(&args.out, &doc.to_json())?;

    let mut text = summary(&a);
    text.push_str(&format!(
        "boundary dimension: {}\nsigned: {}\nboundary loops: {}\nboundary vertices: {}\nb_error range: [{}, {}]\n",
        b.dimension,
        b.signed,
        b.series.len(),
        b.records.len(),
        b.collated.values.first().copied().unwrap_or(0.0),
        b.collated.values.last().copied().unwrap_or(0.0),
    ));
    Ok((doc, text))
}

pub fn run_compare(args: &CompareArgs) -> Result<(CompareDocument, String), CliError> {
    let mesh_a = load(&args.mesh_a, &args.params)?;
    let mesh_b = load(&args.mesh_b, &args.params)?;
    let model = args.model.clone().unwrap_or_else(|| mesh_a.name().to_string());
    let options = args.params.options();
    let a = analyze(mesh_a, &options)?;
    let b = analyze(mesh_b, &options)?;
    let scene = |x: &Analysis, path: &Path| {
        finish(
            SceneDocument::new(SceneBody::from_analysis(&model, vec![path_string(path)], x, None)),
            &args.params,
        )
    };
    let doc = CompareDocument::new(
        [args.label_a.clone(), args.label_b.clone()],
        scene(&a, &args.mesh_a),
        scene(&b, &args.mesh_b),
    )
    .map_err(|e| CliError::Impossible(e.to_string()))?;
    write_file(&args.out, &doc.to_json())?;
    Ok((doc, compare_table([&args.label_a, &args.label_b], [&a, &b])))
}

/// Side-by-side table of worst quality, cluster count and emphasized edges.
pub fn compare_table(labels: [&str; 2], analyses: [&Analysis; 2]) -> String {
    let w = labels.iter().map(|l| l.len()).max().unwrap_or(0).max(5);
    let mut out = format!(
        "{:<w$}  {:>12}  {:>8}  {:>10}  {:>10}\n",
        "mesh", "worst J_m", "clusters", "emphasized", "vertices"
    );
    for (label, a) in labels.iter().zip(analyses) {
        let worst = a.quality.worst().map_or(f64::NAN, |w| w.1);
        out.push_str(&format!(
            "{:<w$}  {:>12.6}  {:>8}  {:>10}  {:>10}\n",
            label,
            worst,
            a.clusters.len(),
            a.features.emphasized.len(),
            a.mesh.vertex_count()
        ));
    }
    out
}

/// Caps the global rayon pool from `HQVIEW_THREADS` when set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got `{value}`")))?;
    // A pool that is already initialized keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cli: &Cli, stdout: &mut impl Write) -> Result<(), CliError> {
    configure_threads()?;
    let text = match &cli.command {
        Command::Analyze(args) => run_analyze(args)?.1,
        Command::Boundary(args) => run_boundary(args)?.1,
        Command::Compare(args) => run_compare(args)?.1,
    };
    let _ = stdout.write_all(text.as_bytes());
    Ok(())
}

/// Parses arguments, runs, and maps failures to exit codes (2 for bad
/// arguments, including clap's own usage errors).
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli, &mut std::io::stdout()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
