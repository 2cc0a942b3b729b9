//! The `cubmp` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O or format error, 3
//! verification failure. `CUMPER_THREADS` overrides `--threads`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::filtration::{
    color_multifiltration, erosion_bifiltration, linear_thresholds, threshold_multifiltration, BiFiltration,
    CompactMultiFiltration, ErosionInequality, LevelGrid, DEFAULT_COLOR_THRESHOLDS, DEFAULT_EROSION_LEVELS,
    DEFAULT_GRAY_THRESHOLDS,
};
use crate::grid::{MultiChannelImage, ValueGrid};
use crate::io::{
    load_image, read_json, to_json, BettiTensorDocument, DiagramDocument, DiagramMetadata, Num, VectorizationDocument,
};
use crate::metrics::{
    aggregate_costs, matching_costs, mp_diagram_distance, mp_vectorization_distance, wasserstein, Essentials,
};
use crate::multipers::{activation_diagram, color_betti_tensor, slice_bifiltration, SliceAxis};
use crate::oracle::{run_oracle_check, OracleCheckConfig};
use crate::persistence::{compute_pd_auto, compute_pd_many, Dims, HomologyDim, PersistenceDiagram};
use crate::vectorize::{mp_vectorization, Aggregator, InducedBase, VectorizationParams};

pub const THREADS_ENV: &str = "CUMPER_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Io(_) => 2,
            Self::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Usage(m) | Self::Io(m) | Self::Verification(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Format(_) | Error::ChannelCount { .. } => Self::Io(e.to_string()),
            other => Self::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "cubmp", version, about = "Cubical persistent homology of images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Persistence diagram of a grayscale image or one channel.
    Pd(PdArgs),
    /// Multiparameter vectorization of an image.
    Mp(MpArgs),
    /// Distance between two documents.
    Distance(DistanceArgs),
    /// Compare the engine with the boundary-matrix reference.
    OracleCheck(OracleArgs),
    /// Time batch diagram computation on synthetic multifiltrations.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DimArg {
    #[value(name = "0")]
    Zero,
    #[value(name = "1")]
    One,
    Both,
}

impl From<DimArg> for Dims {
    fn from(d: DimArg) -> Self {
        match d {
            DimArg::Zero => Dims::Zero,
            DimArg::One => Dims::One,
            DimArg::Both => Dims::Both,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ChannelArg {
    R,
    G,
    B,
    Gray,
}

#[derive(Args, Debug)]
struct PdArgs {
    image: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    dim: DimArg,
    /// Filter by superlevel sets; values are reported in the original units.
    #[arg(long)]
    superlevel: bool,
    /// A threshold count (e.g. `50`) or a comma-separated list (e.g. `0,64,128`).
    #[arg(long)]
    thresholds: Option<String>,
    #[arg(long, value_enum)]
    channel: Option<ChannelArg>,
    /// Include birth/death pixel coordinates.
    #[arg(long)]
    coords: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VectorizeArg {
    Betti,
    Silhouette,
    Landscape,
    Perslay,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AggregateArg {
    Flatten,
    Mean,
}

#[derive(Args, Debug)]
struct MpArgs {
    image: PathBuf,
    /// `erosion`, `channel` (three-channel Betti tensor) or `channel:r|g|b`.
    #[arg(long, default_value = "erosion")]
    rows: String,
    #[arg(long, default_value = "sublevel")]
    cols: String,
    /// Erosion levels, or channel thresholds for `channel:*` rows.
    #[arg(long, value_delimiter = ',')]
    row_levels: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_GRAY_THRESHOLDS)]
    col_thresholds: usize,
    /// Thresholds per channel for `--rows channel`.
    #[arg(long, default_value_t = DEFAULT_COLOR_THRESHOLDS)]
    channel_thresholds: usize,
    #[arg(long, value_enum, default_value = "perslay")]
    vectorize: VectorizeArg,
    /// Landscape level for `--vectorize landscape`.
    #[arg(long, default_value_t = 1)]
    landscape_k: usize,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 1.0)]
    weight: f64,
    #[arg(long, value_enum, default_value = "flatten")]
    aggregate: AggregateArg,
    /// Use `xi <= level` instead of `xi < level` for erosion rows.
    #[arg(long)]
    non_strict: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the per-slice diagrams here.
    #[arg(long)]
    diagrams_out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MetricArg {
    Wasserstein,
    Bottleneck,
    MpSum,
    Vec,
}

#[derive(Args, Debug)]
struct DistanceArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, value_enum, default_value = "wasserstein")]
    metric: MetricArg,
    /// Order of the Wasserstein distance; `inf` for bottleneck.
    #[arg(long, default_value = "1")]
    p: String,
    #[arg(long, value_enum, default_value = "both")]
    dim: DimArg,
    /// Clip infinite deaths to this level instead of excluding them.
    #[arg(long)]
    clip: Option<f64>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 8)]
    max_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Image size as `HxW`.
    #[arg(long, default_value = "224x224")]
    size: String,
    #[arg(long, default_value_t = 16)]
    slices: usize,
    #[arg(long, default_value_t = 32)]
    levels: u32,
    #[arg(long, default_value_t = 8)]
    batch: usize,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = 3)]
    repeat: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Pd(a) => cmd_pd(&a, stdout),
        Command::Mp(a) => cmd_mp(&a, stdout),
        Command::Distance(a) => cmd_distance(&a, stdout),
        Command::OracleCheck(a) => cmd_oracle_check(&a, stdout),
        Command::Bench(a) => cmd_bench(&a, stdout, stderr),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Worker count from `CUMPER_THREADS`, else `flag`, else 1.
pub fn resolve_threads(flag: Option<usize>) -> CliResult<usize> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?,
        Err(_) => flag.unwrap_or(1),
    };
    if n == 0 {
        return Err(CliError::Usage("thread count must be positive".into()));
    }
    Ok(n)
}

fn build_pool(threads: usize) -> CliResult<Option<rayon::ThreadPool>> {
    if threads <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map(Some)
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn select_channel(img: &MultiChannelImage, channel: Option<ChannelArg>) -> CliResult<ValueGrid> {
    match (img.num_channels(), channel) {
        (1, None | Some(ChannelArg::Gray)) => Ok(img.channels()[0].clone()),
        (1, Some(c)) => Err(CliError::Io(format!("grayscale image has no channel {c:?}"))),
        (3, None) => Err(CliError::Io(
            "color image: choose a channel with --channel r|g|b|gray".into(),
        )),
        (3, Some(ChannelArg::Gray)) => Ok(img.luma()),
        (3, Some(c)) => {
            let i = match c {
                ChannelArg::R => 0,
                ChannelArg::G => 1,
                _ => 2,
            };
            Ok(img.channels()[i].clone())
        }
        (n, _) => Err(CliError::Io(format!("unsupported channel count {n}"))),
    }
}

/// A count (`"50"`) becomes evenly spaced thresholds over the grid range; a
/// list (`"0,1.5,3"`) is used as given.
fn parse_thresholds(spec: &str, grid: &ValueGrid) -> CliResult<Vec<f64>> {
    let spec = spec.trim();
    if !spec.contains(',') {
        if let Ok(count) = spec.parse::<usize>() {
            if count == 0 {
                return Err(CliError::Usage("threshold count must be positive".into()));
            }
            return Ok(linear_thresholds(grid, count));
        }
    }
    let list = spec
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Usage(format!("bad threshold {s:?}")))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    if list.is_empty() {
        return Err(CliError::Usage("empty threshold list".into()));
    }
    if list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage("thresholds must be strictly increasing".into()));
    }
    Ok(list)
}

/// Diagram of the filtration restricted to the sorted `thresholds`: a pixel
/// enters at the first threshold it does not exceed, and classes still
/// alive after the last threshold get infinite deaths.
pub fn thresholded_pd(grid: &ValueGrid, thresholds: &[f64]) -> PersistenceDiagram {
    let k = thresholds.len();
    let levels = grid
        .values()
        .iter()
        .map(|&v| thresholds.partition_point(|&t| t < v) as u32 + 1)
        .collect();
    let ladder = LevelGrid::new(grid.height(), grid.width(), levels).expect("grid shape");
    let mut pd = activation_diagram(&ladder, k as u32, 0);
    for p in pd.pairs_dim0.iter_mut().chain(pd.pairs_dim1.iter_mut()) {
        p.birth = thresholds[p.birth as usize - 1];
        if p.death.is_finite() {
            p.death = thresholds[p.death as usize - 1];
        }
    }
    pd
}

fn keep_dims(mut pd: PersistenceDiagram, dims: Dims) -> PersistenceDiagram {
    if !dims.contains(HomologyDim::Zero) {
        pd.pairs_dim0.clear();
    }
    if !dims.contains(HomologyDim::One) {
        pd.pairs_dim1.clear();
    }
    pd
}

fn cmd_pd(a: &PdArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let img = load_image(&a.image)?;
    let gray = select_channel(&img, a.channel)?;
    let dims = Dims::from(a.dim);
    let work = if a.superlevel { gray.negate() } else { gray.clone() };
    let mut thresholds = match &a.thresholds {
        Some(spec) => Some(parse_thresholds(spec, &gray)?),
        None => None,
    };
    let mut pd = match &thresholds {
        Some(ts) => {
            let mut ladder: Vec<f64> = ts.clone();
            if a.superlevel {
                ladder = ladder.iter().rev().map(|t| -t).collect();
            }
            thresholded_pd(&work, &ladder)
        }
        None => compute_pd_auto(&work, dims),
    };
    if a.superlevel {
        for p in pd.pairs_dim0.iter_mut().chain(pd.pairs_dim1.iter_mut()) {
            p.birth = -p.birth;
            p.death = -p.death;
        }
    }
    pd = keep_dims(pd, dims);
    let metadata = DiagramMetadata {
        m: 1,
        n: thresholds.as_ref().map(Vec::len),
        thresholds: thresholds.take().map(|t| t.into_iter().map(Num).collect()),
        superlevel: a.superlevel,
    };
    let doc = DiagramDocument::from_diagrams(&[pd], metadata, a.coords);
    emit(&to_json(&doc)?, a.out.as_deref(), stdout)
}

fn gray_of(img: &MultiChannelImage) -> ValueGrid {
    img.luma()
}

fn channel_index(name: &str) -> CliResult<usize> {
    match name {
        "r" => Ok(0),
        "g" => Ok(1),
        "b" => Ok(2),
        other => Err(CliError::Usage(format!("unknown channel {other:?}"))),
    }
}

fn cmd_mp(a: &MpArgs, stdout: &mut dyn Write) -> CliResult<()> {
    if a.cols != "sublevel" {
        return Err(CliError::Usage(format!("unsupported --cols {:?}", a.cols)));
    }
    let threads = resolve_threads(a.threads)?;
    let pool = build_pool(threads)?;
    let img = load_image(&a.image)?;
    if a.rows == "channel" {
        return color_tensor(a, &img, pool.as_ref(), stdout);
    }
    let (bif, empty_thresholds) = if a.rows == "erosion" {
        let gray = gray_of(&img);
        let levels: Vec<u32> = match &a.row_levels {
            Some(ls) => ls
                .iter()
                .map(|&l| {
                    (l >= 0.0 && l.fract() == 0.0 && l <= f64::from(u32::MAX))
                        .then_some(l as u32)
                        .ok_or_else(|| CliError::Usage(format!("erosion level {l} is not a non-negative integer")))
                })
                .collect::<CliResult<_>>()?,
            None => DEFAULT_EROSION_LEVELS.to_vec(),
        };
        let thresholds = linear_thresholds(&gray, a.col_thresholds);
        let inequality = if a.non_strict {
            ErosionInequality::NonStrict
        } else {
            ErosionInequality::Strict
        };
        let ero = erosion_bifiltration(&gray, &thresholds, &levels, inequality)?;
        (ero.bifiltration, ero.empty_thresholds)
    } else if let Some(name) = a.rows.strip_prefix("channel:") {
        let c = channel_index(name)?;
        if img.num_channels() != 3 {
            return Err(CliError::Io("channel rows need a color image".into()));
        }
        let channel = img.channels()[c].clone();
        let gray = gray_of(&img);
        let rows = match &a.row_levels {
            Some(ls) => ls.clone(),
            None => linear_thresholds(&channel, DEFAULT_COLOR_THRESHOLDS),
        };
        let cols = linear_thresholds(&gray, a.col_thresholds);
        let pair = MultiChannelImage::new(vec![channel, gray])?;
        let mm = threshold_multifiltration(&pair, &[rows.clone(), cols.clone()])?;
        (
            BiFiltration::new(rows.len(), cols.len(), mm.masks().to_vec())?,
            Vec::new(),
        )
    } else {
        return Err(CliError::Usage(format!("unsupported --rows {:?}", a.rows)));
    };
    let sliced = slice_bifiltration(&bif, SliceAxis::Rows, pool.as_ref())?;
    let aggregator = match a.aggregate {
        AggregateArg::Flatten => Aggregator::Flatten,
        AggregateArg::Mean => Aggregator::MeanOverSlices,
    };
    let params =
        VectorizationParams::evenly_spaced(sliced.max_level(), a.samples, a.weight)?.with_aggregator(aggregator);
    let (base, kind) = match a.vectorize {
        VectorizeArg::Betti => (InducedBase::Betti, "betti"),
        VectorizeArg::Silhouette => (InducedBase::Silhouette, "silhouette"),
        VectorizeArg::Landscape => (InducedBase::Landscape(a.landscape_k), "landscape"),
        VectorizeArg::Perslay => (InducedBase::Perslay, "perslay"),
    };
    let v = mp_vectorization(&sliced, base, &params)?;
    let mut doc = VectorizationDocument::new(kind, params.samples(), &v);
    doc.empty_thresholds = empty_thresholds;
    if let Some(path) = &a.diagrams_out {
        std::fs::write(path, to_json(&DiagramDocument::from_sliced(&sliced, false))?)?;
    }
    emit(&to_json(&doc)?, a.out.as_deref(), stdout)
}

fn color_tensor(
    a: &MpArgs,
    img: &MultiChannelImage,
    pool: Option<&rayon::ThreadPool>,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    if img.num_channels() != 3 {
        return Err(CliError::Io("channel rows need a color image".into()));
    }
    let thresholds: Vec<Vec<f64>> = img
        .channels()
        .iter()
        .map(|c| linear_thresholds(c, a.channel_thresholds))
        .collect();
    let mm = color_multifiltration(img, &thresholds)?;
    let b0 = color_betti_tensor(&mm, HomologyDim::Zero, pool)?;
    let b1 = color_betti_tensor(&mm, HomologyDim::One, pool)?;
    let doc = BettiTensorDocument::new(b0.shape.clone(), &thresholds, b0.values, b1.values);
    emit(&to_json(&doc)?, a.out.as_deref(), stdout)
}

fn parse_p(p: &str) -> CliResult<f64> {
    let v = match p.trim() {
        "inf" | "infinity" => f64::INFINITY,
        s => s
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("bad --p {s:?}")))?,
    };
    if v.is_nan() || v <= 0.0 {
        return Err(CliError::Usage("--p must be positive".into()));
    }
    Ok(v)
}

/// `%g`-style formatting with `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x > 0.0 {
            "inf".into()
        } else if x < 0.0 {
            "-inf".into()
        } else {
            "nan".into()
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

fn load_diagrams(path: &Path) -> CliResult<DiagramDocument> {
    let doc: DiagramDocument = read_json(path)?;
    doc.validate()?;
    Ok(doc)
}

fn cmd_distance(a: &DistanceArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let p = parse_p(&a.p)?;
    let essentials = a.clip.map_or(Essentials::Exclude, Essentials::Clip);
    let dims = Dims::from(a.dim);
    let value = match a.metric {
        MetricArg::Vec => {
            let va: VectorizationDocument = read_json(&a.a)?;
            let vb: VectorizationDocument = read_json(&a.b)?;
            mp_vectorization_distance(&va.to_vectorization()?, &vb.to_vectorization()?)?
        }
        MetricArg::MpSum => {
            let (da, db) = (load_diagrams(&a.a)?, load_diagrams(&a.b)?);
            mp_diagram_distance(&da.to_sliced(), &db.to_sliced(), p, dims, essentials, None)?
        }
        MetricArg::Wasserstein | MetricArg::Bottleneck => {
            let p = if matches!(a.metric, MetricArg::Bottleneck) {
                f64::INFINITY
            } else {
                p
            };
            let (da, db) = (load_diagrams(&a.a)?, load_diagrams(&a.b)?);
            if da.slices.len() != 1 || db.slices.len() != 1 {
                return Err(CliError::Usage(
                    "wasserstein and bottleneck compare single-slice documents; use --metric mp-sum".into(),
                ));
            }
            let (pa, pb) = (&da.to_diagrams()[0], &db.to_diagrams()[0]);
            let mut costs = Vec::new();
            for dim in [HomologyDim::Zero, HomologyDim::One] {
                if !dims.contains(dim) {
                    continue;
                }
                let (ba, bb) = (essentials.apply(&pa.bars(dim)), essentials.apply(&pb.bars(dim)));
                let m = wasserstein(&ba, &bb, p, Essentials::Exclude)?;
                costs.extend(matching_costs(&ba, &bb, &m.matching));
            }
            aggregate_costs(&costs, p)
        }
    };
    writeln!(stdout, "{}", format_significant(value, 12))?;
    Ok(())
}

fn cmd_oracle_check(a: &OracleArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let report = run_oracle_check(&OracleCheckConfig {
        trials: a.trials,
        max_size: a.max_size,
        seed: a.seed,
        inject_fault: a.inject_fault,
    })?;
    writeln!(stdout, "exhaustive grids checked: {}", report.exhaustive_checked)?;
    writeln!(stdout, "random grids checked: {}", report.random_checked)?;
    writeln!(stdout, "mismatches: {}", report.mismatches.len())?;
    for m in report.mismatches.iter().take(5) {
        writeln!(stdout, "mismatch on {:?}: {}", m.grid.values(), m.reason)?;
    }
    if report.passed() {
        writeln!(stdout, "PASS")?;
        Ok(())
    } else {
        writeln!(stdout, "FAIL")?;
        Err(CliError::Verification(format!(
            "{} engine/oracle mismatches",
            report.mismatches.len()
        )))
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub height: usize,
    pub width: usize,
    pub slices: usize,
    pub levels: u32,
    pub batch: usize,
    pub threads: usize,
    pub repeat: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Timing {
    pub mean: f64,
    pub std: f64,
}

impl Timing {
    fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = if samples.len() > 1 {
            samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self { mean, std: var.sqrt() }
    }
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub single: Timing,
    pub multi: Timing,
    /// Total number of pairs per batch, identical for both runs.
    pub pairs_per_batch: usize,
}

impl BenchReport {
    pub fn speedup(&self) -> f64 {
        self.single.mean / self.multi.mean
    }

    pub fn to_csv(&self) -> String {
        let c = &self.config;
        let mut s =
            String::from("mode,workers,height,width,slices,levels,batch,repeat,mean_seconds,std_seconds,speedup\n");
        for (mode, workers, t) in [("single", 1, self.single), ("multi", c.threads, self.multi)] {
            s.push_str(&format!(
                "{mode},{workers},{},{},{},{},{},{},{:.6},{:.6},{:.4}\n",
                c.height,
                c.width,
                c.slices,
                c.levels,
                c.batch,
                c.repeat,
                t.mean,
                t.std,
                self.single.mean / t.mean
            ));
        }
        s
    }
}

/// A smooth random field in `[0, 1]` with some pixel noise; slice `s` is
/// scaled by `1 - s / (2M)` so the quantized stack is monotone.
fn synthetic_cmf(rng: &mut ChaCha8Rng, h: usize, w: usize, m: usize, n: u32) -> crate::Result<CompactMultiFiltration> {
    let waves: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.gen_range(0.02..0.3),
                rng.gen_range(0.02..0.3),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let base = ValueGrid::from_fn(h, w, |r, c| {
        let smooth: f64 = waves
            .iter()
            .map(|&(fr, fc, ph)| (fr * r as f64 + fc * c as f64 + ph).sin())
            .sum::<f64>()
            / 8.0;
        (0.5 + smooth + rng.gen_range(-0.1..0.1)).clamp(0.0, 1.0)
    })?;
    let slices = (0..m)
        .map(|s| base.map(|v| v * (1.0 - s as f64 / (2.0 * m as f64))))
        .collect::<crate::Result<Vec<_>>>()?;
    let mut cmf = CompactMultiFiltration::from_unit_grids(&slices, n)?;
    cmf.validate()?;
    Ok(cmf)
}

/// Times one batch of `batch x slices` diagram computations, first on the
/// calling thread and then on a pool of `threads` workers.
pub fn run_bench(cfg: &BenchConfig) -> crate::Result<BenchReport> {
    if cfg.height == 0 || cfg.width == 0 || cfg.slices == 0 || cfg.batch == 0 || cfg.repeat == 0 || cfg.levels == 0 {
        return Err(Error::InvalidParameter("bench sizes must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let grids: Vec<ValueGrid> = (0..cfg.batch)
        .map(|_| synthetic_cmf(&mut rng, cfg.height, cfg.width, cfg.slices, cfg.levels))
        .collect::<crate::Result<Vec<_>>>()?
        .iter()
        .flat_map(|cmf| cmf.slices().iter().map(LevelGrid::to_value_grid).collect::<Vec<_>>())
        .collect();
    let t = f64::from(cfg.levels) + 1.0;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let time = |pool: Option<&rayon::ThreadPool>| -> crate::Result<(Timing, usize)> {
        let mut samples = Vec::with_capacity(cfg.repeat);
        let mut pairs = 0;
        for _ in 0..cfg.repeat {
            let start = Instant::now();
            let pds = compute_pd_many(&grids, Dims::Both, t, pool)?;
            samples.push(start.elapsed().as_secs_f64());
            pairs = pds.iter().map(PersistenceDiagram::len).sum();
        }
        Ok((Timing::from_samples(&samples), pairs))
    };
    let (single, pairs_single) = time(None)?;
    let (multi, pairs_multi) = time(Some(&pool))?;
    debug_assert_eq!(pairs_single, pairs_multi);
    Ok(BenchReport {
        config: cfg.clone(),
        single,
        multi,
        pairs_per_batch: pairs_single,
    })
}

fn parse_size(s: &str) -> CliResult<(usize, usize)> {
    let (h, w) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| CliError::Usage(format!("size must look like 224x224, got {s:?}")))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("bad size component {v:?}")))
    };
    Ok((parse(h)?, parse(w)?))
}

fn cmd_bench(a: &BenchArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let (height, width) = parse_size(&a.size)?;
    let threads = resolve_threads(Some(a.threads.unwrap_or(8)))?;
    let cfg = BenchConfig {
        height,
        width,
        slices: a.slices,
        levels: a.levels,
        batch: a.batch,
        threads,
        repeat: a.repeat,
        seed: a.seed,
    };
    let report = run_bench(&cfg)?;
    writeln!(
        stderr,
        "single worker: {:.4} ± {:.4} s per batch\n{} workers: {:.4} ± {:.4} s per batch (speedup {:.2})",
        report.single.mean,
        report.single.std,
        threads,
        report.multi.mean,
        report.multi.std,
        report.speedup()
    )?;
    emit(&report.to_csv(), a.out.as_deref(), stdout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_significant(1.0, 12), "1");
        assert_eq!(format_significant(2.5, 12), "2.5");
        assert_eq!(format_significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_significant(123456789012345.0, 12), "1.23456789012e+14");
        assert_eq!(format_significant(1.5e-7, 12), "1.5e-07");
        assert_eq!(format_significant(-42.0, 12), "-42");
    }

    #[test]
    fn threshold_specs() {
        let g = ValueGrid::from_rows(&[[0.0, 10.0]]).unwrap();
        assert_eq!(parse_thresholds("3", &g).unwrap(), vec![0.0, 5.0, 10.0]);
        assert_eq!(parse_thresholds("1,2.5", &g).unwrap(), vec![1.0, 2.5]);
        assert!(parse_thresholds("2,1", &g).is_err());
        assert!(parse_thresholds("0", &g).is_err());
        assert!(parse_thresholds("x", &g).is_err());
    }

    #[test]
    fn thresholded_diagram_uses_threshold_values() {
        let g = ValueGrid::from_rows(&[[0.0, 5.0, 1.0]]).unwrap();
        let pd = thresholded_pd(&g, &[0.5, 2.0, 6.0]);
        assert_eq!(
            pd.sorted_bars(HomologyDim::Zero),
            vec![(0.5, f64::INFINITY), (2.0, 6.0)]
        );
        // the middle pixel never enters, so the second component never dies
        let pd = thresholded_pd(&g, &[0.5, 2.0]);
        assert_eq!(
            pd.sorted_bars(HomologyDim::Zero),
            vec![(0.5, f64::INFINITY), (2.0, f64::INFINITY)]
        );
    }

    #[test]
    fn size_parsing() {
        assert_eq!(parse_size("224x112").unwrap(), (224, 112));
        assert!(parse_size("224").is_err());
        assert!(parse_size("0x4").is_err());
    }
}
