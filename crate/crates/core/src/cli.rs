//! Command-line frontend: `segment`, `oracle-check`, `bench` and `noise`.
//!
//! Exit codes: 0 success, 1 malformed arguments or invalid parameters,
//! 2 I/O or format errors, 3 internal invariant violations (non-nested level
//! solutions, capacity overflow, oracle mismatch).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classify::{classify, ClassifierResult, Model};
use crate::error::{Error, Result};
use crate::imageio::{
    add_gaussian_noise, complete_edges, grid_edges, labeling_to_image, quantize, read_pnm, read_raw_volume,
    write_pgm, write_raw_volume, Connectivity, GridDims, RasterImage, COMPLETE_GRAPH_CAP,
};
use crate::model::{energy_u1, energy_u2, FeatureField, Instance, LabelSet, Rational};
use crate::oracle::{brute_min_u1, brute_min_u2, random_instance, OracleConfig, RandomSpec};

#[derive(Debug, Parser)]
#[command(name = "levelcut", version, about = "Exact Gibbs segmentation by minimum cuts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Segment a PGM/PPM image or raw 8-bit volume.
    Segment(SegmentArgs),
    /// Compare both classifiers with brute-force minimization on random instances.
    OracleCheck(OracleArgs),
    /// Time the classifiers on synthetic images of growing size and label count.
    Bench(BenchArgs),
    /// Add seeded Gaussian noise to an image.
    Noise(NoiseArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Exp,
    Gauss,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Exp => Model::Exp,
            ModelArg::Gauss => Model::Gauss,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelChoice {
    Exp,
    Gauss,
    Both,
}

impl ModelChoice {
    fn models(self) -> Vec<Model> {
        match self {
            ModelChoice::Exp => vec![Model::Exp],
            ModelChoice::Gauss => vec![Model::Gauss],
            ModelChoice::Both => vec![Model::Exp, Model::Gauss],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct SegmentArgs {
    /// Input image (PGM P2/P5 or PPM P3/P6), or a raw volume with --raw-dims.
    #[arg(long)]
    input: PathBuf,
    /// Treat the input as a headerless 8-bit volume `WxHxD`.
    #[arg(long, value_parser = parse_dims)]
    raw_dims: Option<GridDims>,
    #[arg(long, value_enum, default_value = "exp")]
    model: ModelArg,
    /// Comma-separated admissible labels, strictly increasing.
    #[arg(long, value_delimiter = ',', conflicts_with = "k")]
    labels: Option<Vec<i64>>,
    /// `k + 1` labels spread evenly over [0, L].
    #[arg(long)]
    k: Option<usize>,
    /// Feature range L; defaults to the largest label, or 255 with --k.
    #[arg(short = 'L', long = "feature-max")]
    feature_max: Option<i64>,
    /// Data weight for every pixel (integer or `p/q`).
    #[arg(long, default_value = "1", value_parser = parse_rational)]
    lambda: Rational,
    /// Coupling on every neighbor arc (integer or `p/q`).
    #[arg(long, default_value = "1", value_parser = parse_rational)]
    beta: Rational,
    /// 4 or 8 for images, 6 or 26 for volumes.
    #[arg(long, value_parser = parse_connectivity)]
    connectivity: Option<Connectivity>,
    /// Couple every pixel pair instead of grid neighbors (small inputs only).
    #[arg(long, conflicts_with = "connectivity")]
    complete: bool,
    /// Label image (PGM, or raw bytes for volumes).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report destination; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    /// Leave wall-clock timings out of the report.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Largest pixel count of a random grid.
    #[arg(long, default_value_t = 9)]
    max_n: usize,
    #[arg(long, default_value_t = 5)]
    max_feature: i64,
    #[arg(long, default_value_t = 3)]
    max_k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "both")]
    model: ModelChoice,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Square image sides.
    #[arg(long, value_delimiter = ',', default_value = "32,64,128")]
    sizes: Vec<usize>,
    /// Threshold counts k.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    levels: Vec<usize>,
    #[arg(long, value_enum, default_value = "exp")]
    model: ModelChoice,
    #[arg(long, default_value_t = 20.0)]
    sigma: f64,
    #[arg(long, default_value = "1", value_parser = parse_rational)]
    lambda: Rational,
    #[arg(long, default_value = "1", value_parser = parse_rational)]
    beta: Rational,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct NoiseArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_dims)]
    raw_dims: Option<GridDims>,
}

fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let r: Rational = s.trim().parse().map_err(|_| format!("`{s}` is not an integer or fraction"))?;
    if r < Rational::from(0) {
        return Err(format!("`{s}` is negative"));
    }
    Ok(r)
}

fn parse_connectivity(s: &str) -> std::result::Result<Connectivity, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_dims(s: &str) -> std::result::Result<GridDims, String> {
    let parts: Vec<usize> = s
        .split('x')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| format!("`{s}` is not WxHxD"))?;
    match parts[..] {
        [w, h, d] if w > 0 && h > 0 && d > 0 => Ok(GridDims::volume(w, h, d)),
        _ => Err(format!("`{s}` is not WxHxD with positive sides")),
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Format(_) => 2,
        Error::Invariant(_) | Error::Overflow(_) => 3,
        _ => 1,
    }
}

/// Runs the CLI with process stdout/stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI writing to the given streams; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Segment(a) => segment(&a, out),
        Command::OracleCheck(a) => oracle_check(&a, out),
        Command::Bench(a) => bench(&a, out),
        Command::Noise(a) => noise(&a, out),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Ordered key/value report.
#[derive(Debug, Default)]
struct Report(Vec<(String, String)>);

impl Report {
    fn put(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }

    fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Text => self.0.iter().fold(String::new(), |mut s, (k, v)| {
                let _ = writeln!(s, "{k}={v}");
                s
            }),
            ReportFormat::Json => {
                let map: serde_json::Map<String, serde_json::Value> =
                    self.0.iter().map(|(k, v)| (k.clone(), json_value(v))).collect();
                let mut s = serde_json::to_string_pretty(&map).expect("report map serializes");
                s.push('\n');
                s
            }
        }
    }
}

// integers and decimals become JSON numbers; fractions and lists stay strings
fn json_value(v: &str) -> serde_json::Value {
    if let Ok(i) = v.parse::<i64>() {
        return i.into();
    }
    match v.parse::<f64>() {
        Ok(x) if v.contains('.') && x.is_finite() => x.into(),
        _ => v.into(),
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn read_input(path: &Path, raw_dims: Option<GridDims>) -> Result<RasterImage> {
    let bytes = std::fs::read(path)?;
    match raw_dims {
        Some(d) => read_raw_volume(&bytes, d.width, d.height, d.depth),
        None => read_pnm(&bytes),
    }
}

fn encode_output(image: &RasterImage) -> Result<Vec<u8>> {
    if image.depth > 1 {
        write_raw_volume(image)
    } else {
        write_pgm(image)
    }
}

fn segment(args: &SegmentArgs, out: &mut dyn Write) -> Result<()> {
    let image = read_input(&args.input, args.raw_dims)?;
    let labels = match (&args.labels, args.k) {
        (Some(levels), _) => {
            let max = args.feature_max.unwrap_or_else(|| levels.last().copied().unwrap_or(0));
            LabelSet::new(levels.clone(), max)?
        }
        (None, Some(k)) => LabelSet::uniform(k, args.feature_max.unwrap_or(255))?,
        (None, None) => return Err(Error::InvalidArgument("one of --labels or --k is required".into())),
    };
    let dims = image.dims();
    let features = quantize(&image, labels.max_feature())?;
    let field = FeatureField::uniform(features, args.lambda)?;
    let (edges, graph) = if args.complete {
        (complete_edges(dims.len(), args.beta, COMPLETE_GRAPH_CAP)?, "complete".to_string())
    } else {
        let conn = args.connectivity.unwrap_or(if dims.depth > 1 { Connectivity::Six } else { Connectivity::Four });
        (grid_edges(dims, conn, args.beta)?, format!("grid{conn}"))
    };
    let inst = Instance::new(field, labels, edges)?;
    let model = Model::from(args.model);
    let result = classify(&inst, model)?;
    let recomputed = match model {
        Model::Exp => energy_u1(&inst, &result.labeling)?,
        Model::Gauss => energy_u2(&inst, &result.labeling)?,
    };
    if recomputed != result.energy {
        return Err(Error::Invariant(format!("reported energy {} != recomputed {recomputed}", result.energy)));
    }

    let mut report = Report::default();
    report.put("command", "segment");
    report.put("input", args.input.display());
    report.put("model", model);
    report.put("width", dims.width);
    report.put("height", dims.height);
    report.put("depth", dims.depth);
    report.put("pixels", dims.len());
    report.put("feature_max", inst.labels().max_feature());
    report.put("labels", join(inst.labels().levels()));
    report.put("lambda", args.lambda);
    report.put("beta", args.beta);
    report.put("graph", graph);
    report.put("arcs", inst.edges().len());
    put_result(&mut report, &result, recomputed, !args.no_timings);

    let label_bytes = match &args.output {
        Some(_) => {
            let max = inst.labels().max_feature().clamp(1, u16::MAX as i64) as u16;
            Some(encode_output(&labeling_to_image(&result.labeling, dims, max)?)?)
        }
        None => None,
    };
    let rendered = report.render(args.format);
    // write only after everything succeeded
    if let (Some(path), Some(bytes)) = (&args.output, label_bytes) {
        std::fs::write(path, bytes)?;
    }
    match &args.report {
        Some(path) => std::fs::write(path, rendered)?,
        None => out.write_all(rendered.as_bytes())?,
    }
    Ok(())
}

fn put_result(report: &mut Report, result: &ClassifierResult, recomputed: Rational, timings: bool) {
    let d = &result.diagnostics;
    report.put("energy", result.energy);
    report.put("energy_recomputed", recomputed);
    report.put("cut_values", join(&d.cut_values));
    report.put("network_nodes", d.nodes);
    report.put("network_arcs", d.arcs);
    if timings {
        report.put("build_ms", format!("{:.3}", d.build_time.as_secs_f64() * 1e3));
        report.put("solve_ms", format!("{:.3}", d.solve_time.as_secs_f64() * 1e3));
        report.put("wall_ms", format!("{:.3}", d.wall_time.as_secs_f64() * 1e3));
    }
}

fn oracle_check(args: &OracleArgs, out: &mut dyn Write) -> Result<()> {
    if args.max_n == 0 || args.max_feature < 1 || args.max_k == 0 {
        return Err(Error::InvalidArgument("max-n, max-feature and max-k must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let cfg = OracleConfig::default();
    let models = args.model.models();
    let mut exact = 0;
    for trial in 0..args.trials {
        let width = rand::Rng::random_range(&mut rng, 1..=args.max_n);
        let height = rand::Rng::random_range(&mut rng, 1..=args.max_n / width);
        let spec = RandomSpec {
            width,
            height,
            max_feature: args.max_feature,
            max_k: args.max_k,
            ..RandomSpec::default()
        };
        let inst = random_instance(&mut rng, &spec)?;
        let mut ok = true;
        for &model in &models {
            let result = classify(&inst, model)?;
            let truth = match model {
                Model::Exp => brute_min_u1(&inst, &cfg)?,
                Model::Gauss => brute_min_u2(&inst, &cfg)?,
            };
            if result.energy != truth.energy || result.labeling != truth.lowest() {
                ok = false;
                writeln!(
                    out,
                    "mismatch trial={trial} model={model} energy={} oracle={}",
                    result.energy, truth.energy
                )?;
            }
        }
        exact += ok as usize;
    }
    writeln!(out, "seed={}", args.seed)?;
    writeln!(out, "models={}", join(&models))?;
    writeln!(out, "{exact}/{} exact", args.trials)?;
    if exact != args.trials {
        return Err(Error::Invariant(format!("{} of {} trials disagree with the oracle", args.trials - exact, args.trials)));
    }
    Ok(())
}

/// Blocky test pattern with `k + 1` intensity bands, plus noise.
pub fn synthetic_image(side: usize, k: usize, sigma: f64, seed: u64) -> Result<RasterImage> {
    let bands = k + 1;
    let samples = (0..side * side)
        .map(|p| {
            let (x, y) = (p % side, p / side);
            // concentric squares around the center
            let ring = x.min(y).min(side - 1 - x).min(side - 1 - y);
            let band = (ring * 2 * bands / side.max(1)).min(bands - 1);
            (band * 255 / bands.max(2).saturating_sub(1).max(1)).min(255) as u16
        })
        .collect();
    let clean = RasterImage::new(side, side, 1, 255, samples)?;
    add_gaussian_noise(&clean, sigma, seed)
}

fn bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    writeln!(
        out,
        "{:<6} {:>6} {:>8} {:>3} {:>9} {:>10} {:>10} {:>10} {:>10} {:>12}",
        "model", "side", "pixels", "k", "nodes", "arcs", "build_ms", "solve_ms", "wall_ms", "energy"
    )?;
    for &side in &args.sizes {
        for &k in &args.levels {
            let image = synthetic_image(side, k, args.sigma, args.seed)?;
            let labels = LabelSet::uniform(k, 255)?;
            let field = FeatureField::uniform(quantize(&image, 255)?, args.lambda)?;
            let edges = grid_edges(image.dims(), Connectivity::Four, args.beta)?;
            let inst = Instance::new(field, labels, edges)?;
            for model in args.model.models() {
                let started = Instant::now();
                let r = classify(&inst, model)?;
                let wall = started.elapsed();
                let d = &r.diagnostics;
                writeln!(
                    out,
                    "{:<6} {:>6} {:>8} {:>3} {:>9} {:>10} {:>10.1} {:>10.1} {:>10.1} {:>12}",
                    model.to_string(),
                    side,
                    side * side,
                    k,
                    d.nodes,
                    d.arcs,
                    d.build_time.as_secs_f64() * 1e3,
                    d.solve_time.as_secs_f64() * 1e3,
                    wall.as_secs_f64() * 1e3,
                    r.energy.to_string()
                )?;
            }
        }
    }
    Ok(())
}

fn noise(args: &NoiseArgs, out: &mut dyn Write) -> Result<()> {
    let image = read_input(&args.input, args.raw_dims)?;
    let noisy = add_gaussian_noise(&image, args.sigma, args.seed)?;
    std::fs::write(&args.output, encode_output(&noisy)?)?;
    writeln!(out, "sigma={}\nseed={}\npixels={}", args.sigma, args.seed, noisy.len())?;
    Ok(())
}
