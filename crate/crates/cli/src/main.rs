use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use phwarm::filtration::{
    lower_star_cubical, lower_star_freudenthal, rips_filtration, DistanceMatrix, FilteredComplex, RipsThreshold,
};
use phwarm::formats::{parse_distance_matrix, parse_image, parse_points, write_image, write_points};
use phwarm::state::{read_state, write_state, Metadata, StateFormat};
use phwarm::{
    compute_persistence, update_persistence, Error, ErrorCategory, Field, Mode, PersistenceOptions, Result,
};
use phwarm_cli::optimize::{optimize, OptimizeConfig};
use phwarm_cli::report::{write_csv, RunReport};
use phwarm_cli::suites::{run_suite, Suite, SuiteConfig};
use phwarm_cli::synth::{self, synthesize, SynthKind, Synthetic};

/// Persistent homology of filtered complexes, with warm-start updates.
#[derive(Parser)]
#[command(name = "phwarm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a filtration from a file and compute its barcode.
    Compute(ComputeArgs),
    /// Update a saved state to a new input and report the cost.
    Update(UpdateArgs),
    /// Write a synthetic image or point cloud.
    Synth(SynthArgs),
    /// Run a perturbation suite and write one CSV row per trial.
    Bench(BenchArgs),
    /// Move points by gradient ascent to lengthen their H1 bars.
    Optimize(OptimizeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ComplexArg {
    Freudenthal,
    Cubical,
    Rips,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Homology,
    Cohomology,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Homology => Mode::Homology,
            ModeArg::Cohomology => Mode::Cohomology,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StateFormatArg {
    Binary,
    Text,
}

impl From<StateFormatArg> for StateFormat {
    fn from(f: StateFormatArg) -> StateFormat {
        match f {
            StateFormatArg::Binary => StateFormat::Binary,
            StateFormatArg::Text => StateFormat::Text,
        }
    }
}

fn parse_rmax(s: &str) -> std::result::Result<RipsThreshold, String> {
    match s {
        "inf" => Ok(RipsThreshold::Infinite),
        "enc" => Ok(RipsThreshold::Enclosing),
        _ => match s.parse::<f64>() {
            Ok(r) if r.is_finite() && r >= 0.0 => Ok(RipsThreshold::Value(r)),
            _ => Err(format!("'{s}' is not a radius, 'enc' or 'inf'")),
        },
    }
}

fn rmax_text(t: RipsThreshold) -> String {
    match t {
        RipsThreshold::Infinite => "inf".into(),
        RipsThreshold::Enclosing => "enc".into(),
        RipsThreshold::Value(r) => format!("{r:?}"),
    }
}

#[derive(Args)]
struct ComputeArgs {
    /// Image (freudenthal, cubical) or point cloud (rips).
    input: PathBuf,
    #[arg(long, value_enum)]
    complex: ComplexArg,
    /// Read a distance matrix instead of points (rips only).
    #[arg(long)]
    distances: bool,
    #[arg(long, value_enum, default_value = "homology")]
    mode: ModeArg,
    #[arg(long)]
    clearing: bool,
    /// Keep the basis V, which later updates require.
    #[arg(long)]
    basis: bool,
    /// Highest homology dimension (rips only; grids use their own dimension).
    #[arg(long, default_value_t = 1)]
    max_dim: usize,
    /// Rips threshold: a radius, `enc` or `inf`.
    #[arg(long, default_value = "inf", value_parser = parse_rmax)]
    rmax: RipsThreshold,
    /// Prime modulus of the coefficient field.
    #[arg(long, default_value_t = 2)]
    field: u32,
    /// Barcode destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Save the decompositions here.
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "binary")]
    state_format: StateFormatArg,
    #[arg(long)]
    include_zero_bars: bool,
}

#[derive(Args)]
struct UpdateArgs {
    /// New input, in the same format as the one the state was built from.
    input: PathBuf,
    /// State written by `compute --basis`.
    #[arg(long)]
    state: PathBuf,
    /// Where to save the updated state; defaults to `--state`.
    #[arg(long)]
    state_out: Option<PathBuf>,
    /// Defaults to the format of the state read.
    #[arg(long, value_enum)]
    state_format: Option<StateFormatArg>,
    /// Override the Rips threshold recorded in the state.
    #[arg(long, value_parser = parse_rmax)]
    rmax: Option<RipsThreshold>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV report destination; standard error when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    include_zero_bars: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: SynthKind,
    /// Image side or number of points.
    #[arg(long)]
    n: Option<usize>,
    /// Standard deviation of the additive noise.
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Points, or image side for `levelset`.
    #[arg(long)]
    n: Option<usize>,
    /// Noise scale of the perturbations.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, value_enum, default_value = "cohomology")]
    mode: ModeArg,
    #[arg(long)]
    no_clearing: bool,
    #[arg(long, default_value_t = 2)]
    field: u32,
    /// Skip the scratch recomputation of each target.
    #[arg(long)]
    no_scratch: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UpdateMode {
    Warm,
    Scratch,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Starting cloud; uniform in the unit square when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Points drawn when no input is given.
    #[arg(long, default_value_t = 30)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[arg(long, default_value_t = 0.05)]
    lr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "warm")]
    update: UpdateMode,
    /// Receives loss.csv, initial.txt and final.txt.
    #[arg(long)]
    out_dir: PathBuf,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

/// Writes to `path`, or to standard output.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, text.as_bytes()),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Input(format!("cannot write output: {e}"))),
    }
}

/// How an input file becomes a filtration; saved with the state so that
/// updates rebuild the same kind of complex.
struct Recipe {
    complex: ComplexArg,
    distances: bool,
    max_dim: usize,
    rmax: RipsThreshold,
}

impl Recipe {
    fn metadata(&self, shape: Option<&[usize]>) -> Metadata {
        let mut m = Metadata::new();
        let name = self.complex.to_possible_value().expect("no skipped variants");
        m.insert("complex".into(), name.get_name().into());
        m.insert("distances".into(), self.distances.to_string());
        m.insert("max_dim".into(), self.max_dim.to_string());
        m.insert("rmax".into(), rmax_text(self.rmax));
        if let Some(shape) = shape {
            let dims: Vec<String> = shape.iter().map(usize::to_string).collect();
            m.insert("shape".into(), dims.join("x"));
        }
        m
    }

    fn from_metadata(m: &Metadata) -> Result<Recipe> {
        let get = |k: &str| {
            m.get(k)
                .ok_or_else(|| Error::Input(format!("state does not record '{k}'")))
        };
        let bad = |k: &str| Error::Input(format!("state records an invalid '{k}'"));
        Ok(Recipe {
            complex: ComplexArg::from_str(get("complex")?, false).map_err(|_| bad("complex"))?,
            distances: get("distances")?.parse().map_err(|_| bad("distances"))?,
            max_dim: get("max_dim")?.parse().map_err(|_| bad("max_dim"))?,
            rmax: parse_rmax(get("rmax")?).map_err(|_| bad("rmax"))?,
        })
    }

    /// The filtration and, for images, the grid shape.
    fn build(&self, text: &str) -> Result<(FilteredComplex, Option<Vec<usize>>)> {
        match self.complex {
            ComplexArg::Freudenthal | ComplexArg::Cubical => {
                let grid = parse_image(text)?;
                let c = if self.complex == ComplexArg::Cubical {
                    lower_star_cubical(&grid)?
                } else {
                    lower_star_freudenthal(&grid)?
                };
                Ok((c, Some(grid.shape().to_vec())))
            }
            ComplexArg::Rips => {
                let dist = if self.distances {
                    parse_distance_matrix(text)?
                } else {
                    DistanceMatrix::from_points(&parse_points(text)?)?
                };
                Ok((rips_filtration(&dist, self.rmax, self.max_dim)?, None))
            }
        }
    }
}

fn compute(args: ComputeArgs) -> Result<()> {
    if args.distances && args.complex != ComplexArg::Rips {
        return Err(Error::Usage("--distances applies to rips only".into()));
    }
    let recipe = Recipe {
        complex: args.complex,
        distances: args.distances,
        max_dim: args.max_dim,
        rmax: args.rmax,
    };
    let options = PersistenceOptions {
        mode: args.mode.into(),
        use_clearing: args.clearing,
        keep_basis: args.basis,
        field: Field::new(args.field)?,
    };
    let (complex, shape) = recipe.build(&read_text(&args.input)?)?;
    let (set, bars) = compute_persistence(complex, options)?;
    if let Some(path) = &args.state {
        let mut buf = Vec::new();
        write_state(&set, &recipe.metadata(shape.as_deref()), args.state_format.into(), &mut buf)?;
        write_file(path, &buf)?;
    }
    emit(args.out.as_deref(), &bars.to_text(args.include_zero_bars))
}

fn update(args: UpdateArgs) -> Result<()> {
    let raw = fs::read(&args.state)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", args.state.display())))?;
    let detected = if raw.starts_with(b"PHWS") {
        StateFormat::Binary
    } else {
        StateFormat::Text
    };
    let (mut set, mut meta) = read_state(&mut BufReader::new(raw.as_slice()))?;
    let mut recipe = Recipe::from_metadata(&meta)?;
    if let Some(r) = args.rmax {
        if recipe.complex != ComplexArg::Rips {
            return Err(Error::Usage("--rmax applies to rips states only".into()));
        }
        recipe.rmax = r;
    }
    let (complex, shape) = recipe.build(&read_text(&args.input)?)?;
    if let Some(shape) = &shape {
        let dims: Vec<String> = shape.iter().map(usize::to_string).collect();
        let now = dims.join("x");
        if meta.get("shape") != Some(&now) {
            return Err(Error::Usage(format!(
                "input image is {now} but the state was built from {}",
                meta.get("shape").map_or("an unknown shape", String::as_str)
            )));
        }
    }
    let start = Instant::now();
    let result = update_persistence(&mut set, complex)?;
    let report = RunReport {
        scenario: "update".into(),
        trial: 0,
        stats: result.stats,
        counters: result.counters,
        scratch: None,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        scratch_wall_ms: None,
    };
    meta.extend(recipe.metadata(shape.as_deref()));
    let mut buf = Vec::new();
    let format = args.state_format.map_or(detected, StateFormat::from);
    write_state(&set, &meta, format, &mut buf)?;
    write_file(args.state_out.as_ref().unwrap_or(&args.state), &buf)?;
    emit(args.out.as_deref(), &result.barcode.to_text(args.include_zero_bars))?;
    match &args.report {
        Some(path) => {
            let mut csv = Vec::new();
            write_csv(&[report], &mut csv)?;
            write_file(path, &csv)
        }
        None => write_csv(&[report], std::io::stderr()),
    }
}

fn synth_cmd(args: SynthArgs) -> Result<()> {
    let n = args.n.unwrap_or(args.kind.default_n());
    let data = synthesize(args.kind, n, args.sigma, &mut synth::rng(args.seed, 0))?;
    let text = match data {
        Synthetic::Image(grid) => write_image(&grid),
        Synthetic::Points(points) => write_points(&points),
    };
    emit(args.out.as_deref(), &text)
}

fn bench(args: BenchArgs) -> Result<()> {
    let options = PersistenceOptions {
        mode: args.mode.into(),
        use_clearing: !args.no_clearing,
        keep_basis: true,
        field: Field::new(args.field)?,
    };
    let mut cfg = SuiteConfig::new(args.suite, args.trials, args.seed, options);
    cfg.n = args.n.unwrap_or(cfg.n);
    cfg.sigma = args.sigma.unwrap_or(cfg.sigma);
    cfg.scratch = !args.no_scratch;
    cfg.jobs = args.jobs;
    let rows = run_suite(&cfg)?;
    let mut csv = Vec::new();
    write_csv(&rows, &mut csv)?;
    emit(args.out.as_deref(), &String::from_utf8_lossy(&csv))
}

fn optimize_cmd(args: OptimizeArgs) -> Result<()> {
    let initial = match &args.input {
        Some(path) => parse_points(&read_text(path)?)?,
        None => synth::unit_square(args.n, &mut synth::rng(args.seed, 0)),
    };
    let cfg = OptimizeConfig {
        steps: args.steps,
        lr: args.lr,
        warm: args.update == UpdateMode::Warm,
        ..Default::default()
    };
    let trajectory = optimize(initial, &cfg, &mut |msg| eprintln!("phwarm: warning: {msg}"))?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| Error::Input(format!("cannot create {}: {e}", args.out_dir.display())))?;
    let mut loss = String::from("step,loss,skipped,column_additions,total\n");
    for (step, value) in trajectory.losses.iter().enumerate() {
        let k = trajectory.counters.get(step).copied().unwrap_or_default();
        let skipped = trajectory.skipped.contains(&step) as u8;
        loss.push_str(&format!("{step},{value:?},{skipped},{},{}\n", k.column_additions, k.total()));
    }
    write_file(&args.out_dir.join("loss.csv"), loss.as_bytes())?;
    write_file(&args.out_dir.join("initial.txt"), write_points(&trajectory.initial).as_bytes())?;
    write_file(&args.out_dir.join("final.txt"), write_points(&trajectory.points).as_bytes())
}

fn exit_code(e: &Error) -> u8 {
    match e.category() {
        ErrorCategory::Usage => 1,
        ErrorCategory::Input => 2,
        ErrorCategory::Structural => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Compute(a) => compute(a),
        Command::Update(a) => update(a),
        Command::Synth(a) => synth_cmd(a),
        Command::Bench(a) => bench(a),
        Command::Optimize(a) => optimize_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("phwarm: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
