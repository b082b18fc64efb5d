//! `fpp` — fractional Poisson process toolkit.
//!
//! Subcommands: `simulate` (exact paths), `estimate` (method-of-moments from
//! event-series files), `eval` (numeric kernels on a grid, for plotting), and
//! `experiment` (Monte Carlo accuracy / confidence-interval reports).
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric-accuracy
//! error. Every output begins with a metadata record (version, seed, params)
//! for exact replay; randomized commands take `--seed`, falling back to the
//! `FPP_SEED` environment variable, then 0.

use clap::{Args, Parser, Subcommand, ValueEnum};
use fpp_core::error::Error as CoreError;
use fpp_core::estimate::{self, CiMethod};
use fpp_core::fpp::{self, FppParams, Horizon, LimitLawNu};
use fpp_core::harness::{self, ExperimentSpec, ReportFormat};
use fpp_core::series::{self, SeriesOrigin};
use fpp_core::specfun;
use fpp_core::stable::StableLaw;
use fpp_core::UniformSource;
use std::fs;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "fpp", version, about = "Fractional Poisson process toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate fPp arrival times (or the alternative pulse process)
    Simulate(SimulateArgs),
    /// Estimate (nu, mu) from an event-series file
    Estimate(EstimateArgs),
    /// Evaluate a numeric kernel on a grid
    Eval(EvalArgs),
    /// Run a Monte Carlo experiment and emit its report
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EmitKind {
    Arrival,
    Interarrival,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesFormat {
    Csv,
    Jsonl,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    nu: f64,
    #[arg(long)]
    mu: f64,
    /// Number of arrivals (count mode)
    #[arg(long, conflicts_with = "horizon")]
    n: Option<usize>,
    /// Simulate every arrival up to this time (time mode)
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// On-disk representation
    #[arg(long, value_enum, default_value_t = EmitKind::Arrival)]
    emit: EmitKind,
    #[arg(long, value_enum, default_value_t = SeriesFormat::Csv)]
    format: SeriesFormat,
    /// Simulate the fractional-integral pulse process on --grid instead
    #[arg(long, requires = "horizon", requires = "grid")]
    alt_fpp: bool,
    /// Evaluation grid start:stop:points (pulse process only)
    #[arg(long)]
    grid: Option<String>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CiKind {
    Asymptotic,
    Bootstrap,
    Both,
}

#[derive(Args)]
struct EstimateArgs {
    /// Event-series file (CSV or JSONL; format is detected)
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = CiKind::Asymptotic)]
    ci: CiKind,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[arg(long = "bootstrap-B", alias = "bootstrap-b", default_value_t = 100)]
    bootstrap_b: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalFn {
    /// Mittag-Leffler E_nu(z)
    Ml,
    /// Two-parameter Mittag-Leffler E_{alpha,beta}(z)
    Ml2,
    /// One-sided stable density g_alpha(t)
    StablePdf,
    /// Scaling-limit density f_nu(z)
    LimitPdf,
    /// Waiting-time density psi(t)
    InterarrivalPdf,
    /// Waiting-time survival P(T > t)
    Survival,
    /// Count probabilities P(N(t) = n) over n
    Pmf,
}

impl EvalFn {
    fn name(&self) -> &'static str {
        match self {
            EvalFn::Ml => "ml",
            EvalFn::Ml2 => "ml2",
            EvalFn::StablePdf => "stable-pdf",
            EvalFn::LimitPdf => "limit-pdf",
            EvalFn::InterarrivalPdf => "interarrival-pdf",
            EvalFn::Survival => "survival",
            EvalFn::Pmf => "pmf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long = "fn", value_enum)]
    function: EvalFn,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Fixed time for --fn pmf (the grid then runs over n)
    #[arg(long)]
    t: Option<f64>,
    /// Grid start:stop:points, endpoints inclusive
    #[arg(long)]
    grid: String,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFmt {
    Csv,
    Json,
    Markdown,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Spec file path, or a bundled name (table2 .. table9)
    #[arg(long)]
    spec: Option<String>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Comma-separated sample sizes, e.g. 100,1000
    #[arg(long, value_delimiter = ',')]
    sample_sizes: Vec<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    ci_level: Option<f64>,
    #[arg(long = "bootstrap-B", alias = "bootstrap-b")]
    bootstrap_b: Option<usize>,
    /// Overrides the seed from the spec file
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = ReportFmt::Json)]
    format: ReportFmt,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Data(String),
    Accuracy(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Domain(_) => CliError::Usage(e.to_string()),
            CoreError::Accuracy { .. } => CliError::Accuracy(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(format!("io: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Experiment(args) => cmd_experiment(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Accuracy(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("FPP_SEED")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(0)
}

fn write_output(out: Option<&PathBuf>, content: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => std::io::stdout().write_all(content)?,
    }
    Ok(())
}

/// Inclusive grid `start:stop:points`.
fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let usage = || {
        CliError::Usage(format!(
            "grid '{text}' must be start:stop:points with points >= 1"
        ))
    };
    if parts.len() != 3 {
        return Err(usage());
    }
    let start: f64 = parts[0].parse().map_err(|_| usage())?;
    let stop: f64 = parts[1].parse().map_err(|_| usage())?;
    let points: usize = parts[2].parse().map_err(|_| usage())?;
    if points == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(usage());
    }
    if points == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (points - 1) as f64;
    Ok((0..points).map(|i| start + step * i as f64).collect())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let params = FppParams::new(args.nu, args.mu)?;
    let seed = resolve_seed(args.seed);
    let mut rng = UniformSource::new(seed, 0);
    let mut buf = Vec::new();

    if args.alt_fpp {
        let horizon = args.horizon.expect("clap enforces --horizon");
        let grid = parse_grid(args.grid.as_deref().expect("clap enforces --grid"))?;
        if args.format == SeriesFormat::Jsonl {
            return Err(CliError::Usage(
                "--alt-fpp emits a (t, y) table; use --format csv".to_string(),
            ));
        }
        let traj = fpp::simulate_alternative_fpp(&params, horizon, &grid, &mut rng)?;
        let meta = [
            ("fpp", VERSION.to_string()),
            ("seed", seed.to_string()),
            ("nu", args.nu.to_string()),
            ("mu", args.mu.to_string()),
            ("horizon", horizon.to_string()),
            ("process", "alt-fpp".to_string()),
        ];
        let meta_line: Vec<String> = meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(buf, "# {}", meta_line.join(" "))?;
        writeln!(buf, "t,y")?;
        for (t, y) in traj {
            writeln!(buf, "{t:.16e},{y:.16e}")?;
        }
        return write_output(args.out.as_ref(), &buf);
    }

    let horizon = match (args.n, args.horizon) {
        (Some(n), None) => Horizon::Count(n),
        (None, Some(t)) => Horizon::Time(t),
        _ => {
            return Err(CliError::Usage(
                "exactly one of --n or --horizon is required".to_string(),
            ));
        }
    };
    let extent = match horizon {
        Horizon::Count(n) => ("n", n.to_string()),
        Horizon::Time(t) => ("horizon", t.to_string()),
    };
    let meta = [
        ("fpp", VERSION.to_string()),
        ("seed", seed.to_string()),
        ("nu", args.nu.to_string()),
        ("mu", args.mu.to_string()),
        (extent.0, extent.1),
    ];
    match (args.emit, args.format) {
        (EmitKind::Interarrival, SeriesFormat::Csv) => {
            // gaps are written directly; heavy-tailed data need not be
            // representable in arrival form
            let gaps = match horizon {
                Horizon::Count(n) => {
                    if n == 0 {
                        return Err(CliError::Usage("--n must be >= 1".to_string()));
                    }
                    fpp::sample_interarrivals(&params, n, &mut rng)
                }
                Horizon::Time(_) => fpp::simulate_path(&params, horizon, &mut rng)?
                    .interarrivals()
                    .to_vec(),
            };
            series::write_csv(&mut buf, &gaps, SeriesOrigin::Interarrival, &meta)?;
        }
        (EmitKind::Arrival, SeriesFormat::Csv) => {
            let path = fpp::simulate_path(&params, horizon, &mut rng)?;
            series::write_csv(&mut buf, path.arrivals(), SeriesOrigin::Arrival, &meta)?;
        }
        (EmitKind::Arrival, SeriesFormat::Jsonl) => {
            let path = fpp::simulate_path(&params, horizon, &mut rng)?;
            series::write_jsonl(&mut buf, path.arrivals(), &meta)?;
        }
        (EmitKind::Interarrival, SeriesFormat::Jsonl) => {
            return Err(CliError::Usage(
                "jsonl carries arrival times; use --emit arrival or --format csv".to_string(),
            ));
        }
    }
    write_output(args.out.as_ref(), &buf)
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), CliError> {
    if !(args.level > 0.0 && args.level < 1.0) {
        return Err(CliError::Usage(format!(
            "--level {} outside (0,1)",
            args.level
        )));
    }
    let file = fs::File::open(&args.input).map_err(|e| {
        CliError::Data(format!("cannot open {}: {e}", args.input.display()))
    })?;
    let raw = series::read_series(BufReader::new(file))?;
    let gaps = raw.into_gaps()?;
    let seed = resolve_seed(args.seed);

    let mut est = estimate::estimate(&gaps, args.level)?;
    match args.ci {
        CiKind::Asymptotic => {}
        CiKind::Bootstrap | CiKind::Both => {
            let mut rng = UniformSource::new(seed, 0);
            let boot = estimate::bootstrap_ci(&gaps, args.level, args.bootstrap_b, &mut rng)?;
            est.bootstrap_nu_ci = Some(boot.nu_ci);
            est.bootstrap_mu_ci = Some(boot.mu_ci);
            est.bootstrap_degenerate_skipped = Some(boot.degenerate_skipped);
            est.method = if args.ci == CiKind::Both {
                CiMethod::Both
            } else {
                CiMethod::Bootstrap
            };
        }
    }

    // metadata record first, then the estimate fields in schema order
    let mut obj = serde_json::Map::new();
    obj.insert(
        "meta".to_string(),
        serde_json::json!({
            "fpp": VERSION,
            "seed": seed,
            "input": args.input.display().to_string(),
            "level": args.level,
        }),
    );
    let est_value = serde_json::to_value(&est).expect("estimate serializes");
    if let serde_json::Value::Object(fields) = est_value {
        obj.extend(fields);
    }
    let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(obj)).unwrap();
    text.push('\n');
    write_output(args.out.as_ref(), text.as_bytes())
}

struct EvalSpec {
    column: &'static str,
    params: Vec<(&'static str, String)>,
    eval: Box<dyn Fn(f64) -> Result<f64, CoreError>>,
}

fn eval_spec(args: &EvalArgs) -> Result<EvalSpec, CliError> {
    let need = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| CliError::Usage(format!("--fn {:?} requires --{name}", args.function)))
    };
    Ok(match args.function {
        EvalFn::Ml => {
            let nu = need("nu", args.nu)?;
            EvalSpec {
                column: "z",
                params: vec![("nu", nu.to_string())],
                eval: Box::new(move |z| specfun::mittag_leffler(nu, z)),
            }
        }
        EvalFn::Ml2 => {
            let alpha = need("alpha", args.alpha)?;
            let beta = need("beta", args.beta)?;
            EvalSpec {
                column: "z",
                params: vec![("alpha", alpha.to_string()), ("beta", beta.to_string())],
                eval: Box::new(move |z| specfun::mittag_leffler_two_param(alpha, beta, z)),
            }
        }
        EvalFn::StablePdf => {
            let alpha = need("alpha", args.alpha)?;
            let law = StableLaw::new(alpha)?;
            EvalSpec {
                column: "t",
                params: vec![("alpha", alpha.to_string())],
                eval: Box::new(move |t| law.pdf(t)),
            }
        }
        EvalFn::LimitPdf => {
            let nu = need("nu", args.nu)?;
            let law = LimitLawNu::new(nu)?;
            EvalSpec {
                column: "z",
                params: vec![("nu", nu.to_string())],
                eval: Box::new(move |z| law.pdf(z)),
            }
        }
        EvalFn::InterarrivalPdf => {
            let nu = need("nu", args.nu)?;
            let mu = need("mu", args.mu)?;
            let p = FppParams::new(nu, mu)?;
            EvalSpec {
                column: "t",
                params: vec![("nu", nu.to_string()), ("mu", mu.to_string())],
                eval: Box::new(move |t| fpp::interarrival_pdf(&p, t)),
            }
        }
        EvalFn::Survival => {
            let nu = need("nu", args.nu)?;
            let mu = need("mu", args.mu)?;
            let p = FppParams::new(nu, mu)?;
            EvalSpec {
                column: "t",
                params: vec![("nu", nu.to_string()), ("mu", mu.to_string())],
                eval: Box::new(move |t| fpp::survival(&p, t)),
            }
        }
        EvalFn::Pmf => {
            let nu = need("nu", args.nu)?;
            let mu = need("mu", args.mu)?;
            let t = need("t", args.t)?;
            let p = FppParams::new(nu, mu)?;
            EvalSpec {
                column: "n",
                params: vec![
                    ("nu", nu.to_string()),
                    ("mu", mu.to_string()),
                    ("t", t.to_string()),
                ],
                eval: Box::new(move |n| {
                    if n < 0.0 || n.fract() != 0.0 {
                        return Err(CoreError::Domain(format!(
                            "pmf grid point {n} is not a nonnegative integer"
                        )));
                    }
                    fpp::count_pmf(&p, n as u64, t)
                }),
            }
        }
    })
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let grid = parse_grid(&args.grid)?;
    let spec = eval_spec(&args)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &x in &grid {
        rows.push((x, (spec.eval)(x)?));
    }
    let mut buf = Vec::new();
    match args.format {
        TableFormat::Csv => {
            let mut meta: Vec<String> = vec![
                format!("fpp={VERSION}"),
                format!("fn={}", args.function.name()),
            ];
            meta.extend(spec.params.iter().map(|(k, v)| format!("{k}={v}")));
            writeln!(buf, "# {}", meta.join(" "))?;
            writeln!(buf, "{},value", spec.column)?;
            for (x, v) in rows {
                writeln!(buf, "{x:.16e},{v:.16e}")?;
            }
        }
        TableFormat::Json => {
            let mut obj = serde_json::Map::new();
            let mut meta = serde_json::Map::new();
            meta.insert("fpp".to_string(), serde_json::json!(VERSION));
            meta.insert(
                "fn".to_string(),
                serde_json::json!(args.function.name()),
            );
            for (k, v) in &spec.params {
                meta.insert(k.to_string(), serde_json::json!(v));
            }
            obj.insert("meta".to_string(), serde_json::Value::Object(meta));
            obj.insert("column".to_string(), serde_json::json!(spec.column));
            obj.insert(
                "rows".to_string(),
                serde_json::json!(rows.iter().map(|&(x, v)| [x, v]).collect::<Vec<_>>()),
            );
            serde_json::to_writer_pretty(&mut buf, &serde_json::Value::Object(obj)).unwrap();
            buf.push(b'\n');
        }
    }
    write_output(args.out.as_ref(), &buf)
}

const BUNDLED_SPECS: [(&str, &str); 8] = [
    ("table2", include_str!("../specs/table2.json")),
    ("table3", include_str!("../specs/table3.json")),
    ("table4", include_str!("../specs/table4.json")),
    ("table5", include_str!("../specs/table5.json")),
    ("table6", include_str!("../specs/table6.json")),
    ("table7", include_str!("../specs/table7.json")),
    ("table8", include_str!("../specs/table8.json")),
    ("table9", include_str!("../specs/table9.json")),
];

fn load_spec(name: &str) -> Result<ExperimentSpec, CliError> {
    let text = if let Ok(text) = fs::read_to_string(name) {
        text
    } else {
        let stem = name.trim_end_matches(".json");
        BUNDLED_SPECS
            .iter()
            .find(|(n, _)| *n == stem)
            .map(|(_, text)| text.to_string())
            .ok_or_else(|| {
                CliError::Data(format!(
                    "spec '{name}' is neither a readable file nor a bundled name \
                     (table2 .. table9)"
                ))
            })?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("spec parse: {e}")))
}

fn cmd_experiment(args: ExperimentArgs) -> Result<(), CliError> {
    let mut spec = match &args.spec {
        Some(name) => load_spec(name)?,
        None => {
            let need_f = |name: &str, v: Option<f64>| {
                v.ok_or_else(|| CliError::Usage(format!("--{name} required without --spec")))
            };
            let mode = match args.mode.as_deref() {
                Some("accuracy") => harness::Mode::Accuracy,
                Some("ci") => harness::Mode::Ci,
                Some(other) => {
                    return Err(CliError::Usage(format!(
                        "--mode '{other}' must be accuracy or ci"
                    )));
                }
                None => {
                    return Err(CliError::Usage("--mode required without --spec".to_string()));
                }
            };
            if args.sample_sizes.is_empty() {
                return Err(CliError::Usage(
                    "--sample-sizes required without --spec".to_string(),
                ));
            }
            ExperimentSpec {
                nu: need_f("nu", args.nu)?,
                mu: need_f("mu", args.mu)?,
                sample_sizes: args.sample_sizes.clone(),
                replicates: args.replicates.ok_or_else(|| {
                    CliError::Usage("--replicates required without --spec".to_string())
                })?,
                seed: resolve_seed(args.seed),
                ci_level: args.ci_level.unwrap_or(0.95),
                bootstrap_b: args.bootstrap_b.unwrap_or(100),
                mode,
            }
        }
    };
    if args.spec.is_some() {
        if let Some(seed) = args.seed {
            spec.seed = seed;
        }
        if let Some(level) = args.ci_level {
            spec.ci_level = level;
        }
        if let Some(b) = args.bootstrap_b {
            spec.bootstrap_b = b;
        }
    }
    let report = harness::run(&spec)?;
    let format = match args.format {
        ReportFmt::Csv => ReportFormat::Csv,
        ReportFmt::Json => ReportFormat::Json,
        ReportFmt::Markdown => ReportFormat::Markdown,
    };
    let mut text = format!(
        "# fpp={VERSION} seed={} nu={} mu={} mode={:?}\n",
        spec.seed, spec.nu, spec.mu, spec.mode
    )
    .to_lowercase();
    text.push_str(&harness::report_emit(&report, format));
    write_output(args.out.as_ref(), text.as_bytes())
}
