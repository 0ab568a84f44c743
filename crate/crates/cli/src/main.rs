use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vecmkit::config::{parse_deterministics, PipelineConfig};
use vecmkit::pipeline::{run_pipeline, write_outputs, RunOptions};
use vecmkit::report::{self, FailureCategory, Format, Report, Stage, StageStatus};
use vecmkit::plot_trends;
use vecmkit_core::cointegration::{johansen_test, CointError, DetCase, JohansenSpec};
use vecmkit_core::mcsim::{simulate_quantiles, McConfig, NullStatistic};
use vecmkit_core::series::{Dataset, Deterministics};
use vecmkit_core::unitroot::{classify_integration, AdfError, AdfSpec, InfoCriterion, LagSelection};
use vecmkit_core::vecm::{estimate_vecm, normalize_beta, VecmError, VecmSpec};
use vecmkit_ingest::{read_csv, write_csv, write_csv_to, Cache, CsvLayout, IngestError, WdiClient, WdiQuery, WDI_BASE_URL};

const CACHE_ENV: &str = "VECMKIT_CACHE_DIR";

#[derive(Parser)]
#[command(name = "vecmkit", version, about = "Unit-root, cointegration and VECM analysis of annual series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Download a WDI indicator into the cache and print it as CSV.
    Fetch(FetchArgs),
    /// ADF tests in levels and first differences.
    Adf(AdfArgs),
    /// Johansen trace and maximum-eigenvalue rank tests.
    Johansen(JohansenArgs),
    /// Vector error correction model at a given cointegrating rank.
    Vecm(VecmArgs),
    /// Full analysis driven by a JSON configuration file.
    Pipeline(PipelineArgs),
    /// SVG line chart of selected series.
    Plot(PlotArgs),
    /// Simulated null distribution quantiles.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct FetchArgs {
    #[arg(long)]
    country: String,
    #[arg(long)]
    indicator: String,
    #[arg(long)]
    start: i32,
    #[arg(long)]
    end: i32,
    #[arg(long, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
    /// Serve from the cache only.
    #[arg(long)]
    offline: bool,
    /// Write the series to this CSV file instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, default_value = WDI_BASE_URL, hide = true)]
    wdi_base_url: String,
}

#[derive(Args)]
struct DataArgs {
    /// Wide CSV file: `year,name1,name2,...`.
    #[arg(long)]
    csv: PathBuf,
    /// Columns to use, comma separated; all when omitted.
    #[arg(long, value_delimiter = ',')]
    columns: Vec<String>,
    /// Take natural logs first (names become `l_<name>`).
    #[arg(long)]
    log: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Markdown,
    Text,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Markdown => Format::Markdown,
            OutputFormat::Text => Format::Text,
            OutputFormat::Json => Format::Json,
        }
    }
}

#[derive(Args)]
struct AdfArgs {
    #[command(flatten)]
    data: DataArgs,
    /// none, constant or constant_trend.
    #[arg(long, default_value = "constant_trend", value_parser = parse_deterministics)]
    case: Deterministics,
    /// Fixed number of lagged differences.
    #[arg(long, conflicts_with = "max_lags")]
    lags: Option<usize>,
    /// Largest lag considered by AIC selection.
    #[arg(long, default_value_t = 4)]
    max_lags: usize,
    #[arg(long, default_value_t = 0.05)]
    significance: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

#[derive(Args)]
struct JohansenArgs {
    #[command(flatten)]
    data: DataArgs,
    /// VAR lag order in levels.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Deterministic case 1-5.
    #[arg(long, default_value = "3")]
    det_case: DetCase,
    #[arg(long, default_value_t = 0.05)]
    significance: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

#[derive(Args)]
struct VecmArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value = "3")]
    det_case: DetCase,
    /// Cointegrating rank; the trace-test rank when omitted.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    significance: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

#[derive(Args)]
struct PipelineArgs {
    /// JSON configuration file.
    #[arg(long, short)]
    config: PathBuf,
    #[arg(long)]
    dependent: Option<String>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    significance: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    det_case: Option<DetCase>,
    #[arg(long, value_parser = parse_deterministics)]
    adf_case: Option<Deterministics>,
    #[arg(long)]
    max_lags: Option<usize>,
    #[arg(long)]
    adf_lags: Option<usize>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    start_year: Option<i32>,
    #[arg(long)]
    end_year: Option<i32>,
    /// Serve WDI series from the cache only.
    #[arg(long)]
    offline: bool,
    /// Format of the report echoed to standard output.
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    /// Do not echo the report.
    #[arg(long, short)]
    quiet: bool,
    #[arg(long, default_value = WDI_BASE_URL, hide = true)]
    wdi_base_url: String,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimStatistic {
    Trace,
    MaxEigen,
    Adf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value = "trace")]
    statistic: SimStatistic,
    /// Johansen case 1-5, or for ADF none, constant or constant_trend.
    #[arg(long, default_value = "3")]
    case: String,
    /// Number of common stochastic trends (n - r); ignored for ADF.
    #[arg(long, default_value_t = 1)]
    n_minus_r: usize,
    #[arg(long, default_value_t = 1000)]
    length: usize,
    #[arg(long, default_value_t = 10_000)]
    replications: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write every simulated statistic to this CSV file.
    #[arg(long)]
    draws: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(category: FailureCategory, message: impl std::fmt::Display) -> Self {
        Failure {
            code: category.exit_code() as u8,
            message: message.to_string(),
        }
    }
}

fn usage(m: impl std::fmt::Display) -> Failure {
    Failure::new(FailureCategory::Config, m)
}

fn data(m: impl std::fmt::Display) -> Failure {
    Failure::new(FailureCategory::Data, m)
}

fn adf_failure(e: AdfError) -> Failure {
    match e {
        AdfError::Regression(_) => Failure::new(FailureCategory::Numerical, e),
        AdfError::InvalidSpec(_) | AdfError::UnsupportedCase(_) => usage(e),
        _ => data(e),
    }
}

fn coint_failure(e: CointError) -> Failure {
    match e {
        CointError::TooShort { .. } => data(e),
        CointError::NotPositiveDefinite { .. } | CointError::Regression(_) | CointError::Linalg(_) => {
            Failure::new(FailureCategory::Numerical, e)
        }
        _ => usage(e),
    }
}

fn vecm_failure(e: VecmError) -> Failure {
    match e {
        VecmError::TooShort { .. } | VecmError::Series(_) => data(e),
        VecmError::SingularNormalization(_) | VecmError::Regression(_) => Failure::new(FailureCategory::Numerical, e),
        _ => usage(e),
    }
}

fn ingest_failure(e: IngestError) -> Failure {
    match e {
        IngestError::InvalidQuery(_) => usage(e),
        _ => data(e),
    }
}

fn load(args: &DataArgs) -> Result<Dataset, Failure> {
    let d = read_csv(&args.csv, &CsvLayout::wide()).map_err(ingest_failure)?;
    let d = if args.columns.is_empty() {
        d
    } else {
        let names: Vec<&str> = args.columns.iter().map(String::as_str).collect();
        d.select(&names).map_err(usage)?
    };
    if args.log {
        d.map_series(|s| s.log_transform()).map_err(data)
    } else {
        Ok(d)
    }
}

fn print(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
}

fn single_table_report(d: &Dataset) -> Report {
    let mut r = Report::new(d.names()[0]);
    r.sample = Some(report::Sample {
        start_year: d.start_year(),
        end_year: d.end_year(),
        observations: d.len(),
    });
    r.variables = d
        .names()
        .iter()
        .map(|n| report::VariableInfo {
            name: n.to_string(),
            source: "csv".into(),
            log: n.starts_with("l_"),
        })
        .collect();
    r
}

fn cmd_fetch(a: FetchArgs) -> Result<(), Failure> {
    let mut client = WdiClient::new(&a.wdi_base_url).offline(a.offline);
    if let Some(dir) = a.cache_dir {
        client = client.with_cache(Cache::new(dir));
    }
    let s = client
        .fetch(&WdiQuery::new(&a.country, &a.indicator, a.start, a.end))
        .map_err(ingest_failure)?;
    let d = Dataset::new(vec![s]).map_err(data)?;
    match a.output {
        Some(path) => write_csv(&d, &path, &CsvLayout::long()).map_err(ingest_failure),
        None => write_csv_to(&d, std::io::stdout().lock(), &CsvLayout::long()).map_err(ingest_failure),
    }
}

fn adf_spec(case: Deterministics, lags: Option<usize>, max_lags: usize, significance: f64) -> AdfSpec {
    AdfSpec {
        deterministic: case,
        lags: match lags {
            Some(p) => LagSelection::Fixed(p),
            None => LagSelection::Auto {
                max_lag: max_lags,
                criterion: InfoCriterion::Aic,
            },
        },
        significance,
    }
}

fn cmd_adf(a: AdfArgs) -> Result<(), Failure> {
    let d = load(&a.data)?;
    let spec = adf_spec(a.case, a.lags, a.max_lags, a.significance);
    let orders = d
        .series()
        .iter()
        .map(|s| classify_integration(s, &spec))
        .collect::<Result<Vec<_>, _>>()
        .map_err(adf_failure)?;
    let mut r = single_table_report(&d);
    r.adf_table = Some(report::adf_table(&orders, spec.deterministic, spec.lags, a.significance));
    r.record(Stage::Adf, StageStatus::Completed, format!("{} variable(s)", d.dimension()));
    print(&report::render_report(&r, a.format.into()));
    Ok(())
}

fn johansen_spec(k: usize, det_case: DetCase, significance: f64) -> JohansenSpec {
    JohansenSpec {
        var_lags_k: k,
        det_case,
        significance,
    }
}

fn cmd_johansen(a: JohansenArgs) -> Result<(), Failure> {
    let d = load(&a.data)?;
    let jo = johansen_test(&d, &johansen_spec(a.k, a.det_case, a.significance)).map_err(coint_failure)?;
    let mut r = single_table_report(&d);
    r.johansen_table = Some(report::johansen_table(&jo));
    r.record(Stage::Johansen, StageStatus::Completed, format!("trace rank {}", jo.rank_trace));
    print(&report::render_report(&r, a.format.into()));
    Ok(())
}

fn cmd_vecm(a: VecmArgs) -> Result<(), Failure> {
    let d = load(&a.data)?;
    let jo = johansen_test(&d, &johansen_spec(a.k, a.det_case, a.significance)).map_err(coint_failure)?;
    let rank = a.rank.unwrap_or(jo.rank_trace);
    if rank == 0 || rank >= d.dimension() {
        return Err(Failure {
            code: 4,
            message: format!(
                "cointegrating rank {rank} leaves nothing to estimate for {} variables; pass --rank in 1..{}",
                d.dimension(),
                d.dimension()
            ),
        });
    }
    let beta = normalize_beta(&jo.beta.columns(0..rank)).map_err(vecm_failure)?;
    let spec = VecmSpec {
        rank,
        diff_lags: a.k - 1,
        det_case: a.det_case,
    };
    let fit = estimate_vecm(&d, &spec, &beta).map_err(vecm_failure)?;
    let mut r = single_table_report(&d);
    r.vecm_table = Some(report::vecm_table(&fit));
    r.record(Stage::Vecm, StageStatus::Completed, format!("rank {rank}"));
    print(&report::render_report(&r, a.format.into()));
    Ok(())
}

fn cmd_pipeline(a: PipelineArgs) -> Result<(), Failure> {
    let mut cfg = PipelineConfig::load(&a.config).map_err(usage)?;
    if let Some(v) = a.dependent {
        cfg.dependent = v;
    }
    if let Some(v) = a.output_dir {
        // Flags are relative to the working directory, not the config file.
        cfg.output_dir = std::env::current_dir().map_err(data)?.join(v);
    }
    if let Some(v) = a.significance {
        cfg.significance = v;
    }
    if let Some(v) = a.k {
        cfg.johansen.k = v;
    }
    if let Some(v) = a.det_case {
        cfg.johansen.det_case = v;
    }
    if let Some(v) = a.adf_case {
        cfg.adf.case = v;
    }
    if let Some(v) = a.max_lags {
        cfg.adf.max_lags = v;
    }
    if a.adf_lags.is_some() {
        cfg.adf.lags = a.adf_lags;
    }
    if a.rank.is_some() {
        cfg.vecm.rank = a.rank;
    }
    if a.start_year.is_some() {
        cfg.start_year = a.start_year;
    }
    if a.end_year.is_some() {
        cfg.end_year = a.end_year;
    }
    let opts = RunOptions {
        cache_dir: a.cache_dir,
        offline: a.offline,
        wdi_base_url: a.wdi_base_url,
    };
    let r = run_pipeline(&cfg, &opts);
    let out_dir = cfg.output_path();
    write_outputs(&r, &out_dir).map_err(|e| data(format!("writing {}: {e}", out_dir.display())))?;
    if !a.quiet {
        print(&report::render_report(&r, a.format.into()));
    }
    match r.exit_code() {
        0 => Ok(()),
        code => Err(Failure {
            code: code as u8,
            message: match &r.outcome {
                report::Outcome::GateNotPassed { stage, reason } => format!("stopped at {stage}: {reason}"),
                report::Outcome::Failed { stage, message, .. } => format!("{stage} failed: {message}"),
                report::Outcome::Completed => String::new(),
            },
        }),
    }
}

fn cmd_plot(a: PlotArgs) -> Result<(), Failure> {
    let d = load(&a.data)?;
    let names = d.names();
    let svg = plot_trends(&d, &names).map_err(usage)?;
    std::fs::write(&a.output, svg).map_err(|e| data(format!("{}: {e}", a.output.display())))
}

fn cmd_simulate(a: SimulateArgs) -> Result<(), Failure> {
    let statistic = match a.statistic {
        SimStatistic::Adf => NullStatistic::AdfT(parse_deterministics(&a.case).map_err(usage)?),
        SimStatistic::Trace => NullStatistic::Trace(a.case.parse().map_err(usage)?),
        SimStatistic::MaxEigen => NullStatistic::MaxEigen(a.case.parse().map_err(usage)?),
    };
    let config = McConfig {
        seed: a.seed,
        replications: a.replications,
        sample_length: a.length,
    };
    let rep = simulate_quantiles(statistic, a.n_minus_r, a.length, &config).map_err(usage)?;
    if let Some(path) = &a.draws {
        let file = std::fs::File::create(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
        rep.write_draws_csv(std::io::BufWriter::new(file))
            .map_err(|e| data(format!("{}: {e}", path.display())))?;
    }
    match a.format {
        OutputFormat::Json => {
            #[derive(serde::Serialize)]
            struct Summary<'a> {
                seed: u64,
                replications: usize,
                length: usize,
                failures: usize,
                quantiles: &'a [vecmkit_core::mcsim::Quantile],
            }
            let s = Summary {
                seed: a.seed,
                replications: rep.replications_used,
                length: a.length,
                failures: rep.failures,
                quantiles: &rep.quantiles,
            };
            print(&format!("{}\n", serde_json::to_string_pretty(&s).expect("summary serializes")));
        }
        _ => {
            let mut out = format!(
                "{} replications (seed {}, T = {}), {} failed\nprobability  quantile\n",
                rep.replications_used, a.seed, a.length, rep.failures
            );
            for q in &rep.quantiles {
                out.push_str(&format!("{:>11.2}  {}\n", q.probability, report::fmt6(q.value)));
            }
            print(&out);
        }
    }
    Ok(())
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
        Command::Fetch(a) => cmd_fetch(a),
        Command::Adf(a) => cmd_adf(a),
        Command::Johansen(a) => cmd_johansen(a),
        Command::Vecm(a) => cmd_vecm(a),
        Command::Pipeline(a) => cmd_pipeline(a),
        Command::Plot(a) => cmd_plot(a),
        Command::Simulate(a) => cmd_simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("vecmkit: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
