//! The staged analysis: ingest, validate, log-transform, plot, ADF, Johansen
//! and VECM. Each stage gates the next; a stop still yields a report of the
//! stages that ran.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use vecmkit_core::cointegration::{johansen_test, CointError, JohansenSpec, StatisticKind};
use vecmkit_core::series::{align, Dataset, Series};
use vecmkit_core::unitroot::{classify_integration, AdfError, AdfSpec, Order};
use vecmkit_core::vecm::{estimate_vecm, long_run_ols, normalize_beta, VecmError, VecmSpec};
use vecmkit_ingest::{
    read_csv, validate_dataset, Cache, CsvLayout, IngestError, IssueKind, Severity, ValidationReport, WdiClient,
    WdiQuery, WDI_BASE_URL,
};

use crate::config::{PipelineConfig, Source};
use crate::plot::plot_trends;
use crate::report::{
    self, adf_table, johansen_table, long_run_sentence, rank_sentence, vecm_table, FailureCategory, Figure, Outcome,
    Report, Sample, Stage, StageStatus, VariableInfo,
};

pub const FIGURE_FILE: &str = "figure_trends.svg";

const STAGES: [Stage; 8] = [
    Stage::Config,
    Stage::Ingest,
    Stage::Validate,
    Stage::Transform,
    Stage::Plot,
    Stage::Adf,
    Stage::Johansen,
    Stage::Vecm,
];

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Overrides the configured cache directory.
    pub cache_dir: Option<PathBuf>,
    /// Answer WDI queries from the cache only.
    pub offline: bool,
    pub wdi_base_url: String,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            cache_dir: None,
            offline: false,
            wdi_base_url: WDI_BASE_URL.to_string(),
        }
    }
}

enum Stop {
    Gate(Stage, String),
    Fail(Stage, FailureCategory, String),
}

fn fail(stage: Stage, category: FailureCategory, e: impl std::fmt::Display) -> Stop {
    Stop::Fail(stage, category, e.to_string())
}

fn ingest_category(e: &IngestError) -> FailureCategory {
    match e {
        IngestError::InvalidQuery(_) => FailureCategory::Config,
        _ => FailureCategory::Data,
    }
}

fn adf_category(e: &AdfError) -> FailureCategory {
    match e {
        AdfError::Regression(_) => FailureCategory::Numerical,
        AdfError::TooShort { .. } | AdfError::Series(_) => FailureCategory::Data,
        AdfError::InvalidSpec(_) | AdfError::UnsupportedCase(_) => FailureCategory::Config,
    }
}

fn coint_category(e: &CointError) -> FailureCategory {
    match e {
        CointError::TooShort { .. } => FailureCategory::Data,
        CointError::NotPositiveDefinite { .. } | CointError::Regression(_) | CointError::Linalg(_) => {
            FailureCategory::Numerical
        }
        _ => FailureCategory::Config,
    }
}

fn vecm_category(e: &VecmError) -> FailureCategory {
    match e {
        VecmError::TooShort { .. } | VecmError::Series(_) => FailureCategory::Data,
        VecmError::SingularNormalization(_) | VecmError::Regression(_) => FailureCategory::Numerical,
        _ => FailureCategory::Config,
    }
}

/// Reads every configured variable, named as configured, on the common
/// year range (further limited by `start_year`/`end_year`).
pub fn load_variables(cfg: &PipelineConfig, opts: &RunOptions) -> Result<Dataset, (FailureCategory, String)> {
    let data_err = |e: IngestError| (ingest_category(&e), e.to_string());
    let mut files: HashMap<PathBuf, Dataset> = HashMap::new();
    let cache_dir = opts.cache_dir.clone().or_else(|| cfg.cache_path());
    let mut client = WdiClient::new(&opts.wdi_base_url).offline(opts.offline);
    if let Some(dir) = cache_dir {
        client = client.with_cache(Cache::new(dir));
    }
    let mut series: Vec<Series> = Vec::new();
    for v in cfg.ordered_variables() {
        let s = match &v.source {
            Source::Csv(src) => {
                let path = cfg.resolve(src.path());
                if !files.contains_key(&path) {
                    let d = read_csv(&path, &CsvLayout::wide()).map_err(data_err)?;
                    files.insert(path.clone(), d);
                }
                let column = src.column(&v.name);
                files[&path].get(column).cloned().ok_or_else(|| {
                    let e = IngestError::MissingColumn(format!("{column} in {}", src.path().display()));
                    (FailureCategory::Data, e.to_string())
                })?
            }
            Source::Wdi(w) => {
                let (start, end) = (cfg.start_year.unwrap_or_default(), cfg.end_year.unwrap_or_default());
                let q = WdiQuery::new(&w.country, &w.indicator, start, end);
                client
                    .fetch(&q)
                    .map_err(|e| (ingest_category(&e), format!("{} ({q}): {e}", v.name)))?
            }
        };
        series.push(s.renamed(v.name.clone()));
    }
    let d = align(&series).map_err(|e| (FailureCategory::Data, e.to_string()))?;
    match (cfg.start_year, cfg.end_year) {
        (None, None) => Ok(d),
        (s, e) => d
            .window(s.unwrap_or(i32::MIN), e.unwrap_or(i32::MAX))
            .map_err(|e| (FailureCategory::Data, format!("configured years: {e}"))),
    }
}

/// Structural checks on the whole dataset, positivity only on logged variables.
fn validation(cfg: &PipelineConfig, d: &Dataset) -> ValidationReport {
    let mut report = validate_dataset(d, false);
    let logged: Vec<&str> = cfg.variables.iter().filter(|v| v.log).map(|v| v.name.as_str()).collect();
    if !logged.is_empty() {
        if let Ok(sub) = d.select(&logged) {
            report.issues.extend(
                validate_dataset(&sub, true)
                    .issues
                    .into_iter()
                    .filter(|i| matches!(i.kind, IssueKind::NonPositive { .. })),
            );
        }
    }
    report
}

fn order_list(orders: &[(String, Order)]) -> String {
    orders.iter().map(|(v, o)| format!("{v} {o}")).collect::<Vec<_>>().join(", ")
}

fn execute(cfg: &PipelineConfig, opts: &RunOptions, r: &mut Report) -> Result<(), Stop> {
    cfg.validate().map_err(|e| fail(Stage::Config, FailureCategory::Config, e))?;
    let names: Vec<String> = cfg.ordered_variables().iter().map(|v| cfg.transformed_name(&v.name)).collect();
    r.dependent = cfg.transformed_name(&cfg.dependent);
    r.variables = cfg
        .ordered_variables()
        .iter()
        .map(|v| VariableInfo {
            name: cfg.transformed_name(&v.name),
            source: v.source.describe(),
            log: v.log,
        })
        .collect();
    r.record(
        Stage::Config,
        StageStatus::Completed,
        format!("{} variables, dependent {}", cfg.variables.len(), cfg.dependent),
    );

    let raw = load_variables(cfg, opts).map_err(|(c, m)| Stop::Fail(Stage::Ingest, c, m))?;
    r.sample = Some(Sample {
        start_year: raw.start_year(),
        end_year: raw.end_year(),
        observations: raw.len(),
    });
    r.record(
        Stage::Ingest,
        StageStatus::Completed,
        format!("{} series, {}-{}", raw.dimension(), raw.start_year(), raw.end_year()),
    );

    let checks = validation(cfg, &raw);
    let passed = checks.passed();
    let errors: Vec<String> = checks.errors().map(|i| i.message.clone()).collect();
    for w in checks.warnings() {
        r.narrative.push(format!("Data warning: {}.", w.message));
    }
    let warnings = checks.warnings().count();
    r.validation = Some(checks);
    if !passed {
        return Err(fail(Stage::Validate, FailureCategory::Data, errors.join("; ")));
    }
    r.record(Stage::Validate, StageStatus::Completed, format!("{warnings} warning(s)"));

    let transformed: Vec<Series> = cfg
        .ordered_variables()
        .iter()
        .map(|v| {
            let s = raw.get(&v.name).expect("loaded above");
            if v.log {
                s.log_transform()
            } else {
                Ok(s.clone())
            }
        })
        .collect::<Result<_, _>>()
        .map_err(|e| fail(Stage::Transform, FailureCategory::Data, e))?;
    let d = Dataset::new(transformed).map_err(|e| fail(Stage::Transform, FailureCategory::Data, e))?;
    let logged: Vec<&str> = cfg.variables.iter().filter(|v| v.log).map(|v| v.name.as_str()).collect();
    r.record(
        Stage::Transform,
        StageStatus::Completed,
        if logged.is_empty() {
            "no variable logged".to_string()
        } else {
            format!("natural log of {}", logged.join(", "))
        },
    );

    let plotted: Vec<String> = match &cfg.plot {
        Some(p) => p.iter().map(|n| cfg.transformed_name(n)).collect(),
        None => names.clone(),
    };
    let plotted_refs: Vec<&str> = plotted.iter().map(String::as_str).collect();
    let svg = plot_trends(&d, &plotted_refs).map_err(|e| fail(Stage::Plot, FailureCategory::Config, e))?;
    r.figures.push(Figure {
        file_name: FIGURE_FILE.to_string(),
        title: format!("Graph of {}", plotted.join(" and ")),
        svg,
    });
    r.record(Stage::Plot, StageStatus::Completed, FIGURE_FILE);

    let adf_spec = AdfSpec {
        deterministic: cfg.adf.case,
        lags: cfg.adf.lag_selection(),
        significance: cfg.significance,
    };
    let orders = d
        .series()
        .iter()
        .map(|s| classify_integration(s, &adf_spec))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| fail(Stage::Adf, adf_category(&e), e))?;
    r.adf_table = Some(adf_table(&orders, adf_spec.deterministic, adf_spec.lags, cfg.significance));
    let summary: Vec<(String, Order)> = orders.iter().map(|o| (o.variable.clone(), o.order)).collect();
    if orders.iter().all(|o| o.order == Order::Zero) {
        return Err(Stop::Gate(Stage::Adf, "all I(0): cointegration test not applicable".into()));
    }
    if !orders.iter().all(|o| o.order == Order::One) {
        return Err(Stop::Gate(
            Stage::Adf,
            format!(
                "mixed integration orders ({}): cointegration test not applicable",
                order_list(&summary)
            ),
        ));
    }
    r.narrative.push(format!(
        "Every variable is non-stationary in levels and stationary in first differences ({}), so the cointegration test applies.",
        order_list(&summary)
    ));
    r.record(Stage::Adf, StageStatus::Completed, "all I(1)");

    let spec = JohansenSpec {
        var_lags_k: cfg.johansen.k,
        det_case: cfg.johansen.det_case,
        significance: cfg.significance,
    };
    let jo = johansen_test(&d, &spec).map_err(|e| fail(Stage::Johansen, coint_category(&e), e))?;
    r.johansen_table = Some(johansen_table(&jo));
    let n = d.dimension();
    r.narrative.push(format!("{}.", rank_sentence(StatisticKind::Trace, jo.rank_trace, cfg.significance)));
    if jo.rank_max != jo.rank_trace {
        r.narrative.push(format!(
            "{}; the trace rank is used.",
            rank_sentence(StatisticKind::MaxEigen, jo.rank_max, cfg.significance)
        ));
    }
    let rank = match cfg.vecm.rank {
        Some(rank) if rank == 0 || rank >= n => {
            return Err(fail(
                Stage::Johansen,
                FailureCategory::Config,
                format!("configured rank {rank} must lie in 1..{n}"),
            ))
        }
        Some(rank) => {
            r.narrative.push(format!("Cointegrating rank fixed at {rank} by configuration."));
            rank
        }
        None => jo.rank_trace,
    };
    if rank == 0 {
        return Err(Stop::Gate(
            Stage::Johansen,
            format!("no cointegration at the {:.2} level: VECM not estimated", cfg.significance),
        ));
    }
    if rank >= n {
        return Err(Stop::Gate(
            Stage::Johansen,
            format!("full rank {n}: the levels are jointly stationary, VECM not applicable"),
        ));
    }
    r.record(Stage::Johansen, StageStatus::Completed, format!("rank {rank}"));

    let beta = normalize_beta(&jo.beta.columns(0..rank)).map_err(|e| fail(Stage::Vecm, vecm_category(&e), e))?;
    let vspec = VecmSpec {
        rank,
        diff_lags: cfg.johansen.k - 1,
        det_case: cfg.johansen.det_case,
    };
    let fit = estimate_vecm(&d, &vspec, &beta).map_err(|e| fail(Stage::Vecm, vecm_category(&e), e))?;
    if let Some(ect) = fit.equations.first().and_then(|e| e.ect.first()) {
        let direction = if ect.estimate < 0.0 {
            "negative, so deviations from the long-run relation are corrected"
        } else {
            "not negative, so this equation does not adjust back towards the long-run relation"
        };
        r.narrative.push(format!(
            "Error-correction coefficient in {}: {} (t = {}), {direction}.",
            fit.equations[0].dependent,
            report::fmt6(ect.estimate),
            report::fmt6(ect.t_stat)
        ));
    }
    r.vecm_table = Some(vecm_table(&fit));
    if let Ok(ols) = long_run_ols(&d) {
        r.narrative.push(long_run_sentence(&ols, &r.dependent));
    }
    r.record(
        Stage::Vecm,
        StageStatus::Completed,
        format!("rank {rank}, {} lagged difference(s)", vspec.diff_lags),
    );
    Ok(())
}

pub fn run_pipeline(cfg: &PipelineConfig, opts: &RunOptions) -> Report {
    let mut r = Report::new(&cfg.dependent);
    let result = execute(cfg, opts, &mut r);
    let stopped_at = match result {
        Ok(()) => None,
        Err(Stop::Gate(stage, reason)) => {
            r.record(stage, StageStatus::Stopped, reason.clone());
            r.outcome = Outcome::GateNotPassed { stage, reason };
            Some(stage)
        }
        Err(Stop::Fail(stage, category, message)) => {
            r.record(stage, StageStatus::Failed, message.clone());
            r.outcome = Outcome::Failed {
                stage,
                category,
                message,
            };
            Some(stage)
        }
    };
    if let Some(stage) = stopped_at {
        let pos = STAGES.iter().position(|s| *s == stage).expect("known stage");
        for later in &STAGES[pos + 1..] {
            r.record(*later, StageStatus::Skipped, format!("not run: stopped at {stage}"));
        }
        let why = match &r.outcome {
            Outcome::GateNotPassed { reason, .. } => reason.clone(),
            Outcome::Failed { message, .. } => message.clone(),
            Outcome::Completed => unreachable!(),
        };
        r.narrative.push(format!("Stopped at stage `{stage}`: {why}."));
    }
    r
}

pub const OUTPUT_FILES: [&str; 6] = [
    "report.md",
    "report.json",
    FIGURE_FILE,
    "table_adf.csv",
    "table_johansen.csv",
    "table_vecm.csv",
];

/// Writes every artefact the report holds; returns the paths written.
pub fn write_outputs(r: &Report, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut files: Vec<(String, String)> = vec![
        ("report.md".into(), report::render_markdown(r)),
        ("report.json".into(), report::render_json(r)),
    ];
    for f in &r.figures {
        files.push((f.file_name.clone(), f.svg.clone()));
    }
    if let Some(t) = &r.adf_table {
        files.push(("table_adf.csv".into(), report::adf_csv(t)));
    }
    if let Some(t) = &r.johansen_table {
        files.push(("table_johansen.csv".into(), report::johansen_csv(t)));
    }
    if let Some(t) = &r.vecm_table {
        files.push(("table_vecm.csv".into(), report::vecm_csv(t)));
    }
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}

/// Validation issues as `severity: message` lines.
pub fn describe_issues(v: &ValidationReport) -> Vec<String> {
    v.issues
        .iter()
        .map(|i| {
            let s = match i.severity {
                Severity::Warning => "warning",
                Severity::Error => "error",
            };
            format!("{s}: {}", i.message)
        })
        .collect()
}
