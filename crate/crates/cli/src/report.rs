//! Report model, its construction from estimation results, and rendering to
//! markdown, plain text, JSON and CSV.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use vecmkit_core::cointegration::{DetCase, JohansenResult, StatisticKind};
use vecmkit_core::linreg::OlsFit;
use vecmkit_core::series::Deterministics;
use vecmkit_core::unitroot::{AdfResult, IntegrationOrder, LagSelection, Order, Stage as AdfStage};
use vecmkit_core::vecm::{Coefficient, VecmFit};
use vecmkit_ingest::ValidationReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Markdown,
    Text,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "markdown" | "md" => Ok(Format::Markdown),
            "text" | "txt" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (markdown, text, json)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Config,
    Ingest,
    Validate,
    Transform,
    Plot,
    Adf,
    Johansen,
    Vecm,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Validate => "validate",
            Stage::Transform => "log-transform",
            Stage::Plot => "plot",
            Stage::Adf => "adf",
            Stage::Johansen => "johansen",
            Stage::Vecm => "vecm",
        }
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Completed,
    Stopped,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub status: StageStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureCategory {
    Config,
    Data,
    Numerical,
}

impl FailureCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            FailureCategory::Config => 1,
            FailureCategory::Data => 2,
            FailureCategory::Numerical => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Completed,
    GateNotPassed {
        stage: Stage,
        reason: String,
    },
    Failed {
        stage: Stage,
        category: FailureCategory,
        message: String,
    },
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Completed => 0,
            Outcome::GateNotPassed { .. } => 4,
            Outcome::Failed { category, .. } => category.exit_code(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub start_year: i32,
    pub end_year: i32,
    pub observations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableInfo {
    /// Name after transformation, e.g. `l_gdp`.
    pub name: String,
    pub source: String,
    pub log: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfRow {
    pub variable: String,
    pub parameter: String,
    #[serde(with = "crate::num")]
    pub t_stat: f64,
    #[serde(with = "crate::num")]
    pub p_value: f64,
    #[serde(with = "crate::num")]
    pub critical_value: f64,
    pub lags: usize,
    pub t_eff: usize,
    pub decision: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderRow {
    pub variable: String,
    pub order: Order,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfTable {
    pub deterministic: Deterministics,
    pub lag_selection: LagSelection,
    #[serde(with = "crate::num")]
    pub significance: f64,
    pub rows: Vec<AdfRow>,
    pub orders: Vec<OrderRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohansenRow {
    pub hypothesis: String,
    #[serde(with = "crate::num")]
    pub eigenvalue: f64,
    #[serde(with = "crate::num")]
    pub statistic: f64,
    #[serde(with = "crate::num")]
    pub critical_value: f64,
    #[serde(with = "crate::num")]
    pub p_value: f64,
    pub rejected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledRow {
    pub label: String,
    #[serde(with = "crate::num::vec")]
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohansenTable {
    pub det_case: DetCase,
    pub k: usize,
    pub t_eff: usize,
    #[serde(with = "crate::num")]
    pub significance: f64,
    pub trace: Vec<JohansenRow>,
    pub max_eigen: Vec<JohansenRow>,
    pub rank_trace: usize,
    pub rank_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    #[serde(with = "crate::num")]
    pub coefficient: f64,
    #[serde(with = "crate::num")]
    pub std_error: f64,
    #[serde(with = "crate::num")]
    pub t_stat: f64,
}

impl From<&Coefficient> for Cell {
    fn from(c: &Coefficient) -> Self {
        Cell {
            coefficient: c.estimate,
            std_error: c.std_error,
            t_stat: c.t_stat,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VecmRow {
    pub label: String,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VecmTable {
    pub rank: usize,
    pub diff_lags: usize,
    pub det_case: DetCase,
    pub t_eff: usize,
    pub relations: Vec<String>,
    /// Normalised cointegrating vectors; one value per relation.
    pub cointegrating_equation: Vec<LabeledRow>,
    pub equations: Vec<String>,
    pub rows: Vec<VecmRow>,
    /// R², adjusted R², residual sum of squares and F, one value per equation.
    pub summary: Vec<LabeledRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure {
    pub file_name: String,
    pub title: String,
    pub svg: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub dependent: String,
    pub variables: Vec<VariableInfo>,
    pub sample: Option<Sample>,
    pub validation: Option<ValidationReport>,
    pub adf_table: Option<AdfTable>,
    pub johansen_table: Option<JohansenTable>,
    pub vecm_table: Option<VecmTable>,
    pub figures: Vec<Figure>,
    pub stages: Vec<StageRecord>,
    pub narrative: Vec<String>,
    pub outcome: Outcome,
}

impl Report {
    pub fn new(dependent: &str) -> Self {
        Report {
            tool: format!("vecmkit {}", env!("CARGO_PKG_VERSION")),
            dependent: dependent.to_string(),
            variables: Vec::new(),
            sample: None,
            validation: None,
            adf_table: None,
            johansen_table: None,
            vecm_table: None,
            figures: Vec::new(),
            stages: Vec::new(),
            narrative: Vec::new(),
            outcome: Outcome::Completed,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code()
    }

    pub fn record(&mut self, stage: Stage, status: StageStatus, detail: impl Into<String>) {
        self.stages.push(StageRecord {
            stage,
            status,
            detail: detail.into(),
        });
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }
}

// Construction from estimation results.

fn decision(reject: bool) -> &'static str {
    if reject {
        "Stationary"
    } else {
        "Non-stationary"
    }
}

fn adf_row(r: &AdfResult, significance: f64) -> AdfRow {
    AdfRow {
        variable: r.variable.clone(),
        parameter: match r.stage {
            AdfStage::Level => "Level".to_string(),
            AdfStage::FirstDifference => "1st difference".to_string(),
        },
        t_stat: r.t_stat,
        p_value: r.p_value,
        critical_value: r.critical_values.at(significance).unwrap_or(r.critical_values.five),
        lags: r.lags_used,
        t_eff: r.t_eff,
        decision: decision(r.reject_unit_root).to_string(),
    }
}

pub fn adf_table(results: &[IntegrationOrder], deterministic: Deterministics, lags: LagSelection, significance: f64) -> AdfTable {
    let mut rows = Vec::with_capacity(2 * results.len());
    for r in results {
        rows.push(adf_row(&r.level_result, significance));
    }
    for r in results {
        rows.push(adf_row(&r.diff_result, significance));
    }
    AdfTable {
        deterministic,
        lag_selection: lags,
        significance,
        rows,
        orders: results
            .iter()
            .map(|r| OrderRow {
                variable: r.variable.clone(),
                order: r.order,
            })
            .collect(),
    }
}

fn hypothesis_label(r: usize) -> String {
    if r == 0 {
        "None".to_string()
    } else {
        format!("At most {r}")
    }
}

pub fn johansen_table(r: &JohansenResult) -> JohansenTable {
    let rows = |kind: StatisticKind| -> Vec<JohansenRow> {
        let (stats, pvals) = match kind {
            StatisticKind::Trace => (&r.trace_stats, &r.p_values_trace),
            StatisticKind::MaxEigen => (&r.max_eigen_stats, &r.p_values_max),
        };
        r.selected_critical_values(kind)
            .into_iter()
            .enumerate()
            .map(|(i, cv)| JohansenRow {
                hypothesis: hypothesis_label(i),
                eigenvalue: r.eigenvalues[i],
                statistic: stats[i],
                critical_value: cv,
                p_value: pvals[i],
                rejected: stats[i] > cv,
            })
            .collect()
    };
    JohansenTable {
        det_case: r.spec.det_case,
        k: r.spec.var_lags_k,
        t_eff: r.t_eff,
        significance: r.spec.significance,
        trace: rows(StatisticKind::Trace),
        max_eigen: rows(StatisticKind::MaxEigen),
        rank_trace: r.rank_trace,
        rank_max: r.rank_max,
    }
}

pub fn vecm_table(fit: &VecmFit) -> VecmTable {
    let relations: Vec<String> = fit
        .equations
        .first()
        .map(|e| e.ect.iter().map(|c| c.label.clone()).collect())
        .unwrap_or_default();
    let cointegrating_equation = fit
        .beta_labels
        .iter()
        .enumerate()
        .map(|(i, label)| LabeledRow {
            label: label.clone(),
            values: fit.beta.row(i).to_vec(),
        })
        .collect();
    let labels: Vec<String> = fit
        .equations
        .first()
        .map(|e| e.coefficients().map(|c| c.label.clone()).collect())
        .unwrap_or_default();
    let rows = labels
        .iter()
        .enumerate()
        .map(|(j, label)| VecmRow {
            label: label.clone(),
            cells: fit
                .equations
                .iter()
                .map(|e| Cell::from(e.coefficients().nth(j).expect("equations share regressors")))
                .collect(),
        })
        .collect();
    let summary_row = |label: &str, f: &dyn Fn(&vecmkit_core::vecm::VecmEquation) -> f64| LabeledRow {
        label: label.to_string(),
        values: fit.equations.iter().map(f).collect(),
    };
    VecmTable {
        rank: fit.spec.rank,
        diff_lags: fit.spec.diff_lags,
        det_case: fit.spec.det_case,
        t_eff: fit.t_eff,
        relations,
        cointegrating_equation,
        equations: fit.equations.iter().map(|e| e.dependent.clone()).collect(),
        rows,
        summary: vec![
            summary_row("R-squared", &|e| e.r2),
            summary_row("Adj. R-squared", &|e| e.adj_r2),
            summary_row("Sum sq. resids", &|e| e.rss),
            summary_row("F-statistic", &|e| e.f_stat),
        ],
    }
}

/// One-line description of a static long-run regression for the narrative.
pub fn long_run_sentence(fit: &OlsFit, dependent: &str) -> String {
    let terms: Vec<String> = fit
        .labels
        .iter()
        .zip(&fit.coefficients)
        .map(|(l, c)| format!("{} {}", fmt6(*c), l))
        .collect();
    format!(
        "Static long-run regression: {dependent} = {} (R-squared {}, {} observations). Its standard errors are not valid for inference on I(1) data; it is shown for comparison with the cointegrating vector only.",
        terms.join(" + "),
        fmt6(fit.r2),
        fit.n_obs
    )
}

// Number formatting.

fn fmt_fixed(x: f64, decimals: usize) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.decimals$}")
    }
}

/// Table precision: six decimals.
pub fn fmt6(x: f64) -> String {
    fmt_fixed(x, 6)
}

/// VECM cell lines: coefficient to six decimals, standard error and t
/// statistic to five, as in the usual stacked layout.
pub fn cell_lines(c: &Cell) -> [String; 3] {
    [
        fmt6(c.coefficient),
        format!("({})", fmt_fixed(c.std_error, 5)),
        format!("[{}]", fmt_fixed(c.t_stat, 5)),
    ]
}

pub fn format_cell(c: &Cell) -> String {
    cell_lines(c).join(" ")
}

fn fmt_sig(x: f64) -> String {
    format!("{x:.2}")
}

fn det_case_description(c: DetCase) -> String {
    c.to_string()
}

fn deterministic_description(d: Deterministics) -> &'static str {
    match d {
        Deterministics::None => "no deterministic terms",
        Deterministics::Constant => "constant",
        Deterministics::ConstantTrend => "constant and linear trend",
    }
}

fn lag_description(l: LagSelection) -> String {
    match l {
        LagSelection::Fixed(p) => format!("{p} lagged difference(s)"),
        LagSelection::Auto { max_lag, criterion } => {
            format!("lags chosen by {} up to {max_lag}", format!("{criterion:?}").to_uppercase())
        }
    }
}

pub fn rank_sentence(kind: StatisticKind, rank: usize, significance: f64) -> String {
    let test = match kind {
        StatisticKind::Trace => "Trace",
        StatisticKind::MaxEigen => "Max-eigenvalue",
    };
    if rank == 0 {
        format!("{test} test indicates no cointegration at the {} level", fmt_sig(significance))
    } else {
        format!(
            "{test} test indicates {rank} cointegrating eqn(s) at the {} level",
            fmt_sig(significance)
        )
    }
}

// Neutral table model shared by the markdown and text renderers.

struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
    /// Leading text columns; the rest are right-aligned numbers.
    left: usize,
}

impl Table {
    fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            left: 1,
        }
    }

    fn left_aligned(mut self, left: usize) -> Self {
        self.left = left;
        self
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn markdown(&self) -> String {
        let escape = |s: &str| s.replace('|', "\\|");
        let mut out = String::new();
        let _ = writeln!(out, "| {} |", self.headers.iter().map(|h| escape(h)).collect::<Vec<_>>().join(" | "));
        let align: Vec<&str> = (0..self.headers.len()).map(|i| if i < self.left { ":---" } else { "---:" }).collect();
        let _ = writeln!(out, "| {} |", align.join(" | "));
        for row in &self.rows {
            let _ = writeln!(out, "| {} |", row.iter().map(|c| escape(c)).collect::<Vec<_>>().join(" | "));
        }
        out
    }

    fn text(&self) -> String {
        let cols = self.headers.len();
        let widths: Vec<usize> = (0..cols)
            .map(|j| {
                self.rows
                    .iter()
                    .map(|r| r[j].chars().count())
                    .chain(std::iter::once(self.headers[j].chars().count()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| -> String {
            cells
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    if j < self.left {
                        format!("{c:<w$}", w = widths[j])
                    } else {
                        format!("{c:>w$}", w = widths[j])
                    }
                })
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let total = widths.iter().sum::<usize>() + 2 * cols.saturating_sub(1);
        let rule = "-".repeat(total);
        let mut out = String::new();
        let _ = writeln!(out, "{rule}");
        let _ = writeln!(out, "{}", line(&self.headers));
        let _ = writeln!(out, "{rule}");
        for row in &self.rows {
            let _ = writeln!(out, "{}", line(row));
        }
        let _ = writeln!(out, "{rule}");
        out
    }
}

fn adf_tables(t: &AdfTable) -> (Vec<String>, Table) {
    let notes = vec![format!(
        "Test regression with {}; {}. Decision at the {} level.",
        deterministic_description(t.deterministic),
        lag_description(t.lag_selection),
        fmt_sig(t.significance)
    )];
    let mut table = Table::new(&["Variable", "Parameter", "t-statistics", "P-Value", "Decision"]).left_aligned(2);
    for r in &t.rows {
        table.push(vec![
            r.variable.clone(),
            r.parameter.clone(),
            fmt6(r.t_stat),
            fmt6(r.p_value),
            r.decision.clone(),
        ]);
    }
    (notes, table)
}

fn orders_sentence(t: &AdfTable) -> String {
    let parts: Vec<String> = t.orders.iter().map(|o| format!("{} {}", o.variable, o.order)).collect();
    format!("Orders of integration: {}.", parts.join(", "))
}

fn johansen_tables(t: &JohansenTable) -> Vec<(String, Table, Vec<String>)> {
    let sig = fmt_sig(t.significance);
    let build = |rows: &[JohansenRow], stat_header: &str, kind: StatisticKind, rank: usize| {
        let cv_header = format!("{sig} Critical Value");
        let mut table = Table::new(&["Hypothesized No. of CE(s)", "Eigenvalue", stat_header, &cv_header, "Prob.**"]);
        for r in rows {
            let star = if r.rejected { " *" } else { "" };
            table.push(vec![
                format!("{}{star}", r.hypothesis),
                fmt6(r.eigenvalue),
                fmt6(r.statistic),
                fmt6(r.critical_value),
                fmt6(r.p_value),
            ]);
        }
        let notes = vec![
            rank_sentence(kind, rank, t.significance),
            format!("* denotes rejection of the hypothesis at the {sig} level"),
            "** approximate p-values from gamma distributions matched to the null moments".to_string(),
        ];
        (table, notes)
    };
    let (trace, trace_notes) = build(&t.trace, "Trace Statistic", StatisticKind::Trace, t.rank_trace);
    let (max, max_notes) = build(&t.max_eigen, "Max-Eigen Statistic", StatisticKind::MaxEigen, t.rank_max);
    vec![
        ("Unrestricted Cointegration Rank Test (Trace)".to_string(), trace, trace_notes),
        ("Unrestricted Cointegration Rank Test (Maximum Eigenvalue)".to_string(), max, max_notes),
    ]
}

fn vecm_tables(t: &VecmTable) -> (Table, Table) {
    let mut header = vec!["Cointegrating Eq:"];
    header.extend(t.relations.iter().map(String::as_str));
    let mut coint = Table::new(&header);
    for row in &t.cointegrating_equation {
        let mut cells = vec![row.label.clone()];
        cells.extend(row.values.iter().map(|v| fmt6(*v)));
        coint.push(cells);
    }
    let mut header = vec!["Error Correction:"];
    header.extend(t.equations.iter().map(String::as_str));
    let mut ec = Table::new(&header);
    for row in &t.rows {
        let lines: Vec<[String; 3]> = row.cells.iter().map(cell_lines).collect();
        for k in 0..3 {
            let mut cells = vec![if k == 0 { row.label.clone() } else { String::new() }];
            cells.extend(lines.iter().map(|l| l[k].clone()));
            ec.push(cells);
        }
    }
    for row in &t.summary {
        let mut cells = vec![row.label.clone()];
        cells.extend(row.values.iter().map(|v| fmt6(*v)));
        ec.push(cells);
    }
    (coint, ec)
}

fn variables_sentence(r: &Report) -> String {
    let names: Vec<String> = r
        .variables
        .iter()
        .map(|v| {
            if v.name == r.dependent {
                format!("{} (dependent)", v.name)
            } else {
                v.name.clone()
            }
        })
        .collect();
    names.join(", ")
}

fn outcome_sentence(o: &Outcome) -> String {
    match o {
        Outcome::Completed => "Pipeline completed all stages.".to_string(),
        Outcome::GateNotPassed { stage, reason } => format!("Pipeline stopped at stage `{stage}`: {reason}"),
        Outcome::Failed {
            stage,
            category,
            message,
        } => format!("Pipeline failed at stage `{stage}` ({category:?} error): {message}"),
    }
}

fn status_name(s: StageStatus) -> &'static str {
    match s {
        StageStatus::Completed => "completed",
        StageStatus::Stopped => "stopped",
        StageStatus::Failed => "failed",
        StageStatus::Skipped => "skipped",
    }
}

pub fn render_markdown(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Cointegration analysis report\n");
    let _ = writeln!(out, "Generated by {}.\n", r.tool);
    if !r.variables.is_empty() {
        let _ = writeln!(out, "Variables: {}.", variables_sentence(r));
    }
    if let Some(s) = &r.sample {
        let _ = writeln!(out, "Sample: {}-{} ({} observations).", s.start_year, s.end_year, s.observations);
    }
    let _ = writeln!(out, "\n**Outcome:** {}\n", outcome_sentence(&r.outcome));

    if !r.stages.is_empty() {
        let _ = writeln!(out, "## Stages\n");
        let mut stages = Table::new(&["Stage", "Status", "Detail"]).left_aligned(3);
        for s in &r.stages {
            stages.push(vec![s.stage.to_string(), status_name(s.status).to_string(), s.detail.clone()]);
        }
        out.push_str(&stages.markdown());
    }

    if let Some(v) = &r.validation {
        if !v.issues.is_empty() {
            let _ = writeln!(out, "\n## Data validation\n");
            for i in &v.issues {
                let _ = writeln!(out, "- {:?}: {}", i.severity, i.message);
            }
        }
    }

    for f in &r.figures {
        let _ = writeln!(out, "\n## Figure 1. {}\n", f.title);
        let _ = writeln!(out, "![{}]({})", f.title, f.file_name);
    }

    if let Some(t) = &r.adf_table {
        let _ = writeln!(out, "\n## Table 1. Results of ADF test\n");
        let (notes, table) = adf_tables(t);
        for n in notes {
            let _ = writeln!(out, "{n}\n");
        }
        out.push_str(&table.markdown());
        let _ = writeln!(out, "\n{}", orders_sentence(t));
    }

    if let Some(t) = &r.johansen_table {
        let _ = writeln!(out, "\n## Table 2. Johansen cointegration test\n");
        let _ = writeln!(
            out,
            "Deterministic specification: {}. VAR lag order k = {}; {} effective observations.",
            det_case_description(t.det_case),
            t.k,
            t.t_eff
        );
        for (title, table, notes) in johansen_tables(t) {
            let _ = writeln!(out, "\n### {title}\n");
            out.push_str(&table.markdown());
            out.push('\n');
            for n in notes {
                let _ = writeln!(out, "{n}  ");
            }
        }
    }

    if let Some(t) = &r.vecm_table {
        let _ = writeln!(out, "\n## Table 3. Vector error correction estimates\n");
        let _ = writeln!(
            out,
            "Cointegrating rank {}; {} lagged difference(s); {}; {} effective observations. Cells show the coefficient, (standard error) and [t-statistic].\n",
            t.rank,
            t.diff_lags,
            det_case_description(t.det_case),
            t.t_eff
        );
        let (coint, ec) = vecm_tables(t);
        out.push_str(&coint.markdown());
        out.push('\n');
        out.push_str(&ec.markdown());
    }

    if !r.narrative.is_empty() {
        let _ = writeln!(out, "\n## Summary\n");
        for line in &r.narrative {
            let _ = writeln!(out, "- {line}");
        }
    }
    out
}

pub fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "COINTEGRATION ANALYSIS REPORT ({})", r.tool);
    if !r.variables.is_empty() {
        let _ = writeln!(out, "Variables: {}", variables_sentence(r));
    }
    if let Some(s) = &r.sample {
        let _ = writeln!(out, "Sample: {}-{} ({} observations)", s.start_year, s.end_year, s.observations);
    }
    let _ = writeln!(out, "Outcome: {}", outcome_sentence(&r.outcome));
    let _ = writeln!(out);
    for s in &r.stages {
        let _ = writeln!(out, "  [{}] {}: {}", status_name(s.status), s.stage, s.detail);
    }
    if let Some(v) = &r.validation {
        for i in &v.issues {
            let _ = writeln!(out, "  {:?}: {}", i.severity, i.message);
        }
    }
    if let Some(t) = &r.adf_table {
        let _ = writeln!(out, "\nTable 1. Results of ADF test");
        let (notes, table) = adf_tables(t);
        out.push_str(&table.text());
        for n in notes {
            let _ = writeln!(out, "{n}");
        }
        let _ = writeln!(out, "{}", orders_sentence(t));
    }
    if let Some(t) = &r.johansen_table {
        let _ = writeln!(
            out,
            "\nTable 2. Johansen cointegration test ({}, k = {}, {} effective observations)",
            det_case_description(t.det_case),
            t.k,
            t.t_eff
        );
        for (title, table, notes) in johansen_tables(t) {
            let _ = writeln!(out, "\n{title}");
            out.push_str(&table.text());
            for n in notes {
                let _ = writeln!(out, " {n}");
            }
        }
    }
    if let Some(t) = &r.vecm_table {
        let _ = writeln!(
            out,
            "\nTable 3. Vector error correction estimates (rank {}, {} lagged difference(s), {})",
            t.rank,
            t.diff_lags,
            det_case_description(t.det_case)
        );
        let (coint, ec) = vecm_tables(t);
        out.push_str(&coint.text());
        out.push_str(&ec.text());
        let _ = writeln!(out, "Standard errors in ( ) and t-statistics in [ ]");
    }
    if !r.narrative.is_empty() {
        let _ = writeln!(out, "\nSummary");
        for line in &r.narrative {
            let _ = writeln!(out, "  - {line}");
        }
    }
    out
}

pub fn render_json(r: &Report) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serializes");
    s.push('\n');
    s
}

pub fn parse_json(text: &str) -> Result<Report, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn render_report(r: &Report, format: Format) -> String {
    match format {
        Format::Markdown => render_markdown(r),
        Format::Text => render_text(r),
        Format::Json => render_json(r),
    }
}

// CSV tables, full precision.

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_num(x: f64) -> String {
    fmt_fixed_full(x)
}

fn fmt_fixed_full(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        fmt_fixed(x, 0)
    }
}

fn csv_line(out: &mut String, fields: &[String]) {
    let _ = writeln!(out, "{}", fields.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(","));
}

pub fn adf_csv(t: &AdfTable) -> String {
    let mut out = String::new();
    csv_line(
        &mut out,
        &["variable", "parameter", "t_stat", "p_value", "critical_value", "lags", "t_eff", "decision"].map(String::from),
    );
    for r in &t.rows {
        csv_line(
            &mut out,
            &[
                r.variable.clone(),
                r.parameter.clone(),
                csv_num(r.t_stat),
                csv_num(r.p_value),
                csv_num(r.critical_value),
                r.lags.to_string(),
                r.t_eff.to_string(),
                r.decision.clone(),
            ],
        );
    }
    out
}

pub fn johansen_csv(t: &JohansenTable) -> String {
    let mut out = String::new();
    csv_line(
        &mut out,
        &["test", "hypothesis", "eigenvalue", "statistic", "critical_value", "p_value", "rejected"].map(String::from),
    );
    for (test, rows) in [("trace", &t.trace), ("max_eigen", &t.max_eigen)] {
        for r in rows.iter() {
            csv_line(
                &mut out,
                &[
                    test.to_string(),
                    r.hypothesis.clone(),
                    csv_num(r.eigenvalue),
                    csv_num(r.statistic),
                    csv_num(r.critical_value),
                    csv_num(r.p_value),
                    r.rejected.to_string(),
                ],
            );
        }
    }
    out
}

pub fn vecm_csv(t: &VecmTable) -> String {
    let mut out = String::new();
    csv_line(&mut out, &["equation", "term", "estimate", "std_error", "t_stat"].map(String::from));
    for row in &t.cointegrating_equation {
        for (relation, v) in t.relations.iter().zip(&row.values) {
            csv_line(&mut out, &[relation.clone(), row.label.clone(), csv_num(*v), String::new(), String::new()]);
        }
    }
    for (j, eq) in t.equations.iter().enumerate() {
        for row in &t.rows {
            let c = &row.cells[j];
            csv_line(
                &mut out,
                &[eq.clone(), row.label.clone(), csv_num(c.coefficient), csv_num(c.std_error), csv_num(c.t_stat)],
            );
        }
        for row in &t.summary {
            csv_line(&mut out, &[eq.clone(), row.label.clone(), csv_num(row.values[j]), String::new(), String::new()]);
        }
    }
    out
}
