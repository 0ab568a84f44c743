//! Pipeline configuration file (JSON). Relative paths are resolved against
//! the directory holding the configuration file.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;
use vecmkit_core::cointegration::DetCase;
use vecmkit_core::series::Deterministics;
use vecmkit_core::unitroot::{InfoCriterion, LagSelection};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CsvSource {
    Path(PathBuf),
    Column {
        path: PathBuf,
        /// Column holding the variable; defaults to the variable name.
        #[serde(default)]
        column: Option<String>,
    },
}

impl CsvSource {
    pub fn path(&self) -> &Path {
        match self {
            CsvSource::Path(p) | CsvSource::Column { path: p, .. } => p,
        }
    }

    pub fn column<'a>(&'a self, variable: &'a str) -> &'a str {
        match self {
            CsvSource::Column { column: Some(c), .. } => c,
            _ => variable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WdiSource {
    pub country: String,
    pub indicator: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Csv(CsvSource),
    Wdi(WdiSource),
}

impl Source {
    pub fn describe(&self) -> String {
        match self {
            Source::Csv(c) => format!("csv {}", c.path().display()),
            Source::Wdi(w) => format!("wdi {} {}", w.country, w.indicator),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableConfig {
    pub name: String,
    pub source: Source,
    #[serde(default = "default_true")]
    pub log: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdfConfig {
    #[serde(default = "default_adf_case", deserialize_with = "deterministics_from_str")]
    pub case: Deterministics,
    /// Upper bound for information-criterion lag selection.
    #[serde(default = "default_max_lags")]
    pub max_lags: usize,
    /// Fixed lag count; overrides automatic selection when present.
    #[serde(default)]
    pub lags: Option<usize>,
    #[serde(default = "default_criterion")]
    pub criterion: InfoCriterion,
}

fn default_adf_case() -> Deterministics {
    Deterministics::ConstantTrend
}

fn default_max_lags() -> usize {
    4
}

fn default_criterion() -> InfoCriterion {
    InfoCriterion::Aic
}

impl Default for AdfConfig {
    fn default() -> Self {
        AdfConfig {
            case: default_adf_case(),
            max_lags: default_max_lags(),
            lags: None,
            criterion: default_criterion(),
        }
    }
}

impl AdfConfig {
    pub fn lag_selection(&self) -> LagSelection {
        match self.lags {
            Some(p) => LagSelection::Fixed(p),
            None => LagSelection::Auto {
                max_lag: self.max_lags,
                criterion: self.criterion,
            },
        }
    }
}

pub fn parse_deterministics(s: &str) -> Result<Deterministics, String> {
    match s.trim() {
        "none" | "n" => Ok(Deterministics::None),
        "constant" | "c" => Ok(Deterministics::Constant),
        "constant_trend" | "constant+trend" | "trend" | "ct" => Ok(Deterministics::ConstantTrend),
        other => Err(format!("unknown ADF case `{other}` (none, constant, constant_trend)")),
    }
}

fn deterministics_from_str<'de, D: Deserializer<'de>>(d: D) -> Result<Deterministics, D::Error> {
    let s = String::deserialize(d)?;
    parse_deterministics(&s).map_err(serde::de::Error::custom)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CaseRepr {
    Number(u64),
    Name(String),
}

fn det_case_from_any<'de, D: Deserializer<'de>>(d: D) -> Result<DetCase, D::Error> {
    let text = match CaseRepr::deserialize(d)? {
        CaseRepr::Number(n) => n.to_string(),
        CaseRepr::Name(s) => s,
    };
    text.parse().map_err(serde::de::Error::custom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JohansenConfig {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default, deserialize_with = "det_case_from_any")]
    pub det_case: DetCase,
}

fn default_k() -> usize {
    2
}

impl Default for JohansenConfig {
    fn default() -> Self {
        JohansenConfig {
            k: default_k(),
            det_case: DetCase::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VecmConfig {
    /// Cointegrating rank; the trace-test rank when absent.
    #[serde(default)]
    pub rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub variables: Vec<VariableConfig>,
    pub dependent: String,
    #[serde(default)]
    pub adf: AdfConfig,
    #[serde(default)]
    pub johansen: JohansenConfig,
    #[serde(default)]
    pub vecm: VecmConfig,
    #[serde(default = "default_significance")]
    pub significance: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    #[serde(default)]
    pub start_year: Option<i32>,
    #[serde(default)]
    pub end_year: Option<i32>,
    /// Variables drawn in the trend figure (configured names); all when absent.
    #[serde(default)]
    pub plot: Option<Vec<String>>,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_significance() -> f64 {
    0.05
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("output")
}

impl PipelineConfig {
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut cfg: PipelineConfig = serde_json::from_str(text).map_err(|source| ConfigError::Parse {
            path: base_dir.to_path_buf(),
            source,
        })?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut cfg: PipelineConfig = serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.base_dir = base;
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_path(&self) -> PathBuf {
        self.resolve(&self.output_dir)
    }

    pub fn cache_path(&self) -> Option<PathBuf> {
        self.cache_dir.as_deref().map(|p| self.resolve(p))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.variables.len() < 2 {
            return invalid(format!("{} variable(s) configured; at least 2 are needed", self.variables.len()));
        }
        let mut seen = HashSet::new();
        for v in &self.variables {
            if v.name.trim().is_empty() {
                return invalid("variable with an empty name".into());
            }
            if !seen.insert(v.name.as_str()) {
                return invalid(format!("variable `{}` listed twice", v.name));
            }
        }
        if !seen.contains(self.dependent.as_str()) {
            return invalid(format!("dependent variable `{}` is not among the variables", self.dependent));
        }
        if ![0.01, 0.05, 0.10].iter().any(|s| (s - self.significance).abs() < 1e-12) {
            return invalid(format!("significance {} must be 0.01, 0.05 or 0.10", self.significance));
        }
        if self.johansen.k == 0 {
            return invalid("johansen.k must be at least 1".into());
        }
        if let (Some(s), Some(e)) = (self.start_year, self.end_year) {
            if s > e {
                return invalid(format!("start_year {s} after end_year {e}"));
            }
        }
        let needs_range = self.variables.iter().any(|v| matches!(v.source, Source::Wdi(_)));
        if needs_range && (self.start_year.is_none() || self.end_year.is_none()) {
            return invalid("WDI sources need start_year and end_year".into());
        }
        if let Some(plot) = &self.plot {
            if let Some(unknown) = plot.iter().find(|p| !seen.contains(p.as_str())) {
                return invalid(format!("plot variable `{unknown}` is not among the variables"));
            }
        }
        Ok(())
    }

    /// Configured names with the dependent variable first.
    pub fn ordered_variables(&self) -> Vec<&VariableConfig> {
        let mut out: Vec<&VariableConfig> = self.variables.iter().filter(|v| v.name == self.dependent).collect();
        out.extend(self.variables.iter().filter(|v| v.name != self.dependent));
        out
    }

    /// Name a variable carries after the log transform.
    pub fn transformed_name(&self, name: &str) -> String {
        match self.variables.iter().find(|v| v.name == name) {
            Some(v) if v.log => format!("l_{name}"),
            _ => name.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"{
        "variables": [
            {"name": "gdp", "source": {"csv": "data.csv"}, "log": true},
            {"name": "hc", "source": {"csv": {"path": "/abs/hc.csv", "column": "index"}}, "log": false},
            {"name": "fdi", "source": {"wdi": {"country": "BGD", "indicator": "BX.KLT.DINV.CD.WD"}}}
        ],
        "dependent": "fdi",
        "adf": {"case": "constant", "max_lags": 2},
        "johansen": {"k": 1, "det_case": 2},
        "significance": 0.10,
        "output_dir": "out",
        "cache_dir": "cache",
        "start_year": 2004,
        "end_year": 2021
    }"#;

    #[test]
    fn parses_all_sources_and_resolves_paths() {
        let cfg = PipelineConfig::from_json(FULL, Path::new("/proj")).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.adf.case, Deterministics::Constant);
        assert_eq!(cfg.johansen.det_case, DetCase::RestrictedConstant);
        assert!(cfg.variables[2].log, "log defaults to true");
        let Source::Csv(c) = &cfg.variables[1].source else { panic!() };
        assert_eq!(c.column("hc"), "index");
        assert_eq!(cfg.resolve(c.path()), Path::new("/abs/hc.csv"));
        let Source::Csv(c) = &cfg.variables[0].source else { panic!() };
        assert_eq!(cfg.resolve(c.path()), Path::new("/proj/data.csv"));
        assert_eq!(cfg.output_path(), Path::new("/proj/out"));
        assert_eq!(cfg.cache_path().unwrap(), Path::new("/proj/cache"));
        let order: Vec<_> = cfg.ordered_variables().iter().map(|v| v.name.as_str()).collect();
        assert_eq!(order, ["fdi", "gdp", "hc"]);
        assert_eq!(cfg.transformed_name("hc"), "hc");
        assert_eq!(cfg.transformed_name("gdp"), "l_gdp");
    }

    #[test]
    fn defaults() {
        let cfg = PipelineConfig::from_json(
            r#"{"variables": [{"name": "a", "source": {"csv": "x.csv"}}, {"name": "b", "source": {"csv": "x.csv"}}], "dependent": "a"}"#,
            Path::new("."),
        )
        .unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.johansen, JohansenConfig::default());
        assert_eq!(cfg.adf.lag_selection(), LagSelection::Auto { max_lag: 4, criterion: InfoCriterion::Aic });
        assert_eq!(cfg.significance, 0.05);
    }

    #[test]
    fn rejects_invalid_configs() {
        let base = r#"{"variables": [{"name": "a", "source": {"csv": "x.csv"}}, {"name": "b", "source": {"csv": "x.csv"}}], "dependent": "#;
        let check = |tail: &str| {
            let cfg = PipelineConfig::from_json(&format!("{base}{tail}"), Path::new(".")).unwrap();
            cfg.validate().unwrap_err()
        };
        assert!(check(r#""zz"}"#).to_string().contains("dependent"));
        assert!(check(r#""a", "significance": 0.07}"#).to_string().contains("significance"));
        assert!(check(r#""a", "johansen": {"k": 0}}"#).to_string().contains("k"));
        assert!(PipelineConfig::from_json(&format!("{base}\"a\", \"typo\": 1}}"), Path::new(".")).is_err());
        assert!(PipelineConfig::from_json(&format!("{base}\"a\", \"johansen\": {{\"det_case\": 9}}}}"), Path::new(".")).is_err());
        let wdi = r#"{"variables": [{"name": "a", "source": {"wdi": {"country": "BGD", "indicator": "X"}}}, {"name": "b", "source": {"csv": "x.csv"}}], "dependent": "a"}"#;
        let cfg = PipelineConfig::from_json(wdi, Path::new(".")).unwrap();
        assert!(cfg.validate().unwrap_err().to_string().contains("start_year"));
    }
}
