//! Augmented Dickey-Fuller unit-root test and integration-order classification.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::linreg::{ols_fit, OlsError, OlsFit};
use crate::series::{deterministic_columns, Deterministics, LagMatrix, Series, SeriesError};
use crate::tables::{self, AdfPValueSurface};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdfError {
    #[error("series `{name}` has {len} observations; the ADF regression with {lags} lags needs at least {needed}")]
    TooShort {
        name: String,
        len: usize,
        lags: usize,
        needed: usize,
    },
    #[error("invalid ADF specification: {0}")]
    InvalidSpec(String),
    #[error("unsupported deterministic case `{0}`")]
    UnsupportedCase(String),
    #[error(transparent)]
    Regression(#[from] OlsError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Critical values at the three conventional levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    pub one: f64,
    pub five: f64,
    pub ten: f64,
}

impl CriticalValues {
    /// Value at `significance`, which must be 0.01, 0.05 or 0.10.
    pub fn at(&self, significance: f64) -> Option<f64> {
        if (significance - 0.01).abs() < 1e-12 {
            Some(self.one)
        } else if (significance - 0.05).abs() < 1e-12 {
            Some(self.five)
        } else if (significance - 0.10).abs() < 1e-12 {
            Some(self.ten)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InfoCriterion {
    Aic,
    Bic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LagSelection {
    Fixed(usize),
    /// Minimise the criterion over `0..=max_lag` on the sample trimmed for `max_lag`.
    Auto {
        max_lag: usize,
        criterion: InfoCriterion,
    },
}

impl LagSelection {
    pub fn max_lag(self) -> usize {
        match self {
            LagSelection::Fixed(p) => p,
            LagSelection::Auto { max_lag, .. } => max_lag,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdfSpec {
    pub deterministic: Deterministics,
    pub lags: LagSelection,
    pub significance: f64,
}

impl Default for AdfSpec {
    fn default() -> Self {
        AdfSpec {
            deterministic: Deterministics::ConstantTrend,
            lags: LagSelection::Auto {
                max_lag: 4,
                criterion: InfoCriterion::Aic,
            },
            significance: 0.05,
        }
    }
}

impl AdfSpec {
    pub fn fixed(deterministic: Deterministics, lags: usize) -> Self {
        AdfSpec {
            deterministic,
            lags: LagSelection::Fixed(lags),
            significance: 0.05,
        }
    }

    fn validate(&self, name: &str, len: usize) -> Result<(), AdfError> {
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(AdfError::InvalidSpec(format!(
                "significance {} outside (0, 1)",
                self.significance
            )));
        }
        let max_lag = self.lags.max_lag();
        if len < max_lag + 10 {
            return Err(AdfError::TooShort {
                name: name.to_string(),
                len,
                lags: max_lag,
                needed: max_lag + 10,
            });
        }
        if 3 * max_lag >= len {
            return Err(AdfError::InvalidSpec(format!(
                "max lag {max_lag} must be below a third of the {len} observations"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Level,
    FirstDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    /// Asymptotic response surface with a finite-sample dispersion correction.
    ResponseSurface,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub variable: String,
    pub stage: Stage,
    pub t_stat: f64,
    /// Coefficient on the lagged level.
    pub gamma: f64,
    pub p_value: f64,
    pub pvalue_method: PValueMethod,
    pub critical_values: CriticalValues,
    pub lags_used: usize,
    /// Observations in the final test regression.
    pub t_eff: usize,
    pub spec: AdfSpec,
    pub reject_unit_root: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    Zero,
    One,
    /// Neither the level nor the first difference rejects; not resolved further.
    TwoPlus,
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Order::Zero => "I(0)",
            Order::One => "I(1)",
            Order::TwoPlus => "I(2+)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrationOrder {
    pub variable: String,
    pub order: Order,
    pub level_result: AdfResult,
    pub diff_result: AdfResult,
}

/// Regression `Δy_t = γ y_{t-1} + Σ φ_i Δy_{t-i} + deterministics`, using
/// observations `trim+1..n` of the original series.
pub(crate) fn adf_design(
    y: &[f64],
    lags: usize,
    trim: usize,
    det: Deterministics,
) -> (LagMatrix, Vec<f64>) {
    debug_assert!(trim >= lags);
    let n = y.len();
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let rows = n - trim - 1;
    let mut labels = vec!["y(-1)".to_string()];
    labels.extend((1..=lags).map(|i| format!("D(y(-{i}))")));
    let values = Matrix::from_fn(rows, lags + 1, |r, c| {
        let t = trim + 1 + r;
        if c == 0 {
            y[t - 1]
        } else {
            dy[t - 1 - c]
        }
    });
    let target = (0..rows).map(|r| dy[trim + r]).collect();
    let x = LagMatrix::new(labels, values).hstack(&deterministic_columns(rows, det));
    (x, target)
}

fn fit_with_lags(y: &[f64], lags: usize, trim: usize, det: Deterministics) -> Result<OlsFit, OlsError> {
    let (x, target) = adf_design(y, lags, trim, det);
    ols_fit(&x, &target)
}

/// Lag order minimising the criterion with the sample held at the `max_lag` trim.
fn select_lag(y: &[f64], max_lag: usize, criterion: InfoCriterion, det: Deterministics) -> Result<usize, OlsError> {
    let mut best: Option<(f64, usize)> = None;
    for p in 0..=max_lag {
        let fit = fit_with_lags(y, p, max_lag, det)?;
        let score = match criterion {
            InfoCriterion::Aic => fit.aic(),
            InfoCriterion::Bic => fit.bic(),
        };
        if best.map_or(true, |(b, _)| score < b) {
            best = Some((score, p));
        }
    }
    Ok(best.map(|(_, p)| p).unwrap_or(0))
}

fn run_adf(s: &Series, spec: &AdfSpec, stage: Stage) -> Result<AdfResult, AdfError> {
    spec.validate(s.name(), s.len())?;
    let y = s.values();
    let lags = match spec.lags {
        LagSelection::Fixed(p) => p,
        LagSelection::Auto { max_lag, criterion } => select_lag(y, max_lag, criterion, spec.deterministic)?,
    };
    let fit = fit_with_lags(y, lags, lags, spec.deterministic)?;
    let t_stat = fit.t_stats[0];
    let t_eff = fit.n_obs;
    let p_value = adf_pvalue(t_stat, spec.deterministic, t_eff);
    Ok(AdfResult {
        variable: s.name().to_string(),
        stage,
        t_stat,
        gamma: fit.coefficients[0],
        p_value,
        pvalue_method: PValueMethod::ResponseSurface,
        critical_values: adf_critical_values(spec.deterministic, t_eff)?,
        lags_used: lags,
        t_eff,
        spec: *spec,
        reject_unit_root: p_value < spec.significance,
    })
}

/// ADF test on the level of `s`.
pub fn adf_test(s: &Series, spec: &AdfSpec) -> Result<AdfResult, AdfError> {
    run_adf(s, spec, Stage::Level)
}

/// The ADF t-ratio alone, for Monte Carlo loops.
pub fn adf_statistic(y: &[f64], lags: usize, det: Deterministics) -> Result<f64, OlsError> {
    Ok(fit_with_lags(y, lags, lags, det)?.t_stats[0])
}

fn cv_table(case: Deterministics) -> &'static [[f64; 4]; 3] {
    match case {
        Deterministics::None => &tables::ADF_CV_NONE,
        Deterministics::Constant => &tables::ADF_CV_CONSTANT,
        Deterministics::ConstantTrend => &tables::ADF_CV_TREND,
    }
}

fn surface(case: Deterministics) -> &'static AdfPValueSurface {
    match case {
        Deterministics::None => &tables::ADF_P_NONE,
        Deterministics::Constant => &tables::ADF_P_CONSTANT,
        Deterministics::ConstantTrend => &tables::ADF_P_TREND,
    }
}

fn response_surface(coef: &[f64; 4], t_eff: f64) -> f64 {
    let inv = 1.0 / t_eff;
    coef[0] + inv * (coef[1] + inv * (coef[2] + inv * coef[3]))
}

/// Finite-sample critical values from the response surface.
pub fn adf_critical_values(case: Deterministics, t_eff: usize) -> Result<CriticalValues, AdfError> {
    if t_eff < 10 {
        return Err(AdfError::TooShort {
            name: String::new(),
            len: t_eff,
            lags: 0,
            needed: 10,
        });
    }
    let table = cv_table(case);
    let t = t_eff as f64;
    Ok(CriticalValues {
        one: response_surface(&table[0], t),
        five: response_surface(&table[1], t),
        ten: response_surface(&table[2], t),
    })
}

/// Asymptotic (T → ∞) critical values.
pub fn adf_asymptotic_critical_values(case: Deterministics) -> CriticalValues {
    let table = cv_table(case);
    CriticalValues {
        one: table[0][0],
        five: table[1][0],
        ten: table[2][0],
    }
}

fn asymptotic_pvalue(t: f64, s: &AdfPValueSurface) -> f64 {
    if t > s.tau_max {
        return 1.0;
    }
    if t < s.tau_min {
        return 0.0;
    }
    let z = if t <= s.tau_star {
        s.small_p[0] + t * (s.small_p[1] + t * s.small_p[2])
    } else {
        s.large_p[0] + t * (s.large_p[1] + t * (s.large_p[2] + t * s.large_p[3]))
    };
    Normal::new(0.0, 1.0).expect("standard normal").cdf(z)
}

/// P-value of an ADF t-ratio.
///
/// The asymptotic surface is evaluated at `t` mapped onto the asymptotic
/// scale: the finite-sample distribution is treated as the asymptotic one
/// stretched about its median, with the stretch fixed so that the
/// finite-sample 5% critical value maps to the asymptotic one.
pub fn adf_pvalue(t: f64, case: Deterministics, t_eff: usize) -> f64 {
    let s = surface(case);
    if t.is_nan() {
        return f64::NAN;
    }
    let table = cv_table(case);
    let stretch = if t_eff >= 1 {
        (response_surface(&table[1], t_eff as f64) - s.median) / (table[1][0] - s.median)
    } else {
        1.0
    };
    asymptotic_pvalue(s.median + (t - s.median) / stretch, s)
}

/// Tests the level, then the first difference with a constant, and reads
/// off the order of integration.
pub fn classify_integration(s: &Series, spec: &AdfSpec) -> Result<IntegrationOrder, AdfError> {
    let level_result = run_adf(s, spec, Stage::Level)?;
    let diff_spec = AdfSpec {
        deterministic: Deterministics::Constant,
        ..*spec
    };
    let diff_result = run_adf(&s.difference(1)?, &diff_spec, Stage::FirstDifference)?;
    let order = if level_result.reject_unit_root {
        Order::Zero
    } else if diff_result.reject_unit_root {
        Order::One
    } else {
        Order::TwoPlus
    };
    Ok(IntegrationOrder {
        variable: s.name().to_string(),
        order,
        level_result,
        diff_result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn asymptotic_five_percent_values() {
        let c = adf_asymptotic_critical_values(Deterministics::Constant);
        assert!((c.five - -2.86).abs() < 0.01);
        let ct = adf_asymptotic_critical_values(Deterministics::ConstantTrend);
        assert!((ct.five - -3.41).abs() < 0.01);
    }

    #[test]
    fn critical_values_are_ordered() {
        for case in [Deterministics::None, Deterministics::Constant, Deterministics::ConstantTrend] {
            for t in [10, 16, 25, 50, 100, 500, 10_000] {
                let cv = adf_critical_values(case, t).unwrap();
                assert!(cv.one < cv.five && cv.five < cv.ten, "{case} T={t}");
            }
        }
        assert!(adf_critical_values(Deterministics::Constant, 9).is_err());
    }

    #[test]
    fn pvalue_at_critical_value_is_nominal() {
        for case in [Deterministics::None, Deterministics::Constant, Deterministics::ConstantTrend] {
            for t in [12, 16, 40, 200, 2000] {
                let cv = adf_critical_values(case, t).unwrap();
                let p = adf_pvalue(cv.five, case, t);
                assert!((p - 0.05).abs() < 0.005, "{case} T={t}: p={p}");
            }
        }
    }

    #[test]
    fn pvalues_for_printed_statistics() {
        let p = adf_pvalue(-1.2974, Deterministics::ConstantTrend, 16);
        assert!((0.80..=0.90).contains(&p), "{p}");
        assert!(adf_pvalue(-5.5127, Deterministics::Constant, 16) < 0.01);
    }

    #[test]
    fn constant_series_is_rank_deficient() {
        let s = Series::new("flat", 1990, vec![3.0; 30]).unwrap();
        let err = adf_test(&s, &AdfSpec::fixed(Deterministics::Constant, 1)).unwrap_err();
        assert!(matches!(err, AdfError::Regression(OlsError::RankDeficient { .. })), "{err:?}");
    }

    #[test]
    fn short_series_rejected() {
        let s = Series::new("x", 1990, (0..12).map(|v| (v as f64).sin()).collect()).unwrap();
        assert!(matches!(
            adf_test(&s, &AdfSpec::fixed(Deterministics::Constant, 3)),
            Err(AdfError::TooShort { .. })
        ));
    }

    #[test]
    fn design_rows_and_labels() {
        let y: Vec<f64> = (0..20).map(|v| (v as f64 * 0.7).cos()).collect();
        let (x, target) = adf_design(&y, 2, 3, Deterministics::ConstantTrend);
        assert_eq!(x.rows(), 16);
        assert_eq!(target.len(), 16);
        assert_eq!(x.labels(), &["y(-1)", "D(y(-1))", "D(y(-2))", "C", "@TREND"]);
        // first row is t = 4: y_3, Δy_3 = y3 - y2, Δy_2
        assert_eq!(x.values()[(0, 0)], y[3]);
        assert_eq!(x.values()[(0, 1)], y[3] - y[2]);
        assert_eq!(x.values()[(0, 2)], y[2] - y[1]);
        assert_eq!(target[0], y[4] - y[3]);
    }
}
