//! Two-step VECM estimation: error-correction terms from a given β, then
//! equation-by-equation OLS of each differenced variable. Also the static
//! long-run regression in levels.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cointegration::DetCase;
use crate::linalg::{inverse, Matrix};
use crate::linreg::{ols_fit, OlsError, OlsFit};
use crate::series::{lag_label, Dataset, LagMatrix, Series, SeriesError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VecmError {
    #[error("cointegrating rank {rank} is invalid for {variables} variables (need 1 <= rank < n)")]
    InvalidRank { rank: usize, variables: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{len} observations leave {t_eff} usable rows for {params} parameters per equation")]
    TooShort { len: usize, t_eff: usize, params: usize },
    #[error("leading {0}x{0} block of beta is singular and cannot be normalised")]
    SingularNormalization(usize),
    #[error(transparent)]
    Regression(#[from] OlsError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VecmSpec {
    pub rank: usize,
    /// Number of lagged differences, `k - 1`.
    pub diff_lags: usize,
    pub det_case: DetCase,
}

/// One estimated coefficient with its standard error and t statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub label: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_stat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VecmEquation {
    /// Differenced variable label, e.g. `D(l_gdp)`.
    pub dependent: String,
    /// Loadings on each error-correction term.
    pub ect: Vec<Coefficient>,
    /// Short-run coefficients, grouped by lag then variable.
    pub lagged: Vec<Coefficient>,
    /// Unrestricted constant and trend, where the case includes them.
    pub deterministic: Vec<Coefficient>,
    pub r2: f64,
    pub adj_r2: f64,
    pub f_stat: f64,
    pub rss: f64,
    pub n_obs: usize,
    pub n_params: usize,
    pub residuals: Vec<f64>,
}

impl VecmEquation {
    /// All coefficients in regressor order.
    pub fn coefficients(&self) -> impl Iterator<Item = &Coefficient> {
        self.ect.iter().chain(&self.lagged).chain(&self.deterministic)
    }

    pub fn constant(&self) -> Option<&Coefficient> {
        self.deterministic.iter().find(|c| c.label == "C")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VecmFit {
    pub variables: Vec<String>,
    /// Cointegrating matrix, one column per relation.
    pub beta: Matrix,
    pub beta_labels: Vec<String>,
    pub equations: Vec<VecmEquation>,
    pub t_eff: usize,
    /// `EᵀE / t_eff` across equations.
    pub residual_covariance: Matrix,
    pub spec: VecmSpec,
}

fn ect_label(j: usize) -> String {
    format!("CointEq{}", j + 1)
}

fn beta_rows(n: usize, det: DetCase) -> usize {
    n + usize::from(det.restricted_term().is_some())
}

/// `ECT_t = βᵀ Y_t` for every observation, one series per column of β.
///
/// With a restricted constant or trend β carries one extra row, applied to
/// `1` or to the 1-based observation index respectively.
pub fn build_ect(d: &Dataset, beta: &Matrix, det_case: DetCase) -> Result<Vec<Series>, VecmError> {
    let n = d.dimension();
    let want = beta_rows(n, det_case);
    if beta.nrows() != want {
        return Err(VecmError::DimensionMismatch(format!(
            "beta has {} rows, {} variables under {} need {}",
            beta.nrows(),
            n,
            det_case,
            want
        )));
    }
    let levels = d.to_matrix();
    (0..beta.ncols())
        .map(|j| {
            let values = (0..d.len())
                .map(|t| {
                    let mut v: f64 = (0..n).map(|i| beta[(i, j)] * levels[(t, i)]).sum();
                    match det_case {
                        DetCase::RestrictedConstant => v += beta[(n, j)],
                        DetCase::RestrictedTrend => v += beta[(n, j)] * (t + 1) as f64,
                        _ => {}
                    }
                    v
                })
                .collect();
            Series::new(ect_label(j), d.start_year(), values).map_err(VecmError::from)
        })
        .collect()
}

/// Rescales β so its leading `rank × rank` block is the identity; for one
/// relation this sets the first variable's coefficient to 1.
pub fn normalize_beta(beta: &Matrix) -> Result<Matrix, VecmError> {
    let r = beta.ncols();
    if r == 0 || beta.nrows() < r {
        return Err(VecmError::DimensionMismatch(format!(
            "cannot normalise a {}x{} beta",
            beta.nrows(),
            r
        )));
    }
    let top = Matrix::from_fn(r, r, |i, j| beta[(i, j)]);
    let scale = top.max_abs().max(f64::MIN_POSITIVE);
    let inv = inverse(&top).map_err(|_| VecmError::SingularNormalization(r))?;
    if !inv.as_slice().iter().all(|v| v.is_finite()) || inv.max_abs() * scale > 1e12 {
        return Err(VecmError::SingularNormalization(r));
    }
    Ok(beta * &inv)
}

/// Regressors for every equation: `ECT_{t-1}`, lagged differences, then the
/// unrestricted deterministic terms. Rows are `t = diff_lags + 1 .. len`.
fn vecm_design(d: &Dataset, ects: &[Series], spec: &VecmSpec) -> LagMatrix {
    let levels = d.to_matrix();
    let len = levels.nrows();
    let p = spec.diff_lags;
    let start = p + 1;
    let rows = len - start;
    let names = d.names();
    let mut labels = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for ect in ects {
        labels.push(ect.name().to_string());
        columns.push(ect.values()[start - 1..len - 1].to_vec());
    }
    for lag in 1..=p {
        for (j, name) in names.iter().enumerate() {
            labels.push(format!("D({})", lag_label(name, lag)));
            columns.push(
                (start..len)
                    .map(|t| levels[(t - lag, j)] - levels[(t - lag - 1, j)])
                    .collect(),
            );
        }
    }
    if spec.det_case.unrestricted_constant() {
        labels.push("C".into());
        columns.push(vec![1.0; rows]);
    }
    if spec.det_case.unrestricted_trend() {
        labels.push("@TREND".into());
        columns.push((1..=rows).map(|t| t as f64).collect());
    }
    LagMatrix::new(labels, Matrix::from_fn(rows, columns.len(), |i, j| columns[j][i]))
}

fn coefficients(fit: &OlsFit, range: std::ops::Range<usize>) -> Vec<Coefficient> {
    range
        .map(|i| Coefficient {
            label: fit.labels[i].clone(),
            estimate: fit.coefficients[i],
            std_error: fit.standard_errors[i],
            t_stat: fit.t_stats[i],
        })
        .collect()
}

/// Equation-by-equation OLS of `ΔY_i` on the VECM regressors, with β fixed.
pub fn estimate_vecm(d: &Dataset, spec: &VecmSpec, beta: &Matrix) -> Result<VecmFit, VecmError> {
    let n = d.dimension();
    if spec.rank == 0 || spec.rank >= n {
        return Err(VecmError::InvalidRank {
            rank: spec.rank,
            variables: n,
        });
    }
    if beta.ncols() != spec.rank {
        return Err(VecmError::DimensionMismatch(format!(
            "beta has {} columns for rank {}",
            beta.ncols(),
            spec.rank
        )));
    }
    let n_det = usize::from(spec.det_case.unrestricted_constant()) + usize::from(spec.det_case.unrestricted_trend());
    let params = spec.rank + n * spec.diff_lags + n_det;
    let t_eff = d.len().saturating_sub(spec.diff_lags + 1);
    if t_eff <= params {
        return Err(VecmError::TooShort {
            len: d.len(),
            t_eff,
            params,
        });
    }

    let ects = build_ect(d, beta, spec.det_case)?;
    let x = vecm_design(d, &ects, spec);
    let levels = d.to_matrix();
    let start = spec.diff_lags + 1;
    let n_lagged = n * spec.diff_lags;

    let mut equations = Vec::with_capacity(n);
    for (i, name) in d.names().iter().enumerate() {
        let y: Vec<f64> = (start..d.len()).map(|t| levels[(t, i)] - levels[(t - 1, i)]).collect();
        let fit = ols_fit(&x, &y)?;
        let r = spec.rank;
        equations.push(VecmEquation {
            dependent: format!("D({name})"),
            ect: coefficients(&fit, 0..r),
            lagged: coefficients(&fit, r..r + n_lagged),
            deterministic: coefficients(&fit, r + n_lagged..fit.n_params),
            r2: fit.r2,
            adj_r2: fit.adj_r2,
            f_stat: fit.f_stat,
            rss: fit.rss,
            n_obs: fit.n_obs,
            n_params: fit.n_params,
            residuals: fit.residuals,
        });
    }

    let residual_covariance = Matrix::from_fn(n, n, |a, b| {
        let (ea, eb) = (&equations[a].residuals, &equations[b].residuals);
        ea.iter().zip(eb).map(|(u, v)| u * v).sum::<f64>() / t_eff as f64
    });
    let mut beta_labels: Vec<String> = d.names().iter().map(|s| lag_label(s, 1)).collect();
    if let Some(term) = spec.det_case.restricted_term() {
        beta_labels.push(term.to_string());
    }

    Ok(VecmFit {
        variables: d.names().iter().map(|s| s.to_string()).collect(),
        beta: beta.clone(),
        beta_labels,
        equations,
        t_eff,
        residual_covariance,
        spec: *spec,
    })
}

/// Static OLS of the first series on a constant and the remaining series.
///
/// With I(1) inputs the usual t and F inference is invalid unless the
/// variables cointegrate; callers should report it as descriptive only.
pub fn long_run_ols(d: &Dataset) -> Result<OlsFit, VecmError> {
    let n = d.dimension();
    if n < 2 {
        return Err(VecmError::DimensionMismatch(format!(
            "long-run regression needs a dependent and at least one regressor, got {n} series"
        )));
    }
    let series = d.series();
    let mut labels = vec!["C".to_string()];
    let mut columns = vec![vec![1.0; d.len()]];
    for s in &series[1..] {
        labels.push(s.name().to_string());
        columns.push(s.values().to_vec());
    }
    let x = LagMatrix::new(labels, Matrix::from_fn(d.len(), n, |i, j| columns[j][i]));
    Ok(ols_fit(&x, series[0].values())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linreg::SummaryStats;

    fn dataset(columns: &[(&str, Vec<f64>)]) -> Dataset {
        Dataset::new(
            columns
                .iter()
                .map(|(n, v)| Series::new(*n, 2000, v.clone()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn wobble(len: usize, a: f64, b: f64) -> Vec<f64> {
        (0..len).map(|t| (a * t as f64).sin() + b * (t as f64) + 0.3 * (1.7 * t as f64 * a).cos()).collect()
    }

    fn four_vars(len: usize) -> Dataset {
        dataset(&[
            ("a", wobble(len, 0.7, 0.05)),
            ("b", wobble(len, 1.3, 0.02)),
            ("c", wobble(len, 2.1, -0.01)),
            ("d", wobble(len, 0.4, 0.03)),
        ])
    }

    #[test]
    fn unit_beta_reproduces_levels() {
        let d = four_vars(20);
        let beta = Matrix::from_rows(&[vec![1.0], vec![0.0], vec![0.0], vec![0.0]]).unwrap();
        let ect = build_ect(&d, &beta, DetCase::UnrestrictedConstant).unwrap();
        assert_eq!(ect.len(), 1);
        assert_eq!(ect[0].values(), d.series()[0].values());
    }

    #[test]
    fn rank_two_gives_two_distinct_terms() {
        let d = four_vars(20);
        let beta = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![-0.5, 0.2], vec![0.3, -1.0]]).unwrap();
        let ect = build_ect(&d, &beta, DetCase::UnrestrictedConstant).unwrap();
        assert_eq!(ect.len(), 2);
        assert_ne!(ect[0].values(), ect[1].values());
        assert_eq!(ect[1].name(), "CointEq2");
    }

    #[test]
    fn beta_row_count_checked() {
        let d = four_vars(20);
        let beta = Matrix::zeros(3, 1);
        assert!(matches!(
            build_ect(&d, &beta, DetCase::UnrestrictedConstant),
            Err(VecmError::DimensionMismatch(_))
        ));
        let restricted = Matrix::from_rows(&[vec![1.0], vec![0.0], vec![0.0], vec![0.0], vec![2.0]]).unwrap();
        let ect = build_ect(&d, &restricted, DetCase::RestrictedConstant).unwrap();
        assert!((ect[0].values()[3] - (d.series()[0].values()[3] + 2.0)).abs() < 1e-15);
    }

    #[test]
    fn parameter_count_and_sample() {
        let d = four_vars(18);
        let beta = Matrix::from_rows(&[vec![1.0], vec![-0.4], vec![0.1], vec![-1.2]]).unwrap();
        let spec = VecmSpec {
            rank: 1,
            diff_lags: 1,
            det_case: DetCase::UnrestrictedConstant,
        };
        let fit = estimate_vecm(&d, &spec, &beta).unwrap();
        assert_eq!(fit.t_eff, 16);
        assert_eq!(fit.equations.len(), 4);
        for eq in &fit.equations {
            assert_eq!(eq.n_obs, 16);
            assert_eq!(eq.n_params, 6);
            assert_eq!(eq.ect.len(), 1);
            assert_eq!(eq.lagged.len(), 4);
            assert_eq!(eq.constant().unwrap().label, "C");
            for c in eq.coefficients() {
                assert_eq!(c.t_stat, c.estimate / c.std_error);
            }
            let s = SummaryStats::from_r2(eq.r2, 16, 6);
            assert!((s.adj_r2 - eq.adj_r2).abs() < 1e-12);
        }
        assert_eq!(fit.equations[0].dependent, "D(a)");
        assert_eq!(fit.equations[0].lagged[2].label, "D(c(-1))");
    }

    #[test]
    fn residuals_orthogonal_to_regressors() {
        let d = four_vars(30);
        let beta = Matrix::from_rows(&[vec![1.0], vec![-0.4], vec![0.1], vec![-1.2]]).unwrap();
        let spec = VecmSpec {
            rank: 1,
            diff_lags: 2,
            det_case: DetCase::UnrestrictedConstant,
        };
        let fit = estimate_vecm(&d, &spec, &beta).unwrap();
        let ects = build_ect(&d, &beta, spec.det_case).unwrap();
        let x = vecm_design(&d, &ects, &spec);
        for eq in &fit.equations {
            for j in 0..x.cols() {
                let col = x.values().column(j);
                let dot: f64 = col.iter().zip(&eq.residuals).map(|(a, b)| a * b).sum();
                let scale: f64 = col.iter().map(|v| v * v).sum::<f64>().sqrt()
                    * eq.residuals.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!(dot.abs() / scale < 1e-8);
            }
        }
    }

    #[test]
    fn invalid_rank() {
        let d = four_vars(18);
        let beta = Matrix::zeros(4, 0);
        let spec = VecmSpec {
            rank: 0,
            diff_lags: 1,
            det_case: DetCase::UnrestrictedConstant,
        };
        assert_eq!(
            estimate_vecm(&d, &spec, &beta).unwrap_err(),
            VecmError::InvalidRank { rank: 0, variables: 4 }
        );
        let spec = VecmSpec { rank: 4, ..spec };
        assert!(matches!(
            estimate_vecm(&d, &spec, &Matrix::zeros(4, 4)),
            Err(VecmError::InvalidRank { .. })
        ));
    }

    #[test]
    fn too_short_sample() {
        let d = four_vars(8);
        let beta = Matrix::from_rows(&[vec![1.0], vec![0.0], vec![0.0], vec![0.0]]).unwrap();
        let spec = VecmSpec {
            rank: 1,
            diff_lags: 1,
            det_case: DetCase::UnrestrictedConstant,
        };
        assert!(matches!(estimate_vecm(&d, &spec, &beta), Err(VecmError::TooShort { .. })));
    }

    #[test]
    fn normalisation_sets_leading_block_to_identity() {
        let beta = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0], vec![0.5, -1.0], vec![4.0, 0.0]]).unwrap();
        let b = normalize_beta(&beta).unwrap();
        assert!((b[(0, 0)] - 1.0).abs() < 1e-14 && b[(0, 1)].abs() < 1e-14);
        assert!(b[(1, 0)].abs() < 1e-14 && (b[(1, 1)] - 1.0).abs() < 1e-14);
        let one = Matrix::from_rows(&[vec![-2.0], vec![1.0]]).unwrap();
        assert_eq!(normalize_beta(&one).unwrap().as_slice(), &[1.0, -0.5]);
        let zero_top = Matrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(normalize_beta(&zero_top), Err(VecmError::SingularNormalization(1)));
    }

    #[test]
    fn long_run_recovers_exact_relation() {
        let len = 18;
        let lac = wobble(len, 0.9, 0.04);
        let lfdi = wobble(len, 1.7, -0.02);
        let lhc = wobble(len, 0.3, 0.01);
        let lgdp: Vec<f64> = (0..len).map(|t| 3.5 + 0.8 * lac[t] - 0.25 * lfdi[t] + 1.4 * lhc[t]).collect();
        let d = dataset(&[("lgdp", lgdp), ("lac", lac), ("lfdi", lfdi), ("lhc", lhc)]);
        let fit = long_run_ols(&d).unwrap();
        for (got, want) in fit.coefficients.iter().zip([3.5, 0.8, -0.25, 1.4]) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        assert_eq!(fit.labels, vec!["C", "lac", "lfdi", "lhc"]);
    }

    #[test]
    fn long_run_collinear_regressors() {
        let len = 18;
        let x = wobble(len, 0.9, 0.04);
        let d = dataset(&[("lgdp", wobble(len, 0.5, 0.1)), ("lac", wobble(len, 1.1, 0.0)), ("lfdi", x.clone()), ("lhc", x)]);
        assert!(matches!(
            long_run_ols(&d),
            Err(VecmError::Regression(OlsError::RankDeficient { column: 3, .. }))
        ));
    }
}
