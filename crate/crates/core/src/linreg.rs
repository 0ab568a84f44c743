//! Ordinary least squares via Householder QR with the usual diagnostics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{LinalgError, Qr};
use crate::series::LagMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OlsError {
    #[error("regressor `{label}` (column {column}) is collinear with earlier regressors")]
    RankDeficient { column: usize, label: String },
    #[error("{params} parameters but only {obs} observations")]
    Underdetermined { obs: usize, params: usize },
    #[error("response has {got} observations, regressors have {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Relative size below which an `R` diagonal entry marks a dependent column.
const RANK_TOL: f64 = 1e-10;

/// R², adjusted R² and the overall F statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub r2: f64,
    pub adj_r2: f64,
    pub f_stat: f64,
    /// Set when the fit is perfect and F is infinite.
    pub degenerate: bool,
}

impl SummaryStats {
    /// Summary statistics for a regression with an intercept, from its R².
    ///
    /// F tests every non-intercept coefficient jointly, on
    /// `(n_params - 1, n_obs - n_params)` degrees of freedom.
    pub fn from_r2(r2: f64, n_obs: usize, n_params: usize) -> SummaryStats {
        let n = n_obs as f64;
        let k = n_params as f64;
        let adj_r2 = 1.0 - (1.0 - r2) * (n - 1.0) / (n - k);
        let degenerate = r2 >= 1.0;
        let f_stat = if degenerate {
            f64::INFINITY
        } else {
            (r2 / (k - 1.0)) / ((1.0 - r2) / (n - k))
        };
        SummaryStats {
            r2,
            adj_r2,
            f_stat,
            degenerate,
        }
    }

    /// Uncentred variant for regressions without an intercept.
    fn uncentred(r2: f64, n_obs: usize, n_params: usize) -> SummaryStats {
        let n = n_obs as f64;
        let k = n_params as f64;
        let degenerate = r2 >= 1.0;
        SummaryStats {
            r2,
            adj_r2: 1.0 - (1.0 - r2) * n / (n - k),
            f_stat: if degenerate {
                f64::INFINITY
            } else {
                (r2 / k) / ((1.0 - r2) / (n - k))
            },
            degenerate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub labels: Vec<String>,
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
    /// RSS / (n_obs - n_params).
    pub sigma2: f64,
    pub rss: f64,
    /// Total sum of squares about the mean (about zero without an intercept).
    pub tss: f64,
    pub r2: f64,
    pub adj_r2: f64,
    pub f_stat: f64,
    pub n_obs: usize,
    pub n_params: usize,
    pub has_intercept: bool,
}

impl OlsFit {
    pub fn coefficient(&self, label: &str) -> Option<f64> {
        self.index_of(label).map(|i| self.coefficients[i])
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn log_likelihood(&self) -> f64 {
        let n = self.n_obs as f64;
        -0.5 * n * (1.0 + (2.0 * std::f64::consts::PI).ln() + (self.rss / n).ln())
    }

    /// Akaike criterion, `-2 llf + 2 k`.
    pub fn aic(&self) -> f64 {
        -2.0 * self.log_likelihood() + 2.0 * self.n_params as f64
    }

    /// Schwarz criterion, `-2 llf + k ln n`.
    pub fn bic(&self) -> f64 {
        -2.0 * self.log_likelihood() + self.n_params as f64 * (self.n_obs as f64).ln()
    }
}

fn is_constant_column(x: &LagMatrix, j: usize) -> bool {
    let m = x.values();
    let first = m[(0, j)];
    first != 0.0 && (0..m.nrows()).all(|i| m[(i, j)] == first)
}

/// Least-squares fit of `y` on the columns of `x`.
pub fn ols_fit(x: &LagMatrix, y: &[f64]) -> Result<OlsFit, OlsError> {
    let (n_obs, n_params) = x.values().shape();
    if y.len() != n_obs {
        return Err(OlsError::LengthMismatch {
            expected: n_obs,
            got: y.len(),
        });
    }
    if n_obs <= n_params {
        return Err(OlsError::Underdetermined {
            obs: n_obs,
            params: n_params,
        });
    }
    let qr = Qr::new(x.values()).map_err(|e| match e {
        LinalgError::DimensionMismatch(_) => OlsError::Underdetermined {
            obs: n_obs,
            params: n_params,
        },
        other => unreachable!("QR only fails on shape: {other}"),
    })?;
    let norms: Vec<f64> = (0..n_params)
        .map(|j| x.values().column(j).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    if let Some(column) = qr.first_dependent_column(&norms, RANK_TOL) {
        return Err(OlsError::RankDeficient {
            column,
            label: x.labels()[column].clone(),
        });
    }

    let coefficients = qr.solve(y);
    let fitted = x.values().mul_vec(&coefficients);
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let sigma2 = rss / (n_obs - n_params) as f64;
    let xtx_inv = qr.inverse_gram();
    let standard_errors: Vec<f64> = (0..n_params)
        .map(|i| (sigma2 * xtx_inv[(i, i)]).sqrt())
        .collect();
    let t_stats = coefficients
        .iter()
        .zip(&standard_errors)
        .map(|(b, se)| b / se)
        .collect();

    let has_intercept = (0..n_params).any(|j| is_constant_column(x, j));
    let (tss, stats) = if has_intercept {
        let mean = y.iter().sum::<f64>() / n_obs as f64;
        let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
        (tss, SummaryStats::from_r2(1.0 - rss / tss, n_obs, n_params))
    } else {
        let tss: f64 = y.iter().map(|v| v * v).sum();
        (tss, SummaryStats::uncentred(1.0 - rss / tss, n_obs, n_params))
    };

    Ok(OlsFit {
        labels: x.labels().to_vec(),
        coefficients,
        standard_errors,
        t_stats,
        residuals,
        fitted,
        sigma2,
        rss,
        tss,
        r2: stats.r2,
        adj_r2: stats.adj_r2,
        f_stat: stats.f_stat,
        n_obs,
        n_params,
        has_intercept,
    })
}

/// R², adjusted R² and F of an existing fit.
pub fn summary_stats(fit: &OlsFit) -> SummaryStats {
    if fit.has_intercept {
        SummaryStats::from_r2(fit.r2, fit.n_obs, fit.n_params)
    } else {
        SummaryStats::uncentred(fit.r2, fit.n_obs, fit.n_params)
    }
}

/// Residuals of each column of `targets` regressed on `x`.
pub(crate) fn residualize(
    x: &LagMatrix,
    targets: &crate::linalg::Matrix,
) -> Result<crate::linalg::Matrix, OlsError> {
    use crate::linalg::Matrix;
    if x.cols() == 0 {
        return Ok(targets.clone());
    }
    let mut out = Matrix::zeros(targets.nrows(), targets.ncols());
    for j in 0..targets.ncols() {
        let fit = ols_fit(x, &targets.column(j))?;
        out.set_column(j, &fit.residuals);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn design(columns: &[Vec<f64>], labels: &[&str]) -> LagMatrix {
        LagMatrix::new(
            labels.iter().map(|s| s.to_string()).collect(),
            Matrix::from_columns(columns).unwrap(),
        )
    }

    #[test]
    fn exact_linear_fit() {
        let xs: Vec<f64> = (0..8).map(f64::from).collect();
        let y: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let fit = ols_fit(&design(&[vec![1.0; 8], xs], &["C", "x"]), &y).unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 2.0).abs() < 1e-12);
        assert!(fit.residuals.iter().all(|e| e.abs() < 1e-12));
        assert!((fit.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_point_fit_matches_hand_solution() {
        // normal equations [[3,3],[3,5]] b = [1,1] give b = (1/3, 0)
        let fit = ols_fit(
            &design(&[vec![1.0; 3], vec![0.0, 1.0, 2.0]], &["C", "x"]),
            &[0.0, 1.0, 0.0],
        )
        .unwrap();
        assert!((fit.coefficients[0] - 1.0 / 3.0).abs() < 1e-14);
        assert!(fit.coefficients[1].abs() < 1e-14);
    }

    #[test]
    fn duplicated_column_is_rank_deficient() {
        let x = vec![1.0, 2.0, 4.0, 3.0, 5.0];
        let err = ols_fit(
            &design(&[vec![1.0; 5], x.clone(), x], &["C", "x", "x_copy"]),
            &[1.0, 2.0, 3.0, 4.0, 5.0],
        )
        .unwrap_err();
        assert_eq!(
            err,
            OlsError::RankDeficient {
                column: 2,
                label: "x_copy".into()
            }
        );
    }

    #[test]
    fn too_few_rows() {
        let err = ols_fit(&design(&[vec![1.0; 2], vec![0.0, 1.0]], &["C", "x"]), &[0.0, 1.0]).unwrap_err();
        assert_eq!(err, OlsError::Underdetermined { obs: 2, params: 2 });
    }

    #[test]
    fn summary_identities_from_printed_r2() {
        let s = SummaryStats::from_r2(0.291200, 16, 6);
        assert!((s.adj_r2 - -0.063200).abs() < 5e-4);
        let s = SummaryStats::from_r2(0.680465, 16, 6);
        assert!((s.f_stat - 4.2591).abs() < 5e-4);
        let s = SummaryStats::from_r2(1.0, 16, 6);
        assert_eq!(s.adj_r2, 1.0);
        assert!(s.degenerate && s.f_stat.is_infinite());
    }
}
