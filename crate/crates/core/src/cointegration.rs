//! Johansen reduced-rank procedure: concentration by residual regressions,
//! the generalized eigenproblem, trace and maximum-eigenvalue statistics,
//! critical values, p-values and the sequential rank decision.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Gamma};
use thiserror::Error;

use crate::linalg::{jacobi_eigen, Cholesky, LinalgError, Matrix};
use crate::linreg::{residualize, OlsError};
use crate::series::{lag_label, Dataset, LagMatrix};
use crate::tables;
use crate::unitroot::CriticalValues;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CointError {
    #[error("{len} observations are too few for {variables} variables with k = {k} (need {needed})")]
    TooShort {
        len: usize,
        variables: usize,
        k: usize,
        needed: usize,
    },
    #[error("{which} is not positive definite; levels may be collinear or the sample too short")]
    NotPositiveDefinite { which: &'static str },
    #[error("no critical values for n - r = {0} (supported: 1..=12)")]
    UnsupportedDimension(usize),
    #[error("significance {0} has no tabulated critical value (use 0.01, 0.05 or 0.10)")]
    UnsupportedSignificance(f64),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Regression(#[from] OlsError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The five standard deterministic specifications of the VECM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetCase {
    /// Case 1: no deterministic terms.
    NoDeterministic,
    /// Case 2: constant restricted to the cointegrating space.
    RestrictedConstant,
    /// Case 3: unrestricted constant, no trend.
    UnrestrictedConstant,
    /// Case 4: unrestricted constant, trend restricted to the cointegrating space.
    RestrictedTrend,
    /// Case 5: unrestricted constant and trend.
    UnrestrictedTrend,
}

impl DetCase {
    pub const ALL: [DetCase; 5] = [
        DetCase::NoDeterministic,
        DetCase::RestrictedConstant,
        DetCase::UnrestrictedConstant,
        DetCase::RestrictedTrend,
        DetCase::UnrestrictedTrend,
    ];

    pub fn number(self) -> usize {
        self as usize + 1
    }

    /// Term appended to `Y_{t-1}` inside the cointegrating relation.
    pub fn restricted_term(self) -> Option<&'static str> {
        match self {
            DetCase::RestrictedConstant => Some("C"),
            DetCase::RestrictedTrend => Some("@TREND"),
            _ => None,
        }
    }

    pub fn unrestricted_constant(self) -> bool {
        matches!(
            self,
            DetCase::UnrestrictedConstant | DetCase::RestrictedTrend | DetCase::UnrestrictedTrend
        )
    }

    pub fn unrestricted_trend(self) -> bool {
        self == DetCase::UnrestrictedTrend
    }
}

impl Default for DetCase {
    fn default() -> Self {
        DetCase::UnrestrictedConstant
    }
}

impl fmt::Display for DetCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            DetCase::NoDeterministic => "no deterministic terms",
            DetCase::RestrictedConstant => "restricted constant",
            DetCase::UnrestrictedConstant => "unrestricted constant",
            DetCase::RestrictedTrend => "restricted trend",
            DetCase::UnrestrictedTrend => "unrestricted trend",
        };
        write!(f, "case {} ({text})", self.number())
    }
}

impl FromStr for DetCase {
    type Err = String;

    /// Accepts the case number or its snake_case name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "1" | "no_deterministic" | "none" => Ok(DetCase::NoDeterministic),
            "2" | "restricted_constant" => Ok(DetCase::RestrictedConstant),
            "3" | "unrestricted_constant" | "constant" => Ok(DetCase::UnrestrictedConstant),
            "4" | "restricted_trend" => Ok(DetCase::RestrictedTrend),
            "5" | "unrestricted_trend" | "trend" => Ok(DetCase::UnrestrictedTrend),
            other => Err(format!("unknown deterministic case `{other}` (expected 1-5)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JohansenSpec {
    /// Lag order of the VAR in levels; the VECM has `k - 1` lagged differences.
    pub var_lags_k: usize,
    pub det_case: DetCase,
    pub significance: f64,
}

impl Default for JohansenSpec {
    fn default() -> Self {
        JohansenSpec {
            var_lags_k: 2,
            det_case: DetCase::UnrestrictedConstant,
            significance: 0.05,
        }
    }
}

/// Residuals of the concentrated likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    /// `ΔY_t` net of short-run dynamics and unrestricted deterministics.
    pub r0: Matrix,
    /// `Y_{t-1}` (plus any restricted term) net of the same regressors.
    pub r1: Matrix,
    /// Row labels of the cointegrating vectors, matching the columns of `r1`.
    pub r1_labels: Vec<String>,
    pub t_eff: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrices {
    pub s00: Matrix,
    pub s01: Matrix,
    pub s10: Matrix,
    pub s11: Matrix,
    pub t_eff: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    /// Descending, in `[0, 1)`.
    pub eigenvalues: Vec<f64>,
    /// Cointegrating vectors as columns, normalised so `βᵀ S11 β = I`.
    pub beta: Matrix,
    /// Loadings `S01 β`.
    pub alpha: Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticKind {
    Trace,
    MaxEigen,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JohansenCriticalValues {
    pub trace: CriticalValues,
    pub max_eigen: CriticalValues,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohansenResult {
    pub variables: Vec<String>,
    pub eigenvalues: Vec<f64>,
    /// `n1 × n` cointegrating vectors (columns); `n1 = n + 1` when a
    /// deterministic term is restricted to the cointegrating space.
    pub beta: Matrix,
    pub beta_labels: Vec<String>,
    /// `n × n` loadings.
    pub alpha: Matrix,
    /// Indexed by hypothesised rank `r = 0..n`.
    pub trace_stats: Vec<f64>,
    pub max_eigen_stats: Vec<f64>,
    pub critical_values_trace: Vec<CriticalValues>,
    pub critical_values_max: Vec<CriticalValues>,
    pub p_values_trace: Vec<f64>,
    pub p_values_max: Vec<f64>,
    pub rank_trace: usize,
    pub rank_max: usize,
    pub t_eff: usize,
    pub spec: JohansenSpec,
}

impl JohansenResult {
    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Critical values at the spec's significance, per hypothesised rank.
    pub fn selected_critical_values(&self, kind: StatisticKind) -> Vec<f64> {
        let cvs = match kind {
            StatisticKind::Trace => &self.critical_values_trace,
            StatisticKind::MaxEigen => &self.critical_values_max,
        };
        cvs.iter()
            .map(|cv| cv.at(self.spec.significance).expect("validated significance"))
            .collect()
    }
}

fn validate(d: &Dataset, spec: &JohansenSpec) -> Result<(), CointError> {
    if spec.var_lags_k == 0 {
        return Err(CointError::InvalidSpec("var_lags_k must be at least 1".into()));
    }
    if !(spec.significance > 0.0 && spec.significance < 1.0) {
        return Err(CointError::InvalidSpec(format!(
            "significance {} outside (0, 1)",
            spec.significance
        )));
    }
    let needed = spec.var_lags_k + d.dimension() + 5;
    if d.len() < needed {
        return Err(CointError::TooShort {
            len: d.len(),
            variables: d.dimension(),
            k: spec.var_lags_k,
            needed,
        });
    }
    Ok(())
}

/// Short-run regressors shared by both residual regressions:
/// `ΔY_{t-1} .. ΔY_{t-k+1}` then the unrestricted deterministic terms.
/// Rows are `t = k..len`.
pub(crate) fn short_run_regressors(d: &Dataset, k: usize, case: DetCase) -> LagMatrix {
    let levels = d.to_matrix();
    let len = levels.nrows();
    let rows = len - k;
    let mut labels = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for lag in 1..k {
        for (j, name) in d.names().iter().enumerate() {
            labels.push(format!("D({})", lag_label(name, lag)));
            columns.push(
                (k..len)
                    .map(|t| levels[(t - lag, j)] - levels[(t - lag - 1, j)])
                    .collect(),
            );
        }
    }
    if case.unrestricted_constant() {
        labels.push("C".into());
        columns.push(vec![1.0; rows]);
    }
    if case.unrestricted_trend() {
        labels.push("@TREND".into());
        columns.push((1..=rows).map(|t| t as f64).collect());
    }
    LagMatrix::new(labels, Matrix::from_fn(rows, columns.len(), |i, j| columns[j][i]))
}

/// `ΔY_t` and `Y_{t-1}` (with any restricted term) over rows `t = k..len`.
pub(crate) fn levels_and_differences(d: &Dataset, k: usize, case: DetCase) -> (Matrix, Matrix, Vec<String>) {
    let levels = d.to_matrix();
    let (len, n) = levels.shape();
    let rows = len - k;
    let z0 = Matrix::from_fn(rows, n, |i, j| levels[(i + k, j)] - levels[(i + k - 1, j)]);
    let extra = usize::from(case.restricted_term().is_some());
    let z1 = Matrix::from_fn(rows, n + extra, |i, j| {
        if j < n {
            levels[(i + k - 1, j)]
        } else if case == DetCase::RestrictedConstant {
            1.0
        } else {
            (i + 1) as f64
        }
    });
    let mut labels: Vec<String> = d.names().iter().map(|s| lag_label(s, 1)).collect();
    if let Some(term) = case.restricted_term() {
        labels.push(term.to_string());
    }
    (z0, z1, labels)
}

/// Concentrates out the short-run dynamics.
pub fn residual_regressions(d: &Dataset, spec: &JohansenSpec) -> Result<Residuals, CointError> {
    validate(d, spec)?;
    let k = spec.var_lags_k;
    let z2 = short_run_regressors(d, k, spec.det_case);
    let (z0, z1, r1_labels) = levels_and_differences(d, k, spec.det_case);
    Ok(Residuals {
        r0: residualize(&z2, &z0)?,
        r1: residualize(&z2, &z1)?,
        r1_labels,
        t_eff: d.len() - k,
    })
}

/// `S_ij = R_iᵀ R_j / t_eff`.
pub fn moment_matrices(r0: &Matrix, r1: &Matrix, t_eff: usize) -> MomentMatrices {
    assert_eq!(r0.nrows(), r1.nrows(), "residual matrices differ in rows");
    let scale = 1.0 / t_eff as f64;
    let s01 = r0.t_mul(r1).scale(scale);
    MomentMatrices {
        s00: r0.t_mul(r0).scale(scale).symmetrize(),
        s10: s01.transpose(),
        s01,
        s11: r1.t_mul(r1).scale(scale).symmetrize(),
        t_eff,
    }
}

/// Off-diagonal tolerance for the Jacobi sweeps, relative to the matrix norm.
const JACOBI_TOL: f64 = 1e-13;

/// Solves `det(λ S11 − S10 S00⁻¹ S01) = 0`.
///
/// With `S11 = L Lᵀ` the problem becomes the symmetric eigenproblem of
/// `L⁻¹ S10 S00⁻¹ S01 L⁻ᵀ`; eigenvectors `v` map back as `β = L⁻ᵀ v`.
/// Only the `n = dim(S00)` leading roots are returned; the rest are zero.
pub fn solve_eigenproblem(m: &MomentMatrices) -> Result<EigenSolution, CointError> {
    let chol11 = Cholesky::new(&m.s11).map_err(|_| CointError::NotPositiveDefinite { which: "S11" })?;
    let chol00 = Cholesky::new(&m.s00).map_err(|_| CointError::NotPositiveDefinite { which: "S00" })?;
    let a = &m.s10 * &chol00.solve(&m.s01);
    let half = chol11.solve_lower(&a.symmetrize());
    let c = chol11.solve_lower(&half.transpose()).symmetrize();
    let eig = jacobi_eigen(&c, JACOBI_TOL)?;
    let n = m.s00.nrows();
    let beta_all = chol11.solve_upper(&eig.vectors);
    let beta = beta_all.columns(0..n);
    let eigenvalues = eig.values[..n].iter().map(|v| v.max(0.0)).collect();
    let alpha = &m.s01 * &beta;
    Ok(EigenSolution {
        eigenvalues,
        beta,
        alpha,
    })
}

/// `trace(r) = −T Σ_{i>r} ln(1 − λ_i)` for `r = 0..n`.
pub fn trace_statistics(eigenvalues: &[f64], t_eff: usize) -> Vec<f64> {
    let t = t_eff as f64;
    let terms: Vec<f64> = eigenvalues.iter().map(|l| -t * (-l).ln_1p()).collect();
    let mut out = vec![0.0; terms.len()];
    let mut acc = 0.0;
    for r in (0..terms.len()).rev() {
        acc += terms[r];
        out[r] = acc;
    }
    out
}

/// `maxeig(r) = −T ln(1 − λ_{r+1})` for `r = 0..n`.
pub fn max_eigen_statistics(eigenvalues: &[f64], t_eff: usize) -> Vec<f64> {
    let t = t_eff as f64;
    eigenvalues.iter().map(|l| -t * (-l).ln_1p()).collect()
}

/// 10%, 5% and 1% critical values for `n − r` common trends.
pub fn johansen_critical_values(n_minus_r: usize, case: DetCase) -> Result<JohansenCriticalValues, CointError> {
    if !(1..=tables::JOHANSEN_MAX_DIM).contains(&n_minus_r) {
        return Err(CointError::UnsupportedDimension(n_minus_r));
    }
    let row = |t: &[[[f64; 3]; 12]; 5]| {
        let [ten, five, one] = t[case.number() - 1][n_minus_r - 1];
        CriticalValues { one, five, ten }
    };
    Ok(JohansenCriticalValues {
        trace: row(&tables::JOHANSEN_TRACE_CV),
        max_eigen: row(&tables::JOHANSEN_MAX_CV),
    })
}

/// Upper-tail probability from a gamma distribution matched to the mean and
/// variance of the asymptotic null distribution.
pub fn johansen_pvalue(stat: f64, n_minus_r: usize, case: DetCase, kind: StatisticKind) -> Result<f64, CointError> {
    if !(1..=tables::JOHANSEN_MAX_DIM).contains(&n_minus_r) {
        return Err(CointError::UnsupportedDimension(n_minus_r));
    }
    let moments = match kind {
        StatisticKind::Trace => &tables::JOHANSEN_TRACE_MOMENTS,
        StatisticKind::MaxEigen => &tables::JOHANSEN_MAX_MOMENTS,
    };
    let [mean, var] = moments[case.number() - 1][n_minus_r - 1];
    if stat <= 0.0 {
        return Ok(1.0);
    }
    let gamma = Gamma::new(mean * mean / var, mean / var).expect("positive tabulated moments");
    Ok(gamma.sf(stat))
}

/// Smallest `r` whose statistic does not exceed its critical value; `n` if
/// every hypothesis is rejected.
pub fn select_rank(stats: &[f64], cvs: &[f64]) -> usize {
    assert_eq!(stats.len(), cvs.len(), "one critical value per statistic");
    stats
        .iter()
        .zip(cvs)
        .position(|(s, c)| s <= c)
        .unwrap_or(stats.len())
}

/// Full Johansen procedure.
pub fn johansen_test(d: &Dataset, spec: &JohansenSpec) -> Result<JohansenResult, CointError> {
    let probe = CriticalValues {
        one: 0.0,
        five: 0.0,
        ten: 0.0,
    };
    if probe.at(spec.significance).is_none() {
        return Err(CointError::UnsupportedSignificance(spec.significance));
    }
    let res = residual_regressions(d, spec)?;
    let moments = moment_matrices(&res.r0, &res.r1, res.t_eff);
    let eig = solve_eigenproblem(&moments)?;
    let n = d.dimension();
    let trace_stats = trace_statistics(&eig.eigenvalues, res.t_eff);
    let max_eigen_stats = max_eigen_statistics(&eig.eigenvalues, res.t_eff);

    let mut critical_values_trace = Vec::with_capacity(n);
    let mut critical_values_max = Vec::with_capacity(n);
    let mut p_values_trace = Vec::with_capacity(n);
    let mut p_values_max = Vec::with_capacity(n);
    for r in 0..n {
        let m = n - r;
        let cv = johansen_critical_values(m, spec.det_case)?;
        critical_values_trace.push(cv.trace);
        critical_values_max.push(cv.max_eigen);
        p_values_trace.push(johansen_pvalue(trace_stats[r], m, spec.det_case, StatisticKind::Trace)?);
        p_values_max.push(johansen_pvalue(max_eigen_stats[r], m, spec.det_case, StatisticKind::MaxEigen)?);
    }
    let pick = |cvs: &[CriticalValues]| -> Vec<f64> {
        cvs.iter().map(|c| c.at(spec.significance).unwrap()).collect()
    };
    let rank_trace = select_rank(&trace_stats, &pick(&critical_values_trace));
    let rank_max = select_rank(&max_eigen_stats, &pick(&critical_values_max));

    Ok(JohansenResult {
        variables: d.names().iter().map(|s| s.to_string()).collect(),
        eigenvalues: eig.eigenvalues,
        beta: eig.beta,
        beta_labels: res.r1_labels,
        alpha: eig.alpha,
        trace_stats,
        max_eigen_stats,
        critical_values_trace,
        critical_values_max,
        p_values_trace,
        p_values_max,
        rank_trace,
        rank_max,
        t_eff: res.t_eff,
        spec: *spec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRINTED_EIGENVALUES: [f64; 4] = [0.944838, 0.672883, 0.391638, 0.077682];

    #[test]
    fn printed_statistics_from_printed_eigenvalues() {
        let trace = trace_statistics(&PRINTED_EIGENVALUES, 16);
        let max = max_eigen_statistics(&PRINTED_EIGENVALUES, 16);
        for (got, want) in trace.iter().zip([73.48422, 27.12461, 9.245623, 1.293850]) {
            assert!((got - want).abs() < 0.005, "{got} vs {want}");
        }
        for (got, want) in max.iter().zip([46.35961, 17.87899, 7.951773, 1.293850]) {
            assert!((got - want).abs() < 0.005, "{got} vs {want}");
        }
    }

    #[test]
    fn zero_eigenvalues_give_zero_statistics() {
        assert_eq!(trace_statistics(&[0.0; 3], 50), vec![0.0; 3]);
        assert_eq!(max_eigen_statistics(&[0.0], 50), vec![0.0]);
        let one = [0.3];
        assert_eq!(trace_statistics(&one, 40), max_eigen_statistics(&one, 40));
    }

    #[test]
    fn printed_critical_values() {
        let case3 = DetCase::UnrestrictedConstant;
        let trace: Vec<f64> = (1..=4).map(|m| johansen_critical_values(m, case3).unwrap().trace.five).collect();
        let max: Vec<f64> = (1..=4)
            .map(|m| johansen_critical_values(m, case3).unwrap().max_eigen.five)
            .collect();
        assert_eq!(trace, vec![3.841465, 15.49471, 29.79707, 47.85613]);
        assert_eq!(max, vec![3.841465, 14.26460, 21.13162, 27.58434]);
        assert!(matches!(
            johansen_critical_values(13, case3),
            Err(CointError::UnsupportedDimension(13))
        ));
        assert!(matches!(
            johansen_critical_values(0, case3),
            Err(CointError::UnsupportedDimension(0))
        ));
    }

    #[test]
    fn critical_values_ordered_everywhere() {
        for case in DetCase::ALL {
            for m in 1..=12 {
                let cv = johansen_critical_values(m, case).unwrap();
                for c in [cv.trace, cv.max_eigen] {
                    assert!(c.ten < c.five && c.five < c.one, "{case} m={m}: {c:?}");
                }
                assert!(cv.max_eigen.five <= cv.trace.five + 1e-9);
            }
        }
    }

    #[test]
    fn rank_from_printed_table() {
        let trace = [73.48422, 27.12461, 9.245623, 1.293850];
        let trace_cv = [47.85613, 29.79707, 15.49471, 3.841465];
        assert_eq!(select_rank(&trace, &trace_cv), 1);
        let max = [46.35961, 17.87899, 7.951773, 1.293850];
        let max_cv = [27.58434, 21.13162, 14.26460, 3.841465];
        assert_eq!(select_rank(&max, &max_cv), 1);
        assert_eq!(select_rank(&[1.0, 0.5], &[2.0, 1.0]), 0);
        assert_eq!(select_rank(&[5.0, 4.0], &[2.0, 1.0]), 2);
    }

    #[test]
    fn pvalues_for_printed_statistics() {
        let case3 = DetCase::UnrestrictedConstant;
        assert!(johansen_pvalue(73.48422, 4, case3, StatisticKind::Trace).unwrap() < 0.001);
        let p = johansen_pvalue(27.12461, 3, case3, StatisticKind::Trace).unwrap();
        assert!((p - 0.10).abs() <= 0.02, "{p}");
    }

    #[test]
    fn pvalue_at_five_percent_critical_value() {
        for case in DetCase::ALL {
            for m in 1..=12 {
                let cv = johansen_critical_values(m, case).unwrap();
                for (kind, c) in [(StatisticKind::Trace, cv.trace.five), (StatisticKind::MaxEigen, cv.max_eigen.five)] {
                    let p = johansen_pvalue(c, m, case, kind).unwrap();
                    assert!((p - 0.05).abs() <= 0.01, "{case} m={m} {kind:?}: p={p}");
                }
            }
        }
    }

    #[test]
    fn pvalue_decreases_in_statistic() {
        let mut last = 1.0;
        for i in 0..200 {
            let p = johansen_pvalue(i as f64 * 0.5, 3, DetCase::UnrestrictedConstant, StatisticKind::Trace).unwrap();
            assert!(p <= last);
            last = p;
        }
    }

    #[test]
    fn det_case_parses_numbers_and_names() {
        assert_eq!("3".parse::<DetCase>().unwrap(), DetCase::UnrestrictedConstant);
        assert_eq!("restricted_trend".parse::<DetCase>().unwrap(), DetCase::RestrictedTrend);
        assert!("6".parse::<DetCase>().is_err());
    }

    #[test]
    fn scalar_case_is_squared_correlation() {
        let r0 = Matrix::column_vector(&[0.5, -1.0, 0.3, 0.8, -0.2, 0.1]);
        let r1 = Matrix::column_vector(&[1.0, -0.4, 0.9, 0.2, -0.7, 0.3]);
        let m = moment_matrices(&r0, &r1, 6);
        let e = solve_eigenproblem(&m).unwrap();
        let want = m.s01[(0, 0)].powi(2) / (m.s00[(0, 0)] * m.s11[(0, 0)]);
        assert!((e.eigenvalues[0] - want).abs() < 1e-14);
    }

    #[test]
    fn identical_residuals_share_moments() {
        let r = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.5, -1.0], vec![-0.3, 0.7]]).unwrap();
        let m = moment_matrices(&r, &r, 3);
        assert_eq!(m.s00, m.s11);
        assert!((&m.s00 - &m.s01).max_abs() < 1e-15);
    }
}
