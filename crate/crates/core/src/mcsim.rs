//! Deterministic Monte Carlo engine: data-generating processes, rejection
//! frequencies and simulated null quantiles.
//!
//! Randomness: every replication `i` owns an independent
//! [`Xoshiro256PlusPlus`] stream seeded with `seed_from_u64(seed + i)`
//! (wrapping add; the seed is expanded through SplitMix64). Standard normal
//! innovations come from the Marsaglia polar method. Results therefore do not
//! depend on thread count or scheduling.

use std::io::{self, Write};
use std::time::Instant;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cointegration::{johansen_test, DetCase, JohansenSpec};
use crate::linalg::Matrix;
use crate::series::{Dataset, Deterministics, Series};
use crate::unitroot::{adf_statistic, adf_test, AdfSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

/// Standard normal draws by the Marsaglia polar method, caching the spare.
pub struct Gaussian {
    rng: Xoshiro256PlusPlus,
    spare: Option<f64>,
}

impl Gaussian {
    pub fn new(seed: u64) -> Self {
        Gaussian {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on `(-1, 1)` from the top 53 bits.
    fn symmetric_uniform(&mut self) -> f64 {
        let u = (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        2.0 * u - 1.0
    }

    pub fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = self.symmetric_uniform();
            let v = self.symmetric_uniform();
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let k = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * k);
                return u * k;
            }
        }
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        for x in out {
            *x = self.next();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DgpKind {
    RandomWalk,
    Ar1 { rho: f64 },
    /// Twice-integrated noise.
    I2,
    /// Triangular system: `rank` series `y_i = x_{i mod m} + u_i` with
    /// `u_t = (1 - loading) u_{t-1} + e_t`, followed by `m = n - rank`
    /// independent random walks `x_j`.
    Cointegrated { rank: usize, loading: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dgp {
    pub kind: DgpKind,
    pub dimension: usize,
    pub innovation_scale: f64,
    /// Mean of the random-walk increments. The unrestricted-constant tables
    /// assume trending data; driftless walks belong with the restricted
    /// constant case.
    #[serde(default)]
    pub drift: f64,
}

impl Dgp {
    pub fn random_walk(dimension: usize) -> Self {
        Dgp {
            kind: DgpKind::RandomWalk,
            dimension,
            innovation_scale: 1.0,
            drift: 0.0,
        }
    }

    pub fn ar1(rho: f64) -> Self {
        Dgp {
            kind: DgpKind::Ar1 { rho },
            dimension: 1,
            innovation_scale: 1.0,
            drift: 0.0,
        }
    }

    pub fn i2() -> Self {
        Dgp {
            kind: DgpKind::I2,
            dimension: 1,
            innovation_scale: 1.0,
            drift: 0.0,
        }
    }

    pub fn cointegrated(n: usize, rank: usize, loading: f64) -> Self {
        Dgp {
            kind: DgpKind::Cointegrated { rank, loading },
            dimension: n,
            innovation_scale: 1.0,
            drift: 0.0,
        }
    }

    pub fn with_drift(self, drift: f64) -> Self {
        Dgp { drift, ..self }
    }

    pub fn validate(&self) -> Result<(), McError> {
        let bad = |m: String| Err(McError::BadParameter(m));
        if self.dimension == 0 {
            return bad("dimension must be at least 1".into());
        }
        if !(self.innovation_scale > 0.0 && self.innovation_scale.is_finite()) {
            return bad(format!("innovation scale {} must be positive", self.innovation_scale));
        }
        if !self.drift.is_finite() {
            return bad(format!("drift {} must be finite", self.drift));
        }
        match self.kind {
            DgpKind::Ar1 { rho } if !(rho.abs() < 1.0) => bad(format!("ar1 needs |rho| < 1, got {rho}")),
            DgpKind::Cointegrated { rank, .. } if rank >= self.dimension => bad(format!(
                "cointegrating rank {rank} must be below the dimension {}",
                self.dimension
            )),
            DgpKind::Cointegrated { loading, .. } if !(loading > 0.0 && loading < 2.0) => {
                bad(format!("loading {loading} must lie in (0, 2) for stationary errors"))
            }
            _ => Ok(()),
        }
    }

    /// Cointegrating vectors of the triangular system as columns (`n × rank`).
    pub fn cointegrating_vectors(&self) -> Option<Matrix> {
        match self.kind {
            DgpKind::Cointegrated { rank, .. } => {
                let m = self.dimension - rank;
                Some(Matrix::from_fn(self.dimension, rank, |i, j| {
                    if i == j {
                        1.0
                    } else if i == rank + j % m {
                        -1.0
                    } else {
                        0.0
                    }
                }))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub seed: u64,
    pub replications: usize,
    pub sample_length: usize,
}

impl McConfig {
    fn validate(&self, min_reps: usize) -> Result<(), McError> {
        if self.replications < min_reps {
            return Err(McError::BadParameter(format!(
                "{} replications requested; at least {min_reps} required",
                self.replications
            )));
        }
        Ok(())
    }

    fn replication_seed(&self, index: usize) -> u64 {
        self.seed.wrapping_add(index as u64)
    }
}

fn cumsum(x: &mut [f64]) {
    let mut acc = 0.0;
    for v in x {
        acc += *v;
        *v = acc;
    }
}

fn draw(g: &mut Gaussian, len: usize, scale: f64) -> Vec<f64> {
    let mut e = vec![0.0; len];
    g.fill(&mut e);
    e.iter_mut().for_each(|v| *v *= scale);
    e
}

fn random_walk(g: &mut Gaussian, len: usize, scale: f64, drift: f64) -> Vec<f64> {
    let mut e = draw(g, len, scale);
    e.iter_mut().for_each(|v| *v += drift);
    cumsum(&mut e);
    e
}

/// Columns of one simulated sample.
fn generate_columns(dgp: &Dgp, len: usize, g: &mut Gaussian) -> Vec<Vec<f64>> {
    let n = dgp.dimension;
    let sc = dgp.innovation_scale;
    match dgp.kind {
        DgpKind::RandomWalk => (0..n).map(|_| random_walk(g, len, sc, dgp.drift)).collect(),
        DgpKind::Ar1 { rho } => (0..n)
            .map(|_| {
                let mut e = draw(g, len, sc);
                e[0] /= (1.0 - rho * rho).sqrt();
                for t in 1..len {
                    e[t] += rho * e[t - 1];
                }
                e
            })
            .collect(),
        DgpKind::I2 => (0..n)
            .map(|_| {
                let mut e = draw(g, len, sc);
                cumsum(&mut e);
                cumsum(&mut e);
                e
            })
            .collect(),
        DgpKind::Cointegrated { rank, loading } => {
            let m = n - rank;
            let trends: Vec<Vec<f64>> = (0..m).map(|_| random_walk(g, len, sc, dgp.drift)).collect();
            let rho = 1.0 - loading;
            let mut out: Vec<Vec<f64>> = (0..rank)
                .map(|i| {
                    let mut u = draw(g, len, sc);
                    u[0] /= (1.0 - rho * rho).sqrt();
                    for t in 1..len {
                        u[t] += rho * u[t - 1];
                    }
                    u.iter().zip(&trends[i % m]).map(|(a, b)| a + b).collect()
                })
                .collect();
            out.extend(trends);
            out
        }
    }
}

fn to_dataset(columns: Vec<Vec<f64>>) -> Dataset {
    let series = columns
        .into_iter()
        .enumerate()
        .map(|(i, v)| Series::new(format!("y{}", i + 1), 1, v).expect("finite draws"))
        .collect();
    Dataset::new(series).expect("distinct names, equal lengths")
}

/// One sample of `length` observations, a pure function of its inputs.
pub fn generate(dgp: &Dgp, length: usize, seed: u64) -> Result<Dataset, McError> {
    dgp.validate()?;
    if length < 20 {
        return Err(McError::BadParameter(format!("sample length {length} below 20")));
    }
    let mut g = Gaussian::new(seed);
    Ok(to_dataset(generate_columns(dgp, length, &mut g)))
}

/// Test whose decision rule is being checked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "test")]
pub enum McTest {
    /// ADF on the first series; rejects when the p-value is below nominal.
    Adf { spec: AdfSpec },
    /// Johansen trace test; rejects when the selected rank is positive.
    JohansenTrace { spec: JohansenSpec },
    /// Johansen maximum-eigenvalue test, same rejection rule.
    JohansenMax { spec: JohansenSpec },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantile {
    pub probability: f64,
    pub value: f64,
}

/// One replication's statistic, for CSV export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Draw {
    pub replication: usize,
    pub statistic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    /// Share of successful replications that rejected; absent for quantile runs.
    pub rejection_rate: Option<f64>,
    /// For Johansen tests, how often each rank `0..=n` was selected.
    pub rank_counts: Option<Vec<usize>>,
    /// Ascending in probability.
    pub quantiles: Vec<Quantile>,
    /// Rejection happens in the lower tail (ADF) rather than the upper tail.
    pub left_tailed: bool,
    pub replications_used: usize,
    /// Replications whose test errored; reported, never dropped silently.
    pub failures: usize,
    pub first_failure: Option<String>,
    pub draws: Vec<Draw>,
    pub elapsed_secs: f64,
}

impl McReport {
    pub fn quantile(&self, probability: f64) -> Option<f64> {
        self.quantiles
            .iter()
            .find(|q| (q.probability - probability).abs() < 1e-12)
            .map(|q| q.value)
    }

    /// Critical value at `confidence` (e.g. 0.95): the upper quantile for
    /// right-tailed statistics, the `1 - confidence` quantile for ADF.
    pub fn critical_value(&self, confidence: f64) -> Option<f64> {
        if self.left_tailed {
            self.quantile(1.0 - confidence)
        } else {
            self.quantile(confidence)
        }
    }

    /// Equality of everything except wall-clock time.
    pub fn same_results(&self, other: &McReport) -> bool {
        McReport {
            elapsed_secs: 0.0,
            ..self.clone()
        } == McReport {
            elapsed_secs: 0.0,
            ..other.clone()
        }
    }

    /// CSV with columns `replication,statistic`.
    pub fn write_draws_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "replication,statistic")?;
        for d in &self.draws {
            writeln!(w, "{},{}", d.replication, d.statistic)?;
        }
        Ok(())
    }
}

pub const REPORTED_PROBABILITIES: [f64; 7] = [0.01, 0.05, 0.10, 0.50, 0.90, 0.95, 0.99];

/// Type-7 (linear interpolation) empirical quantile of sorted data.
pub fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn quantiles_of(values: &[f64]) -> Vec<Quantile> {
    if values.is_empty() {
        return Vec::new();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    REPORTED_PROBABILITIES
        .iter()
        .map(|&p| Quantile {
            probability: p,
            value: empirical_quantile(&sorted, p),
        })
        .collect()
}

struct Outcome {
    statistic: f64,
    reject: bool,
    rank: Option<usize>,
}

fn run_test(test: &McTest, d: &Dataset, nominal: f64) -> Result<Outcome, String> {
    match test {
        McTest::Adf { spec } => {
            let spec = AdfSpec {
                significance: nominal,
                ..*spec
            };
            let r = adf_test(&d.series()[0], &spec).map_err(|e| e.to_string())?;
            Ok(Outcome {
                statistic: r.t_stat,
                reject: r.reject_unit_root,
                rank: None,
            })
        }
        McTest::JohansenTrace { spec } | McTest::JohansenMax { spec } => {
            let spec = JohansenSpec {
                significance: nominal,
                ..*spec
            };
            let r = johansen_test(d, &spec).map_err(|e| e.to_string())?;
            let (statistic, rank) = if matches!(test, McTest::JohansenTrace { .. }) {
                (r.trace_stats[0], r.rank_trace)
            } else {
                (r.max_eigen_stats[0], r.rank_max)
            };
            Ok(Outcome {
                statistic,
                reject: rank > 0,
                rank: Some(rank),
            })
        }
    }
}

/// Frequency with which `test` rejects on data from `dgp` at level `nominal`.
pub fn rejection_rate(test: &McTest, dgp: &Dgp, config: &McConfig, nominal: f64) -> Result<McReport, McError> {
    config.validate(100)?;
    dgp.validate()?;
    if config.sample_length < 20 {
        return Err(McError::BadParameter(format!(
            "sample length {} below 20",
            config.sample_length
        )));
    }
    if !(nominal > 0.0 && nominal < 1.0) {
        return Err(McError::BadParameter(format!("nominal level {nominal} outside (0, 1)")));
    }
    let started = Instant::now();
    let outcomes: Vec<Result<Outcome, String>> = (0..config.replications)
        .into_par_iter()
        .map(|i| {
            let mut g = Gaussian::new(config.replication_seed(i));
            let d = to_dataset(generate_columns(dgp, config.sample_length, &mut g));
            run_test(test, &d, nominal)
        })
        .collect();

    let mut draws = Vec::with_capacity(outcomes.len());
    let mut rejections = 0usize;
    let mut failures = 0usize;
    let mut first_failure = None;
    let mut rank_counts = matches!(test, McTest::JohansenTrace { .. } | McTest::JohansenMax { .. })
        .then(|| vec![0usize; dgp.dimension + 1]);
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(o) => {
                rejections += usize::from(o.reject);
                if let (Some(counts), Some(r)) = (rank_counts.as_mut(), o.rank) {
                    counts[r] += 1;
                }
                draws.push(Draw {
                    replication: i,
                    statistic: o.statistic,
                });
            }
            Err(e) => {
                failures += 1;
                first_failure.get_or_insert(e);
            }
        }
    }
    let used = draws.len();
    let stats: Vec<f64> = draws.iter().map(|d| d.statistic).collect();
    Ok(McReport {
        rejection_rate: (used > 0).then(|| rejections as f64 / used as f64),
        rank_counts: rank_counts.take(),
        quantiles: quantiles_of(&stats),
        left_tailed: matches!(test, McTest::Adf { .. }),
        replications_used: used,
        failures,
        first_failure,
        draws,
        elapsed_secs: started.elapsed().as_secs_f64(),
    })
}

/// Statistic whose null distribution is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "statistic", content = "case")]
pub enum NullStatistic {
    /// Dickey-Fuller t on a driftless random walk, no augmentation lags.
    AdfT(Deterministics),
    Trace(DetCase),
    MaxEigen(DetCase),
}

/// Null sample for the Johansen statistics: `m` random walks whose drift
/// matches the trend behaviour each deterministic case assumes (none for
/// cases 1 and 2, linear for 3 and 4, quadratic for 5).
fn johansen_null_sample(case: DetCase, m: usize, len: usize, g: &mut Gaussian) -> Dataset {
    let columns = (0..m)
        .map(|_| {
            let mut e = draw(g, len, 1.0);
            for (t, v) in e.iter_mut().enumerate() {
                *v += match case {
                    DetCase::NoDeterministic | DetCase::RestrictedConstant => 0.0,
                    DetCase::UnrestrictedConstant | DetCase::RestrictedTrend => 1.0,
                    DetCase::UnrestrictedTrend => 1.0 + 2.0 * t as f64 / len as f64,
                };
            }
            cumsum(&mut e);
            e
        })
        .collect();
    to_dataset(columns)
}

/// Empirical null quantiles of a test statistic from `config.replications`
/// samples of `length` observations.
pub fn simulate_quantiles(
    statistic: NullStatistic,
    n_minus_r: usize,
    length: usize,
    config: &McConfig,
) -> Result<McReport, McError> {
    config.validate(100)?;
    if length < 20 {
        return Err(McError::BadParameter(format!("sample length {length} below 20")));
    }
    match statistic {
        NullStatistic::AdfT(_) if n_minus_r != 1 => {
            return Err(McError::BadParameter("the ADF statistic is univariate; use n_minus_r = 1".into()))
        }
        NullStatistic::Trace(_) | NullStatistic::MaxEigen(_) if !(1..=12).contains(&n_minus_r) => {
            return Err(McError::BadParameter(format!("n_minus_r = {n_minus_r} outside 1..=12")))
        }
        _ => {}
    }
    let started = Instant::now();
    let outcomes: Vec<Result<f64, String>> = (0..config.replications)
        .into_par_iter()
        .map(|i| {
            let mut g = Gaussian::new(config.replication_seed(i));
            match statistic {
                NullStatistic::AdfT(det) => {
                    let y = random_walk(&mut g, length, 1.0, 0.0);
                    adf_statistic(&y, 0, det).map_err(|e| e.to_string())
                }
                NullStatistic::Trace(case) | NullStatistic::MaxEigen(case) => {
                    let d = johansen_null_sample(case, n_minus_r, length, &mut g);
                    let spec = JohansenSpec {
                        var_lags_k: 1,
                        det_case: case,
                        significance: 0.05,
                    };
                    let r = johansen_test(&d, &spec).map_err(|e| e.to_string())?;
                    Ok(if matches!(statistic, NullStatistic::Trace(_)) {
                        r.trace_stats[0]
                    } else {
                        r.max_eigen_stats[0]
                    })
                }
            }
        })
        .collect();

    let mut draws = Vec::with_capacity(outcomes.len());
    let mut failures = 0;
    let mut first_failure = None;
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(s) => draws.push(Draw {
                replication: i,
                statistic: s,
            }),
            Err(e) => {
                failures += 1;
                first_failure.get_or_insert(e);
            }
        }
    }
    let stats: Vec<f64> = draws.iter().map(|d| d.statistic).collect();
    Ok(McReport {
        rejection_rate: None,
        rank_counts: None,
        quantiles: quantiles_of(&stats),
        left_tailed: matches!(statistic, NullStatistic::AdfT(_)),
        replications_used: draws.len(),
        failures,
        first_failure,
        draws,
        elapsed_secs: started.elapsed().as_secs_f64(),
    })
}
