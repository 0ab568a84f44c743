//! Acceptance checks, one line per criterion. Run with
//! `cargo test --test acceptance`; exits non-zero if any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use vecmkit_core::cointegration::{
    johansen_critical_values, johansen_test, max_eigen_statistics, select_rank, trace_statistics, DetCase, JohansenSpec,
};
use vecmkit_core::linreg::SummaryStats;
use vecmkit_core::mcsim::{rejection_rate, simulate_quantiles, Dgp, Gaussian, McConfig, McTest, NullStatistic};
use vecmkit_core::series::{Dataset, Deterministics};
use vecmkit_core::unitroot::{adf_asymptotic_critical_values, classify_integration, AdfSpec, InfoCriterion, LagSelection};
use vecmkit_core::vecm::{estimate_vecm, normalize_beta, VecmSpec};
use vecmkit_ingest::{read_csv, CsvLayout};

const EIGENVALUES: [f64; 4] = [0.944838, 0.672883, 0.391638, 0.077682];
const TRACE: [f64; 4] = [73.48422, 27.12461, 9.245623, 1.293850];
const MAX_EIGEN: [f64; 4] = [46.35961, 17.87899, 7.951773, 1.293850];
const TRACE_CV: [f64; 4] = [3.841465, 15.49471, 29.79707, 47.85613];
const MAX_CV: [f64; 4] = [3.841465, 14.26460, 21.13162, 27.58434];
const R2: [f64; 4] = [0.291200, 0.177918, 0.408050, 0.680465];
const ADJ_R2: [f64; 4] = [-0.063200, -0.233123, 0.112075, 0.520698];
const F_STAT: [f64; 4] = [0.821670, 0.432848, 1.378662, 4.259097];

// MacKinnon (2010) asymptotic 5% values.
const ADF_CV_CONSTANT: f64 = -2.86154;
const ADF_CV_TREND: f64 = -3.41049;

// Frozen outputs of the independent reference implementation on the bundled fixture.
const ORACLE_ADF_LEVEL_T: [f64; 4] = [-1.8021750835767343, -2.596653419930511, -2.175512340459665, -0.9440368933597368];
const ORACLE_ADF_DIFF_T: [f64; 4] = [-4.247730673008589, -5.265523803981666, -4.578127927713412, -3.8876287164647163];
const ORACLE_EIGENVALUES: [f64; 4] = [0.9740090123284142, 0.47785505663547867, 0.18160957023483384, 0.06890669443774369];
const ORACLE_TRACE: [f64; 4] = [73.1460325376919, 14.745945672636486, 4.348984706847907, 1.142332574873132];
const ORACLE_MAX: [f64; 4] = [58.4000868650554, 10.39696096578858, 3.206652131974775, 1.142332574873132];
const ORACLE_VECM_COEF: [[f64; 6]; 4] = [
    [-4.770886056383413, 2.1836473678487494, -0.9775627584481539, -0.3827497560246027, -1.446384625645166, 49.23629423328382],
    [-1.8286459545580225, 0.5946013224574855, -0.5080851546534092, -0.15694997553387607, 0.5633669728417733, 18.959477296664588],
    [-3.4868846729742993, 4.45146225900406, -1.229259407690199, -0.9511087342594877, 0.9100661828698433, 35.81958160483068],
    [-0.8798749911483938, 0.48518564528249897, -0.2101408162222837, -0.0695507501164931, -0.6722543483364313, 9.081360149502789],
];
const ORACLE_VECM_SE: [[f64; 6]; 4] = [
    [1.869214108597456, 1.088777584677618, 0.5538004465822602, 0.14216328666836509, 1.6341667181339214, 19.27453699490742],
    [2.7028825563282277, 1.5743717789260854, 0.8007951362389001, 0.20556803306740043, 2.3630041610859345, 27.870969722098145],
    [5.651906000746629, 3.2921154061560056, 1.6745155372291842, 0.4298563387207088, 4.94119782103067, 58.28003908277285],
    [0.7516880439721497, 0.4378423473173619, 0.22270598778792502, 0.05716971768449703, 0.6571657993744648, 7.751085841654618],
];

type Check = Result<String, String>;

fn max_abs_diff(got: &[f64], want: &[f64]) -> f64 {
    got.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn within(label: &str, diff: f64, tol: f64) -> Check {
    let line = format!("{label} max |diff| {diff:.2e} (tol {tol:.0e})");
    if diff <= tol {
        Ok(line)
    } else {
        Err(line)
    }
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn statistics_from_eigenvalues() -> Check {
    let started = Instant::now();
    let trace = trace_statistics(&EIGENVALUES, 16);
    let max = max_eigen_statistics(&EIGENVALUES, 16);
    let elapsed = started.elapsed();
    let diff = max_abs_diff(&trace, &TRACE).max(max_abs_diff(&max, &MAX_EIGEN));
    let line = within("8 statistics", diff, 0.005)?;
    if elapsed >= Duration::from_millis(1) {
        return Err(format!("{line}; took {elapsed:?}"));
    }
    Ok(format!("{line}; {elapsed:?}"))
}

fn trace_recursion() -> Check {
    let mut g = Gaussian::new(2);
    let mut worst: f64 = 0.0;
    for case in 0..1000 {
        let n = 1 + case % 12;
        let mut eig: Vec<f64> = (0..n).map(|_| 0.5 * (1.0 + (g.next() / 2.0).tanh())).collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        let t_eff = 10 + case;
        let trace = trace_statistics(&eig, t_eff);
        let max = max_eigen_statistics(&eig, t_eff);
        for r in 0..n {
            let next = trace.get(r + 1).copied().unwrap_or(0.0);
            let scale = trace[r].abs().max(1.0);
            worst = worst.max(((trace[r] - next) - max[r]).abs() / scale);
        }
    }
    let printed = TRACE[0] - TRACE[1];
    if worst > 1e-13 {
        return Err(format!("relative residual {worst:.1e} on random inputs"));
    }
    if (printed - MAX_EIGEN[0]).abs() > 5e-6 {
        return Err(format!("printed: {printed:.5} vs {}", MAX_EIGEN[0]));
    }
    Ok(format!(
        "1000 random cases, worst relative residual {worst:.1e}; printed {} - {} = {printed:.5}",
        TRACE[0], TRACE[1]
    ))
}

fn critical_value_tables() -> Check {
    let case3 = DetCase::UnrestrictedConstant;
    let mut trace = Vec::new();
    let mut max = Vec::new();
    for m in 1..=4 {
        let cv = johansen_critical_values(m, case3).map_err(|e| e.to_string())?;
        trace.push(cv.trace.five);
        max.push(cv.max_eigen.five);
    }
    if trace == TRACE_CV && max == MAX_CV {
        Ok(format!("trace {trace:?}, max {max:?}"))
    } else {
        Err(format!("trace {trace:?}, max {max:?}"))
    }
}

fn rank_decision() -> Check {
    let rev = |a: [f64; 4]| -> Vec<f64> { a.iter().rev().copied().collect() };
    let trace = select_rank(&TRACE, &rev(TRACE_CV));
    let max = select_rank(&MAX_EIGEN, &rev(MAX_CV));
    let line = format!("trace rank {trace}, max-eigen rank {max}");
    if (trace, max) == (1, 1) {
        Ok(line)
    } else {
        Err(line)
    }
}

fn summary_identities() -> Check {
    let stats: Vec<SummaryStats> = R2.iter().map(|&r2| SummaryStats::from_r2(r2, 16, 6)).collect();
    let adj: Vec<f64> = stats.iter().map(|s| s.adj_r2).collect();
    let f: Vec<f64> = stats.iter().map(|s| s.f_stat).collect();
    within("adj R2 and F", max_abs_diff(&adj, &ADJ_R2).max(max_abs_diff(&f, &F_STAT)), 5e-4)
}

fn adf_calibration() -> Check {
    let started = Instant::now();
    let test = McTest::Adf {
        spec: AdfSpec::fixed(Deterministics::Constant, 0),
    };
    let config = McConfig {
        seed: 1,
        replications: 10_000,
        sample_length: 100,
    };
    let report = rejection_rate(&test, &Dgp::random_walk(1), &config, 0.05).map_err(|e| e.to_string())?;
    let size = report.rejection_rate.unwrap_or(f64::NAN);
    let constant = adf_asymptotic_critical_values(Deterministics::Constant).five;
    let trend = adf_asymptotic_critical_values(Deterministics::ConstantTrend).five;
    let elapsed = started.elapsed();
    let line = format!(
        "size {size:.4} ({} failures); asymptotic 5% cv {constant:.5} / {trend:.5}; {elapsed:.1?}",
        report.failures
    );
    let ok = (0.04..=0.06).contains(&size)
        && (constant - ADF_CV_CONSTANT).abs() <= 0.01
        && (trend - ADF_CV_TREND).abs() <= 0.01
        && elapsed < Duration::from_secs(120);
    if ok {
        Ok(line)
    } else {
        Err(line)
    }
}

fn johansen_calibration() -> Check {
    let started = Instant::now();
    let config = McConfig {
        seed: 5,
        replications: 20_000,
        sample_length: 1000,
    };
    let report = simulate_quantiles(NullStatistic::Trace(DetCase::UnrestrictedConstant), 1, 1000, &config)
        .map_err(|e| e.to_string())?;
    let q95 = report.critical_value(0.95).unwrap_or(f64::NAN);
    let elapsed = started.elapsed();
    let line = format!("95% quantile {q95:.4} vs 3.841465, 20000 reps; {elapsed:.1?}");
    if (q95 - 3.841465).abs() <= 0.15 && elapsed < Duration::from_secs(300) {
        Ok(line)
    } else {
        Err(line)
    }
}

fn fixture_logs() -> Result<Dataset, String> {
    let raw = read_csv(&fixtures().join("synthetic_bgd.csv"), &CsvLayout::wide()).map_err(|e| e.to_string())?;
    raw.map_series(|s| s.log_transform()).map_err(|e| e.to_string())
}

fn oracle_fixture() -> Check {
    let d = fixture_logs()?;
    let spec = AdfSpec {
        deterministic: Deterministics::ConstantTrend,
        lags: LagSelection::Auto {
            max_lag: 1,
            criterion: InfoCriterion::Aic,
        },
        significance: 0.05,
    };
    let mut level = Vec::new();
    let mut diff = Vec::new();
    for s in d.series() {
        let io = classify_integration(s, &spec).map_err(|e| e.to_string())?;
        level.push(io.level_result.t_stat);
        diff.push(io.diff_result.t_stat);
    }
    let jo = johansen_test(&d, &JohansenSpec::default()).map_err(|e| e.to_string())?;
    let beta = normalize_beta(&jo.beta.columns(0..1)).map_err(|e| e.to_string())?;
    let vecm_spec = VecmSpec {
        rank: 1,
        diff_lags: 1,
        det_case: DetCase::UnrestrictedConstant,
    };
    let fit = estimate_vecm(&d, &vecm_spec, &beta).map_err(|e| e.to_string())?;
    let mut coef_diff: f64 = 0.0;
    for (j, eq) in fit.equations.iter().enumerate() {
        for (k, c) in eq.coefficients().enumerate() {
            coef_diff = coef_diff
                .max((c.estimate - ORACLE_VECM_COEF[j][k]).abs())
                .max((c.std_error - ORACLE_VECM_SE[j][k]).abs());
        }
    }
    let worst = [
        max_abs_diff(&level, &ORACLE_ADF_LEVEL_T),
        max_abs_diff(&diff, &ORACLE_ADF_DIFF_T),
        max_abs_diff(&jo.eigenvalues, &ORACLE_EIGENVALUES),
        max_abs_diff(&jo.trace_stats, &ORACLE_TRACE),
        max_abs_diff(&jo.max_eigen_stats, &ORACLE_MAX),
        coef_diff,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    within("ADF t, eigenvalues, statistics, VECM coefficients and SEs", worst, 1e-6)
}

fn end_to_end() -> Check {
    let config = fixtures().join("pipeline.json");
    let mut dirs = Vec::new();
    let mut slowest = Duration::ZERO;
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let started = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_vecmkit"))
            .args(["pipeline", "--config"])
            .arg(&config)
            .arg("--output-dir")
            .arg(dir.path())
            .args(["--offline", "--quiet"])
            .output()
            .map_err(|e| e.to_string())?;
        slowest = slowest.max(started.elapsed());
        if out.status.code() != Some(0) {
            return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr).trim()));
        }
        dirs.push(dir);
    }
    for name in vecmkit::OUTPUT_FILES {
        let a = std::fs::read(dirs[0].path().join(name)).map_err(|e| format!("{name}: {e}"))?;
        let b = std::fs::read(dirs[1].path().join(name)).map_err(|e| format!("{name}: {e}"))?;
        if a != b {
            return Err(format!("{name} differs between runs"));
        }
    }
    let line = format!("{} files, exit 0, identical across 2 runs; slowest {slowest:.2?}", vecmkit::OUTPUT_FILES.len());
    if slowest < Duration::from_secs(5) {
        Ok(line)
    } else {
        Err(line)
    }
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("statistics from printed eigenvalues", statistics_from_eigenvalues),
        ("trace recursion identity", trace_recursion),
        ("case 3 critical values", critical_value_tables),
        ("rank decision", rank_decision),
        ("regression summary identities", summary_identities),
        ("ADF calibration", adf_calibration),
        ("Johansen calibration", johansen_calibration),
        ("oracle fixture equivalence", oracle_fixture),
        ("end-to-end pipeline", end_to_end),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "criterion 10 SKIP  qualitative reproduction on fetched 2004-2021 Bangladesh data: not run in CI, see README"
    );
    if failed > 0 {
        println!("failed criteria: {failed}");
        std::process::exit(1);
    }
}
