//! The bundled four-variable fixture against values computed once by an
//! independent numpy/scipy implementation (`scripts/oracle.py emit 1444`).

use std::path::PathBuf;

use vecmkit_core::cointegration::{johansen_test, JohansenSpec};
use vecmkit_core::linalg::Matrix;
use vecmkit_core::series::{Dataset, Deterministics, Series};
use vecmkit_core::unitroot::{classify_integration, AdfSpec, InfoCriterion, LagSelection, Order};
use vecmkit_core::vecm::{estimate_vecm, long_run_ols, normalize_beta, VecmSpec};

const ADF_AUTO_LEVEL_T: [f64; 4] = [-1.8021750835767343, -2.596653419930511, -2.175512340459665, -0.9440368933597368];
const ADF_AUTO_DIFF_T: [f64; 4] = [-4.247730673008589, -5.265523803981666, -4.578127927713412, -3.8876287164647163];
const ADF_LAG1_LEVEL_T: [f64; 4] = [-1.7099456514836693, -1.8963496940169111, -1.7422816248306399, -0.8310028523806243];
const ADF_LAG1_DIFF_T: [f64; 4] = [-2.4124206327490962, -2.222889058187795, -3.0869897427619226, -2.092522384375181];
const EIGENVALUES: [f64; 4] = [0.9740090123284142, 0.47785505663547867, 0.18160957023483384, 0.06890669443774369];
const TRACE: [f64; 4] = [73.1460325376919, 14.745945672636486, 4.348984706847907, 1.142332574873132];
const MAX_EIGEN: [f64; 4] = [58.4000868650554, 10.39696096578858, 3.206652131974775, 1.142332574873132];
const BETA: [f64; 4] = [1.0, -0.4360338860064064, -0.13769568408349273, -1.3689132737906184];
const VECM_COEF: [[f64; 6]; 4] = [
    [-4.770886056383413, 2.1836473678487494, -0.9775627584481539, -0.3827497560246027, -1.446384625645166, 49.23629423328382],
    [-1.8286459545580225, 0.5946013224574855, -0.5080851546534092, -0.15694997553387607, 0.5633669728417733, 18.959477296664588],
    [-3.4868846729742993, 4.45146225900406, -1.229259407690199, -0.9511087342594877, 0.9100661828698433, 35.81958160483068],
    [-0.8798749911483938, 0.48518564528249897, -0.2101408162222837, -0.0695507501164931, -0.6722543483364313, 9.081360149502789],
];
const VECM_SE: [[f64; 6]; 4] = [
    [1.869214108597456, 1.088777584677618, 0.5538004465822602, 0.14216328666836509, 1.6341667181339214, 19.27453699490742],
    [2.7028825563282277, 1.5743717789260854, 0.8007951362389001, 0.20556803306740043, 2.3630041610859345, 27.870969722098145],
    [5.651906000746629, 3.2921154061560056, 1.6745155372291842, 0.4298563387207088, 4.94119782103067, 58.28003908277285],
    [0.7516880439721497, 0.4378423473173619, 0.22270598778792502, 0.05716971768449703, 0.6571657993744648, 7.751085841654618],
];
const VECM_R2: [f64; 4] = [0.5920711311861693, 0.2980510282307922, 0.6463778999067944, 0.1520999449386483];
const VECM_ADJ_R2: [f64; 4] = [0.3881066967792539, -0.05292345765381179, 0.4695668498601916, -0.2718500825920276];
const VECM_F: [f64; 4] = [2.9028155467779695, 0.8492099574690674, 3.6557551110998205, 0.35876856955185077];
const LONG_RUN_COEF: [f64; 4] = [10.448417560160067, 0.43811328359019897, 0.13624571855269013, 1.3338383267732783];
const LONG_RUN_SE: [f64; 4] = [0.381131372226244, 0.01954735448260804, 0.019246918468516883, 0.16212108972282954];

fn fixture_logs() -> Dataset {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../cli/fixtures/synthetic_bgd.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let names: Vec<&str> = lines.next().unwrap().split(',').skip(1).collect();
    let mut start = None;
    let mut columns = vec![Vec::new(); names.len()];
    for line in lines {
        let mut cells = line.split(',');
        let year: i32 = cells.next().unwrap().parse().unwrap();
        start.get_or_insert(year);
        for (col, cell) in columns.iter_mut().zip(cells) {
            col.push(cell.parse::<f64>().unwrap());
        }
    }
    let series = names
        .iter()
        .zip(columns)
        .map(|(n, v)| Series::new(*n, start.unwrap(), v).unwrap().log_transform().unwrap())
        .collect();
    Dataset::new(series).unwrap()
}

fn close(got: f64, want: f64, tol: f64, what: &str) {
    assert!(
        (got - want).abs() <= tol * want.abs().max(1.0),
        "{what}: got {got}, oracle {want}"
    );
}

#[test]
fn adf_automatic_lags_match_oracle() {
    let d = fixture_logs();
    let spec = AdfSpec {
        deterministic: Deterministics::ConstantTrend,
        lags: LagSelection::Auto {
            max_lag: 1,
            criterion: InfoCriterion::Aic,
        },
        significance: 0.05,
    };
    for (j, s) in d.series().iter().enumerate() {
        let io = classify_integration(s, &spec).unwrap();
        close(io.level_result.t_stat, ADF_AUTO_LEVEL_T[j], 1e-8, "level t");
        close(io.diff_result.t_stat, ADF_AUTO_DIFF_T[j], 1e-8, "diff t");
        assert_eq!(io.level_result.lags_used, 0);
        assert_eq!(io.diff_result.lags_used, 0);
        assert_eq!(io.order, Order::One, "{}", s.name());
    }
}

#[test]
fn adf_fixed_lag_matches_oracle() {
    let d = fixture_logs();
    let spec = AdfSpec::fixed(Deterministics::ConstantTrend, 1);
    for (j, s) in d.series().iter().enumerate() {
        let io = classify_integration(s, &spec).unwrap();
        close(io.level_result.t_stat, ADF_LAG1_LEVEL_T[j], 1e-8, "level t");
        close(io.diff_result.t_stat, ADF_LAG1_DIFF_T[j], 1e-8, "diff t");
    }
}

#[test]
fn johansen_matches_oracle() {
    let d = fixture_logs();
    let r = johansen_test(&d, &JohansenSpec::default()).unwrap();
    assert_eq!(r.t_eff, 16);
    for i in 0..4 {
        close(r.eigenvalues[i], EIGENVALUES[i], 1e-6, "eigenvalue");
        close(r.trace_stats[i], TRACE[i], 1e-6, "trace");
        close(r.max_eigen_stats[i], MAX_EIGEN[i], 1e-6, "max-eigen");
    }
    assert_eq!(r.rank_trace, 1);
    assert_eq!(r.rank_max, 1);
    let beta = normalize_beta(&r.beta.columns(0..1)).unwrap();
    for i in 0..4 {
        close(beta[(i, 0)], BETA[i], 1e-6, "beta");
    }
}

#[test]
fn vecm_matches_oracle() {
    let d = fixture_logs();
    let r = johansen_test(&d, &JohansenSpec::default()).unwrap();
    let beta = normalize_beta(&r.beta.columns(0..1)).unwrap();
    let spec = VecmSpec {
        rank: 1,
        diff_lags: 1,
        det_case: Default::default(),
    };
    let fit = estimate_vecm(&d, &spec, &beta).unwrap();
    for (j, eq) in fit.equations.iter().enumerate() {
        for (k, c) in eq.coefficients().enumerate() {
            close(c.estimate, VECM_COEF[j][k], 1e-6, &format!("{} {}", eq.dependent, c.label));
            close(c.std_error, VECM_SE[j][k], 1e-6, &format!("{} SE {}", eq.dependent, c.label));
        }
        close(eq.r2, VECM_R2[j], 1e-6, "r2");
        close(eq.adj_r2, VECM_ADJ_R2[j], 1e-6, "adj r2");
        close(eq.f_stat, VECM_F[j], 1e-6, "F");
    }
}

#[test]
fn vecm_with_oracle_beta_is_tight() {
    let d = fixture_logs();
    let beta = Matrix::column_vector(&BETA);
    let spec = VecmSpec {
        rank: 1,
        diff_lags: 1,
        det_case: Default::default(),
    };
    let fit = estimate_vecm(&d, &spec, &beta).unwrap();
    for (j, eq) in fit.equations.iter().enumerate() {
        for (k, c) in eq.coefficients().enumerate() {
            close(c.estimate, VECM_COEF[j][k], 1e-8, "coefficient");
            close(c.std_error, VECM_SE[j][k], 1e-8, "standard error");
        }
    }
}

#[test]
fn long_run_matches_oracle() {
    let fit = long_run_ols(&fixture_logs()).unwrap();
    for i in 0..4 {
        close(fit.coefficients[i], LONG_RUN_COEF[i], 1e-8, "long-run coefficient");
        close(fit.standard_errors[i], LONG_RUN_SE[i], 1e-8, "long-run SE");
    }
}
