//! Exit criteria. Each test prints one `PASS`/`FAIL` line to stderr
//! (bypassing the test harness capture) and then asserts it.

use std::io::Write;
use std::time::{Duration, Instant};

use dlss::experiments::{
    convergence_study, decay_rate, run_simulation, ConvergenceStudyConfig, Scheme, SimulationConfig,
    TimeSeriesRecord, DEFAULT_DECAY_WINDOW,
};
use dlss::selfcheck::{
    chain_rule_bdfq_suite, chain_rule_q1_suite, gstability_suite, kappa_suite, SuiteResult,
};
use dlss::InitialProfile;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn verdict(criterion: u32, pass: bool, detail: impl AsRef<str>) {
    let line = format!(
        "criterion {criterion:>2}: {} — {}\n",
        if pass { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {criterion} failed: {}", detail.as_ref());
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn suites_line(results: &[SuiteResult], elapsed: Duration, limit: Duration) -> (bool, String) {
    let pass = results.iter().all(SuiteResult::passed) && elapsed < limit;
    let detail = results
        .iter()
        .map(SuiteResult::summary)
        .chain([format!("runtime {:.3}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs())])
        .collect::<Vec<_>>()
        .join("; ");
    (pass, detail)
}

#[test]
fn criterion_01_gstability_property_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (r, dt) = timed(|| gstability_suite(&mut rng, 100_000));
    assert_eq!(r.cases, 100_000);
    let (pass, detail) = suites_line(&[r], dt, Duration::from_secs(1));
    verdict(1, pass, detail);
}

#[test]
fn criterion_02_kappa_oracle() {
    let r = kappa_suite();
    assert_eq!(r.cases, 21);
    let pass = r.passed() && r.tolerance == 1e-14;
    verdict(2, pass, r.summary());
}

#[test]
fn criterion_03_chain_rule_order_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (r, dt) = timed(|| chain_rule_q1_suite(&mut rng, 100, 64));
    assert_eq!(r.tolerance, 1e-11);
    let (pass, detail) = suites_line(&[r], dt, Duration::from_secs(1));
    verdict(3, pass, detail);
}

#[test]
fn criterion_04_chain_rule_orders_two_and_three() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (rs, dt) = timed(|| {
        vec![
            chain_rule_bdfq_suite(&mut rng, 2, 100, 64),
            chain_rule_bdfq_suite(&mut rng, 3, 100, 64),
        ]
    });
    assert!(rs.iter().all(|r| r.tolerance == 1e-10 && r.cases == 100));
    let (pass, detail) = suites_line(&rs, dt, Duration::from_secs(5));
    verdict(4, pass, detail);
}

/// `cos16`, `N = 200`, `tau = 1e-6`, `steps` steps, every step recorded.
fn paper_run(scheme: Scheme, alpha: Option<f64>, steps: usize, alphas: &[f64]) -> Vec<TimeSeriesRecord> {
    let mut cfg = SimulationConfig::new(scheme, 200, 1e-6, steps as f64 * 1e-6);
    cfg.alpha = alpha;
    cfg.initial = InitialProfile::Cos16;
    cfg.entropy_alphas = alphas.to_vec();
    let run = run_simulation(&cfg).expect("valid configuration");
    if let Some(e) = &run.failure {
        panic!("{scheme} run failed: {e}");
    }
    assert_eq!(run.records.len(), steps + 1);
    run.records
}

#[test]
fn criterion_05_dvd_dissipation_and_conservation() {
    let recs = paper_run(Scheme::Dvd, None, 1000, &[1.2]);
    let strictly_decreasing = recs.windows(2).all(|w| w[1].fd < w[0].fd);
    let worst_identity = recs[1..]
        .iter()
        .map(|r| r.dissipation_residual.unwrap() / r.fisher_rate.unwrap().abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let drift = (recs.last().unwrap().mass - recs[0].mass).abs();
    let pass = strictly_decreasing && worst_identity <= 1e-9 && drift <= 1e-9;
    verdict(
        5,
        pass,
        format!(
            "F_d strictly decreasing: {strictly_decreasing}; worst relative dissipation-identity residual {worst_identity:.3e} (≤ 1e-9); mass drift {drift:.3e} (≤ 1e-9)"
        ),
    );
}

#[test]
fn criterion_06_bdfq_dvd_dissipation() {
    let mut details = Vec::new();
    let mut pass = true;
    for (q, scheme) in [(2usize, Scheme::Bdf2Dvd), (3, Scheme::Bdf3Dvd)] {
        let recs = paper_run(scheme, None, 1000, &[1.2]);
        let bound = 1e-10 * (1.0 + recs[0].fd);
        let worst = recs
            .iter()
            .filter(|r| r.step >= q)
            .map(|r| r.fisher_rate.unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        pass &= worst <= bound;
        details.push(format!("{scheme}: max D^q F_d over k ≥ {q} = {worst:.3e} (bound {bound:.3e})"));
    }
    verdict(6, pass, details.join("; "));
}

fn study(scheme: Scheme, alpha: Option<f64>) -> ConvergenceStudyConfig {
    let mut cfg = ConvergenceStudyConfig::new(scheme, 100);
    cfg.alpha = alpha;
    cfg.t_cmp = 5e-5;
    cfg.tau_list = vec![5e-6, 2.5e-6, 1.25e-6, 6.25e-7];
    cfg.tau_ref = 1e-8;
    cfg
}

fn rate_of(cfg: &ConvergenceStudyConfig) -> Result<f64, String> {
    convergence_study(cfg).map(|t| t.rate).map_err(|e| e.to_string())
}

#[test]
fn criterion_07_dvd_temporal_convergence_rates() {
    let mut pass = true;
    let mut details = Vec::new();
    for (scheme, target) in [(Scheme::Dvd, 1.020), (Scheme::Bdf2Dvd, 1.824), (Scheme::Bdf3Dvd, 1.977)] {
        match rate_of(&study(scheme, None)) {
            Ok(rate) => {
                let ok = (rate - target).abs() <= 0.2;
                pass &= ok;
                details.push(format!("{scheme}: rate {rate:.3} (target {target} ± 0.2) {}", if ok { "ok" } else { "out of band" }));
            }
            Err(e) => {
                pass = false;
                details.push(format!("{scheme}: {e}"));
            }
        }
    }
    verdict(7, pass, details.join("; "));
}

#[test]
fn criterion_08_bdf2_fd_second_order() {
    let mut pass = true;
    let mut details = Vec::new();
    for alpha in [1.0, 1.1, 1.3] {
        match rate_of(&study(Scheme::Bdf2Fd, Some(alpha))) {
            Ok(rate) => {
                let ok = if alpha == 1.0 { (1.75..=2.25).contains(&rate) } else { rate >= 1.6 };
                pass &= ok;
                let band = if alpha == 1.0 { "[1.75, 2.25]" } else { "≥ 1.6" };
                details.push(format!("alpha {alpha}: rate {rate:.3} ({band})"));
            }
            Err(e) => {
                pass = false;
                details.push(format!("alpha {alpha}: {e}"));
            }
        }
    }
    verdict(8, pass, details.join("; "));
}

/// Largest relative increase between consecutive values.
fn worst_increase(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    v.windows(2)
        .map(|w| (w[1] - w[0]) / w[0].abs().max(f64::MIN_POSITIVE))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn criterion_09_bdf2_fd_entropy_stability() {
    let mut pass = true;
    let mut details = Vec::new();
    for alpha in [1.0, 1.1, 1.2, 1.3] {
        let recs = paper_run(Scheme::Bdf2Fd, Some(alpha), 500, &[alpha]);
        let worst = worst_increase(recs.iter().map(|r| r.column(&format!("E_{alpha}")).unwrap()));
        pass &= worst <= 1e-10;
        details.push(format!("alpha {alpha}: worst relative entropy increase {worst:.3e}"));
        if alpha == 1.2 {
            let g = worst_increase(recs.iter().filter_map(|r| r.eg));
            pass &= g <= 1e-10;
            details.push(format!("alpha 1.2: worst relative E^G increase {g:.3e}"));
        }
    }
    verdict(9, pass, format!("{} (tolerance 1e-10)", details.join("; ")));
}

#[test]
fn criterion_10_exponential_decay() {
    let mut pass = true;
    let mut details = Vec::new();
    for (scheme, alpha) in [(Scheme::Bdf2Fd, Some(1.2)), (Scheme::Dvd, None)] {
        let recs = paper_run(scheme, alpha, 1000, &[1.2]);
        for column in ["Erel_1.2", "Fd"] {
            match decay_rate(&recs, column, DEFAULT_DECAY_WINDOW) {
                Ok(fit) => {
                    pass &= fit.r_squared > 0.99;
                    details.push(format!(
                        "{scheme} {column}: slope {:.4e}, r² {:.6}",
                        fit.slope, fit.r_squared
                    ));
                }
                Err(e) => {
                    pass = false;
                    details.push(format!("{scheme} {column}: {e}"));
                }
            }
        }
    }
    verdict(10, pass, format!("{} (need r² > 0.99)", details.join("; ")));
}

#[test]
fn criterion_11_steady_state_exactness() {
    let mut pass = true;
    let mut details = Vec::new();
    for scheme in Scheme::ALL {
        let mut cfg = SimulationConfig::new(scheme, 200, 1e-6, 1e-4);
        cfg.initial = InitialProfile::Constant(1.0);
        if scheme == Scheme::Bdf2Fd {
            cfg.alpha = Some(1.2);
        }
        let run = run_simulation(&cfg).unwrap();
        let recs = &run.records;
        let ok = run.completed()
            && recs.len() == 101
            && recs.iter().all(|r| r.fd == 0.0 && r.mass == recs[0].mass && r.newton_iters == 0);
        pass &= ok;
        details.push(format!("{scheme}: {}", if ok { "fixed point" } else { "drifted" }));
    }
    verdict(11, pass, details.join("; "));
}
