//! Randomized algebraic checks of the discrete identities the schemes rely
//! on: the BDF2 G-stability inequalities, the entropy constant, the discrete
//! chain rules of the DVD schemes and the stencil operators.
//!
//! Every suite draws from a seeded ChaCha generator, so a seed reproduces a
//! run exactly on any platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bdf::History;
use crate::dvd::{dvd_vd_bdfq, dvd_vd_q1, DvdConfig};
use crate::functionals::{fisher_discrete, kappa_alpha, GStability};
use crate::grid::{stencil, GridFunction, PeriodicGrid1D};

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest relative defect seen.
    pub worst: f64,
    pub tolerance: f64,
}

impl SuiteResult {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            cases: 0,
            failures: 0,
            worst: 0.0,
            tolerance,
        }
    }

    fn observe(&mut self, defect: f64) {
        self.cases += 1;
        self.worst = self.worst.max(defect);
        if !(defect <= self.tolerance) {
            self.failures += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }

    /// One line: `PASS name: cases, worst defect / tolerance`.
    pub fn summary(&self) -> String {
        format!(
            "{} {}: {} cases, worst defect {:.3e} (tolerance {:.0e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.worst,
            self.tolerance
        )
    }
}

fn relative(defect: f64, scale: f64) -> f64 {
    defect.abs() / scale.abs().max(1.0)
}

/// For random `(a, b, c)` in `[-10, 10]^3`, both G-stability differences
/// `lhs - rhs` equal `(a - 2b + c)^2 / 2`.
pub fn gstability_suite(rng: &mut impl Rng, cases: usize) -> SuiteResult {
    let mut res = SuiteResult::new("G-stability inequalities", 1e-10);
    for _ in 0..cases {
        let (a, b, c) = (
            rng.random_range(-10.0..=10.0),
            rng.random_range(-10.0..=10.0),
            rng.random_range(-10.0..=10.0),
        );
        let s = GStability::evaluate(a, b, c);
        let oracle = 0.5 * (a - 2.0 * b + c) * (a - 2.0 * b + c);
        let d1 = s.lhs - s.rhs_first;
        let d2 = s.lhs - s.rhs_second;
        let defect = relative(d1 - oracle, s.lhs).max(relative(d2 - oracle, s.lhs));
        // the inequalities themselves, up to the same rounding allowance
        let ineq = (-d1).max(-d2).max(0.0) / s.lhs.abs().max(1.0);
        res.observe(defect.max(ineq));
    }
    res
}

/// `kappa_alpha(alpha, 1) alpha^2 = 1` on 20 exponents in `(0.05, 1.3)`, and
/// `kappa_alpha(1, 2) = 7/8`.
pub fn kappa_suite() -> SuiteResult {
    let mut res = SuiteResult::new("entropy constant", 1e-14);
    for j in 0..20 {
        let alpha = 0.05 + (1.3 - 0.05) * (j as f64 + 0.5) / 20.0;
        let defect = kappa_alpha(alpha, 1).map_or(f64::INFINITY, |k| (k * alpha * alpha - 1.0).abs());
        res.observe(defect);
    }
    res.observe(kappa_alpha(1.0, 2).map_or(f64::INFINITY, |k| (k - 0.875).abs()));
    res
}

fn random_positive(rng: &mut impl Rng, n: usize) -> GridFunction {
    GridFunction::new((0..n).map(|_| rng.random_range(0.1..2.0)).collect()).expect("finite")
}

/// Order-one chain rule `F[U_new] - F[U_old] = sum vd (U_new - U_old) h` on
/// random positive pairs.
pub fn chain_rule_q1_suite(rng: &mut impl Rng, cases: usize, n: usize) -> SuiteResult {
    let grid = PeriodicGrid1D::new(n).expect("grid");
    let mut res = SuiteResult::new("chain rule, order 1", 1e-11);
    for _ in 0..cases {
        let (unew, uold) = (random_positive(rng, n), random_positive(rng, n));
        let vd = dvd_vd_q1(&grid, &unew.map(f64::sqrt), &uold.map(f64::sqrt)).expect("positive");
        let du = unew.zip_map(&uold, |a, b| a - b);
        let rhs = stencil::inner(vd.values(), du.values(), grid.h());
        let lhs = fisher_discrete(&grid, &unew).unwrap() - fisher_discrete(&grid, &uold).unwrap();
        res.observe(relative(lhs - rhs, lhs.abs().max(rhs.abs())));
    }
    res
}

/// Order-`q` chain rule `D^q F = sum vd D^q U h` on random positive
/// histories, skipping draws whose correction denominator is degenerate.
pub fn chain_rule_bdfq_suite(rng: &mut impl Rng, q: usize, cases: usize, n: usize) -> SuiteResult {
    let grid = PeriodicGrid1D::new(n).expect("grid");
    let name = if q == 2 { "chain rule, order 2" } else { "chain rule, order 3" };
    let mut res = SuiteResult::new(name, 1e-10);
    let cfg = DvdConfig::new(grid, q, 1e-3).expect("order");
    while res.cases < cases {
        let hist = History::from_levels(q, (1..=q).map(|j| (-(j as f64), random_positive(rng, n))));
        let vnew = random_positive(rng, n).map(f64::sqrt);
        let vd = dvd_vd_bdfq(&cfg, &hist, &vnew).expect("positive history");
        if vd.degenerate {
            continue;
        }
        let rhs = stencil::inner(vd.field.values(), vd.density_rate.values(), grid.h());
        res.observe(relative(vd.fisher_rate - rhs, vd.fisher_rate.abs().max(rhs.abs())));
    }
    res
}

/// Field operators against their pointwise definitions, plus summation by
/// parts and the factorisation of the second difference.
pub fn stencil_suite(rng: &mut impl Rng, cases: usize) -> SuiteResult {
    let mut res = SuiteResult::new("stencil oracles", 1e-12);
    for _ in 0..cases {
        let n = rng.random_range(4..40);
        let grid = PeriodicGrid1D::new(n).unwrap();
        let h = grid.h();
        let u = GridFunction::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let w = GridFunction::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let at = |f: &GridFunction, i: isize| f.values()[i.rem_euclid(n as isize) as usize];
        let mut defect: f64 = 0.0;
        let (dp, dm, d1, d2) = (grid.d_plus(&u), grid.d_minus(&u), grid.d_central1(&u), grid.d_central2(&u));
        let scale = 1.0 / (h * h);
        for i in 0..n as isize {
            let k = i as usize;
            defect = defect
                .max(((at(&u, i + 1) - at(&u, i)) / h - dp[k]).abs() * h)
                .max(((at(&u, i) - at(&u, i - 1)) / h - dm[k]).abs() * h)
                .max(((at(&u, i + 1) - at(&u, i - 1)) / (2.0 * h) - d1[k]).abs() * h)
                .max(((at(&u, i + 1) - 2.0 * at(&u, i) + at(&u, i - 1)) / (h * h) - d2[k]).abs() / scale);
        }
        let pm = grid.d_plus(&grid.d_minus(&u));
        defect = defect.max(pm.zip_map(&d2, |a, b| (a - b).abs()).max() / scale);
        // sum u d+ w = - sum w d- u
        let sbp = stencil::inner(u.values(), grid.d_plus(&w).values(), h)
            + stencil::inner(w.values(), grid.d_minus(&u).values(), h);
        defect = defect.max(sbp.abs() * h);
        res.observe(defect);
    }
    res
}

/// All suites with the acceptance sizes, seeded by `seed`.
pub fn run_all(seed: u64) -> Vec<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        gstability_suite(&mut rng, 100_000),
        kappa_suite(),
        chain_rule_q1_suite(&mut rng, 100, 64),
        chain_rule_bdfq_suite(&mut rng, 2, 100, 64),
        chain_rule_bdfq_suite(&mut rng, 3, 100, 64),
        stencil_suite(&mut rng, 200),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for r in [
            gstability_suite(&mut rng, 2000),
            kappa_suite(),
            chain_rule_q1_suite(&mut rng, 10, 16),
            chain_rule_bdfq_suite(&mut rng, 2, 10, 16),
            chain_rule_bdfq_suite(&mut rng, 3, 10, 16),
            stencil_suite(&mut rng, 20),
        ] {
            assert!(r.passed(), "{}", r.summary());
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let a = gstability_suite(&mut ChaCha8Rng::seed_from_u64(3), 100);
        let b = gstability_suite(&mut ChaCha8Rng::seed_from_u64(3), 100);
        assert_eq!(a, b);
    }

    #[test]
    fn failures_are_counted() {
        let mut r = SuiteResult::new("t", 1e-3);
        r.observe(1e-4);
        r.observe(f64::NAN);
        assert_eq!((r.cases, r.failures), (2, 1));
        assert!(!r.passed());
        assert!(r.summary().starts_with("FAIL"));
    }
}
