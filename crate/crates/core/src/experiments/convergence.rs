use std::thread;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, InitialProfile, PeriodicGrid1D};
use crate::newton::NewtonConfig;

use super::analysis::regression_slope;
use super::simulation::{integrate, Stepper};
use super::{exact_step_count, Scheme};

/// Temporal convergence study: every member run and the reference run start
/// from the same datum and are compared at `t_cmp`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudyConfig {
    pub scheme: Scheme,
    pub alpha: Option<f64>,
    pub n_cells: usize,
    pub t_cmp: f64,
    pub tau_list: Vec<f64>,
    /// Step of the reference solution, at least ten times smaller than every
    /// member step.
    pub tau_ref: f64,
    pub initial: InitialProfile,
    pub normalize: bool,
    pub newton: NewtonConfig,
    /// Run the members on separate threads.
    pub parallel: bool,
}

impl ConvergenceStudyConfig {
    /// Default study: `cos16` datum, `t_cmp = 5e-5`,
    /// `tau = 5e-6, 2.5e-6, 1.25e-6, 6.25e-7` and `tau_ref = 1e-8`.
    pub fn new(scheme: Scheme, n_cells: usize) -> Self {
        Self {
            scheme,
            alpha: scheme.takes_alpha().then_some(1.0),
            n_cells,
            t_cmp: 5e-5,
            tau_list: vec![5e-6, 2.5e-6, 1.25e-6, 6.25e-7],
            tau_ref: 1e-8,
            initial: InitialProfile::Cos16,
            normalize: false,
            newton: NewtonConfig::default(),
            parallel: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        PeriodicGrid1D::new(self.n_cells)?;
        if self.scheme.takes_alpha() != self.alpha.is_some() {
            return Err(Error::invalid(format!(
                "alpha must be given for bdf2-fd and only for it (scheme {})",
                self.scheme
            )));
        }
        if !(self.t_cmp > 0.0 && self.t_cmp.is_finite()) {
            return Err(Error::invalid(format!("comparison time must be positive, got {}", self.t_cmp)));
        }
        if self.tau_list.len() < 2 {
            return Err(Error::invalid("a convergence study needs at least two time steps"));
        }
        for &tau in self.tau_list.iter().chain([&self.tau_ref]) {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(Error::invalid(format!("time steps must be positive, got {tau}")));
            }
            if exact_step_count(self.t_cmp, tau).is_none() {
                return Err(Error::invalid(format!(
                    "time step {tau:e} does not divide t_cmp = {:e}",
                    self.t_cmp
                )));
            }
        }
        let smallest = self.tau_list.iter().copied().fold(f64::INFINITY, f64::min);
        if !(self.tau_ref < smallest / 10.0) {
            return Err(Error::invalid(format!(
                "reference step {:e} must be below a tenth of the smallest step {smallest:e}",
                self.tau_ref
            )));
        }
        let mut sorted = self.tau_list.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("time steps must be distinct"));
        }
        Ok(())
    }
}

/// Errors at `t_cmp`, largest step first, and the fitted rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub scheme: Scheme,
    /// `(tau, l2 error)`
    pub rows: Vec<(f64, f64)>,
    pub rate: f64,
}

/// Slope of `log error` against `log tau`.
pub fn convergence_rate(rows: &[(f64, f64)]) -> Result<f64> {
    if let Some(&(tau, e)) = rows.iter().find(|(t, e)| !(*t > 0.0 && *e > 0.0)) {
        return Err(Error::invalid(format!(
            "cannot take logarithms of tau = {tau:e}, error = {e:e}"
        )));
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|(t, e)| (t.ln(), e.ln())).collect();
    regression_slope(&pts)
}

/// The variable compared between runs: `V` for the finite-difference scheme,
/// `U` for the DVD schemes.
fn comparison_field(scheme: Scheme, stepper: &Stepper) -> GridFunction {
    match scheme {
        Scheme::Bdf2Fd => stepper.unknown().clone(),
        _ => stepper.density(),
    }
}

fn solve_at(cfg: &ConvergenceStudyConfig, grid: PeriodicGrid1D, u0: &GridFunction, tau: f64) -> Result<GridFunction> {
    let n = exact_step_count(cfg.t_cmp, tau).expect("validated step");
    log::info!("{} study: tau = {tau:e}, {n} steps", cfg.scheme);
    let stepper = integrate(cfg.scheme, cfg.alpha, grid, tau, n, u0, &cfg.newton).map_err(|e| Error::Study {
        tau,
        source: Box::new(e),
    })?;
    Ok(comparison_field(cfg.scheme, &stepper))
}

/// Runs the reference solution and every member, and fits the rate.
pub fn convergence_study(cfg: &ConvergenceStudyConfig) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let grid = PeriodicGrid1D::new(cfg.n_cells)?;
    let u0 = grid.project_initial_datum(&cfg.initial, cfg.normalize)?;

    let mut taus = cfg.tau_list.clone();
    taus.sort_by(|a, b| b.total_cmp(a));
    let all: Vec<f64> = std::iter::once(cfg.tau_ref).chain(taus.iter().copied()).collect();

    let solutions: Vec<Result<GridFunction>> = if cfg.parallel {
        thread::scope(|s| {
            let handles: Vec<_> = all
                .iter()
                .map(|&tau| {
                    let u0 = &u0;
                    s.spawn(move || solve_at(cfg, grid, u0, tau))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("study member panicked"))
                .collect()
        })
    } else {
        all.iter().map(|&tau| solve_at(cfg, grid, &u0, tau)).collect()
    };
    let mut solutions = solutions.into_iter();
    let reference = solutions.next().expect("reference run")?;

    let rows = taus
        .iter()
        .zip(solutions)
        .map(|(&tau, sol)| {
            let sol = sol?;
            Ok((tau, grid.l2_norm(&reference.zip_map(&sol, |a, b| a - b))))
        })
        .collect::<Result<Vec<_>>>()?;
    let rate = convergence_rate(&rows)?;
    Ok(ConvergenceTable {
        scheme: cfg.scheme,
        rows,
        rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manufactured_power_law() {
        let rows: Vec<(f64, f64)> = [4e-6, 2e-6, 1e-6, 5e-7].iter().map(|&t| (t, t * t)).collect();
        assert!((convergence_rate(&rows).unwrap() - 2.0).abs() < 1e-12);
        assert!(convergence_rate(&[(1e-6, 0.0), (2e-6, 1.0)]).is_err());
    }

    #[test]
    fn validation() {
        let ok = ConvergenceStudyConfig::new(Scheme::Dvd, 16);
        assert!(ok.validate().is_ok());

        let mut c = ok.clone();
        c.tau_list = vec![4e-6, 2e-6, 1e-6, 5e-7];
        assert!(c.validate().is_err(), "4e-6 does not divide 5e-5");

        let mut c = ok.clone();
        c.tau_ref = 1e-7;
        assert!(c.validate().is_err());

        let mut c = ok.clone();
        c.alpha = Some(1.0);
        assert!(c.validate().is_err());

        let mut c = ok.clone();
        c.tau_list = vec![5e-6];
        assert!(c.validate().is_err());

        let mut c = ok;
        c.tau_list = vec![5e-6, 5e-6];
        assert!(c.validate().is_err());
    }

    fn small_study(scheme: Scheme) -> ConvergenceStudyConfig {
        let mut c = ConvergenceStudyConfig::new(scheme, 16);
        c.t_cmp = 4e-5;
        c.tau_list = vec![4e-6, 2e-6, 1e-6];
        c.tau_ref = 5e-8;
        c
    }

    #[test]
    fn bdf2_fd_is_second_order_on_a_coarse_grid() {
        let t = convergence_study(&small_study(Scheme::Bdf2Fd)).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert!(t.rows.windows(2).all(|w| w[0].0 > w[1].0 && w[0].1 > w[1].1));
        assert!((t.rate - 2.0).abs() < 0.3, "rate {}", t.rate);
    }

    #[test]
    fn result_is_independent_of_order_and_threads() {
        let a = small_study(Scheme::Dvd);
        let mut b = a.clone();
        b.tau_list.reverse();
        b.parallel = false;
        assert_eq!(convergence_study(&a).unwrap(), convergence_study(&b).unwrap());
    }
}
