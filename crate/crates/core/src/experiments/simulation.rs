use crate::bdf::SchemeState;
use crate::dvd::{step_dvd, DvdConfig, DvdStepInfo};
use crate::error::{Error, Result};
use crate::fd_scheme::{step_bdf2_fd, Bdf2FdConfig};
use crate::functionals::{
    entropy, entropy_one, fisher_discrete, modified_entropy_g, relative_entropy_alpha,
};
use crate::grid::{GridFunction, InitialProfile, PeriodicGrid1D};
use crate::newton::{NewtonConfig, NewtonReport};

use super::Scheme;

/// Parameters of a single run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub scheme: Scheme,
    /// Entropy exponent of the finite-difference scheme; must be `None` for
    /// the DVD schemes.
    pub alpha: Option<f64>,
    pub n_cells: usize,
    pub tau: f64,
    pub t_end: f64,
    pub initial: InitialProfile,
    /// Rescale the initial datum to unit mass.
    pub normalize: bool,
    /// Record every `record_every`-th step (the final step is always recorded).
    pub record_every: usize,
    /// Exponents of the entropies `E_alpha` and relative entropies reported
    /// in each record.
    pub entropy_alphas: Vec<f64>,
    pub newton: NewtonConfig,
}

impl SimulationConfig {
    /// A run from the `cos16` datum, recording every step and reporting
    /// `E_{1.2}`. The finite-difference scheme defaults to `alpha = 1`.
    pub fn new(scheme: Scheme, n_cells: usize, tau: f64, t_end: f64) -> Self {
        Self {
            scheme,
            alpha: scheme.takes_alpha().then_some(1.0),
            n_cells,
            tau,
            t_end,
            initial: InitialProfile::Cos16,
            normalize: false,
            record_every: 1,
            entropy_alphas: vec![1.2],
            newton: NewtonConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        PeriodicGrid1D::new(self.n_cells)?;
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::invalid(format!("time step must be positive, got {}", self.tau)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::invalid(format!("final time must be positive, got {}", self.t_end)));
        }
        if self.record_every == 0 {
            return Err(Error::invalid("record stride must be at least 1"));
        }
        match (self.scheme.takes_alpha(), self.alpha) {
            (true, None) => return Err(Error::invalid("the bdf2-fd scheme needs alpha")),
            (false, Some(_)) => {
                return Err(Error::invalid(format!(
                    "alpha applies to bdf2-fd only, not {}",
                    self.scheme
                )))
            }
            _ => {}
        }
        if let Some(&a) = self.entropy_alphas.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(Error::invalid(format!("entropy exponents must be positive, got {a}")));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<PeriodicGrid1D> {
        PeriodicGrid1D::new(self.n_cells)
    }

    /// Steps needed to reach `t_end`; the last step may overshoot by less
    /// than one `tau` when `t_end` is not a multiple of it.
    pub fn n_steps(&self) -> usize {
        super::exact_step_count(self.t_end, self.tau)
            .unwrap_or_else(|| (self.t_end / self.tau).ceil() as usize)
    }
}

/// Diagnostics at one recorded step.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesRecord {
    pub step: usize,
    pub t: f64,
    pub mass: f64,
    pub e1: f64,
    /// `(alpha, E_alpha, relative E_alpha)` for each requested exponent.
    pub entropies: Vec<(f64, f64, f64)>,
    /// Modified entropy `E^G_alpha` (finite-difference scheme, `alpha > 1`,
    /// from step 1 on).
    pub eg: Option<f64>,
    pub fd: f64,
    pub min_u: f64,
    pub r_corr: Option<f64>,
    pub newton_iters: usize,
    /// `|D F - sum vd D U h|` for the DVD schemes.
    pub chain_residual: Option<f64>,
    /// Discrete time derivative of `F_d` used by the DVD step.
    pub fisher_rate: Option<f64>,
    /// Residual of the order-one dissipation identity.
    pub dissipation_residual: Option<f64>,
}

impl TimeSeriesRecord {
    /// Value of a column by its CSV header name.
    pub fn column(&self, name: &str) -> Option<f64> {
        let fixed = match name {
            "step" => Some(self.step as f64),
            "t" => Some(self.t),
            "mass" => Some(self.mass),
            "E1" => Some(self.e1),
            "EG" => self.eg,
            "Fd" => Some(self.fd),
            "minU" => Some(self.min_u),
            "rcorr" => self.r_corr,
            "newton_iters" => Some(self.newton_iters as f64),
            "chain_residual" => self.chain_residual,
            "fisher_rate" => self.fisher_rate,
            "dissipation_residual" => self.dissipation_residual,
            _ => None,
        };
        if fixed.is_some() {
            return fixed;
        }
        let (rel, alpha) = if let Some(a) = name.strip_prefix("Erel_") {
            (true, a)
        } else {
            (false, name.strip_prefix("E_")?)
        };
        let alpha: f64 = alpha.parse().ok()?;
        self.entropies
            .iter()
            .find(|(a, _, _)| *a == alpha)
            .map(|&(_, e, r)| if rel { r } else { e })
    }
}

/// What one step reports besides the new state.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    pub newton: NewtonReport,
    pub dvd: Option<DvdStepInfo>,
}

#[derive(Debug, Clone)]
enum Integrator {
    Fd(Bdf2FdConfig),
    Dvd(DvdConfig),
}

/// A scheme together with its current state.
#[derive(Debug, Clone)]
pub struct Stepper {
    integrator: Integrator,
    state: SchemeState,
    newton: NewtonConfig,
}

impl Stepper {
    /// Starts `scheme` from the density `u0`.
    pub fn new(
        scheme: Scheme,
        alpha: Option<f64>,
        grid: PeriodicGrid1D,
        tau: f64,
        u0: &GridFunction,
        newton: NewtonConfig,
    ) -> Result<Self> {
        let (integrator, v0, capacity) = match scheme.dvd_order() {
            None => {
                let alpha = alpha.ok_or_else(|| Error::invalid("the bdf2-fd scheme needs alpha"))?;
                let cfg = Bdf2FdConfig::new(grid, alpha, tau)?;
                let v0 = cfg.unknown_from_density(u0);
                (Integrator::Fd(cfg), v0, 2)
            }
            Some(q) => {
                let cfg = DvdConfig::new(grid, q, tau)?;
                (Integrator::Dvd(cfg), u0.map(f64::sqrt), q)
            }
        };
        Ok(Self {
            integrator,
            state: SchemeState::new(v0, tau, capacity),
            newton,
        })
    }

    pub fn state(&self) -> &SchemeState {
        &self.state
    }

    pub fn step(&self) -> usize {
        self.state.step()
    }

    pub fn time(&self) -> f64 {
        self.state.time()
    }

    /// The scheme's unknown `V` at the current level.
    pub fn unknown(&self) -> &GridFunction {
        self.state.current()
    }

    fn to_density(&self, v: &GridFunction) -> GridFunction {
        match &self.integrator {
            Integrator::Fd(cfg) => cfg.density(v),
            Integrator::Dvd(_) => v.map(|x| x * x),
        }
    }

    /// `U` at the current level.
    pub fn density(&self) -> GridFunction {
        self.to_density(self.state.current())
    }

    /// `U` one level back, once the trajectory has one.
    pub fn previous_density(&self) -> Option<GridFunction> {
        self.state.history().get(1).map(|v| self.to_density(v))
    }

    pub fn advance(&mut self) -> Result<StepDiagnostics> {
        let (next, newton, dvd) = match &self.integrator {
            Integrator::Fd(cfg) => {
                let (next, rep) = step_bdf2_fd(cfg, &self.state, &self.newton)?;
                (next, rep, None)
            }
            Integrator::Dvd(cfg) => {
                let (next, rep, info) = step_dvd(cfg, &self.state, &self.newton)?;
                (next, rep, Some(info))
            }
        };
        self.state = next;
        Ok(StepDiagnostics { newton, dvd })
    }
}

/// Records of a run, plus the error that stopped it early, if any.
#[derive(Debug)]
pub struct SimulationRun {
    pub records: Vec<TimeSeriesRecord>,
    pub failure: Option<Error>,
}

impl SimulationRun {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn last(&self) -> Option<&TimeSeriesRecord> {
        self.records.last()
    }
}

fn initial_density(cfg: &SimulationConfig, grid: &PeriodicGrid1D) -> Result<GridFunction> {
    grid.project_initial_datum(&cfg.initial, cfg.normalize)
}

fn record(
    cfg: &SimulationConfig,
    grid: &PeriodicGrid1D,
    stepper: &Stepper,
    diag: Option<&StepDiagnostics>,
) -> Result<TimeSeriesRecord> {
    let u = stepper.density();
    let entropies = cfg
        .entropy_alphas
        .iter()
        .map(|&a| Ok((a, entropy(grid, &u, a)?, relative_entropy_alpha(grid, &u, a)?)))
        .collect::<Result<Vec<_>>>()?;
    let eg = match (cfg.scheme, cfg.alpha, stepper.previous_density()) {
        (Scheme::Bdf2Fd, Some(a), Some(prev)) if a > 1.0 => Some(modified_entropy_g(grid, &u, &prev, a)?),
        _ => None,
    };
    let info = diag.and_then(|d| d.dvd.as_ref());
    Ok(TimeSeriesRecord {
        step: stepper.step(),
        t: stepper.time(),
        mass: grid.quadrature_sum(&u),
        e1: entropy_one(grid, &u)?,
        entropies,
        eg,
        fd: fisher_discrete(grid, &u)?,
        min_u: u.min(),
        r_corr: info.and_then(|i| i.r_corr),
        newton_iters: diag.map_or(0, |d| d.newton.iterations),
        chain_residual: info.map(|i| i.chain_residual),
        fisher_rate: info.map(|i| i.fisher_rate),
        dissipation_residual: info.and_then(|i| i.dissipation_residual),
    })
}

/// Steps the configured scheme from the projected initial datum to `t_end`,
/// recording diagnostics at step 0 and every `record_every` steps.
///
/// Invalid configurations are rejected up front. A failure during the run
/// ends it early: the records up to the last accepted step are kept and the
/// error is returned alongside them.
pub fn run_simulation(cfg: &SimulationConfig) -> Result<SimulationRun> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let u0 = initial_density(cfg, &grid)?;
    let mut stepper = Stepper::new(cfg.scheme, cfg.alpha, grid, cfg.tau, &u0, cfg.newton.clone())?;
    let n_steps = cfg.n_steps();
    let mut records = vec![record(cfg, &grid, &stepper, None)?];
    for k in 1..=n_steps {
        let diag = match stepper.advance() {
            Ok(d) => d,
            Err(e) => {
                log::warn!("{} run stopped at step {k}: {e}", cfg.scheme);
                return Ok(SimulationRun {
                    records,
                    failure: Some(Error::Step {
                        step: k,
                        source: Box::new(e),
                    }),
                });
            }
        };
        if k % cfg.record_every == 0 || k == n_steps {
            let rec = record(cfg, &grid, &stepper, Some(&diag))?;
            log::debug!(
                "step {k}: Fd = {:e}, newton iterations = {}",
                rec.fd,
                rec.newton_iters
            );
            records.push(rec);
        }
    }
    Ok(SimulationRun {
        records,
        failure: None,
    })
}

/// Runs `n_steps` steps without recording and returns the final unknown `V`.
pub fn integrate(
    scheme: Scheme,
    alpha: Option<f64>,
    grid: PeriodicGrid1D,
    tau: f64,
    n_steps: usize,
    u0: &GridFunction,
    newton: &NewtonConfig,
) -> Result<Stepper> {
    let mut stepper = Stepper::new(scheme, alpha, grid, tau, u0, newton.clone())?;
    for k in 1..=n_steps {
        stepper.advance().map_err(|e| Error::Step {
            step: k,
            source: Box::new(e),
        })?;
    }
    Ok(stepper)
}
