//! Reproduction harness: a simulation driver that records diagnostics along a
//! trajectory, exponential-decay fits, temporal convergence studies and CSV
//! output.

mod analysis;
mod convergence;
mod output;
mod simulation;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use analysis::{decay_rate, log_linear_fit, regression_slope, DecayFit, DEFAULT_DECAY_WINDOW};
pub use convergence::{convergence_rate, convergence_study, ConvergenceStudyConfig, ConvergenceTable};
pub use output::{write_records_csv, write_table_csv, RECORD_FIXED_COLUMNS};
pub use simulation::{
    integrate, run_simulation, SimulationConfig, SimulationRun, Stepper, StepDiagnostics, TimeSeriesRecord,
};

/// Time integrator selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// BDF2 finite-difference scheme in `V = U^{alpha/2}`.
    Bdf2Fd,
    /// First-order discrete variational derivative scheme.
    Dvd,
    Bdf2Dvd,
    Bdf3Dvd,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Bdf2Fd, Scheme::Dvd, Scheme::Bdf2Dvd, Scheme::Bdf3Dvd];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Bdf2Fd => "bdf2-fd",
            Scheme::Dvd => "dvd",
            Scheme::Bdf2Dvd => "bdf2-dvd",
            Scheme::Bdf3Dvd => "bdf3-dvd",
        }
    }

    /// BDF order of a DVD scheme, `None` for the finite-difference scheme.
    pub fn dvd_order(self) -> Option<usize> {
        match self {
            Scheme::Bdf2Fd => None,
            Scheme::Dvd => Some(1),
            Scheme::Bdf2Dvd => Some(2),
            Scheme::Bdf3Dvd => Some(3),
        }
    }

    pub fn takes_alpha(self) -> bool {
        self == Scheme::Bdf2Fd
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sch| sch.name() == s)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown scheme '{s}' (expected one of bdf2-fd, dvd, bdf2-dvd, bdf3-dvd)"
                ))
            })
    }
}

/// Number of steps of size `tau` that land on `t` to round-off, if any.
pub(crate) fn exact_step_count(t: f64, tau: f64) -> Option<usize> {
    let ratio = t / tau;
    let n = ratio.round();
    if n >= 1.0 && (ratio - n).abs() <= 1e-9 * n {
        Some(n as usize)
    } else {
        None
    }
}
