//! BDF2 central finite-difference scheme in the variable `V = U^{alpha/2}`.
//!
//! For `k >= 1` the unknown `V^{k+1}` solves
//!
//! ```text
//! (V^{k+1})^{2/alpha-1} (3/2 V^{k+1} - 2 V^k + 1/2 V^{k-1})
//!     + tau d2( (V^{k+1})^{2/alpha} d2 log V^{k+1} ) = 0
//! ```
//!
//! componentwise, where `d2` is the second-order central difference. The
//! first step replaces the BDF2 bracket by `V^1 - V^0` (implicit Euler).
//! Working in `V` keeps `U = V^{2/alpha}` nonnegative by construction. Mass is
//! not conserved exactly because the time term is nonlinear in `V`.

use log::warn;

use crate::bdf::{bdf_coefficients, SchemeState};
use crate::error::{Error, Result};
use crate::grid::{stencil, GridFunction, PeriodicGrid1D};
use crate::newton::{newton_solve, positivity_guard, JacobianStructure, NewtonConfig, NewtonReport};

/// Residual `i` couples unknowns `i-2..=i+2`.
pub const STENCIL_HALF_WIDTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bdf2FdConfig {
    pub alpha: f64,
    pub tau: f64,
    pub grid: PeriodicGrid1D,
}

impl Bdf2FdConfig {
    pub fn new(grid: PeriodicGrid1D, alpha: f64, tau: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 2), got {alpha}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::invalid(format!("time step must be positive, got {tau}")));
        }
        if !(1.0..4.0 / 3.0).contains(&alpha) {
            warn!("alpha = {alpha} is outside [1, 4/3); entropy stability is not guaranteed");
        }
        Ok(Self { alpha, tau, grid })
    }

    /// `2/alpha - 1`, the exponent of the time-term multiplier.
    pub fn time_exponent(&self) -> f64 {
        2.0 / self.alpha - 1.0
    }

    /// `U = V^{2/alpha}`
    pub fn density(&self, v: &GridFunction) -> GridFunction {
        let p = 2.0 / self.alpha;
        v.map(|x| x.powf(p))
    }

    /// `V = U^{alpha/2}`
    pub fn unknown_from_density(&self, u: &GridFunction) -> GridFunction {
        let p = 0.5 * self.alpha;
        u.map(|x| x.powf(p))
    }
}

fn check_positive(v: &[f64]) -> Result<()> {
    match v.iter().position(|&x| !(x > 0.0)) {
        Some(node) => Err(Error::Positivity {
            node,
            value: v[node],
        }),
        None => Ok(()),
    }
}

fn spatial_slice(v: &[f64], alpha: f64, h: f64) -> Result<Vec<f64>> {
    check_positive(v)?;
    let log_v: Vec<f64> = v.iter().map(|x| x.ln()).collect();
    let curvature = stencil::central2(&log_v, h);
    let p = 2.0 / alpha;
    let w: Vec<f64> = v.iter().zip(&curvature).map(|(x, c)| x.powf(p) * c).collect();
    Ok(stencil::central2(&w, h))
}

/// `i -> d2( V^{2/alpha} d2 log V )_i`, a five-node periodic stencil.
pub fn spatial_operator(grid: &PeriodicGrid1D, v: &GridFunction, alpha: f64) -> Result<GridFunction> {
    Ok(GridFunction::from_vec(spatial_slice(v.values(), alpha, grid.h())?))
}

/// `V^{2/alpha-1} * bracket + tau * spatial`, where `bracket` is the
/// undivided BDF combination.
fn assemble(cfg: &Bdf2FdConfig, vnew: &[f64], bracket: &[f64]) -> Result<Vec<f64>> {
    let spatial = spatial_slice(vnew, cfg.alpha, cfg.grid.h())?;
    let p = cfg.time_exponent();
    Ok(vnew
        .iter()
        .zip(bracket)
        .zip(&spatial)
        .map(|((v, b), s)| v.powf(p) * b + cfg.tau * s)
        .collect())
}

fn euler_slice(cfg: &Bdf2FdConfig, v1: &[f64], v0: &[f64]) -> Result<Vec<f64>> {
    let bracket = bdf_coefficients(1)?.combine_slices(v1, &[v0]);
    assemble(cfg, v1, &bracket)
}

fn bdf2_slice(cfg: &Bdf2FdConfig, vnew: &[f64], vk: &[f64], vkm1: &[f64]) -> Result<Vec<f64>> {
    let bracket = bdf_coefficients(2)?.combine_slices(vnew, &[vk, vkm1]);
    assemble(cfg, vnew, &bracket)
}

/// Residual of the implicit-Euler start step; zero iff `v1` solves it.
pub fn residual_euler_init(cfg: &Bdf2FdConfig, v1: &GridFunction, v0: &GridFunction) -> Result<GridFunction> {
    Ok(GridFunction::from_vec(euler_slice(cfg, v1.values(), v0.values())?))
}

/// Residual of a BDF2 step; zero iff `vnew` solves it.
pub fn residual_bdf2(
    cfg: &Bdf2FdConfig,
    vnew: &GridFunction,
    vk: &GridFunction,
    vkm1: &GridFunction,
) -> Result<GridFunction> {
    Ok(GridFunction::from_vec(bdf2_slice(
        cfg,
        vnew.values(),
        vk.values(),
        vkm1.values(),
    )?))
}

/// Advances the unknown `V` by one step: implicit Euler from step 0, BDF2
/// afterwards. The Newton iteration starts from the current level.
pub fn step_bdf2_fd(
    cfg: &Bdf2FdConfig,
    state: &SchemeState,
    newton: &NewtonConfig,
) -> Result<(SchemeState, NewtonReport)> {
    let hist = state.history();
    let vk = hist.newest().values().to_vec();
    check_positive(&vk)?;
    let guard = positivity_guard(newton.positivity_floor);
    let structure = JacobianStructure::PeriodicBanded {
        half_width: STENCIL_HALF_WIDTH,
    };
    let (v, report) = if state.step() == 0 {
        newton_solve(|x: &[f64]| euler_slice(cfg, x, &vk), vk.clone(), newton, structure, guard)?
    } else {
        let vkm1 = hist
            .get(1)
            .ok_or_else(|| Error::invalid("BDF2 step needs two previous levels"))?
            .values()
            .to_vec();
        newton_solve(
            |x: &[f64]| bdf2_slice(cfg, x, &vk, &vkm1),
            vk.clone(),
            newton,
            structure,
            guard,
        )?
    };
    Ok((state.advanced(GridFunction::from_vec(v)), report))
}
