//! Discrete variational derivative (DVD) schemes for the DLSS equation in
//! gradient-flow form `U_t = d1( U d1( dF/dU ) )`, where `F` is the discrete
//! Fisher information and `d1` the central difference.
//!
//! * Order one uses the Crank–Nicolson type derivative
//!   `-d2(V^{k+1} + V^k) / (V^{k+1} + V^k)`, which satisfies the discrete
//!   chain rule `F[U^{k+1}] - F[U^k] = sum_i vd_i (U^{k+1}_i - U^k_i) h` exactly.
//! * Order `q` uses `-d2 V / V - r_corr * D^q d2 U / V`, with the scalar
//!   `r_corr` chosen so that `D^q F = sum_i vd_i D^q U_i h`, where `D^q` is the
//!   BDF-q difference quotient.
//!
//! In both cases the unknown is `V^{k+1}` with `U^{k+1} = (V^{k+1})^2`. The
//! right-hand side is a central difference of a flux, so the quadrature of the
//! residual is exactly the change in mass.

use crate::bdf::{bdf_coefficients, BdfFormula, History, SchemeState};
use crate::error::{Error, Result};
use crate::functionals::fisher_from_sqrt;
use crate::grid::{stencil, GridFunction, PeriodicGrid1D};
use crate::newton::{max_norm, newton_solve, positivity_guard, JacobianStructure, NewtonConfig, NewtonReport};

/// Residual `i` of the order-one scheme couples unknowns `i-3..=i+3`.
pub const Q1_STENCIL_HALF_WIDTH: usize = 3;

pub const DEFAULT_R_CORR_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DvdConfig {
    pub q: usize,
    pub tau: f64,
    pub grid: PeriodicGrid1D,
    /// `r_corr` is set to zero when `|den| <= threshold * (1 + |num|)`.
    pub r_corr_threshold: f64,
}

impl DvdConfig {
    pub fn new(grid: PeriodicGrid1D, q: usize, tau: f64) -> Result<Self> {
        bdf_coefficients(q)?;
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::invalid(format!("time step must be positive, got {tau}")));
        }
        Ok(Self {
            q,
            tau,
            grid,
            r_corr_threshold: DEFAULT_R_CORR_THRESHOLD,
        })
    }

    /// Order used to compute level `step + 1`: the order-one scheme for the
    /// first step, then one order higher per step until `q` is reached.
    pub fn order_at(&self, step: usize) -> usize {
        self.q.min(step + 1)
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

fn squares(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x * x).collect()
}

/// `d1( U d1(vd) )`
fn flux_divergence(u: &[f64], vd: &[f64], h: f64) -> Vec<f64> {
    let grad = stencil::central1(vd, h);
    let flux: Vec<f64> = u.iter().zip(&grad).map(|(a, g)| a * g).collect();
    stencil::central1(&flux, h)
}

fn vd_q1_slice(vnew: &[f64], vold: &[f64], h: f64) -> Result<Vec<f64>> {
    let sum: Vec<f64> = vnew.iter().zip(vold).map(|(a, b)| a + b).collect();
    if let Some(node) = sum.iter().position(|&s| !(s > 0.0)) {
        return Err(Error::Degenerate { node });
    }
    let curv = stencil::central2(&sum, h);
    Ok(curv.iter().zip(&sum).map(|(c, s)| -c / s).collect())
}

/// `-d2(V^{k+1} + V^k)_i / (V^{k+1}_i + V^k_i)`
pub fn dvd_vd_q1(grid: &PeriodicGrid1D, vnew: &GridFunction, vold: &GridFunction) -> Result<GridFunction> {
    Ok(GridFunction::from_vec(vd_q1_slice(vnew.values(), vold.values(), grid.h())?))
}

fn residual_q1_slice(cfg: &DvdConfig, vnew: &[f64], vold: &[f64]) -> Result<Vec<f64>> {
    let h = cfg.grid.h();
    let vd = vd_q1_slice(vnew, vold, h)?;
    let unew = squares(vnew);
    let div = flux_divergence(&unew, &vd, h);
    Ok(unew
        .iter()
        .zip(vold)
        .zip(&div)
        .map(|((un, vo), d)| (un - vo * vo) / cfg.tau - d)
        .collect())
}

/// `(U^{k+1} - U^k)/tau - d1(U^{k+1} d1(vd))` with `U = V^2` at both levels.
pub fn dvd_residual_q1(cfg: &DvdConfig, vnew: &GridFunction, vold: &GridFunction) -> Result<GridFunction> {
    Ok(GridFunction::from_vec(residual_q1_slice(cfg, vnew.values(), vold.values())?))
}

/// BDF-q variational derivative together with its correction term.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectedDerivative {
    pub field: GridFunction,
    pub r_corr: f64,
    pub numerator: f64,
    pub denominator: f64,
    /// The denominator fell under the cutoff and `r_corr` was set to zero.
    pub degenerate: bool,
    /// `D^q F[U^{k+1}]`
    pub fisher_rate: f64,
    /// `D^q U^{k+1}`
    pub density_rate: GridFunction,
}

/// Previous `U` levels (newest first) and their Fisher informations,
/// precomputed once per step.
struct BdfqContext {
    formula: BdfFormula,
    levels: Vec<Vec<f64>>,
    fisher: Vec<f64>,
    tau: f64,
    h: f64,
    threshold: f64,
}

impl BdfqContext {
    fn new(formula: BdfFormula, hist_u: &History, tau: f64, h: f64, threshold: f64) -> Result<Self> {
        let q = formula.order();
        if hist_u.len() < q {
            return Err(Error::invalid(format!(
                "BDF{q} derivative needs {q} previous levels, history holds {}",
                hist_u.len()
            )));
        }
        let levels: Vec<Vec<f64>> = hist_u.levels().take(q).map(|u| u.values().to_vec()).collect();
        for u in &levels {
            if let Some(node) = u.iter().position(|&x| x < 0.0) {
                return Err(Error::Positivity { node, value: u[node] });
            }
        }
        let fisher = levels
            .iter()
            .map(|u| {
                let v: Vec<f64> = u.iter().map(|x| x.sqrt()).collect();
                fisher_from_sqrt(&v, h)
            })
            .collect();
        Ok(Self {
            formula,
            levels,
            fisher,
            tau,
            h,
            threshold,
        })
    }

    fn density_rate(&self, unew: &[f64]) -> Vec<f64> {
        let previous: Vec<&[f64]> = self.levels.iter().map(|l| l.as_slice()).collect();
        let mut d = self.formula.combine_slices(unew, &previous);
        d.iter_mut().for_each(|x| *x /= self.tau);
        d
    }

    fn derivative(&self, vnew: &[f64]) -> Result<CorrectedDerivative> {
        check_positive(vnew)?;
        let h = self.h;
        let unew = squares(vnew);
        let rate = self.density_rate(&unew);
        let fisher_rate = self
            .formula
            .apply_scalar(fisher_from_sqrt(vnew, h), &self.fisher, self.tau);

        let ratio: Vec<f64> = rate.iter().zip(vnew).map(|(d, v)| d / v).collect();
        let grad_ratio = stencil::forward(&ratio, h);
        let numerator = fisher_rate - stencil::inner(&stencil::forward(vnew, h), &grad_ratio, h);
        let denominator = stencil::inner(&stencil::forward(&rate, h), &grad_ratio, h);
        let degenerate = denominator.abs() <= self.threshold * (1.0 + numerator.abs());
        let r_corr = if degenerate { 0.0 } else { numerator / denominator };

        let curv_v = stencil::central2(vnew, h);
        let curv_rate = stencil::central2(&rate, h);
        let field: Vec<f64> = vnew
            .iter()
            .zip(curv_v.iter().zip(&curv_rate))
            .map(|(v, (cv, cr))| -cv / v - r_corr * cr / v)
            .collect();
        Ok(CorrectedDerivative {
            field: GridFunction::from_vec(field),
            r_corr,
            numerator,
            denominator,
            degenerate,
            fisher_rate,
            density_rate: GridFunction::from_vec(rate),
        })
    }

    fn residual(&self, vnew: &[f64]) -> Result<Vec<f64>> {
        let vd = self.derivative(vnew)?;
        let unew = squares(vnew);
        let div = flux_divergence(&unew, vd.field.values(), self.h);
        Ok(vd
            .density_rate
            .values()
            .iter()
            .zip(&div)
            .map(|(d, f)| d - f)
            .collect())
    }
}

/// BDF-q variational derivative at `vnew`; `hist_u` holds the previous `U`
/// levels, newest first.
pub fn dvd_vd_bdfq(cfg: &DvdConfig, hist_u: &History, vnew: &GridFunction) -> Result<CorrectedDerivative> {
    let ctx = BdfqContext::new(
        bdf_coefficients(cfg.q)?,
        hist_u,
        cfg.tau,
        cfg.grid.h(),
        cfg.r_corr_threshold,
    )?;
    ctx.derivative(vnew.values())
}

/// `D^q U^{k+1} - d1( U^{k+1} d1(vd) )` with `U^{k+1} = vnew^2`.
pub fn dvd_residual_bdfq(cfg: &DvdConfig, hist_u: &History, vnew: &GridFunction) -> Result<GridFunction> {
    let ctx = BdfqContext::new(
        bdf_coefficients(cfg.q)?,
        hist_u,
        cfg.tau,
        cfg.grid.h(),
        cfg.r_corr_threshold,
    )?;
    Ok(GridFunction::from_vec(ctx.residual(vnew.values())?))
}

/// Starting iterate for the order-`q` solve: whichever of `V^k` and the
/// linear extrapolation `2 V^k - V^{k-1}` has the smaller residual.
/// Starting from `V^k` puts `D^q U` near `-U_t/2`, and the path to the
/// solution then crosses `D^q U = 0`, where the denominator of `r_corr`
/// vanishes; after a rough step the extrapolation can be the worse choice.
fn initial_guess(ctx: &BdfqContext, hist: &History, floor: f64) -> Vec<f64> {
    let vk = hist.newest().values().to_vec();
    let Some(vkm1) = hist.get(1) else {
        return vk;
    };
    let extrapolated: Vec<f64> = vk.iter().zip(vkm1.values()).map(|(a, b)| 2.0 * a - b).collect();
    let score = |v: &[f64]| match ctx.residual(v) {
        Ok(r) if positivity_guard(floor)(v) => max_norm(&r),
        _ => f64::INFINITY,
    };
    if score(&extrapolated) < score(&vk) {
        extrapolated
    } else {
        vk
    }
}

/// Diagnostics of an accepted DVD step.
#[derive(Debug, Clone, PartialEq)]
pub struct DvdStepInfo {
    pub order: usize,
    /// `None` for the order-one scheme.
    pub r_corr: Option<f64>,
    pub r_corr_degenerate: bool,
    /// Discrete time derivative of `F`: `(F^{k+1} - F^k)/tau` for order one,
    /// `D^q F` otherwise.
    pub fisher_rate: f64,
    /// `|fisher_rate - sum_i vd_i (D U)_i h|`
    pub chain_residual: f64,
    /// `sum_i U^{k+1}_i (d1 vd)_i^2 h`, order one only.
    pub dissipation: Option<f64>,
    /// `|(F^{k+1} - F^k)/tau + dissipation|`, order one only.
    pub dissipation_residual: Option<f64>,
}

fn q1_diagnostics(cfg: &DvdConfig, vnew: &[f64], vold: &[f64]) -> Result<DvdStepInfo> {
    let h = cfg.grid.h();
    let vd = vd_q1_slice(vnew, vold, h)?;
    let unew = squares(vnew);
    let rate: Vec<f64> = unew.iter().zip(vold).map(|(a, b)| (a - b * b) / cfg.tau).collect();
    let fisher_rate = (fisher_from_sqrt(vnew, h) - fisher_from_sqrt(vold, h)) / cfg.tau;
    let chain = stencil::inner(&vd, &rate, h);
    let grad = stencil::central1(&vd, h);
    let dissipation = unew.iter().zip(&grad).map(|(u, g)| u * g * g).sum::<f64>() * h;
    Ok(DvdStepInfo {
        order: 1,
        r_corr: None,
        r_corr_degenerate: false,
        fisher_rate,
        chain_residual: (fisher_rate - chain).abs(),
        dissipation: Some(dissipation),
        dissipation_residual: Some((fisher_rate + dissipation).abs()),
    })
}

/// Advances `V` by one step of the DVD scheme of order `cfg.order_at(step)`.
/// The first step of the BDF-q schemes uses the order-one scheme; a
/// BDF3 run takes its second step with BDF2.
pub fn step_dvd(
    cfg: &DvdConfig,
    state: &SchemeState,
    newton: &NewtonConfig,
) -> Result<(SchemeState, NewtonReport, DvdStepInfo)> {
    let order = cfg.order_at(state.step());
    let hist = state.history();
    let vk = hist.newest().values().to_vec();
    check_positive(&vk)?;
    let guard = positivity_guard(newton.positivity_floor);

    if order == 1 {
        let (v, report) = newton_solve(
            |x: &[f64]| residual_q1_slice(cfg, x, &vk),
            vk.clone(),
            newton,
            JacobianStructure::PeriodicBanded {
                half_width: Q1_STENCIL_HALF_WIDTH,
            },
            guard,
        )?;
        let info = q1_diagnostics(cfg, &v, &vk)?;
        return Ok((state.advanced(GridFunction::from_vec(v)), report, info));
    }

    if hist.len() < order {
        return Err(Error::invalid(format!(
            "BDF{order} step needs {order} previous levels, state holds {}",
            hist.len()
        )));
    }
    let hist_u = hist.map_levels(|v| v.map(|x| x * x));
    let ctx = BdfqContext::new(
        bdf_coefficients(order)?,
        &hist_u,
        cfg.tau,
        cfg.grid.h(),
        cfg.r_corr_threshold,
    )?;
    // r_corr couples every unknown to every residual component
    let (v, report) = newton_solve(
        |x: &[f64]| ctx.residual(x),
        initial_guess(&ctx, hist, newton.positivity_floor),
        newton,
        JacobianStructure::Dense,
        guard,
    )?;
    let vd = ctx.derivative(&v)?;
    let chain = stencil::inner(vd.field.values(), vd.density_rate.values(), cfg.grid.h());
    let info = DvdStepInfo {
        order,
        r_corr: Some(vd.r_corr),
        r_corr_degenerate: vd.degenerate,
        fisher_rate: vd.fisher_rate,
        chain_residual: (vd.fisher_rate - chain).abs(),
        dissipation: None,
        dissipation_residual: None,
    };
    Ok((state.advanced(GridFunction::from_vec(v)), report, info))
}
