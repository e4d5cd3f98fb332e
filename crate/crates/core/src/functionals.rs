//! Discrete entropies, the discrete Fisher information and the algebraic
//! constants that go with them.
//!
//! Two conventions for the power entropy coexist. [`entropy_alpha`] is the
//! plain sum `sum_i U_i^alpha h` (no `1/(alpha(alpha-1))` prefactor), which is
//! the quantity shown in decay plots. [`modified_entropy_g`] keeps the
//! prefactor because it is the functional the BDF2 scheme dissipates.
//!
//! Entropy decay of the continuous equation is usually quoted for
//! `1 <= alpha < 3/2`, while the existence/stability range in one dimension
//! is `1 <= alpha < 4/3` (see [`EntropyOrder::admissible`]). Both bounds are
//! exposed; neither is enforced by the functionals themselves.

use crate::error::{Error, Result};
use crate::grid::{stencil, GridFunction, PeriodicGrid1D};

/// Upper end of the range in which entropies are reported to decay.
pub const DECAY_ALPHA_UPPER: f64 = 1.5;

/// Entropy exponent together with the space dimension used for `kappa_alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyOrder {
    pub alpha: f64,
    pub dimension: u32,
}

impl EntropyOrder {
    pub fn new(alpha: f64, dimension: u32) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 2), got {alpha}")));
        }
        if dimension == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        Ok(Self { alpha, dimension })
    }

    pub fn is_logarithmic(&self) -> bool {
        self.alpha == 1.0
    }

    /// `(sqrt(d) + 1)^2 / (d + 2)`
    pub fn upper_bound(&self) -> f64 {
        let d = self.dimension as f64;
        (d.sqrt() + 1.0).powi(2) / (d + 2.0)
    }

    /// `1 <= alpha < (sqrt(d)+1)^2/(d+2)`, the existence and stability regime.
    pub fn admissible(&self) -> bool {
        self.alpha >= 1.0 && self.alpha < self.upper_bound()
    }

    pub fn kappa(&self) -> Result<f64> {
        kappa_alpha(self.alpha, self.dimension)
    }
}

fn check_nonnegative(u: &GridFunction) -> Result<()> {
    match u.values().iter().position(|&x| x < 0.0) {
        Some(node) => Err(Error::Positivity {
            node,
            value: u[node],
        }),
        None => Ok(()),
    }
}

/// `sum_i U_i^alpha h` for `alpha > 0`, `alpha != 1`.
pub fn entropy_alpha(grid: &PeriodicGrid1D, u: &GridFunction, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || alpha == 1.0 {
        return Err(Error::invalid(format!(
            "power entropy needs alpha > 0, alpha != 1 (got {alpha})"
        )));
    }
    check_nonnegative(u)?;
    Ok(u.values().iter().map(|x| x.powf(alpha)).sum::<f64>() * grid.h())
}

/// Logarithmic entropy `sum_i (U_i (log U_i - 1) + 1) h`. A node with
/// `U_i = 0` contributes its limit value `h`.
pub fn entropy_one(grid: &PeriodicGrid1D, u: &GridFunction) -> Result<f64> {
    check_nonnegative(u)?;
    Ok(u.values().iter().map(|&x| log_entropy_density(x)).sum::<f64>() * grid.h())
}

fn log_entropy_density(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x * (x.ln() - 1.0) + 1.0
    }
}

/// [`entropy_one`] for `alpha == 1`, [`entropy_alpha`] otherwise.
pub fn entropy(grid: &PeriodicGrid1D, u: &GridFunction, alpha: f64) -> Result<f64> {
    if alpha == 1.0 {
        entropy_one(grid, u)
    } else {
        entropy_alpha(grid, u, alpha)
    }
}

/// Entropy minus its value at the constant field of equal mass.
///
/// For `alpha != 1` this is `E_alpha[U] - Ubar^alpha`. For `alpha == 1` the
/// logarithmic entropy is used, giving `E_1[U] - (Ubar (log Ubar - 1) + 1)`.
pub fn relative_entropy_alpha(grid: &PeriodicGrid1D, u: &GridFunction, alpha: f64) -> Result<f64> {
    let e = entropy(grid, u, alpha)?;
    let mean = grid.quadrature_sum(u);
    let at_mean = if alpha == 1.0 {
        log_entropy_density(mean)
    } else {
        mean.powf(alpha)
    };
    Ok(e - at_mean)
}

/// `1/(2 alpha (alpha-1)) sum_i (U_k^alpha + (2 U_k^{alpha/2} - U_{k-1}^{alpha/2})^2) h`
pub fn modified_entropy_g(
    grid: &PeriodicGrid1D,
    u_k: &GridFunction,
    u_km1: &GridFunction,
    alpha: f64,
) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::invalid(format!(
            "modified entropy needs alpha > 1 (got {alpha})"
        )));
    }
    check_nonnegative(u_k)?;
    check_nonnegative(u_km1)?;
    let half = 0.5 * alpha;
    let sum: f64 = u_k
        .values()
        .iter()
        .zip(u_km1.values())
        .map(|(&a, &b)| {
            let g = 2.0 * a.powf(half) - b.powf(half);
            a.powf(alpha) + g * g
        })
        .sum();
    Ok(sum * grid.h() / (2.0 * alpha * (alpha - 1.0)))
}

/// `F_d[U] = 1/2 sum_i ((delta+ V)^2 + (delta- V)^2) h` with `V = sqrt(U)`.
pub fn fisher_discrete(grid: &PeriodicGrid1D, u: &GridFunction) -> Result<f64> {
    check_nonnegative(u)?;
    let v: Vec<f64> = u.values().iter().map(|x| x.sqrt()).collect();
    Ok(fisher_from_sqrt(&v, grid.h()))
}

pub(crate) fn fisher_from_sqrt(v: &[f64], h: f64) -> f64 {
    let plus = stencil::forward(v, h);
    let minus = stencil::backward(v, h);
    0.5 * plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| p * p + m * m)
        .sum::<f64>()
        * h
}

/// `kappa_alpha = p(alpha) / (alpha^2 (p(alpha) - p(0)))` with
/// `p(a) = -a^2 + 2(d+1)/(d+2) a - ((d-1)/(d+2))^2`.
///
/// Defined for `(sqrt(d)-1)^2/(d+2) < alpha < (sqrt(d)+1)^2/(d+2)`, where
/// `p(alpha) > 0`. In one dimension `p(0) = 0` and the constant is `1/alpha^2`.
pub fn kappa_alpha(alpha: f64, d: u32) -> Result<f64> {
    if d == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let df = d as f64;
    let lower = (df.sqrt() - 1.0).powi(2) / (df + 2.0);
    let upper = (df.sqrt() + 1.0).powi(2) / (df + 2.0);
    if !(alpha > lower && alpha < upper) {
        return Err(Error::invalid(format!(
            "kappa_alpha undefined for alpha = {alpha} in d = {d}; need {lower} < alpha < {upper}"
        )));
    }
    let p = |a: f64| -a * a + 2.0 * (df + 1.0) / (df + 2.0) * a - ((df - 1.0) / (df + 2.0)).powi(2);
    let (pa, p0) = (p(alpha), p(0.0));
    Ok(pa / (alpha * alpha * (pa - p0)))
}

/// Both sides of the two BDF2 G-stability inequalities for one triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GStability {
    /// `2 (3/2 a - 2b + c/2) a`
    pub lhs: f64,
    /// `3/2 a^2 - 2 b^2 + c^2/2 + (a-b)^2 - (b-c)^2`
    pub rhs_first: f64,
    /// `(a^2 + (2a-b)^2)/2 - (b^2 + (2b-c)^2)/2`
    pub rhs_second: f64,
}

impl GStability {
    pub fn evaluate(a: f64, b: f64, c: f64) -> Self {
        Self {
            lhs: 2.0 * (1.5 * a - 2.0 * b + 0.5 * c) * a,
            rhs_first: 1.5 * a * a - 2.0 * b * b + 0.5 * c * c + (a - b).powi(2) - (b - c).powi(2),
            rhs_second: 0.5 * (a * a + (2.0 * a - b).powi(2)) - 0.5 * (b * b + (2.0 * b - c).powi(2)),
        }
    }

    pub fn tolerance(&self) -> f64 {
        1e-12 * (1.0 + self.lhs.abs())
    }

    pub fn holds(&self) -> (bool, bool) {
        let tol = self.tolerance();
        (
            self.lhs >= self.rhs_first - tol,
            self.lhs >= self.rhs_second - tol,
        )
    }
}

/// Checks both inequalities, `lhs >= rhs - 1e-12 (1 + |lhs|)`.
pub fn gstability_check(a: f64, b: f64, c: f64) -> (bool, bool) {
    GStability::evaluate(a, b, c).holds()
}
