//! The damped Newton solver on its own: a periodic, banded nonlinear system
//! `v_i^3 - (v_{i-1} - 2 v_i + v_{i+1}) - f_i = 0`, solved with the coloured
//! finite-difference Jacobian and with the dense one.

use dlss::newton::{newton_solve, positivity_guard, JacobianStructure, NewtonConfig};

fn residual(v: &[f64], f: &[f64]) -> dlss::Result<Vec<f64>> {
    let n = v.len();
    Ok((0..n)
        .map(|i| {
            let (l, r) = (v[(i + n - 1) % n], v[(i + 1) % n]);
            v[i].powi(3) - (l - 2.0 * v[i] + r) - f[i]
        })
        .collect())
}

fn main() -> dlss::Result<()> {
    let n = 40;
    let f: Vec<f64> = (0..n)
        .map(|i| 2.0 + (std::f64::consts::TAU * i as f64 / n as f64).sin())
        .collect();
    let cfg = NewtonConfig::default();

    for structure in [JacobianStructure::PeriodicBanded { half_width: 1 }, JacobianStructure::Dense] {
        let (v, report) = newton_solve(
            |x: &[f64]| residual(x, &f),
            vec![1.0; n],
            &cfg,
            structure,
            positivity_guard(cfg.positivity_floor),
        )?;
        println!(
            "{structure:?}: {} iterations, {} halvings, residual {:.2e} -> {:.2e}, v_0 = {:.12}",
            report.iterations, report.halvings, report.initial_residual_norm, report.residual_norm, v[0]
        );
    }
    Ok(())
}
