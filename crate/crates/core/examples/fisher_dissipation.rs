//! First-order discrete variational derivative scheme: the Fisher information
//! decreases every step and its decrease equals the discrete dissipation
//! term to solver accuracy, while the mass stays put.
//!
//!     cargo run --release --example fisher_dissipation

use dlss::bdf::SchemeState;
use dlss::dvd::{step_dvd, DvdConfig};
use dlss::functionals::fisher_discrete;
use dlss::newton::NewtonConfig;
use dlss::{InitialProfile, PeriodicGrid1D};

fn main() -> dlss::Result<()> {
    let grid = PeriodicGrid1D::new(200)?;
    let cfg = DvdConfig::new(grid, 1, 1e-6)?;
    let newton = NewtonConfig::default();

    let u0 = grid.project_initial_datum(&InitialProfile::Cos16, false)?;
    let mass0 = grid.quadrature_sum(&u0);
    let mut state = SchemeState::new(u0.map(f64::sqrt), cfg.tau, 1);

    println!("{:>5} {:>16} {:>16} {:>12} {:>8}", "step", "F_d", "dissipation", "identity", "newton");
    for _ in 0..200 {
        let (next, report, info) = step_dvd(&cfg, &state, &newton)?;
        state = next;
        if state.step() % 20 == 0 {
            let u = state.current().map(|v| v * v);
            println!(
                "{:>5} {:>16.10e} {:>16.10e} {:>12.3e} {:>8}",
                state.step(),
                fisher_discrete(&grid, &u)?,
                info.dissipation.unwrap(),
                info.dissipation_residual.unwrap(),
                report.iterations
            );
        }
    }
    let u = state.current().map(|v| v * v);
    println!("mass drift after {} steps: {:.3e}", state.step(), grid.quadrature_sum(&u) - mass0);
    Ok(())
}
