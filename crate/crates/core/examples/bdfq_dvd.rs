//! Higher-order DVD schemes. The correction scalar r_corr restores the
//! discrete chain rule at every BDF2/BDF3 step, so D^q F_d equals the
//! (nonpositive) dissipation term.
//!
//!     cargo run --release --example bdfq_dvd

use dlss::bdf::SchemeState;
use dlss::dvd::{step_dvd, DvdConfig};
use dlss::newton::NewtonConfig;
use dlss::{InitialProfile, PeriodicGrid1D};

fn main() -> dlss::Result<()> {
    let grid = PeriodicGrid1D::new(100)?;
    let u0 = grid.project_initial_datum(&InitialProfile::Cos16, false)?;
    let newton = NewtonConfig::default();

    for q in [2, 3] {
        let cfg = DvdConfig::new(grid, q, 1e-6)?;
        let mut state = SchemeState::new(u0.map(f64::sqrt), cfg.tau, q);
        println!("BDF{q} DVD");
        println!("{:>4} {:>5} {:>14} {:>14} {:>12}", "step", "order", "r_corr", "D^q F_d", "chain res.");
        for _ in 0..8 {
            let (next, _, info) = step_dvd(&cfg, &state, &newton)?;
            state = next;
            let r = info.r_corr.map_or("-".to_string(), |r| format!("{r:.4e}"));
            println!(
                "{:>4} {:>5} {:>14} {:>14.6e} {:>12.3e}",
                state.step(),
                info.order,
                r,
                info.fisher_rate,
                info.chain_residual
            );
        }
        println!();
    }
    Ok(())
}
