//! Temporal convergence study on a coarse grid: every scheme is compared
//! against its own small-step reference at t = 5e-5 and the rate is the
//! least-squares slope of log error against log tau.
//!
//!     cargo run --release --example convergence_table [N]

use dlss::experiments::{convergence_study, ConvergenceStudyConfig, Scheme};

fn main() -> dlss::Result<()> {
    let n = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(50);
    for scheme in Scheme::ALL {
        let mut cfg = ConvergenceStudyConfig::new(scheme, n);
        cfg.tau_ref = 2.5e-8;
        let table = convergence_study(&cfg)?;
        println!("{scheme} (N = {n})");
        for (tau, err) in &table.rows {
            println!("  tau = {tau:.4e}   error = {err:.4e}");
        }
        println!("  rate = {:.3}\n", table.rate);
    }
    Ok(())
}
