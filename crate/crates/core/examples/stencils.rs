//! Periodic finite-difference operators, quadrature and summation by parts.

use dlss::{GridFunction, PeriodicGrid1D};

fn main() -> dlss::Result<()> {
    let grid = PeriodicGrid1D::new(8)?;
    let u = GridFunction::from_fn(&grid, |x| (std::f64::consts::TAU * x).sin());
    let w = GridFunction::from_fn(&grid, |x| x * (1.0 - x));

    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}", "x", "u", "d+ u", "d- u", "d1 u", "d2 u");
    let (dp, dm, d1, d2) = (grid.d_plus(&u), grid.d_minus(&u), grid.d_central1(&u), grid.d_central2(&u));
    for (i, x) in grid.nodes().enumerate() {
        println!(
            "{x:>6.3} {:>10.5} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            u[i], dp[i], dm[i], d1[i], d2[i]
        );
    }

    let lhs = grid.quadrature_sum(&u.zip_map(&grid.d_plus(&w), |a, b| a * b));
    let rhs = -grid.quadrature_sum(&w.zip_map(&grid.d_minus(&u), |a, b| a * b));
    println!("\nsum u d+w h = {lhs:.15}");
    println!("-sum w d-u h = {rhs:.15}");
    println!("|u|_2 = {:.15} (continuous value 1/sqrt(2) = {:.15})", grid.l2_norm(&u), 0.5f64.sqrt());
    Ok(())
}
