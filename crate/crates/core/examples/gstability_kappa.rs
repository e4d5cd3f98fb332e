//! The two BDF2 G-stability inequalities and the entropy constant kappa.

use dlss::functionals::{gstability_check, kappa_alpha, GStability};

fn main() -> dlss::Result<()> {
    println!("G-stability: lhs - rhs = (a - 2b + c)^2 / 2");
    for (a, b, c) in [(1.0, 0.0, 0.0), (2.5, 2.5, 2.5), (-3.0, 4.0, 1.5), (0.2, -7.0, 9.0)] {
        let s = GStability::evaluate(a, b, c);
        println!(
            "  ({a:>5}, {b:>5}, {c:>5}): lhs {:>9.3}  lhs-rhs1 {:>9.4}  lhs-rhs2 {:>9.4}  oracle {:>9.4}  holds {:?}",
            s.lhs,
            s.lhs - s.rhs_first,
            s.lhs - s.rhs_second,
            0.5 * (a - 2.0 * b + c).powi(2),
            gstability_check(a, b, c)
        );
    }

    println!("\nkappa_alpha in one dimension (kappa * alpha^2 = 1):");
    for alpha in [0.25, 0.5, 1.0, 1.2, 1.3] {
        let k = kappa_alpha(alpha, 1)?;
        println!("  alpha = {alpha:<4}  kappa = {k:<10.6}  kappa alpha^2 = {}", k * alpha * alpha);
    }
    for d in 1..=3 {
        println!("kappa_1 in {d}D = {}", kappa_alpha(1.0, d)?);
    }
    Ok(())
}
