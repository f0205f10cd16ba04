//! Cross-checks the closed-form coefficient functions of the second-order
//! operator solution against a high-resolution Runge-Kutta integration of
//! the coefficient ODE system.
//!
//! Run with: cargo run --release --example coefficient_check

use kerr_exciton::analytic::{coefficient_ode_oracle_path, coefficients};
use kerr_exciton::SystemParams;

fn main() -> kerr_exciton::Result<()> {
    let cases = [
        ("CdS quantum well", SystemParams::cds()),
        ("zero detuning", SystemParams::new(10.0, 10.0, 0.08, 1.0)?),
        ("strong Kerr", SystemParams::new(12.5, 11.0, 0.6, 1.0)?),
    ];

    let times: Vec<f64> = (0..=30).map(|i| i as f64 * 0.01).collect();
    for (label, params) in &cases {
        let oracle = coefficient_ode_oracle_path(&times, params, 1e-5);
        let mut worst = 0.0f64;
        let mut worst_t = 0.0f64;
        for (&t, numeric) in times.iter().zip(&oracle) {
            let diff = coefficients(t, params).max_abs_diff(numeric);
            if diff > worst {
                worst = diff;
                worst_t = t;
            }
        }
        println!("{label:<16} max |closed form - ODE| = {worst:.3e} at t = {worst_t:.2}");
        assert!(worst < 1e-6, "closed forms disagree with the ODE oracle");
    }

    // A few structural identities of the coefficient system, checked at a
    // representative time. The bookkeeping scalar is the weight the solution
    // assigns to the identity; it must stay 1 through second order.
    let params = SystemParams::cds();
    let c = coefficients(0.25, &params);
    println!();
    println!("identities at t = 0.25 (CdS):");
    println!("  |h2 - f2|          = {:.3e}", (c.h2 - c.f2).norm());
    println!("  |f8 - f7|          = {:.3e}", (c.f8 - c.f7).norm());
    println!("  |h4 - f5/2|        = {:.3e}", (c.h4 - c.f5 / 2.0).norm());
    let bookkeeping = (c.f1.conj() * c.f1 + c.f2.conj() * c.f2 + 2.0 * c.f1 * c.f4.conj()).re;
    println!("  |1 - bookkeeping|  = {:.3e}", (1.0 - bookkeeping).abs());
    let cross = 2.0 * (c.h1.conj() * c.h3).re + c.f2.norm_sqr();
    println!("  |2Re(h1* h3) + |f2|^2| = {cross:.3e}");
    Ok(())
}
