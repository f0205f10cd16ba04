//! Evolves the damped system with the Lindblad master equation and shows
//! how dissipation erodes the nonclassical windows: exciton squeezing depth
//! and the most negative HZ1 entanglement witness value both shrink as the
//! damping rate grows.
//!
//! Run with: cargo run --release --example open_system_sweep

use std::f64::consts::PI;

use kerr_exciton::dynamics::{evolve_lindblad_observe, TimeGrid};
use kerr_exciton::fock::{coherent_state, HilbertConfig};
use kerr_exciton::witnesses::moments;
use kerr_exciton::{InitialAmplitudes, SystemParams, C64};

fn main() -> kerr_exciton::Result<()> {
    let amps = InitialAmplitudes::new(2.0, 1.0, PI)?;
    let config = HilbertConfig::new(18, 18)?;
    let state = coherent_state(config, C64::new(amps.alpha, 0.0), amps.beta())?;
    let grid = TimeGrid::uniform(1.0, 201)?;

    println!("out-of-phase coherent input, damping on both modes, gt in [0, 1]");
    println!();
    println!(
        "{:>6} {:>12} {:>12} {:>14} {:>10}",
        "gamma", "min varX_a", "depth", "min HZ1", "trace err"
    );
    for gamma in [0.0, 0.01, 0.05] {
        let params = SystemParams::cds().with_damping(gamma, 0.0)?;
        let mut min_var = f64::INFINITY;
        let mut min_hz1 = f64::INFINITY;
        let diag = evolve_lindblad_observe(&state, &params, &grid, 1e-3, |_, _, st| {
            let m = moments(st);
            min_var = min_var.min(m.quadrature_variances().x_a);
            min_hz1 = min_hz1.min(m.hz_witnesses().0);
            Ok(())
        })?;
        println!(
            "{:>6.2} {:>12.6} {:>14.6} {:>12.4e} {:>10.1e}",
            gamma,
            min_var,
            0.25 - min_var,
            min_hz1,
            diag.max_weight_drift
        );
    }

    println!();
    println!("depth is the distance below the vacuum variance 1/4; both nonclassical");
    println!("signals weaken monotonically with gamma while the trace stays conserved.");
    Ok(())
}
