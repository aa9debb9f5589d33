//! Brightness spectrum of the pump-driven engine (HE_pu).
//!
//! Sweeps the probe detuning over the standard ±50 (2π·MHz) window for a
//! few pump strengths and prints the line-center peak of the normalized
//! brightness B/n41, showing how the EIT window brightens the emitted
//! probe light as the pump grows.
//!
//! Run with: cargo run --release --example brightness_spectrum

use eit_engine::observables::{sweep_spectrum, GridSpec, Method};
use eit_engine::tables::baseline_params;
use eit_engine::EngineVariant;

fn main() {
    let grid = GridSpec { min: -50.0, max: 50.0, points: 1001 };
    let mut p = baseline_params(EngineVariant::Pump);
    let gamma_41 = p.dephasing().gamma_41;

    println!("pump/g41  peak B/n41   at detuning (2pi MHz)");
    for scale in [0.5, 0.8, 1.0, 1.2, 2.0] {
        p.omega_pu = scale * gamma_41;
        let rows = sweep_spectrum(&p, grid, Method::default(), false).unwrap();
        let peak = rows
            .iter()
            .filter_map(|r| r.brightness_over_n41.map(|b| (b, r.delta_pr)))
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap();
        println!("{scale:8.2}  {:10.4}   {:+.2}", peak.0, peak.1);
    }

    // full spectrum at the reference pump strength, coarse printout
    p.omega_pu = gamma_41;
    let rows = sweep_spectrum(&p, grid, Method::default(), false).unwrap();
    println!("\ndetuning  sigma_abs     sigma_em      B/n41");
    for r in rows.iter().step_by(100) {
        println!(
            "{:+8.1}  {:.6e}  {:.6e}  {:8.4}",
            r.delta_pr,
            r.sigma_abs,
            r.sigma_em,
            r.brightness_over_n41.unwrap_or(f64::NAN)
        );
    }
}
