//! Coherence modulation imprinted by the vibrating mirror (HE_c).
//!
//! The mirror converts the control beam into a carrier plus two sidebands,
//! which modulates the emitted probe coherence at the mirror frequency.
//! This example scans the modulation amplitude and phase across the EIT
//! window for three mirror frequencies: the amplitude dips at line center
//! (deeper for faster mirrors) and the line-center phase grows with the
//! mirror frequency.
//!
//! Run with: cargo run --release --example modulation_scan

use eit_engine::closed_form::{modulation, ClosedFormOptions};
use eit_engine::tables::baseline_params;
use eit_engine::EngineVariant;

fn main() {
    let mut p = baseline_params(EngineVariant::Control);
    p.omega_c = p.dephasing().gamma_41;

    for wm in [1.0, 2.0, 3.0] {
        p.omega_m = wm;
        println!("mirror frequency {wm} (2pi MHz)");
        println!("  detuning  amplitude     phase/pi");
        for delta in [-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0] {
            p.delta_pr = delta;
            let m = modulation(&p, ClosedFormOptions::default()).unwrap();
            println!(
                "  {delta:+8.1}  {:.6e}  {}",
                m.amplitude,
                m.phase
                    .map(|a| format!("{:+.4}", a / std::f64::consts::PI))
                    .unwrap_or_else(|| "-".into())
            );
        }
        p.delta_pr = 0.0;
        let center = modulation(&p, ClosedFormOptions::default()).unwrap();
        println!(
            "  line-center phase/pi = {:+.4}\n",
            center.phase.unwrap() / std::f64::consts::PI
        );
    }
}
