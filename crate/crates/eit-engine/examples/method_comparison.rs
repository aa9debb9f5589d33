//! Cross-validation of the two response backends.
//!
//! The closed-form response (adiabatic elimination on the probe sector,
//! exact small-sector solves) and the Floquet harmonic-balance solver are
//! independent routes to the same steady state. This example draws random
//! parameter sets in the perturbative regime and reports the worst relative
//! disagreement of the DC split coherence and of the first sideband
//! harmonics.
//!
//! Run with: cargo run --release --example method_comparison

use eit_engine::closed_form::{coherence_harmonics, dc_coherence_split, ClosedFormOptions};
use eit_engine::linear_response::{split_probe_response, ResponsePicture};
use eit_engine::tables::baseline_params;
use eit_engine::{Branch, EngineVariant};

fn lcg(state: &mut u64) -> f64 {
    *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    ((*state >> 11) as f64) / ((1u64 << 53) as f64)
}

fn main() {
    let mut st = 42u64;
    let mut worst_dc = 0.0f64;
    let mut worst_h = 0.0f64;
    for i in 0..64 {
        let variant = match i % 3 {
            0 => EngineVariant::Pump,
            1 => EngineVariant::Control,
            _ => EngineVariant::Composite,
        };
        let mut p = baseline_params(variant);
        let g41 = p.dephasing().gamma_41;
        p.omega_pr = 0.1 * g41 * lcg(&mut st);
        p.omega_pu = if variant.has_pump_channel() { 2.0 * g41 * lcg(&mut st) } else { 0.0 };
        p.omega_c = if variant.has_control_channel() { 2.0 * g41 * lcg(&mut st) } else { 0.0 };
        p.delta_pr = 20.0 * (lcg(&mut st) - 0.5);
        p.delta_pu = if variant.has_pump_channel() { 10.0 * (lcg(&mut st) - 0.5) } else { 0.0 };
        p.delta_c = if variant.has_control_channel() { 10.0 * (lcg(&mut st) - 0.5) } else { 0.0 };
        p.omega_m = 1.0 + 2.0 * lcg(&mut st);
        p.epsilon = if variant.has_control_channel() { 0.02 * lcg(&mut st) } else { 0.0 };

        for branch in [Branch::Plus, Branch::Minus] {
            let fl = split_probe_response(&p, ResponsePicture::BranchDc(branch)).unwrap();
            let (g, e) = dc_coherence_split(&p, branch).unwrap();
            let f = fl.total(0);
            let c = g + e;
            worst_dc = worst_dc.max((f - c).norm() / f.norm().max(1e-300));
        }
        if p.variant.has_control_channel() && p.epsilon > 0.0 {
            let fl = split_probe_response(&p, ResponsePicture::Sideband { l_max: 3 }).unwrap();
            let ch = coherence_harmonics(&p, ClosedFormOptions::default()).unwrap();
            for (l, c) in [(1i32, ch.harmonic(true)), (-1, ch.harmonic(false))] {
                let f = fl.total(l);
                worst_h = worst_h.max((f - c).norm() / f.norm().max(1e-300));
            }
        }
    }
    println!("worst relative disagreement over 64 random draws:");
    println!("  DC split coherence : {worst_dc:.3e}");
    println!("  first harmonics    : {worst_h:.3e}");
}
