//! Recompute the benchmark tables of integrated engine observables.
//!
//! For each engine variant this evaluates the scaled maximum temperature
//! T_max/T0 (from the line-center brightness), the entropy flow per unit
//! power S/kB and the photon emission rate R over the standard window, and
//! compares them with the bundled reference values. The second-law bounds
//! are printed alongside.
//!
//! Run with: cargo run --release --example engine_tables [table-id]

use eit_engine::observables::{entropy_bounds, GridSpec, Method};
use eit_engine::tables::{baseline_params, evaluate_table, table};

fn main() {
    let id: u8 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let spec = table(id).expect("table id must be 1, 2 or 3");
    let grid = GridSpec { min: -50.0, max: 50.0, points: 2001 };

    let base = baseline_params(spec.variant);
    let (upper, lower) = entropy_bounds(spec.variant, &base.reservoirs);
    println!(
        "table {id} ({}) — entropy bounds: {lower:.3} <= S/kB <= {upper:.3}",
        spec.variant.label()
    );
    println!("row  w_m  drive  T/T0 (ref)      S/kB (ref)      R (ref)         2nd law");

    let rows = evaluate_table(&spec, grid, Method::default()).unwrap();
    for r in &rows {
        println!(
            "{:3}  {}  {:5.2}  {:6.3} ({:5.3})  {:6.3} ({:5.3})  {:6.4} ({:5.3})  {}",
            r.row.index,
            r.row.omega_m.map(|w| format!("{w:3.1}")).unwrap_or_else(|| "  -".into()),
            r.row.drive_over_gamma41,
            r.computed[0],
            r.row.expected[0],
            r.computed[1],
            r.row.expected[1],
            r.computed[2],
            r.row.expected[2],
            if r.second_law_ok { "ok" } else { "VIOLATED" }
        );
    }
    let within = rows.iter().filter(|r| r.within).count();
    println!("{within}/{} rows within the reference tolerances", rows.len());
}
