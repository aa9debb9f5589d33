//! Steady-state simulation of EIT-based quantum heat engines.
//!
//! A four-level tripod atom is driven by pump/control lasers and pumped by
//! spectrally filtered thermal reservoirs; a vibrating mirror phase-
//! modulates the control field. The crate computes the response seen by a
//! weak probe — absorption/emission coefficients, spectral brightness,
//! coherence modulation — and the engine-level observables built from it:
//! entropy flow per unit power, maximum radiation temperature, emission
//! rate, and the second-law bounds they must respect.
//!
//! Two independent backends are provided and cross-validated:
//! a Floquet harmonic-balance steady-state solver for the full Lindblad
//! master equation ([`floquet`], [`linear_response`]) and scalar
//! closed-form response formulas ([`closed_form`]).
//!
//! All small frequencies (Rabi, detunings, decay and mirror rates) are in
//! 2π·MHz; optical transition frequencies are in rad/s and enter only
//! through thermal exponents. See [`units`].

pub mod cli;
pub mod closed_form;
pub mod config;
pub mod engine;
pub mod error;
pub mod floquet;
pub mod linear_response;
pub mod observables;
pub mod reservoir;
pub mod tables;
pub mod units;

pub use closed_form::{ClosedFormOptions, ModulationResult, Populations};
pub use engine::{Branch, EngineParams, EngineVariant, C64};
pub use error::{Error, Result};
pub use floquet::{solve_floquet, FloquetSystem, HarmonicState};
pub use linear_response::{split_probe_response, ResponsePicture, SplitCoherence};
pub use observables::{
    brightness, emission_rate, engine_report, entropy_bounds, entropy_flow, split_coefficients,
    sweep_spectrum, t_max_over_t0, EngineReport, GridSpec, Method, ResponseCoefficients,
    SpectrumRow,
};
pub use reservoir::{DecayRates, DephasingSet, PumpRates, ReservoirSpec};
pub use units::AngularFrequency;
