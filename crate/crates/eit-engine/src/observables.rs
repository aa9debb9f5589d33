//! Measurable quantities of the emitted probe field: absorption/emission
//! coefficients, spectral brightness, modulation, entropy flow, temperature
//! limits, second-law bounds and emission rate.
//!
//! DC coefficients are the arithmetic mean of the two Doppler branches
//! (control shifted by `∓ω_m`); modulation observables come from the pure
//! first harmonics of the sideband picture. Both can be evaluated either
//! via the closed-form scalar response or via the Floquet solver.

use crate::closed_form::{self, ClosedFormOptions, ModulationResult};
use crate::engine::{Branch, EngineParams};
use crate::error::{Error, Result};
use crate::linear_response::{active_branches, split_probe_response, ResponsePicture};
use crate::reservoir::ReservoirSpec;
use crate::units::{thermal_exponent, AngularFrequency};

/// Numerical backend for response evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Scalar closed-form response (adiabatic elimination).
    ClosedForm(ClosedFormOptions),
    /// Floquet harmonic-balance steady state, truncated at `|l| <= l_max`.
    Floquet { l_max: usize },
}

impl Default for Method {
    fn default() -> Self {
        Method::ClosedForm(ClosedFormOptions::default())
    }
}

/// Dimensionless absorption/emission coefficients of the probe transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseCoefficients {
    pub sigma_abs: f64,
    pub sigma_em: f64,
}

/// Branch-averaged DC absorption/emission coefficients.
///
/// `sigma_abs` is sourced by the ground population alone, `sigma_em` by the
/// excited-sector populations (rho_22, rho_33, rho_44) and the field
/// coherences they generate.
pub fn split_coefficients(params: &EngineParams, method: Method) -> Result<ResponseCoefficients> {
    let branches = active_branches(params.variant);
    let mut abs = 0.0;
    let mut em = 0.0;
    for &branch in branches {
        let (a, e) = branch_split(params, branch, method)?;
        abs += a;
        em += e;
    }
    let n = branches.len() as f64;
    Ok(ResponseCoefficients { sigma_abs: abs / n, sigma_em: em / n })
}

fn branch_split(params: &EngineParams, branch: Branch, method: Method) -> Result<(f64, f64)> {
    match method {
        Method::ClosedForm(_) => {
            let (ground, excited) = closed_form::dc_coherence_split(params, branch)?;
            Ok((-ground.im, excited.im))
        }
        Method::Floquet { .. } => {
            let split = split_probe_response(params, ResponsePicture::BranchDc(branch))?;
            Ok((split.sigma_abs(), split.sigma_em()))
        }
    }
}

/// Coherence-modulation observables at one probe detuning.
pub fn modulation(params: &EngineParams, method: Method) -> Result<ModulationResult> {
    match method {
        Method::ClosedForm(opts) => closed_form::modulation(params, opts),
        Method::Floquet { l_max } => {
            if !params.variant.has_control_channel() {
                return Err(Error::Unsupported {
                    variant: params.variant.label().to_string(),
                    what: "coherence modulation (no mirror)".to_string(),
                });
            }
            let split = split_probe_response(params, ResponsePicture::Sideband { l_max })?;
            Ok(closed_form::modulation_from_harmonics(split.excited(1), split.excited(-1)))
        }
    }
}

/// Spectral brightness outcome at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrightnessOutcome {
    /// `B = σ_em / (σ_abs − σ_em)`; absent when the denominator vanishes.
    pub value: Option<f64>,
    /// Set when `σ_em ≥ σ_abs` (gain regime, asymptote invalid).
    pub gain: bool,
}

/// Asymptotic spectral brightness of the emitted probe mode.
pub fn brightness(sigma: ResponseCoefficients) -> BrightnessOutcome {
    let den = sigma.sigma_abs - sigma.sigma_em;
    if den == 0.0 {
        BrightnessOutcome { value: None, gain: true }
    } else {
        BrightnessOutcome { value: Some(sigma.sigma_em / den), gain: den < 0.0 }
    }
}

/// One row of a brightness/modulation spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    /// Probe detuning (2π·MHz).
    pub delta_pr: f64,
    pub sigma_abs: f64,
    pub sigma_em: f64,
    pub brightness: Option<f64>,
    pub brightness_over_n41: Option<f64>,
    pub mod_amplitude: Option<f64>,
    /// Modulation phase α (radians, in (-π, π]).
    pub mod_phase: Option<f64>,
    pub gain: bool,
    /// Per-point solver failure; such rows carry no observables.
    pub error: Option<String>,
}

/// Uniform probe-detuning grid (2π·MHz).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridSpec {
    /// Table-caption default: ±50 (2π·MHz), 2001 points.
    pub fn default_window() -> GridSpec {
        GridSpec { min: -50.0, max: 50.0, points: 2001 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min < self.max) {
            return Err(Error::InvalidParameter(format!(
                "grid min ({}) must be below max ({})",
                self.min, self.max
            )));
        }
        if self.points < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 3 points, got {}",
                self.points
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.min + step * i as f64).collect()
    }
}

/// Sweep the probe detuning and evaluate brightness (and, when requested
/// and supported, modulation) at every grid point. Per-point failures are
/// recorded in the row, never aborting the sweep.
pub fn sweep_spectrum(
    params: &EngineParams,
    grid: GridSpec,
    method: Method,
    with_modulation: bool,
) -> Result<Vec<SpectrumRow>> {
    params.validate()?;
    grid.validate()?;
    let (n41, _, _) = params.reservoirs.occupations();
    let do_mod = with_modulation && params.variant.has_control_channel() && params.epsilon > 0.0;
    let mut rows = Vec::with_capacity(grid.points);
    for delta in grid.values() {
        let mut p = params.clone();
        p.delta_pr = delta;
        let row = match split_coefficients(&p, method) {
            Ok(sigma) => {
                let b = brightness(sigma);
                let (amp, phase) = if do_mod {
                    match modulation(&p, method) {
                        Ok(m) => (Some(m.amplitude), m.phase),
                        Err(_) => (None, None),
                    }
                } else {
                    (None, None)
                };
                SpectrumRow {
                    delta_pr: delta,
                    sigma_abs: sigma.sigma_abs,
                    sigma_em: sigma.sigma_em,
                    brightness: b.value,
                    brightness_over_n41: b.value.map(|v| v / n41),
                    mod_amplitude: amp,
                    mod_phase: phase,
                    gain: b.gain,
                    error: None,
                }
            }
            Err(e) => SpectrumRow {
                delta_pr: delta,
                sigma_abs: f64::NAN,
                sigma_em: f64::NAN,
                brightness: None,
                brightness_over_n41: None,
                mod_amplitude: None,
                mod_phase: None,
                gain: false,
                error: Some(e.to_string()),
            },
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Scaled maximum temperature `T_max/T_0 = [ħω_41/(k_B T_0)] / ln(1/B + 1)`
/// from the line-center brightness.
pub fn t_max_over_t0(b_line_center: f64, omega_41: AngularFrequency, t0_k: f64) -> Result<f64> {
    if b_line_center <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "temperature limit needs positive brightness, got {b_line_center}"
        )));
    }
    let exponent = thermal_exponent(omega_41.rad_s(), t0_k);
    Ok(exponent / (1.0 / b_line_center + 1.0).ln())
}

/// Composite Simpson on a uniform grid; a trailing odd interval is handled
/// with a trapezoid.
fn simpson(step: f64, ys: &[f64]) -> f64 {
    let n = ys.len();
    if n < 2 {
        return 0.0;
    }
    let pairs = (n - 1) / 2;
    let mut total = 0.0;
    for k in 0..pairs {
        let i = 2 * k;
        total += step / 3.0 * (ys[i] + 4.0 * ys[i + 1] + ys[i + 2]);
    }
    if (n - 1) % 2 == 1 {
        total += 0.5 * step * (ys[n - 2] + ys[n - 1]);
    }
    total
}

fn usable_brightness(rows: &[SpectrumRow]) -> Vec<f64> {
    // gain-regime and failed rows are excluded (integrand forced to zero)
    rows.iter()
        .map(|r| match (r.gain, r.error.is_some(), r.brightness) {
            (false, false, Some(b)) if b >= 0.0 => b,
            _ => 0.0,
        })
        .collect()
}

fn grid_step(rows: &[SpectrumRow]) -> Result<f64> {
    if rows.len() < 3 {
        return Err(Error::InvalidParameter("spectrum needs at least 3 rows".into()));
    }
    Ok((rows[rows.len() - 1].delta_pr - rows[0].delta_pr) / (rows.len() - 1) as f64)
}

/// Entropy flow rate per unit power,
/// `S/k_B = ∫[(B+1)ln(B+1) − B ln B] dω / ∫ B dω`.
pub fn entropy_flow(rows: &[SpectrumRow]) -> Result<f64> {
    let step = grid_step(rows)?;
    let bs = usable_brightness(rows);
    let entropy_density: Vec<f64> = bs
        .iter()
        .map(|&b| if b > 0.0 { (b + 1.0) * (b + 1.0).ln() - b * b.ln() } else { 0.0 })
        .collect();
    let flux = simpson(step, &bs);
    if flux <= 0.0 {
        return Err(Error::Numerical("entropy flow undefined: zero photon flux".into()));
    }
    Ok(simpson(step, &entropy_density) / flux)
}

/// Total emitted photon rate `R = (1/2π) ∫ B dω_pr` over the grid window.
pub fn emission_rate(rows: &[SpectrumRow]) -> Result<f64> {
    let step = grid_step(rows)?;
    let bs = usable_brightness(rows);
    Ok(simpson(step, &bs) / (2.0 * std::f64::consts::PI))
}

/// Variant-dependent second-law bounds on the entropy flow (in `k_B⁻¹`):
/// upper = `ħω_41/(k_B T_41)`; the lower bound subtracts the exponent of
/// each active auxiliary reservoir channel.
pub fn entropy_bounds(
    variant: crate::engine::EngineVariant,
    reservoirs: &ReservoirSpec,
) -> (f64, f64) {
    let upper = thermal_exponent(reservoirs.omega_41_rad_s, reservoirs.t_41_k);
    let mut lower = upper;
    if variant.has_pump_channel() {
        lower -= thermal_exponent(reservoirs.omega_42_rad_s, reservoirs.t_42_k);
    }
    if variant.has_control_channel() {
        lower -= thermal_exponent(reservoirs.omega_43_rad_s, reservoirs.t_43_k);
    }
    (upper, lower)
}

/// Laser intensity corresponding to a Rabi frequency: `I = 2 I_s (2Ω/Γ)²`.
pub fn rabi_intensity(omega: AngularFrequency, gamma: AngularFrequency, i_s: f64) -> Result<f64> {
    if gamma.rad_s() <= 0.0 {
        return Err(Error::InvalidParameter("linewidth must be positive".into()));
    }
    let ratio = 2.0 * omega.rad_s() / gamma.rad_s();
    Ok(2.0 * i_s * ratio * ratio)
}

/// Rabi frequency corresponding to a laser intensity (inverse of
/// [`rabi_intensity`]).
pub fn intensity_rabi(intensity: f64, gamma: AngularFrequency, i_s: f64) -> Result<AngularFrequency> {
    if gamma.rad_s() <= 0.0 {
        return Err(Error::InvalidParameter("linewidth must be positive".into()));
    }
    if intensity < 0.0 || i_s <= 0.0 {
        return Err(Error::InvalidParameter("intensities must be non-negative".into()));
    }
    let ratio = (intensity / (2.0 * i_s)).sqrt();
    Ok(AngularFrequency::from_rad_s(0.5 * ratio * gamma.rad_s()))
}

/// Integrated engine observables over one spectrum window.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineReport {
    pub s_over_kb: f64,
    pub t_max_over_t0: f64,
    pub emission_rate: f64,
    pub entropy_upper: f64,
    pub entropy_lower: f64,
    pub second_law_ok: bool,
    /// Number of gain-regime rows excluded from the integrals.
    pub gain_rows: usize,
}

/// Run the full sweep and integrate the engine observables. `T_max/T_0` is
/// evaluated from the brightness at `Δ_pr = 0` (line center) with `T_0`
/// the `T_41` reservoir temperature.
pub fn engine_report(params: &EngineParams, grid: GridSpec, method: Method) -> Result<EngineReport> {
    let rows = sweep_spectrum(params, grid, method, false)?;
    let s = entropy_flow(&rows)?;
    let rate = emission_rate(&rows)?;
    let mut center = params.clone();
    center.delta_pr = 0.0;
    let sigma0 = split_coefficients(&center, method)?;
    let b0 = brightness(sigma0)
        .value
        .filter(|_| sigma0.sigma_abs > sigma0.sigma_em)
        .ok_or_else(|| Error::Numerical("gain regime at line center: T_max undefined".into()))?;
    let t_ratio = t_max_over_t0(
        b0,
        AngularFrequency::from_rad_s(params.reservoirs.omega_41_rad_s),
        params.reservoirs.t_41_k,
    )?;
    let (upper, lower) = entropy_bounds(params.variant, &params.reservoirs);
    let gain_rows = rows.iter().filter(|r| r.gain).count();
    Ok(EngineReport {
        s_over_kb: s,
        t_max_over_t0: t_ratio,
        emission_rate: rate,
        entropy_upper: upper,
        entropy_lower: lower,
        second_law_ok: lower <= s && s <= upper,
        gain_rows,
    })
}
