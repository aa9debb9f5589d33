//! Thermal reservoirs: Planck occupations, pump rates and dephasing rates.
//!
//! Each engine variant couples a subset of the three lower levels to the
//! excited level |4> through a filtered thermal reservoir:
//!
//! * channel 1: transition 4-1 at `omega_41`, temperature `t_41`
//! * channel 2: transition 4-2 at `omega_42`, temperature `t_42`
//! * channel 3: transition 4-3 at `omega_43`, temperature `t_43`
//!
//! A reservoir with occupation `n_4i` pumps population upward at
//! `R_i4 = Gamma_4i * n_4i` and stimulates downward decay at the same rate,
//! on top of the spontaneous rate `Gamma_4i`. The resulting zero-field
//! steady state obeys detailed balance, `rho_44 / rho_ii = n_4i / (n_4i + 1)`
//! per active channel.

use crate::engine::EngineVariant;
use crate::error::{Error, Result};
use crate::units::thermal_exponent;

/// Spontaneous decay rates of the three optical channels, in 2π·MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRates {
    pub gamma_41: f64,
    pub gamma_42: f64,
    pub gamma_43: f64,
}

impl DecayRates {
    /// Total spontaneous decay rate out of |4>, in 2π·MHz.
    pub fn total(&self) -> f64 {
        self.gamma_41 + self.gamma_42 + self.gamma_43
    }
}

/// Reservoir description: transition frequencies (rad/s) and temperatures (K).
///
/// Transition frequencies are optical-scale angular frequencies; they enter
/// only through the thermal exponent `hbar*omega/(kB*T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirSpec {
    pub omega_41_rad_s: f64,
    pub omega_42_rad_s: f64,
    pub omega_43_rad_s: f64,
    pub t_41_k: f64,
    pub t_42_k: f64,
    pub t_43_k: f64,
}

impl ReservoirSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega_41_rad_s", self.omega_41_rad_s),
            ("omega_42_rad_s", self.omega_42_rad_s),
            ("omega_43_rad_s", self.omega_43_rad_s),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be a positive finite angular frequency, got {v}"
                )));
            }
        }
        for (name, v) in [("t_41_k", self.t_41_k), ("t_42_k", self.t_42_k), ("t_43_k", self.t_43_k)]
        {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be a non-negative finite temperature, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Planck occupations (n_41, n_42, n_43) of the three channels.
    pub fn occupations(&self) -> (f64, f64, f64) {
        (
            photon_occupation(self.omega_41_rad_s, self.t_41_k),
            photon_occupation(self.omega_42_rad_s, self.t_42_k),
            photon_occupation(self.omega_43_rad_s, self.t_43_k),
        )
    }
}

/// Planck photon occupation `1 / (exp(hbar*omega/(kB*T)) - 1)`.
///
/// Returns 0 at `T == 0` (instead of NaN from the naive expression).
pub fn photon_occupation(omega_rad_s: f64, temperature_k: f64) -> f64 {
    let x = thermal_exponent(omega_rad_s, temperature_k);
    if x.is_infinite() {
        return 0.0;
    }
    1.0 / (x.exp() - 1.0)
}

/// Thermal pump rate `R_i4 = Gamma_4i * n_4i`, in 2π·MHz.
pub fn pump_rate(gamma_4i: f64, n_4i: f64) -> f64 {
    gamma_4i * n_4i
}

/// Thermal pump rates per channel, in 2π·MHz. Inactive channels are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpRates {
    pub r_14: f64,
    pub r_24: f64,
    pub r_34: f64,
}

impl PumpRates {
    /// Rates for a given variant: channels absent from the variant are zero.
    pub fn for_variant(variant: EngineVariant, decays: &DecayRates, res: &ReservoirSpec) -> Self {
        let (n41, n42, n43) = res.occupations();
        PumpRates {
            r_14: pump_rate(decays.gamma_41, n41),
            r_24: if variant.has_pump_channel() { pump_rate(decays.gamma_42, n42) } else { 0.0 },
            r_34: if variant.has_control_channel() { pump_rate(decays.gamma_43, n43) } else { 0.0 },
        }
    }
}

/// Population-decay-induced dephasing rates of the six coherences, 2π·MHz.
///
/// `gamma_jk` is the sum of all population rates out of levels j and k; the
/// corresponding coherence decays at `gamma_jk / 2`. Rates of channels that
/// the variant lacks (including the spontaneous decay of an unused channel)
/// are excluded, which reproduces the two-reservoir engines' formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingSet {
    pub gamma_41: f64,
    pub gamma_42: f64,
    pub gamma_43: f64,
    pub gamma_21: f64,
    pub gamma_31: f64,
    pub gamma_32: f64,
}

/// Build the dephasing set for `variant` from decay and pump rates.
///
/// The rate out of |4> is the sum over active channels of
/// `Gamma_4i + R_i4` (spontaneous + stimulated emission); the rate out of a
/// ground level |i> is its thermal pump rate `R_i4`.
pub fn dephasing_rates(variant: EngineVariant, decays: &DecayRates, pumps: &PumpRates) -> DephasingSet {
    let out_1 = pumps.r_14;
    let out_2 = pumps.r_24;
    let out_3 = pumps.r_34;
    let mut out_4 = decays.gamma_41 + pumps.r_14;
    if variant.has_pump_channel() {
        out_4 += decays.gamma_42 + pumps.r_24;
    }
    if variant.has_control_channel() {
        out_4 += decays.gamma_43 + pumps.r_34;
    }
    DephasingSet {
        gamma_41: out_4 + out_1,
        gamma_42: out_4 + out_2,
        gamma_43: out_4 + out_3,
        gamma_21: out_2 + out_1,
        gamma_31: out_3 + out_1,
        gamma_32: out_3 + out_2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EngineVariant;
    use approx::assert_relative_eq;

    fn defaults() -> (DecayRates, ReservoirSpec) {
        (
            DecayRates { gamma_41: 5.7, gamma_42: 5.7, gamma_43: 5.7 },
            ReservoirSpec {
                omega_41_rad_s: 4.0e15,
                omega_42_rad_s: 3.0e15,
                omega_43_rad_s: 3.0e15,
                t_41_k: 5000.0,
                t_42_k: 5000.0,
                t_43_k: 5000.0,
            },
        )
    }

    #[test]
    fn occupations_at_default_parameters() {
        let (_, res) = defaults();
        let (n41, n42, n43) = res.occupations();
        assert_relative_eq!(n41, 2.224e-3, max_relative = 1e-3);
        assert_relative_eq!(n42, 1.033e-2, max_relative = 1e-3);
        assert_relative_eq!(n43, n42, max_relative = 1e-12);
    }

    #[test]
    fn occupation_zero_temperature() {
        assert_eq!(photon_occupation(4.0e15, 0.0), 0.0);
    }

    #[test]
    fn occupation_monotone_in_temperature() {
        let mut last = 0.0;
        for t in [100.0, 1000.0, 5000.0, 20000.0] {
            let n = photon_occupation(4.0e15, t);
            assert!(n > last);
            last = n;
        }
    }

    #[test]
    fn pump_rates_at_default_parameters() {
        let (dec, res) = defaults();
        let pumps = PumpRates::for_variant(EngineVariant::Composite, &dec, &res);
        assert_relative_eq!(pumps.r_14, 1.268e-2, max_relative = 1e-3);
        assert_relative_eq!(pumps.r_24, 5.888e-2, max_relative = 1e-3);
        assert_relative_eq!(pumps.r_34, 5.888e-2, max_relative = 1e-3);
    }

    #[test]
    fn pump_variant_masks_channels() {
        let (dec, res) = defaults();
        let pu = PumpRates::for_variant(EngineVariant::Pump, &dec, &res);
        assert_eq!(pu.r_34, 0.0);
        assert!(pu.r_24 > 0.0);
        let c = PumpRates::for_variant(EngineVariant::Control, &dec, &res);
        assert_eq!(c.r_24, 0.0);
        assert!(c.r_34 > 0.0);
    }

    #[test]
    fn dephasing_reproduces_quoted_values() {
        // The composite engine's Raman dephasings quoted at the default
        // parameter point: gamma_21 = 0.072, gamma_32 = 0.118 (2π·MHz).
        let (dec, res) = defaults();
        let pumps = PumpRates::for_variant(EngineVariant::Composite, &dec, &res);
        let deph = dephasing_rates(EngineVariant::Composite, &dec, &pumps);
        assert_relative_eq!(deph.gamma_21, 0.072, max_relative = 2e-2);
        assert_relative_eq!(deph.gamma_32, 0.118, max_relative = 2e-2);
        assert_relative_eq!(deph.gamma_21, pumps.r_14 + pumps.r_24, max_relative = 1e-12);
        assert_relative_eq!(deph.gamma_32, pumps.r_24 + pumps.r_34, max_relative = 1e-12);
        // gamma_41 quoted as 17.360; the reconstruction from Gamma = 5.7 per
        // channel lands within 2%.
        assert_relative_eq!(deph.gamma_41, 17.360, max_relative = 2e-2);
    }

    #[test]
    fn dephasing_two_reservoir_variants() {
        let (dec, res) = defaults();
        let pu_p = PumpRates::for_variant(EngineVariant::Pump, &dec, &res);
        let pu = dephasing_rates(EngineVariant::Pump, &dec, &pu_p);
        // HE_pu: gamma_41 = Gamma_41 + Gamma_42 + 2 R_14 + R_24.
        assert_relative_eq!(
            pu.gamma_41,
            dec.gamma_41 + dec.gamma_42 + 2.0 * pu_p.r_14 + pu_p.r_24,
            max_relative = 1e-12
        );
        assert_relative_eq!(pu.gamma_21, pu_p.r_14 + pu_p.r_24, max_relative = 1e-12);

        let c_p = PumpRates::for_variant(EngineVariant::Control, &dec, &res);
        let c = dephasing_rates(EngineVariant::Control, &dec, &c_p);
        // HE_c: gamma_41 = Gamma_41 + Gamma_43 + 2 R_14 + R_34.
        assert_relative_eq!(
            c.gamma_41,
            dec.gamma_41 + dec.gamma_43 + 2.0 * c_p.r_14 + c_p.r_34,
            max_relative = 1e-12
        );
        assert_relative_eq!(c.gamma_31, c_p.r_14 + c_p.r_34, max_relative = 1e-12);
    }

    #[test]
    fn dephasing_closed_system_limit() {
        // All T -> 0: pump rates vanish, coherence dephasing of the optical
        // transitions reduces to the spontaneous sum; Raman dephasings vanish.
        let dec = DecayRates { gamma_41: 5.7, gamma_42: 5.7, gamma_43: 5.7 };
        let pumps = PumpRates { r_14: 0.0, r_24: 0.0, r_34: 0.0 };
        let d = dephasing_rates(EngineVariant::Composite, &dec, &pumps);
        assert_eq!(d.gamma_41, dec.total());
        assert_eq!(d.gamma_21, 0.0);
        assert_eq!(d.gamma_31, 0.0);
        assert_eq!(d.gamma_32, 0.0);
    }
}
