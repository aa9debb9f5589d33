//! Physical constants and the unit conventions used throughout the crate.
//!
//! Two frequency scales coexist in this model and must never be mixed up:
//!
//! * **Optical transition frequencies** (`omega_41`, `omega_42`, `omega_43`)
//!   are of order 10^15 rad/s. They only enter *thermal* formulas, i.e. the
//!   Planck occupation of the reservoirs and the entropy-flow limits, always
//!   through the dimensionless exponent `hbar * omega / (kB * T)`.
//! * **Dynamical frequencies** (Rabi frequencies, detunings, decay rates,
//!   the mirror frequency) are of order 2π·MHz. All master-equation algebra
//!   is carried out directly in 2π·MHz units; the equations are homogeneous
//!   in frequency so the overall scale cancels everywhere except in the
//!   thermal exponents above.

/// Reduced Planck constant, J·s (CODATA 2018).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact, SI 2019).
pub const KB: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s (exact).
pub const C: f64 = 2.997_924_58e8;

/// One unit of the solver's working frequency scale, in rad/s.
pub const TWO_PI_MHZ: f64 = 2.0 * std::f64::consts::PI * 1.0e6;

/// An angular frequency with explicit unit provenance.
///
/// Stored internally in rad/s. Constructors/accessors convert between the
/// SI value and the 2π·MHz working scale used by the solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularFrequency(f64);

impl AngularFrequency {
    /// From a raw angular frequency in rad/s.
    pub fn from_rad_s(value: f64) -> Self {
        AngularFrequency(value)
    }

    /// From a value expressed in units of 2π·MHz (the convention used for
    /// Rabi frequencies, detunings and decay rates).
    pub fn from_two_pi_mhz(value: f64) -> Self {
        AngularFrequency(value * TWO_PI_MHZ)
    }

    /// Raw angular frequency in rad/s.
    pub fn rad_s(self) -> f64 {
        self.0
    }

    /// Value in units of 2π·MHz.
    pub fn two_pi_mhz(self) -> f64 {
        self.0 / TWO_PI_MHZ
    }
}

/// Dimensionless thermal exponent `hbar * omega / (kB * T)`.
///
/// `omega` is an optical transition frequency in rad/s; `temperature` in K.
/// Returns `+inf` for `T == 0` with `omega > 0`, matching the zero-occupation
/// limit of the Planck distribution.
pub fn thermal_exponent(omega_rad_s: f64, temperature_k: f64) -> f64 {
    if temperature_k == 0.0 {
        return if omega_rad_s == 0.0 { 0.0 } else { f64::INFINITY };
    }
    HBAR * omega_rad_s / (KB * temperature_k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponent_of_principal_transition() {
        // omega_41 = 4e15 rad/s at T = 5000 K.
        assert_relative_eq!(
            thermal_exponent(4.0e15, 5000.0),
            6.1106,
            max_relative = 1e-4
        );
    }

    #[test]
    fn exponent_of_secondary_transitions() {
        // omega_42 = omega_43 = 3e15 rad/s at T = 5000 K.
        assert_relative_eq!(
            thermal_exponent(3.0e15, 5000.0),
            4.583,
            max_relative = 1e-4
        );
    }

    #[test]
    fn exponent_is_linear_in_omega_and_inverse_in_t() {
        let x = thermal_exponent(4.0e15, 5000.0);
        assert_relative_eq!(thermal_exponent(2.0 * 4.0e15, 5000.0), 2.0 * x, max_relative = 1e-12);
        assert_relative_eq!(thermal_exponent(4.0e15, 10000.0), 0.5 * x, max_relative = 1e-12);
    }

    #[test]
    fn exponent_zero_frequency() {
        assert_eq!(thermal_exponent(0.0, 5000.0), 0.0);
    }

    #[test]
    fn exponent_zero_temperature() {
        assert_eq!(thermal_exponent(4.0e15, 0.0), f64::INFINITY);
    }

    #[test]
    fn angular_frequency_round_trip() {
        let f = AngularFrequency::from_two_pi_mhz(17.36);
        assert_relative_eq!(f.two_pi_mhz(), 17.36, max_relative = 1e-15);
        assert_relative_eq!(f.rad_s(), 17.36 * TWO_PI_MHZ, max_relative = 1e-15);
    }
}
