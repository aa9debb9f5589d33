//! The four-level tripod engine: Hamiltonians, jump channels, Liouvillian.
//!
//! Level ordering is |1>, |2>, |3>, |4> (index 0..3); |4> is the shared
//! excited state. Three fields may couple to it:
//!
//! * probe  Ω_pr on 1-4 (weak, the generated field),
//! * pump   Ω_pu on 2-4,
//! * control Ω_c on 3-4, whose effective Rabi frequency is modulated by the
//!   vibrating mirror: Ω_c(t) = Ω_c [1 + ε cos(ω_m t)] with ε = k_c z_0.
//!
//! In the rotating frame the DC Hamiltonian is (units of 2π·MHz)
//!
//! ```text
//!       ⎡ 0                               -Ω_pr/2 ⎤
//!   H = ⎢     Δ_pr-Δ_pu                   -Ω_pu/2 ⎥
//!       ⎢                 Δ_pr-Δ_c        -Ω_c/2  ⎥
//!       ⎣ -Ω_pr/2  -Ω_pu/2  -Ω_c/2   Δ_pr         ⎦
//! ```
//!
//! and the mirror contributes sidebands `V_± e^{∓iω_m t}` with
//! `V_± = -(Ω_c/2)(ε/2) (|3><4| + |4><3|)`.
//!
//! The mirror can equivalently be viewed as shifting the control detuning to
//! `Δ_c ∓ ω_m` at full strength (the two Doppler branches). The spectral
//! observables average the two branch evaluations; [`Branch`] selects one.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::reservoir::{dephasing_rates, DecayRates, DephasingSet, PumpRates, ReservoirSpec};

pub type C64 = Complex<f64>;

/// Engine variant: which reservoirs/fields are present.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineVariant {
    /// HE_pu: reservoirs T_41, T_42 and the pump field. No mirror.
    Pump,
    /// HE_c: reservoirs T_41, T_43 and the mirror-modulated control field.
    Control,
    /// HE_puc: all three reservoirs, pump and control.
    Composite,
}

impl EngineVariant {
    /// Channel 2 (pump transition 4-2) present?
    pub fn has_pump_channel(self) -> bool {
        matches!(self, EngineVariant::Pump | EngineVariant::Composite)
    }

    /// Channel 3 (control transition 4-3, mirror) present?
    pub fn has_control_channel(self) -> bool {
        matches!(self, EngineVariant::Control | EngineVariant::Composite)
    }

    pub fn label(self) -> &'static str {
        match self {
            EngineVariant::Pump => "HE_pu",
            EngineVariant::Control => "HE_c",
            EngineVariant::Composite => "HE_puc",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "he_pu" | "pump" | "pu" => Ok(EngineVariant::Pump),
            "he_c" | "control" | "c" => Ok(EngineVariant::Control),
            "he_puc" | "composite" | "puc" => Ok(EngineVariant::Composite),
            other => Err(Error::Config(format!("unknown engine variant '{other}'"))),
        }
    }
}

impl std::fmt::Display for EngineVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Mirror Doppler branch: `Plus` shifts the control detuning by `-ω_m`,
/// `Minus` by `+ω_m` (the `∓ω_m` of the closed-form response).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    /// Detuning shift added to `Δ_c`, in units of `ω_m`.
    pub fn shift_sign(self) -> f64 {
        match self {
            Branch::Plus => -1.0,
            Branch::Minus => 1.0,
        }
    }

    /// Sign of the `-i l ω_m` harmonic offset this branch corresponds to
    /// (harmonic index +1 for `Plus`, -1 for `Minus`).
    pub fn harmonic(self) -> i32 {
        match self {
            Branch::Plus => 1,
            Branch::Minus => -1,
        }
    }
}

/// One thermal decay channel 4 -> lower.
///
/// Spontaneous decay at `gamma`, stimulated emission and absorption both at
/// `gamma * n`, so the total downward rate is `gamma * (n + 1)` and the
/// upward rate `gamma * n`; the zero-field steady state then satisfies
/// detailed balance `rho_44 / rho_ll = n / (n + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayChannel {
    /// Index (0-based) of the lower level: 0, 1 or 2.
    pub lower: usize,
    /// Spontaneous rate Γ_4i, 2π·MHz.
    pub gamma: f64,
    /// Reservoir photon occupation n_4i.
    pub n: f64,
}

impl DecayChannel {
    pub fn downward_rate(&self) -> f64 {
        self.gamma * (self.n + 1.0)
    }
    pub fn upward_rate(&self) -> f64 {
        self.gamma * self.n
    }
}

/// Full parameter set of one engine at one probe detuning.
///
/// All dynamical frequencies are in 2π·MHz; reservoir frequencies in rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineParams {
    pub variant: EngineVariant,
    pub decays: DecayRates,
    pub reservoirs: ReservoirSpec,
    /// Probe Rabi frequency Ω_pr.
    pub omega_pr: f64,
    /// Pump Rabi frequency Ω_pu (0 for HE_c).
    pub omega_pu: f64,
    /// Control Rabi frequency Ω_c (0 for HE_pu).
    pub omega_c: f64,
    /// Probe detuning Δ_pr.
    pub delta_pr: f64,
    /// Pump detuning Δ_pu.
    pub delta_pu: f64,
    /// Control detuning Δ_c.
    pub delta_c: f64,
    /// Mirror frequency ω_m.
    pub omega_m: f64,
    /// Mirror modulation depth ε = k_c z_0.
    pub epsilon: f64,
}

impl EngineParams {
    pub fn validate(&self) -> Result<()> {
        self.reservoirs.validate()?;
        for (name, v) in [
            ("gamma_41", self.decays.gamma_41),
            ("gamma_42", self.decays.gamma_42),
            ("gamma_43", self.decays.gamma_43),
            ("omega_pr", self.omega_pr),
            ("omega_pu", self.omega_pu),
            ("omega_c", self.omega_c),
            ("omega_m", self.omega_m),
            ("epsilon", self.epsilon),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be non-negative and finite, got {v}"
                )));
            }
        }
        for (name, v) in [("delta_pr", self.delta_pr), ("delta_pu", self.delta_pu), ("delta_c", self.delta_c)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        if !self.variant.has_pump_channel() && self.omega_pu != 0.0 {
            return Err(Error::Unsupported {
                variant: self.variant.label().to_string(),
                what: format!("pump field omega_pu = {}", self.omega_pu),
            });
        }
        if !self.variant.has_control_channel() && self.omega_c != 0.0 {
            return Err(Error::Unsupported {
                variant: self.variant.label().to_string(),
                what: format!("control field omega_c = {}", self.omega_c),
            });
        }
        Ok(())
    }

    /// Thermal pump rates for the active channels.
    pub fn pump_rates(&self) -> PumpRates {
        PumpRates::for_variant(self.variant, &self.decays, &self.reservoirs)
    }

    /// Variant-aware dephasing set.
    pub fn dephasing(&self) -> DephasingSet {
        dephasing_rates(self.variant, &self.decays, &self.pump_rates())
    }

    /// Rotating-frame DC Hamiltonian (no mirror shift).
    pub fn hamiltonian_dc(&self) -> Matrix4<C64> {
        self.hamiltonian_with_control_detuning(self.delta_c)
    }

    /// DC Hamiltonian of one Doppler branch: control detuning `Δ_c ∓ ω_m`.
    pub fn hamiltonian_dc_branch(&self, branch: Branch) -> Matrix4<C64> {
        self.hamiltonian_with_control_detuning(self.delta_c + branch.shift_sign() * self.omega_m)
    }

    fn hamiltonian_with_control_detuning(&self, delta_c: f64) -> Matrix4<C64> {
        let z = C64::new(0.0, 0.0);
        let mut h = Matrix4::from_element(z);
        h[(1, 1)] = C64::new(self.delta_pr - self.delta_pu, 0.0);
        h[(2, 2)] = C64::new(self.delta_pr - delta_c, 0.0);
        h[(3, 3)] = C64::new(self.delta_pr, 0.0);
        let pr = C64::new(-0.5 * self.omega_pr, 0.0);
        h[(0, 3)] = pr;
        h[(3, 0)] = pr;
        if self.variant.has_pump_channel() {
            let pu = C64::new(-0.5 * self.omega_pu, 0.0);
            h[(1, 3)] = pu;
            h[(3, 1)] = pu;
        }
        if self.variant.has_control_channel() {
            let c = C64::new(-0.5 * self.omega_c, 0.0);
            h[(2, 3)] = c;
            h[(3, 2)] = c;
        }
        h
    }

    /// Mirror sideband operator `V_+ = V_- = -(Ω_c/2)(ε/2)(|3><4| + |4><3|)`.
    ///
    /// Errors for variants without the control channel (no mirror present).
    pub fn hamiltonian_sideband(&self) -> Result<Matrix4<C64>> {
        if !self.variant.has_control_channel() {
            return Err(Error::Unsupported {
                variant: self.variant.label().to_string(),
                what: "mirror sideband Hamiltonian".to_string(),
            });
        }
        let mut v = Matrix4::from_element(C64::new(0.0, 0.0));
        let amp = C64::new(-0.5 * self.omega_c * 0.5 * self.epsilon, 0.0);
        v[(2, 3)] = amp;
        v[(3, 2)] = amp;
        Ok(v)
    }

    /// Active thermal decay channels for this variant.
    pub fn dissipators(&self) -> Vec<DecayChannel> {
        let (n41, n42, n43) = self.reservoirs.occupations();
        let mut chans = vec![DecayChannel { lower: 0, gamma: self.decays.gamma_41, n: n41 }];
        if self.variant.has_pump_channel() {
            chans.push(DecayChannel { lower: 1, gamma: self.decays.gamma_42, n: n42 });
        }
        if self.variant.has_control_channel() {
            chans.push(DecayChannel { lower: 2, gamma: self.decays.gamma_43, n: n43 });
        }
        chans
    }
}

/// Column-major-free index of density-matrix element (row j, col k) in the
/// flattened 16-vector: `idx = 4*j + k`.
pub fn rho_index(j: usize, k: usize) -> usize {
    4 * j + k
}

/// Apply one Lindblad dissipation term `rate * D[|a><b|]` to `rho`.
fn apply_jump(out: &mut Matrix4<C64>, rho: &Matrix4<C64>, a: usize, b: usize, rate: f64) {
    if rate == 0.0 {
        return;
    }
    let r = C64::new(rate, 0.0);
    let half = C64::new(0.5 * rate, 0.0);
    // sigma rho sigma^dag = |a> rho_bb <a|
    out[(a, a)] += r * rho[(b, b)];
    // -1/2 {sigma^dag sigma, rho} = -1/2 {|b><b|, rho}
    for m in 0..4 {
        out[(b, m)] -= half * rho[(b, m)];
        out[(m, b)] -= half * rho[(m, b)];
    }
}

/// Lindblad generator applied to a density matrix:
/// `L[rho] = -i [H, rho] + sum_channels (down D[|l><4|] + up D[|4><l|]) rho`.
pub fn apply_liouvillian(h: &Matrix4<C64>, channels: &[DecayChannel], rho: &Matrix4<C64>) -> Matrix4<C64> {
    let i = C64::new(0.0, 1.0);
    let mut out = (h * rho - rho * h) * (-i);
    for ch in channels {
        apply_jump(&mut out, rho, ch.lower, 3, ch.downward_rate());
        apply_jump(&mut out, rho, 3, ch.lower, ch.upward_rate());
    }
    out
}

/// Dense 16x16 matrix of the generator in the flattened basis.
pub fn liouvillian_matrix(h: &Matrix4<C64>, channels: &[DecayChannel]) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(16, 16, C64::new(0.0, 0.0));
    for j in 0..4 {
        for k in 0..4 {
            let mut basis = Matrix4::from_element(C64::new(0.0, 0.0));
            basis[(j, k)] = C64::new(1.0, 0.0);
            let img = apply_liouvillian(h, channels, &basis);
            let col = rho_index(j, k);
            for r in 0..4 {
                for c in 0..4 {
                    m[(rho_index(r, c), col)] = img[(r, c)];
                }
            }
        }
    }
    m
}

/// Commutator generator `-i [V, rho]` as a 16x16 matrix (used for the
/// sideband blocks of the Floquet system, where `V` has no dissipative part).
pub fn commutator_matrix(v: &Matrix4<C64>) -> DMatrix<C64> {
    liouvillian_matrix(v, &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    pub(crate) fn default_params(variant: EngineVariant) -> EngineParams {
        EngineParams {
            variant,
            decays: DecayRates { gamma_41: 5.7, gamma_42: 5.7, gamma_43: 5.7 },
            reservoirs: ReservoirSpec {
                omega_41_rad_s: 4.0e15,
                omega_42_rad_s: 3.0e15,
                omega_43_rad_s: 3.0e15,
                t_41_k: 5000.0,
                t_42_k: 5000.0,
                t_43_k: 5000.0,
            },
            omega_pr: 0.868,
            omega_pu: if variant.has_pump_channel() { 17.36 } else { 0.0 },
            omega_c: if variant.has_control_channel() { 17.36 } else { 0.0 },
            delta_pr: 0.0,
            delta_pu: 0.0,
            delta_c: 0.0,
            omega_m: 2.0,
            epsilon: 0.01,
        }
    }

    #[test]
    fn dc_hamiltonian_is_hermitian_with_expected_diagonal() {
        let mut p = default_params(EngineVariant::Composite);
        p.delta_pr = 3.0;
        p.delta_pu = 1.0;
        p.delta_c = -2.0;
        let h = p.hamiltonian_dc();
        assert_eq!(h[(0, 0)], C64::new(0.0, 0.0));
        assert_relative_eq!(h[(1, 1)].re, 2.0);
        assert_relative_eq!(h[(2, 2)].re, 5.0);
        assert_relative_eq!(h[(3, 3)].re, 3.0);
        for j in 0..4 {
            for k in 0..4 {
                assert_eq!(h[(j, k)], h[(k, j)].conj());
            }
        }
    }

    #[test]
    fn pump_variant_has_no_control_coupling() {
        let p = default_params(EngineVariant::Pump);
        let h = p.hamiltonian_dc();
        assert_eq!(h[(2, 3)], C64::new(0.0, 0.0));
        assert!(p.hamiltonian_sideband().is_err());
    }

    #[test]
    fn sideband_amplitude() {
        let p = default_params(EngineVariant::Composite);
        let v = p.hamiltonian_sideband().unwrap();
        assert_relative_eq!(v[(2, 3)].re, -0.5 * 17.36 * 0.5 * 0.01, max_relative = 1e-14);
        assert_eq!(v[(2, 3)], v[(3, 2)]);
        assert_eq!(v[(0, 3)], C64::new(0.0, 0.0));
    }

    #[test]
    fn branch_shift_moves_control_detuning() {
        let p = default_params(EngineVariant::Control);
        let hp = p.hamiltonian_dc_branch(Branch::Plus);
        let hm = p.hamiltonian_dc_branch(Branch::Minus);
        // diag entry 2 is Δ_pr - (Δ_c ∓ ω_m)
        assert_relative_eq!(hp[(2, 2)].re, 0.0 - (0.0 - 2.0));
        assert_relative_eq!(hm[(2, 2)].re, 0.0 - (0.0 + 2.0));
    }

    #[test]
    fn liouvillian_preserves_trace_and_hermiticity() {
        let p = default_params(EngineVariant::Composite);
        let h = p.hamiltonian_dc();
        let chans = p.dissipators();
        // act on a generic Hermitian matrix with unit trace
        let mut rho = Matrix4::from_element(C64::new(0.0, 0.0));
        for j in 0..4 {
            rho[(j, j)] = C64::new(0.25, 0.0);
        }
        rho[(0, 1)] = C64::new(0.03, 0.01);
        rho[(1, 0)] = rho[(0, 1)].conj();
        rho[(2, 3)] = C64::new(-0.02, 0.05);
        rho[(3, 2)] = rho[(2, 3)].conj();
        let d = apply_liouvillian(&h, &chans, &rho);
        let trace: C64 = (0..4).map(|j| d[(j, j)]).sum();
        assert!(trace.norm() < 1e-14);
        for j in 0..4 {
            for k in 0..4 {
                assert!((d[(j, k)] - d[(k, j)].conj()).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn matrix_and_direct_application_agree() {
        let p = default_params(EngineVariant::Composite);
        let h = p.hamiltonian_dc();
        let chans = p.dissipators();
        let m = liouvillian_matrix(&h, &chans);
        let mut rho = Matrix4::from_element(C64::new(0.0, 0.0));
        for j in 0..4 {
            for k in 0..4 {
                rho[(j, k)] = C64::new(0.1 * (j as f64 + 1.0), 0.05 * (k as f64 - 1.5));
            }
        }
        let direct = apply_liouvillian(&h, &chans, &rho);
        let mut vec = nalgebra::DVector::from_element(16, C64::new(0.0, 0.0));
        for j in 0..4 {
            for k in 0..4 {
                vec[rho_index(j, k)] = rho[(j, k)];
            }
        }
        let via = &m * vec;
        for j in 0..4 {
            for k in 0..4 {
                assert!((via[rho_index(j, k)] - direct[(j, k)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn field_validation_per_variant() {
        let mut p = default_params(EngineVariant::Pump);
        assert!(p.validate().is_ok());
        p.omega_c = 1.0;
        assert!(p.validate().is_err());
        let mut q = default_params(EngineVariant::Control);
        assert!(q.validate().is_ok());
        q.omega_pu = 1.0;
        assert!(q.validate().is_err());
    }
}
