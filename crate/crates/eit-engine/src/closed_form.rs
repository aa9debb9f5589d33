//! Closed-form steady-state response: scalar formulas instead of the big
//! linear solve.
//!
//! Everything here is built from the same three-step structure:
//!
//! 1. **Populations** from the per-channel rate balance with saturated field
//!    transfer rates `X` (pump) and `Y` (control), see [`populations`].
//! 2. **Field coherences** rho_42 and rho_43 of the probe-free atom,
//!    including their mutual Raman coupling through rho_23 (the denominator
//!    of that chain is the `F` of [`response_denominators`]).
//! 3. **Probe coherence** rho_14 from the adiabatic elimination of the
//!    two-photon coherences rho_12 and rho_13, which produces the EIT
//!    denominator `G` and Raman source terms proportional to rho_42/rho_43.
//!
//! The mirror is handled in one of two equivalent-looking but physically
//! distinct pictures (see `linear_response` for the discussion):
//! the *branch* picture (control at `Δ_c ∓ ω_m`, amplitude `Ω_c (1+ε/2)`)
//! used for the DC spectra, and the *sideband* picture used for the
//! modulation harmonics, where the Fourier components of rho_14 are sourced
//! only by the `O(ε)` sideband operator and therefore vanish at `ε = 0`.
//!
//! The split into absorption and emission components follows the linearity
//! of every formula in the zeroth-order populations: the absorption part is
//! sourced by rho_11 alone, the emission part by rho_22, rho_33, rho_44 and
//! the field coherences they generate.

use nalgebra::Matrix4;
use num_complex::Complex;

use crate::engine::{Branch, EngineParams, C64};
use crate::error::{Error, Result};
use crate::reservoir::DephasingSet;

const I: C64 = Complex { re: 0.0, im: 1.0 };

/// Optional closed-form variants kept for comparison against the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormOptions {
    /// Use the doubly-divided (`1/F^2`) form of the control-coherence
    /// sideband source instead of the single-`F` form. The single-`F` form
    /// is dimensionally consistent and is the default; the oracle comparison
    /// in the test suite adjudicates.
    pub nested_f: bool,
}

impl Default for ClosedFormOptions {
    fn default() -> Self {
        ClosedFormOptions { nested_f: false }
    }
}

/// The scalar response denominators of one Doppler branch.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormPieces {
    /// EIT denominator of the probe coherence.
    pub g: C64,
    /// Denominator of the control-coherence (rho_43) response.
    pub f: C64,
    /// Saturated pump transfer rate X = R_24 + γ_42 Ω_pu²/(γ_42² + 4Δ_pu²).
    pub x: f64,
    /// Saturated control transfer rate at the branch-shifted detuning,
    /// Y = R_34 + γ_43 (1+ε/2)² Ω_c²/(γ_43² + 4(Δ_c ∓ ω_m)²).
    pub y: f64,
}

/// Steady-state populations (rho_11, rho_22, rho_33, rho_44).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Populations {
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
    pub rho44: f64,
}

impl Populations {
    pub fn sum(&self) -> f64 {
        self.rho11 + self.rho22 + self.rho33 + self.rho44
    }

    fn masked_ground(&self) -> Populations {
        Populations { rho11: self.rho11, rho22: 0.0, rho33: 0.0, rho44: 0.0 }
    }

    fn masked_excited(&self) -> Populations {
        Populations { rho11: 0.0, ..*self }
    }
}

/// Effective control field of a picture: amplitude and detuning.
#[derive(Debug, Clone, Copy)]
struct ControlField {
    omega: f64,
    delta: f64,
}

impl ControlField {
    /// Branch picture: carrier plus co-moving sideband at `Δ_c ∓ ω_m`.
    fn branch(p: &EngineParams, branch: Branch) -> ControlField {
        if p.variant.has_control_channel() {
            ControlField {
                omega: p.omega_c * (1.0 + 0.5 * p.epsilon),
                delta: p.delta_c + branch.shift_sign() * p.omega_m,
            }
        } else {
            ControlField { omega: 0.0, delta: p.delta_c }
        }
    }

    /// Sideband picture: bare carrier at `Δ_c`.
    fn carrier(p: &EngineParams) -> ControlField {
        ControlField { omega: if p.variant.has_control_channel() { p.omega_c } else { 0.0 }, delta: p.delta_c }
    }
}

fn pump_field(p: &EngineParams) -> f64 {
    if p.variant.has_pump_channel() {
        p.omega_pu
    } else {
        0.0
    }
}

/// Lorentzian saturation rate `γ Ω² / (γ² + 4Δ²)`.
fn transfer_rate(omega: f64, gamma: f64, delta: f64) -> f64 {
    if omega == 0.0 {
        0.0
    } else {
        gamma * omega * omega / (gamma * gamma + 4.0 * delta * delta)
    }
}

/// `G` and `F` (and the transfer rates X, Y) of one Doppler branch.
///
/// `G = γ_41/2 - iΔ_pr + Ω_pu²/(4 D_12) + Ω_c'²/(4 D_13)` where
/// `D_12 = γ_21/2 - i(Δ_pr - Δ_pu)`, `D_13 = γ_31/2 - i(Δ_pr - Δ_c ± ω_m)`
/// and `Ω_c' = Ω_c (1 + ε/2)` is the branch-effective control amplitude.
/// `F = γ_43/2 + iΔ_c' + Ω_pu²/(4 (γ_32/2 + i(Δ_c' - Δ_pu)))`.
pub fn response_denominators(params: &EngineParams, branch: Branch) -> ClosedFormPieces {
    let deph = params.dephasing();
    let pumps = params.pump_rates();
    let cf = ControlField::branch(params, branch);
    let opu = pump_field(params);

    let d12 = C64::new(0.5 * deph.gamma_21, -(params.delta_pr - params.delta_pu));
    let d13 = C64::new(0.5 * deph.gamma_31, -(params.delta_pr - cf.delta));
    let mut g = C64::new(0.5 * deph.gamma_41, -params.delta_pr);
    if opu > 0.0 {
        g += C64::new(0.25 * opu * opu, 0.0) / d12;
    }
    if cf.omega > 0.0 {
        g += C64::new(0.25 * cf.omega * cf.omega, 0.0) / d13;
    }

    let mut f = C64::new(0.5 * deph.gamma_43, cf.delta);
    if opu > 0.0 {
        let d23 = C64::new(0.5 * deph.gamma_32, cf.delta - params.delta_pu);
        f += C64::new(0.25 * opu * opu, 0.0) / d23;
    }

    let x = pumps.r_24 + transfer_rate(opu, deph.gamma_42, params.delta_pu);
    let y = pumps.r_34 + transfer_rate(cf.omega, deph.gamma_43, cf.delta);
    ClosedFormPieces { g, f, x, y }
}

/// Rate-balance populations of one Doppler branch.
///
/// Channel i balances `up_i (rho_44 - rho_ii) + Γ_4i rho_44 = 0` with
/// `up_1 = R_14`, `up_2 = X`, `up_3 = Y`; levels without an active channel
/// carry no population. For the composite engine this reproduces the
/// determinant form `rho_44 = X Y R_14 / D`,
/// `D = 4 X Y R_14 + X Y Γ_41 + Y R_14 Γ_42 + X R_14 Γ_43`.
pub fn populations(params: &EngineParams, branch: Branch) -> Result<Populations> {
    params.validate()?;
    let pieces = response_denominators(params, branch);
    let pumps = params.pump_rates();
    rate_balance(
        params,
        pumps.r_14,
        if params.variant.has_pump_channel() { Some(pieces.x) } else { None },
        if params.variant.has_control_channel() { Some(pieces.y) } else { None },
    )
}

fn rate_balance(
    params: &EngineParams,
    up1: f64,
    up2: Option<f64>,
    up3: Option<f64>,
) -> Result<Populations> {
    // weight w_i = rho_ii / rho_44 = (Γ_4i + up_i) / up_i
    let weight = |gamma: f64, up: f64| -> f64 {
        if up > 0.0 {
            (gamma + up) / up
        } else {
            f64::INFINITY
        }
    };
    let w1 = weight(params.decays.gamma_41, up1);
    let w2 = up2.map(|u| weight(params.decays.gamma_42, u));
    let w3 = up3.map(|u| weight(params.decays.gamma_43, u));
    let ws = [Some(w1), w2, w3];

    if ws.iter().flatten().any(|w| w.is_infinite()) {
        // Degenerate limit: any channel without upward pumping traps the
        // whole population in its ground level.
        let trapped: Vec<usize> = ws
            .iter()
            .enumerate()
            .filter_map(|(i, w)| match w {
                Some(w) if w.is_infinite() => Some(i),
                _ => None,
            })
            .collect();
        let share = 1.0 / trapped.len() as f64;
        let mut p = Populations { rho11: 0.0, rho22: 0.0, rho33: 0.0, rho44: 0.0 };
        for i in trapped {
            match i {
                0 => p.rho11 = share,
                1 => p.rho22 = share,
                _ => p.rho33 = share,
            }
        }
        return Ok(p);
    }

    let total = 1.0 + w1 + w2.unwrap_or(0.0) + w3.unwrap_or(0.0);
    let rho44 = 1.0 / total;
    Ok(Populations {
        rho11: w1 * rho44,
        rho22: w2.unwrap_or(0.0) * rho44,
        rho33: w3.unwrap_or(0.0) * rho44,
        rho44,
    })
}

/// Zeroth-order (probe-free) state of one picture: populations plus the
/// pump (rho_42), control (rho_43) and two-photon (rho_23) coherences,
/// iterated to self-consistency so that the mutual Raman coupling and the
/// coherent population transfer are both captured.
#[derive(Debug, Clone, Copy)]
struct ZerothState {
    pops: Populations,
    rho42: C64,
    rho43: C64,
}

/// With the probe off, the sector {populations, rho_42, rho_43, rho_23} is
/// closed and linear; solving it exactly (a 10x10 real system) keeps the
/// scalar response formulas accurate even at strong fields, where the
/// mutual Raman coupling and coherent population transfer (dark-state
/// physics) invalidate the bare rate balance.
fn refined_zeroth(params: &EngineParams, cf: ControlField, deph: &DephasingSet) -> Result<ZerothState> {
    use nalgebra::{DMatrix, DVector};

    let pumps = params.pump_rates();
    let opu = pump_field(params);
    let oc = cf.omega;
    let has2 = params.variant.has_pump_channel();
    let has3 = params.variant.has_control_channel();

    // unknowns: [p1, p2, p3, p4, Re ρ42, Im ρ42, Re ρ43, Im ρ43, Re ρ23, Im ρ23]
    let mut a = DMatrix::<f64>::zeros(10, 10);
    let mut rhs = DVector::<f64>::zeros(10);
    let (p1, p2, p3, p4) = (0usize, 1usize, 2usize, 3usize);
    let (a42, b43, c23) = (4usize, 6usize, 8usize);

    // channel 1 balance: R14 (p4 - p1) + Γ41 p4 = 0
    a[(0, p1)] = -pumps.r_14;
    a[(0, p4)] = pumps.r_14 + params.decays.gamma_41;

    if has2 {
        // channel 2 balance: R24 (p4 - p2) + Γ42 p4 − Ω_pu Im ρ42 = 0
        a[(1, p2)] = -pumps.r_24;
        a[(1, p4)] = pumps.r_24 + params.decays.gamma_42;
        a[(1, a42 + 1)] = -opu;
    } else {
        a[(1, p2)] = 1.0; // level decoupled: no population
    }
    if has3 {
        // channel 3 balance: R34 (p4 - p3) + Γ43 p4 − Ω_c Im ρ43 = 0
        a[(2, p3)] = -pumps.r_34;
        a[(2, p4)] = pumps.r_34 + params.decays.gamma_43;
        a[(2, b43 + 1)] = -oc;
    } else {
        a[(2, p3)] = 1.0;
    }
    // trace
    for col in 0..4 {
        a[(3, col)] = 1.0;
    }
    rhs[3] = 1.0;

    // complex equation z (x_r + i x_i) = Σ sources, written as two real rows
    let complex_rows = |row: usize, var: usize, z: C64, terms: &[(usize, C64)], a: &mut DMatrix<f64>| {
        a[(row, var)] += z.re;
        a[(row, var + 1)] += -z.im;
        a[(row + 1, var)] += z.im;
        a[(row + 1, var + 1)] += z.re;
        for &(col, w) in terms {
            // subtract w * x_col (real scalar variable) or w * complex pair
            a[(row, col)] -= w.re;
            a[(row + 1, col)] -= w.im;
        }
    };

    if has2 {
        // (γ42/2 + iΔpu) ρ42 = i(Ωpu/2)(p2 − p4) + i(Ωc/2) ρ23*
        let z = C64::new(0.5 * deph.gamma_42, params.delta_pu);
        complex_rows(4, a42, z, &[(p2, I * (0.5 * opu)), (p4, -I * (0.5 * opu))], &mut a);
        if has3 && oc > 0.0 {
            // source w·ρ23* with ρ23* = c_r − i c_i:
            // real part w.re·c_r + w.im·c_i, imag part w.im·c_r − w.re·c_i
            let w = I * (0.5 * oc);
            a[(4, c23)] -= w.re;
            a[(4, c23 + 1)] -= w.im;
            a[(5, c23)] -= w.im;
            a[(5, c23 + 1)] += w.re;
        }
    } else {
        a[(4, a42)] = 1.0;
        a[(5, a42 + 1)] = 1.0;
    }

    if has3 {
        // (γ43/2 + iΔc') ρ43 = i(Ωc/2)(p3 − p4) + i(Ωpu/2) ρ23
        let z = C64::new(0.5 * deph.gamma_43, cf.delta);
        complex_rows(
            6,
            b43,
            z,
            &[(p3, I * (0.5 * oc)), (p4, -I * (0.5 * oc))],
            &mut a,
        );
        if has2 && opu > 0.0 {
            // source w·ρ23: real w.re·c_r − w.im·c_i, imag w.im·c_r + w.re·c_i
            let w = I * (0.5 * opu);
            a[(6, c23)] -= w.re;
            a[(6, c23 + 1)] += w.im;
            a[(7, c23)] -= w.im;
            a[(7, c23 + 1)] -= w.re;
        }
    } else {
        a[(6, b43)] = 1.0;
        a[(7, b43 + 1)] = 1.0;
    }

    if has2 && has3 {
        // (γ32/2 + i(Δc' − Δpu)) ρ23 = i(Ωpu/2) ρ43 − i(Ωc/2) ρ42*
        let z = C64::new(0.5 * deph.gamma_32, cf.delta - params.delta_pu);
        complex_rows(8, c23, z, &[], &mut a);
        // source w·ρ43 (complex pair)
        let w = I * (0.5 * opu);
        a[(8, b43)] -= w.re;
        a[(8, b43 + 1)] += w.im;
        a[(9, b43)] -= w.im;
        a[(9, b43 + 1)] -= w.re;
        // source v·ρ42* (conjugated pair)
        let v = -I * (0.5 * oc);
        a[(8, a42)] -= v.re;
        a[(8, a42 + 1)] -= v.im;
        a[(9, a42)] -= v.im;
        a[(9, a42 + 1)] += v.re;
    } else {
        a[(8, c23)] = 1.0;
        a[(9, c23 + 1)] = 1.0;
    }

    // pin rows of elements decoupled from the dynamics (zero steady value)
    for row in 0..10 {
        if (0..10).all(|col| a[(row, col)] == 0.0) {
            a[(row, row)] = 1.0;
        }
    }

    let lu = a.clone().lu();
    let x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("probe-free sector system is singular".into()))?;

    Ok(ZerothState {
        pops: Populations { rho11: x[p1], rho22: x[p2], rho33: x[p3], rho44: x[p4] },
        rho42: C64::new(x[a42], x[a42 + 1]),
        rho43: C64::new(x[b43], x[b43 + 1]),
    })
}

/// DC probe coherence of one branch, split into (ground-sourced,
/// excited-sourced) parts; `G` is the shared denominator.
///
/// `rho_14 = [ i Ω_pr (ρ_44-ρ_11)/2 + Ω_pr Ω_pu ρ_42/(4 D_12)
///            + Ω_pr Ω_c' ρ_43/(4 D_13) ] / G`.
pub fn dc_coherence_split(params: &EngineParams, branch: Branch) -> Result<(C64, C64)> {
    params.validate()?;
    let deph = params.dephasing();
    let cf = ControlField::branch(params, branch);
    let z = refined_zeroth(params, cf, &deph)?;
    let (g, e) = dc_split_from_state(params, cf, &deph, &z);
    Ok((g, e))
}

fn dc_split_from_state(
    params: &EngineParams,
    cf: ControlField,
    deph: &DephasingSet,
    z: &ZerothState,
) -> (C64, C64) {
    let pieces = dc_pieces(params, cf, deph);
    let ground = dc_value(params, cf, &pieces, &z.pops.masked_ground(), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    let excited = dc_value(params, cf, &pieces, &z.pops.masked_excited(), z.rho42, z.rho43);
    (ground, excited)
}

struct DcPieces {
    g: C64,
    d12: C64,
    d13: C64,
}

fn dc_pieces(params: &EngineParams, cf: ControlField, deph: &DephasingSet) -> DcPieces {
    let opu = pump_field(params);
    let d12 = C64::new(0.5 * deph.gamma_21, -(params.delta_pr - params.delta_pu));
    let d13 = C64::new(0.5 * deph.gamma_31, -(params.delta_pr - cf.delta));
    let mut g = C64::new(0.5 * deph.gamma_41, -params.delta_pr);
    if opu > 0.0 {
        g += C64::new(0.25 * opu * opu, 0.0) / d12;
    }
    if cf.omega > 0.0 {
        g += C64::new(0.25 * cf.omega * cf.omega, 0.0) / d13;
    }
    DcPieces { g, d12, d13 }
}

fn dc_value(
    params: &EngineParams,
    cf: ControlField,
    pieces: &DcPieces,
    pops: &Populations,
    rho42: C64,
    rho43: C64,
) -> C64 {
    let opu = pump_field(params);
    let mut num = I * C64::new(0.5 * params.omega_pr * (pops.rho44 - pops.rho11), 0.0);
    if opu > 0.0 {
        num += C64::new(0.25 * params.omega_pr * opu, 0.0) * rho42 / pieces.d12;
    }
    if cf.omega > 0.0 {
        num += C64::new(0.25 * params.omega_pr * cf.omega, 0.0) * rho43 / pieces.d13;
    }
    num / pieces.g
}

/// First Fourier harmonics of the probe and control coherences (sideband
/// picture), in the paper's `±` labelling: the `+` component multiplies
/// `e^{-i ω_m t}`, the `-` component `e^{+i ω_m t}`.
#[derive(Debug, Clone, Copy)]
pub struct CoherenceHarmonics {
    /// Hybrid DC + first-harmonic probe coherence of each branch; at ε = 0
    /// this reduces to the bare DC coherence `i Ω_pr (ρ_11-ρ_44) / (2G)`-form.
    pub rho14_plus: C64,
    pub rho14_minus: C64,
    /// Control-coherence sidebands.
    pub rho43_plus: C64,
    pub rho43_minus: C64,
    /// Pure first harmonics of the probe coherence (vanish at ε = 0),
    /// split into ground/excited parts for the emission projection.
    pub harmonic_ground: [C64; 2],
    pub harmonic_excited: [C64; 2],
    /// DC split (sideband picture), used for reconstruction.
    pub dc_ground: C64,
    pub dc_excited: C64,
}

impl CoherenceHarmonics {
    /// Pure first harmonic (+, -) of the full probe coherence.
    pub fn harmonic(&self, plus: bool) -> C64 {
        let i = if plus { 0 } else { 1 };
        self.harmonic_ground[i] + self.harmonic_excited[i]
    }

    /// Pure first harmonic of the emission component.
    pub fn harmonic_em(&self, plus: bool) -> C64 {
        let i = if plus { 0 } else { 1 };
        self.harmonic_excited[i]
    }
}

/// Flattened indices (row, col) of the probe-free sector: populations plus
/// the coherences among levels 2, 3, 4. With the probe off, the Lindblad
/// generator closes on this sector.
const PROBE_FREE: [(usize, usize); 10] = [
    (0, 0),
    (1, 1),
    (2, 2),
    (3, 3),
    (1, 2),
    (2, 1),
    (1, 3),
    (3, 1),
    (2, 3),
    (3, 2),
];

/// Probe-off carrier Hamiltonian of a picture (matches the rotating-frame
/// Hamiltonian with the probe coupling removed and the picture's effective
/// control field inserted).
fn carrier_hamiltonian(params: &EngineParams, cf: ControlField) -> Matrix4<C64> {
    let zero = C64::new(0.0, 0.0);
    let mut h = Matrix4::from_element(zero);
    h[(1, 1)] = C64::new(params.delta_pr - params.delta_pu, 0.0);
    h[(2, 2)] = C64::new(params.delta_pr - cf.delta, 0.0);
    h[(3, 3)] = C64::new(params.delta_pr, 0.0);
    let opu = pump_field(params);
    if opu > 0.0 {
        h[(1, 3)] = C64::new(-0.5 * opu, 0.0);
        h[(3, 1)] = C64::new(-0.5 * opu, 0.0);
    }
    if cf.omega > 0.0 {
        h[(2, 3)] = C64::new(-0.5 * cf.omega, 0.0);
        h[(3, 2)] = C64::new(-0.5 * cf.omega, 0.0);
    }
    h
}

fn zeroth_matrix(pops: &Populations, rho42: C64, rho43: C64, rho23: C64) -> Matrix4<C64> {
    let mut m = Matrix4::from_element(C64::new(0.0, 0.0));
    m[(0, 0)] = C64::new(pops.rho11, 0.0);
    m[(1, 1)] = C64::new(pops.rho22, 0.0);
    m[(2, 2)] = C64::new(pops.rho33, 0.0);
    m[(3, 3)] = C64::new(pops.rho44, 0.0);
    m[(3, 1)] = rho42;
    m[(1, 3)] = rho42.conj();
    m[(3, 2)] = rho43;
    m[(2, 3)] = rho43.conj();
    m[(1, 2)] = rho23;
    m[(2, 1)] = rho23.conj();
    m
}

/// Internal truncation of the sector chains. The mirror perturbation is
/// O(ε) per hop, so the first harmonics carry an O(ε^(2L+1)) truncation
/// error — negligible for the small modulation depths of interest.
const CHAIN_L: usize = 3;

/// Exact probe-free steady state as a Fourier chain on the 10-element
/// sector: `(L0 + i l ω_m) ρ_l + L_V (ρ_{l−1} + ρ_{l+1}) = 0` with
/// `tr ρ_0 = 1`. Returns blocks for l = −l_max .. l_max.
fn probe_free_chain(
    params: &EngineParams,
    cf: ControlField,
    v: &Matrix4<C64>,
    l_max: usize,
) -> Result<Vec<Matrix4<C64>>> {
    use nalgebra::{DMatrix, DVector};

    let h0 = carrier_hamiltonian(params, cf);
    let channels = params.dissipators();
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);

    // restrictions of the carrier generator and the sideband commutator
    let mut l0 = [[zero; 10]; 10];
    let mut lv = [[zero; 10]; 10];
    for (col, &(j, k)) in PROBE_FREE.iter().enumerate() {
        let mut basis = Matrix4::from_element(zero);
        basis[(j, k)] = one;
        let im0 = crate::engine::apply_liouvillian(&h0, &channels, &basis);
        let imv = (v * basis - basis * v) * (-i);
        for (row, &(r, c)) in PROBE_FREE.iter().enumerate() {
            l0[row][col] = im0[(r, c)];
            lv[row][col] = imv[(r, c)];
        }
    }

    let nb = 2 * l_max + 1;
    let dim = 10 * nb;
    let mut m = DMatrix::from_element(dim, dim, zero);
    let mut rhs = DVector::from_element(dim, zero);
    for bl in 0..nb {
        let l = bl as i32 - l_max as i32;
        for row in 0..10 {
            for col in 0..10 {
                m[(10 * bl + row, 10 * bl + col)] = l0[row][col];
            }
            m[(10 * bl + row, 10 * bl + row)] += C64::new(0.0, l as f64 * params.omega_m);
            for nbl in [bl.wrapping_sub(1), bl + 1] {
                if nbl < nb {
                    for col in 0..10 {
                        m[(10 * bl + row, 10 * nbl + col)] += lv[row][col];
                    }
                }
            }
        }
    }

    // pin rows of elements decoupled from the dynamics (zero steady value)
    for row in 0..dim {
        if (0..dim).all(|c| m[(row, c)].norm() == 0.0) {
            m[(row, row)] = one;
        }
    }
    // replace the (0,0) row of the l = 0 block with the trace constraint
    let trace_row = 10 * l_max;
    for c in 0..dim {
        m[(trace_row, c)] = zero;
    }
    for pop in 0..4 {
        m[(trace_row, 10 * l_max + pop)] = one;
    }
    rhs[trace_row] = one;

    let x = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("probe-free chain system is singular".into()))?;
    let mut out = Vec::with_capacity(nb);
    for bl in 0..nb {
        let mut blk = Matrix4::from_element(zero);
        for (row, &(r, c)) in PROBE_FREE.iter().enumerate() {
            blk[(r, c)] = x[10 * bl + row];
        }
        out.push(blk);
    }
    Ok(out)
}

/// Probe-sector chain solve: unknowns (ρ12, ρ13, ρ14) at harmonics
/// l = −L .. L, sourced by the probe-free blocks. Returns (d, c, a)
/// triplets in the same block order as the input.
fn probe_sector_solve(
    params: &EngineParams,
    cf: ControlField,
    deph: &DephasingSet,
    zeroth: &[Matrix4<C64>],
) -> Result<Vec<[C64; 3]>> {
    use nalgebra::{DMatrix, DVector};

    let opu = pump_field(params);
    let oc = cf.omega;
    let eps_amp = 0.25 * oc * params.epsilon; // Ω_c ε / 4
    let with_side = params.variant.has_control_channel() && params.epsilon > 0.0 && oc > 0.0;
    let nb = zeroth.len();
    let l_max = (nb - 1) / 2;
    let zero = C64::new(0.0, 0.0);
    let mut m = DMatrix::from_element(3 * nb, 3 * nb, zero);
    let mut rhs = DVector::from_element(3 * nb, zero);

    let d12 = C64::new(0.5 * deph.gamma_21, -(params.delta_pr - params.delta_pu));
    let d13 = C64::new(0.5 * deph.gamma_31, -(params.delta_pr - cf.delta));
    let d14 = C64::new(0.5 * deph.gamma_41, -params.delta_pr);
    let half_pr = C64::new(0.5 * params.omega_pr, 0.0);

    for bi in 0..nb {
        let l = bi as i32 - l_max as i32;
        let shift = C64::new(0.0, -(l as f64) * params.omega_m);
        let (rd, rc, ra) = (3 * bi, 3 * bi + 1, 3 * bi + 2);
        let z = &zeroth[bi];

        // ρ12 row: (D12 − i l ω_m) d + i(Ω_pu/2) a = i(Ω_pr/2) ρ42,l
        m[(rd, rd)] = d12 + shift;
        m[(rd, ra)] = I * C64::new(0.5 * opu, 0.0);
        rhs[rd] = I * half_pr * z[(3, 1)];

        // ρ13 row: (D13 − i l ω_m) c + i(Ω_c/2) a + i(Ω_c ε/4)(a_{l−1}+a_{l+1})
        //          = i(Ω_pr/2) ρ43,l
        m[(rc, rc)] = d13 + shift;
        m[(rc, ra)] = I * C64::new(0.5 * oc, 0.0);
        rhs[rc] = I * half_pr * z[(3, 2)];

        // ρ14 row: (D14 − i l ω_m) a + i(Ω_pu/2) d + i(Ω_c/2) c
        //          + i(Ω_c ε/4)(c_{l−1}+c_{l+1}) = i(Ω_pr/2)(ρ44,l − ρ11,l)
        m[(ra, ra)] = d14 + shift;
        m[(ra, rd)] = I * C64::new(0.5 * opu, 0.0);
        m[(ra, rc)] = I * C64::new(0.5 * oc, 0.0);
        rhs[ra] = I * half_pr * (z[(3, 3)] - z[(0, 0)]);

        if with_side {
            for nbi in [bi.wrapping_sub(1), bi + 1] {
                if nbi < nb {
                    m[(rc, 3 * nbi + 2)] += I * C64::new(eps_amp, 0.0);
                    m[(ra, 3 * nbi + 1)] += I * C64::new(eps_amp, 0.0);
                }
            }
        }
    }

    let x = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("probe-sector system is singular".into()))?;
    let mut out = Vec::with_capacity(nb);
    for bi in 0..nb {
        out.push([x[3 * bi], x[3 * bi + 1], x[3 * bi + 2]]);
    }
    Ok(out)
}

fn mask_block(block: &Matrix4<C64>, ground: bool) -> Matrix4<C64> {
    let mut out = if ground { Matrix4::from_element(C64::new(0.0, 0.0)) } else { *block };
    if ground {
        out[(0, 0)] = block[(0, 0)];
    } else {
        out[(0, 0)] = C64::new(0.0, 0.0);
    }
    out
}

/// Coherence harmonics in the sideband picture.
///
/// The probe-free state is solved exactly as a Fourier chain on its closed
/// 10-element sector; the probe coherences then follow from the
/// adiabatic-elimination chain at each harmonic, with the ground/excited
/// source split applied per harmonic. The paper-style single-denominator
/// sideband formula is available separately as [`control_sideband_formula`].
pub fn coherence_harmonics(params: &EngineParams, opts: ClosedFormOptions) -> Result<CoherenceHarmonics> {
    params.validate()?;
    let _ = opts; // the formula switch only affects control_sideband_formula
    let deph = params.dephasing();
    let cf = ControlField::carrier(params);
    let with_side = params.variant.has_control_channel() && params.epsilon > 0.0 && cf.omega > 0.0;

    let zero = C64::new(0.0, 0.0);
    let blocks: Vec<Matrix4<C64>> = if with_side {
        let mut v = Matrix4::from_element(zero);
        v[(2, 3)] = C64::new(-0.25 * cf.omega * params.epsilon, 0.0);
        v[(3, 2)] = v[(2, 3)];
        probe_free_chain(params, cf, &v, CHAIN_L)?
    } else {
        let z = refined_zeroth(params, cf, &deph)?;
        let rho23 = zeroth_rho23(params, cf, &deph, &z);
        vec![zeroth_matrix(&z.pops, z.rho42, z.rho43, rho23)]
    };
    let l_max = (blocks.len() - 1) / 2;

    let solve = |ground: bool| -> Result<([C64; 2], C64)> {
        let masked: Vec<Matrix4<C64>> = blocks.iter().map(|b| mask_block(b, ground)).collect();
        let sector = probe_sector_solve(params, cf, &deph, &masked)?;
        let pick = |l: i32| -> C64 {
            let bi = l + l_max as i32;
            if bi < 0 || bi as usize >= sector.len() {
                zero
            } else {
                sector[bi as usize][2]
            }
        };
        Ok(([pick(1), pick(-1)], pick(0)))
    };

    let (hg, dc_g) = solve(true)?;
    let (he, dc_e) = solve(false)?;
    let pick_block = |l: i32| -> C64 {
        let bi = l + l_max as i32;
        if bi < 0 || bi as usize >= blocks.len() {
            zero
        } else {
            blocks[bi as usize][(3, 2)]
        }
    };

    Ok(CoherenceHarmonics {
        rho14_plus: dc_g + dc_e + hg[0] + he[0],
        rho14_minus: dc_g + dc_e + hg[1] + he[1],
        rho43_plus: pick_block(1),
        rho43_minus: pick_block(-1),
        harmonic_ground: hg,
        harmonic_excited: he,
        dc_ground: dc_g,
        dc_excited: dc_e,
    })
}

/// Two-photon coherence rho_23 of the zeroth state (recomputed from the
/// solved pair; needed to assemble the full density matrix).
fn zeroth_rho23(params: &EngineParams, cf: ControlField, deph: &DephasingSet, z: &ZerothState) -> C64 {
    let opu = pump_field(params);
    if opu == 0.0 && cf.omega == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let d23 = C64::new(0.5 * deph.gamma_32, cf.delta - params.delta_pu);
    (I * C64::new(0.5 * opu, 0.0) * z.rho43 - I * C64::new(0.5 * cf.omega, 0.0) * z.rho42.conj())
        / d23
}

/// Paper-style scalar formula for the control-coherence sideband rho_43,±:
/// source `i (Ω_c ε/4)(ρ_33 - ρ_44)` divided by
/// `F_l = γ_43/2 + i(Δ_c - l ω_m) + Ω_pu²/(4(γ_32/2 + i(Δ_c - Δ_pu - l ω_m)))`,
/// plus the pump cross term sourced by rho_24. The `nested_f` switch divides
/// by `F²` (scaled by `γ_43/2`) instead; the Floquet comparison adjudicates.
pub fn control_sideband_formula(params: &EngineParams, plus: bool, opts: ClosedFormOptions) -> Result<C64> {
    params.validate()?;
    let deph = params.dephasing();
    let cf = ControlField::carrier(params);
    if !params.variant.has_control_channel() || params.epsilon == 0.0 || cf.omega == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let z = refined_zeroth(params, cf, &deph)?;
    let l = if plus { 1.0 } else { -1.0 };
    let opu = pump_field(params);
    let shift = C64::new(0.0, -l * params.omega_m);
    let d43l = C64::new(0.5 * deph.gamma_43, cf.delta) + shift;
    let d23l = C64::new(0.5 * deph.gamma_32, cf.delta - params.delta_pu) + shift;
    let mut f = d43l;
    if opu > 0.0 {
        f += C64::new(0.25 * opu * opu, 0.0) / d23l;
    }
    let eps_amp = 0.25 * cf.omega * params.epsilon;
    let mut num = I * C64::new(eps_amp * (z.pops.rho33 - z.pops.rho44), 0.0);
    if opu > 0.0 {
        // chain: V sources rho_23,l from rho_24 = conj(rho_42), the pump
        // carries it into rho_43,l
        let src23 = -I * C64::new(eps_amp, 0.0) * z.rho42.conj();
        num += I * C64::new(0.5 * opu, 0.0) * src23 / d23l;
    }
    Ok(if opts.nested_f {
        num / (f * f) * C64::new(0.5 * deph.gamma_43, 0.0)
    } else {
        num / f
    })
}

/// Coherence-modulation observables of the emitted field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationResult {
    /// Amplitude of the `cos(ω_m t + α)` modulation of Im rho_14^em.
    pub amplitude: f64,
    /// Phase α, wrapped to (-π, π]; absent when the amplitude vanishes.
    pub phase: Option<f64>,
}

/// Build the modulation result from the pure emission harmonics
/// (w = rho_plus^em - conj(rho_minus^em), amplitude |w|, α = arg w + π/2).
pub fn modulation_from_harmonics(plus_em: C64, minus_em: C64) -> ModulationResult {
    let w = plus_em - minus_em.conj();
    let amplitude = w.norm();
    if amplitude == 0.0 {
        return ModulationResult { amplitude: 0.0, phase: None };
    }
    let mut alpha = w.arg() + 0.5 * std::f64::consts::PI;
    if alpha > std::f64::consts::PI {
        alpha -= 2.0 * std::f64::consts::PI;
    }
    ModulationResult { amplitude, phase: Some(alpha) }
}

/// Closed-form coherence modulation of the emitted field at one detuning.
pub fn modulation(params: &EngineParams, opts: ClosedFormOptions) -> Result<ModulationResult> {
    if !params.variant.has_control_channel() {
        return Err(Error::Unsupported {
            variant: params.variant.label().to_string(),
            what: "coherence modulation (no mirror)".to_string(),
        });
    }
    let h = coherence_harmonics(params, opts)?;
    Ok(modulation_from_harmonics(h.harmonic_em(true), h.harmonic_em(false)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EngineVariant;
    use crate::reservoir::{DecayRates, ReservoirSpec};
    use approx::assert_relative_eq;

    fn params(variant: EngineVariant) -> EngineParams {
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
    fn populations_normalized_and_composite_formula() {
        let p = params(EngineVariant::Composite);
        let pieces = response_denominators(&p, Branch::Plus);
        let pops = populations(&p, Branch::Plus).unwrap();
        assert_relative_eq!(pops.sum(), 1.0, max_relative = 1e-12);
        // determinant form of the composite populations
        let r14 = p.pump_rates().r_14;
        let (x, y) = (pieces.x, pieces.y);
        let d = 4.0 * x * y * r14
            + x * y * p.decays.gamma_41
            + y * r14 * p.decays.gamma_42
            + x * r14 * p.decays.gamma_43;
        assert_relative_eq!(pops.rho44, x * y * r14 / d, max_relative = 1e-12);
        assert_relative_eq!(pops.rho11, x * y * (p.decays.gamma_41 + r14) / d, max_relative = 1e-12);
        assert_relative_eq!(pops.rho22, y * r14 * (p.decays.gamma_42 + x) / d, max_relative = 1e-12);
        assert_relative_eq!(pops.rho33, x * r14 * (p.decays.gamma_43 + y) / d, max_relative = 1e-12);
    }

    #[test]
    fn populations_zero_field_detailed_balance() {
        let mut p = params(EngineVariant::Composite);
        p.omega_pu = 0.0;
        p.omega_c = 0.0;
        p.epsilon = 0.0;
        let pops = populations(&p, Branch::Plus).unwrap();
        let (n41, n42, n43) = p.reservoirs.occupations();
        assert_relative_eq!(pops.rho44 / pops.rho11, n41 / (1.0 + n41), max_relative = 1e-12);
        assert_relative_eq!(pops.rho44 / pops.rho22, n42 / (1.0 + n42), max_relative = 1e-12);
        assert_relative_eq!(pops.rho44 / pops.rho33, n43 / (1.0 + n43), max_relative = 1e-12);
    }

    #[test]
    fn trivial_g_without_fields() {
        let mut p = params(EngineVariant::Pump);
        p.omega_pu = 0.0;
        let pieces = response_denominators(&p, Branch::Plus);
        let deph = p.dephasing();
        assert_relative_eq!(pieces.g.re, 0.5 * deph.gamma_41, max_relative = 1e-12);
        assert_relative_eq!(pieces.g.im, 0.0);
    }

    #[test]
    fn harmonics_vanish_at_zero_epsilon() {
        let mut p = params(EngineVariant::Composite);
        p.epsilon = 0.0;
        let h = coherence_harmonics(&p, ClosedFormOptions::default()).unwrap();
        assert_eq!(h.rho43_plus, C64::new(0.0, 0.0));
        assert_eq!(h.harmonic(true), C64::new(0.0, 0.0));
        // hybrid field reduces to the DC coherence
        assert_eq!(h.rho14_plus, h.dc_ground + h.dc_excited);
        assert_eq!(h.rho14_plus, h.rho14_minus);
    }

    #[test]
    fn modulation_zero_epsilon_has_no_phase() {
        let mut p = params(EngineVariant::Composite);
        p.epsilon = 0.0;
        let m = modulation(&p, ClosedFormOptions::default()).unwrap();
        assert_eq!(m.amplitude, 0.0);
        assert!(m.phase.is_none());
    }

    #[test]
    fn modulation_unsupported_for_pump_engine() {
        let p = params(EngineVariant::Pump);
        assert!(modulation(&p, ClosedFormOptions::default()).is_err());
    }

    #[test]
    fn branch_symmetry_at_zero_detunings() {
        // at Δ_pr = Δ_c = 0 the two branches are mirror images; the DC split
        // must have equal absorption magnitudes
        let p = params(EngineVariant::Control);
        let (gp, _) = dc_coherence_split(&p, Branch::Plus).unwrap();
        let (gm, _) = dc_coherence_split(&p, Branch::Minus).unwrap();
        assert_relative_eq!(gp.im, gm.im, max_relative = 1e-9);
    }
}
