//! First-order probe response with the absorption/emission split.
//!
//! With the probe off, the steady state `rho0` contains populations and the
//! pump/control coherences but nothing in the level-1 coherence sector
//! {rho_12, rho_13, rho_14}. Switching the probe on drives exactly that
//! sector at first order in Ω_pr, and the sector obeys a *linear* system
//! whose sources are linear in the elements of `rho0`.
//!
//! Because every source element traces back to either the ground population
//! rho_11 (the absorption pathway) or to the excited-manifold populations
//! rho_22, rho_33, rho_44 (which also generate the pump/control coherences —
//! the Raman emission pathways), the probe coherence splits exactly into
//!
//! ```text
//! rho_14 = rho_14[rho_11 only] + rho_14[rho_22, rho_33, rho_44 only]
//! ```
//!
//! The absorption coefficient is built from the first piece, the emission
//! coefficient from the second; their line shapes share every pole of the
//! full response by construction.
//!
//! Two pictures of the mirror are supported:
//!
//! * [`ResponsePicture::Sideband`]: the faithful time-periodic model; the
//!   sector acquires Fourier harmonics and yields the coherence-modulation
//!   observables.
//! * [`ResponsePicture::BranchDc`]: the Doppler-branch model in which the
//!   control runs at full strength `Ω_c (1 + ε/2)`, detuned by `∓ω_m`; this
//!   is the picture behind the closed-form response and the DC spectra.

use nalgebra::{DMatrix, DVector, Matrix4};

use crate::engine::{
    liouvillian_matrix, commutator_matrix, rho_index, Branch, EngineParams, EngineVariant, C64,
};
use crate::error::{Error, Result};
use crate::floquet::{solve_floquet, FloquetSystem, HarmonicState};

/// Which mirror picture the response is evaluated in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResponsePicture {
    /// Time-periodic sideband drive, harmonics up to `l_max`.
    Sideband { l_max: usize },
    /// Static Doppler branch (`Δ_c ∓ ω_m`, amplitude `Ω_c (1 + ε/2)`).
    BranchDc(Branch),
}

/// Probe-coherence harmonics split into ground- and excited-sourced parts.
#[derive(Debug, Clone)]
pub struct SplitCoherence {
    l_max: usize,
    /// rho_14 harmonics sourced by rho_11 alone (absorption pathway).
    from_ground: Vec<C64>,
    /// rho_14 harmonics sourced by rho_22, rho_33, rho_44 (emission pathways).
    from_excited: Vec<C64>,
}

impl SplitCoherence {
    pub fn l_max(&self) -> usize {
        self.l_max
    }

    fn pick(v: &[C64], l_max: usize, l: i32) -> C64 {
        let lm = l_max as i32;
        if l < -lm || l > lm {
            C64::new(0.0, 0.0)
        } else {
            v[(l + lm) as usize]
        }
    }

    /// Ground-sourced (absorption-pathway) harmonic of rho_14.
    pub fn ground(&self, l: i32) -> C64 {
        Self::pick(&self.from_ground, self.l_max, l)
    }

    /// Excited-sourced (emission-pathway) harmonic of rho_14.
    pub fn excited(&self, l: i32) -> C64 {
        Self::pick(&self.from_excited, self.l_max, l)
    }

    /// Full first-order probe coherence harmonic.
    pub fn total(&self, l: i32) -> C64 {
        self.ground(l) + self.excited(l)
    }

    /// Absorption coefficient (positive in the absorptive regime).
    pub fn sigma_abs(&self) -> f64 {
        -self.ground(0).im
    }

    /// Emission coefficient (positive in the absorptive regime).
    pub fn sigma_em(&self) -> f64 {
        self.excited(0).im
    }
}

/// Mask selecting which zeroth-order elements source the response.
#[derive(Clone, Copy)]
enum SourceMask {
    GroundOnly,
    ExcitedOnly,
}

fn masked_element(mask: SourceMask, state: &HarmonicState, l: i32, flat: usize) -> C64 {
    let keep = match mask {
        SourceMask::GroundOnly => flat == rho_index(0, 0),
        SourceMask::ExcitedOnly => flat != rho_index(0, 0),
    };
    if !keep {
        return C64::new(0.0, 0.0);
    }
    let (j, k) = (flat / 4, flat % 4);
    state.harmonic(l)[(j, k)]
}

/// Solve the first-order probe-sector response of `params`.
pub fn split_probe_response(params: &EngineParams, picture: ResponsePicture) -> Result<SplitCoherence> {
    params.validate()?;
    if params.omega_pr < 0.0 {
        return Err(Error::InvalidParameter("omega_pr must be >= 0".into()));
    }

    let (h_dc, v_side, l_max, omega_m) = match picture {
        ResponsePicture::Sideband { l_max } => {
            let v = if params.variant.has_control_channel() && params.epsilon > 0.0 {
                Some(params.hamiltonian_sideband()?)
            } else {
                None
            };
            let lm = if v.is_some() { l_max } else { 0 };
            (params.hamiltonian_dc(), v, lm, params.omega_m)
        }
        ResponsePicture::BranchDc(branch) => {
            (branch_hamiltonian(params, branch), None, 0, params.omega_m)
        }
    };

    let channels = params.dissipators();
    let mut h0 = h_dc;
    // probe coupling removed for the zeroth-order state
    h0[(0, 3)] = C64::new(0.0, 0.0);
    h0[(3, 0)] = C64::new(0.0, 0.0);
    let sys0 = FloquetSystem::new(&h0, v_side.as_ref(), &channels, omega_m);
    let rho0 = solve_floquet(&sys0, l_max)?;

    // Full-generator matrices (probe included) for the sector rows.
    let l0 = liouvillian_matrix(&h_dc, &channels);
    let l_side = v_side.as_ref().map(commutator_matrix);

    // Sector: flattened indices of rho_12, rho_13, rho_14.
    let sector: [usize; 3] = [rho_index(0, 1), rho_index(0, 2), rho_index(0, 3)];
    let in_sector = |c: usize| sector.iter().position(|&s| s == c);

    let nb = 2 * l_max + 1;
    let dim = 3 * nb;
    let zero = C64::new(0.0, 0.0);
    let mut a = DMatrix::from_element(dim, dim, zero);
    let mut rhs_ground = DVector::from_element(dim, zero);
    let mut rhs_excited = DVector::from_element(dim, zero);

    for bl in 0..nb {
        let l = bl as i32 - l_max as i32;
        for (si, &srow) in sector.iter().enumerate() {
            let row = 3 * bl + si;
            for c in 0..16 {
                match in_sector(c) {
                    Some(sj) => {
                        a[(row, 3 * bl + sj)] += l0[(srow, c)];
                        if srow == c {
                            a[(row, 3 * bl + sj)] += C64::new(0.0, l as f64 * omega_m);
                        }
                    }
                    None => {
                        let g = masked_element(SourceMask::GroundOnly, &rho0, l, c);
                        let e = masked_element(SourceMask::ExcitedOnly, &rho0, l, c);
                        rhs_ground[row] -= l0[(srow, c)] * g;
                        rhs_excited[row] -= l0[(srow, c)] * e;
                    }
                }
            }
            if let Some(ls) = &l_side {
                for (ln, blo) in [(l - 1, -1i32), (l + 1, 1i32)] {
                    if ln < -(l_max as i32) || ln > l_max as i32 {
                        // sideband source from outside the truncation is zero
                    }
                    for c in 0..16 {
                        match in_sector(c) {
                            Some(sj) => {
                                let nbl = bl as i32 + blo;
                                if nbl >= 0 && (nbl as usize) < nb {
                                    a[(row, 3 * nbl as usize + sj)] += ls[(srow, c)];
                                }
                            }
                            None => {
                                let g = masked_element(SourceMask::GroundOnly, &rho0, ln, c);
                                let e = masked_element(SourceMask::ExcitedOnly, &rho0, ln, c);
                                rhs_ground[row] -= ls[(srow, c)] * g;
                                rhs_excited[row] -= ls[(srow, c)] * e;
                            }
                        }
                    }
                }
            }
        }
    }

    let lu = a.lu();
    let xg = lu
        .solve(&rhs_ground)
        .ok_or_else(|| Error::Numerical("probe-sector system is singular".into()))?;
    let xe = lu
        .solve(&rhs_excited)
        .ok_or_else(|| Error::Numerical("probe-sector system is singular".into()))?;

    // rho_14 is the third sector element.
    let mut from_ground = Vec::with_capacity(nb);
    let mut from_excited = Vec::with_capacity(nb);
    for bl in 0..nb {
        from_ground.push(xg[3 * bl + 2]);
        from_excited.push(xe[3 * bl + 2]);
    }
    Ok(SplitCoherence { l_max, from_ground, from_excited })
}

/// Branch-picture Hamiltonian: control at `Δ_c ∓ ω_m` with the carrier and
/// the co-moving sideband lumped into an effective amplitude `Ω_c (1+ε/2)`.
pub fn branch_hamiltonian(params: &EngineParams, branch: Branch) -> Matrix4<C64> {
    let mut p = params.clone();
    if p.variant.has_control_channel() {
        p.omega_c *= 1.0 + 0.5 * p.epsilon;
    }
    p.hamiltonian_dc_branch(branch)
}

/// Convenience: zeroth-order (probe-off) steady state in a given picture.
pub fn zeroth_state(params: &EngineParams, picture: ResponsePicture) -> Result<HarmonicState> {
    let mut zeroth = params.clone();
    zeroth.omega_pr = 0.0;
    match picture {
        ResponsePicture::Sideband { l_max } => {
            let sys = FloquetSystem::from_params(&zeroth)?;
            solve_floquet(&sys, l_max)
        }
        ResponsePicture::BranchDc(branch) => {
            let h = branch_hamiltonian(&zeroth, branch);
            let mut h0 = h;
            h0[(0, 3)] = C64::new(0.0, 0.0);
            h0[(3, 0)] = C64::new(0.0, 0.0);
            let sys = FloquetSystem::new(&h0, None, &zeroth.dissipators(), zeroth.omega_m);
            solve_floquet(&sys, 0)
        }
    }
}

/// Variants without the mirror have a single trivial "branch"; this helper
/// returns the branches that actually need evaluating.
pub fn active_branches(variant: EngineVariant) -> &'static [Branch] {
    if variant.has_control_channel() {
        &Branch::BOTH
    } else {
        &[Branch::Plus]
    }
}
