//! Time evolution of cluster states.
//!
//! [`Propagator`] is the brute-force route: a numerical Hermitian
//! eigendecomposition H = U Λ U†, then ψ(t) = U e^{−iΛt} U† ψ(0). The
//! remaining functions are closed forms for the two initial conditions the
//! preparation protocols start from; tests hold them against the propagator.

use nalgebra::{SVector, SymmetricEigen};

use crate::error::Result;
use crate::hamiltonian::{build_hamiltonian, CMatrix16, ClusterParams, HamiltonianMatrix};
use crate::hilbert::{Ket, SpinLabel, StateVector16, TwoQubitState, C64};

/// Tolerance on |C1|²+|C2|² = 1 and |C3|²+|C4|² = 1 when accepting an initial state.
pub const INIT_NORM_TOL: f64 = 1e-9;

fn cis(angle: f64) -> C64 {
    C64::from_polar(1.0, angle)
}

#[derive(Debug, Clone)]
pub struct Propagator {
    energies: SVector<f64, 16>,
    vectors: CMatrix16,
}

impl Propagator {
    pub fn new(h: &HamiltonianMatrix) -> Self {
        let eig = SymmetricEigen::new(*h.matrix());
        Propagator { energies: eig.eigenvalues, vectors: eig.eigenvectors }
    }

    pub fn energies(&self) -> &SVector<f64, 16> {
        &self.energies
    }

    pub fn eigenvectors(&self) -> &CMatrix16 {
        &self.vectors
    }

    /// e^{−iHt} ψ.
    pub fn evolve(&self, psi: &StateVector16, t: f64) -> StateVector16 {
        if t == 0.0 {
            return psi.clone();
        }
        let mut coeffs = self.vectors.ad_mul(psi.as_vector());
        for (c, e) in coeffs.iter_mut().zip(self.energies.iter()) {
            *c *= cis(-e * t);
        }
        StateVector16::from_vector(self.vectors * coeffs)
    }
}

/// e^{−iHt} ψ₀ through a fresh eigendecomposition of `h`.
pub fn evolve_oracle(h: &HamiltonianMatrix, psi0: &StateVector16, t: f64) -> StateVector16 {
    Propagator::new(h).evolve(psi0, t)
}

/// A z-basis ket of the side pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SideKet {
    pub s1: SpinLabel,
    pub s2: SpinLabel,
}

impl SideKet {
    pub const UP_UP: SideKet = SideKet { s1: SpinLabel::Up, s2: SpinLabel::Up };

    pub fn index(self) -> usize {
        2 * self.s1.bit() + self.s2.bit()
    }

    pub fn from_index(index: usize) -> Self {
        SideKet { s1: SpinLabel::from_bit(index >> 1), s2: SpinLabel::from_bit(index) }
    }

    /// m₁ + m₂ ∈ {1, 0, −1}: the multiplier of J0 in the effective dimer field.
    pub fn field_factor(self) -> f64 {
        self.s1.sz() + self.s2.sz()
    }
}

/// |s₁s₂⟩₁₂ (C1|↑⟩ + C2|↓⟩)_a (C3|↑⟩ + C4|↓⟩)_b.
#[derive(Debug, Clone, Copy)]
pub struct InitialProductState {
    pub c1: C64,
    pub c2: C64,
    pub c3: C64,
    pub c4: C64,
    pub side: SideKet,
}

impl InitialProductState {
    pub fn new(c1: C64, c2: C64, c3: C64, c4: C64, side: SideKet) -> Self {
        InitialProductState { c1, c2, c3, c4, side }
    }

    /// Both central spins in the xy plane at azimuths φ₁, φ₂, sides |↑↑⟩.
    pub fn equatorial(phi1: f64, phi2: f64) -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let c = |x: f64| C64::new(x, 0.0);
        InitialProductState::new(c(r), cis(phi1) * r, c(r), cis(phi2) * r, SideKet::UP_UP)
    }

    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        [self.c1, self.c2].as_slice().require_normalized(tol)?;
        [self.c3, self.c4].as_slice().require_normalized(tol)
    }

    pub fn central_state(&self) -> TwoQubitState {
        TwoQubitState::product(&[self.c1, self.c2], &[self.c3, self.c4])
    }

    pub fn full_state(&self) -> StateVector16 {
        StateVector16::product(&TwoQubitState::basis(self.side.index()), &self.central_state())
    }
}

/// Central-pair factor of the evolved state when the side pair sits in a
/// z eigenstate (the side phase e^{−ih(m₁+m₂)t} is dropped).
///
/// The side pair acts on the dimer as a static field J0·(m₁ + m₂).
pub fn evolve_stationary_sides(p: &ClusterParams, init: &InitialProductState, t: f64) -> Result<TwoQubitState> {
    init.check_normalized(INIT_NORM_TOL)?;
    let field = p.hp + p.j0 * init.side.field_factor();
    let (c1, c2, c3, c4) = (init.c1, init.c2, init.c3, init.c4);
    let (cos, sin) = ((p.j * t / 2.0).cos(), (p.j * t / 2.0).sin());
    let i = C64::i();
    let mid = cis(p.jz * t / 4.0);
    Ok(TwoQubitState::new(
        c1 * c3 * cis(-(p.jz / 4.0 + field) * t),
        mid * (c1 * c4 * cos - i * c2 * c3 * sin),
        mid * (c2 * c3 * cos - i * c1 * c4 * sin),
        c2 * c4 * cis(-(p.jz / 4.0 - field) * t),
    ))
}

/// All four spins along +x: ¼ Σ over every basis ket.
pub fn xplus_initial_state() -> StateVector16 {
    StateVector16::from_amplitudes([C64::new(0.25, 0.0); 16])
}

/// The evolved all-+x state written both ways:
///
/// ```text
/// ψ(t) = ½ (ξ₁|↑↑⟩₁₂ + ξ₂(|↑↓⟩₁₂ + |↓↑⟩₁₂) + ξ₃|↓↓⟩₁₂)
///      = ½ (φ₁|↑↑⟩_ab + φ₂(|↑↓⟩_ab + |↓↑⟩_ab) + φ₃|↓↓⟩_ab)
/// ```
///
/// `xi` are central-pair states, `phi` side-pair states, all normalized.
#[derive(Debug, Clone)]
pub struct DecomposedState {
    pub xi: [TwoQubitState; 3],
    pub phi: [TwoQubitState; 3],
    pub time: f64,
}

/// Maps a pair z-basis index to its conditional-state slot (|↑↓⟩ and |↓↑⟩ share one).
pub(crate) fn symmetric_class(index: usize) -> usize {
    match index {
        0 => 0,
        1 | 2 => 1,
        _ => 2,
    }
}

impl DecomposedState {
    pub fn reassemble_from_xi(&self) -> StateVector16 {
        let mut v = StateVector16::zero();
        for side in 0..4 {
            let xi = &self.xi[symmetric_class(side)];
            for central in 0..4 {
                v[(side << 2) | central] = xi[central] * 0.5;
            }
        }
        v
    }

    pub fn reassemble_from_phi(&self) -> StateVector16 {
        let mut v = StateVector16::zero();
        for central in 0..4 {
            let phi = &self.phi[symmetric_class(central)];
            for side in 0..4 {
                v[(side << 2) | central] = phi[side] * 0.5;
            }
        }
        v
    }
}

fn xi_state(p: &ClusterParams, m: f64, t: f64) -> TwoQubitState {
    let (j, jz, j0, h, hp) = (p.j, p.jz, p.j0, p.h, p.hp);
    let mid = cis(-(j / 2.0 - jz / 4.0 + h * m) * t) * 0.5;
    TwoQubitState::new(
        cis(-(jz / 4.0 + j0 * m + h * m + hp) * t) * 0.5,
        mid,
        mid,
        cis(-(jz / 4.0 - j0 * m + h * m - hp) * t) * 0.5,
    )
}

fn phi_states(p: &ClusterParams, t: f64) -> [TwoQubitState; 3] {
    let (j, jz, j0, h, hp) = (p.j, p.jz, p.j0, p.h, p.hp);
    let half = |angle: f64| cis(-angle * t) * 0.5;
    [
        TwoQubitState::new(
            half(jz / 4.0 + j0 + h + hp),
            half(jz / 4.0 + hp),
            half(jz / 4.0 + hp),
            half(jz / 4.0 - j0 - h + hp),
        ),
        TwoQubitState::new(
            half(j / 2.0 - jz / 4.0 + h),
            half(j / 2.0 - jz / 4.0),
            half(j / 2.0 - jz / 4.0),
            half(j / 2.0 - jz / 4.0 - h),
        ),
        TwoQubitState::new(
            half(jz / 4.0 - j0 + h - hp),
            half(jz / 4.0 - hp),
            half(jz / 4.0 - hp),
            half(jz / 4.0 + j0 - h - hp),
        ),
    ]
}

pub fn evolve_xplus_decomposed(p: &ClusterParams, t: f64) -> DecomposedState {
    DecomposedState {
        xi: [xi_state(p, 1.0, t), xi_state(p, 0.0, t), xi_state(p, -1.0, t)],
        phi: phi_states(p, t),
        time: t,
    }
}

/// Oracle-evolved all-+x state.
pub fn evolve_xplus_oracle(p: &ClusterParams, t: f64) -> StateVector16 {
    evolve_oracle(&build_hamiltonian(p), &xplus_initial_state(), t)
}
