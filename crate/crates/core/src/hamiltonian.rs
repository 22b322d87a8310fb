//! Cluster Hamiltonian H = H_ab + H_12 + H_int and its closed-form eigensystem.
//!
//! Spin operators are Sᵏ = σᵏ/2 (eigenvalues ±1/2), ħ = 1, energies in
//! angular-frequency units.
//!
//! ```text
//! H_ab  = J (Sa^x Sb^x + Sa^y Sb^y) + Jz Sa^z Sb^z + h' (Sa^z + Sb^z)
//! H_12  = h (S1^z + S2^z)
//! H_int = J0 (Sa^z + Sb^z)(S1^z + S2^z)
//! ```

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::SMatrix;

use crate::error::{Error, Result};
use crate::hilbert::{StateVector16, TwoQubitState, C64, ONE, ZERO};

pub type CMatrix16 = SMatrix<C64, 16, 16>;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClusterParams {
    /// XY exchange of the central pair.
    pub j: f64,
    /// z exchange of the central pair.
    pub jz: f64,
    /// Ising coupling between the central and side pairs.
    pub j0: f64,
    /// Field on the side spins.
    pub h: f64,
    /// Field on the central spins (h′).
    pub hp: f64,
}

impl ClusterParams {
    pub fn new(j: f64, jz: f64, j0: f64, h: f64, hp: f64) -> Result<Self> {
        let p = ClusterParams { j, jz, j0, h, hp };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("J", self.j), ("Jz", self.jz), ("J0", self.j0), ("h", self.h), ("hp", self.hp)] {
            if !value.is_finite() {
                return Err(Error::NonFinite { name, value });
            }
        }
        Ok(())
    }

    pub fn with_hp(self, hp: f64) -> Self {
        ClusterParams { hp, ..self }
    }

    /// Exchanges the side field h and the central field h′.
    pub fn swap_fields(self) -> Self {
        ClusterParams { h: self.hp, hp: self.h, ..self }
    }
}

#[derive(Clone, PartialEq)]
pub struct HamiltonianMatrix(CMatrix16);

impl HamiltonianMatrix {
    pub fn from_matrix(m: CMatrix16) -> Self {
        HamiltonianMatrix(m)
    }

    pub fn matrix(&self) -> &CMatrix16 {
        &self.0
    }

    pub fn apply(&self, psi: &StateVector16) -> StateVector16 {
        StateVector16::from_vector(self.0 * psi.as_vector())
    }

    /// max |H − H†| over entries.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(self.0 - self.0.adjoint()))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// ⟨ψ|H|ψ⟩ (real part; H is Hermitian).
    pub fn expectation(&self, psi: &StateVector16) -> f64 {
        psi.as_vector().dotc(&(self.0 * psi.as_vector())).re
    }

    /// Eigenvalues from a numerical Hermitian solver, ascending.
    pub fn numeric_energies(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.0.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }
}

impl std::fmt::Debug for HamiltonianMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "HamiltonianMatrix({:?})", self.0)
    }
}

/// The three mutually commuting summands.
#[derive(Debug, Clone)]
pub struct HamiltonianTerms {
    pub dimer: HamiltonianMatrix,
    pub sides: HamiltonianMatrix,
    pub interaction: HamiltonianMatrix,
}

impl HamiltonianTerms {
    pub fn total(&self) -> HamiltonianMatrix {
        HamiltonianMatrix(self.dimer.0 + self.sides.0 + self.interaction.0)
    }
}

// Site bit positions inside a basis index, ordering (S1, S2, Sa, Sb).
const BIT_1: usize = 3;
const BIT_2: usize = 2;
const BIT_A: usize = 1;
const BIT_B: usize = 0;

fn sz(index: usize, bit: usize) -> f64 {
    if (index >> bit) & 1 == 0 {
        0.5
    } else {
        -0.5
    }
}

fn diagonal(f: impl Fn(usize) -> f64) -> CMatrix16 {
    CMatrix16::from_fn(|r, c| if r == c { C64::new(f(r), 0.0) } else { ZERO })
}

pub fn hamiltonian_terms(p: &ClusterParams) -> HamiltonianTerms {
    let mut dimer = diagonal(|i| {
        let (a, b) = (sz(i, BIT_A), sz(i, BIT_B));
        p.jz * a * b + p.hp * (a + b)
    });
    // J(SxSx + SySy) = (J/2)(S+S- + S-S+): swaps anti-aligned central spins.
    for i in 0..16 {
        if sz(i, BIT_A) != sz(i, BIT_B) {
            let flipped = i ^ ((1 << BIT_A) | (1 << BIT_B));
            dimer[(flipped, i)] += C64::new(p.j / 2.0, 0.0);
        }
    }
    let sides = diagonal(|i| p.h * (sz(i, BIT_1) + sz(i, BIT_2)));
    let interaction = diagonal(|i| p.j0 * (sz(i, BIT_A) + sz(i, BIT_B)) * (sz(i, BIT_1) + sz(i, BIT_2)));
    HamiltonianTerms {
        dimer: HamiltonianMatrix(dimer),
        sides: HamiltonianMatrix(sides),
        interaction: HamiltonianMatrix(interaction),
    }
}

pub fn build_hamiltonian(p: &ClusterParams) -> HamiltonianMatrix {
    hamiltonian_terms(p).total()
}

fn max_abs(m: &CMatrix16) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn commutator_norm(a: &CMatrix16, b: &CMatrix16) -> f64 {
    max_abs(&(a * b - b * a))
}

/// Max-norms of [H_ab, H_12], [H_ab, H_int], [H_12, H_int].
pub fn commutator_norms(p: &ClusterParams) -> [f64; 3] {
    let t = hamiltonian_terms(p);
    [
        commutator_norm(&t.dimer.0, &t.sides.0),
        commutator_norm(&t.dimer.0, &t.interaction.0),
        commutator_norm(&t.sides.0, &t.interaction.0),
    ]
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub energy: f64,
    pub state: StateVector16,
}

impl EigenPair {
    /// ‖Hψ − Eψ‖₂.
    pub fn residual(&self, h: &HamiltonianMatrix) -> f64 {
        let hpsi = h.apply(&self.state);
        (hpsi.as_vector() - self.state.as_vector() * C64::new(self.energy, 0.0)).norm()
    }
}

/// Central-pair eigenkets in the order |↑↑⟩, triplet, singlet, |↓↓⟩.
pub fn dimer_eigenkets() -> [TwoQubitState; 4] {
    let r = C64::new(FRAC_1_SQRT_2, 0.0);
    [
        TwoQubitState::new(ONE, ZERO, ZERO, ZERO),
        TwoQubitState::new(ZERO, r, r, ZERO),
        TwoQubitState::new(ZERO, r, -r, ZERO),
        TwoQubitState::new(ZERO, ZERO, ZERO, ONE),
    ]
}

/// Sum of the two side-spin Sᶻ eigenvalues for side ket `index` (|↑↑⟩ = 0 … |↓↓⟩ = 3).
pub(crate) fn side_magnetization(index: usize) -> f64 {
    match index {
        0 => 1.0,
        3 => -1.0,
        _ => 0.0,
    }
}

/// Energies of the dimer eigenkets (see [`dimer_eigenkets`]) when the side
/// pair has total magnetization `m`; the side Zeeman term h·m is included.
pub(crate) fn block_energies(p: &ClusterParams, m: f64) -> [f64; 4] {
    let side = p.h * m;
    [
        side + p.jz / 4.0 + p.hp + p.j0 * m,
        side + p.j / 2.0 - p.jz / 4.0,
        side - p.j / 2.0 - p.jz / 4.0,
        side + p.jz / 4.0 - p.hp - p.j0 * m,
    ]
}

/// The sixteen closed-form eigenpairs ψ₁…ψ₁₆, side ket outermost
/// (|↑↑⟩₁₂, |↑↓⟩₁₂, |↓↑⟩₁₂, |↓↓⟩₁₂) and dimer eigenket innermost.
pub fn analytic_eigensystem(p: &ClusterParams) -> Vec<EigenPair> {
    let dimer = dimer_eigenkets();
    let mut pairs = Vec::with_capacity(16);
    for side in 0..4 {
        let energies = block_energies(p, side_magnetization(side));
        let side_ket = TwoQubitState::basis(side);
        for (ket, energy) in dimer.iter().zip(energies) {
            pairs.push(EigenPair { energy, state: StateVector16::product(&side_ket, ket) });
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{basis_index, Ket, SpinLabel::*};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Independent construction from Pauli matrices and Kronecker products.
    mod pauli {
        use super::*;
        use nalgebra::{DMatrix, Matrix2};

        pub fn sx() -> Matrix2<C64> {
            Matrix2::new(ZERO, ONE, ONE, ZERO) * C64::new(0.5, 0.0)
        }
        pub fn sy() -> Matrix2<C64> {
            Matrix2::new(ZERO, -C64::i(), C64::i(), ZERO) * C64::new(0.5, 0.0)
        }
        pub fn sz() -> Matrix2<C64> {
            Matrix2::new(ONE, ZERO, ZERO, -ONE) * C64::new(0.5, 0.0)
        }

        /// Operator `op` on site `site` (0 = S1 … 3 = Sb) of the four-spin space.
        pub fn site(op: Matrix2<C64>, site: usize) -> DMatrix<C64> {
            let mut acc = DMatrix::<C64>::identity(1, 1);
            for k in 0..4 {
                let factor = if k == site { op } else { Matrix2::identity() };
                let f = DMatrix::from_iterator(2, 2, factor.iter().copied());
                acc = acc.kronecker(&f);
            }
            acc
        }

        pub fn hamiltonian(p: &ClusterParams) -> DMatrix<C64> {
            let c = |x: f64| C64::new(x, 0.0);
            let (s1, s2, a, b) = (0, 1, 2, 3);
            let xy = site(sx(), a) * site(sx(), b) + site(sy(), a) * site(sy(), b);
            let zz = site(sz(), a) * site(sz(), b);
            let mab = site(sz(), a) + site(sz(), b);
            let m12 = site(sz(), s1) + site(sz(), s2);
            xy * c(p.j) + zz * c(p.jz) + &mab * c(p.hp) + &m12 * c(p.h) + (&mab * &m12) * c(p.j0)
        }
    }

    fn random_params(rng: &mut ChaCha8Rng) -> ClusterParams {
        let mut draw = || rng.random_range(-10.0..10.0);
        ClusterParams { j: draw(), jz: draw(), j0: draw(), h: draw(), hp: draw() }
    }

    #[test]
    fn zero_params_give_zero_matrix() {
        let h = build_hamiltonian(&ClusterParams::default());
        assert_eq!(max_abs(h.matrix()), 0.0);
        assert_eq!(commutator_norms(&ClusterParams::default()), [0.0; 3]);
        assert!(analytic_eigensystem(&ClusterParams::default()).iter().all(|e| e.energy == 0.0));
    }

    #[test]
    fn all_up_diagonal_entry() {
        let p = ClusterParams::new(1.3, -0.7, 2.1, 0.4, -1.9).unwrap();
        let h = build_hamiltonian(&p);
        let i = basis_index(Up, Up, Up, Up).value();
        let expected = p.h + p.jz / 4.0 + p.hp + p.j0;
        assert!((h.matrix()[(i, i)].re - expected).abs() < 1e-15);
    }

    #[test]
    fn flip_term_is_half_j() {
        let p = ClusterParams::new(1.7, 0.0, 0.0, 0.0, 0.0).unwrap();
        let h = build_hamiltonian(&p);
        let r = basis_index(Up, Up, Up, Down).value();
        let c = basis_index(Up, Up, Down, Up).value();
        let oracle = pauli::hamiltonian(&p);
        assert_eq!(oracle[(r, c)], C64::new(p.j / 2.0, 0.0));
        assert_eq!(h.matrix()[(r, c)], oracle[(r, c)]);
    }

    #[test]
    fn matches_pauli_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p = random_params(&mut rng);
            let h = build_hamiltonian(&p);
            let oracle = pauli::hamiltonian(&p);
            for r in 0..16 {
                for c in 0..16 {
                    assert!((h.matrix()[(r, c)] - oracle[(r, c)]).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn hermitian_real_traceless() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let h = build_hamiltonian(&random_params(&mut rng));
            assert!(h.hermiticity_defect() < 1e-14);
            assert!(h.matrix().iter().all(|z| z.im == 0.0));
            assert!(h.trace().norm() < 1e-12);
        }
    }

    #[test]
    fn listed_energies() {
        let p = ClusterParams::new(0.9, 2.3, -1.1, 0.6, 0.35).unwrap();
        let pairs = analytic_eigensystem(&p);
        assert_eq!(pairs.len(), 16);
        assert!((pairs[1].energy - (p.h + p.j / 2.0 - p.jz / 4.0)).abs() < 1e-15);
        assert!((pairs[6].energy - (-p.j / 2.0 - p.jz / 4.0)).abs() < 1e-15);
        assert!((pairs[12].energy - (-p.h + p.jz / 4.0 + p.hp - p.j0)).abs() < 1e-15);
        assert!((pairs[15].energy - (-p.h + p.jz / 4.0 - p.hp + p.j0)).abs() < 1e-15);
        assert_eq!(pairs[4].energy, pairs[8].energy);
        let r = FRAC_1_SQRT_2;
        let psi2 = &pairs[1].state;
        assert!((psi2[basis_index(Up, Up, Up, Down).value()].re - r).abs() < 1e-15);
        assert!((psi2[basis_index(Up, Up, Down, Up).value()].re - r).abs() < 1e-15);
    }

    #[test]
    fn eigen_residuals_and_commutators() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let p = random_params(&mut rng);
            let h = build_hamiltonian(&p);
            for pair in analytic_eigensystem(&p) {
                assert!(pair.residual(&h) < 1e-12);
                assert!(pair.state.is_normalized(1e-14));
            }
            assert!(commutator_norms(&p).iter().all(|&n| n < 1e-13));
        }
    }

    #[test]
    fn spectrum_matches_numeric_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..100 {
            let p = random_params(&mut rng);
            let mut analytic: Vec<f64> = analytic_eigensystem(&p).iter().map(|e| e.energy).collect();
            analytic.sort_by(f64::total_cmp);
            let numeric = build_hamiltonian(&p).numeric_energies();
            for (a, n) in analytic.iter().zip(&numeric) {
                assert!((a - n).abs() < 1e-10, "{a} vs {n}");
            }
        }
    }

    #[test]
    fn swap_fields_exchanges_h_and_hp() {
        let p = ClusterParams::new(1.0, 2.0, 3.0, 4.0, 5.0).unwrap().swap_fields();
        assert_eq!((p.h, p.hp), (5.0, 4.0));
        assert!(ClusterParams::new(f64::NAN, 0.0, 0.0, 0.0, 0.0).is_err());
    }
}
