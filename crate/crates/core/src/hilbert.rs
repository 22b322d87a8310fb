//! Basis conventions and state containers.
//!
//! The cluster space is the tensor product of four spin-1/2 sites in the
//! fixed order (S1, S2, Sa, Sb): the two side spins first, then the two
//! central spins. A basis index packs the four spins as
//!
//! ```text
//! index = 8*b(S1) + 4*b(S2) + 2*b(Sa) + b(Sb),   b(Up) = 0, b(Down) = 1
//! ```
//!
//! so `index >> 2` is the side-pair index and `index & 3` the central-pair
//! index, each in the order |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩ used by [`TwoQubitState`].

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::SVector;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Amplitudes of a single spin in the (|↑⟩, |↓⟩) basis.
pub type Qubit = [C64; 2];

/// Tolerance used for the normalization invariant of stored states.
pub const NORM_TOL: f64 = 1e-12;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinLabel {
    Up,
    Down,
}

impl SpinLabel {
    pub fn bit(self) -> usize {
        match self {
            SpinLabel::Up => 0,
            SpinLabel::Down => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            SpinLabel::Up
        } else {
            SpinLabel::Down
        }
    }

    /// Sᶻ eigenvalue, ±1/2.
    pub fn sz(self) -> f64 {
        match self {
            SpinLabel::Up => 0.5,
            SpinLabel::Down => -0.5,
        }
    }
}

/// Which spin pair of the cluster an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pair {
    /// S1, S2 (Ising-coupled outer spins).
    Sides,
    /// Sa, Sb (Heisenberg dimer).
    Centrals,
}

impl Pair {
    pub fn other(self) -> Pair {
        match self {
            Pair::Sides => Pair::Centrals,
            Pair::Centrals => Pair::Sides,
        }
    }

    /// Full basis index from the pair indices of this pair and of the other one.
    pub fn join(self, own: usize, other: usize) -> usize {
        match self {
            Pair::Sides => (own << 2) | other,
            Pair::Centrals => (other << 2) | own,
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pair::Sides => f.write_str("sides"),
            Pair::Centrals => f.write_str("centrals"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex(u8);

impl BasisIndex {
    pub fn new(index: usize) -> Option<Self> {
        (index < 16).then_some(BasisIndex(index as u8))
    }

    pub fn value(self) -> usize {
        self.0 as usize
    }

    /// Decodes back to (S1, S2, Sa, Sb).
    pub fn spins(self) -> [SpinLabel; 4] {
        let i = self.value();
        [SpinLabel::from_bit(i >> 3), SpinLabel::from_bit(i >> 2), SpinLabel::from_bit(i >> 1), SpinLabel::from_bit(i)]
    }

    pub fn side_pair(self) -> usize {
        self.value() >> 2
    }

    pub fn central_pair(self) -> usize {
        self.value() & 3
    }

    pub fn all() -> impl Iterator<Item = BasisIndex> {
        (0..16u8).map(BasisIndex)
    }
}

pub fn basis_index(s1: SpinLabel, s2: SpinLabel, sa: SpinLabel, sb: SpinLabel) -> BasisIndex {
    BasisIndex((8 * s1.bit() + 4 * s2.bit() + 2 * sa.bit() + sb.bit()) as u8)
}

/// Anything that exposes a flat amplitude slice.
pub trait Ket {
    fn amplitudes(&self) -> &[C64];

    fn dim(&self) -> usize {
        self.amplitudes().len()
    }

    fn norm(&self) -> f64 {
        self.amplitudes().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    fn require_normalized(&self, tol: f64) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() <= tol {
            Ok(())
        } else {
            Err(Error::NotNormalized { norm })
        }
    }
}

impl Ket for [C64] {
    fn amplitudes(&self) -> &[C64] {
        self
    }
}

/// ⟨u|v⟩ over raw slices; caller guarantees equal length.
pub(crate) fn braket(u: &[C64], v: &[C64]) -> C64 {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Smallest 2-norm distance between `u` and `e^{iα} v` over all phases α.
///
/// Equal to `√(2 − 2|⟨u|v⟩|)` for normalized inputs, but evaluated as an
/// explicit difference after phase alignment so that distances far below
/// `1e-8` stay resolvable.
pub fn phase_distance<K: Ket + ?Sized>(u: &K, v: &K) -> f64 {
    let (u, v) = (u.amplitudes(), v.amplitudes());
    assert_eq!(u.len(), v.len(), "phase_distance on kets of different dimension");
    let overlap = braket(v, u);
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
    u.iter().zip(v).map(|(a, b)| (a - phase * b).norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Clone, PartialEq)]
pub struct StateVector16(SVector<C64, 16>);

impl StateVector16 {
    pub fn zero() -> Self {
        StateVector16(SVector::zeros())
    }

    pub fn basis(index: BasisIndex) -> Self {
        let mut v = Self::zero();
        v.0[index.value()] = ONE;
        v
    }

    pub fn from_amplitudes(amps: [C64; 16]) -> Self {
        StateVector16(SVector::from(amps))
    }

    pub fn from_vector(v: SVector<C64, 16>) -> Self {
        StateVector16(v)
    }

    pub fn as_vector(&self) -> &SVector<C64, 16> {
        &self.0
    }

    pub fn into_vector(self) -> SVector<C64, 16> {
        self.0
    }

    /// |side⟩₁₂ ⊗ |central⟩_ab.
    pub fn product(side: &TwoQubitState, central: &TwoQubitState) -> Self {
        let mut v = Self::zero();
        for s in 0..4 {
            for c in 0..4 {
                v.0[(s << 2) | c] = side.0[s] * central.0[c];
            }
        }
        v
    }

    /// Explicit renormalization; fails on the zero vector.
    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(StateVector16(self.0.unscale(n)))
    }

    pub fn scale(&self, z: C64) -> Self {
        StateVector16(self.0 * z)
    }

    /// Contracts ⟨bra| on `pair`; returns the unnormalized amplitudes of the
    /// other pair.
    pub fn contract_pair(&self, pair: Pair, bra: &TwoQubitState) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for (rest, slot) in out.iter_mut().enumerate() {
            *slot = (0..4).map(|own| bra.0[own].conj() * self.0[pair.join(own, rest)]).sum();
        }
        out
    }

    /// Amplitudes of the other pair with `pair` fixed to the z-basis ket `fixed`.
    pub fn pair_slice(&self, pair: Pair, fixed: usize) -> [C64; 4] {
        std::array::from_fn(|rest| self.0[pair.join(fixed, rest)])
    }
}

impl Ket for StateVector16 {
    fn amplitudes(&self) -> &[C64] {
        self.0.as_slice()
    }
}

impl Index<usize> for StateVector16 {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for StateVector16 {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl fmt::Debug for StateVector16 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// ⟨u|v⟩, conjugate-linear in `u`.
pub fn inner(u: &StateVector16, v: &StateVector16) -> C64 {
    u.0.dotc(&v.0)
}

/// Pure state of one spin pair: a|↑↑⟩ + b|↑↓⟩ + c|↓↑⟩ + d|↓↓⟩.
#[derive(Clone, Copy, PartialEq)]
pub struct TwoQubitState([C64; 4]);

impl TwoQubitState {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        TwoQubitState([a, b, c, d])
    }

    pub fn from_array(amps: [C64; 4]) -> Self {
        TwoQubitState(amps)
    }

    pub fn basis(index: usize) -> Self {
        let mut amps = [ZERO; 4];
        amps[index] = ONE;
        TwoQubitState(amps)
    }

    pub fn product(first: &Qubit, second: &Qubit) -> Self {
        TwoQubitState([first[0] * second[0], first[0] * second[1], first[1] * second[0], first[1] * second[1]])
    }

    pub fn a(&self) -> C64 {
        self.0[0]
    }
    pub fn b(&self) -> C64 {
        self.0[1]
    }
    pub fn c(&self) -> C64 {
        self.0[2]
    }
    pub fn d(&self) -> C64 {
        self.0[3]
    }

    pub fn to_array(self) -> [C64; 4] {
        self.0
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(TwoQubitState(self.0.map(|z| z / n)))
    }

    pub fn scale(&self, z: C64) -> Self {
        TwoQubitState(self.0.map(|w| w * z))
    }

    pub fn inner(&self, other: &TwoQubitState) -> C64 {
        braket(&self.0, &other.0)
    }
}

impl Ket for TwoQubitState {
    fn amplitudes(&self) -> &[C64] {
        &self.0
    }
}

impl Index<usize> for TwoQubitState {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl fmt::Debug for TwoQubitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;
    use SpinLabel::{Down, Up};

    fn e(i: usize) -> StateVector16 {
        StateVector16::basis(BasisIndex::new(i).unwrap())
    }

    #[test]
    fn basis_index_layout() {
        assert_eq!(basis_index(Up, Up, Up, Up).value(), 0);
        assert_eq!(basis_index(Down, Down, Down, Down).value(), 15);
        assert_eq!(basis_index(Up, Up, Up, Down).value(), 1);
        assert_eq!(basis_index(Down, Up, Up, Up).value(), 8);
        assert_eq!(basis_index(Up, Up, Down, Up).central_pair(), 2);
        assert_eq!(basis_index(Up, Down, Down, Up).side_pair(), 1);
    }

    #[test]
    fn basis_index_round_trip() {
        for idx in BasisIndex::all() {
            let [s1, s2, sa, sb] = idx.spins();
            assert_eq!(basis_index(s1, s2, sa, sb), idx);
        }
        assert!(BasisIndex::new(16).is_none());
    }

    #[test]
    fn inner_examples() {
        assert_eq!(inner(&e(0), &e(0)), ONE);
        assert_eq!(inner(&e(0), &e(1)), ZERO);
        let mut plus = StateVector16::zero();
        plus[0] = C64::new(FRAC_1_SQRT_2, 0.0);
        plus[1] = C64::new(FRAC_1_SQRT_2, 0.0);
        assert!((inner(&plus, &e(0)) - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn phase_distance_examples() {
        let v = e(3);
        assert_eq!(phase_distance(&v, &v), 0.0);
        assert_eq!(phase_distance(&v, &v.scale(-ONE)), 0.0);
        assert!((phase_distance(&e(0), &e(1)) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn phase_distance_resolves_tiny_differences() {
        let u = TwoQubitState::new(ONE, ZERO, ZERO, ZERO);
        let eps: f64 = 1e-11;
        let v = TwoQubitState::new(C64::new((1.0 - eps * eps).sqrt(), 0.0), C64::new(eps, 0.0), ZERO, ZERO);
        let d = phase_distance(&u, &v);
        assert!((d - eps).abs() < 1e-14, "{d}");
    }

    #[test]
    fn product_and_slices() {
        let side = TwoQubitState::basis(2);
        let central = TwoQubitState::new(ONE, ZERO, ZERO, C64::i()).scale(C64::new(FRAC_1_SQRT_2, 0.0));
        let v = StateVector16::product(&side, &central);
        assert!(v.is_normalized(NORM_TOL));
        assert_eq!(v.pair_slice(Pair::Sides, 2), central.to_array());
        let contracted = v.contract_pair(Pair::Centrals, &central);
        assert!((contracted[2] - ONE).norm() < 1e-15);
    }

    #[test]
    fn normalization_is_explicit() {
        let v = e(5).scale(C64::new(2.0, 0.0));
        assert!(v.require_normalized(1e-9).is_err());
        assert!(v.normalize().unwrap().is_normalized(NORM_TOL));
        assert!(matches!(StateVector16::zero().normalize(), Err(Error::ZeroVector)));
    }

    fn arb_state() -> impl Strategy<Value = StateVector16> {
        proptest::collection::vec(-1.0f64..1.0, 32).prop_filter_map("zero vector", |xs| {
            let amps: [C64; 16] = std::array::from_fn(|i| C64::new(xs[2 * i], xs[2 * i + 1]));
            StateVector16::from_amplitudes(amps).normalize().ok()
        })
    }

    proptest! {
        #[test]
        fn inner_is_conjugate_symmetric(u in arb_state(), v in arb_state()) {
            prop_assert!((inner(&u, &v) - inner(&v, &u).conj()).norm() < 1e-14);
            prop_assert!(inner(&u, &u).im.abs() < 1e-15);
            prop_assert!(inner(&u, &u).re >= 0.0);
        }

        #[test]
        fn phase_distance_is_a_metric(u in arb_state(), v in arb_state(), w in arb_state()) {
            let duv = phase_distance(&u, &v);
            prop_assert!((duv - phase_distance(&v, &u)).abs() < 1e-12);
            prop_assert!(duv <= phase_distance(&u, &w) + phase_distance(&w, &v) + 1e-12);
            prop_assert!(duv <= 2f64.sqrt() + 1e-12);
            let closed = (2.0 - 2.0 * inner(&u, &v).norm()).max(0.0).sqrt();
            prop_assert!((duv - closed).abs() < 1e-7);
        }
    }
}
