//! Exact simulation of the spin-1/2 Ising-Heisenberg diamond cluster:
//! two central spins (Sa, Sb) with anisotropic Heisenberg exchange, Ising
//! coupled to two side spins (S1, S2), in fields h (sides) and h′ (centrals).
//!
//! The crate implements measurement-controlled preparation of entangled
//! pair states, and checks each closed-form expression (eigensystem,
//! evolved states, post-measurement branches, concurrences, fidelities)
//! against brute-force evolution of the 16-dimensional state.

pub mod entanglement;
pub mod error;
pub mod evolution;
pub mod hamiltonian;
pub mod hilbert;
pub mod measurement;
pub mod protocols;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use hamiltonian::ClusterParams;
pub use hilbert::{Pair, StateVector16, TwoQubitState, C64};
