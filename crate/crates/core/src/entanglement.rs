//! Pure-state concurrence, fidelity, and the closed-form concurrence and
//! fidelity curves of the preparation protocols.

use std::fmt;

use crate::error::{Error, Result};
use crate::evolution::InitialProductState;
use crate::hamiltonian::ClusterParams;
use crate::hilbert::{braket, Ket, TwoQubitState, C64};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ConcurrenceValue(f64);

impl ConcurrenceValue {
    pub fn value(self) -> f64 {
        self.0
    }

    pub(crate) fn from_raw(c: f64) -> Self {
        ConcurrenceValue(c)
    }
}

impl fmt::Display for ConcurrenceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Wootters concurrence of a pure pair state: 2|ad − bc|.
pub fn concurrence_pure(s: &TwoQubitState) -> ConcurrenceValue {
    ConcurrenceValue(2.0 * (s.a() * s.d() - s.b() * s.c()).norm())
}

/// |⟨u|v⟩|².
pub fn fidelity<A: Ket + ?Sized, B: Ket + ?Sized>(u: &A, v: &B) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { left: u.dim(), right: v.dim() });
    }
    Ok(braket(u.amplitudes(), v.amplitudes()).norm_sqr())
}

/// Concurrence of the dimer when the sides stay in a z eigenstate.
pub fn concurrence_stationary(p: &ClusterParams, init: &InitialProductState, t: f64) -> ConcurrenceValue {
    let (c1, c2, c3, c4) = (init.c1, init.c2, init.c3, init.c4);
    let phase = C64::from_polar(1.0, p.jz * t);
    let jt = p.j * t;
    let z = c1 * c2 * c3 * c4 * (C64::new(1.0, 0.0) - phase * jt.cos())
        + C64::i() * 0.5 * phase * (c1 * c1 * c4 * c4 + c2 * c2 * c3 * c3) * jt.sin();
    ConcurrenceValue(2.0 * z.norm())
}

/// Stationary-sides concurrence for equatorial initial spins with azimuth difference `dphi`.
pub fn concurrence_xy(j: f64, jz: f64, dphi: f64, t: f64) -> ConcurrenceValue {
    let (a, b) = (jz * t, j * t);
    let re = a.cos() - b.cos();
    let im = a.sin() - b.sin() * dphi.cos();
    ConcurrenceValue(0.5 * (re * re + im * im).sqrt())
}

/// Concurrence shared by the three z-measurement branches ξ₁, ξ₂, ξ₃.
pub fn concurrence_xi(j: f64, jz: f64, t: f64) -> ConcurrenceValue {
    ConcurrenceValue(((jz - j) / 2.0 * t).sin().abs())
}

/// Concurrence of the −− branch |ψ₃⟩ under the Bell-direction conditions.
pub fn concurrence_psi3(j: f64, jz: f64, j0: f64, t: f64) -> ConcurrenceValue {
    let c4 = (j0 * t / 2.0).cos().powi(4);
    let radicand = 1.0 + c4 * c4 - 2.0 * c4 * ((jz - j) * t).cos();
    ConcurrenceValue(radicand.max(0.0).sqrt() / (1.0 + c4))
}

/// Branch probabilities under the Bell-direction conditions.
///
/// `f2` is the probability of obtaining |ψ₂⟩, which both mixed outcomes
/// (+− and −+) herald; each of those outcomes alone carries `f2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellFidelities {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
}

impl BellFidelities {
    /// Per-outcome probabilities in ++, +−, −+, −− order.
    pub fn per_branch(&self) -> [f64; 4] {
        [self.f1, self.f2 / 2.0, self.f2 / 2.0, self.f3]
    }

    /// Deviation of the per-outcome probabilities from summing to one.
    pub fn closure_defect(&self) -> f64 {
        (self.per_branch().iter().sum::<f64>() - 1.0).abs()
    }
}

pub fn bell_fidelity_curves(j0: f64, t: f64) -> BellFidelities {
    let x = j0 * t;
    BellFidelities {
        f1: 0.5 * (x / 2.0).sin().powi(4),
        f2: 0.25 * x.sin().powi(2),
        f3: 0.5 * ((x / 2.0).cos().powi(4) + 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{evolve_oracle, evolve_stationary_sides, evolve_xplus_decomposed, SideKet};
    use crate::hamiltonian::build_hamiltonian;
    use crate::hilbert::{Pair, StateVector16};
    use crate::measurement::{direction_basis, measure_pair, MeasurementDirection};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn concurrence_examples() {
        let r = c(FRAC_1_SQRT_2);
        let phi_plus = TwoQubitState::new(r, c(0.0), c(0.0), r);
        assert!((concurrence_pure(&phi_plus).value() - 1.0).abs() < 1e-15);
        assert_eq!(concurrence_pure(&TwoQubitState::basis(1)).value(), 0.0);
        for k in 0..50 {
            let jt = 4.0 * PI * k as f64 / 49.0;
            let s = TwoQubitState::new(c(0.0), c((jt / 2.0).cos()), -C64::i() * (jt / 2.0).sin(), c(0.0));
            assert!((concurrence_pure(&s).value() - jt.sin().abs()).abs() < 1e-15);
        }
    }

    #[test]
    fn fidelity_examples() {
        let v = TwoQubitState::basis(2);
        assert_eq!(fidelity(&v, &v).unwrap(), 1.0);
        assert_eq!(fidelity(&v, &TwoQubitState::basis(1)).unwrap(), 0.0);
        let big = StateVector16::zero();
        assert!(matches!(fidelity(&v, &big), Err(Error::DimensionMismatch { left: 4, right: 16 })));
    }

    #[test]
    fn stationary_special_cases() {
        let one = c(1.0);
        let zero = c(0.0);
        let init = InitialProductState::new(one, zero, zero, one, SideKet::UP_UP);
        let p = ClusterParams::new(1.3, 0.4, 2.0, 0.1, 0.2).unwrap();
        for k in 0..40 {
            let t = k as f64 * 0.37;
            assert!((concurrence_stationary(&p, &init, t).value() - (p.j * t).sin().abs()).abs() < 1e-14);
        }
        let init = InitialProductState::equatorial(0.3, 1.9);
        assert!(concurrence_stationary(&p, &init, 0.0).value() < 1e-15);
    }

    #[test]
    fn stationary_formula_matches_pipeline() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let p = ClusterParams {
                j: rng.random_range(-5.0..5.0),
                jz: rng.random_range(-5.0..5.0),
                j0: rng.random_range(-5.0..5.0),
                h: rng.random_range(-5.0..5.0),
                hp: rng.random_range(-5.0..5.0),
            };
            let th: [f64; 2] = [rng.random_range(0.0..PI), rng.random_range(0.0..PI)];
            let ph: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..2.0 * PI));
            let init = InitialProductState::new(
                C64::from_polar((th[0] / 2.0).cos(), ph[0]),
                C64::from_polar((th[0] / 2.0).sin(), ph[1]),
                C64::from_polar((th[1] / 2.0).cos(), ph[2]),
                C64::from_polar((th[1] / 2.0).sin(), ph[3]),
                SideKet::from_index(rng.random_range(0..4)),
            );
            let t = rng.random_range(0.0..6.0);
            let full = evolve_oracle(&build_hamiltonian(&p), &init.full_state(), t);
            let pair = TwoQubitState::from_array(full.pair_slice(Pair::Sides, init.side.index()));
            let closed = concurrence_stationary(&p, &init, t).value();
            assert!((closed - concurrence_pure(&pair).value()).abs() < 1e-10);
            let via_closed_state = concurrence_pure(&evolve_stationary_sides(&p, &init, t).unwrap());
            assert!((closed - via_closed_state.value()).abs() < 1e-10);
        }
    }

    #[test]
    fn xy_reduces_from_general_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..100 {
            let (p1, p2) = (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
            let p =
                ClusterParams { j: rng.random_range(-3.0..3.0), jz: rng.random_range(-3.0..3.0), ..Default::default() };
            let t = rng.random_range(0.0..5.0);
            let general = concurrence_stationary(&p, &InitialProductState::equatorial(p1, p2), t);
            assert!((general.value() - concurrence_xy(p.j, p.jz, p1 - p2, t).value()).abs() < 1e-12);
        }
    }

    #[test]
    fn xy_maximal_loci() {
        // dphi = 0 and (Jz − J)t = π; dphi = π and (Jz + J)t = π.
        assert!((concurrence_xy(0.5, 0.5 + PI, 0.0, 1.0).value() - 1.0).abs() < 1e-12);
        assert!((concurrence_xy(1.2, PI - 1.2, PI, 1.0).value() - 1.0).abs() < 1e-12);
        assert_eq!(concurrence_xy(1.0, 2.0, 0.7, 0.0).value(), 0.0);
    }

    #[test]
    fn xi_examples() {
        let (j, jz) = (0.4, 1.9);
        assert!((concurrence_xi(j, jz, PI / (jz - j)).value() - 1.0).abs() < 1e-12);
        assert!((concurrence_xi(j, jz, 3.0 * PI / (jz - j)).value() - 1.0).abs() < 1e-12);
        assert!(concurrence_xi(1.3, 1.3, 5.0).value() == 0.0);
    }

    #[test]
    fn xi_matches_decomposed_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..100 {
            let p = ClusterParams {
                j: rng.random_range(-5.0..5.0),
                jz: rng.random_range(-5.0..5.0),
                j0: rng.random_range(-5.0..5.0),
                h: rng.random_range(-5.0..5.0),
                hp: rng.random_range(-5.0..5.0),
            };
            let t = rng.random_range(0.0..6.0);
            let d = evolve_xplus_decomposed(&p, t);
            let expected = concurrence_xi(p.j, p.jz, t).value();
            for xi in &d.xi {
                assert!((concurrence_pure(xi).value() - expected).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn psi3_examples() {
        let (j, jz, j0) = (0.3, 1.4, 2.0);
        assert!((concurrence_psi3(j, jz, j0, PI / j0).value() - 1.0).abs() < 1e-12);
        assert_eq!(concurrence_psi3(j, jz, j0, 0.0).value(), 0.0);
    }

    #[test]
    fn psi3_matches_measured_branch() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..60 {
            let p = ClusterParams {
                j: rng.random_range(-5.0..5.0),
                jz: rng.random_range(-5.0..5.0),
                j0: rng.random_range(-5.0..5.0),
                h: rng.random_range(-5.0..5.0),
                hp: rng.random_range(-5.0..5.0),
            };
            let t = rng.random_range(0.05..6.0);
            let d = MeasurementDirection::new(PI / 2.0, p.h * t - PI).unwrap();
            let psi = crate::evolution::evolve_xplus_oracle(&p, t);
            let records = measure_pair(&psi, Pair::Sides, &d).unwrap();
            let got = concurrence_pure(records[3].post_state().unwrap()).value();
            assert!((got - concurrence_psi3(p.j, p.jz, p.j0, t).value()).abs() < 1e-10);
        }
    }

    #[test]
    fn bell_curves_examples_and_closure() {
        let f = bell_fidelity_curves(1.0, PI);
        assert!((f.f1 - 0.5).abs() < 1e-15 && f.f2.abs() < 1e-15 && (f.f3 - 0.5).abs() < 1e-15);
        let f = bell_fidelity_curves(2.0, 0.0);
        assert_eq!((f.f1, f.f2, f.f3), (0.0, 0.0, 1.0));
        let f = bell_fidelity_curves(1.0, PI / 2.0);
        assert!((f.f1 - 0.125).abs() < 1e-15);
        assert!((f.f2 - 0.25).abs() < 1e-15);
        assert!((f.f3 - 0.625).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        for _ in 0..1000 {
            let f = bell_fidelity_curves(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
            assert!(f.closure_defect() < 1e-12);
            assert!((f.f1 + f.f2 + f.f3 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_curves_match_measurement() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for _ in 0..60 {
            let p = ClusterParams {
                j: rng.random_range(-5.0..5.0),
                jz: rng.random_range(-5.0..5.0),
                j0: rng.random_range(-5.0..5.0),
                h: rng.random_range(-5.0..5.0),
                hp: rng.random_range(-5.0..5.0),
            };
            let t = rng.random_range(0.0..6.0);
            let d = MeasurementDirection::new(PI / 2.0, p.h * t - PI).unwrap();
            let records = measure_pair(&crate::evolution::evolve_xplus_oracle(&p, t), Pair::Sides, &d).unwrap();
            let curves = bell_fidelity_curves(p.j0, t).per_branch();
            for (r, f) in records.iter().zip(curves) {
                assert!((r.probability - f).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn concurrence_invariant_under_local_rotations() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..200 {
            let s = TwoQubitState::from_array(std::array::from_fn(|_| {
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            }))
            .normalize()
            .unwrap();
            let mut rot = || {
                let d = MeasurementDirection::new(rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI)).unwrap();
                let (p, m) = direction_basis(&d);
                // Unitary with rows ⟨+|, ⟨−|.
                [[p[0].conj(), p[1].conj()], [m[0].conj(), m[1].conj()]]
            };
            let (u, v) = (rot(), rot());
            let amps = s.to_array();
            let rotated = TwoQubitState::from_array(std::array::from_fn(|k| {
                let (i, j) = (k >> 1, k & 1);
                let mut acc = c(0.0);
                for a in 0..2 {
                    for b in 0..2 {
                        acc += u[i][a] * v[j][b] * amps[2 * a + b];
                    }
                }
                acc
            }));
            assert!((concurrence_pure(&rotated).value() - concurrence_pure(&s).value()).abs() < 1e-12);
        }
    }

    #[test]
    fn fig2_grid_maxima() {
        // Jt, Jzt on [0, 4π] with 9 points: spacing π/2 hits the maximal loci exactly.
        let n = 9;
        let step = 4.0 * PI / (n - 1) as f64;
        for dphi in [0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI] {
            let mut max: f64 = 0.0;
            for a in 0..n {
                for b in 0..n {
                    let (jt, jzt) = (a as f64 * step, b as f64 * step);
                    let v = concurrence_xy(jt, jzt, dphi, 1.0).value();
                    max = max.max(v);
                    let dzm = (jzt - jt) / PI;
                    if dphi == 0.0 && (dzm - dzm.round()).abs() < 1e-9 && dzm.round() as i64 % 2 != 0 {
                        assert!((v - 1.0).abs() < 1e-9);
                    }
                    let dzp = (jzt + jt) / PI;
                    if dphi == PI && (dzp - dzp.round()).abs() < 1e-9 && dzp.round() as i64 % 2 != 0 {
                        assert!((v - 1.0).abs() < 1e-9);
                    }
                }
            }
            assert!((max - 1.0).abs() < 1e-9, "dphi {dphi}: max {max}");
        }
    }
}
