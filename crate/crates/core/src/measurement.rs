//! Projective measurement of one spin pair along a common direction (θ, φ).
//!
//! Single-spin projection kets:
//!
//! ```text
//! |+⟩ =  cos(θ/2)|↑⟩ + sin(θ/2) e^{iφ}|↓⟩
//! |−⟩ = −sin(θ/2) e^{−iφ}|↑⟩ + cos(θ/2)|↓⟩
//! ```
//!
//! Both spins of the measured pair are projected on the same direction.
//! Besides the generic [`measure_pair`], this module carries the closed-form
//! branch states of the side-spin measurement on the evolved all-+x state,
//! and the central-basis expansion of that state, for cross-checking.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hamiltonian::ClusterParams;
use crate::hilbert::{Ket, Pair, Qubit, StateVector16, TwoQubitState, C64};

/// Outcomes with probability below this are reported unreachable.
pub const UNREACHABLE_PROB: f64 = 1e-12;

/// Normalization tolerance on states handed to a measurement.
pub const INPUT_NORM_TOL: f64 = 1e-9;

fn cis(angle: f64) -> C64 {
    C64::from_polar(1.0, angle)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementDirection {
    theta: f64,
    phi: f64,
}

impl MeasurementDirection {
    /// Canonicalizes to θ ∈ [0, π], φ ∈ [0, 2π) without changing the axis.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::NonFinite { name: "theta", value: theta });
        }
        if !phi.is_finite() {
            return Err(Error::NonFinite { name: "phi", value: phi });
        }
        let mut th = theta.rem_euclid(2.0 * PI);
        let mut ph = phi;
        if th > PI {
            th = 2.0 * PI - th;
            ph += PI;
        }
        ph = ph.rem_euclid(2.0 * PI);
        if ph >= 2.0 * PI {
            ph = 0.0;
        }
        Ok(MeasurementDirection { theta: th, phi: ph })
    }

    /// The z axis: the ± basis coincides with ↑/↓.
    pub fn z() -> Self {
        MeasurementDirection { theta: 0.0, phi: 0.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairOutcome {
    pub first: Sign,
    pub second: Sign,
}

impl PairOutcome {
    pub const PP: PairOutcome = PairOutcome { first: Sign::Plus, second: Sign::Plus };
    pub const PM: PairOutcome = PairOutcome { first: Sign::Plus, second: Sign::Minus };
    pub const MP: PairOutcome = PairOutcome { first: Sign::Minus, second: Sign::Plus };
    pub const MM: PairOutcome = PairOutcome { first: Sign::Minus, second: Sign::Minus };

    /// In the order ++, +−, −+, −−.
    pub const ALL: [PairOutcome; 4] = [Self::PP, Self::PM, Self::MP, Self::MM];

    pub fn index(self) -> usize {
        let bit = |s: Sign| match s {
            Sign::Plus => 0,
            Sign::Minus => 1,
        };
        2 * bit(self.first) + bit(self.second)
    }
}

impl fmt::Display for PairOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |s: Sign| match s {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        write!(f, "{}{}", c(self.first), c(self.second))
    }
}

/// (|+⟩, |−⟩) for direction `d`.
pub fn direction_basis(d: &MeasurementDirection) -> (Qubit, Qubit) {
    let (c, s) = ((d.theta / 2.0).cos(), (d.theta / 2.0).sin());
    let plus = [C64::new(c, 0.0), cis(d.phi) * s];
    let minus = [-cis(-d.phi) * s, C64::new(c, 0.0)];
    (plus, minus)
}

/// Product ket |o₁o₂⟩ for a pair outcome.
pub fn outcome_ket(d: &MeasurementDirection, outcome: PairOutcome) -> TwoQubitState {
    let (plus, minus) = direction_basis(d);
    let pick = |s: Sign| match s {
        Sign::Plus => plus,
        Sign::Minus => minus,
    };
    TwoQubitState::product(&pick(outcome.first), &pick(outcome.second))
}

/// Coefficients of `s` on |++⟩, |+−⟩, |−+⟩, |−−⟩.
pub fn pair_basis_change(s: &TwoQubitState, d: &MeasurementDirection) -> TwoQubitState {
    TwoQubitState::from_array(PairOutcome::ALL.map(|o| outcome_ket(d, o).inner(s)))
}

#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    pub outcome: PairOutcome,
    pub probability: f64,
    post_state: Option<TwoQubitState>,
}

impl MeasurementRecord {
    pub fn is_reachable(&self) -> bool {
        self.post_state.is_some()
    }

    /// Normalized state of the unmeasured pair; an error for unreachable outcomes.
    pub fn post_state(&self) -> Result<&TwoQubitState> {
        self.post_state.as_ref().ok_or(Error::UnreachableOutcome(self.outcome))
    }
}

/// Measures `pair` of `psi` along `d`; one record per outcome in [`PairOutcome::ALL`] order.
pub fn measure_pair(psi: &StateVector16, pair: Pair, d: &MeasurementDirection) -> Result<[MeasurementRecord; 4]> {
    psi.require_normalized(INPUT_NORM_TOL)?;
    Ok(PairOutcome::ALL.map(|outcome| {
        let branch = TwoQubitState::from_array(psi.contract_pair(pair, &outcome_ket(d, outcome)));
        let norm = branch.norm();
        let probability = norm * norm;
        let post_state = (probability >= UNREACHABLE_PROB).then(|| branch.scale(C64::new(1.0 / norm, 0.0)));
        MeasurementRecord { outcome, probability, post_state }
    }))
}

/// Draws one outcome from the Born distribution with a generator seeded by `seed`.
pub fn sample_measurement(
    psi: &StateVector16,
    pair: Pair,
    d: &MeasurementDirection,
    seed: u64,
) -> Result<MeasurementRecord> {
    let records = measure_pair(psi, pair, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(draw(&records, &mut rng).clone())
}

/// Picks a record by cumulative probability; `rng` is advanced once.
pub fn draw<'a, R: Rng + ?Sized>(records: &'a [MeasurementRecord; 4], rng: &mut R) -> &'a MeasurementRecord {
    let total: f64 = records.iter().map(|r| r.probability).sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = &records[0];
    for r in records.iter().filter(|r| r.is_reachable()) {
        acc += r.probability;
        last = r;
        if u < acc {
            return r;
        }
    }
    last
}

/// Outcome counts of `samples` independent draws, indexed like [`PairOutcome::ALL`].
pub fn sample_counts(records: &[MeasurementRecord; 4], samples: usize, seed: u64) -> [usize; 4] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = [0; 4];
    for _ in 0..samples {
        counts[draw(records, &mut rng).outcome.index()] += 1;
    }
    counts
}

/// Normalization amplitudes (A₁, A₂, A₃) of the three central-pair branches
/// left by measuring the sides of the evolved all-+x state along `d`.
/// Outcome probabilities are A₁⁻²/16 (++), A₂⁻²/16 (+− and −+), A₃⁻²/16 (−−).
pub fn side_branch_amplitudes(p: &ClusterParams, d: &MeasurementDirection, t: f64) -> [f64; 3] {
    let (st, ct) = (d.theta.sin(), d.theta.cos());
    let x = p.j0 * t + p.h * t - d.phi;
    let y = p.h * t - d.phi;
    let z = p.j0 * t - p.h * t + d.phi;
    let sym = |sign: f64| {
        ((1.0 + sign * st * x.cos()).powi(2)
            + 2.0 * (1.0 + sign * st * y.cos()).powi(2)
            + (1.0 + sign * st * z.cos()).powi(2))
        .powf(-0.5)
    };
    let a2 = (4.0 * ct * ct + st * st * (x.sin().powi(2) + 2.0 * y.sin().powi(2) + z.sin().powi(2))).powf(-0.5);
    [sym(1.0), a2, sym(-1.0)]
}

/// Closed-form normalized central-pair states |ψ₁⟩, |ψ₂⟩, |ψ₃⟩ for the ++,
/// mixed (+− or −+) and −− outcomes. Components are non-finite when the
/// branch has zero probability.
pub fn side_branch_states(p: &ClusterParams, d: &MeasurementDirection, t: f64) -> [TwoQubitState; 3] {
    let [a1, a2, a3] = side_branch_amplitudes(p, d, t);
    let (c, s) = ((d.theta / 2.0).cos(), (d.theta / 2.0).sin());
    let (st, ct) = (d.theta.sin(), d.theta.cos());
    let phi = d.phi;
    let (j, jz, j0, h, hp) = (p.j, p.jz, p.j0, p.h, p.hp);
    let i = C64::i();

    let up = cis(-(jz / 4.0 + hp) * t);
    let mid = cis(-(j / 2.0 - jz / 4.0) * t);
    let down = cis(-(jz / 4.0 - hp) * t);

    let sq = |z: C64| z * z;
    let psi1 = [
        up * sq(cis(-(j0 + h) / 2.0 * t) * c + cis((j0 + h) / 2.0 * t - phi) * s),
        mid * sq(cis(-h / 2.0 * t) * c + cis(h / 2.0 * t - phi) * s),
        down * sq(cis((j0 - h) / 2.0 * t) * c + cis(-((j0 - h) / 2.0 * t + phi)) * s),
    ];
    let psi2 = [
        up * (ct + i * st * ((h + j0) * t - phi).sin()),
        mid * (ct + i * st * (h * t - phi).sin()),
        down * (ct + i * st * ((h - j0) * t - phi).sin()),
    ];
    let psi3 = [
        up * sq(cis((j0 + h) / 2.0 * t) * c - cis(-((j0 + h) / 2.0 * t - phi)) * s),
        mid * sq(cis(h / 2.0 * t) * c - cis(-(h / 2.0 * t - phi)) * s),
        down * sq(cis(-(j0 - h) / 2.0 * t) * c - cis((j0 - h) / 2.0 * t + phi) * s),
    ];
    let assemble = |amp: f64, k: [C64; 3]| TwoQubitState::new(k[0] * amp, k[1] * amp, k[1] * amp, k[2] * amp);
    [assemble(a1, psi1), assemble(a2, psi2), assemble(a3, psi3)]
}

/// The evolved all-+x state with the central pair rewritten in the ± basis
/// of `d`, from the explicit coefficient expansion. Entry `(s << 2) | o`
/// holds the amplitude of side z-ket `s` times central outcome `o`
/// (in [`PairOutcome::ALL`] order).
pub fn rotated_central_expansion(p: &ClusterParams, d: &MeasurementDirection, t: f64) -> StateVector16 {
    let (c2, s2) = ((d.theta / 2.0).cos().powi(2), (d.theta / 2.0).sin().powi(2));
    let (st, ct) = (d.theta.sin(), d.theta.cos());
    let (j, jz, j0, h, hp) = (p.j, p.jz, p.j0, p.h, p.hp);
    let phi = d.phi;
    let i = C64::i();
    let omega = cis(-(j / 2.0 - jz / 2.0) * t);
    let u = phi - hp * t;
    let quarter = |angle: f64| cis(angle) * 0.25;
    let (side_up, side_down) = (cis(-h * t), cis(h * t));

    let pp_pref = quarter(-(jz / 4.0 + hp) * t);
    let pp = [
        side_up * (cis(-j0 * t) * c2 + cis(-u) * omega * st + cis(-2.0 * u) * cis(j0 * t) * s2),
        C64::new(c2, 0.0) + cis(-u) * omega * st + cis(-2.0 * u) * s2,
        side_down * (cis(j0 * t) * c2 + cis(-u) * omega * st + cis(-2.0 * u) * cis(-j0 * t) * s2),
    ]
    .map(|z| z * pp_pref);

    let mixed_pref = quarter(-jz / 4.0 * t);
    let mixed = [
        side_up * (omega * ct + i * st * ((hp + j0) * t - phi).sin()),
        omega * ct + i * st * (hp * t - phi).sin(),
        side_down * (omega * ct + i * st * ((hp - j0) * t - phi).sin()),
    ]
    .map(|z| z * mixed_pref);

    let mm_pref = quarter(-(jz / 4.0 - hp) * t);
    let mm = [
        side_up * (cis(2.0 * u) * cis(-j0 * t) * s2 - cis(u) * omega * st + cis(j0 * t) * c2),
        cis(2.0 * u) * s2 - cis(u) * omega * st + C64::new(c2, 0.0),
        side_down * (cis(2.0 * u) * cis(j0 * t) * s2 - cis(u) * omega * st + cis(-j0 * t) * c2),
    ]
    .map(|z| z * mm_pref);

    let blocks = [pp, mixed, mixed, mm];
    let mut v = StateVector16::zero();
    for side in 0..4 {
        let slot = crate::evolution::symmetric_class(side);
        for (o, block) in blocks.iter().enumerate() {
            v[(side << 2) | o] = block[slot];
        }
    }
    v
}
