//! Formula-versus-oracle verification suites.
//!
//! Each suite draws seeded random inputs, evaluates a closed form from
//! [`Formulas`] and the brute-force route, and keeps the worst residual.
//! The formulas are passed as function pointers so a harness can swap one
//! for a deliberately broken variant and watch the report fail.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entanglement::{self, concurrence_pure, BellFidelities, ConcurrenceValue};
use crate::error::Result;
use crate::evolution::{self, evolve_oracle, evolve_xplus_oracle, DecomposedState, InitialProductState, SideKet};
use crate::hamiltonian::{self, build_hamiltonian, commutator_norms, ClusterParams, EigenPair};
use crate::hilbert::{phase_distance, Pair, TwoQubitState, C64};
use crate::measurement::{self, measure_pair, MeasurementDirection};
use crate::protocols::{
    bell_conditions, execute_recipe, prepare_bell_on_centrals, BellRoute, BellTarget, RecipeOptions,
};

#[derive(Clone, Copy)]
pub struct Formulas {
    pub analytic_eigensystem: fn(&ClusterParams) -> Vec<EigenPair>,
    pub evolve_stationary_sides: fn(&ClusterParams, &InitialProductState, f64) -> Result<TwoQubitState>,
    pub evolve_xplus_decomposed: fn(&ClusterParams, f64) -> DecomposedState,
    pub concurrence_stationary: fn(&ClusterParams, &InitialProductState, f64) -> ConcurrenceValue,
    pub concurrence_xy: fn(f64, f64, f64, f64) -> ConcurrenceValue,
    pub concurrence_xi: fn(f64, f64, f64) -> ConcurrenceValue,
    pub concurrence_psi3: fn(f64, f64, f64, f64) -> ConcurrenceValue,
    pub side_branch_amplitudes: fn(&ClusterParams, &MeasurementDirection, f64) -> [f64; 3],
    pub bell_fidelity_curves: fn(f64, f64) -> BellFidelities,
}

impl Default for Formulas {
    fn default() -> Self {
        Formulas {
            analytic_eigensystem: hamiltonian::analytic_eigensystem,
            evolve_stationary_sides: evolution::evolve_stationary_sides,
            evolve_xplus_decomposed: evolution::evolve_xplus_decomposed,
            concurrence_stationary: entanglement::concurrence_stationary,
            concurrence_xy: entanglement::concurrence_xy,
            concurrence_xi: entanglement::concurrence_xi,
            concurrence_psi3: entanglement::concurrence_psi3,
            side_branch_amplitudes: measurement::side_branch_amplitudes,
            bell_fidelity_curves: entanglement::bell_fidelity_curves,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub samples: usize,
    pub worst: f64,
    pub tolerance: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.worst < self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub trials: usize,
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.suites.iter().filter(|s| !s.passed()).map(|s| s.name).collect()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "trials {} seed {}", self.trials, self.seed)?;
        writeln!(f, "{:<24} {:>8} {:>12} {:>10}  status", "suite", "samples", "worst", "tolerance")?;
        for s in &self.suites {
            writeln!(
                f,
                "{:<24} {:>8} {:>12.3e} {:>10.0e}  {}",
                s.name,
                s.samples,
                s.worst,
                s.tolerance,
                if s.passed() { "PASS" } else { "FAIL" }
            )?;
        }
        write!(f, "{}", if self.passed() { "all suites passed" } else { "verification FAILED" })
    }
}

fn random_params(rng: &mut ChaCha8Rng, range: f64) -> ClusterParams {
    let mut draw = || rng.random_range(-range..range);
    ClusterParams { j: draw(), jz: draw(), j0: draw(), h: draw(), hp: draw() }
}

fn random_qubit(rng: &mut ChaCha8Rng) -> [C64; 2] {
    let theta: f64 = rng.random_range(0.0..PI);
    let (a, b): (f64, f64) = (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
    [C64::from_polar((theta / 2.0).cos(), a), C64::from_polar((theta / 2.0).sin(), b)]
}

fn random_init(rng: &mut ChaCha8Rng) -> InitialProductState {
    let [c1, c2] = random_qubit(rng);
    let [c3, c4] = random_qubit(rng);
    InitialProductState::new(c1, c2, c3, c4, SideKet::from_index(rng.random_range(0..4)))
}

fn random_direction(rng: &mut ChaCha8Rng) -> MeasurementDirection {
    MeasurementDirection::new(rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI)).expect("finite angles")
}

/// Dimer state left after evolving `init` with the sides held in a z eigenstate.
fn oracle_stationary(p: &ClusterParams, init: &InitialProductState, t: f64) -> TwoQubitState {
    let psi = evolve_oracle(&build_hamiltonian(p), &init.full_state(), t);
    TwoQubitState::from_array(psi.pair_slice(Pair::Sides, init.side.index()))
}

fn branch_concurrence(psi: &crate::StateVector16, d: &MeasurementDirection, branch: usize) -> Result<f64> {
    let records = measure_pair(psi, Pair::Sides, d)?;
    Ok(records[branch].post_state().map(|s| concurrence_pure(s).value()).unwrap_or(0.0))
}

struct Suite {
    name: &'static str,
    tolerance: f64,
    run: fn(&Formulas, &mut ChaCha8Rng, usize) -> Result<(usize, f64)>,
}

fn commutators(_: &Formulas, rng: &mut ChaCha8Rng, n: usize) -> Result<(usize, f64)> {
    let worst = (0..n).flat_map(|_| commutator_norms(&random_params(rng, 10.0))).fold(0.0, f64::max);
    Ok((n, worst))
}

fn eigen_residuals(f: &Formulas, rng: &mut ChaCha8Rng, n: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let p = random_params(rng, 10.0);
        let h = build_hamiltonian(&p);
        for pair in (f.analytic_eigensystem)(&p) {
            worst = worst.max(pair.residual(&h));
        }
    }
    Ok((n, worst))
}

fn spectrum(f: &Formulas, rng: &mut ChaCha8Rng, n: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let p = random_params(rng, 10.0);
        let mut analytic: Vec<f64> = (f.analytic_eigensystem)(&p).iter().map(|e| e.energy).collect();
        analytic.sort_by(f64::total_cmp);
        let numeric = build_hamiltonian(&p).numeric_energies();
        for (a, b) in analytic.iter().zip(&numeric) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok((n, worst))
}

fn stationary_evolution(f: &Formulas, rng: &mut ChaCha8Rng, n: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let p = random_params(rng, 5.0);
        let init = random_init(rng);
        let t = rng.random_range(0.0..5.0);
        let closed = (f.evolve_stationary_sides)(&p, &init, t)?;
        worst = worst.max(phase_distance(&closed, &oracle_stationary(&p, &init, t)));
    }
    Ok((n, worst))
}

fn xplus_evolution(f: &Formulas, rng: &mut ChaCha8Rng, n: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let p = random_params(rng, 5.0);
        let t = rng.random_range(0.0..5.0);
        let oracle = evolve_xplus_oracle(&p, t);
        let dec = (f.evolve_xplus_decomposed)(&p, t);
        worst = worst
            .max(phase_distance(&dec.reassemble_from_xi(), &oracle))
            .max(phase_distance(&dec.reassemble_from_phi(), &oracle));
    }
    Ok((n, worst))
}

fn concurrence_stationary(f: &Formulas, rng: &mut ChaCha8Rng, n: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let p = random_params(rng, 5.0);
        let init = random_init(rng);
        let t = rng.random_range(0.0..5.0);
        let oracle = concurrence_pure(&oracle_stationary(&p, &init, t)).value();
        worst = worst.max(((f.concurrence_stationary)(&p, &init, t).value() - oracle).abs());
    }
    Ok((n, worst))
}

fn concurrence_xy(f: &Formulas, rng: &mut ChaCha8Rng, n: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let p = random_params(rng, 5.0);
        let (phi1, phi2) = (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
        let t = rng.random_range(0.0..5.0);
        let init = InitialProductState::equatorial(phi1, phi2);
        let oracle = concurrence_pure(&oracle_stationary(&p, &init, t)).value();
        worst = worst.max(((f.concurrence_xy)(p.j, p.jz, phi1 - phi2, t).value() - oracle).abs());
    }
    Ok((n, worst))
}

fn concurrence_xi(f: &Formulas, rng: &mut ChaCha8Rng, n: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let p = random_params(rng, 5.0);
        let t = rng.random_range(0.0..5.0);
        let psi = evolve_xplus_oracle(&p, t);
        let closed = (f.concurrence_xi)(p.j, p.jz, t).value();
        for branch in 0..4 {
            worst = worst.max((branch_concurrence(&psi, &MeasurementDirection::z(), branch)? - closed).abs());
        }
    }
    Ok((n, worst))
}

fn concurrence_psi3(f: &Formulas, rng: &mut ChaCha8Rng, n: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let p = random_params(rng, 5.0);
        let t = rng.random_range(0.0..5.0);
        let psi = evolve_xplus_oracle(&p, t);
        let oracle = branch_concurrence(&psi, &bell_conditions(p.h, t), 3)?;
        worst = worst.max(((f.concurrence_psi3)(p.j, p.jz, p.j0, t).value() - oracle).abs());
    }
    Ok((n, worst))
}

fn table1(_: &Formulas, rng: &mut ChaCha8Rng, n: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let p = random_params(rng, 5.0);
        let t = rng.random_range(0.0..5.0);
        for r in measure_pair(&evolve_xplus_oracle(&p, t), Pair::Sides, &MeasurementDirection::z())? {
            worst = worst.max((r.probability - 0.25).abs());
        }
    }
    Ok((n, worst))
}

fn table2(f: &Formulas, rng: &mut ChaCha8Rng, n: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let p = random_params(rng, 5.0);
        let t = rng.random_range(0.0..5.0);
        let d = random_direction(rng);
        let [a1, a2, a3] = (f.side_branch_amplitudes)(&p, &d, t);
        let records = measure_pair(&evolve_xplus_oracle(&p, t), Pair::Sides, &d)?;
        for (r, a) in records.iter().zip([a1, a2, a2, a3]) {
            worst = worst.max((r.probability - a.powi(-2) / 16.0).abs());
        }
    }
    Ok((n, worst))
}

fn bell_curves(f: &Formulas, rng: &mut ChaCha8Rng, n: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let p = random_params(rng, 5.0);
        let t = rng.random_range(0.0..5.0);
        let curves = (f.bell_fidelity_curves)(p.j0, t);
        let pr = measure_pair(&evolve_xplus_oracle(&p, t), Pair::Sides, &bell_conditions(p.h, t))?;
        worst = worst
            .max(curves.closure_defect())
            .max((curves.f1 - pr[0].probability).abs())
            .max((curves.f2 - pr[1].probability - pr[2].probability).abs())
            .max((curves.f3 - pr[3].probability).abs());
    }
    Ok((n, worst))
}

fn protocols(_: &Formulas, rng: &mut ChaCha8Rng, n: usize) -> Result<(usize, f64)> {
    let cases = [
        (BellTarget::PsiPlus, BellRoute::Direct),
        (BellTarget::PhiPlus, BellRoute::Direct),
        (BellTarget::PhiMinus, BellRoute::Direct),
        (BellTarget::PhiPlus, BellRoute::Mixed),
        (BellTarget::PhiMinus, BellRoute::Mixed),
        (BellTarget::PhiPlus, BellRoute::MixedLate),
        (BellTarget::PhiMinus, BellRoute::MixedLate),
    ];
    let rounds = n.div_ceil(cases.len()).max(1);
    let mut worst: f64 = 0.0;
    for _ in 0..rounds {
        let mut p = random_params(rng, 5.0);
        if p.j0.abs() < 0.1 {
            p.j0 = 0.1_f64.copysign(p.j0);
        }
        for (target, route) in cases {
            let recipe = prepare_bell_on_centrals(&p, target, RecipeOptions { route, n: None })?;
            let run = execute_recipe(&recipe)?;
            worst = worst.max(1.0 - run.fidelity).max((run.probability - recipe.expected_probability).abs());
        }
    }
    Ok((rounds * cases.len(), worst))
}

const SUITES: [Suite; 12] = [
    Suite { name: "commutators", tolerance: 1e-13, run: commutators },
    Suite { name: "eigen-residuals", tolerance: 1e-12, run: eigen_residuals },
    Suite { name: "spectrum", tolerance: 1e-10, run: spectrum },
    Suite { name: "stationary-evolution", tolerance: 1e-10, run: stationary_evolution },
    Suite { name: "xplus-evolution", tolerance: 1e-10, run: xplus_evolution },
    Suite { name: "concurrence-stationary", tolerance: 1e-10, run: concurrence_stationary },
    Suite { name: "concurrence-xy", tolerance: 1e-10, run: concurrence_xy },
    Suite { name: "concurrence-xi", tolerance: 1e-10, run: concurrence_xi },
    Suite { name: "concurrence-psi3", tolerance: 1e-10, run: concurrence_psi3 },
    Suite { name: "table1-probabilities", tolerance: 1e-12, run: table1 },
    Suite { name: "table2-probabilities", tolerance: 1e-12, run: table2 },
    Suite { name: "bell-fidelity-curves", tolerance: 1e-10, run: bell_curves },
];

const PROTOCOL_SUITE: Suite = Suite { name: "bell-protocols", tolerance: 1e-9, run: protocols };

/// Runs every suite with `trials` draws each; suite k uses seed `seed + k`.
pub fn run_verification(trials: usize, seed: u64, formulas: &Formulas) -> Result<VerificationReport> {
    let mut suites = Vec::new();
    for (k, suite) in SUITES.iter().chain(std::iter::once(&PROTOCOL_SUITE)).enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        let (samples, worst) = (suite.run)(formulas, &mut rng, trials)?;
        suites.push(SuiteResult { name: suite.name, samples, worst, tolerance: suite.tolerance });
    }
    Ok(VerificationReport { trials, seed, suites })
}

/// Deliberate formula breakages for exercising the failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Flips the sign of the interference term in the −− branch concurrence.
    Psi3Sign,
}

impl std::str::FromStr for Mutation {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "psi3-sign" => Ok(Mutation::Psi3Sign),
            other => Err(format!("unknown mutation '{other}'")),
        }
    }
}

impl Formulas {
    pub fn mutated(mutation: Mutation) -> Self {
        match mutation {
            Mutation::Psi3Sign => Formulas { concurrence_psi3: broken_concurrence_psi3, ..Formulas::default() },
        }
    }
}

fn broken_concurrence_psi3(j: f64, jz: f64, j0: f64, t: f64) -> ConcurrenceValue {
    let c4 = (j0 * t / 2.0).cos().powi(4);
    let radicand = 1.0 + c4 * c4 + 2.0 * c4 * ((jz - j) * t).cos();
    ConcurrenceValue::from_raw(radicand.max(0.0).sqrt() / (1.0 + c4))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_formulas_pass() {
        let report = run_verification(40, 7, &Formulas::default()).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.suites.len(), 13);
    }

    #[test]
    fn mutation_is_caught() {
        let report = run_verification(40, 7, &Formulas::mutated(Mutation::Psi3Sign)).unwrap();
        assert!(!report.passed());
        assert_eq!(report.failures(), ["concurrence-psi3"]);
    }

    #[test]
    fn report_is_deterministic() {
        let a = run_verification(10, 3, &Formulas::default()).unwrap();
        let b = run_verification(10, 3, &Formulas::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), b.to_string());
    }
}
