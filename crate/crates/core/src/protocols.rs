//! Bell-state preparation recipes.
//!
//! Every recipe starts from all four spins along +x, lets the cluster evolve
//! for a time fixed by J0, then measures one pair along θ = π/2 with the
//! azimuth locked to the field on that pair (φ = h·T − π). The outcome
//! heralds the target on the other pair:
//!
//! | target | outcome   | J0·T       | h′ (preparing the centrals)  | probability |
//! |--------|-----------|------------|------------------------------|-------------|
//! | Ψ⁺     | −−        | π          | any                          | 1/2         |
//! | Φ⁺/Φ⁻  | ++        | π          | h′T = nπ/2, n even / odd     | 1/2         |
//! | Φ⁻/Φ⁺  | +− or −+  | π/2, 3π/2  | h′T = nπ/2, n even / odd     | 1/4         |
//!
//! Preparing the side pair by measuring the centrals is the mirror image
//! with h and h′ exchanged, valid at J = Jz.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::entanglement::{bell_fidelity_curves, concurrence_pure, fidelity, ConcurrenceValue};
use crate::error::{Error, Result};
use crate::evolution::evolve_xplus_oracle;
use crate::hamiltonian::ClusterParams;
use crate::hilbert::{Pair, TwoQubitState, C64};
use crate::measurement::{measure_pair, MeasurementDirection, MeasurementRecord, PairOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellTarget {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellTarget {
    pub fn state(self) -> TwoQubitState {
        let r = C64::new(FRAC_1_SQRT_2, 0.0);
        let z = C64::new(0.0, 0.0);
        match self {
            BellTarget::PhiPlus => TwoQubitState::new(r, z, z, r),
            BellTarget::PhiMinus => TwoQubitState::new(r, z, z, -r),
            BellTarget::PsiPlus => TwoQubitState::new(z, r, r, z),
            BellTarget::PsiMinus => TwoQubitState::new(z, r, -r, z),
        }
    }
}

impl fmt::Display for BellTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellTarget::PhiPlus => "phi-plus",
            BellTarget::PhiMinus => "phi-minus",
            BellTarget::PsiPlus => "psi-plus",
            BellTarget::PsiMinus => "psi-minus",
        })
    }
}

impl FromStr for BellTarget {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "phi-plus" => Ok(BellTarget::PhiPlus),
            "phi-minus" => Ok(BellTarget::PhiMinus),
            "psi-plus" => Ok(BellTarget::PsiPlus),
            "psi-minus" => Ok(BellTarget::PsiMinus),
            other => Err(format!("unknown Bell target '{other}'")),
        }
    }
}

/// Measurement direction that confines the ++ branch to span{|↑↑⟩, |↓↓⟩}:
/// θ = π/2 and φ = h·t − π (mod 2π), where `h` is the field on the measured pair.
pub fn bell_conditions(h: f64, t: f64) -> MeasurementDirection {
    MeasurementDirection::new(PI / 2.0, h * t - PI).expect("finite field and time")
}

/// |cos(θ/2) + sin(θ/2) e^{i(ht − φ)}|: zero when `d` satisfies the condition.
pub fn bell_condition_residual(h: f64, t: f64, d: &MeasurementDirection) -> f64 {
    let (c, s) = ((d.theta() / 2.0).cos(), (d.theta() / 2.0).sin());
    (C64::new(c, 0.0) + C64::from_polar(s, h * t - d.phi())).norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BellRoute {
    /// ++ (Φ±) or −− (Ψ⁺) outcome at J0·T = π.
    #[default]
    Direct,
    /// +− / −+ outcome at J0·T = π/2.
    Mixed,
    /// +− / −+ outcome at J0·T = 3π/2.
    MixedLate,
}

impl FromStr for BellRoute {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "direct" => Ok(BellRoute::Direct),
            "mixed" => Ok(BellRoute::Mixed),
            "mixed-late" => Ok(BellRoute::MixedLate),
            other => Err(format!("unknown route '{other}' (expected direct, mixed, mixed-late)")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RecipeOptions {
    pub route: BellRoute,
    /// Integer n in h′T = πn/2; `None` picks the smallest non-negative |h′|.
    pub n: Option<i64>,
}

#[derive(Debug, Clone)]
pub struct ProtocolRecipe {
    pub target: BellTarget,
    pub pair_prepared: Pair,
    pub measure_direction: MeasurementDirection,
    pub time: f64,
    /// Field on the central pair the recipe runs with.
    pub required_hp: f64,
    pub required_branch: PairOutcome,
    /// Second outcome heralding the same state (the mixed routes), if any.
    pub mirror_branch: Option<PairOutcome>,
    /// Probability of any heralding outcome.
    pub expected_probability: f64,
    pub expected_fidelity: f64,
    /// Full parameter set to run with (input parameters with the tuned field applied).
    pub params: ClusterParams,
    pub n: Option<i64>,
}

impl ProtocolRecipe {
    pub fn heralding_branches(&self) -> Vec<PairOutcome> {
        std::iter::once(self.required_branch).chain(self.mirror_branch).collect()
    }

    pub fn measured_pair(&self) -> Pair {
        self.pair_prepared.other()
    }
}

fn pick_n(n: Option<i64>, odd: bool) -> Result<i64> {
    match n {
        None => Ok(i64::from(odd)),
        Some(n) if (n.rem_euclid(2) == 1) == odd => Ok(n),
        Some(n) => Err(Error::Recipe(format!(
            "n = {n} has the wrong parity; this target needs {} n",
            if odd { "odd" } else { "even" }
        ))),
    }
}

/// Recipe preparing `target` on the central pair by measuring the sides.
pub fn prepare_bell_on_centrals(p: &ClusterParams, target: BellTarget, opts: RecipeOptions) -> Result<ProtocolRecipe> {
    p.validate()?;
    if target == BellTarget::PsiMinus {
        return Err(Error::UnsupportedTarget(target));
    }
    if p.j0 == 0.0 {
        return Err(Error::NoIsingCoupling);
    }
    let g = p.j0.abs();
    let quarter_turns = match opts.route {
        BellRoute::Direct => 2.0,
        BellRoute::Mixed => 1.0,
        BellRoute::MixedLate => 3.0,
    };
    let time = quarter_turns * PI / (2.0 * g);

    // ++ branch: |↑↑⟩ + e^{2ih′T}|↓↓⟩; mixed branches: |↑↑⟩ − e^{2ih′T}|↓↓⟩.
    let (branch, mirror, n, hp) = match (opts.route, target) {
        (BellRoute::Direct, BellTarget::PsiPlus) => (PairOutcome::MM, None, None, p.hp),
        (BellRoute::Direct, t) => {
            let n = pick_n(opts.n, t == BellTarget::PhiMinus)?;
            (PairOutcome::PP, None, Some(n), n as f64 * PI / (2.0 * time))
        }
        (_, BellTarget::PsiPlus) => {
            return Err(Error::Recipe("psi-plus is only heralded by the direct route".into()));
        }
        (_, t) => {
            let n = pick_n(opts.n, t == BellTarget::PhiPlus)?;
            (PairOutcome::PM, Some(PairOutcome::MP), Some(n), n as f64 * PI / (2.0 * time))
        }
    };

    let params = p.with_hp(hp);
    let curves = bell_fidelity_curves(g, time);
    let expected_probability = match branch {
        PairOutcome::PP => curves.f1,
        PairOutcome::MM => curves.f3,
        _ => curves.f2,
    };
    Ok(ProtocolRecipe {
        target,
        pair_prepared: Pair::Centrals,
        measure_direction: bell_conditions(params.h, time),
        time,
        required_hp: hp,
        required_branch: branch,
        mirror_branch: mirror,
        expected_probability,
        expected_fidelity: 1.0,
        params,
        n,
    })
}

/// Mirror recipe preparing `target` on the side pair by measuring the
/// centrals; the side field h plays the role of h′. Requires J = Jz.
pub fn prepare_bell_on_sides(p: &ClusterParams, target: BellTarget, opts: RecipeOptions) -> Result<ProtocolRecipe> {
    if (p.j - p.jz).abs() > 1e-12 * p.j.abs().max(p.jz.abs()).max(1.0) {
        return Err(Error::AnisotropicDimer { j: p.j, jz: p.jz });
    }
    let mirrored = prepare_bell_on_centrals(&p.swap_fields(), target, opts)?;
    let params = mirrored.params.swap_fields();
    Ok(ProtocolRecipe {
        pair_prepared: Pair::Sides,
        measure_direction: bell_conditions(params.hp, mirrored.time),
        required_hp: params.hp,
        params,
        ..mirrored
    })
}

#[derive(Debug, Clone)]
pub struct RecipeRun {
    pub records: [MeasurementRecord; 4],
    /// Total probability of the heralding outcomes.
    pub probability: f64,
    /// Worst fidelity to the target over the heralding outcomes.
    pub fidelity: f64,
    pub concurrence: ConcurrenceValue,
    pub post_state: TwoQubitState,
}

/// Runs a recipe through oracle evolution and projective measurement.
pub fn execute_recipe(recipe: &ProtocolRecipe) -> Result<RecipeRun> {
    let psi = evolve_xplus_oracle(&recipe.params, recipe.time);
    let records = measure_pair(&psi, recipe.measured_pair(), &recipe.measure_direction)?;
    let target = recipe.target.state();
    let mut probability = 0.0;
    let mut worst = f64::INFINITY;
    for outcome in recipe.heralding_branches() {
        let r = &records[outcome.index()];
        probability += r.probability;
        worst = worst.min(fidelity(r.post_state()?, &target)?);
    }
    let post_state = *records[recipe.required_branch.index()].post_state()?;
    Ok(RecipeRun { concurrence: concurrence_pure(&post_state), records, probability, fidelity: worst, post_state })
}

/// Measures the centrals of the evolved all-+x state along `d`; the
/// records carry the resulting side-pair states.
pub fn prepare_on_sides(p: &ClusterParams, d: &MeasurementDirection, t: f64) -> Result<[MeasurementRecord; 4]> {
    p.validate()?;
    measure_pair(&evolve_xplus_oracle(p, t), Pair::Centrals, d)
}
