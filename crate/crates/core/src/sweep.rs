//! Parameter-grid evaluation with deterministic CSV output.
//!
//! Axes may be dimensionless products (`Jt`, `Jzt`, `J0t`) or plain
//! parameters (`dphi`, `theta`, `phi`, `t`). A scaled axis is turned back
//! into a coupling by dividing by `t`, which defaults to 1. Parameters the
//! chosen quantity does not depend on default to 0.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::entanglement::{bell_fidelity_curves, concurrence_psi3, concurrence_pure, concurrence_xi, concurrence_xy};
use crate::error::{Error, Result};
use crate::evolution::{evolve_oracle, evolve_xplus_oracle, InitialProductState};
use crate::hamiltonian::{build_hamiltonian, ClusterParams};
use crate::hilbert::{Pair, TwoQubitState};
use crate::measurement::{
    measure_pair, side_branch_amplitudes, side_branch_states, MeasurementDirection, UNREACHABLE_PROB,
};
use crate::protocols::bell_conditions;

pub const AXIS_NAMES: [&str; 7] = ["Jt", "Jzt", "J0t", "dphi", "theta", "phi", "t"];

/// Names accepted in [`SweepConfig::fixed`].
pub const PARAM_NAMES: [&str; 12] = ["J", "Jz", "J0", "h", "hp", "theta", "phi", "dphi", "t", "Jt", "Jzt", "J0t"];

/// Fraction of grid points re-evaluated through the oracle by default.
pub const DEFAULT_CHECK_FRACTION: f64 = 0.05;

/// Oracle cross-check components whose branch probability is below this are skipped.
const CHECK_MIN_PROB: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// Dimer concurrence with the sides frozen, equatorial start, azimuth gap `dphi`.
    ConcurrenceXY,
    /// Concurrence of the z-measurement branches.
    ConcurrenceXi,
    /// Concurrence of the −− branch under the Bell-direction conditions.
    ConcurrencePsi3,
    /// Branch probabilities F1, F2, F3 under the Bell-direction conditions.
    BellFidelities,
    /// Concurrence of each side-measurement branch, by brute-force evolution.
    OracleConcurrence,
    /// Side-measurement outcome probabilities along (theta, phi).
    MeasureProbabilities,
}

impl Quantity {
    pub fn components(self) -> &'static [&'static str] {
        match self {
            Quantity::ConcurrenceXY | Quantity::ConcurrenceXi | Quantity::ConcurrencePsi3 => &["C"],
            Quantity::BellFidelities => &["F1", "F2", "F3"],
            Quantity::OracleConcurrence => &["C_pp", "C_pm", "C_mp", "C_mm"],
            Quantity::MeasureProbabilities => &["P_pp", "P_pm", "P_mp", "P_mm"],
        }
    }

    /// Parameters that must come from an axis or the fixed map.
    pub fn required(self) -> &'static [&'static str] {
        match self {
            Quantity::ConcurrenceXY => &["J", "Jz", "dphi"],
            Quantity::ConcurrenceXi => &["J", "Jz"],
            Quantity::ConcurrencePsi3 => &["J", "Jz", "J0"],
            Quantity::BellFidelities => &["J0"],
            Quantity::OracleConcurrence => &["J", "Jz", "J0", "theta", "phi"],
            Quantity::MeasureProbabilities => &["J0", "theta", "phi"],
        }
    }
}

impl FromStr for Quantity {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "concurrence-xy" => Ok(Quantity::ConcurrenceXY),
            "concurrence-xi" => Ok(Quantity::ConcurrenceXi),
            "concurrence-psi3" => Ok(Quantity::ConcurrencePsi3),
            "bell-fidelities" => Ok(Quantity::BellFidelities),
            "oracle-concurrence" => Ok(Quantity::OracleConcurrence),
            "measure-probabilities" => Ok(Quantity::MeasureProbabilities),
            other => Err(format!("unknown quantity '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisRange {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl AxisRange {
    pub fn new(name: &str, start: f64, stop: f64, count: usize) -> Self {
        AxisRange { name: name.to_string(), start, stop, count }
    }

    /// Evenly spaced values; the last one is `stop` exactly.
    pub fn values(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.stop } else { self.start + i as f64 * step }).collect()
    }

    fn validate(&self) -> Result<()> {
        if !AXIS_NAMES.contains(&self.name.as_str()) {
            return Err(Error::UnknownAxis(self.name.clone()));
        }
        let invalid = |reason: &str| Error::InvalidAxis { name: self.name.clone(), reason: reason.to_string() };
        if self.count < 2 {
            return Err(invalid("count must be at least 2"));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(invalid("range bounds must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub quantity: Quantity,
    pub axes: Vec<AxisRange>,
    pub fixed: BTreeMap<String, f64>,
    pub output_path: Option<PathBuf>,
    pub check_fraction: f64,
    pub check_seed: u64,
}

impl SweepConfig {
    pub fn new(quantity: Quantity) -> Self {
        SweepConfig {
            quantity,
            axes: Vec::new(),
            fixed: BTreeMap::new(),
            output_path: None,
            check_fraction: DEFAULT_CHECK_FRACTION,
            check_seed: 0,
        }
    }

    pub fn axis(mut self, name: &str, start: f64, stop: f64, count: usize) -> Self {
        self.axes.push(AxisRange::new(name, start, stop, count));
        self
    }

    pub fn fix(mut self, name: &str, value: f64) -> Self {
        self.fixed.insert(name.to_string(), value);
        self
    }

    pub fn output(mut self, path: impl Into<PathBuf>) -> Self {
        self.output_path = Some(path.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidAxis {
                name: self.axes.iter().map(|a| a.name.as_str()).collect::<Vec<_>>().join(","),
                reason: format!("a sweep takes one or two axes, got {}", self.axes.len()),
            });
        }
        for a in &self.axes {
            a.validate()?;
        }
        if self.axes.len() == 2 && self.axes[0].name == self.axes[1].name {
            return Err(Error::InvalidAxis { name: self.axes[0].name.clone(), reason: "axis repeated".into() });
        }
        for (name, value) in &self.fixed {
            if !PARAM_NAMES.contains(&name.as_str()) {
                return Err(Error::UnknownParameter(name.clone()));
            }
            if !value.is_finite() {
                return Err(Error::InvalidAxis { name: name.clone(), reason: "fixed value must be finite".into() });
            }
            if self.axes.iter().any(|a| &a.name == name) {
                return Err(Error::ParameterConflict(name.clone()));
            }
        }
        let given = |n: &str| self.fixed.contains_key(n) || self.axes.iter().any(|a| a.name == n);
        for (plain, scaled) in [("J", "Jt"), ("Jz", "Jzt"), ("J0", "J0t")] {
            if given(plain) && given(scaled) {
                return Err(Error::ParameterConflict(plain.to_string()));
            }
        }
        for &req in self.quantity.required() {
            let scaled = match req {
                "J" => Some("Jt"),
                "Jz" => Some("Jzt"),
                "J0" => Some("J0t"),
                _ => None,
            };
            if !given(req) && !scaled.is_some_and(given) {
                return Err(Error::MissingParameter(req.to_string()));
            }
        }
        if !(0.0..=1.0).contains(&self.check_fraction) {
            return Err(Error::InvalidAxis { name: "check_fraction".into(), reason: "must lie in [0, 1]".into() });
        }
        Ok(())
    }

    pub fn point_count(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }
}

/// Everything a quantity can depend on at one grid point.
#[derive(Debug, Clone, Copy)]
pub struct GridPoint {
    pub params: ClusterParams,
    pub theta: f64,
    pub phi: f64,
    pub dphi: f64,
    pub t: f64,
}

fn resolve(cfg: &SweepConfig, coords: &[f64]) -> GridPoint {
    let get = |name: &str| {
        cfg.axes
            .iter()
            .zip(coords)
            .find(|(a, _)| a.name == name)
            .map(|(_, &v)| v)
            .or_else(|| cfg.fixed.get(name).copied())
    };
    let t = get("t").unwrap_or(1.0);
    let coupling = |plain: &str, scaled: &str| get(plain).or_else(|| get(scaled).map(|x| x / t)).unwrap_or(0.0);
    GridPoint {
        params: ClusterParams {
            j: coupling("J", "Jt"),
            jz: coupling("Jz", "Jzt"),
            j0: coupling("J0", "J0t"),
            h: get("h").unwrap_or(0.0),
            hp: get("hp").unwrap_or(0.0),
        },
        theta: get("theta").unwrap_or(0.0),
        phi: get("phi").unwrap_or(0.0),
        dphi: get("dphi").unwrap_or(0.0),
        t,
    }
}

fn side_direction(pt: &GridPoint) -> Result<MeasurementDirection> {
    MeasurementDirection::new(pt.theta, pt.phi)
}

fn branch_concurrences(psi: &crate::StateVector16, d: &MeasurementDirection) -> Result<Vec<f64>> {
    let records = measure_pair(psi, Pair::Sides, d)?;
    Ok(records.iter().map(|r| r.post_state().map(|s| concurrence_pure(s).value()).unwrap_or(0.0)).collect())
}

/// The sweep value of `q` at `pt`: closed form for every quantity except
/// [`Quantity::OracleConcurrence`].
pub fn evaluate(q: Quantity, pt: &GridPoint) -> Result<Vec<f64>> {
    let p = &pt.params;
    Ok(match q {
        Quantity::ConcurrenceXY => vec![concurrence_xy(p.j, p.jz, pt.dphi, pt.t).value()],
        Quantity::ConcurrenceXi => vec![concurrence_xi(p.j, p.jz, pt.t).value()],
        Quantity::ConcurrencePsi3 => vec![concurrence_psi3(p.j, p.jz, p.j0, pt.t).value()],
        Quantity::BellFidelities => {
            let f = bell_fidelity_curves(p.j0, pt.t);
            vec![f.f1, f.f2, f.f3]
        }
        Quantity::OracleConcurrence => branch_concurrences(&evolve_xplus_oracle(p, pt.t), &side_direction(pt)?)?,
        Quantity::MeasureProbabilities => {
            let [a1, a2, a3] = side_branch_amplitudes(p, &side_direction(pt)?, pt.t);
            [a1, a2, a2, a3].iter().map(|a| a.powi(-2) / 16.0).collect()
        }
    })
}

/// The same quantity computed the other way (brute-force evolution for the
/// closed forms, closed-form branch states for the oracle quantity), paired
/// with a mask of components worth comparing.
pub fn evaluate_cross(q: Quantity, pt: &GridPoint) -> Result<(Vec<f64>, Vec<bool>)> {
    let p = &pt.params;
    let all = |n: usize| vec![true; n];
    Ok(match q {
        Quantity::ConcurrenceXY => {
            let init = InitialProductState::equatorial(pt.dphi, 0.0);
            let psi = evolve_oracle(&build_hamiltonian(p), &init.full_state(), pt.t);
            let dimer = TwoQubitState::from_array(psi.pair_slice(Pair::Sides, 0));
            (vec![concurrence_pure(&dimer).value()], all(1))
        }
        Quantity::ConcurrenceXi => {
            let c = branch_concurrences(&evolve_xplus_oracle(p, pt.t), &MeasurementDirection::z())?;
            (vec![c[0]], all(1))
        }
        Quantity::ConcurrencePsi3 => {
            let c = branch_concurrences(&evolve_xplus_oracle(p, pt.t), &bell_conditions(p.h, pt.t))?;
            (vec![c[3]], all(1))
        }
        Quantity::BellFidelities | Quantity::MeasureProbabilities => {
            let d = match q {
                Quantity::BellFidelities => bell_conditions(p.h, pt.t),
                _ => side_direction(pt)?,
            };
            let r = measure_pair(&evolve_xplus_oracle(p, pt.t), Pair::Sides, &d)?;
            let pr: Vec<f64> = r.iter().map(|r| r.probability).collect();
            match q {
                Quantity::BellFidelities => (vec![pr[0], pr[1] + pr[2], pr[3]], all(3)),
                _ => (pr, all(4)),
            }
        }
        Quantity::OracleConcurrence => {
            let d = side_direction(pt)?;
            let [a1, a2, a3] = side_branch_amplitudes(p, &d, pt.t);
            let states = side_branch_states(p, &d, pt.t);
            let probs = [a1, a2, a2, a3].map(|a| a.powi(-2) / 16.0);
            let slots = [0, 1, 1, 2];
            let values = slots
                .iter()
                .zip(probs)
                .map(|(&k, pr)| if pr >= UNREACHABLE_PROB { concurrence_pure(&states[k]).value() } else { 0.0 })
                .collect();
            (values, probs.iter().map(|&pr| pr >= CHECK_MIN_PROB).collect())
        }
    })
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub header: Vec<String>,
    /// Axis coordinates followed by the quantity components.
    pub rows: Vec<Vec<f64>>,
    /// Grid points re-evaluated through the cross route.
    pub checked_points: usize,
    /// Largest |sweep value − cross value| over the checked points.
    pub max_cross_deviation: f64,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_g12(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

fn coords_label(cfg: &SweepConfig, coords: &[f64]) -> String {
    let mut s = String::new();
    for (a, v) in cfg.axes.iter().zip(coords) {
        if !s.is_empty() {
            s.push_str(", ");
        }
        let _ = write!(s, "{}={}", a.name, format_g12(*v));
    }
    s
}

/// Evaluates the configured quantity over the grid, first axis outermost.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let values: Vec<Vec<f64>> = cfg.axes.iter().map(AxisRange::values).collect();
    let inner = if values.len() == 2 { values[1].len() } else { 1 };
    let n = cfg.point_count();
    let coords_of = |i: usize| -> Vec<f64> {
        match values.len() {
            1 => vec![values[0][i]],
            _ => vec![values[0][i / inner], values[1][i % inner]],
        }
    };

    let rows = (0..n)
        .into_par_iter()
        .map(|i| {
            let coords = coords_of(i);
            let out = evaluate(cfg.quantity, &resolve(cfg, &coords))?;
            if out.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFiniteResult { coords: coords_label(cfg, &coords) });
            }
            Ok(coords.into_iter().chain(out).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;

    let picks = check_indices(n, cfg.check_fraction, cfg.check_seed);
    let ncoords = cfg.axes.len();
    let max_cross_deviation = picks
        .par_iter()
        .map(|&i| {
            let (cross, mask) = evaluate_cross(cfg.quantity, &resolve(cfg, &rows[i][..ncoords]))?;
            Ok(rows[i][ncoords..]
                .iter()
                .zip(cross.iter().zip(&mask))
                .filter(|(_, (_, &keep))| keep)
                .map(|(a, (b, _))| (a - b).abs())
                .fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let header = cfg
        .axes
        .iter()
        .map(|a| a.name.clone())
        .chain(cfg.quantity.components().iter().map(|s| s.to_string()))
        .collect();
    Ok(SweepTable { header, rows, checked_points: picks.len(), max_cross_deviation })
}

/// Runs the sweep and writes the CSV to `cfg.output_path` when set.
pub fn run_and_write(cfg: &SweepConfig) -> Result<SweepTable> {
    let table = run_sweep(cfg)?;
    if let Some(path) = &cfg.output_path {
        table.write_csv(path)?;
    }
    Ok(table)
}

fn check_indices(n: usize, fraction: f64, seed: u64) -> Vec<usize> {
    let amount = ((n as f64 * fraction).ceil() as usize).min(n);
    if amount == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = rand::seq::index::sample(&mut rng, n, amount).into_vec();
    picks.sort_unstable();
    picks
}

/// Renders like C's `%.12g`, except that negative zero prints as `0`.
pub fn format_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// Concurrence over (Jt, Jzt) ∈ [0, 4π]² for a given azimuth gap.
    Fig2 { dphi: f64 },
    /// Bell-direction branch probabilities over J0t ∈ [0, 4π].
    Fig3,
    /// −− branch concurrence against t at J0 = 1, J = 0, one file per Jz.
    Fig4,
}

pub const FIG2_COUNT: usize = 81;
pub const FIG3_COUNT: usize = 401;
pub const FIG4_COUNT: usize = 2001;
pub const FIG4_RATIOS: [f64; 3] = [1.0, 2.0, 4.0];

/// The grids behind each preset, with output files placed in `out_dir`.
pub fn preset_configs(preset: Preset, out_dir: &Path) -> Vec<SweepConfig> {
    match preset {
        Preset::Fig2 { dphi } => vec![SweepConfig::new(Quantity::ConcurrenceXY)
            .axis("Jt", 0.0, 4.0 * PI, FIG2_COUNT)
            .axis("Jzt", 0.0, 4.0 * PI, FIG2_COUNT)
            .fix("dphi", dphi)
            .output(out_dir.join("fig2.csv"))],
        Preset::Fig3 => vec![SweepConfig::new(Quantity::BellFidelities)
            .axis("J0t", 0.0, 4.0 * PI, FIG3_COUNT)
            .output(out_dir.join("fig3.csv"))],
        Preset::Fig4 => FIG4_RATIOS
            .iter()
            .map(|&r| {
                SweepConfig::new(Quantity::ConcurrencePsi3)
                    .axis("t", 0.0, 2.0 * PI, FIG4_COUNT)
                    .fix("J0", 1.0)
                    .fix("J", 0.0)
                    .fix("Jz", r)
                    .output(out_dir.join(format!("fig4_ratio{r}.csv")))
            })
            .collect(),
    }
}
