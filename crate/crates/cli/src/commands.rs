use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use diamond_core::entanglement::{concurrence_pure, concurrence_xy};
use diamond_core::evolution::{
    evolve_oracle, evolve_stationary_sides, evolve_xplus_decomposed, xplus_initial_state, InitialProductState,
};
use diamond_core::hamiltonian::{analytic_eigensystem, build_hamiltonian};
use diamond_core::hilbert::{phase_distance, BasisIndex, SpinLabel};
use diamond_core::measurement::{measure_pair, sample_counts, MeasurementDirection, PairOutcome};
use diamond_core::protocols::{
    execute_recipe, prepare_bell_on_centrals, prepare_bell_on_sides, BellRoute, BellTarget, RecipeOptions,
};
use diamond_core::sweep::{self, format_g12, AxisRange, Preset, Quantity, SweepConfig};
use diamond_core::verify::{run_verification, Formulas, Mutation};
use diamond_core::{Error, Pair, Result, StateVector16, TwoQubitState, C64};

use crate::config::Settings;
use crate::manifest::RunManifest;

const EIGEN_RESIDUAL_TOL: f64 = 1e-12;
const SPECTRUM_TOL: f64 = 1e-10;
const PROTOCOL_TOL: f64 = 1e-9;
const SWEEP_CROSS_TOL: f64 = 1e-10;

pub struct Context {
    pub settings: Settings,
    pub command_line: String,
}

impl Context {
    fn manifest(&self, seed: Option<u64>, outputs: Vec<PathBuf>) -> Result<RunManifest> {
        Ok(RunManifest {
            command: self.command_line.clone(),
            params: self.settings.params()?,
            theta: self.settings.theta(),
            phi: self.settings.phi(),
            t: self.settings.t(),
            seed,
            outputs,
            tool_version: format!("diamond {}", env!("CARGO_PKG_VERSION")),
        })
    }

    /// Writes `text` to `out` (if given) plus its manifest.
    fn emit(&self, text: String, passed: bool, seed: Option<u64>, out: Option<&Path>) -> Result<Outcome> {
        if let Some(path) = out {
            std::fs::write(path, &text)?;
            self.manifest(seed, vec![path.to_path_buf()])?.write_all()?;
        }
        Ok(Outcome { text, passed })
    }
}

pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

fn g(x: f64) -> String {
    format_g12(x)
}

fn complex(z: C64) -> String {
    format!("{} {}", g(z.re), g(z.im))
}

fn spin_pair(index: usize) -> &'static str {
    ["uu", "ud", "du", "dd"][index]
}

fn spins(index: usize) -> String {
    BasisIndex::new(index)
        .expect("index below 16")
        .spins()
        .iter()
        .map(|s| match s {
            SpinLabel::Up => 'u',
            SpinLabel::Down => 'd',
        })
        .collect()
}

fn pair_state(s: &TwoQubitState) -> String {
    s.to_array().iter().map(|&z| complex(z)).collect::<Vec<_>>().join("  ")
}

pub fn eigen(ctx: &Context, out: Option<&Path>) -> Result<Outcome> {
    let p = ctx.settings.params()?;
    let h = build_hamiltonian(&p);
    let pairs = analytic_eigensystem(&p);
    let dimer = ["uu", "T0", "S0", "dd"];
    let mut text = String::new();
    writeln!(text, "{:>3}  {:<4}  {:<5}  {:>20}  {:>10}", "n", "side", "dimer", "energy", "residual").unwrap();
    let mut worst: f64 = 0.0;
    for (n, pair) in pairs.iter().enumerate() {
        let r = pair.residual(&h);
        worst = worst.max(r);
        writeln!(
            text,
            "{:>3}  {:<4}  {:<5}  {:>20}  {:>10.3e}",
            n + 1,
            spin_pair(n / 4),
            dimer[n % 4],
            g(pair.energy),
            r
        )
        .unwrap();
    }
    let mut analytic: Vec<f64> = pairs.iter().map(|e| e.energy).collect();
    analytic.sort_by(f64::total_cmp);
    let spectrum_dev = analytic.iter().zip(h.numeric_energies()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    writeln!(text, "max residual {worst:.3e}").unwrap();
    writeln!(text, "max spectrum deviation {spectrum_dev:.3e}").unwrap();
    ctx.emit(text, worst < EIGEN_RESIDUAL_TOL && spectrum_dev < SPECTRUM_TOL, None, out)
}

pub fn evolve(ctx: &Context, xplus: bool, dphi: f64, out: Option<&Path>) -> Result<Outcome> {
    let p = ctx.settings.params()?;
    let t = ctx.settings.t();
    let h = build_hamiltonian(&p);
    let mut text = String::new();
    let (oracle, closed, extra) = if xplus {
        let oracle = evolve_oracle(&h, &xplus_initial_state(), t);
        (oracle, evolve_xplus_decomposed(&p, t).reassemble_from_xi(), String::new())
    } else {
        let init = InitialProductState::equatorial(dphi, 0.0);
        let oracle = evolve_oracle(&h, &init.full_state(), t);
        let dimer = evolve_stationary_sides(&p, &init, t)?;
        let closed = StateVector16::product(&TwoQubitState::basis(0), &dimer);
        let c_oracle = concurrence_pure(&TwoQubitState::from_array(oracle.pair_slice(Pair::Sides, 0))).value();
        let c_closed = concurrence_xy(p.j, p.jz, dphi, t).value();
        let extra = format!("concurrence closed-form {}  brute-force {}\n", g(c_closed), g(c_oracle));
        (oracle, closed, extra)
    };
    writeln!(text, "t = {}", g(t)).unwrap();
    writeln!(text, "{:>5}  {:<5}  {:>20}  {:>20}", "index", "spins", "re", "im").unwrap();
    for i in 0..16 {
        writeln!(text, "{:>5}  {:<5}  {:>20}  {:>20}", i, spins(i), g(oracle[i].re), g(oracle[i].im)).unwrap();
    }
    let dist = phase_distance(&closed, &oracle);
    writeln!(text, "closed-form phase distance {dist:.3e}").unwrap();
    text.push_str(&extra);
    ctx.emit(text, dist < 1e-10, None, out)
}

pub fn measure(ctx: &Context, centrals: bool, samples: usize, seed: u64, out: Option<&Path>) -> Result<Outcome> {
    let p = ctx.settings.params()?;
    let t = ctx.settings.t();
    let d = MeasurementDirection::new(ctx.settings.theta(), ctx.settings.phi())?;
    let pair = if centrals { Pair::Centrals } else { Pair::Sides };
    let psi = evolve_oracle(&build_hamiltonian(&p), &xplus_initial_state(), t);
    let records = measure_pair(&psi, pair, &d)?;
    let mut text = String::new();
    writeln!(text, "measured {pair} along theta {} phi {} at t {}", g(d.theta()), g(d.phi()), g(t)).unwrap();
    writeln!(text, "{:<7}  {:>16}  {:>16}  post-state (re im per amplitude)", "outcome", "probability", "concurrence")
        .unwrap();
    for r in &records {
        match r.post_state() {
            Ok(s) => writeln!(
                text,
                "{:<7}  {:>16}  {:>16}  {}",
                r.outcome.to_string(),
                g(r.probability),
                g(concurrence_pure(s).value()),
                pair_state(s)
            ),
            Err(_) => {
                writeln!(text, "{:<7}  {:>16}  {:>16}  unreachable", r.outcome.to_string(), g(r.probability), "-")
            }
        }
        .unwrap();
    }
    let seed_used = (samples > 0).then_some(seed);
    if samples > 0 {
        let counts = sample_counts(&records, samples, seed);
        writeln!(text, "{samples} samples, seed {seed}").unwrap();
        for (o, c) in PairOutcome::ALL.iter().zip(counts) {
            writeln!(text, "{:<7}  {:>8}  {}", o.to_string(), c, g(c as f64 / samples as f64)).unwrap();
        }
    }
    ctx.emit(text, true, seed_used, out)
}

pub struct BellRequest {
    pub target: String,
    pub branch: Option<PairOutcome>,
    pub route: Option<BellRoute>,
    pub n: Option<i64>,
    pub on_sides: bool,
}

fn route_name(r: BellRoute) -> &'static str {
    match r {
        BellRoute::Direct => "direct",
        BellRoute::Mixed => "mixed",
        BellRoute::MixedLate => "mixed-late",
    }
}

pub fn bell(ctx: &Context, req: &BellRequest, out: Option<&Path>) -> Result<Outcome> {
    let target: BellTarget = req.target.parse().map_err(Error::Recipe)?;
    let mixed = matches!(req.branch, Some(PairOutcome::PM) | Some(PairOutcome::MP));
    let route = match (req.route, req.branch) {
        (Some(r), None) => r,
        (None, _) if mixed => BellRoute::Mixed,
        (None, _) => BellRoute::Direct,
        (Some(r), Some(_)) if mixed == (r != BellRoute::Direct) => r,
        (Some(r), Some(b)) => {
            return Err(Error::Recipe(format!("outcome {b} does not belong to the {} route", route_name(r))));
        }
    };
    let p = ctx.settings.params()?;
    let opts = RecipeOptions { route, n: req.n };
    let recipe = if req.on_sides {
        prepare_bell_on_sides(&p, target, opts)?
    } else {
        prepare_bell_on_centrals(&p, target, opts)?
    };
    if let Some(b) = req.branch {
        if !recipe.heralding_branches().contains(&b) {
            return Err(Error::Recipe(format!("{target} is not heralded by outcome {b}")));
        }
    }
    let run = execute_recipe(&recipe)?;
    let heralds: Vec<String> = recipe.heralding_branches().iter().map(|b| b.to_string()).collect();
    let rp = &recipe.params;
    let mut text = String::new();
    let mut row = |k: &str, v: String| writeln!(text, "{k:<22} {v}").unwrap();
    row("target", target.to_string());
    row("prepared pair", recipe.pair_prepared.to_string());
    row("measured pair", recipe.measured_pair().to_string());
    row("route", route_name(route).to_string());
    row("params", format!("J {} Jz {} J0 {} h {} hp {}", g(rp.j), g(rp.jz), g(rp.j0), g(rp.h), g(rp.hp)));
    row("time", g(recipe.time));
    row("theta", g(recipe.measure_direction.theta()));
    row("phi", g(recipe.measure_direction.phi()));
    row("n", recipe.n.map_or("-".into(), |n| n.to_string()));
    row("heralding outcomes", heralds.join(","));
    row("expected probability", g(recipe.expected_probability));
    row("expected fidelity", g(recipe.expected_fidelity));
    row("probability", g(run.probability));
    row("fidelity", g(run.fidelity));
    row("concurrence", g(run.concurrence.value()));
    let all: Vec<String> = run.records.iter().map(|r| format!("{} {}", r.outcome, g(r.probability))).collect();
    row("outcome probabilities", all.join("  "));
    row("post-state", pair_state(&run.post_state));
    let passed = (run.probability - recipe.expected_probability).abs() <= PROTOCOL_TOL
        && run.fidelity >= recipe.expected_fidelity - PROTOCOL_TOL;
    ctx.emit(text, passed, None, out)
}

pub fn verify(ctx: &Context, trials: usize, seed: u64, mutate: Option<&str>, out: Option<&Path>) -> Result<Outcome> {
    let formulas = match mutate {
        Some(m) => Formulas::mutated(m.parse::<Mutation>().map_err(Error::Recipe)?),
        None => Formulas::default(),
    };
    let report = run_verification(trials, seed, &formulas)?;
    ctx.emit(format!("{report}\n"), report.passed(), Some(seed), out)
}

pub struct SweepRequest {
    pub preset: Option<Preset>,
    pub quantity: Option<String>,
    pub axes: Vec<String>,
    pub fixed: Vec<String>,
    pub check_fraction: f64,
    pub check_seed: u64,
    pub out: Option<PathBuf>,
}

fn parse_axis(spec: &str) -> Result<AxisRange> {
    let invalid = |reason: &str| Error::InvalidAxis { name: spec.to_string(), reason: reason.to_string() };
    let parts: Vec<&str> = spec.split(':').collect();
    let [name, start, stop, count] = parts[..] else {
        return Err(invalid("expected name:start:stop:count"));
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| invalid("bounds must be numbers"));
    let count = count.trim().parse::<usize>().map_err(|_| invalid("count must be a positive integer"))?;
    Ok(AxisRange::new(name.trim(), num(start)?, num(stop)?, count))
}

fn parse_fix(spec: &str) -> Result<(String, f64)> {
    let (k, v) =
        spec.split_once('=').ok_or_else(|| Error::Recipe(format!("--fix expects name=value, got '{spec}'")))?;
    let v = v.trim().parse::<f64>().map_err(|_| Error::Recipe(format!("'{}' is not a number", v.trim())))?;
    Ok((k.trim().to_string(), v))
}

fn scaled_name(key: &str) -> Option<&'static str> {
    match key {
        "J" => Some("Jt"),
        "Jz" => Some("Jzt"),
        "J0" => Some("J0t"),
        _ => None,
    }
}

fn custom_config(ctx: &Context, req: &SweepRequest) -> Result<SweepConfig> {
    let quantity: Quantity = req.quantity.as_deref().unwrap_or_default().parse().map_err(Error::Recipe)?;
    let mut cfg = SweepConfig::new(quantity);
    for a in &req.axes {
        cfg.axes.push(parse_axis(a)?);
    }
    let on_axis = |name: &str| cfg.axes.iter().any(|a| a.name == name);
    let mut fixed = BTreeMap::new();
    for (key, value) in ctx.settings.explicit() {
        if !on_axis(key) && !scaled_name(key).is_some_and(on_axis) {
            fixed.insert(key.to_string(), value);
        }
    }
    for f in &req.fixed {
        let (k, v) = parse_fix(f)?;
        fixed.insert(k, v);
    }
    cfg.fixed = fixed;
    cfg.check_fraction = req.check_fraction;
    cfg.check_seed = req.check_seed;
    cfg.output_path = Some(req.out.clone().unwrap_or_else(|| PathBuf::from("sweep.csv")));
    Ok(cfg)
}

pub fn sweep(ctx: &Context, req: &SweepRequest) -> Result<Outcome> {
    let configs = match req.preset {
        Some(preset) => {
            let dir = req.out.clone().unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&dir)?;
            let mut cfgs = sweep::preset_configs(preset, &dir);
            for c in &mut cfgs {
                c.check_fraction = req.check_fraction;
                c.check_seed = req.check_seed;
            }
            cfgs
        }
        None => vec![custom_config(ctx, req)?],
    };
    let mut text = String::new();
    let mut passed = true;
    let mut outputs = Vec::new();
    for cfg in &configs {
        let table = sweep::run_and_write(cfg)?;
        let path = cfg.output_path.clone().expect("sweeps always have an output path");
        let ok = table.max_cross_deviation < SWEEP_CROSS_TOL;
        passed &= ok;
        writeln!(
            text,
            "wrote {}: {} rows, {} points cross-checked, max deviation {:.3e}{}",
            path.display(),
            table.rows.len(),
            table.checked_points,
            table.max_cross_deviation,
            if ok { "" } else { " (above tolerance)" }
        )
        .unwrap();
        outputs.push(path);
    }
    ctx.manifest(Some(req.check_seed), outputs)?.write_all()?;
    Ok(Outcome { text, passed })
}
