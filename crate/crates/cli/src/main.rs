mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::Settings;

#[derive(Parser, Debug)]
#[command(name = "diamond", version, about = "Exact simulator of the spin-1/2 Ising-Heisenberg diamond cluster")]
struct Cli {
    #[command(flatten)]
    globals: Globals,

    #[command(subcommand)]
    command: Command,
}

/// Couplings default to 1, fields and angles to 0, time to 1.
#[derive(Args, Debug)]
struct Globals {
    /// XY exchange of the central dimer
    #[arg(long = "J", global = true, allow_negative_numbers = true)]
    j: Option<f64>,
    /// Z exchange of the central dimer
    #[arg(long = "Jz", global = true, allow_negative_numbers = true)]
    jz: Option<f64>,
    /// Ising coupling between side and central spins
    #[arg(long = "J0", global = true, allow_negative_numbers = true)]
    j0: Option<f64>,
    /// Field on the side spins
    #[arg(long = "h", global = true, allow_negative_numbers = true)]
    h: Option<f64>,
    /// Field on the central spins
    #[arg(long = "hp", global = true, allow_negative_numbers = true)]
    hp: Option<f64>,
    /// Polar angle of the measurement direction
    #[arg(long, global = true, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Azimuth of the measurement direction
    #[arg(long, global = true, allow_negative_numbers = true)]
    phi: Option<f64>,
    /// Evolution time
    #[arg(long = "t", global = true, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Flat `key = value` file with any of the flags above; flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form eigensystem with residuals against the numeric Hamiltonian
    Eigen(OutArgs),
    /// Evolve a product state and compare closed form with brute force
    Evolve(EvolveArgs),
    /// Measure one pair of the evolved all-+x state
    Measure(MeasureArgs),
    /// Build and run a Bell-state preparation recipe
    Bell(BellArgs),
    /// Run the formula-versus-oracle verification suites
    Verify(VerifyArgs),
    /// Evaluate a quantity on a parameter grid and write CSV
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Also write the report to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum InitKind {
    /// All four spins along +x
    Xplus,
    /// Sides up, centrals in the xy plane with azimuth gap --dphi
    Equatorial,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    #[arg(long, value_enum, default_value = "xplus")]
    init: InitKind,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    dphi: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum PairArg {
    Sides,
    Centrals,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    /// Pair to measure
    #[arg(long, value_enum, default_value = "sides")]
    pair: PairArg,
    /// Draw this many seeded samples and report outcome frequencies
    #[arg(long, default_value_t = 0)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum BranchArg {
    PlusPlus,
    PlusMinus,
    MinusPlus,
    MinusMinus,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum RouteArg {
    Direct,
    Mixed,
    MixedLate,
}

#[derive(Args, Debug)]
struct BellArgs {
    /// phi-plus, phi-minus, psi-plus or psi-minus
    #[arg(long)]
    target: String,
    /// Heralding outcome; plus-minus and minus-plus select the mixed route
    #[arg(long, value_enum)]
    branch: Option<BranchArg>,
    #[arg(long, value_enum)]
    route: Option<RouteArg>,
    /// Integer n in h'T = n pi/2 (parity fixed by the target)
    #[arg(long, allow_negative_numbers = true)]
    n: Option<i64>,
    /// Prepare the side pair by measuring the centrals (needs J = Jz)
    #[arg(long)]
    on_sides: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, hide = true)]
    mutate: Option<String>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum PresetArg {
    Fig2,
    Fig3,
    Fig4,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Figure grid; writes into the --out directory
    #[arg(long, value_enum, conflicts_with_all = ["quantity", "axis", "fix"])]
    preset: Option<PresetArg>,
    /// Azimuth gap for the fig2 preset
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    dphi: f64,
    /// concurrence-xy, concurrence-xi, concurrence-psi3, bell-fidelities,
    /// oracle-concurrence or measure-probabilities
    #[arg(long, required_unless_present = "preset")]
    quantity: Option<String>,
    /// name:start:stop:count, repeatable (at most two)
    #[arg(long, allow_hyphen_values = true)]
    axis: Vec<String>,
    /// name=value, repeatable
    #[arg(long, allow_hyphen_values = true)]
    fix: Vec<String>,
    /// Fraction of grid points re-checked through the independent route
    #[arg(long, default_value_t = diamond_core::sweep::DEFAULT_CHECK_FRACTION)]
    check_fraction: f64,
    #[arg(long, default_value_t = 0)]
    check_seed: u64,
    /// Output file (custom sweep) or directory (preset)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn settings(g: &Globals) -> diamond_core::Result<Settings> {
    let mut flags = Settings::default();
    for (key, value) in [
        ("J", g.j),
        ("Jz", g.jz),
        ("J0", g.j0),
        ("h", g.h),
        ("hp", g.hp),
        ("theta", g.theta),
        ("phi", g.phi),
        ("t", g.t),
    ] {
        flags.set(key, value);
    }
    let base = match &g.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    Ok(base.overlay(&flags))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command_line = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let result = settings(&cli.globals).and_then(|s| {
        let ctx = commands::Context { settings: s, command_line };
        match cli.command {
            Command::Eigen(a) => commands::eigen(&ctx, a.out.as_deref()),
            Command::Evolve(a) => commands::evolve(&ctx, a.init == InitKind::Xplus, a.dphi, a.out.out.as_deref()),
            Command::Measure(a) => {
                commands::measure(&ctx, a.pair == PairArg::Centrals, a.samples, a.seed, a.out.out.as_deref())
            }
            Command::Bell(a) => commands::bell(&ctx, &bell_request(&a), a.out.out.as_deref()),
            Command::Verify(a) => commands::verify(&ctx, a.trials, a.seed, a.mutate.as_deref(), a.out.out.as_deref()),
            Command::Sweep(a) => commands::sweep(&ctx, &sweep_request(&a)),
        }
    });
    match result {
        Ok(outcome) => {
            print!("{}", outcome.text);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn bell_request(a: &BellArgs) -> commands::BellRequest {
    use diamond_core::measurement::PairOutcome;
    commands::BellRequest {
        target: a.target.clone(),
        branch: a.branch.map(|b| match b {
            BranchArg::PlusPlus => PairOutcome::PP,
            BranchArg::PlusMinus => PairOutcome::PM,
            BranchArg::MinusPlus => PairOutcome::MP,
            BranchArg::MinusMinus => PairOutcome::MM,
        }),
        route: a.route.map(|r| match r {
            RouteArg::Direct => diamond_core::protocols::BellRoute::Direct,
            RouteArg::Mixed => diamond_core::protocols::BellRoute::Mixed,
            RouteArg::MixedLate => diamond_core::protocols::BellRoute::MixedLate,
        }),
        n: a.n,
        on_sides: a.on_sides,
    }
}

fn sweep_request(a: &SweepArgs) -> commands::SweepRequest {
    commands::SweepRequest {
        preset: a.preset.map(|p| match p {
            PresetArg::Fig2 => diamond_core::sweep::Preset::Fig2 { dphi: a.dphi },
            PresetArg::Fig3 => diamond_core::sweep::Preset::Fig3,
            PresetArg::Fig4 => diamond_core::sweep::Preset::Fig4,
        }),
        quantity: a.quantity.clone(),
        axes: a.axis.clone(),
        fixed: a.fix.clone(),
        check_fraction: a.check_fraction,
        check_seed: a.check_seed,
        out: a.out.clone(),
    }
}
