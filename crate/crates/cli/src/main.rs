//! `dht`: batch front end for two-detector error-exponent regions.
//!
//! Subcommands compute regions (`region`), simulate the zero-rate coding
//! schemes (`simulate`), report the value of the detector link (`benefit`)
//! and write bundled example models (`model`). Exponents are printed in bits
//! unless `--nats` is given; rate flags take the same unit.

mod error;
mod model;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dht_core::positive_rate::{
    has_independence_structure, high_rate_region, region_achievable, region_test_against_independence,
    region_test_against_independence_no_cooperation, AchievableRegion, RatePair, SearchConfig, SearchStats, Witness,
};
use dht_core::simulator::{exact_zero_rate_errors, monte_carlo_zero_rate, ZeroRateSchemeConfig};
use dht_core::zero_rate::{
    self, cooperation_benefit_zero_rate, default_grid_step, default_threshold_grid, marginals_equal, region_coherent,
    region_concurrent_equal_marginals, region_concurrent_w1_eq2, region_concurrent_w1_ge3, region_no_cooperation,
    NoCoopMode,
};
use dht_core::{models, DetectionMode, ExponentPair, Pair, Region};
use serde::Serialize;

use error::{CliError, Result};
use model::ModelFile;
use output::Unit;

#[derive(Parser)]
#[command(name = "dht", version, about = "Error-exponent regions for a sensor with two cooperating detectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an exponent region and write its Pareto corners as CSV.
    Region(RegionArgs),
    /// Finite-blocklength error probabilities of the zero-rate scheme.
    Simulate(SimulateArgs),
    /// θ2 with and without the Detector 1 → Detector 2 link, as JSON.
    Benefit(BenefitArgs),
    /// Write a bundled model file.
    Model(ModelArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Coherent,
    Concurrent,
}

impl From<Mode> for DetectionMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Coherent => DetectionMode::Coherent,
            Mode::Concurrent => DetectionMode::Concurrent,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Regime {
    ZeroRate,
    PositiveRate,
    HighRate,
    NoCoop,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenefitRegime {
    ZeroRate,
    HighRate,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MappingArg {
    Same,
    Different,
}

impl From<MappingArg> for zero_rate::Mapping {
    fn from(m: MappingArg) -> Self {
        match m {
            MappingArg::Same => zero_rate::Mapping::Same,
            MappingArg::Different => zero_rate::Mapping::Different,
        }
    }
}

#[derive(Args)]
struct UnitArgs {
    /// Report exponents (and read rates) in nats instead of bits.
    #[arg(long)]
    nats: bool,
}

impl UnitArgs {
    fn unit(&self) -> Unit {
        if self.nats {
            Unit::Nats
        } else {
            Unit::Bits
        }
    }
}

#[derive(Args)]
struct SearchArgs {
    /// Scalarization weights traced by the auxiliary-channel search.
    #[arg(long, default_value_t = SearchConfig::default().lambda_points)]
    lambda_points: usize,
    /// Local searches per weight.
    #[arg(long, default_value_t = SearchConfig::default().restarts)]
    restarts: usize,
    /// Perturbation steps per local search.
    #[arg(long, default_value_t = SearchConfig::default().iterations)]
    iterations: usize,
    /// |U| (default |X| + 1).
    #[arg(long)]
    u_card: Option<usize>,
    /// |V| (default |U|·|Y1| + 1).
    #[arg(long)]
    v_card: Option<usize>,
    #[arg(long, default_value_t = SearchConfig::default().seed)]
    search_seed: u64,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            lambda_points: self.lambda_points,
            restarts: self.restarts,
            iterations: self.iterations,
            u_card: self.u_card,
            v_card: self.v_card,
            seed: self.search_seed,
            warm_start: Vec::new(),
        }
    }
}

#[derive(Args)]
struct RegionArgs {
    /// Model file (JSON).
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum, default_value = "coherent")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "zero-rate")]
    regime: Regime,
    /// Sensor → Detector 1 alphabet for zero-rate concurrent detection with
    /// distinct X-marginals (2 or at least 3).
    #[arg(long, default_value_t = 3)]
    w1: u8,
    /// Sensor → Detector 1 rate.
    #[arg(long)]
    r1: Option<f64>,
    /// Detector 1 → Detector 2 rate.
    #[arg(long)]
    r2: Option<f64>,
    /// Simplex grid step for the one-bit (W1 = 2) partition.
    #[arg(long)]
    grid_step: Option<f64>,
    #[command(flatten)]
    unit: UnitArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// CSV destination (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot of the frontier.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Also write region, achieving channels and search metadata as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum, default_value = "coherent")]
    mode: Mode,
    /// Exact enumeration over joint types (default).
    #[arg(long, conflicts_with = "mc")]
    exact: bool,
    /// Monte-Carlo estimation.
    #[arg(long)]
    mc: bool,
    /// Blocklengths, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Trials per hypothesis (Monte Carlo).
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Typicality radius (L∞ on types).
    #[arg(long, default_value_t = 0.1)]
    mu: f64,
    #[arg(long, default_value_t = 3)]
    w1: u8,
    /// Message assignment of the one-bit scheme.
    #[arg(long, value_enum, default_value = "different")]
    mapping: MappingArg,
    /// Partition threshold of the one-bit scheme (in the output unit).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    r: f64,
    #[command(flatten)]
    unit: UnitArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenefitArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum, default_value = "coherent")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "zero-rate")]
    regime: BenefitRegime,
    #[command(flatten)]
    unit: UnitArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Builtin {
    Example1,
    Example6,
    /// Random law used under both hypotheses.
    Identical,
    /// Random pair with X − Y2 − Y1 and a shared P_{Y1|Y2} (the link cannot help).
    MarkovY2,
    /// Random pair with X − Y1 − Y2 and a shared P_{Y2|Y1} (one detector suffices).
    MarkovY1,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum)]
    builtin: Builtin,
    /// Seed for the random builtins.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Alphabet sizes |X|,|Y1|,|Y2| for the random builtins.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [2, 2, 2])]
    sizes: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_pair(path: &Path) -> Result<Pair> {
    ModelFile::load(path)?.to_pair()
}

fn rate(v: Option<f64>, unit: Unit, name: &str) -> Result<f64> {
    let v = v.unwrap_or(0.0);
    if !v.is_finite() || v < 0.0 {
        return Err(CliError::Validation(format!("--{name} must be a finite nonnegative rate, got {v}")));
    }
    Ok(unit.to_nats(v))
}

#[derive(Serialize)]
struct RegionJson<'a> {
    unit: &'static str,
    mode: DetectionMode,
    regime: &'static str,
    is_rectangle: bool,
    /// Corners in `unit`, ascending in θ1.
    points: &'a [ExponentPair<f64>],
    /// Achieving channels; their information quantities are in nats.
    #[serde(skip_serializing_if = "Option::is_none")]
    witnesses: Option<&'a [Witness<f64>]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    search: Option<SearchJson<'a>>,
}

#[derive(Serialize)]
struct SearchJson<'a> {
    rates_nats: RatePair<f64>,
    config: &'a SearchConfig,
    stats: SearchStats,
}

struct Computed {
    region: Region,
    searched: Option<(AchievableRegion<f64>, RatePair<f64>, SearchConfig)>,
}

fn zero_rate_region(pair: &Pair, mode: DetectionMode, w1: u8, grid_step: Option<f64>) -> Result<Region> {
    Ok(match mode {
        DetectionMode::Coherent => region_coherent(pair)?,
        DetectionMode::Concurrent if marginals_equal(pair) => region_concurrent_equal_marginals(pair)?,
        DetectionMode::Concurrent => match w1 {
            0 | 1 => return Err(CliError::Validation(format!("--w1 must be at least 2, got {w1}"))),
            2 => {
                let step = grid_step.unwrap_or_else(|| default_grid_step(pair.sizes()[0]));
                let grid = default_threshold_grid(pair, step)?;
                region_concurrent_w1_eq2(pair, step, &grid)?.region
            }
            _ => region_concurrent_w1_ge3(pair)?,
        },
    })
}

fn no_coop_mode(pair: &Pair, mode: DetectionMode) -> NoCoopMode {
    match mode {
        DetectionMode::Coherent => NoCoopMode::Coherent,
        DetectionMode::Concurrent if marginals_equal(pair) => NoCoopMode::ConcurrentEqualMarginals,
        DetectionMode::Concurrent => NoCoopMode::ConcurrentW1Ge3,
    }
}

fn compute_region(pair: &Pair, a: &RegionArgs) -> Result<Computed> {
    let mode = DetectionMode::from(a.mode);
    let unit = a.unit.unit();
    let plain = |region| Ok(Computed { region, searched: None });
    match a.regime {
        Regime::ZeroRate => plain(zero_rate_region(pair, mode, a.w1, a.grid_step)?),
        Regime::HighRate => plain(high_rate_region(pair, mode, true)?.region),
        Regime::NoCoop if a.r1.is_none() => plain(region_no_cooperation(pair, no_coop_mode(pair, mode))?),
        Regime::NoCoop | Regime::PositiveRate => {
            let rates = RatePair::new(rate(a.r1, unit, "r1")?, rate(a.r2, unit, "r2")?)?;
            let search = a.search.config();
            let independence = mode == DetectionMode::Coherent && has_independence_structure(pair);
            let found = match (a.regime, independence) {
                (Regime::PositiveRate, true) => region_test_against_independence(pair, rates.r1, &search)?,
                (Regime::PositiveRate, false) => region_achievable(pair, rates, mode, &search)?,
                (_, true) => region_test_against_independence_no_cooperation(pair, rates.r1, &search)?,
                (_, false) => {
                    return Err(CliError::Core(dht_core::Error::WrongMode(
                        "the positive-rate baseline without the detector link needs coherent detection, \
                         Y1 ⊥ Y2 under H = 0 and P̄ = P_X ⊗ P_Y1 ⊗ P_Y2; omit --r1 for the zero-rate baseline"
                            .into(),
                    )))
                }
            };
            Ok(Computed { region: found.region.clone(), searched: Some((found, rates, search)) })
        }
    }
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::ZeroRate => "zero-rate",
        Regime::PositiveRate => "positive-rate",
        Regime::HighRate => "high-rate",
        Regime::NoCoop => "no-coop",
    }
}

fn cmd_region(a: &RegionArgs) -> Result<()> {
    let pair = load_pair(&a.model)?;
    let unit = a.unit.unit();
    let computed = compute_region(&pair, a)?;
    let points = output::frontier_in(&computed.region.points, unit);
    output::emit(a.out.as_deref(), &output::region_csv(&points, unit))?;
    if let Some(path) = &a.svg {
        let title = format!(
            "{} region, {} detection",
            regime_name(a.regime),
            if a.mode == Mode::Coherent { "coherent" } else { "concurrent" }
        );
        output::emit(Some(path), &output::region_svg(&points, unit, &title))?;
    }
    if let Some(path) = &a.json {
        let doc = RegionJson {
            unit: unit.name(),
            mode: a.mode.into(),
            regime: regime_name(a.regime),
            is_rectangle: computed.region.is_rectangle,
            points: &points,
            witnesses: computed.searched.as_ref().map(|(f, _, _)| f.witnesses.as_slice()),
            search: computed.searched.as_ref().map(|(f, rates, config)| SearchJson {
                rates_nats: *rates,
                config,
                stats: f.stats,
            }),
        };
        let text = serde_json::to_string_pretty(&doc).expect("region serializes") + "\n";
        output::emit(Some(path), &text)?;
    }
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let pair = load_pair(&a.model)?;
    let unit = a.unit.unit();
    if a.n.is_empty() || a.n.contains(&0) {
        return Err(CliError::Validation("--n needs positive blocklengths".into()));
    }
    let template = ZeroRateSchemeConfig::new(a.n[0], a.mu, a.mode.into())
        .with_w1(a.w1)
        .with_partition(a.mapping.into(), unit.to_nats(a.r));
    let rows =
        a.n.iter()
            .map(|&n| {
                let cfg = template.with_n(n);
                if a.mc {
                    monte_carlo_zero_rate(&pair, &cfg, a.trials, a.seed)
                } else {
                    exact_zero_rate_errors(&pair, &cfg)
                }
            })
            .collect::<dht_core::Result<Vec<_>>>()?;
    output::emit(a.out.as_deref(), &output::simulation_csv(&rows, unit))
}

#[derive(Debug, Serialize)]
struct BenefitJson {
    theta2_coop: f64,
    theta2_nocoop: f64,
    benefit: f64,
    unit: &'static str,
}

fn cmd_benefit(a: &BenefitArgs) -> Result<()> {
    let pair = load_pair(&a.model)?;
    let unit = a.unit.unit();
    let mode = DetectionMode::from(a.mode);
    let corner_theta2 = |r: Region| r.corner().expect("rectangle region").theta2;
    let (coop, nocoop, benefit) = match a.regime {
        BenefitRegime::ZeroRate => {
            let coop = corner_theta2(zero_rate_region(&pair, mode, 3, None)?);
            let nocoop = corner_theta2(region_no_cooperation(&pair, no_coop_mode(&pair, mode))?);
            let benefit = match mode {
                DetectionMode::Coherent => cooperation_benefit_zero_rate(&pair)?,
                DetectionMode::Concurrent => (coop - nocoop).max(0.0),
            };
            (coop, nocoop, benefit)
        }
        BenefitRegime::HighRate => {
            let coop = high_rate_region(&pair, mode, true)?;
            let nocoop = corner_theta2(high_rate_region(&pair, mode, false)?.region);
            (corner_theta2(coop.region), nocoop, coop.benefit)
        }
    };
    let doc = BenefitJson {
        theta2_coop: unit.express(coop),
        theta2_nocoop: unit.express(nocoop),
        benefit: unit.express(benefit),
        unit: unit.name(),
    };
    output::emit(a.out.as_deref(), &(serde_json::to_string_pretty(&doc).expect("benefit serializes") + "\n"))
}

fn cmd_model(a: &ModelArgs) -> Result<()> {
    use rand::SeedableRng;
    let sizes: [usize; 3] =
        a.sizes.as_slice().try_into().map_err(|_| CliError::Validation("--sizes takes three alphabet sizes".into()))?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed);
    let (pair, name): (Pair, &str) = match a.builtin {
        Builtin::Example1 => (models::example1(), "example1"),
        Builtin::Example6 => (models::example6(), "example6"),
        Builtin::Identical => {
            let p = models::random_pmf(
                &mut rng,
                &[(dht_core::Axis::X, sizes[0]), (dht_core::Axis::Y1, sizes[1]), (dht_core::Axis::Y2, sizes[2])],
            );
            (Pair::new(p.clone(), p)?, "identical")
        }
        Builtin::MarkovY2 => (models::markov_via_y2(&mut rng, sizes)?, "markov-y2"),
        Builtin::MarkovY1 => (models::markov_via_y1(&mut rng, sizes)?, "markov-y1"),
    };
    let file = ModelFile::from_pair(&pair, Some(name.into()));
    output::emit(a.out.as_deref(), &(serde_json::to_string_pretty(&file).expect("model serializes") + "\n"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Region(a) => cmd_region(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Benefit(a) => cmd_benefit(a),
        Command::Model(a) => cmd_model(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
