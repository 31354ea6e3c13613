use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coopeq::dynamics::{AlphaLevel, UpdateOrder};
use coopeq::experiment::{read_spec, run_experiment, ExperimentKind, ExperimentSpec, GameSource};
use coopeq::schema::GameDocument;
use coopeq::society::{generate_society, SocietySpec};
use coopeq::{Error, QuantumConfig, UtilityTransform};

#[derive(Parser)]
#[command(name = "coopeq", version, about = "Soft best-response equilibria, Nash oracles and imaginary-time solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fixed point from the uniform start at each alpha.
    Solve(GameArgs),
    /// Fixed points from seeded random starts over an alpha grid.
    Sweep(GameArgs),
    /// Random pairwise society: finite alpha versus best response.
    Society(SocietyArgs),
    /// Imaginary-time evolution of a cost game to a stationary state.
    Quantum(QuantumArgs),
    /// All Nash equilibria (support enumeration for two players).
    Nash(NashArgs),
    /// Re-execute a spec or manifest file.
    Run {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Comma-separated selfishness levels; `inf` selects the Nash limit.
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<AlphaLevel>,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// identity, shift:<x>, shift:auto or exp:<hbar>.
    #[arg(long)]
    transform: Option<String>,
    #[arg(long, value_enum, default_value = "synchronous")]
    order: Order,
    #[arg(long, default_value_t = 0.0)]
    damping: f64,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Order {
    Synchronous,
    Sequential,
}

#[derive(Args)]
struct GameArgs {
    /// Game JSON file or bundled name (pd, five_by_five, separable_objective, matching_pennies).
    #[arg(long)]
    game: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SocietyArgs {
    #[arg(long, default_value_t = 101)]
    population: usize,
    #[arg(long, default_value_t = 10)]
    actions: usize,
    #[arg(long, default_value_t = 10.0)]
    neighbors: f64,
    /// Seed of the society itself; defaults to --seed.
    #[arg(long)]
    society_seed: Option<u64>,
    /// Also write the degree histogram CSV here.
    #[arg(long)]
    degree_histogram: Option<PathBuf>,
    /// Also write the generated society as game JSON here.
    #[arg(long)]
    save_game: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct QuantumArgs {
    #[arg(long)]
    game: String,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// Defaults to 0.01 hbar.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    max_time: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    #[arg(long, default_value_t = 100)]
    log_every: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct NashArgs {
    #[arg(long)]
    game: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn parse_transform(arg: &str, game: Option<&GameSource>) -> coopeq::Result<UtilityTransform> {
    if arg != "shift:auto" {
        return arg.parse();
    }
    let source = game.ok_or_else(|| Error::Config("shift:auto needs a game".into()))?;
    let game = source.document()?.build_payoff_game()?.into_normal_form()?;
    Ok(UtilityTransform::unit_min_shift(&game))
}

fn apply_common(spec: &mut ExperimentSpec, common: Common) -> coopeq::Result<()> {
    spec.alpha = common.alpha;
    spec.restarts = common.restarts;
    spec.seed = common.seed;
    spec.transform = common
        .transform
        .as_deref()
        .map(|t| parse_transform(t, spec.game.as_ref()))
        .transpose()?;
    spec.dynamics.update_order = match common.order {
        Order::Synchronous => UpdateOrder::Synchronous,
        Order::Sequential => UpdateOrder::Sequential,
    };
    spec.dynamics.damping = common.damping;
    spec.dynamics.max_iterations = common.max_iterations;
    spec.out = common.out;
    Ok(())
}

fn spec_for(command: Command) -> coopeq::Result<ExperimentSpec> {
    match command {
        Command::Solve(args) => game_spec(ExperimentKind::Solve, args),
        Command::Sweep(args) => game_spec(ExperimentKind::Sweep, args),
        Command::Society(args) => {
            let mut spec = ExperimentSpec::new(ExperimentKind::Society);
            let society = SocietySpec::new(
                args.population,
                args.actions,
                args.neighbors,
                args.society_seed.unwrap_or(args.common.seed),
            );
            if args.degree_histogram.is_some() || args.save_game.is_some() {
                let game = generate_society(&society)?;
                if let Some(path) = &args.degree_histogram {
                    std::fs::write(path, coopeq::society::degree_histogram_csv(&game))?;
                }
                if let Some(path) = &args.save_game {
                    std::fs::write(path, GameDocument::from_graphical(&game).to_json())?;
                }
            }
            spec.society = Some(society);
            apply_common(&mut spec, args.common)?;
            Ok(spec)
        }
        Command::Quantum(args) => {
            let mut spec = ExperimentSpec::new(ExperimentKind::Quantum);
            spec.game = Some(GameSource::from_arg(&args.game)?);
            let defaults = QuantumConfig::with_hbar(args.hbar);
            spec.quantum = QuantumConfig {
                dt: args.dt.unwrap_or(defaults.dt),
                max_time: args.max_time.unwrap_or(defaults.max_time),
                residual_tolerance: args.tolerance,
                ..defaults
            };
            spec.dynamics.log_every = args.log_every;
            spec.out = args.out;
            Ok(spec)
        }
        Command::Nash(args) => {
            let mut spec = ExperimentSpec::new(ExperimentKind::Nash);
            spec.game = Some(GameSource::from_arg(&args.game)?);
            spec.out = args.out;
            Ok(spec)
        }
        Command::Run { spec, out } => {
            let mut spec = read_spec(&spec)?;
            if let Some(out) = out {
                spec.out = out;
            }
            Ok(spec)
        }
    }
}

fn game_spec(kind: ExperimentKind, args: GameArgs) -> coopeq::Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::new(kind);
    spec.game = Some(GameSource::from_arg(&args.game)?);
    apply_common(&mut spec, args.common)?;
    Ok(spec)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = spec_for(cli.command).and_then(|spec| run_experiment(&spec));
    match result {
        Ok(outcome) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&outcome.summary).expect("summaries serialize")
            );
            for file in &outcome.files {
                eprintln!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Parse { .. } | Error::Config(_) => 2,
                _ => 1,
            })
        }
    }
}
