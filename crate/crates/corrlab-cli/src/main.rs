//! Command-line interface for the corrlab toolkit.
//!
//! Every command prints a one-line JSON summary to stdout and writes any
//! requested artifacts (CSV, JSON, SVG) to disk. Exit codes: 0 success,
//! 1 malformed input (the diagnostic names the offending field), 2 game
//! size over the solver cap. `CORRLAB_THREADS` caps sweep parallelism.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use corrlab::adversary::{ask_incentive_check, AdversaryMode, AdversaryScenario};
use corrlab::corrigibility::{corrigibility_verdict, expected_nfg, RationalityBelief};
use corrlab::game::{
    classify, enumerate_symmetric_ordinals, response_graph, sample_symmetric_games, Bimatrix,
    GameClass, SymmetricGame,
};
use corrlab::io::{parse_adv_scenario, parse_corr_scenario, parse_game};
use corrlab::nash::{pure_equilibria, support_enumeration, MixedStrategy};
use corrlab::offswitch::{solve_offswitch, OffSwitchParams};
use corrlab::sweep::{
    render_heatmap, sweep_adversary, sweep_corrigibility, sweep_ensemble, write_grid, Cell,
    GridFormat, PhaseGrid, RenderMode,
};

#[derive(Parser)]
#[command(
    name = "corrlab",
    version,
    about = "Construct, solve and sweep corrigibility games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a 2x2 game as monotone, harmonic or other.
    Classify {
        /// Game file or built-in name (no-conflict, battle-of-the-sexes, hero).
        #[arg(long)]
        game: String,
    },
    /// Enumerate all Nash equilibria of a game (up to 4x4), or of the
    /// expected game of a two-agent scenario.
    Solve {
        /// Game file or built-in name.
        #[arg(long, conflicts_with = "scenario")]
        game: Option<String>,
        /// Two-agent scenario file (belief + rationality).
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Equilibrium tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Write the full equilibrium set as JSON here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sweep the two-agent corrigibility game over the (r, p) lattice.
    CorrSweep {
        #[arg(long)]
        game1: String,
        #[arg(long)]
        game2: String,
        /// Lattice points per axis, endpoints included.
        #[arg(long, default_value_t = 101)]
        resolution: usize,
        /// Artifact path prefix; the format extension is appended.
        #[arg(long)]
        output: PathBuf,
        /// Artifact formats (repeatable).
        #[arg(long = "format", value_enum, default_values_t = [ArtifactFormat::Csv])]
        formats: Vec<ArtifactFormat>,
    },
    /// Sweep the defender's incentive vector over the (r, p) lattice.
    AdvSweep {
        #[arg(long)]
        game1: String,
        #[arg(long)]
        game2: String,
        #[arg(long, default_value_t = 101)]
        resolution: usize,
        /// Adversary model: "nash" or "fixed:p1,p2,..".
        #[arg(long, default_value = "nash")]
        adv: String,
        #[arg(long)]
        output: PathBuf,
        #[arg(long = "format", value_enum, default_values_t = [ArtifactFormat::Csv])]
        formats: Vec<ArtifactFormat>,
    },
    /// Check the ask-incentive inequalities for one defender scenario.
    AdvCheck {
        /// Defender scenario file.
        #[arg(long)]
        belief: PathBuf,
        /// Human rationality; conflicts with a `p` set in the file.
        #[arg(long)]
        p: Option<f64>,
        /// Adversary model; conflicts with an `adv_mode` set in the file.
        #[arg(long)]
        adv: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Ensemble-averaged corrigibility sweep over game pairs.
    EnsembleSweep {
        /// Use all 24 symmetric 2x2 ordinal games.
        #[arg(long, conflicts_with_all = ["actions", "samples"])]
        ordinals: bool,
        /// Sample symmetric games with this many actions instead.
        #[arg(long, requires = "samples")]
        actions: Option<usize>,
        /// Number of games to sample.
        #[arg(long, requires = "actions")]
        samples: Option<usize>,
        /// Seed for sampling and pair subsampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 101)]
        resolution: usize,
        #[arg(long, default_value = "nash")]
        adv: String,
        #[arg(long)]
        output: PathBuf,
        #[arg(long = "format", value_enum, default_values_t = [ArtifactFormat::Csv])]
        formats: Vec<ArtifactFormat>,
    },
    /// Solve the single-agent off-switch game.
    Offswitch {
        /// Mean of the Gaussian belief over the action utility.
        #[arg(long)]
        mu: f64,
        /// Standard deviation of the belief.
        #[arg(long)]
        sigma: f64,
        /// Human irrationality temperature (0 = fully rational).
        #[arg(long)]
        beta: f64,
        /// Also write the summary JSON here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ArtifactFormat {
    Csv,
    Json,
    Svg,
}

impl ArtifactFormat {
    fn extension(self) -> &'static str {
        match self {
            ArtifactFormat::Csv => "csv",
            ArtifactFormat::Json => "json",
            ArtifactFormat::Svg => "svg",
        }
    }
}

enum CliError {
    Lib(corrlab::Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(corrlab::Error::SizeCap { .. }) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<corrlab::Error> for CliError {
    fn from(e: corrlab::Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn named_game(name: &str) -> Option<SymmetricGame> {
    let ordinal = match name {
        "no-conflict" => [4.0, 3.0, 2.0, 1.0],
        "battle-of-the-sexes" => [2.0, 4.0, 3.0, 1.0],
        "hero" => [2.0, 3.0, 4.0, 1.0],
        _ => return None,
    };
    Some(SymmetricGame::new(ordinal))
}

fn load_game(arg: &str) -> CliResult<Bimatrix> {
    if let Some(g) = named_game(arg) {
        return Ok(g.expand());
    }
    Ok(parse_game(&read_file(Path::new(arg))?)?)
}

fn load_symmetric_game(arg: &str) -> CliResult<SymmetricGame> {
    if let Some(g) = named_game(arg) {
        return Ok(g);
    }
    let g = load_game(arg)?;
    if g.rows() != 2 || g.cols() != 2 || !g.is_symmetric() {
        return Err(CliError::Usage(format!(
            "{arg}: adversary sweeps need a symmetric 2x2 game"
        )));
    }
    Ok(SymmetricGame::new([
        g.u1(0, 0),
        g.u1(0, 1),
        g.u1(1, 0),
        g.u1(1, 1),
    ]))
}

fn parse_adv_mode(arg: &str) -> CliResult<AdversaryMode> {
    if arg == "nash" {
        return Ok(AdversaryMode::NashPerGame);
    }
    if let Some(list) = arg.strip_prefix("fixed:") {
        let probs: Result<Vec<f64>, _> = list.split(',').map(str::parse::<f64>).collect();
        let probs = probs.map_err(|e| {
            CliError::Usage(format!("--adv fixed list did not parse as numbers: {e}"))
        })?;
        return Ok(AdversaryMode::Fixed(MixedStrategy::new(probs)?));
    }
    Err(CliError::Usage(format!(
        "--adv must be \"nash\" or \"fixed:p1,p2,..\", got \"{arg}\""
    )))
}

/// Exactly one source may provide a value; both is a conflict, neither an
/// omission.
fn resolve_one<T>(file: Option<T>, flag: Option<T>, field: &str) -> CliResult<T> {
    match (file, flag) {
        (Some(_), Some(_)) => Err(CliError::Usage(format!(
            "field `{field}` is set both in the scenario file and on the command line; pick one"
        ))),
        (Some(v), None) | (None, Some(v)) => Ok(v),
        (None, None) => Err(CliError::Usage(format!(
            "field `{field}` is missing: set it in the scenario file or on the command line"
        ))),
    }
}

fn write_artifact(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| CliError::Io(parent.to_path_buf(), e))?;
        }
    }
    fs::write(path, bytes).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn emit_grid(
    grid: &PhaseGrid,
    prefix: &Path,
    formats: &[ArtifactFormat],
    svg_mode: RenderMode,
) -> CliResult<Vec<String>> {
    let mut artifacts = Vec::new();
    let mut seen = Vec::new();
    for &format in formats {
        if seen.contains(&format) {
            continue;
        }
        seen.push(format);
        let path = PathBuf::from(format!("{}.{}", prefix.display(), format.extension()));
        let bytes = match format {
            ArtifactFormat::Csv => write_grid(grid, GridFormat::Csv)?,
            ArtifactFormat::Json => write_grid(grid, GridFormat::Json)?,
            ArtifactFormat::Svg => render_heatmap(grid, svg_mode)?.into_bytes(),
        };
        write_artifact(&path, &bytes)?;
        artifacts.push(path.display().to_string());
    }
    Ok(artifacts)
}

#[derive(Serialize)]
struct ClassifySummary {
    command: &'static str,
    class: &'static str,
    pure_equilibria: usize,
    sinks: usize,
    cycle: bool,
}

#[derive(Serialize)]
struct EquilibriumOut {
    row: Vec<f64>,
    col: Vec<f64>,
}

#[derive(Serialize)]
struct SolveSummary {
    command: &'static str,
    n_equilibria: usize,
    degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    corrigible: Option<bool>,
    equilibria: Vec<EquilibriumOut>,
}

#[derive(Serialize)]
struct AdvCheckSummary {
    ineq1: bool,
    ineq2: bool,
    ask: bool,
}

#[derive(Serialize)]
struct OffswitchSummary {
    p_r: f64,
    p_a: f64,
    expected: [f64; 3],
    strategy: Vec<f64>,
}

#[derive(Serialize)]
struct SweepSummary {
    command: &'static str,
    resolution: usize,
    cells: usize,
    /// Cells where asking is (uniquely) preferred.
    ask_cells: usize,
    artifacts: Vec<String>,
}

fn to_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("summaries serialize")
}

fn ask_cells(grid: &PhaseGrid) -> usize {
    grid.cells
        .iter()
        .flatten()
        .filter(|cell| match cell {
            Cell::Corrigibility(c) => c.corrigible,
            Cell::Incentive(c) => {
                let ties: u32 = c.m.iter().map(|&v| v as u32).sum();
                c.m[c.m.len() - 1] == 1 && ties == 1
            }
            Cell::Aggregate(c) => c.scalar > 0.0,
        })
        .count()
}

fn run(command: Command) -> CliResult<String> {
    match command {
        Command::Classify { game } => {
            let g = load_game(&game)?;
            let class = classify(&g)?;
            let graph = response_graph(&g);
            Ok(to_line(&ClassifySummary {
                command: "classify",
                class: match class {
                    GameClass::Monotone => "monotone",
                    GameClass::Harmonic => "harmonic",
                    GameClass::Other => "other",
                },
                pure_equilibria: pure_equilibria(&g).len(),
                sinks: graph.sinks().len(),
                cycle: graph.has_cycle(),
            }))
        }
        Command::Solve {
            game,
            scenario,
            tol,
            output,
        } => {
            if tol <= 0.0 {
                return Err(CliError::Usage(format!(
                    "field `tol` must be positive, got {tol}"
                )));
            }
            let (target, corrigible) = match (game, scenario) {
                (Some(game), None) => (load_game(&game)?, None),
                (None, Some(path)) => {
                    let sc = parse_corr_scenario(&read_file(&path)?)?;
                    let p1 = sc.p1.ok_or_else(|| {
                        CliError::Usage("field `p1` is missing from the scenario".to_string())
                    })?;
                    let shared = sc.shared_p.unwrap_or(sc.p2.is_none());
                    let rat = if shared {
                        if sc.p2.is_some_and(|p2| p2 != p1) {
                            return Err(CliError::Usage(
                                "field `p2` conflicts with `shared_p`: a shared belief needs p1 = p2"
                                    .to_string(),
                            ));
                        }
                        RationalityBelief::shared(p1)?
                    } else {
                        let p2 = sc.p2.ok_or_else(|| {
                            CliError::Usage(
                                "field `p2` is missing for an independent-belief scenario"
                                    .to_string(),
                            )
                        })?;
                        RationalityBelief::independent(p1, p2)?
                    };
                    let gamma = expected_nfg(&sc.belief, &rat)?;
                    let verdict = corrigibility_verdict(&gamma, tol)?;
                    (gamma, Some(verdict.corrigible))
                }
                _ => {
                    return Err(CliError::Usage(
                        "pass exactly one of --game or --scenario".to_string(),
                    ))
                }
            };
            let set = support_enumeration(&target, tol)?;
            let equilibria: Vec<EquilibriumOut> = set
                .equilibria
                .iter()
                .map(|eq| EquilibriumOut {
                    row: eq.row.probs().to_vec(),
                    col: eq.col.probs().to_vec(),
                })
                .collect();
            let summary = SolveSummary {
                command: "solve",
                n_equilibria: set.equilibria.len(),
                degenerate: set.degenerate,
                corrigible,
                equilibria,
            };
            let line = to_line(&summary);
            if let Some(path) = output {
                write_artifact(&path, format!("{line}\n").as_bytes())?;
            }
            Ok(line)
        }
        Command::CorrSweep {
            game1,
            game2,
            resolution,
            output,
            formats,
        } => {
            let (g1, g2) = (load_game(&game1)?, load_game(&game2)?);
            let grid = sweep_corrigibility(&g1, &g2, resolution)?;
            let artifacts = emit_grid(&grid, &output, &formats, RenderMode::RgbStrategy)?;
            Ok(to_line(&SweepSummary {
                command: "corr-sweep",
                resolution,
                cells: resolution * resolution,
                ask_cells: ask_cells(&grid),
                artifacts,
            }))
        }
        Command::AdvSweep {
            game1,
            game2,
            resolution,
            adv,
            output,
            formats,
        } => {
            let (g1, g2) = (load_symmetric_game(&game1)?, load_symmetric_game(&game2)?);
            let mode = parse_adv_mode(&adv)?;
            let grid = sweep_adversary(&g1, &g2, resolution, &mode)?;
            let artifacts = emit_grid(&grid, &output, &formats, RenderMode::CorrigibleBinary)?;
            Ok(to_line(&SweepSummary {
                command: "adv-sweep",
                resolution,
                cells: resolution * resolution,
                ask_cells: ask_cells(&grid),
                artifacts,
            }))
        }
        Command::AdvCheck {
            belief,
            p,
            adv,
            tol,
        } => {
            if tol <= 0.0 {
                return Err(CliError::Usage(format!(
                    "field `tol` must be positive, got {tol}"
                )));
            }
            let sc = parse_adv_scenario(&read_file(&belief)?)?;
            let p = resolve_one(sc.p, p, "p")?;
            let flag_mode = adv.as_deref().map(parse_adv_mode).transpose()?;
            let mode = match (sc.adv_mode, flag_mode) {
                (Some(_), Some(_)) => {
                    return Err(CliError::Usage(
                        "field `adv_mode` is set both in the scenario file and on the command line; pick one"
                            .to_string(),
                    ))
                }
                (Some(m), None) | (None, Some(m)) => m,
                (None, None) => AdversaryMode::NashPerGame,
            };
            let scenario = AdversaryScenario::new(sc.belief, p, mode)?;
            let (ineq1, ineq2) = ask_incentive_check(&scenario, tol)?;
            Ok(to_line(&AdvCheckSummary {
                ineq1,
                ineq2,
                ask: ineq1 && ineq2,
            }))
        }
        Command::EnsembleSweep {
            ordinals,
            actions,
            samples,
            seed,
            resolution,
            adv,
            output,
            formats,
        } => {
            let games: Vec<Bimatrix> = if ordinals {
                enumerate_symmetric_ordinals()
                    .iter()
                    .map(SymmetricGame::expand)
                    .collect()
            } else {
                let (Some(actions), Some(samples)) = (actions, samples) else {
                    return Err(CliError::Usage(
                        "pass --ordinals, or both --actions and --samples".to_string(),
                    ));
                };
                sample_symmetric_games(actions, samples, seed)?
            };
            let mode = parse_adv_mode(&adv)?;
            let grid = sweep_ensemble(&games, resolution, &mode, seed)?;
            let artifacts = emit_grid(&grid, &output, &formats, RenderMode::AggregateScalar)?;
            Ok(to_line(&SweepSummary {
                command: "ensemble-sweep",
                resolution,
                cells: resolution * resolution,
                ask_cells: ask_cells(&grid),
                artifacts,
            }))
        }
        Command::Offswitch {
            mu,
            sigma,
            beta,
            output,
        } => {
            let params = OffSwitchParams::new(mu, sigma, beta)?;
            let solution = solve_offswitch(&params);
            let summary = OffswitchSummary {
                p_r: solution.p_r,
                p_a: solution.p_a,
                expected: solution.expected_values,
                strategy: solution.strategy.probs().to_vec(),
            };
            let line = to_line(&summary);
            if let Some(path) = output {
                write_artifact(&path, format!("{line}\n").as_bytes())?;
            }
            Ok(line)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("CORRLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .map_err(|_| format!("CORRLAB_THREADS must be a positive integer, got \"{value}\""))?;
    if threads == 0 {
        return Err("CORRLAB_THREADS must be at least 1".to_string());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| format!("could not configure the thread pool: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(message) = configure_threads() {
        eprintln!("corrlab: {message}");
        return ExitCode::from(1);
    }
    match run(cli.command) {
        Ok(line) => {
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("corrlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
