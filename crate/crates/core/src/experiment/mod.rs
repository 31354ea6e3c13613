//! End-to-end runs: an [`ExperimentSpec`] goes in, CSV tables, a JSON summary,
//! a run manifest and an SVG plot come out.
//!
//! The manifest embeds the resolved spec (game inline, transform and grid
//! filled in) together with every derived seed, so feeding `manifest.json`
//! back to [`load_spec`] reproduces the run byte for byte.

mod plot;
mod stats;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use plot::{emit_plot, render_svg, trajectory_plot, PlotKind, Series};
pub use stats::{summarize, SummaryStats};

use crate::catalog;
use crate::dynamics::{
    find_equilibrium, sweep_alpha, Alpha, AlphaLevel, DynamicsConfig, EquilibriumReport,
    SweepRow, SweepTable, UpdateOrder,
};
use crate::error::{Error, Result};
use crate::game::{NormalFormGame, PayoffModel};
use crate::nash::{enumerate_pure_nash, support_enumeration_mixed_nash};
use crate::profile::StrategyProfile;
use crate::quantum::{evolve_with_trajectory, trajectory_csv, QuantumConfig, WavefunctionState};
use crate::schema::GameDocument;
use crate::seed::derive_seed;
use crate::society::{degree_histogram_csv, generate_society, society_equilibrium_sample, SocietyRun, SocietySpec};
use crate::transform::{transform_utilities, UtilityTransform};

pub const MANIFEST_FORMAT: u32 = 1;
/// Per-attempt iteration cap for finite-alpha society runs.
pub const SOCIETY_MAX_ITERATIONS: usize = 300;
pub const BEST_RESPONSE_MAX_STEPS: usize = 100_000;
pub const BUILTIN_GAMES: [&str; 4] = [
    "prisoners_dilemma",
    "five_by_five",
    "separable_objective",
    "matching_pennies",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    /// One fixed point per alpha from the uniform start.
    Solve,
    Sweep,
    Society,
    Quantum,
    Nash,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameSource {
    Builtin(String),
    Path(PathBuf),
    Inline(GameDocument),
}

impl GameSource {
    /// An existing file, else a bundled game name.
    pub fn from_arg(arg: &str) -> Result<Self> {
        if Path::new(arg).is_file() {
            return Ok(GameSource::Path(arg.into()));
        }
        let name = arg.strip_prefix("builtin:").unwrap_or(arg).replace('-', "_");
        let name = match name.as_str() {
            "pd" => "prisoners_dilemma".to_string(),
            _ => name,
        };
        if BUILTIN_GAMES.contains(&name.as_str()) {
            Ok(GameSource::Builtin(name))
        } else {
            Err(Error::Config(format!(
                "'{arg}' is neither a file nor a bundled game ({})",
                BUILTIN_GAMES.join(", ")
            )))
        }
    }

    pub fn document(&self) -> Result<GameDocument> {
        match self {
            GameSource::Inline(doc) => Ok(doc.clone()),
            GameSource::Path(path) => GameDocument::read(path),
            GameSource::Builtin(name) => match name.as_str() {
                "prisoners_dilemma" => GameDocument::from_json(catalog::PRISONERS_DILEMMA_JSON),
                "five_by_five" => GameDocument::from_json(catalog::FIVE_BY_FIVE_JSON),
                "separable_objective" => GameDocument::from_json(catalog::SEPARABLE_OBJECTIVE_JSON),
                "matching_pennies" => {
                    let mut doc = GameDocument::from_normal_form(&catalog::matching_pennies());
                    doc.name = Some("matching-pennies".into());
                    Ok(doc)
                }
                other => Err(Error::Config(format!("unknown bundled game '{other}'"))),
            },
        }
    }
}

/// Solver settings shared by all kinds; unused fields are ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunOptions {
    pub tolerance: f64,
    /// Defaults to 10000, or [`SOCIETY_MAX_ITERATIONS`] for societies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    pub damping: f64,
    pub update_order: UpdateOrder,
    pub best_response_max_steps: usize,
    /// Trajectory sampling interval for quantum runs.
    pub log_every: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            max_iterations: None,
            damping: 0.0,
            update_order: UpdateOrder::Synchronous,
            best_response_max_steps: BEST_RESPONSE_MAX_STEPS,
            log_every: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub society: Option<SocietySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<UtilityTransform>,
    #[serde(default)]
    pub alpha: Vec<AlphaLevel>,
    #[serde(default = "one")]
    pub restarts: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub dynamics: RunOptions,
    #[serde(default)]
    pub quantum: QuantumConfig,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn one() -> usize {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            game: None,
            society: None,
            transform: None,
            alpha: Vec::new(),
            restarts: 1,
            seed: 0,
            dynamics: RunOptions::default(),
            quantum: QuantumConfig::default(),
            out: default_out(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("specs always serialize")
    }

    fn game_document(&self) -> Result<GameDocument> {
        self.game
            .as_ref()
            .ok_or_else(|| Error::Config(format!("a {:?} run needs a game", self.kind)))?
            .document()
    }

    /// Fills every default so the result is self-contained and re-resolves to itself.
    pub fn resolve(&self) -> Result<Self> {
        let mut spec = self.clone();
        if spec.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        spec.quantum.validate()?;
        if spec.kind == ExperimentKind::Society {
            let society = spec
                .society
                .as_ref()
                .ok_or_else(|| Error::Config("a society run needs a society spec".into()))?;
            society.validate()?;
            spec.game = None;
            spec.transform.get_or_insert(UtilityTransform::Exponential { hbar: 1.0 });
            spec.dynamics.max_iterations.get_or_insert(SOCIETY_MAX_ITERATIONS);
            if spec.alpha.is_empty() {
                spec.alpha = vec![AlphaLevel::Finite(30.0), AlphaLevel::Infinite];
            }
        } else {
            let doc = spec.game_document()?;
            let game = doc.build_payoff_game()?;
            spec.society = None;
            spec.dynamics.max_iterations.get_or_insert(10_000);
            if matches!(spec.kind, ExperimentKind::Solve | ExperimentKind::Sweep) {
                if spec.transform.is_none() {
                    let game = game.into_normal_form()?;
                    spec.transform = Some(if game.min_payoff() > 0.0 {
                        UtilityTransform::Identity
                    } else {
                        UtilityTransform::unit_min_shift(&game)
                    });
                }
                if spec.alpha.is_empty() {
                    spec.alpha = match spec.kind {
                        ExperimentKind::Solve => vec![AlphaLevel::Finite(1.0)],
                        _ => [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 100.0]
                            .into_iter()
                            .map(AlphaLevel::Finite)
                            .collect(),
                    };
                }
            }
            spec.game = Some(GameSource::Inline(doc));
        }
        if let Some(t) = spec.transform {
            t.validate()?;
        }
        Ok(spec)
    }

    fn dynamics_config(&self, alpha: f64) -> DynamicsConfig {
        DynamicsConfig {
            alpha: Alpha::Uniform(alpha),
            transform: self.transform.unwrap_or_default(),
            tolerance: self.dynamics.tolerance,
            max_iterations: self.dynamics.max_iterations.unwrap_or(10_000),
            damping: self.dynamics.damping,
            update_order: self.dynamics.update_order,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub label: String,
    pub seed: u64,
}

/// Everything needed to re-execute a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: u32,
    pub versions: std::collections::BTreeMap<String, String>,
    pub spec: ExperimentSpec,
    pub master_seed: u64,
    pub seeds: Vec<SeedRecord>,
}

/// Reads a spec, or the spec echoed inside a manifest. Diagnostics carry line numbers.
pub fn load_spec(text: &str) -> Result<ExperimentSpec> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("spec").is_some() && value.get("format").is_some() {
        let manifest: RunManifest = serde_json::from_str(text)?;
        if manifest.format != MANIFEST_FORMAT {
            return Err(Error::Config(format!(
                "manifest format {} is not supported (expected {MANIFEST_FORMAT})",
                manifest.format
            )));
        }
        Ok(manifest.spec)
    } else {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn read_spec(path: impl AsRef<Path>) -> Result<ExperimentSpec> {
    load_spec(&std::fs::read_to_string(path)?)
}

/// One summary block per alpha level, over the overall payoffs of its runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub alpha: AlphaLevel,
    pub converged: usize,
    #[serde(flatten)]
    pub overall: SummaryStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumSummary {
    pub converged: bool,
    pub steps: usize,
    pub time: f64,
    pub lambda: Vec<f64>,
    pub residual: Vec<f64>,
    pub probabilities: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Summary {
    Series { series: Vec<SeriesSummary> },
    Quantum(QuantumSummary),
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub manifest: RunManifest,
    pub summary: Summary,
    /// Present for every kind except quantum.
    pub table: Option<SweepTable>,
    pub files: Vec<PathBuf>,
}

fn pure_report(game: &NormalFormGame, profile: StrategyProfile) -> Result<EquilibriumReport> {
    EquilibriumReport::for_profile(game, profile, true, 0)
}

/// Support enumeration for two players, exhaustive pure enumeration otherwise.
fn nash_rows(game: &NormalFormGame) -> Result<Vec<SweepRow>> {
    let profiles = if game.player_count() == 2 {
        support_enumeration_mixed_nash(game)?
    } else {
        enumerate_pure_nash(game)?
            .iter()
            .map(|joint| StrategyProfile::point_mass(game.action_counts(), joint))
            .collect::<Result<_>>()?
    };
    profiles
        .into_iter()
        .enumerate()
        .map(|(k, p)| {
            Ok(SweepRow {
                alpha: AlphaLevel::Infinite,
                restart: k,
                report: pure_report(game, p)?,
            })
        })
        .collect()
}

fn series_summaries(table: &SweepTable, levels: &[AlphaLevel]) -> Result<Vec<SeriesSummary>> {
    let mut out = Vec::new();
    for &alpha in levels {
        let values: Vec<f64> = table.at(alpha).map(|r| r.report.overall).collect();
        if values.is_empty() {
            continue;
        }
        out.push(SeriesSummary {
            alpha,
            converged: table.at(alpha).filter(|r| r.report.converged).count(),
            overall: summarize(&values)?,
        });
    }
    Ok(out)
}

fn dedup_levels(levels: &[AlphaLevel]) -> Vec<AlphaLevel> {
    let mut out: Vec<AlphaLevel> = Vec::new();
    for &l in levels {
        if !out.contains(&l) {
            out.push(l);
        }
    }
    out
}

fn versions() -> std::collections::BTreeMap<String, String> {
    [
        ("coopeq", env!("CARGO_PKG_VERSION")),
        ("rng", "ChaCha8 (rand_chacha 0.3)"),
        ("manifest_format", "1"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

struct Artifacts {
    files: Vec<(&'static str, String)>,
    seeds: Vec<SeedRecord>,
    summary: Summary,
    table: Option<SweepTable>,
}

fn run_normal(spec: &ExperimentSpec) -> Result<Artifacts> {
    let game = spec.game_document()?.build_payoff_game()?.into_normal_form()?;
    let levels = dedup_levels(&spec.alpha);
    let finite: Vec<f64> = levels
        .iter()
        .filter_map(|l| match l {
            AlphaLevel::Finite(a) => Some(*a),
            AlphaLevel::Infinite => None,
        })
        .collect();
    let mut seeds = Vec::new();
    let mut rows = Vec::new();
    match spec.kind {
        ExperimentKind::Nash => rows = nash_rows(&game)?,
        ExperimentKind::Solve => {
            let transform = spec.transform.unwrap_or_default();
            let view = transform_utilities(&game, transform)?;
            let start = StrategyProfile::uniform(game.action_counts());
            for &a in &finite {
                let config = spec.dynamics_config(a);
                config.validate(game.player_count())?;
                rows.push(SweepRow {
                    alpha: AlphaLevel::Finite(a),
                    restart: 0,
                    report: find_equilibrium(&view, &config, &start)?,
                });
            }
        }
        _ => {
            if !finite.is_empty() {
                let base = spec.dynamics_config(1.0);
                base.validate(game.player_count())?;
                rows = sweep_alpha(&game, &base, &finite, spec.restarts, spec.seed)?.rows;
                for (a, alpha) in finite.iter().enumerate() {
                    for k in 0..spec.restarts {
                        seeds.push(SeedRecord {
                            label: format!("alpha={alpha} restart={k}"),
                            seed: derive_seed(spec.seed, &[a as u64, k as u64]),
                        });
                    }
                }
            }
        }
    }
    if spec.kind != ExperimentKind::Nash && levels.contains(&AlphaLevel::Infinite) {
        rows.extend(nash_rows(&game)?);
    }
    let table = SweepTable {
        player_count: game.player_count(),
        rows,
    };
    let levels = if spec.kind == ExperimentKind::Nash {
        vec![AlphaLevel::Infinite]
    } else {
        levels
    };
    let summary = Summary::Series {
        series: series_summaries(&table, &levels)?,
    };
    let mut files = vec![("results.csv", table.to_csv())];
    if !table.rows.is_empty() {
        let kind = if spec.kind == ExperimentKind::Nash {
            PlotKind::Equilibria
        } else {
            PlotKind::Sweep
        };
        files.push(("plot.svg", emit_plot(&table, kind)?));
    }
    Ok(Artifacts {
        files,
        seeds,
        summary,
        table: Some(table),
    })
}

fn run_society(spec: &ExperimentSpec) -> Result<Artifacts> {
    let society_spec = spec.society.as_ref().expect("resolved society spec");
    let society = generate_society(society_spec)?;
    let mut seeds = vec![SeedRecord {
        label: "society".into(),
        seed: society_spec.seed,
    }];
    let levels = dedup_levels(&spec.alpha);
    let mut rows = Vec::new();
    for (l, &level) in levels.iter().enumerate() {
        let level_seed = derive_seed(spec.seed, &[l as u64]);
        for k in 0..spec.restarts {
            seeds.push(SeedRecord {
                label: format!("alpha={level} restart={k}"),
                seed: derive_seed(level_seed, &[k as u64]),
            });
        }
        let run = match level {
            AlphaLevel::Finite(a) => SocietyRun::Soft(spec.dynamics_config(a)),
            AlphaLevel::Infinite => SocietyRun::BestResponse {
                max_steps: spec.dynamics.best_response_max_steps,
            },
        };
        let reports = society_equilibrium_sample(&society, &run, spec.restarts, level_seed)?;
        rows.extend(reports.into_iter().enumerate().map(|(k, report)| SweepRow {
            alpha: level,
            restart: k,
            report,
        }));
    }
    let table = SweepTable {
        player_count: society.player_count(),
        rows,
    };
    let summary = Summary::Series {
        series: series_summaries(&table, &levels)?,
    };
    let files = vec![
        ("results.csv", table.to_csv()),
        ("degree_histogram.csv", degree_histogram_csv(&society)),
        ("plot.svg", emit_plot(&table, PlotKind::Society)?),
    ];
    Ok(Artifacts {
        files,
        seeds,
        summary,
        table: Some(table),
    })
}

fn run_quantum(spec: &ExperimentSpec) -> Result<Artifacts> {
    let objective = spec.game_document()?.build_objective_game()?.into_normal_form()?;
    let start = WavefunctionState::uniform(objective.action_counts());
    let (report, log) = evolve_with_trajectory(&objective, &start, &spec.quantum, spec.dynamics.log_every)?;
    let summary = Summary::Quantum(QuantumSummary {
        converged: report.converged,
        steps: report.steps,
        time: report.state.time(),
        lambda: report.lambda.clone(),
        residual: report.residual.clone(),
        probabilities: report.state.probabilities(),
    });
    let mut files = vec![("trajectory.csv", trajectory_csv(&log))];
    if !log.is_empty() {
        files.push(("plot.svg", trajectory_plot(&log)?));
    }
    Ok(Artifacts {
        files,
        seeds: Vec::new(),
        summary,
        table: None,
    })
}

/// Runs `spec` and writes its artifacts into `spec.out`. All files are written
/// after the computation finishes. Non-convergent runs are reported, not errors.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    let spec = spec.resolve()?;
    let artifacts = match spec.kind {
        ExperimentKind::Society => run_society(&spec)?,
        ExperimentKind::Quantum => run_quantum(&spec)?,
        _ => run_normal(&spec)?,
    };
    let manifest = RunManifest {
        format: MANIFEST_FORMAT,
        versions: versions(),
        master_seed: spec.seed,
        seeds: artifacts.seeds,
        spec,
    };
    let out = &manifest.spec.out;
    std::fs::create_dir_all(out)?;
    let mut files = Vec::new();
    let summary_json = serde_json::to_string_pretty(&artifacts.summary).expect("summaries serialize");
    let manifest_json = serde_json::to_string_pretty(&manifest).expect("manifests serialize");
    for (name, body) in artifacts
        .files
        .iter()
        .map(|(n, b)| (*n, b.as_str()))
        .chain([("summary.json", summary_json.as_str()), ("manifest.json", manifest_json.as_str())])
    {
        let path = out.join(name);
        std::fs::write(&path, body)?;
        files.push(path);
    }
    Ok(ExperimentOutcome {
        manifest,
        summary: artifacts.summary,
        table: artifacts.table,
        files,
    })
}
