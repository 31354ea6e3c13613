//! The `alpha = 2` continuous-time dynamics in imaginary time.
//!
//! Each player carries a nonnegative amplitude vector `psi_i` with unit L2 norm.
//! Its effective field `e_i(x_i)` averages the player's objective over the other
//! players' squared amplitudes, and `H_i = diag(e_i)`. Integrating
//! `-hbar d psi_i / dt = H_i psi_i / Z_i` with explicit Euler and renormalizing
//! is power iteration on `I - dt H_i / hbar`, so trajectories settle on an
//! eigenvector of `H_i`, generically the ground state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{dense_action_values, NormalFormGame, PayoffModel};

/// Unit-norm tolerance for amplitude vectors.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionState {
    amplitudes: Vec<Vec<f64>>,
    time: f64,
}

impl WavefunctionState {
    /// Uniform amplitudes `1/sqrt(k)` for every player.
    pub fn uniform(action_counts: &[usize]) -> Self {
        Self {
            amplitudes: action_counts
                .iter()
                .map(|&k| vec![1.0 / (k as f64).sqrt(); k])
                .collect(),
            time: 0.0,
        }
    }

    /// Rescales nonnegative amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<Vec<f64>>) -> Result<Self> {
        for (i, psi) in amplitudes.iter_mut().enumerate() {
            if psi.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidProfile(format!(
                    "player {i} has a negative or non-finite amplitude"
                )));
            }
            let norm = l2(psi);
            if norm <= 0.0 {
                return Err(Error::InvalidProfile(format!("player {i} has zero amplitude")));
            }
            psi.iter_mut().for_each(|v| *v /= norm);
        }
        Ok(Self {
            amplitudes,
            time: 0.0,
        })
    }

    pub fn amplitudes(&self) -> &[Vec<f64>] {
        &self.amplitudes
    }

    pub fn player(&self, i: usize) -> &[f64] {
        &self.amplitudes[i]
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// `|psi_i|^2` per player.
    pub fn probabilities(&self) -> Vec<Vec<f64>> {
        self.amplitudes
            .iter()
            .map(|psi| psi.iter().map(|a| a * a).collect())
            .collect()
    }

    fn check_shape(&self, action_counts: &[usize]) -> Result<()> {
        if self.amplitudes.len() != action_counts.len()
            || self.amplitudes.iter().zip(action_counts).any(|(a, &k)| a.len() != k)
        {
            return Err(Error::Shape(format!(
                "state shape does not match a game with actions {action_counts:?}"
            )));
        }
        Ok(())
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuantumConfig {
    pub hbar: f64,
    pub dt: f64,
    pub max_time: f64,
    pub residual_tolerance: f64,
}

impl Default for QuantumConfig {
    fn default() -> Self {
        Self::with_hbar(1.0)
    }
}

impl QuantumConfig {
    /// `dt = 0.01 hbar`, `max_time = 1000 hbar`, residual tolerance `1e-8`.
    pub fn with_hbar(hbar: f64) -> Self {
        Self {
            hbar,
            dt: 0.01 * hbar,
            max_time: 1000.0 * hbar,
            residual_tolerance: 1e-8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("hbar", self.hbar)?;
        positive("dt", self.dt)?;
        positive("max_time", self.max_time)?;
        positive("residual_tolerance", self.residual_tolerance)?;
        if self.dt >= self.hbar {
            return Err(Error::Config(format!(
                "dt ({}) must be smaller than hbar ({})",
                self.dt, self.hbar
            )));
        }
        Ok(())
    }
}

/// `e_i(x_i) = sum over x_{-i} of E_i(x) prod_{j != i} psi_j(x_j)^2`.
pub fn effective_field(
    objective: &NormalFormGame,
    state: &WavefunctionState,
    player: usize,
) -> Result<Vec<f64>> {
    state.check_shape(objective.action_counts())?;
    if player >= objective.player_count() {
        return Err(Error::PlayerOutOfRange {
            player,
            players: objective.player_count(),
        });
    }
    Ok(field_unchecked(objective, &state.probabilities(), player))
}

fn field_unchecked(objective: &NormalFormGame, probabilities: &[Vec<f64>], player: usize) -> Vec<f64> {
    dense_action_values(
        objective.action_counts(),
        objective.strides(),
        objective.table(player),
        probabilities,
        player,
    )
}

/// Effective fields of every player.
pub fn effective_fields(objective: &NormalFormGame, state: &WavefunctionState) -> Result<Vec<Vec<f64>>> {
    state.check_shape(objective.action_counts())?;
    let probabilities = state.probabilities();
    Ok((0..objective.player_count())
        .map(|i| field_unchecked(objective, &probabilities, i))
        .collect())
}

/// Rayleigh values `lambda_i = sum e_i(x) psi_i(x)^2`.
pub fn rayleigh_values(state: &WavefunctionState, fields: &[Vec<f64>]) -> Vec<f64> {
    state
        .amplitudes
        .iter()
        .zip(fields)
        .map(|(psi, e)| psi.iter().zip(e).map(|(a, v)| v * a * a).sum())
        .collect()
}

/// `||H_i psi_i - lambda_i psi_i||_2` with Rayleigh `lambda_i`.
pub fn eigen_residual(state: &WavefunctionState, fields: &[Vec<f64>]) -> Vec<f64> {
    rayleigh_values(state, fields)
        .into_iter()
        .zip(state.amplitudes.iter().zip(fields))
        .map(|(lambda, (psi, e))| {
            psi.iter()
                .zip(e)
                .map(|(a, v)| ((v - lambda) * a).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// One explicit Euler step, all players updated from the old state, then renormalized.
pub fn imaginary_time_step(
    objective: &NormalFormGame,
    state: &WavefunctionState,
    config: &QuantumConfig,
) -> Result<WavefunctionState> {
    config.validate()?;
    let fields = effective_fields(objective, state)?;
    step_with_fields(state, &fields, config)
}

fn step_with_fields(
    state: &WavefunctionState,
    fields: &[Vec<f64>],
    config: &QuantumConfig,
) -> Result<WavefunctionState> {
    let mut amplitudes = Vec::with_capacity(state.amplitudes.len());
    for (player, (psi, e)) in state.amplitudes.iter().zip(fields).enumerate() {
        let z: f64 = psi.iter().map(|a| a * a).sum();
        let max_field = e.iter().copied().fold(0.0, f64::max);
        let suggested_dt = 0.5 * config.hbar * z / max_field.max(f64::MIN_POSITIVE);
        let mut next = Vec::with_capacity(psi.len());
        for (a, v) in psi.iter().zip(e) {
            let factor = 1.0 - config.dt * v / (config.hbar * z);
            if factor < 0.0 && *a > 0.0 {
                return Err(Error::StepFailure {
                    player,
                    reason: format!("Euler factor {factor:.3e} would flip an amplitude's sign"),
                    suggested_dt,
                });
            }
            next.push(a * factor);
        }
        let norm = l2(&next);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::StepFailure {
                player,
                reason: format!("amplitude norm became {norm}"),
                suggested_dt,
            });
        }
        next.iter_mut().for_each(|v| *v /= norm);
        amplitudes.push(next);
    }
    Ok(WavefunctionState {
        amplitudes,
        time: state.time + config.dt,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryReport {
    pub state: WavefunctionState,
    pub lambda: Vec<f64>,
    pub residual: Vec<f64>,
    pub converged: bool,
    pub steps: usize,
}

/// One diagnostic sample of a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub time: f64,
    pub player: usize,
    pub lambda: f64,
    pub residual: f64,
    /// Shannon entropy of `|psi_i|^2`.
    pub entropy: f64,
}

pub const TRAJECTORY_CSV_HEADER: &str = "time,player,lambda,residual,entropy";

pub fn trajectory_csv(records: &[TrajectoryRecord]) -> String {
    let mut out = String::from(TRAJECTORY_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.time, r.player, r.lambda, r.residual, r.entropy
        ));
    }
    out
}

fn entropy(psi: &[f64]) -> f64 {
    psi.iter()
        .map(|a| a * a)
        .filter(|&w| w > 0.0)
        .map(|w| -w * w.ln())
        .sum()
}

/// Steps until every player's eigen-residual is within tolerance or time runs out.
pub fn evolve_to_stationary(
    objective: &NormalFormGame,
    initial: &WavefunctionState,
    config: &QuantumConfig,
) -> Result<StationaryReport> {
    evolve_with_trajectory(objective, initial, config, 0).map(|(report, _)| report)
}

/// Like [`evolve_to_stationary`], sampling the trajectory every `log_every` steps
/// (and at the final state). `log_every == 0` disables sampling.
pub fn evolve_with_trajectory(
    objective: &NormalFormGame,
    initial: &WavefunctionState,
    config: &QuantumConfig,
    log_every: usize,
) -> Result<(StationaryReport, Vec<TrajectoryRecord>)> {
    config.validate()?;
    initial.check_shape(objective.action_counts())?;
    for (i, psi) in initial.amplitudes.iter().enumerate() {
        if psi.iter().any(|a| *a < 0.0) || (l2(psi) - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidProfile(format!(
                "initial amplitudes of player {i} are not a nonnegative unit vector"
            )));
        }
    }
    let mut log = Vec::new();
    let mut record = |state: &WavefunctionState, lambda: &[f64], residual: &[f64]| {
        for (player, psi) in state.amplitudes.iter().enumerate() {
            log.push(TrajectoryRecord {
                time: state.time,
                player,
                lambda: lambda[player],
                residual: residual[player],
                entropy: entropy(psi),
            });
        }
    };

    let mut state = initial.clone();
    let mut steps = 0;
    loop {
        let fields = effective_fields(objective, &state)?;
        let lambda = rayleigh_values(&state, &fields);
        let residual = eigen_residual(&state, &fields);
        let converged = residual.iter().all(|&r| r <= config.residual_tolerance);
        let done = converged || state.time >= config.max_time;
        if log_every > 0 && (steps % log_every == 0 || done) {
            record(&state, &lambda, &residual);
        }
        if done {
            let report = StationaryReport {
                state,
                lambda,
                residual,
                converged,
                steps,
            };
            return Ok((report, log));
        }
        state = step_with_fields(&state, &fields, config)?;
        steps += 1;
    }
}
