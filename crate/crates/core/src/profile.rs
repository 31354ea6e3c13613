//! Mixed strategy profiles: one probability distribution per player.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the sum of each distribution.
pub const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StrategyProfile {
    distributions: Vec<Vec<f64>>,
}

impl StrategyProfile {
    /// Validates and wraps per-player distributions.
    pub fn new(distributions: Vec<Vec<f64>>) -> Result<Self> {
        for (i, d) in distributions.iter().enumerate() {
            check_distribution(i, d)?;
        }
        Ok(Self { distributions })
    }

    /// Rescales nonnegative weights so that each player's entries sum to one.
    pub fn normalized(mut weights: Vec<Vec<f64>>) -> Result<Self> {
        for (i, w) in weights.iter_mut().enumerate() {
            if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidProfile(format!(
                    "player {i} has a negative or non-finite weight"
                )));
            }
            let total: f64 = w.iter().sum();
            if total <= 0.0 {
                return Err(Error::InvalidProfile(format!("player {i} has zero total weight")));
            }
            w.iter_mut().for_each(|v| *v /= total);
        }
        Self::new(weights)
    }

    pub fn uniform(action_counts: &[usize]) -> Self {
        let distributions = action_counts
            .iter()
            .map(|&k| vec![1.0 / k as f64; k])
            .collect();
        Self { distributions }
    }

    /// Point mass on `joint[i]` for every player `i`.
    pub fn point_mass(action_counts: &[usize], joint: &[usize]) -> Result<Self> {
        if joint.len() != action_counts.len() {
            return Err(Error::Shape(format!(
                "joint action has {} entries, game has {} players",
                joint.len(),
                action_counts.len()
            )));
        }
        let mut distributions = Vec::with_capacity(joint.len());
        for (i, (&k, &a)) in action_counts.iter().zip(joint).enumerate() {
            if a >= k {
                return Err(Error::Shape(format!(
                    "action {a} out of range for player {i} with {k} actions"
                )));
            }
            let mut d = vec![0.0; k];
            d[a] = 1.0;
            distributions.push(d);
        }
        Ok(Self { distributions })
    }

    /// Interior point: every coordinate drawn uniformly from (0, 1), then normalized.
    pub fn random_interior<R: Rng + ?Sized>(action_counts: &[usize], rng: &mut R) -> Self {
        let distributions = action_counts
            .iter()
            .map(|&k| {
                let mut w: Vec<f64> = (0..k)
                    .map(|_| loop {
                        let u: f64 = rng.gen();
                        if u > 0.0 {
                            break u;
                        }
                    })
                    .collect();
                let total: f64 = w.iter().sum();
                w.iter_mut().for_each(|v| *v /= total);
                w
            })
            .collect();
        Self { distributions }
    }

    pub fn player_count(&self) -> usize {
        self.distributions.len()
    }

    pub fn player(&self, i: usize) -> &[f64] {
        &self.distributions[i]
    }

    pub fn distributions(&self) -> &[Vec<f64>] {
        &self.distributions
    }

    pub fn into_inner(self) -> Vec<Vec<f64>> {
        self.distributions
    }

    pub(crate) fn set_player(&mut self, i: usize, d: Vec<f64>) {
        self.distributions[i] = d;
    }

    /// Checks that the profile's shape matches a game's action counts.
    pub fn check_shape(&self, action_counts: &[usize]) -> Result<()> {
        if self.distributions.len() != action_counts.len() {
            return Err(Error::InvalidProfile(format!(
                "profile has {} players, game has {}",
                self.distributions.len(),
                action_counts.len()
            )));
        }
        for (i, (d, &k)) in self.distributions.iter().zip(action_counts).enumerate() {
            if d.len() != k {
                return Err(Error::InvalidProfile(format!(
                    "player {i} distribution has {} entries, expected {k}",
                    d.len()
                )));
            }
        }
        Ok(())
    }

    /// Largest absolute difference over all probability entries.
    pub fn linf_distance(&self, other: &StrategyProfile) -> f64 {
        self.distributions
            .iter()
            .zip(&other.distributions)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    /// The joint action if every player plays a pure strategy.
    pub fn as_pure(&self) -> Option<Vec<usize>> {
        self.distributions
            .iter()
            .map(|d| {
                let support: Vec<usize> = (0..d.len()).filter(|&a| d[a] != 0.0).collect();
                (support.len() == 1 && d[support[0]] == 1.0).then(|| support[0])
            })
            .collect()
    }

    /// Index of the most likely action per player, lowest index on ties.
    pub fn modal_actions(&self) -> Vec<usize> {
        self.distributions.iter().map(|d| argmax(d)).collect()
    }
}

fn check_distribution(player: usize, d: &[f64]) -> Result<()> {
    if d.is_empty() {
        return Err(Error::InvalidProfile(format!("player {player} has no actions")));
    }
    if let Some(v) = d.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidProfile(format!(
            "player {player} has invalid probability {v}"
        )));
    }
    let total: f64 = d.iter().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidProfile(format!(
            "player {player} distribution sums to {total}"
        )));
    }
    Ok(())
}

/// First index of the maximum value.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (a, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = a;
        }
    }
    best
}
