//! Random societies: pairwise-payoff graphical games on random neighbor graphs.
//!
//! Under the exponential utility `u = exp(g / hbar)` an individual's utility
//! factorizes over its neighbors, so its expected returns are a product of
//! per-neighbor expectations and cost `O(deg * actions^2)` to evaluate.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{find_equilibrium, DynamicsConfig, EquilibriumReport};
use crate::error::{Error, Result};
use crate::game::{GraphicalGame, PairTable, PayoffModel};
use crate::nash::{best_response_dynamics, OutcomeKind};
use crate::profile::StrategyProfile;
use crate::seed::rng_for;
use crate::transform::{UtilityModel, UtilityTransform};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SocietySpec {
    pub population: usize,
    pub actions_per_individual: usize,
    pub average_neighbors: f64,
    #[serde(default = "default_low")]
    pub payoff_low: f64,
    #[serde(default = "default_high")]
    pub payoff_high: f64,
    pub seed: u64,
}

fn default_low() -> f64 {
    -0.6
}

fn default_high() -> f64 {
    0.4
}

impl SocietySpec {
    /// Payoffs drawn from the default interval `[-0.6, 0.4]`.
    pub fn new(population: usize, actions: usize, average_neighbors: f64, seed: u64) -> Self {
        Self {
            population,
            actions_per_individual: actions,
            average_neighbors,
            payoff_low: default_low(),
            payoff_high: default_high(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population == 0 || self.actions_per_individual == 0 {
            return Err(Error::Config(
                "population and actions per individual must be positive".into(),
            ));
        }
        if !(self.average_neighbors >= 0.0)
            || (self.average_neighbors >= self.population as f64 && self.average_neighbors > 0.0)
        {
            return Err(Error::Config(format!(
                "average_neighbors must lie in [0, population), got {}",
                self.average_neighbors
            )));
        }
        if !(self.payoff_low < self.payoff_high) || !self.payoff_high.is_finite() || !self.payoff_low.is_finite() {
            return Err(Error::Config(format!(
                "payoff interval [{}, {}] is empty or unbounded",
                self.payoff_low, self.payoff_high
            )));
        }
        Ok(())
    }

    /// Probability that any given pair are neighbors.
    pub fn edge_probability(&self) -> f64 {
        if self.population <= 1 {
            0.0
        } else {
            self.average_neighbors / (self.population - 1) as f64
        }
    }
}

/// Samples every unordered pair independently with probability
/// `average_neighbors / (population - 1)`, then fills both directed tables of
/// each edge with independent uniform draws.
pub fn generate_society(spec: &SocietySpec) -> Result<GraphicalGame> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let payoff = Uniform::new_inclusive(spec.payoff_low, spec.payoff_high);
    let p = spec.edge_probability();
    let k = spec.actions_per_individual;
    let mut edges = Vec::new();
    let mut tables = BTreeMap::new();
    for i in 0..spec.population {
        for j in (i + 1)..spec.population {
            if rng.gen::<f64>() < p {
                edges.push((i, j));
                for key in [(i, j), (j, i)] {
                    let data = (0..k * k).map(|_| payoff.sample(&mut rng)).collect();
                    tables.insert(key, PairTable::new(k, k, data)?);
                }
            }
        }
    }
    GraphicalGame::new(vec![k; spec.population], &edges, tables)
}

/// `degree,count` rows for every degree from 0 to the maximum.
pub fn degree_histogram_csv(society: &GraphicalGame) -> String {
    let degrees: Vec<usize> = (0..society.player_count()).map(|i| society.degree(i)).collect();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0usize; max + 1];
    for d in degrees {
        counts[d] += 1;
    }
    let mut out = String::from("degree,count\n");
    for (d, c) in counts.iter().enumerate() {
        out.push_str(&format!("{d},{c}\n"));
    }
    out
}

pub fn mean_degree(society: &GraphicalGame) -> f64 {
    2.0 * society.edge_count() as f64 / society.player_count() as f64
}

/// Exponential utilities of a society, evaluated by per-neighbor factorization.
#[derive(Clone, Debug)]
pub struct SocietyView<'a> {
    game: &'a GraphicalGame,
    hbar: f64,
    /// `exp(f_ij / hbar)` per player, aligned with `game.neighbors(i)`.
    factors: Vec<Vec<PairTable>>,
}

impl<'a> SocietyView<'a> {
    pub fn new(game: &'a GraphicalGame, hbar: f64) -> Result<Self> {
        UtilityTransform::Exponential { hbar }.validate()?;
        let factors = (0..game.player_count())
            .map(|i| {
                game.neighbors(i)
                    .iter()
                    .map(|nb| {
                        let t = &nb.table;
                        let data = t.values().iter().map(|f| (f / hbar).exp()).collect();
                        PairTable::new(t.rows(), t.cols(), data)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { game, hbar, factors })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    fn log_values(&self, profile: &StrategyProfile, player: usize) -> Vec<f64> {
        let actions = self.game.action_counts()[player];
        let mut logs = vec![0.0; actions];
        // running products, folded into `logs` before they leave a safe range
        let mut products = vec![1.0f64; actions];
        for (nb, factor) in self.game.neighbors(player).iter().zip(&self.factors[player]) {
            let q = profile.player(nb.player);
            for a in 0..actions {
                let s: f64 = factor.row(a).iter().zip(q).map(|(w, p)| w * p).sum();
                let prod = products[a] * s;
                if (1e-100..=1e100).contains(&prod) {
                    products[a] = prod;
                } else {
                    logs[a] += prod.ln();
                    products[a] = 1.0;
                }
            }
        }
        for (l, p) in logs.iter_mut().zip(products) {
            *l += p.ln();
        }
        logs
    }
}

impl UtilityModel for SocietyView<'_> {
    type Game = GraphicalGame;

    fn game(&self) -> &GraphicalGame {
        self.game
    }

    fn transform(&self) -> UtilityTransform {
        UtilityTransform::Exponential { hbar: self.hbar }
    }

    fn action_values(&self, profile: &StrategyProfile, player: usize) -> Vec<f64> {
        self.log_values(profile, player).into_iter().map(f64::exp).collect()
    }

    fn log_action_values(&self, profile: &StrategyProfile, player: usize) -> Result<Vec<f64>> {
        Ok(self.log_values(profile, player))
    }
}

/// Expected returns of `player` in a society. Mixed profiles need the
/// exponential transform; point-mass profiles accept any transform.
pub fn local_action_values(
    society: &GraphicalGame,
    profile: &StrategyProfile,
    player: usize,
    transform: UtilityTransform,
) -> Result<Vec<f64>> {
    if player >= society.player_count() {
        return Err(Error::PlayerOutOfRange {
            player,
            players: society.player_count(),
        });
    }
    profile.check_shape(society.action_counts())?;
    transform.validate()?;
    match transform {
        UtilityTransform::Exponential { hbar } => {
            let mut logs = vec![0.0; society.action_counts()[player]];
            for nb in society.neighbors(player) {
                let q = profile.player(nb.player);
                for (a, l) in logs.iter_mut().enumerate() {
                    let s: f64 = nb.table.row(a).iter().zip(q).map(|(f, p)| (f / hbar).exp() * p).sum();
                    *l += s.ln();
                }
            }
            Ok(logs.into_iter().map(f64::exp).collect())
        }
        _ => {
            let joint = profile.as_pure().ok_or_else(|| {
                Error::Unsupported(format!(
                    "transform {transform} does not factorize over neighbors; use exp:<hbar> or a pure profile"
                ))
            })?;
            Ok(society
                .pure_action_payoffs(player, &joint)
                .into_iter()
                .map(|g| transform.apply(g))
                .collect())
        }
    }
}

/// How each restart of a society run searches for an equilibrium.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SocietyRun {
    /// Finite selfishness; the transform must be exponential.
    Soft(DynamicsConfig),
    /// Infinite selfishness: best-response dynamics on raw payoffs.
    BestResponse { max_steps: usize },
}

/// Independent equilibrium searches from seeded random starts; restart `k`
/// uses the child seed `(master_seed, k)`. Output order follows `k`.
pub fn society_equilibrium_sample(
    society: &GraphicalGame,
    run: &SocietyRun,
    restarts: usize,
    master_seed: u64,
) -> Result<Vec<EquilibriumReport>> {
    match run {
        SocietyRun::Soft(config) => {
            let UtilityTransform::Exponential { hbar } = config.transform else {
                return Err(Error::Unsupported(format!(
                    "finite-alpha society runs need an exponential transform, got {}",
                    config.transform
                )));
            };
            config.validate(society.player_count())?;
            let view = SocietyView::new(society, hbar)?;
            (0..restarts)
                .into_par_iter()
                .map(|k| {
                    let mut rng = rng_for(master_seed, &[k as u64]);
                    let start = StrategyProfile::random_interior(society.action_counts(), &mut rng);
                    find_equilibrium(&view, config, &start)
                })
                .collect()
        }
        SocietyRun::BestResponse { max_steps } => (0..restarts)
            .into_par_iter()
            .map(|k| {
                let mut rng = rng_for(master_seed, &[k as u64]);
                let start: Vec<usize> = society
                    .action_counts()
                    .iter()
                    .map(|&a| rng.gen_range(0..a))
                    .collect();
                let outcome = best_response_dynamics(society, &start, *max_steps)?;
                let profile = StrategyProfile::point_mass(society.action_counts(), &outcome.joint_action)?;
                EquilibriumReport::for_profile(
                    society,
                    profile,
                    outcome.kind == OutcomeKind::Equilibrium,
                    outcome.sweeps,
                )
            })
            .collect(),
    }
}
