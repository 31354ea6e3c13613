//! Soft best-response dynamics.
//!
//! Each player's expected returns `Psi_i` are raised to its selfishness level
//! `alpha_i` and normalized into a new mixed strategy; iterating the map to a
//! fixed point yields an equilibrium. `alpha = 0` is indifference (uniform
//! play) and `alpha -> inf` recovers strict best response.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{expected_payoffs, NormalFormGame, PayoffModel};
use crate::nash::raw_epsilon_gap;
use crate::profile::StrategyProfile;
use crate::seed::rng_for;
use crate::transform::{transform_utilities, UtilityModel, UtilityTransform};

/// Damping levels tried, in order, after an undamped run fails to converge.
pub const RETRY_DAMPING: [f64; 2] = [0.5, 0.9];

/// Selfishness level: one value for everybody or one per player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Alpha {
    Uniform(f64),
    PerPlayer(Vec<f64>),
}

impl Alpha {
    pub fn for_player(&self, i: usize) -> f64 {
        match self {
            Alpha::Uniform(a) => *a,
            Alpha::PerPlayer(v) => v[i],
        }
    }

    fn validate(&self, players: usize) -> Result<()> {
        let values: &[f64] = match self {
            Alpha::Uniform(a) => std::slice::from_ref(a),
            Alpha::PerPlayer(v) => {
                if v.len() != players {
                    return Err(Error::Config(format!(
                        "{} alpha values for {players} players",
                        v.len()
                    )));
                }
                v
            }
        };
        match values.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
            Some(a) => Err(Error::Config(format!(
                "alpha must be finite and nonnegative, got {a}"
            ))),
            None => Ok(()),
        }
    }
}

impl From<f64> for Alpha {
    fn from(a: f64) -> Self {
        Alpha::Uniform(a)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateOrder {
    /// Every player responds to the previous profile.
    #[default]
    Synchronous,
    /// Players respond in index order, each seeing the already-updated ones.
    Sequential,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DynamicsConfig {
    pub alpha: Alpha,
    pub transform: UtilityTransform,
    /// L-infinity bound on the change between consecutive profiles.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// New profile is `(1 - damping) * response + damping * old`.
    pub damping: f64,
    pub update_order: UpdateOrder,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            alpha: Alpha::Uniform(1.0),
            transform: UtilityTransform::Identity,
            tolerance: 1e-9,
            max_iterations: 10_000,
            damping: 0.0,
            update_order: UpdateOrder::Synchronous,
        }
    }
}

impl DynamicsConfig {
    pub fn with_alpha(alpha: impl Into<Alpha>) -> Self {
        Self {
            alpha: alpha.into(),
            ..Self::default()
        }
    }

    pub fn validate(&self, players: usize) -> Result<()> {
        self.alpha.validate(players)?;
        self.transform.validate()?;
        if !(self.tolerance > 0.0) {
            return Err(Error::Config(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::Config(format!(
                "damping must lie in [0, 1), got {}",
                self.damping
            )));
        }
        Ok(())
    }
}

/// Outcome of a fixed-point search; populated whether or not it converged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub profile: StrategyProfile,
    pub converged: bool,
    pub iterations: usize,
    /// Expected raw payoff per player.
    pub per_player_payoff: Vec<f64>,
    pub overall: f64,
    /// Best unilateral gain on the utility scale that drove the dynamics.
    pub epsilon_gap: f64,
    /// Best unilateral gain on raw payoffs.
    pub raw_epsilon_gap: f64,
    /// L-infinity size of the last step.
    pub residual: f64,
    /// Damping of the attempt that produced this report.
    pub damping: f64,
}

impl EquilibriumReport {
    /// Report for a profile found by other means (e.g. a pure Nash point).
    pub fn for_profile<G: PayoffModel + ?Sized>(
        game: &G,
        profile: StrategyProfile,
        converged: bool,
        iterations: usize,
    ) -> Result<Self> {
        let per_player_payoff = expected_payoffs(game, &profile)?;
        let raw_gap = raw_epsilon_gap(game, &profile)?;
        Ok(Self {
            overall: per_player_payoff.iter().sum(),
            per_player_payoff,
            converged,
            iterations,
            epsilon_gap: raw_gap,
            raw_epsilon_gap: raw_gap,
            residual: 0.0,
            damping: 0.0,
            profile,
        })
    }
}

/// `exp(alpha * (l - max l))`, normalized. Exactly uniform when `alpha == 0`.
pub fn power_normalize(log_values: &[f64], alpha: f64) -> Vec<f64> {
    let max = log_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = if alpha == 0.0 {
        vec![1.0; log_values.len()]
    } else {
        log_values.iter().map(|l| (alpha * (l - max)).exp()).collect()
    };
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// One application of the soft-response map `p_i' ∝ Psi_i^alpha_i`, with damping.
pub fn soft_response_step<M: UtilityModel + ?Sized>(
    model: &M,
    profile: &StrategyProfile,
    config: &DynamicsConfig,
) -> Result<StrategyProfile> {
    let players = model.game().player_count();
    config.validate(players)?;
    profile.check_shape(model.game().action_counts())?;
    step_unchecked(model, profile, config, config.damping)
}

fn step_unchecked<M: UtilityModel + ?Sized>(
    model: &M,
    profile: &StrategyProfile,
    config: &DynamicsConfig,
    damping: f64,
) -> Result<StrategyProfile> {
    let players = profile.player_count();
    let mut next = profile.clone();
    for i in 0..players {
        let source = match config.update_order {
            UpdateOrder::Synchronous => profile,
            UpdateOrder::Sequential => &next,
        };
        let logs = model.log_action_values(source, i)?;
        let mut response = power_normalize(&logs, config.alpha.for_player(i));
        if damping > 0.0 {
            for (r, old) in response.iter_mut().zip(profile.player(i)) {
                *r = (1.0 - damping) * *r + damping * old;
            }
        }
        next.set_player(i, response);
    }
    Ok(next)
}

struct Attempt {
    profile: StrategyProfile,
    converged: bool,
    iterations: usize,
    residual: f64,
}

fn iterate<M: UtilityModel + ?Sized>(
    model: &M,
    config: &DynamicsConfig,
    initial: &StrategyProfile,
    damping: f64,
) -> Result<Attempt> {
    let mut profile = initial.clone();
    let mut residual = f64::INFINITY;
    for iteration in 1..=config.max_iterations {
        let next = step_unchecked(model, &profile, config, damping)?;
        residual = next.linf_distance(&profile);
        profile = next;
        if residual <= config.tolerance {
            return Ok(Attempt {
                profile,
                converged: true,
                iterations: iteration,
                residual,
            });
        }
    }
    Ok(Attempt {
        profile,
        converged: false,
        iterations: config.max_iterations,
        residual,
    })
}

/// Iterates [`soft_response_step`] from `initial` until the profile stops moving.
///
/// A run that does not settle within `max_iterations` is retried from the same
/// start with the heavier dampings in [`RETRY_DAMPING`]; damping does not change
/// the set of fixed points. Non-convergence is reported, not raised.
pub fn find_equilibrium<M: UtilityModel + ?Sized>(
    model: &M,
    config: &DynamicsConfig,
    initial: &StrategyProfile,
) -> Result<EquilibriumReport> {
    let game = model.game();
    config.validate(game.player_count())?;
    initial.check_shape(game.action_counts())?;

    let mut damping = config.damping;
    let mut attempt = iterate(model, config, initial, damping)?;
    for &retry in RETRY_DAMPING.iter().filter(|&&d| d > config.damping) {
        if attempt.converged {
            break;
        }
        damping = retry;
        attempt = iterate(model, config, initial, damping)?;
    }

    let per_player_payoff = expected_payoffs(game, &attempt.profile)?;
    Ok(EquilibriumReport {
        overall: per_player_payoff.iter().sum(),
        per_player_payoff,
        epsilon_gap: epsilon_gap(model, &attempt.profile)?,
        raw_epsilon_gap: raw_epsilon_gap(game, &attempt.profile)?,
        converged: attempt.converged,
        iterations: attempt.iterations,
        residual: attempt.residual,
        damping,
        profile: attempt.profile,
    })
}

/// `max_i [ max_x Psi_i(x) - sum_x p_i(x) Psi_i(x) ]` on the utility scale.
pub fn epsilon_gap<M: UtilityModel + ?Sized>(model: &M, profile: &StrategyProfile) -> Result<f64> {
    profile.check_shape(model.game().action_counts())?;
    Ok((0..profile.player_count())
        .map(|i| deviation_gain(&model.action_values(profile, i), profile.player(i)))
        .fold(0.0, f64::max))
}

pub(crate) fn deviation_gain(values: &[f64], distribution: &[f64]) -> f64 {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let current: f64 = values.iter().zip(distribution).map(|(v, p)| v * p).sum();
    (best - current).max(0.0)
}

/// A selfishness level on the extended line; `Infinite` denotes the Nash limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaLevel {
    Finite(f64),
    Infinite,
}

impl fmt::Display for AlphaLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaLevel::Finite(a) => write!(f, "{a}"),
            AlphaLevel::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for AlphaLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "∞") {
            return Ok(AlphaLevel::Infinite);
        }
        let a: f64 = s
            .parse()
            .map_err(|_| Error::Config(format!("'{s}' is not a selfishness level")))?;
        if !(a >= 0.0) {
            return Err(Error::Config(format!("alpha must be nonnegative, got {a}")));
        }
        Ok(if a.is_infinite() {
            AlphaLevel::Infinite
        } else {
            AlphaLevel::Finite(a)
        })
    }
}

impl Serialize for AlphaLevel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AlphaLevel::Finite(a) => s.serialize_f64(*a),
            AlphaLevel::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for AlphaLevel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(a) if a >= 0.0 => Ok(AlphaLevel::Finite(a)),
            Raw::Number(a) => Err(serde::de::Error::custom(format!(
                "alpha must be nonnegative, got {a}"
            ))),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: AlphaLevel,
    pub restart: usize,
    pub report: EquilibriumReport,
}

/// Equilibria over a grid of selfishness levels, ordered by `(alpha, restart)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub player_count: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn csv_header(player_count: usize) -> String {
        let mut header = String::from("alpha,restart,converged,iterations,epsilon,overall");
        for i in 0..player_count {
            header.push_str(&format!(",payoff_{i}"));
        }
        header
    }

    pub fn to_csv(&self) -> String {
        let mut out = Self::csv_header(self.player_count);
        out.push('\n');
        for row in &self.rows {
            let r = &row.report;
            out.push_str(&format!(
                "{},{},{},{},{},{}",
                row.alpha, row.restart, r.converged, r.iterations, r.epsilon_gap, r.overall
            ));
            for p in &r.per_player_payoff {
                out.push_str(&format!(",{p}"));
            }
            out.push('\n');
        }
        out
    }

    /// Rows at one selfishness level.
    pub fn at(&self, alpha: AlphaLevel) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.alpha == alpha)
    }
}

/// Runs [`find_equilibrium`] from `restarts` seeded interior starts at every
/// level of `alpha_grid`. Restart `k` at grid index `a` draws its start from
/// the child seed `(master_seed, a, k)`, so the table does not depend on scheduling.
pub fn sweep_alpha(
    game: &NormalFormGame,
    base: &DynamicsConfig,
    alpha_grid: &[f64],
    restarts: usize,
    master_seed: u64,
) -> Result<SweepTable> {
    if alpha_grid.is_empty() {
        return Err(Error::Empty("alpha grid".into()));
    }
    if restarts == 0 {
        return Err(Error::Config("restarts must be at least 1".into()));
    }
    let view = transform_utilities(game, base.transform)?;
    let jobs: Vec<(usize, usize)> = (0..alpha_grid.len())
        .flat_map(|a| (0..restarts).map(move |k| (a, k)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(a, k)| {
            let config = DynamicsConfig {
                alpha: Alpha::Uniform(alpha_grid[a]),
                ..base.clone()
            };
            let mut rng = rng_for(master_seed, &[a as u64, k as u64]);
            let start = StrategyProfile::random_interior(game.action_counts(), &mut rng);
            Ok(SweepRow {
                alpha: AlphaLevel::Finite(alpha_grid[a]),
                restart: k,
                report: find_equilibrium(&view, &config, &start)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        player_count: game.player_count(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::transform::transform_utilities;

    fn pd_fixed_point() -> f64 {
        // root of 4p^2 + p - 1 = 0
        (17f64.sqrt() - 1.0) / 8.0
    }

    #[test]
    fn pd_single_step_at_alpha_one() {
        let g = catalog::prisoners_dilemma();
        let v = transform_utilities(&g, UtilityTransform::Identity).unwrap();
        let next = soft_response_step(
            &v,
            &StrategyProfile::uniform(&[2, 2]),
            &DynamicsConfig::with_alpha(1.0),
        )
        .unwrap();
        for i in 0..2 {
            assert!((next.player(i)[0] - 0.4).abs() < 1e-15);
        }
    }

    #[test]
    fn alpha_zero_is_exactly_uniform() {
        let g = catalog::five_by_five();
        let v = transform_utilities(&g, UtilityTransform::unit_min_shift(&g)).unwrap();
        let start = StrategyProfile::point_mass(&[5, 5], &[3, 1]).unwrap();
        let next = soft_response_step(&v, &start, &DynamicsConfig::with_alpha(0.0)).unwrap();
        assert_eq!(next, StrategyProfile::uniform(&[5, 5]));
    }

    #[test]
    fn large_alpha_collapses_without_overflow() {
        let g = catalog::prisoners_dilemma();
        let v = transform_utilities(&g, UtilityTransform::Identity).unwrap();
        let next = soft_response_step(
            &v,
            &StrategyProfile::uniform(&[2, 2]),
            &DynamicsConfig::with_alpha(1000.0),
        )
        .unwrap();
        let c = next.player(0)[0];
        assert!(c < 1e-100 && c > 0.0);
        // (2/3)^1000 / (1 + (2/3)^1000)
        let expected = (1000.0 * (2f64 / 3.0).ln()).exp();
        assert!(((c - expected) / expected).abs() < 1e-9);
    }

    #[test]
    fn pd_alpha_one_fixed_point() {
        let g = catalog::prisoners_dilemma();
        let v = transform_utilities(&g, UtilityTransform::Identity).unwrap();
        let r = find_equilibrium(&v, &DynamicsConfig::with_alpha(1.0), &StrategyProfile::uniform(&[2, 2]))
            .unwrap();
        assert!(r.converged);
        let p = pd_fixed_point();
        for i in 0..2 {
            assert!((r.profile.player(i)[0] - p).abs() < 1e-8);
        }
        // 3p^2 + p(1-p) + 4(1-p)p + 2(1-p)^2 = 2 + p
        let payoff = 2.0 + p;
        assert!((r.per_player_payoff[0] - payoff).abs() < 1e-8);
        assert!((r.overall - r.per_player_payoff.iter().sum::<f64>()).abs() < 1e-12);
        assert!((r.epsilon_gap - p).abs() < 1e-8);
        assert!(r.residual <= 1e-9);
    }

    #[test]
    fn pd_alpha_zero_converges_in_one_step() {
        let g = catalog::prisoners_dilemma();
        let v = transform_utilities(&g, UtilityTransform::Identity).unwrap();
        let r = find_equilibrium(&v, &DynamicsConfig::with_alpha(0.0), &StrategyProfile::uniform(&[2, 2]))
            .unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.per_player_payoff, vec![2.5, 2.5]);
    }

    #[test]
    fn pd_large_alpha_approaches_nash() {
        let g = catalog::prisoners_dilemma();
        let v = transform_utilities(&g, UtilityTransform::Identity).unwrap();
        let r = find_equilibrium(&v, &DynamicsConfig::with_alpha(100.0), &StrategyProfile::uniform(&[2, 2]))
            .unwrap();
        assert!(r.converged);
        assert!(r.profile.player(0)[0] <= 0.01);
        assert!((r.per_player_payoff[0] - 2.0).abs() < 0.01);
    }

    #[test]
    fn epsilon_gap_examples() {
        let g = catalog::prisoners_dilemma();
        let v = transform_utilities(&g, UtilityTransform::Identity).unwrap();
        let dd = StrategyProfile::point_mass(&[2, 2], &[1, 1]).unwrap();
        assert_eq!(epsilon_gap(&v, &dd).unwrap(), 0.0);
        assert_eq!(epsilon_gap(&v, &StrategyProfile::uniform(&[2, 2])).unwrap(), 0.5);
    }

    #[test]
    fn config_validation() {
        let bad = [
            DynamicsConfig { tolerance: 0.0, ..Default::default() },
            DynamicsConfig { damping: 1.0, ..Default::default() },
            DynamicsConfig { alpha: Alpha::Uniform(-1.0), ..Default::default() },
            DynamicsConfig { alpha: Alpha::PerPlayer(vec![1.0]), ..Default::default() },
            DynamicsConfig { max_iterations: 0, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate(2).is_err(), "{c:?}");
        }
        let per_player = DynamicsConfig { alpha: Alpha::PerPlayer(vec![1.0, 3.0]), ..Default::default() };
        per_player.validate(2).unwrap();
    }

    #[test]
    fn heterogeneous_alpha_is_applied_per_player() {
        let g = catalog::prisoners_dilemma();
        let v = transform_utilities(&g, UtilityTransform::Identity).unwrap();
        let config = DynamicsConfig { alpha: Alpha::PerPlayer(vec![0.0, 1.0]), ..Default::default() };
        let next = soft_response_step(&v, &StrategyProfile::uniform(&[2, 2]), &config).unwrap();
        assert_eq!(next.player(0), &[0.5, 0.5]);
        assert!((next.player(1)[0] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn sequential_order_sees_updated_players() {
        let g = catalog::prisoners_dilemma();
        let v = transform_utilities(&g, UtilityTransform::Identity).unwrap();
        let config = DynamicsConfig { update_order: UpdateOrder::Sequential, ..DynamicsConfig::with_alpha(1.0) };
        let next = soft_response_step(&v, &StrategyProfile::uniform(&[2, 2]), &config).unwrap();
        assert!((next.player(0)[0] - 0.4).abs() < 1e-15);
        // player 1 faces p(C) = 0.4: Psi = (1 + 2*0.4, 2 + 2*0.4)
        assert!((next.player(1)[0] - 1.8 / 4.6).abs() < 1e-15);
    }

    #[test]
    fn alpha_level_parsing() {
        assert_eq!("inf".parse::<AlphaLevel>().unwrap(), AlphaLevel::Infinite);
        assert_eq!("2.5".parse::<AlphaLevel>().unwrap(), AlphaLevel::Finite(2.5));
        assert!("-1".parse::<AlphaLevel>().is_err());
        assert_eq!(AlphaLevel::Infinite.to_string(), "inf");
        let json = serde_json::to_string(&vec![AlphaLevel::Finite(30.0), AlphaLevel::Infinite]).unwrap();
        assert_eq!(json, "[30.0,\"inf\"]");
        let back: Vec<AlphaLevel> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![AlphaLevel::Finite(30.0), AlphaLevel::Infinite]);
    }

    #[test]
    fn sweep_rows_are_ordered_and_csv_shaped() {
        let g = catalog::prisoners_dilemma();
        let t = sweep_alpha(&g, &DynamicsConfig::default(), &[0.0, 1.0, 100.0], 2, 11).unwrap();
        let keys: Vec<_> = t.rows.iter().map(|r| (r.alpha.to_string(), r.restart)).collect();
        assert_eq!(keys[0], ("0".to_string(), 0));
        assert_eq!(keys[5], ("100".to_string(), 1));
        assert_eq!(t.rows[0].report.per_player_payoff, vec![2.5, 2.5]);
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "alpha,restart,converged,iterations,epsilon,overall,payoff_0,payoff_1"
        );
        assert_eq!(lines.count(), 6);
        assert!(sweep_alpha(&g, &DynamicsConfig::default(), &[], 1, 0).is_err());
        assert!(sweep_alpha(&g, &DynamicsConfig::default(), &[1.0], 0, 0).is_err());
    }
}
