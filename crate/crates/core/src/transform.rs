//! Positive utilities derived from raw payoffs, and the expected-return vectors they induce.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{dense_action_values, NormalFormGame, PayoffModel};
use crate::profile::StrategyProfile;

/// Expected returns below this are floored before taking logarithms.
pub const RETURN_FLOOR: f64 = 1e-300;

/// Strictly increasing entrywise map from raw payoffs to utilities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum UtilityTransform {
    #[default]
    Identity,
    Shift { offset: f64 },
    Exponential { hbar: f64 },
}

impl UtilityTransform {
    /// Shift that maps the smallest raw payoff of `game` to exactly 1.
    pub fn unit_min_shift(game: &NormalFormGame) -> Self {
        UtilityTransform::Shift {
            offset: 1.0 - game.min_payoff(),
        }
    }

    #[inline]
    pub fn apply(&self, raw: f64) -> f64 {
        match *self {
            UtilityTransform::Identity => raw,
            UtilityTransform::Shift { offset } => raw + offset,
            UtilityTransform::Exponential { hbar } => (raw / hbar).exp(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            UtilityTransform::Shift { offset } if !offset.is_finite() => {
                Err(Error::Config(format!("shift offset {offset} is not finite")))
            }
            UtilityTransform::Exponential { hbar } if !(hbar > 0.0 && hbar.is_finite()) => {
                Err(Error::Config(format!("hbar must be positive and finite, got {hbar}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for UtilityTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UtilityTransform::Identity => write!(f, "identity"),
            UtilityTransform::Shift { offset } => write!(f, "shift:{offset}"),
            UtilityTransform::Exponential { hbar } => write!(f, "exp:{hbar}"),
        }
    }
}

impl FromStr for UtilityTransform {
    type Err = Error;

    /// Parses `identity`, `shift:<offset>` or `exp:<hbar>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unrecognized transform '{s}'"));
        let t = match s.split_once(':') {
            None if s == "identity" => UtilityTransform::Identity,
            Some(("shift", v)) => UtilityTransform::Shift {
                offset: v.trim().parse().map_err(|_| bad())?,
            },
            Some(("exp", v)) => UtilityTransform::Exponential {
                hbar: v.trim().parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        t.validate()?;
        Ok(t)
    }
}

impl TryFrom<String> for UtilityTransform {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<UtilityTransform> for String {
    fn from(t: UtilityTransform) -> String {
        t.to_string()
    }
}

/// Source of expected returns `Psi_i` for the soft-response dynamics.
pub trait UtilityModel: Sync {
    type Game: PayoffModel;

    /// The underlying game with raw payoffs, used for reporting.
    fn game(&self) -> &Self::Game;

    fn transform(&self) -> UtilityTransform;

    /// `Psi_i(x_i)`: expected utility of each of `player`'s actions.
    fn action_values(&self, profile: &StrategyProfile, player: usize) -> Vec<f64>;

    /// `ln Psi_i`, with values below [`RETURN_FLOOR`] floored.
    fn log_action_values(&self, profile: &StrategyProfile, player: usize) -> Result<Vec<f64>> {
        self.action_values(profile, player)
            .into_iter()
            .enumerate()
            .map(|(action, v)| {
                if v > 0.0 {
                    Ok(v.max(RETURN_FLOOR).ln())
                } else {
                    Err(Error::NonPositiveReturn {
                        player,
                        action,
                        value: v,
                    })
                }
            })
            .collect()
    }
}

/// Transformed utilities of a dense game. Raw payoffs stay reachable through [`UtilityModel::game`].
#[derive(Clone, Debug)]
pub struct UtilityView<'a> {
    game: &'a NormalFormGame,
    transform: UtilityTransform,
    utilities: Vec<Vec<f64>>,
}

impl<'a> UtilityView<'a> {
    pub fn utility(&self, player: usize, joint: &[usize]) -> f64 {
        self.utilities[player][self.game.index_of(joint)]
    }

    pub fn utilities(&self, player: usize) -> &[f64] {
        &self.utilities[player]
    }
}

/// Applies `transform` to every payoff. Identity and shift must leave every utility strictly positive.
pub fn transform_utilities(
    game: &NormalFormGame,
    transform: UtilityTransform,
) -> Result<UtilityView<'_>> {
    transform.validate()?;
    let mut utilities = Vec::with_capacity(game.player_count());
    for (player, table) in game.tables().iter().enumerate() {
        let mapped: Vec<f64> = table.iter().map(|&g| transform.apply(g)).collect();
        if let Some(idx) = mapped.iter().position(|&u| !(u > 0.0) || !u.is_finite()) {
            return Err(Error::NonPositiveUtility {
                player,
                joint: game.joint_of(idx),
                value: mapped[idx],
            });
        }
        utilities.push(mapped);
    }
    Ok(UtilityView {
        game,
        transform,
        utilities,
    })
}

impl UtilityModel for UtilityView<'_> {
    type Game = NormalFormGame;

    fn game(&self) -> &NormalFormGame {
        self.game
    }

    fn transform(&self) -> UtilityTransform {
        self.transform
    }

    fn action_values(&self, profile: &StrategyProfile, player: usize) -> Vec<f64> {
        dense_action_values(
            self.game.action_counts(),
            self.game.strides(),
            &self.utilities[player],
            profile.distributions(),
            player,
        )
    }
}

/// `Psi_i(x_i) = sum over x_{-i} of u_i(x) prod_{j != i} p_j(x_j)`, with index and shape checks.
pub fn expected_action_values<M: UtilityModel + ?Sized>(
    view: &M,
    profile: &StrategyProfile,
    player: usize,
) -> Result<Vec<f64>> {
    let counts = view.game().action_counts();
    if player >= counts.len() {
        return Err(Error::PlayerOutOfRange {
            player,
            players: counts.len(),
        });
    }
    profile.check_shape(counts)?;
    Ok(view.action_values(profile, player))
}
