//! Dense normal-form and sparse pairwise (graphical) games.
//!
//! Dense payoff tables are stored row-major over the joint action space with
//! player 0 as the most significant axis.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::profile::StrategyProfile;

/// Largest joint action space that dense operations will materialize.
pub const MAX_JOINT_ACTIONS: u128 = 10_000_000;

/// Raw payoffs of a finite game, evaluated under pure or mixed play.
pub trait PayoffModel: Sync {
    fn action_counts(&self) -> &[usize];

    fn player_count(&self) -> usize {
        self.action_counts().len()
    }

    /// `g_i(joint)`.
    fn pure_payoff(&self, player: usize, joint: &[usize]) -> f64;

    /// Raw payoff of each of `player`'s actions with everybody else fixed at `joint`.
    fn pure_action_payoffs(&self, player: usize, joint: &[usize]) -> Vec<f64>;

    /// Expected raw payoff of each of `player`'s actions against the opponents' mixed strategies.
    fn raw_action_values(&self, profile: &StrategyProfile, player: usize) -> Vec<f64>;
}

/// Advances `joint` to the next joint action in row-major order.
/// Returns `false` after wrapping around past the last one.
pub fn next_joint(joint: &mut [usize], action_counts: &[usize]) -> bool {
    for k in (0..joint.len()).rev() {
        joint[k] += 1;
        if joint[k] < action_counts[k] {
            return true;
        }
        joint[k] = 0;
    }
    false
}

pub fn joint_space_size(action_counts: &[usize]) -> u128 {
    action_counts.iter().map(|&k| k as u128).product()
}

fn check_player(player: usize, players: usize) -> Result<()> {
    if player >= players {
        Err(Error::PlayerOutOfRange { player, players })
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormGame {
    action_counts: Vec<usize>,
    strides: Vec<usize>,
    payoffs: Vec<Vec<f64>>,
}

impl NormalFormGame {
    /// Builds a game from one row-major payoff table per player.
    pub fn new(action_counts: Vec<usize>, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        if action_counts.is_empty() {
            return Err(Error::Shape("a game needs at least one player".into()));
        }
        if let Some(i) = action_counts.iter().position(|&k| k == 0) {
            return Err(Error::Shape(format!("player {i} has no actions")));
        }
        let size = joint_space_size(&action_counts);
        if size > MAX_JOINT_ACTIONS {
            return Err(Error::TooLarge {
                size,
                limit: MAX_JOINT_ACTIONS,
            });
        }
        if payoffs.len() != action_counts.len() {
            return Err(Error::Shape(format!(
                "{} payoff tables for {} players",
                payoffs.len(),
                action_counts.len()
            )));
        }
        let size = size as usize;
        let mut strides = vec![1; action_counts.len()];
        for k in (0..action_counts.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * action_counts[k + 1];
        }
        let game = Self {
            action_counts,
            strides,
            payoffs,
        };
        for (i, table) in game.payoffs.iter().enumerate() {
            if table.len() != size {
                return Err(Error::Shape(format!(
                    "player {i} table has {} entries, expected {size}",
                    table.len()
                )));
            }
            if let Some(idx) = table.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    player: i,
                    joint: game.joint_of(idx),
                    value: table[idx],
                });
            }
        }
        Ok(game)
    }

    /// Two-player game from a row-player matrix and a column-player matrix.
    pub fn bimatrix(row: &[Vec<f64>], column: &[Vec<f64>]) -> Result<Self> {
        let rows = row.len();
        let cols = row.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::Shape("bimatrix must be non-empty".into()));
        }
        if column.len() != rows
            || row.iter().chain(column).any(|r| r.len() != cols)
        {
            return Err(Error::Shape(format!(
                "both matrices must be {rows}x{cols}"
            )));
        }
        let flat = |m: &[Vec<f64>]| m.iter().flatten().copied().collect::<Vec<_>>();
        Self::new(vec![rows, cols], vec![flat(row), flat(column)])
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn table(&self, player: usize) -> &[f64] {
        &self.payoffs[player]
    }

    pub fn tables(&self) -> &[Vec<f64>] {
        &self.payoffs
    }

    pub fn joint_count(&self) -> usize {
        self.payoffs[0].len()
    }

    pub fn index_of(&self, joint: &[usize]) -> usize {
        joint.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    pub fn joint_of(&self, mut index: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|s| {
                let a = index / s;
                index %= s;
                a
            })
            .collect()
    }

    pub fn min_payoff(&self) -> f64 {
        self.payoffs.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    /// Applies `f` entrywise to every table.
    pub fn map_payoffs(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let payoffs = self
            .payoffs
            .iter()
            .map(|t| t.iter().map(|&v| f(v)).collect())
            .collect();
        Self::new(self.action_counts.clone(), payoffs)
    }
}

/// Per-action expectation of a dense table over the other players' mixed strategies.
pub(crate) fn dense_action_values(
    action_counts: &[usize],
    strides: &[usize],
    table: &[f64],
    weights: &[Vec<f64>],
    player: usize,
) -> Vec<f64> {
    let mut values = vec![0.0; action_counts[player]];
    let mut joint = vec![0usize; action_counts.len()];
    loop {
        let mut weight = 1.0;
        for (j, &a) in joint.iter().enumerate() {
            if j != player {
                weight *= weights[j][a];
            }
        }
        if weight != 0.0 {
            let idx: usize = joint.iter().zip(strides).map(|(a, s)| a * s).sum();
            values[joint[player]] += weight * table[idx];
        }
        if !next_joint(&mut joint, action_counts) {
            break;
        }
    }
    values
}

impl PayoffModel for NormalFormGame {
    fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    fn pure_payoff(&self, player: usize, joint: &[usize]) -> f64 {
        self.payoffs[player][self.index_of(joint)]
    }

    fn pure_action_payoffs(&self, player: usize, joint: &[usize]) -> Vec<f64> {
        let base = self.index_of(joint) - joint[player] * self.strides[player];
        (0..self.action_counts[player])
            .map(|a| self.payoffs[player][base + a * self.strides[player]])
            .collect()
    }

    fn raw_action_values(&self, profile: &StrategyProfile, player: usize) -> Vec<f64> {
        dense_action_values(
            &self.action_counts,
            &self.strides,
            &self.payoffs[player],
            profile.distributions(),
            player,
        )
    }
}

/// A dense `rows x cols` matrix of pairwise payoffs `f_ij(x_i, x_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairTable {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl PairTable {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "pair table has {} entries, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged pair table".into()));
        }
        Self::new(rows.len(), cols, rows.iter().flatten().copied().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, own: usize, other: usize) -> f64 {
        self.data[own * self.cols + other]
    }

    pub fn row(&self, own: usize) -> &[f64] {
        &self.data[own * self.cols..(own + 1) * self.cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }
}

/// One entry of a player's adjacency list: the neighbor and the player's own table against it.
#[derive(Clone, Debug, PartialEq)]
pub struct Neighbor {
    pub player: usize,
    pub table: PairTable,
}

/// Game whose payoff for player `i` is `sum over neighbors j of f_ij(x_i, x_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphicalGame {
    action_counts: Vec<usize>,
    adjacency: Vec<Vec<Neighbor>>,
}

impl GraphicalGame {
    /// `tables` maps each directed pair `(i, j)` to `f_ij`; both directions must be present for every edge.
    pub fn new(
        action_counts: Vec<usize>,
        edges: &[(usize, usize)],
        mut tables: BTreeMap<(usize, usize), PairTable>,
    ) -> Result<Self> {
        let n = action_counts.len();
        if n == 0 {
            return Err(Error::Shape("a game needs at least one player".into()));
        }
        if let Some(i) = action_counts.iter().position(|&k| k == 0) {
            return Err(Error::Shape(format!("player {i} has no actions")));
        }
        let mut seen = BTreeSet::new();
        let mut adjacency: Vec<Vec<Neighbor>> = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a == b {
                return Err(Error::Shape(format!("self-loop on player {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::Shape(format!("edge ({a}, {b}) out of range")));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(Error::Shape(format!("duplicate edge ({a}, {b})")));
            }
            for (i, j) in [(a, b), (b, a)] {
                let table = tables.remove(&(i, j)).ok_or_else(|| {
                    Error::Shape(format!("missing table f_{i}{j} for edge ({a}, {b})"))
                })?;
                if table.rows() != action_counts[i] || table.cols() != action_counts[j] {
                    return Err(Error::Shape(format!(
                        "table ({i}, {j}) is {}x{}, expected {}x{}",
                        table.rows(),
                        table.cols(),
                        action_counts[i],
                        action_counts[j]
                    )));
                }
                if let Some(idx) = table.values().iter().position(|v| !v.is_finite()) {
                    let mut joint = vec![0; n];
                    joint[i] = idx / table.cols();
                    joint[j] = idx % table.cols();
                    return Err(Error::NonFinite {
                        player: i,
                        joint,
                        value: table.values()[idx],
                    });
                }
                adjacency[i].push(Neighbor { player: j, table });
            }
        }
        if let Some(&(i, j)) = tables.keys().next() {
            return Err(Error::Shape(format!("table ({i}, {j}) has no matching edge")));
        }
        for list in &mut adjacency {
            list.sort_by_key(|nb| nb.player);
        }
        Ok(Self {
            action_counts,
            adjacency,
        })
    }

    pub fn neighbors(&self, player: usize) -> &[Neighbor] {
        &self.adjacency[player]
    }

    pub fn degree(&self, player: usize) -> usize {
        self.adjacency[player].len()
    }

    /// Unordered edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| {
                list.iter()
                    .filter(move |nb| nb.player > i)
                    .map(move |nb| (i, nb.player))
            })
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Materializes the dense game with `g_i(x) = sum_j f_ij(x_i, x_j)`.
    pub fn to_normal_form(&self) -> Result<NormalFormGame> {
        let size = joint_space_size(&self.action_counts);
        if size > MAX_JOINT_ACTIONS {
            return Err(Error::TooLarge {
                size,
                limit: MAX_JOINT_ACTIONS,
            });
        }
        let n = self.player_count();
        let mut payoffs = vec![Vec::with_capacity(size as usize); n];
        let mut joint = vec![0; n];
        loop {
            for (i, table) in payoffs.iter_mut().enumerate() {
                table.push(self.pure_payoff(i, &joint));
            }
            if !next_joint(&mut joint, &self.action_counts) {
                break;
            }
        }
        NormalFormGame::new(self.action_counts.clone(), payoffs)
    }
}

impl PayoffModel for GraphicalGame {
    fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    fn pure_payoff(&self, player: usize, joint: &[usize]) -> f64 {
        self.adjacency[player]
            .iter()
            .map(|nb| nb.table.get(joint[player], joint[nb.player]))
            .sum()
    }

    fn pure_action_payoffs(&self, player: usize, joint: &[usize]) -> Vec<f64> {
        let mut values = vec![0.0; self.action_counts[player]];
        for nb in &self.adjacency[player] {
            let other = joint[nb.player];
            for (a, v) in values.iter_mut().enumerate() {
                *v += nb.table.get(a, other);
            }
        }
        values
    }

    fn raw_action_values(&self, profile: &StrategyProfile, player: usize) -> Vec<f64> {
        let mut values = vec![0.0; self.action_counts[player]];
        for nb in &self.adjacency[player] {
            let q = profile.player(nb.player);
            for (a, v) in values.iter_mut().enumerate() {
                *v += nb.table.row(a).iter().zip(q).map(|(f, p)| f * p).sum::<f64>();
            }
        }
        values
    }
}

/// `E_{x ~ profile}[g_i(x)]` on raw payoffs.
pub fn per_player_expected_payoff<G: PayoffModel + ?Sized>(
    game: &G,
    profile: &StrategyProfile,
    player: usize,
) -> Result<f64> {
    check_player(player, game.player_count())?;
    profile.check_shape(game.action_counts())?;
    Ok(expected_payoff_unchecked(game, profile, player))
}

pub(crate) fn expected_payoff_unchecked<G: PayoffModel + ?Sized>(
    game: &G,
    profile: &StrategyProfile,
    player: usize,
) -> f64 {
    game.raw_action_values(profile, player)
        .iter()
        .zip(profile.player(player))
        .map(|(v, p)| v * p)
        .sum()
}

/// Per-player expected raw payoffs.
pub fn expected_payoffs<G: PayoffModel + ?Sized>(
    game: &G,
    profile: &StrategyProfile,
) -> Result<Vec<f64>> {
    profile.check_shape(game.action_counts())?;
    Ok((0..game.player_count())
        .map(|i| expected_payoff_unchecked(game, profile, i))
        .collect())
}

/// Sum over players of the expected raw payoff.
pub fn overall_payoff<G: PayoffModel + ?Sized>(game: &G, profile: &StrategyProfile) -> Result<f64> {
    Ok(expected_payoffs(game, profile)?.iter().sum())
}
