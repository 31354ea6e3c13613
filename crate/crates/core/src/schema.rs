//! JSON interchange format for games.
//!
//! Normal form:
//! `{"players": n, "actions": [k_0, ...], "payoffs": [[...], ...]}` with one
//! row-major table per player (player 0 is the slowest-varying axis).
//!
//! Graphical:
//! `{"players": n, "actions": [...], "edges": [[i, j], ...], "tables": {"i-j": [[...]], "j-i": [[...]]}}`
//! where `"i-j"` holds `f_ij` with rows indexed by player `i`'s action.
//!
//! An optional `"sense": "minimize"` marks the tables as objectives (costs) rather than payoffs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GraphicalGame, NormalFormGame, PairTable, PayoffModel};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    #[default]
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "is_maximize")]
    pub sense: Sense,
    pub players: usize,
    pub actions: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_names: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoffs: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tables: Option<BTreeMap<String, Vec<Vec<f64>>>>,
}

fn is_maximize(s: &Sense) -> bool {
    *s == Sense::Maximize
}

/// A parsed game of either representation.
#[derive(Clone, Debug)]
pub enum AnyGame {
    Normal(NormalFormGame),
    Graphical(GraphicalGame),
}

impl AnyGame {
    pub fn action_counts(&self) -> &[usize] {
        match self {
            AnyGame::Normal(g) => g.action_counts(),
            AnyGame::Graphical(g) => g.action_counts(),
        }
    }

    /// The dense form; graphical games are materialized.
    pub fn into_normal_form(self) -> Result<NormalFormGame> {
        match self {
            AnyGame::Normal(g) => Ok(g),
            AnyGame::Graphical(g) => g.to_normal_form(),
        }
    }
}

fn parse_table_key(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Shape(format!("table key '{key}' is not of the form 'i-j'"));
    let (a, b) = key.split_once('-').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

impl GameDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("game documents always serialize")
    }

    /// Builds the game with tables taken verbatim, ignoring `sense`.
    pub fn build_verbatim(&self) -> Result<AnyGame> {
        if self.players != self.actions.len() {
            return Err(Error::Shape(format!(
                "\"players\" is {} but \"actions\" has {} entries",
                self.players,
                self.actions.len()
            )));
        }
        match (&self.payoffs, &self.edges) {
            (Some(payoffs), None) => Ok(AnyGame::Normal(NormalFormGame::new(
                self.actions.clone(),
                payoffs.clone(),
            )?)),
            (None, Some(edges)) => {
                let mut tables = BTreeMap::new();
                for (key, rows) in self.tables.iter().flatten() {
                    tables.insert(parse_table_key(key)?, PairTable::from_rows(rows)?);
                }
                let edges: Vec<(usize, usize)> = edges.iter().map(|e| (e[0], e[1])).collect();
                Ok(AnyGame::Graphical(GraphicalGame::new(
                    self.actions.clone(),
                    &edges,
                    tables,
                )?))
            }
            (Some(_), Some(_)) => Err(Error::Shape(
                "document has both \"payoffs\" and \"edges\"".into(),
            )),
            (None, None) => Err(Error::Shape(
                "document needs \"payoffs\" (normal form) or \"edges\" (graphical)".into(),
            )),
        }
    }

    /// Builds the game on the payoff (maximization) scale.
    pub fn build_payoff_game(&self) -> Result<AnyGame> {
        let game = self.build_verbatim()?;
        match self.sense {
            Sense::Maximize => Ok(game),
            Sense::Minimize => negate(game),
        }
    }

    /// Builds the game on the objective (minimization) scale.
    pub fn build_objective_game(&self) -> Result<AnyGame> {
        let game = self.build_verbatim()?;
        match self.sense {
            Sense::Minimize => Ok(game),
            Sense::Maximize => negate(game),
        }
    }

    pub fn from_normal_form(game: &NormalFormGame) -> Self {
        Self {
            name: None,
            sense: Sense::Maximize,
            players: game.player_count(),
            actions: game.action_counts().to_vec(),
            action_names: None,
            payoffs: Some(game.tables().to_vec()),
            edges: None,
            tables: None,
        }
    }

    pub fn from_graphical(game: &GraphicalGame) -> Self {
        let edges = game.edges();
        let mut tables = BTreeMap::new();
        for i in 0..game.player_count() {
            for nb in game.neighbors(i) {
                tables.insert(format!("{i}-{}", nb.player), nb.table.to_rows());
            }
        }
        Self {
            name: None,
            sense: Sense::Maximize,
            players: game.player_count(),
            actions: game.action_counts().to_vec(),
            action_names: None,
            payoffs: None,
            edges: Some(edges.iter().map(|&(i, j)| [i, j]).collect()),
            tables: Some(tables),
        }
    }
}

fn negate(game: AnyGame) -> Result<AnyGame> {
    Ok(match game {
        AnyGame::Normal(g) => AnyGame::Normal(g.map_payoffs(|v| -v)?),
        AnyGame::Graphical(g) => {
            let mut tables = BTreeMap::new();
            for i in 0..g.player_count() {
                for nb in g.neighbors(i) {
                    let data = nb.table.values().iter().map(|v| -v).collect();
                    tables.insert(
                        (i, nb.player),
                        PairTable::new(nb.table.rows(), nb.table.cols(), data)?,
                    );
                }
            }
            AnyGame::Graphical(GraphicalGame::new(
                g.action_counts().to_vec(),
                &g.edges(),
                tables,
            )?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_error_carries_line_number() {
        let text = "{\n  \"players\": 2,\n  \"actions\": [2, 2],\n  \"payoffs\": [1, ]\n}";
        match GameDocument::from_json(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn graphical_round_trip() {
        let text = r#"{"players": 3, "actions": [2, 2, 1],
            "edges": [[0, 1], [2, 1]],
            "tables": {"0-1": [[1, 2], [3, 4]], "1-0": [[0, 0], [1, 1]],
                       "1-2": [[5], [6]], "2-1": [[7, 8]]}}"#;
        let doc = GameDocument::from_json(text).unwrap();
        let AnyGame::Graphical(g) = doc.build_payoff_game().unwrap() else {
            panic!("expected graphical game");
        };
        assert_eq!(g.pure_payoff(1, &[1, 0, 0]), 0.0 + 5.0);
        let again = GameDocument::from_graphical(&g);
        let AnyGame::Graphical(h) = again.build_payoff_game().unwrap() else {
            panic!("expected graphical game");
        };
        assert_eq!(g, h);
    }

    #[test]
    fn minimize_sense_negates_for_payoffs() {
        let text = r#"{"sense": "minimize", "players": 1, "actions": [2], "payoffs": [[0, 1]]}"#;
        let doc = GameDocument::from_json(text).unwrap();
        let AnyGame::Normal(g) = doc.build_payoff_game().unwrap() else { panic!() };
        assert_eq!(g.table(0), &[0.0, -1.0]);
        let AnyGame::Normal(e) = doc.build_objective_game().unwrap() else { panic!() };
        assert_eq!(e.table(0), &[0.0, 1.0]);
    }

    #[test]
    fn rejects_inconsistent_documents() {
        let doc = GameDocument::from_json(r#"{"players": 2, "actions": [2], "payoffs": [[0, 0]]}"#).unwrap();
        assert!(doc.build_payoff_game().is_err());
        let doc = GameDocument::from_json(r#"{"players": 1, "actions": [2]}"#).unwrap();
        assert!(doc.build_payoff_game().is_err());
        let doc = GameDocument::from_json(
            r#"{"players": 2, "actions": [1, 1], "edges": [[0, 1]], "tables": {"0_1": [[1]], "1-0": [[1]]}}"#,
        )
        .unwrap();
        assert!(doc.build_payoff_game().is_err());
    }
}
