//! Bundled example games.

use crate::game::NormalFormGame;
use crate::schema::{AnyGame, GameDocument};

pub const PRISONERS_DILEMMA_JSON: &str = include_str!("../data/prisoners_dilemma.json");
pub const FIVE_BY_FIVE_JSON: &str = include_str!("../data/five_by_five.json");
pub const SEPARABLE_OBJECTIVE_JSON: &str = include_str!("../data/separable_objective.json");

pub const COOPERATE: usize = 0;
pub const DEFECT: usize = 1;

fn load(text: &str, objective: bool) -> NormalFormGame {
    let doc = GameDocument::from_json(text).expect("bundled game parses");
    let game = if objective {
        doc.build_objective_game()
    } else {
        doc.build_payoff_game()
    };
    match game.expect("bundled game is valid") {
        AnyGame::Normal(g) => g,
        AnyGame::Graphical(_) => unreachable!("bundled games are normal form"),
    }
}

/// Cooperate = 0, Defect = 1; (C,C) = 3,3, (C,D) = 1,4, (D,C) = 4,1, (D,D) = 2,2.
pub fn prisoners_dilemma() -> NormalFormGame {
    load(PRISONERS_DILEMMA_JSON, false)
}

/// 5x5 bimatrix game with a single, mixed, Nash equilibrium.
pub fn five_by_five() -> NormalFormGame {
    load(FIVE_BY_FIVE_JSON, false)
}

/// Shared cost `E(x) = E_1(x_1) + E_2(x_2)` with `E_1 = (0, 1)` and `E_2 = (0, 2)`.
pub fn separable_objective() -> NormalFormGame {
    load(SEPARABLE_OBJECTIVE_JSON, true)
}

/// Both players get `+1` on a match for the row player, `-1` otherwise; zero-sum.
pub fn matching_pennies() -> NormalFormGame {
    NormalFormGame::bimatrix(
        &[vec![1.0, -1.0], vec![-1.0, 1.0]],
        &[vec![-1.0, 1.0], vec![1.0, -1.0]],
    )
    .expect("static game is valid")
}
