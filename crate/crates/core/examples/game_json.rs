//! Reading and writing games in the JSON interchange format.
//!
//! Run with `cargo run --example game_json`.

use coopeq::schema::{AnyGame, GameDocument};
use coopeq::{overall_payoff, PayoffModel, StrategyProfile};

const TRIANGLE: &str = r#"{
  "name": "triangle",
  "players": 3,
  "actions": [2, 2, 2],
  "edges": [[0, 1], [1, 2], [0, 2]],
  "tables": {
    "0-1": [[1, 0], [0, 1]], "1-0": [[1, 0], [0, 1]],
    "1-2": [[0, 2], [2, 0]], "2-1": [[0, 1], [1, 0]],
    "0-2": [[0.5, 0], [0, 0.5]], "2-0": [[1, -1], [-1, 1]]
  }
}"#;

fn main() -> coopeq::Result<()> {
    let doc = GameDocument::from_json(TRIANGLE)?;
    let AnyGame::Graphical(game) = doc.build_payoff_game()? else {
        unreachable!("document has edges")
    };
    println!("{} players, {} edges", game.player_count(), game.edge_count());
    println!("payoffs at (0, 1, 0): {:?}", (0..3).map(|i| game.pure_payoff(i, &[0, 1, 0])).collect::<Vec<_>>());

    let uniform = StrategyProfile::uniform(game.action_counts());
    println!("overall payoff at uniform: {}", overall_payoff(&game, &uniform)?);

    let dense = game.to_normal_form()?;
    println!("dense form has {} joint actions", dense.joint_count());
    println!("{}", GameDocument::from_normal_form(&dense).to_json());

    match GameDocument::from_json("{\n  \"players\": 2,\n  \"actions\": [2 2]\n}") {
        Err(e) => println!("malformed input: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
