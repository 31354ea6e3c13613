//! Soft-response equilibria of the prisoner's dilemma across selfishness levels.
//!
//! Run with `cargo run --example prisoners_dilemma`.

use coopeq::catalog::{self, COOPERATE};
use coopeq::{
    find_equilibrium, soft_response_step, sweep_alpha, transform_utilities, verify_epsilon_nash,
    DynamicsConfig, StrategyProfile, UtilityTransform,
};

fn main() -> coopeq::Result<()> {
    let game = catalog::prisoners_dilemma();
    let view = transform_utilities(&game, UtilityTransform::Identity)?;
    let uniform = StrategyProfile::uniform(&[2, 2]);

    let config = DynamicsConfig::with_alpha(1.0);
    let step = soft_response_step(&view, &uniform, &config)?;
    println!("one step from uniform at alpha=1: p(C) = {:.4}", step.player(0)[COOPERATE]);

    let report = find_equilibrium(&view, &config, &uniform)?;
    let p = report.profile.player(0)[COOPERATE];
    println!(
        "fixed point at alpha=1: p(C) = {p:.6} (closed form {:.6}), payoff {:.4} per player after {} iterations",
        (17f64.sqrt() - 1.0) / 8.0,
        report.per_player_payoff[0],
        report.iterations
    );
    println!(
        "improvement over the Nash payoff 2: {:.1}%",
        100.0 * (report.per_player_payoff[0] / 2.0 - 1.0)
    );
    println!(
        "epsilon gap {:.4}; is a 0.40-Nash equilibrium: {}",
        report.epsilon_gap,
        verify_epsilon_nash(&game, &report.profile, 0.40)?
    );

    let grid = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 100.0];
    let table = sweep_alpha(&game, &DynamicsConfig::default(), &grid, 3, 2024)?;
    println!("\nalpha  p(C)     payoff");
    for row in table.rows.iter().filter(|r| r.restart == 0) {
        println!(
            "{:>5}  {:.5}  {:.5}",
            row.alpha.to_string(),
            row.report.profile.player(0)[COOPERATE],
            row.report.per_player_payoff[0]
        );
    }
    Ok(())
}
