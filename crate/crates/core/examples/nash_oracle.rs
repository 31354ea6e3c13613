//! Best-response dynamics, exhaustive pure-Nash search and support enumeration.
//!
//! Run with `cargo run --example nash_oracle`.

use coopeq::catalog::{self, COOPERATE, DEFECT};
use coopeq::{
    best_response_dynamics, enumerate_pure_nash, support_enumeration_mixed_nash,
    verify_epsilon_nash, StrategyProfile,
};

fn main() -> coopeq::Result<()> {
    let pd = catalog::prisoners_dilemma();
    let outcome = best_response_dynamics(&pd, &[COOPERATE, COOPERATE], 100)?;
    println!(
        "PD from (C, C): {:?} at {:?} after {} moves",
        outcome.kind, outcome.joint_action, outcome.steps
    );
    println!("PD pure equilibria: {:?}", enumerate_pure_nash(&pd)?);
    let dd = StrategyProfile::point_mass(&[2, 2], &[DEFECT, DEFECT])?;
    println!("(D, D) is an exact Nash equilibrium: {}", verify_epsilon_nash(&pd, &dd, 0.0)?);

    let uniform = StrategyProfile::uniform(&[2, 2]);
    for eps in [0.4, 0.5] {
        println!(
            "uniform PD profile is a {eps}-Nash equilibrium: {}",
            verify_epsilon_nash(&pd, &uniform, eps)?
        );
    }

    let pennies = catalog::matching_pennies();
    let outcome = best_response_dynamics(&pennies, &[0, 0], 100)?;
    println!(
        "\nmatching pennies: best response {:?} with period {:?}",
        outcome.kind, outcome.cycle_length
    );
    for p in support_enumeration_mixed_nash(&pennies)? {
        println!("  mixed equilibrium {:?}", p.distributions());
    }

    let five = catalog::five_by_five();
    println!(
        "\n5x5 game: {} pure, {} total equilibria",
        enumerate_pure_nash(&five)?.len(),
        support_enumeration_mixed_nash(&five)?.len()
    );
    Ok(())
}
