//! The 5x5 bimatrix game: its unique mixed Nash equilibrium versus the soft
//! equilibrium at alpha = 7 under a shift that makes the smallest payoff 1.
//!
//! Run with `cargo run --release --example five_by_five`.

use coopeq::catalog;
use coopeq::{
    find_equilibrium, per_player_expected_payoff, support_enumeration_mixed_nash,
    transform_utilities, DynamicsConfig, StrategyProfile, UtilityTransform,
};

fn show(p: &[f64]) -> String {
    p.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ")
}

fn main() -> coopeq::Result<()> {
    let game = catalog::five_by_five();
    let equilibria = support_enumeration_mixed_nash(&game)?;
    println!("Nash equilibria found: {}", equilibria.len());
    let nash = &equilibria[0];
    let baseline = [
        per_player_expected_payoff(&game, nash, 0)?,
        per_player_expected_payoff(&game, nash, 1)?,
    ];
    println!("  row    {}", show(nash.player(0)));
    println!("  column {}", show(nash.player(1)));
    println!("  payoffs ({:.4}, {:.4})", baseline[0], baseline[1]);

    let transform = UtilityTransform::unit_min_shift(&game);
    let view = transform_utilities(&game, transform)?;
    let config = DynamicsConfig {
        transform,
        ..DynamicsConfig::with_alpha(7.0)
    };
    let report = find_equilibrium(&view, &config, &StrategyProfile::uniform(&[5, 5]))?;
    println!(
        "\nalpha=7, transform {transform}: converged={} after {} iterations (damping {})",
        report.converged, report.iterations, report.damping
    );
    println!("  row    {}", show(report.profile.player(0)));
    println!("  column {}", show(report.profile.player(1)));
    for (i, who) in ["row", "column"].iter().enumerate() {
        let v = report.per_player_payoff[i];
        println!(
            "  {who}: {v:.4} vs Nash {:.4} ({:+.1}%)",
            baseline[i],
            100.0 * (v / baseline[i] - 1.0)
        );
    }
    Ok(())
}
