//! Imaginary-time evolution of a separable two-player cost to its ground state.
//!
//! Run with `cargo run --example quantum_ground_state`.

use coopeq::catalog;
use coopeq::quantum::{evolve_with_trajectory, trajectory_csv};
use coopeq::{eigen_residual, effective_field, imaginary_time_step, QuantumConfig, WavefunctionState};

fn main() -> coopeq::Result<()> {
    let objective = catalog::separable_objective();
    let start = WavefunctionState::uniform(&[2, 2]);
    println!("field of player 0 at the uniform state: {:?}", effective_field(&objective, &start, 0)?);

    let config = QuantumConfig::with_hbar(1.0);
    let next = imaginary_time_step(&objective, &start, &config)?;
    println!("after one step: psi_0 = {:?}", next.player(0));

    let (report, log) = evolve_with_trajectory(&objective, &start, &config, 200)?;
    println!(
        "\nconverged={} after {} steps (t = {:.2})",
        report.converged,
        report.steps,
        report.state.time()
    );
    for (i, probs) in report.state.probabilities().iter().enumerate() {
        println!(
            "  player {i}: |psi|^2 = {:?}, lambda = {:.2e}, residual = {:.2e}",
            probs, report.lambda[i], report.residual[i]
        );
    }

    // a single player with a degenerate field is stationary from the start
    let flat = coopeq::NormalFormGame::new(vec![3], vec![vec![0.7; 3]])?;
    let state = WavefunctionState::uniform(&[3]);
    let fields = vec![effective_field(&flat, &state, 0)?];
    println!("\nflat field residual: {:?}", eigen_residual(&state, &fields));

    print!("\ntrajectory sample:\n{}", trajectory_csv(&log[..log.len().min(8)]));
    Ok(())
}
