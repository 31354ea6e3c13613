//! Random pairwise societies: soft equilibria at alpha = 30 against best response.
//!
//! Run with `cargo run --release --example society -- [population] [restarts] [seed]`.

use std::time::Instant;

use coopeq::experiment::summarize;
use coopeq::society::{degree_histogram_csv, mean_degree};
use coopeq::{
    generate_society, society_equilibrium_sample, DynamicsConfig, OutcomeKind, SocietyRun,
    SocietySpec, UtilityTransform,
};

fn main() -> coopeq::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let population = *args.first().unwrap_or(&101) as usize;
    let restarts = *args.get(1).unwrap_or(&20) as usize;
    let seed = *args.get(2).unwrap_or(&7);

    let society = generate_society(&SocietySpec::new(population, 10, 10.0, seed))?;
    println!(
        "{population} individuals, {} edges, mean degree {:.2}",
        society.edge_count(),
        mean_degree(&society)
    );
    print!("{}", degree_histogram_csv(&society).lines().take(4).collect::<Vec<_>>().join("\n"));
    println!("\n...");

    let soft = SocietyRun::Soft(DynamicsConfig {
        transform: UtilityTransform::Exponential { hbar: 1.0 },
        max_iterations: 300,
        ..DynamicsConfig::with_alpha(30.0)
    });
    let best_response = SocietyRun::BestResponse { max_steps: 100_000 };
    for (label, run) in [("alpha=30", &soft), ("alpha=inf", &best_response)] {
        let clock = Instant::now();
        let reports = society_equilibrium_sample(&society, run, restarts, seed)?;
        let overall: Vec<f64> = reports.iter().map(|r| r.overall).collect();
        let s = summarize(&overall)?;
        println!(
            "{label:>9}: mean {:.2}, variance {:.2}, min {:.2}, max {:.2}; {} of {} converged [{:.1?}]",
            s.mean,
            s.variance,
            s.min,
            s.max,
            reports.iter().filter(|r| r.converged).count(),
            reports.len(),
            clock.elapsed()
        );
    }

    let start = vec![0; population];
    let outcome = coopeq::best_response_dynamics(&society, &start, 100_000)?;
    if outcome.kind != OutcomeKind::Equilibrium {
        println!("best response from all-zeros: {:?} after {} sweeps", outcome.kind, outcome.sweeps);
    }
    Ok(())
}
