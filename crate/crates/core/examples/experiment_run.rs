//! Runs experiments through the same entry point as the command-line tool and
//! lists the files they produce.
//!
//! Run with `cargo run --example experiment_run -- [output directory]`.

use std::path::PathBuf;

use coopeq::dynamics::AlphaLevel;
use coopeq::experiment::{read_spec, run_experiment, ExperimentKind, ExperimentSpec, GameSource};

fn main() -> coopeq::Result<()> {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("coopeq-example"));

    let mut sweep = ExperimentSpec::new(ExperimentKind::Sweep);
    sweep.game = Some(GameSource::from_arg("pd")?);
    sweep.alpha = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 100.0]
        .into_iter()
        .map(AlphaLevel::Finite)
        .chain([AlphaLevel::Infinite])
        .collect();
    sweep.restarts = 2;
    sweep.seed = 11;
    sweep.out = root.join("pd-sweep");
    let outcome = run_experiment(&sweep)?;
    for f in &outcome.files {
        println!("{}", f.display());
    }
    print!("{}", std::fs::read_to_string(root.join("pd-sweep/results.csv"))?);

    let mut rerun = read_spec(root.join("pd-sweep/manifest.json"))?;
    rerun.out = root.join("pd-sweep-rerun");
    run_experiment(&rerun)?;
    let same = std::fs::read(root.join("pd-sweep/results.csv"))?
        == std::fs::read(root.join("pd-sweep-rerun/results.csv"))?;
    println!("manifest rerun identical: {same}");

    let mut quantum = ExperimentSpec::new(ExperimentKind::Quantum);
    quantum.game = Some(GameSource::from_arg("separable_objective")?);
    quantum.out = root.join("quantum");
    run_experiment(&quantum)?;
    print!("{}", std::fs::read_to_string(root.join("quantum/summary.json"))?);
    println!();
    Ok(())
}
