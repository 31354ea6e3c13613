//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use coopeq::catalog::{self, COOPERATE};
use coopeq::experiment::{run_experiment, summarize, ExperimentKind, ExperimentSpec, GameSource, SOCIETY_MAX_ITERATIONS};
use coopeq::quantum::{effective_fields, rayleigh_values};
use coopeq::{
    best_response_dynamics, epsilon_gap, evolve_to_stationary, expected_action_values,
    find_equilibrium, generate_society, imaginary_time_step, local_action_values,
    per_player_expected_payoff, society_equilibrium_sample, soft_response_step,
    support_enumeration_mixed_nash, transform_utilities, verify_epsilon_nash, AlphaLevel,
    DynamicsConfig, NormalFormGame, OutcomeKind, PayoffModel, QuantumConfig, SocietyRun, SocietySpec,
    StrategyProfile, UtilityTransform, WavefunctionState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn report(n: usize, name: &str, elapsed: Duration, v: &Verdict) -> bool {
    println!(
        "criterion {n} [{}] {name}: {} ({:.2?})",
        if v.pass { "PASS" } else { "FAIL" },
        v.detail,
        elapsed
    );
    v.pass
}

fn pd_alpha_one() -> Verdict {
    let game = catalog::prisoners_dilemma();
    let view = transform_utilities(&game, UtilityTransform::Identity).unwrap();
    let r = find_equilibrium(&view, &DynamicsConfig::with_alpha(1.0), &StrategyProfile::uniform(&[2, 2])).unwrap();
    let p = r.profile.player(0)[COOPERATE];
    let payoff = r.per_player_payoff[0];
    let improvement = 100.0 * (payoff / 2.0 - 1.0);
    Verdict {
        pass: r.converged
            && (p - 0.390388).abs() <= 1e-4
            && (payoff - 2.3905).abs() <= 1e-3
            && (improvement - 20.0).abs() <= 1.0,
        detail: format!("p(C) = {p:.6}, payoff {payoff:.5}, improvement {improvement:.2}% vs stated 20%"),
    }
}

fn pd_endpoints() -> Verdict {
    let game = catalog::prisoners_dilemma();
    let view = transform_utilities(&game, UtilityTransform::Identity).unwrap();
    let run = |a: f64| find_equilibrium(&view, &DynamicsConfig::with_alpha(a), &StrategyProfile::uniform(&[2, 2])).unwrap();
    let zero = run(0.0);
    let hundred = run(100.0);
    Verdict {
        pass: zero.per_player_payoff == vec![2.5, 2.5]
            && hundred.per_player_payoff.iter().all(|v| (v - 2.0).abs() <= 0.01),
        detail: format!(
            "alpha=0 payoffs {:?}, alpha=100 payoffs ({:.6}, {:.6})",
            zero.per_player_payoff, hundred.per_player_payoff[0], hundred.per_player_payoff[1]
        ),
    }
}

fn five_by_five() -> Verdict {
    let game = catalog::five_by_five();
    let equilibria = support_enumeration_mixed_nash(&game).unwrap();
    if equilibria.len() != 1 {
        return Verdict { pass: false, detail: format!("{} equilibria found, expected 1", equilibria.len()) };
    }
    let baseline: Vec<f64> = (0..2).map(|i| per_player_expected_payoff(&game, &equilibria[0], i).unwrap()).collect();
    let transform = UtilityTransform::unit_min_shift(&game);
    let view = transform_utilities(&game, transform).unwrap();
    let config = DynamicsConfig { transform, ..DynamicsConfig::with_alpha(7.0) };
    let r = find_equilibrium(&view, &config, &StrategyProfile::uniform(&[5, 5])).unwrap();
    let gains: Vec<f64> = (0..2).map(|i| 100.0 * (r.per_player_payoff[i] / baseline[i] - 1.0)).collect();
    let matches_paper = (gains[0] - 19.0).abs() <= 10.0 && (gains[1] - 8.4).abs() <= 10.0;
    Verdict {
        pass: r.converged && gains.iter().all(|&g| g > 0.0),
        detail: format!(
            "1 equilibrium, Nash payoffs ({:.4}, {:.4}); {transform} alpha=7 payoffs ({:.4}, {:.4}), improvements {:+.1}% / {:+.1}% (paper 19% / 8.4%, within 10 pp: {matches_paper})",
            baseline[0], baseline[1], r.per_player_payoff[0], r.per_player_payoff[1], gains[0], gains[1]
        ),
    }
}

struct SeedResult {
    soft: Vec<f64>,
    nash: Vec<f64>,
    soft_converged: usize,
    nash_converged: usize,
}

fn society_runs() -> Vec<SeedResult> {
    let soft = SocietyRun::Soft(DynamicsConfig {
        transform: UtilityTransform::Exponential { hbar: 1.0 },
        max_iterations: SOCIETY_MAX_ITERATIONS,
        ..DynamicsConfig::with_alpha(30.0)
    });
    let best_response = SocietyRun::BestResponse { max_steps: 100_000 };
    (0..20u64)
        .map(|seed| {
            let society = generate_society(&SocietySpec::new(101, 10, 10.0, seed)).unwrap();
            let a = society_equilibrium_sample(&society, &soft, 50, seed).unwrap();
            let b = society_equilibrium_sample(&society, &best_response, 50, seed).unwrap();
            SeedResult {
                soft: a.iter().map(|r| r.overall).collect(),
                nash: b.iter().map(|r| r.overall).collect(),
                soft_converged: a.iter().filter(|r| r.converged).count(),
                nash_converged: b.iter().filter(|r| r.converged).count(),
            }
        })
        .collect()
}

fn society_direction(results: &[SeedResult]) -> Verdict {
    let mut mean_wins = 0;
    let mut variance_wins = 0;
    let mut both = 0;
    for r in results {
        let a = summarize(&r.soft).unwrap();
        let b = summarize(&r.nash).unwrap();
        mean_wins += (a.mean > b.mean) as usize;
        variance_wins += (a.variance < b.variance) as usize;
        both += (a.mean > b.mean && a.variance < b.variance) as usize;
    }
    let soft_conv: usize = results.iter().map(|r| r.soft_converged).sum();
    let nash_conv: usize = results.iter().map(|r| r.nash_converged).sum();
    Verdict {
        pass: both >= 18,
        detail: format!(
            "mean higher in {mean_wins}/20 seeds, variance lower in {variance_wins}/20, both in {both}/20 (need 18); converged runs: alpha=30 {soft_conv}/1000, alpha=inf {nash_conv}/1000"
        ),
    }
}

fn society_separation(results: &[SeedResult]) -> Verdict {
    let mut strict = 0;
    let mut separated = 0;
    for r in results {
        let a = summarize(&r.soft).unwrap();
        let b = summarize(&r.nash).unwrap();
        strict += (a.min > b.max) as usize;
        separated += (a.mean - b.mean > ((a.variance + b.variance) / 2.0).sqrt()) as usize;
    }
    Verdict {
        pass: separated >= 10,
        detail: format!("worst alpha=30 beats best alpha=inf in {strict}/20 seeds (reported); mean gap exceeds pooled SD in {separated}/20 (need 10)"),
    }
}

fn quantum_dual() -> Verdict {
    let objective = catalog::separable_objective();
    let config = QuantumConfig { dt: 0.01, ..QuantumConfig::with_hbar(1.0) };
    let r = evolve_to_stationary(&objective, &WavefunctionState::uniform(&[2, 2]), &config).unwrap();
    let probs = r.state.probabilities();
    let mass = [probs[0][0], probs[1][0]];
    Verdict {
        pass: r.converged
            && mass.iter().all(|&m| m >= 0.999)
            && r.lambda.iter().all(|l| l.abs() <= 1e-6)
            && r.residual.iter().all(|&x| x <= 1e-8),
        detail: format!(
            "converged={} in {} steps, mass on minimizers {:?}, lambda {:?}, residual {:?}",
            r.converged, r.steps, mass, r.lambda, r.residual
        ),
    }
}

fn random_game(rng: &mut ChaCha8Rng, counts: &[usize], low: f64, high: f64) -> NormalFormGame {
    let joints: usize = counts.iter().product();
    let tables = (0..counts.len()).map(|_| (0..joints).map(|_| rng.gen_range(low..high)).collect()).collect();
    NormalFormGame::new(counts.to_vec(), tables).unwrap()
}

fn property_suites() -> Verdict {
    let mut failures: Vec<&str> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(31337);
    let mut check = |name: &'static str, ok: bool| {
        if !ok && !failures.contains(&name) {
            failures.push(name);
        }
    };
    for _ in 0..100 {
        let counts: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..=3)).collect();
        let game = random_game(&mut rng, &counts, 0.1, 10.0);
        let view = transform_utilities(&game, UtilityTransform::Identity).unwrap();
        let mut p = StrategyProfile::random_interior(&counts, &mut rng);
        let alpha = rng.gen_range(0.0..100.0);
        for _ in 0..10 {
            p = soft_response_step(&view, &p, &DynamicsConfig::with_alpha(alpha)).unwrap();
            check("normalization", p.distributions().iter().all(|d| {
                d.iter().all(|&x| x >= 0.0) && (d.iter().sum::<f64>() - 1.0).abs() <= 1e-12
            }));
        }
        let zero = soft_response_step(&view, &p, &DynamicsConfig::with_alpha(0.0)).unwrap();
        check("alpha=0 uniformity", zero == StrategyProfile::uniform(&counts));

        let c = rng.gen_range(0.01..100.0);
        let scaled = game.map_payoffs(|v| v * c).unwrap();
        let scaled_view = transform_utilities(&scaled, UtilityTransform::Identity).unwrap();
        let a = soft_response_step(&view, &p, &DynamicsConfig::with_alpha(alpha)).unwrap();
        let b = soft_response_step(&scaled_view, &p, &DynamicsConfig::with_alpha(alpha)).unwrap();
        check("scale covariance", a.linf_distance(&b) <= 1e-10);

        let raw = random_game(&mut rng, &counts, -5.0, 5.0);
        let start: Vec<usize> = counts.iter().map(|&k| rng.gen_range(0..k)).collect();
        let outcome = best_response_dynamics(&raw, &start, 10_000).unwrap();
        if outcome.kind == OutcomeKind::Equilibrium {
            let pure = StrategyProfile::point_mass(&counts, &outcome.joint_action).unwrap();
            check("best-response equilibria exact", verify_epsilon_nash(&raw, &pure, 0.0).unwrap());
        }

        let shape = [rng.gen_range(1..=4), rng.gen_range(1..=4)];
        let bimatrix = random_game(&mut rng, &shape, -5.0, 5.0);
        for eq in support_enumeration_mixed_nash(&bimatrix).unwrap() {
            check("support enumeration verified", verify_epsilon_nash(&bimatrix, &eq, 1e-7).unwrap());
        }

        let objective = random_game(&mut rng, &counts, -4.0, 4.0);
        let amplitudes = counts.iter().map(|&k| (0..k).map(|_| rng.gen_range(0.01..1.0)).collect()).collect();
        let state = WavefunctionState::normalized(amplitudes).unwrap();
        let fields = effective_fields(&objective, &state).unwrap();
        let max_field = fields.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        let config = QuantumConfig { dt: (0.1 / max_field.max(1e-12)).min(0.5), ..QuantumConfig::with_hbar(1.0) };
        let next = imaginary_time_step(&objective, &state, &config).unwrap();
        let before = rayleigh_values(&state, &fields);
        let after = rayleigh_values(&next, &fields);
        check("energy descent", before.iter().zip(&after).all(|(b, a)| *a <= b + 1e-12));
    }

    for seed in 0..50u64 {
        let population = rng.gen_range(1..=6);
        let actions = rng.gen_range(1..=3);
        let neighbors = if population > 1 { rng.gen_range(0.0..(population - 1) as f64) } else { 0.0 };
        let society = generate_society(&SocietySpec::new(population, actions, neighbors, seed)).unwrap();
        let dense = society.to_normal_form().unwrap();
        let transform = UtilityTransform::Exponential { hbar: 1.0 };
        let view = transform_utilities(&dense, transform).unwrap();
        let p = StrategyProfile::random_interior(society.action_counts(), &mut rng);
        for i in 0..population {
            let fast = local_action_values(&society, &p, i, transform).unwrap();
            let slow = expected_action_values(&view, &p, i).unwrap();
            check("factorization", fast.iter().zip(&slow).all(|(a, b)| (a - b).abs() <= 1e-9 * b.abs()));
        }
    }

    let pd = catalog::prisoners_dilemma();
    let view = transform_utilities(&pd, UtilityTransform::Identity).unwrap();
    let mut previous = f64::INFINITY;
    for alpha in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
        let r = find_equilibrium(&view, &DynamicsConfig::with_alpha(alpha), &StrategyProfile::uniform(&[2, 2])).unwrap();
        let eps = epsilon_gap(&view, &r.profile).unwrap();
        check("PD epsilon trend", r.converged && eps <= previous);
        previous = eps;
    }

    let dir = tempfile::tempdir().unwrap();
    let mut spec = ExperimentSpec::new(ExperimentKind::Society);
    spec.society = Some(SocietySpec::new(30, 4, 4.0, 8));
    spec.alpha = vec![AlphaLevel::Finite(30.0), AlphaLevel::Infinite];
    spec.restarts = 4;
    spec.seed = 8;
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        spec.out = dir.path().join(name);
        run_experiment(&spec).unwrap();
        outputs.push(
            ["results.csv", "summary.json"]
                .map(|f| std::fs::read(spec.out.join(f)).unwrap()),
        );
    }
    check("rerun determinism", outputs[0] == outputs[1]);
    let mut sweep = ExperimentSpec::new(ExperimentKind::Sweep);
    sweep.game = Some(GameSource::Builtin("five_by_five".into()));
    sweep.restarts = 2;
    sweep.seed = 3;
    let mut csvs = Vec::new();
    for name in ["c", "d"] {
        sweep.out = dir.path().join(name);
        run_experiment(&sweep).unwrap();
        csvs.push(std::fs::read(sweep.out.join("results.csv")).unwrap());
    }
    check("rerun determinism", csvs[0] == csvs[1]);

    Verdict {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            "normalization, alpha=0 uniformity, scale covariance, factorization (50 seeds), best-response and support-enumeration verification, PD epsilon trend, energy descent, rerun determinism".into()
        } else {
            format!("violated: {}", failures.join(", "))
        },
    }
}

/// Optional paper-scale society (1001 individuals, 50 neighbours), one seed.
fn full_scale() {
    let start = Instant::now();
    let society = generate_society(&SocietySpec::new(1001, 10, 50.0, 7)).unwrap();
    let soft = SocietyRun::Soft(DynamicsConfig {
        transform: UtilityTransform::Exponential { hbar: 1.0 },
        max_iterations: SOCIETY_MAX_ITERATIONS,
        ..DynamicsConfig::with_alpha(30.0)
    });
    let a = society_equilibrium_sample(&society, &soft, 50, 7).unwrap();
    let b = society_equilibrium_sample(&society, &SocietyRun::BestResponse { max_steps: 1_000_000 }, 50, 7).unwrap();
    let sa = summarize(&a.iter().map(|r| r.overall).collect::<Vec<_>>()).unwrap();
    let sb = summarize(&b.iter().map(|r| r.overall).collect::<Vec<_>>()).unwrap();
    println!(
        "full scale: alpha=30 mean {:.2} variance {:.2}; alpha=inf mean {:.2} variance {:.2} ({:.1?})",
        sa.mean, sa.variance, sb.mean, sb.variance, start.elapsed()
    );
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn main() {
    let mut all = true;
    let limit = |v: Verdict, t: Duration, max: Duration| Verdict {
        pass: v.pass && t < max,
        detail: if t < max { v.detail } else { format!("{}; runtime over {max:?}", v.detail) },
    };

    let (v, t) = timed(pd_alpha_one);
    all &= report(1, "prisoner's dilemma at alpha=1", t, &limit(v, t, Duration::from_secs(1)));
    let (v, t) = timed(pd_endpoints);
    all &= report(2, "prisoner's dilemma endpoints", t, &limit(v, t, Duration::from_secs(1)));
    let (v, t) = timed(five_by_five);
    all &= report(3, "5x5 game", t, &limit(v, t, Duration::from_secs(10)));

    let (results, t) = timed(society_runs);
    let v = society_direction(&results);
    all &= report(4, "society alpha=30 versus best response", t, &limit(v, t, Duration::from_secs(300)));
    let v = society_separation(&results);
    all &= report(5, "society stability-quality", t, &v);

    let (v, t) = timed(quantum_dual);
    all &= report(6, "imaginary-time ground state", t, &limit(v, t, Duration::from_secs(1)));
    let (v, t) = timed(property_suites);
    all &= report(7, "property suites", t, &v);

    let seven = generate_society(&SocietySpec::new(101, 10, 10.0, 7)).unwrap();
    let sample = society_equilibrium_sample(&seven, &SocietyRun::BestResponse { max_steps: 100_000 }, 50, 7).unwrap();
    let mut distinct: Vec<Vec<usize>> = sample
        .iter()
        .filter(|r| r.converged)
        .filter_map(|r| r.profile.as_pure())
        .collect();
    distinct.sort();
    distinct.dedup();
    println!("info: society seed 7, 50 best-response restarts: {} distinct pure equilibria", distinct.len());

    if std::env::var_os("COOPEQ_FULL_SCALE").is_some() {
        full_scale();
    }

    if !all {
        std::process::exit(1);
    }
}
