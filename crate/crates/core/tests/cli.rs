use std::path::Path;
use std::process::{Command, Output};

use coopeq::experiment::{read_spec, run_experiment, ExperimentKind, ExperimentSpec, GameSource};
use coopeq::society::SocietySpec;
use coopeq::AlphaLevel;
use sha2::{Digest, Sha256};

fn coopeq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coopeq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{}: {e}", dir.join(name).display()))
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn bundled_games_are_unchanged() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    for (file, digest) in [
        ("prisoners_dilemma.json", "ab17da78e05080f8a4ef1211b21bda55fd248ce06954333addf6d31095a75c3e"),
        ("five_by_five.json", "f4582b2fec2d6b42ada949744f06f8c10216b369fb7a1bd060c7f5e63c8180a6"),
        ("separable_objective.json", "a3db3b6febe34c9ed333f005ce1143eacdc98342d10771311b04b534005e289c"),
    ] {
        assert_eq!(sha256_hex(&std::fs::read(data.join(file)).unwrap()), digest, "{file}");
    }
}

#[test]
fn pd_sweep_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let result = coopeq(&[
        "sweep", "--game", "pd", "--alpha", "0,0.5,1,2,4,8,16,32,100", "--restarts", "1",
        "--seed", "5", "--transform", "identity", "--out", out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let csv = read(&out, "results.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "alpha,restart,converged,iterations,epsilon,overall,payoff_0,payoff_1");
    assert_eq!(lines.len(), 10);
    let payoff = |line: &str| line.split(',').nth(6).unwrap().parse::<f64>().unwrap();
    let at_one = lines.iter().find(|l| l.starts_with("1,")).unwrap();
    assert!((payoff(at_one) - 2.3905).abs() < 1e-3);
    assert!((payoff(lines[9]) - 2.0).abs() < 0.01);
    let svg = read(&out, "plot.svg");
    assert!(svg.starts_with("<svg") && svg.contains("player 1"));
    let summary: serde_json::Value = serde_json::from_str(&read(&out, "summary.json")).unwrap();
    for key in ["count", "mean", "variance", "min", "max"] {
        assert!(summary["series"][0].get(key).is_some(), "{key}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let result = coopeq(&[
            "society", "--population", "25", "--actions", "3", "--neighbors", "4",
            "--alpha", "30,inf", "--restarts", "4", "--seed", "17", "--out", out.to_str().unwrap(),
        ]);
        assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    }
    for name in ["results.csv", "summary.json", "plot.svg", "degree_histogram.csv"] {
        assert_eq!(read(&a, name), read(&b, name), "{name}");
    }
    let sweep = |out: &Path| {
        coopeq(&["sweep", "--game", "five_by_five", "--alpha", "1,7", "--restarts", "3", "--seed", "9",
                 "--transform", "shift:auto", "--out", out.to_str().unwrap()])
    };
    assert!(sweep(&dir.path().join("c")).status.success());
    assert!(sweep(&dir.path().join("d")).status.success());
    assert_eq!(read(&dir.path().join("c"), "results.csv"), read(&dir.path().join("d"), "results.csv"));
}

#[test]
fn manifest_alone_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = ExperimentSpec::new(ExperimentKind::Sweep);
    spec.game = Some(GameSource::Path(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/five_by_five.json")));
    spec.alpha = vec![AlphaLevel::Finite(2.0), AlphaLevel::Finite(7.0), AlphaLevel::Infinite];
    spec.restarts = 2;
    spec.seed = 123;
    spec.out = dir.path().join("first");
    let first = run_experiment(&spec).unwrap();

    let mut again = read_spec(dir.path().join("first/manifest.json")).unwrap();
    assert_eq!(again, first.manifest.spec);
    assert!(matches!(again.game, Some(GameSource::Inline(_))));
    again.out = dir.path().join("second");
    run_experiment(&again).unwrap();
    for name in ["results.csv", "summary.json", "plot.svg"] {
        assert_eq!(read(&dir.path().join("first"), name), read(&dir.path().join("second"), name), "{name}");
    }

    let via_binary = dir.path().join("third");
    let result = coopeq(&[
        "run", dir.path().join("first/manifest.json").to_str().unwrap(),
        "--out", via_binary.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    assert_eq!(read(&dir.path().join("first"), "results.csv"), read(&via_binary, "results.csv"));
    let csv = read(&via_binary, "results.csv");
    assert_eq!(csv.lines().filter(|l| l.starts_with("inf,")).count(), 1);
}

#[test]
fn invalid_spec_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"kind\": \"sweep\",\n  \"game\": {\"builtin\": \"pd\"},\n  \"alpha\": [1, \"x\"]\n}\n").unwrap();
    let result = coopeq(&["run", path.to_str().unwrap()]);
    assert!(!result.status.success());
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("line 4"), "{stderr}");
}

#[test]
fn nash_and_quantum_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let nash = dir.path().join("nash");
    assert!(coopeq(&["nash", "--game", "five_by_five", "--out", nash.to_str().unwrap()]).status.success());
    let csv = read(&nash, "results.csv");
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("inf,0,true"));

    let q = dir.path().join("q");
    let result = coopeq(&["quantum", "--game", "separable_objective", "--out", q.to_str().unwrap()]);
    assert!(result.status.success());
    let summary: serde_json::Value = serde_json::from_str(&read(&q, "summary.json")).unwrap();
    assert_eq!(summary["converged"], true);
    for lambda in summary["lambda"].as_array().unwrap() {
        assert!(lambda.as_f64().unwrap().abs() < 1e-6);
    }
    assert!(read(&q, "trajectory.csv").starts_with("time,player,lambda,residual,entropy\n"));

    let solve = dir.path().join("solve");
    let result = coopeq(&["solve", "--game", "pd", "--alpha", "1", "--out", solve.to_str().unwrap()]);
    assert!(result.status.success());
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.contains("\"mean\""));
}

#[test]
fn society_spec_files_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = ExperimentSpec::new(ExperimentKind::Society);
    spec.society = Some(SocietySpec::new(12, 3, 3.0, 4));
    spec.restarts = 3;
    spec.out = dir.path().join("soc");
    let path = dir.path().join("spec.json");
    std::fs::write(&path, spec.to_json()).unwrap();
    let result = coopeq(&["run", path.to_str().unwrap()]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let summary: serde_json::Value = serde_json::from_str(&read(&dir.path().join("soc"), "summary.json")).unwrap();
    let series = summary["series"].as_array().unwrap();
    assert_eq!(series.len(), 2);
    assert_eq!(series[1]["alpha"], "inf");
}
