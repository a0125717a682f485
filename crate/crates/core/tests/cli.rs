//! End-to-end runs of the `hetfair` binary.

use std::path::Path;
use std::process::{Command, Output};

fn hetfair(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hetfair"));
    cmd.args(args);
    // Keep the caller's environment from leaking into the precedence checks.
    for (k, _) in std::env::vars_os() {
        if k.to_string_lossy().starts_with("HETFAIR_") {
            cmd.env_remove(k);
        }
    }
    cmd
}

fn run(args: &[&str]) -> Output {
    hetfair(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_is_deterministic() {
    let args = [
        "solve",
        "--scheme",
        "fafp",
        "--users",
        "2",
        "--channels",
        "2",
        "--bs",
        "2",
        "--seed",
        "7",
    ];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(field(&stdout(&a), "scheme"), "FAFP");
}

#[test]
fn solve_reports_a_feasible_full_scale_solution() {
    let o = run(&[
        "solve",
        "--scheme",
        "oaop",
        "--users",
        "30",
        "--channels",
        "20",
        "--bs",
        "5",
        "--noise",
        "0.1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(field(&text, "feasible"), "true");
    for key in ["min_rate", "sum_throughput", "pr"] {
        assert!(field(&text, key).parse::<f64>().unwrap() > 0.0);
    }
    field(&text, "iterations").parse::<usize>().unwrap();
    assert!(field(&text, "budget_residuals").starts_with('['));
    field(&text, "interference_residual").parse::<f64>().unwrap();
}

#[test]
fn solve_without_users_is_a_usage_error() {
    let o = run(&["solve", "--scheme", "oaop"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--users"));
    assert!(stderr(&o).contains("--help"));
}

#[test]
fn bad_flags_and_values_exit_2() {
    for args in [
        vec!["solve", "--users", "2", "--scheme", "bogus"],
        vec!["solve", "--users", "two"],
        vec!["solve", "--users", "2", "--noise", "-1"],
        vec!["solve", "--users", "2", "--step", "0"],
        vec!["solve", "--users", "99", "--channels", "2", "--bs", "2"],
        vec!["frobnicate"],
        vec!["sweep", "--out", "x.csv"],
        vec!["--threads", "0", "solve", "--users", "2"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn solve_writes_solution_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let (out, trace) = (dir.path().join("sol.csv"), dir.path().join("trace.csv"));
    let o = run(&[
        "solve",
        "--users",
        "4",
        "--channels",
        "4",
        "--bs",
        "3",
        "--max-iters",
        "50",
        "--out",
        path_str(&out),
        "--trace",
        path_str(&trace),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let sol = std::fs::read_to_string(&out).unwrap();
    assert_eq!(sol.lines().next(), Some("user,channel,bs,power,rate"));
    assert_eq!(sol.lines().count(), 5);
    let tr = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(
        tr.lines().count(),
        1 + field(&stdout(&o), "iterations").parse::<usize>().unwrap()
    );
}

/// Flag > environment > config file > built-in default, one setting at a
/// time.
#[test]
fn settings_precedence_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("net.toml");
    std::fs::write(
        &cfg,
        "users = 3\nchannels = 3\nbs = 2\npico_power = 0.5\nith = 25\nseed = 11\nscheme = \"faop\"\n",
    )
    .unwrap();
    let network = |o: &Output| field(&stdout(o), "network").to_string();

    let defaults = run(&["solve", "--users", "3", "--scheme", "fafp"]);
    assert!(network(&defaults).contains("channels=20 bs=5 macro_power=20 pico_power=1 ith=30 noise=0.1 seed=0"));

    let file = run(&["solve", "--config", path_str(&cfg)]);
    assert_eq!(file.status.code(), Some(0), "{}", stderr(&file));
    assert_eq!(field(&stdout(&file), "scheme"), "FAOP");
    assert!(network(&file).contains("users=3 channels=3 bs=2 macro_power=20 pico_power=0.5 ith=25 noise=0.1 seed=11"));

    let env = hetfair(&["solve", "--config", path_str(&cfg)])
        .env("HETFAIR_PICO_POWER", "0.75")
        .env("HETFAIR_SCHEME", "fafp")
        .output()
        .unwrap();
    assert_eq!(field(&stdout(&env), "scheme"), "FAFP");
    assert!(network(&env).contains("pico_power=0.75 ith=25"));

    let flag = hetfair(&[
        "solve",
        "--config",
        path_str(&cfg),
        "--pico-power",
        "2",
        "--ith",
        "40",
        "--scheme",
        "oaop",
    ])
    .env("HETFAIR_PICO_POWER", "0.75")
    .output()
    .unwrap();
    assert_eq!(field(&stdout(&flag), "scheme"), "OAOP");
    assert!(network(&flag).contains("pico_power=2 ith=40 noise=0.1 seed=11"));

    let env_users = hetfair(&["solve", "--scheme", "fafp"])
        .env("HETFAIR_USERS", "5")
        .output()
        .unwrap();
    assert!(network(&env_users).contains("users=5 "));
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "users = 3\nwarp_factor = 9\n").unwrap();
    assert_eq!(run(&["solve", "--config", path_str(&cfg)]).status.code(), Some(2));
    let missing = dir.path().join("missing.toml");
    assert_eq!(run(&["solve", "--config", path_str(&missing)]).status.code(), Some(2));
}

#[test]
fn preset_sweep_writes_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, svg) = (dir.path().join("pr.csv"), dir.path().join("pr.svg"));
    let o = run(&[
        "sweep",
        "--preset",
        "fig2",
        "--trials",
        "10",
        "--max-iters",
        "100",
        "--out",
        path_str(&csv),
        "--plot",
        path_str(&svg),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 1 + 5 * 10 * 3);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    assert!(dir.path().join("pr.summary.csv").exists());
}

#[test]
fn explicit_sweep_matches_its_preset() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let common = ["--trials", "3", "--seed", "5", "--max-iters", "100"];
    let mut preset = vec!["sweep", "--preset", "fig3", "--out", path_str(&a)];
    preset.extend(common);
    let mut explicit = vec![
        "sweep",
        "--param",
        "ith",
        "--values",
        "20,25,30,35,40",
        "--out",
        path_str(&b),
    ];
    explicit.extend(common);
    assert_eq!(run(&preset).status.code(), Some(0));
    assert_eq!(run(&explicit).status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args = |p: &Path, threads: &'static str| {
        run(&[
            "--threads",
            threads,
            "sweep",
            "--preset",
            "fig4",
            "--trials",
            "2",
            "--max-iters",
            "80",
            "--out",
            path_str(p),
        ])
    };
    assert_eq!(args(&a, "1").status.code(), Some(0));
    assert_eq!(args(&b, "3").status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn sweep_rejects_bad_specs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = path_str(&out);
    for args in [
        vec!["sweep", "--preset", "fig9", "--out", out],
        vec!["sweep", "--param", "ith", "--values", "30,20", "--out", out],
        vec!["sweep", "--param", "bandwidth", "--values", "1,2", "--out", out],
        vec!["sweep", "--preset", "fig2", "--trials", "0", "--out", out],
        vec![
            "sweep", "--preset", "fig2", "--param", "ith", "--values", "1", "--out", out,
        ],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn validate_refuses_oversize_instances() {
    let o = run(&["validate", "--users", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("too large"));
    assert_eq!(run(&["validate", "--grid", "128"]).status.code(), Some(2));
}

#[test]
fn validate_report_lists_every_instance() {
    let o = run(&["validate", "--instances", "1", "--seed", "3", "--report"]);
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().contains("gap"));
    assert_eq!(field(&text, "instances"), "1");
    assert!(o.status.code() == Some(0) || o.status.code() == Some(1));
}

#[test]
fn validate_exit_code_follows_the_worst_gap() {
    let o = run(&["validate", "--instances", "50", "--threshold", "0.05", "--seed", "1"]);
    let text = stdout(&o);
    let worst: f64 = field(&text, "worst_gap").parse().unwrap();
    let within: usize = field(&text, "within_threshold").parse().unwrap();
    assert!(within >= 45, "{within}/50 within 5%");
    assert_eq!(o.status.code(), Some(if worst <= 0.05 { 0 } else { 1 }));
    // A loose enough threshold always passes.
    assert_eq!(
        run(&["validate", "--instances", "50", "--threshold", "1", "--seed", "1"])
            .status
            .code(),
        Some(0)
    );
}
