use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_inventory-sim"))
        .args(args)
        .env_remove("INVENTORY_SEED")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Vec<u8> {
    let out = cli(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).unwrap()
}

fn products() -> String {
    fixture("products.toml").display().to_string()
}

#[test]
fn estimate_reports_full_year_statistics() {
    let v = json(&ok(&["estimate", fixture("history.csv").to_str().unwrap()]));
    let pr2 = &v.as_array().unwrap()[1];
    assert_eq!(pr2["id"], "Pr2");
    assert!((pr2["demand_probability"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((pr2["mean_daily"].as_f64().unwrap() - 648.55).abs() < 0.01 * 648.55);
}

#[test]
fn estimate_glimpse_probability() {
    let v = json(&ok(&["estimate", fixture("table1.csv").to_str().unwrap()]));
    let pr4 = &v.as_array().unwrap()[3];
    assert!((pr4["demand_probability"].as_f64().unwrap() - 0.30).abs() < 1e-12);
}

#[test]
fn estimate_rejects_bad_data_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let out = cli(&["estimate", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no observations"));

    let negative = dir.path().join("neg.csv");
    fs::write(&negative, "day,A\n1,3\n2,-1\n").unwrap();
    let out = cli(&["estimate", negative.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains('3'), "row number in message");
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    assert_eq!(cli(&["simulate", "--config", &products(), "--policy", "bogus"]).status.code(), Some(1));
    assert_eq!(cli(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
}

#[test]
fn simulate_is_byte_identical_for_a_seed() {
    let args = ["simulate", "--config", &products(), "--replications", "1", "--seed", "7"];
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn seed_falls_back_to_environment() {
    let run = |env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_inventory-sim"));
        c.args(["simulate", "--config", &products(), "--replications", "3"]);
        match env {
            Some(s) => c.env("INVENTORY_SEED", s),
            None => c.env_remove("INVENTORY_SEED"),
        };
        c.output().unwrap().stdout
    };
    let from_env = json(&run(Some("77")));
    assert_eq!(from_env["seed"], 77);
    let explicit = ok(&["simulate", "--config", &products(), "--replications", "3", "--seed", "77"]);
    assert_eq!(run(Some("77")), explicit);
}

#[test]
fn simulate_writes_traces() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "simulate", "--config", &products(), "--replications", "2",
        "--trace-dir", dir.path().to_str().unwrap(),
    ]);
    let trace = fs::read_to_string(dir.path().join("Pr1_trace.csv")).unwrap();
    assert!(trace.starts_with("day,demand,sold,lost,end_inventory,order_placed,arrival\n"));
    assert_eq!(trace.lines().count(), 366);
}

#[test]
fn explicit_stats_match_history_path() {
    let dir = tempfile::tempdir().unwrap();
    let stats = json(&ok(&["estimate", fixture("history.csv").to_str().unwrap()]));
    let base = fs::read_to_string(fixture("products.toml")).unwrap();

    // Same products, statistics taken from the history file.
    let mut from_history = String::from("history = \"history.csv\"\n");
    let mut explicit = String::new();
    let mut in_stats = false;
    let mut idx = 0;
    for line in base.lines() {
        if line.starts_with("[product.stats]") {
            in_stats = true;
            let s = &stats[idx];
            explicit.push_str(&format!(
                "[product.stats]\nmean_daily = {:?}\nstd_daily = {:?}\ndemand_probability = {:?}\n",
                s["mean_daily"].as_f64().unwrap(),
                s["std_daily"].as_f64().unwrap(),
                s["demand_probability"].as_f64().unwrap(),
            ));
            idx += 1;
            continue;
        }
        if in_stats && (line.is_empty() || line.starts_with("[[")) {
            in_stats = false;
        }
        if !in_stats {
            from_history.push_str(line);
            from_history.push('\n');
            explicit.push_str(line);
            explicit.push('\n');
        }
    }
    fs::copy(fixture("history.csv"), dir.path().join("history.csv")).unwrap();
    let a = dir.path().join("a.toml");
    let b = dir.path().join("b.toml");
    fs::write(&a, from_history).unwrap();
    fs::write(&b, explicit).unwrap();
    let run = |p: &Path| ok(&["simulate", "--config", p.to_str().unwrap(), "--replications", "20"]);
    assert_eq!(run(&a), run(&b));
}

#[test]
fn outputs_do_not_depend_on_workers() {
    let dir = tempfile::tempdir().unwrap();
    let p = products();
    let base = ["optimize", "--config", &p, "--product", "Pr1", "--replications", "20", "--step", "200", "--seed", "5"];
    let mut one = base.to_vec();
    one.extend(["--workers", "1"]);
    let mut four = base.to_vec();
    four.extend(["--workers", "4"]);
    assert_eq!(ok(&one), ok(&four));

    let d1 = dir.path().join("w1");
    let d4 = dir.path().join("w4");
    for (d, w) in [(&d1, "1"), (&d4, "4")] {
        ok(&[
            "diagnose", "--config", &p, "--product", "Pr2", "--replications", "150",
            "--workers", w, "--output-dir", d.to_str().unwrap(),
        ]);
    }
    for name in ["Pr2_running_mean.csv", "Pr2_batch_means.csv", "Pr2_standard_error.csv", "Pr2_autocorrelation.csv", "convergence.json"] {
        assert_eq!(fs::read(d1.join(name)).unwrap(), fs::read(d4.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn diagnose_series_lengths_and_minimum() {
    let dir = tempfile::tempdir().unwrap();
    let p = products();
    ok(&["diagnose", "--config", &p, "--product", "Pr3", "--replications", "1000", "--output-dir", dir.path().to_str().unwrap()]);
    let rows = |name: &str| fs::read_to_string(dir.path().join(name)).unwrap().lines().count() - 1;
    assert_eq!(rows("Pr3_running_mean.csv"), 1000);
    assert_eq!(rows("Pr3_standard_error.csv"), 1000);
    assert_eq!(rows("Pr3_batch_means.csv"), 20);
    assert_eq!(rows("Pr3_autocorrelation.csv"), 50);

    let out = cli(&["diagnose", "--config", &p, "--replications", "50", "--output-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn surface_shape_and_cross_check() {
    let p = products();
    let csv = String::from_utf8(ok(&[
        "surface", "--config", &p, "--product", "Pr1", "--bounds", "900:1100,3000:3200",
        "--step", "100", "--replications", "30", "--seed", "4",
    ]))
    .unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "r,q,mean_profit,std_profit");
    assert_eq!(lines.len(), 10);

    // The (1000, 3100) cell equals a single-point optimize run at the same seed.
    let cell: Vec<&str> = lines.iter().find(|l| l.starts_with("1000,3100,")).unwrap().split(',').collect();
    let single = json(&ok(&[
        "optimize", "--config", &p, "--product", "Pr1", "--bounds", "1000:1000,3100:3100",
        "--replications", "30", "--seed", "4",
    ]));
    let best = &single["products"][0];
    assert_eq!(best["best_point"]["r"], 1000);
    assert_eq!(cell[2].parse::<f64>().unwrap(), best["mean_profit"].as_f64().unwrap());
}

#[test]
fn optimize_rejects_inverted_bounds() {
    let out = cli(&["optimize", "--config", &products(), "--bounds", "900:100,10:20"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bayes_cli_is_repeatable_and_writes_history() {
    let dir = tempfile::tempdir().unwrap();
    let p = products();
    let run = |sub: &str| {
        let d = dir.path().join(sub);
        let out = ok(&[
            "optimize", "--config", &p, "--product", "Pr4", "--method", "bayes", "--budget", "30",
            "--seed", "11", "--replications", "20", "--history-dir", d.to_str().unwrap(),
        ]);
        (out, fs::read(d.join("Pr4_history.csv")).unwrap())
    };
    let (a, ha) = run("a");
    let (b, hb) = run("b");
    assert_eq!(a, b);
    assert_eq!(ha, hb);
    assert_eq!(String::from_utf8(ha).unwrap().lines().count(), 31);
}

#[test]
fn quadratic_objective_mode_finds_the_peak() {
    let v = json(&ok(&[
        "optimize", "--config", &products(), "--product", "Pr1", "--objective", "quadratic",
        "--bounds", "0:100,0:100", "--step", "1",
    ]));
    assert_eq!(v["products"][0]["best_point"]["r"], 30);
    assert_eq!(v["products"][0]["best_point"]["q"], 70);
}

#[test]
fn conditional_sampling_runs() {
    let v = json(&ok(&["simulate", "--config", &products(), "--replications", "10", "--sampling", "conditional", "--policy", "periodic"]));
    assert_eq!(v["sampling"], "conditional");
    assert!(v["total_expected_profit"].as_f64().unwrap().is_finite());
}

#[test]
fn fixture_command_is_deterministic() {
    let a = ok(&["fixture", "--config", &products(), "--seed", "3"]);
    let b = ok(&["fixture", "--config", &products(), "--seed", "3"]);
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 366);
}
