use std::path::Path;
use std::process::{Command, Output};

use ofdm_energy::scenario::{default_paper_scenario, save_scenario};
use ofdm_energy::wsre::solve_wsremin_tdma;
use ofdm_energy::{energy_report, scenario::generate_channels};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ofdm-energy"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn wsre_on_default_scenario_has_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("wsre.json");
    let o = run(&["solve", "--solver", "wsre", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&out);
    assert_eq!(v["validation"]["feasible"], true);
    assert_eq!(v["validation"]["violations"].as_array().unwrap().len(), 0);
    assert!(v["certificates"][0]["beta"].is_number());
    assert_eq!(v["allocation"]["rho"].as_array().unwrap().len(), 4);
}

#[test]
fn every_solver_writes_a_feasible_schedule_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let scen = dir.path().join("s.toml");
    save_scenario(&default_paper_scenario(), &scen).unwrap();
    for solver in ["temin", "wstremin"] {
        let out = dir.path().join(format!("{solver}.json"));
        let o = run(&[
            "solve",
            "--scenario",
            scen.to_str().unwrap(),
            "--solver",
            solver,
            "--seed",
            "3",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let v = json(&out);
        assert_eq!(v["validation"]["feasible"], true);
        assert_eq!(v["seed"], 3);
        assert!(v["report"]["bs_energy_j"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn unknown_solver_is_a_usage_error() {
    let o = run(&["solve", "--solver", "simplex"]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.contains("simplex") && e.contains("Usage:"), "{e}");
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["solve", "--help"]).status.code(), Some(0));
}

#[test]
fn frame_limit_below_feasibility_exits_with_two() {
    for solver in ["wsre", "temin", "wstremin"] {
        let o = run(&["solve", "--solver", solver, "--tmax", "1e-4"]);
        assert_eq!(o.status.code(), Some(2), "{solver}: {}", stderr(&o));
        assert!(stderr(&o).contains("infeasible"), "{}", stderr(&o));
    }
    // The diagnostic is the shortest feasible frame, which itself works.
    let o = run(&["solve", "--solver", "temin", "--tmax", "1e-3"]);
    let e = stderr(&o);
    let diag: f64 = e
        .rsplit("diagnostic value ")
        .next()
        .unwrap()
        .trim()
        .trim_end_matches(')')
        .parse()
        .unwrap();
    let ok = run(&["solve", "--solver", "temin", "--tmax", &format!("{}", diag * 1.001)]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
}

#[test]
fn bad_scenario_file_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let scen = dir.path().join("bad.toml");
    std::fs::write(&scen, "schema_version = 1\nseed = 'x'\n").unwrap();
    let o = run(&["solve", "--solver", "wsre", "--scenario", scen.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.toml"));
}

fn strip_runtime(csv: &str) -> String {
    csv.lines()
        .map(|l| l.rsplit_once(',').unwrap().0.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

struct Rec {
    seed: String,
    j: usize,
    mode: String,
    alpha0: f64,
    e_r: f64,
    ee_bs: f64,
    se: f64,
}

fn records(text: &str) -> Vec<Rec> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    rd.records()
        .map(|r| {
            let r = r.unwrap();
            let f = |i: usize| r[i].parse::<f64>().unwrap();
            Rec {
                seed: r[0].to_string(),
                j: r[1].parse().unwrap(),
                mode: r[2].to_string(),
                alpha0: f(3),
                e_r: f(5),
                ee_bs: f(6),
                se: f(8),
            }
        })
        .collect()
}

#[test]
fn tradeoff_csv_is_reproducible_and_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &Path, workers: &str| {
        run(&[
            "tradeoff",
            "--alpha0",
            "0,0.001,0.01,0.1,1,10",
            "--J",
            "1,2,4",
            "--seeds",
            "2",
            "--workers",
            workers,
            "--out",
            p.to_str().unwrap(),
        ])
    };
    let o = args(&a, "2");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(args(&b, "1").status.code(), Some(0));
    let ta = std::fs::read_to_string(&a).unwrap();
    let tb = std::fs::read_to_string(&b).unwrap();
    assert_eq!(strip_runtime(&ta), strip_runtime(&tb));
    assert!(ta.starts_with(
        "seed,J,mode,alpha0,E_t_J,E_r_weighted_J,ee_bs_bits_per_J,ee_mt_bits_per_J,se_bits_per_s_per_Hz,T_s,runtime_ms\n"
    ));
    // Twelve significant digits everywhere.
    assert!(ta.lines().nth(1).unwrap().split(',').nth(4).unwrap().contains('e'));

    let meta = std::fs::read_to_string(dir.path().join("a.csv.meta.toml")).unwrap();
    let meta: toml::Value = toml::from_str(&meta).unwrap();
    assert_eq!(meta["scenario"]["subcarriers"].as_integer(), Some(16));
    assert_eq!(meta["sweep"]["seeds"].as_array().unwrap().len(), 2);
    assert!(meta["version"].is_str());

    let rows = records(&ta);
    assert_eq!(rows.len(), 2 * 3 * 6);
    for w in rows.windows(2) {
        let (x, y) = (&w[0], &w[1]);
        if x.seed == y.seed && x.j == y.j && x.mode == y.mode {
            assert!(y.alpha0 > x.alpha0);
            assert!(y.ee_bs >= x.ee_bs * (1.0 - 1e-6), "ee_bs fell: {} -> {}", x.ee_bs, y.ee_bs);
            assert!(y.se <= x.se * (1.0 + 1e-6));
        }
    }

    // alpha0 = 0 with every terminal alone is the receiver-energy D-TDMA point.
    let spec = default_paper_scenario();
    let cfg = spec.config::<f64>().unwrap();
    let chan = generate_channels(&spec, 1, &cfg).unwrap();
    let demand = spec.demand().unwrap();
    let (_, alloc) = solve_wsremin_tdma(&cfg, &chan, &demand).unwrap();
    let point_a = energy_report(&cfg, &demand, &alloc).unwrap();
    let row = rows.iter().find(|r| r.seed == "1" && r.j == 4 && r.alpha0 == 0.0).unwrap();
    assert!((row.e_r - point_a.mt_energy_weighted).abs() < 1e-9 * row.e_r);
    let min_e_r = rows
        .iter()
        .filter(|r| r.seed == "1")
        .map(|r| r.e_r)
        .fold(f64::INFINITY, f64::min);
    assert!(row.e_r <= min_e_r * (1.0 + 1e-9));
}

#[test]
fn exhaustive_refused_for_large_k() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = default_paper_scenario();
    for d in [450.0, 550.0, 650.0] {
        spec.distances_m.push(d);
        spec.demand_bits.push(5000.0);
        spec.alphas.push(1.0);
    }
    let scen = dir.path().join("k7.toml");
    save_scenario(&spec, &scen).unwrap();
    let out = dir.path().join("x.csv");
    let o = run(&[
        "tradeoff",
        "--scenario",
        scen.to_str().unwrap(),
        "--mode",
        "exhaustive",
        "--J",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("refused"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn accept_runs_selected_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("acc.json");
    let o = run(&["accept", "--only", "c1,c3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().filter(|l| l.contains(" PASS ")).count(), 2, "{text}");
    let v = json(&out);
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["id"], "c1");
    assert_eq!(run(&["accept", "--only", "c99"]).status.code(), Some(1));
}
