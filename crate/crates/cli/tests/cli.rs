use std::path::PathBuf;
use std::process::{Command, Output};

use quadphase_cli::runner::{run, RunFlags};
use quadphase_cli::scenario;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quadphase"))
}

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run_cli(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_temp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("quadphase-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn fountain_csv_is_deterministic_and_exact() {
    let path = scenario_path("fountain.toml");
    let args = ["run", "--scenario", path.to_str().unwrap(), "--scan"];
    let a = run_cli(&args);
    let b = run_cli(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("scan_value,probability,visibility,total_phase_rad"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 64);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    let phase0 = rows[0][3];
    assert!((phase0 - 1.61e7 * 9.81 * 0.01).abs() < 1e-12 * phase0);
    // Every field carries 17 significant digits.
    let field = text.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    assert_eq!(field.split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
}

#[test]
fn json_mirrors_csv() {
    let path = scenario_path("drop_tower.toml");
    let p = path.to_str().unwrap();
    let csv = String::from_utf8(run_cli(&["run", "--scenario", p, "--scan"]).stdout).unwrap();
    let json: serde_json::Value =
        serde_json::from_slice(&run_cli(&["run", "--scenario", p, "--scan", "--format", "json"]).stdout).unwrap();
    let points = json["scan"].as_array().unwrap();
    for (row, point) in csv.lines().skip(1).zip(points) {
        let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v[0], point["scan_value"].as_f64().unwrap());
        assert_eq!(v[1], point["probability"].as_f64().unwrap());
        assert_eq!(v[2], point["visibility"].as_f64().unwrap());
        assert_eq!(v[3], point["total_phase_rad"].as_f64().unwrap());
    }
    let d = &json["decomposition"];
    let sum = d["phi_i"].as_f64().unwrap() + d["bch"].as_f64().unwrap() + d["mean_term"].as_f64().unwrap();
    let total = json["result"]["total_phase_rad"].as_f64().unwrap();
    assert!((sum - total).abs() <= 1e-12 * total.abs());
}

#[test]
fn out_file_matches_stdout() {
    let path = scenario_path("orbiting_satellite.toml");
    let p = path.to_str().unwrap();
    let out = std::env::temp_dir().join(format!("quadphase-out-{}.csv", std::process::id()));
    let r = run_cli(&["run", "--scenario", p, "--out", out.to_str().unwrap()]);
    assert!(r.status.success());
    assert!(r.stdout.is_empty());
    let stdout = run_cli(&["run", "--scenario", p]).stdout;
    assert_eq!(std::fs::read(&out).unwrap(), stdout);
    std::fs::remove_file(out).ok();
}

#[test]
fn config_errors_exit_2_with_field_path() {
    let good = std::fs::read_to_string(scenario_path("fountain.toml")).unwrap();
    let cases = [
        ("bad_type.toml", good.replace("T = 0.1", "T = \"short\""), "pulses.T"),
        ("bad_value.toml", good.replace("T = 0.1", "T = -0.1"), "pulses.T"),
        ("unknown.toml", good.replace("[state]", "[state]\nspin = 1"), "state"),
        ("bad_steps.toml", good.replace("steps = 64", "steps = 0"), "scan.steps"),
    ];
    for (name, text, field) in cases {
        let p = write_temp(name, &text);
        let r = run_cli(&["run", "--scenario", p.to_str().unwrap(), "--scan"]);
        assert_eq!(r.status.code(), Some(2), "{name}");
        let err = String::from_utf8_lossy(&r.stderr);
        assert!(err.contains(field), "{name}: {err}");
    }
    let p = scenario_path("fountain.toml");
    let r = run_cli(&["run", "--scenario", p.to_str().unwrap(), "--method", "perturbative:7"]);
    assert_eq!(r.status.code(), Some(2));
    let r = run_cli(&["run", "--scenario", "/nonexistent/scenario.toml"]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_3_with_stage() {
    let good = std::fs::read_to_string(scenario_path("drop_tower.toml")).unwrap();
    let text = good.replace(
        "gamma = [[1.54e-6, 0.0, 0.0], [0.0, 1.54e-6, 0.0], [0.0, 0.0, -3.08e-6]]",
        "gamma = [[1e6, 0.0, 0.0], [0.0, 1e6, 0.0], [0.0, 0.0, -1e6]]",
    );
    let p = write_temp("overflow.toml", &text);
    let r = run_cli(&["run", "--scenario", p.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(3), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(String::from_utf8_lossy(&r.stderr).contains("numerical error in"));
}

#[test]
fn scan_order_independent_of_thread_count() {
    let exp = scenario::load(&scenario_path("fountain.toml"), None).unwrap();
    let flags = RunFlags { scan: true, compare_series: false };
    let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| run(&exp, flags)).unwrap();
    let parallel = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| run(&exp, flags)).unwrap();
    assert_eq!(serial, parallel);
}

#[test]
fn fringe_fit_recovers_reported_phase() {
    let exp = scenario::load(&scenario_path("fountain.toml"), None).unwrap();
    let out = run(&exp, RunFlags { scan: true, compare_series: false }).unwrap();
    let f = out.fringe.unwrap();
    assert!(f.difference.abs() < 1e-9);
    assert!((f.fitted_visibility - 1.0).abs() < 1e-9);
}

#[test]
fn earth_series_comparison_scales() {
    let path = scenario_path("earth_sagnac.toml");
    let r = run_cli(&["run", "--scenario", path.to_str().unwrap(), "--compare-series", "--format", "json"]);
    assert!(r.status.success());
    let json: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    let exps: Vec<f64> = json["series_comparison"]["exponents"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(exps.len(), 2);
    assert!(exps.iter().all(|&p| p > 2.7), "{exps:?}");
}

#[test]
fn methods_agree_on_drop_tower() {
    let path = scenario_path("drop_tower.toml");
    let exact = scenario::load(&path, None).unwrap();
    let pert = scenario::load(&path, Some("perturbative:2")).unwrap();
    let a = run(&exact, RunFlags::default()).unwrap().nominal;
    let b = run(&pert, RunFlags::default()).unwrap().nominal;
    let (pa, pb) = (a.total_phase.unwrap(), b.total_phase.unwrap());
    // Third order in ΓT² relative to the leading phase.
    assert!((pa - pb).abs() < 1e-9 * pa.abs(), "{pa} {pb}");
}

#[test]
fn impure_pulses_report_probability_only() {
    let good = std::fs::read_to_string(scenario_path("fountain.toml")).unwrap();
    let text = good.replace("T = 0.1", "T = 0.1\nareas = [1.67, 3.14159, 1.67]");
    let p = write_temp("impure.toml", &text);
    let r = run_cli(&["run", "--scenario", p.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = String::from_utf8(r.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "");
    let prob: f64 = row[1].parse().unwrap();
    assert!((0.0..=1.0).contains(&prob));
    assert_eq!((row[2], row[3]), ("", ""));
}
