//! The command-line front end through its public entry point.

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use zero_attractor::cli::run;

fn cli(args: &[&str]) -> ExitCode {
    let mut full = vec!["zero-attractor"];
    full.extend_from_slice(args);
    run(full)
}

fn out(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn gen_poly_csv_matches_known_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let path = out(dir.path(), "f.csv");
    assert_eq!(cli(&["gen-poly", "--n", "6", "--format", "csv", "--out", &path]), ExitCode::SUCCESS);
    // p(6, k) for k = 1..6 is 1, 3, 3, 2, 1, 1.
    let text = fs::read_to_string(&path).unwrap();
    let counts: Vec<&str> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(counts, ["1", "3", "3", "2", "1", "1"]);
}

#[test]
fn odd_roots_are_conjugate_closed() {
    let dir = tempfile::tempdir().unwrap();
    let path = out(dir.path(), "roots.csv");
    assert_eq!(cli(&["roots", "--family", "odd", "--n", "120", "--out", &path, "--format", "csv"]), ExitCode::SUCCESS);
    let rows: Vec<(f64, f64)> = fs::read_to_string(&path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    // F_120 for odd parts has z^2 as its lowest term.
    assert_eq!(rows.len(), 118);
    for &(x, y) in &rows {
        let gap = rows.iter().map(|&(u, v)| (u - x).hypot(v + y)).fold(f64::INFINITY, f64::min);
        assert!(gap < 1e-15, "({x}, {y}) has no conjugate partner ({gap:e})");
    }
}

#[test]
fn residue_attractor_has_three_spokes() {
    let dir = tempfile::tempdir().unwrap();
    let path = out(dir.path(), "a.json");
    assert_eq!(cli(&["attractor", "--family", "residue", "--a", "1", "--p", "3", "--out", &path]), ExitCode::SUCCESS);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["spokes"].as_array().unwrap().len(), 3);
    assert_eq!(v["circle"]["radius"], 1.0);
    assert_eq!(v["precision_bits"], 128);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (out(dir.path(), "a.json"), out(dir.path(), "b.json"));
    for path in [&a, &b] {
        let code = cli(&["roots", "--family", "residue", "--a", "1", "--p", "3", "--weights", "20,41", "--seed", "9", "--out", path]);
        assert_eq!(code, ExitCode::SUCCESS);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "[family]\nkind = odd\n[run]\nn = 9\n[output]\nformat = csv\n").unwrap();
    let cfg = cfg.to_string_lossy().into_owned();
    let (a, b) = (out(dir.path(), "a.csv"), out(dir.path(), "b.json"));
    assert_eq!(cli(&["gen-poly", "--config", &cfg, "--out", &a]), ExitCode::SUCCESS);
    // Partitions of 9 into odd parts: 8 of them.
    let total: u64 = fs::read_to_string(&a).unwrap().lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 8);
    assert_eq!(cli(&["gen-poly", "--config", &cfg, "--format", "json", "--out", &b]), ExitCode::SUCCESS);
    assert!(fs::read_to_string(&b).unwrap().trim_start().starts_with('{'));
}

#[test]
fn validation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "[run]\nturbo = yes\n").unwrap();
    let cfg = cfg.to_string_lossy().into_owned();
    assert_eq!(cli(&["gen-poly", "--config", &cfg, "--n", "4"]), ExitCode::from(1));
    assert_eq!(cli(&["gen-poly", "--family", "residue", "--p", "3", "--n", "4"]), ExitCode::from(1));
    assert_eq!(cli(&["roots", "--weights", "30,20"]), ExitCode::from(1));
    assert_eq!(cli(&["gen-poly", "--precision", "20", "--n", "4"]), ExitCode::from(1));
    assert_eq!(cli(&["attractor", "--family", "quadratic", "--p", "5"]), ExitCode::from(1));
    assert_eq!(cli(&["no-such-command"]), ExitCode::from(1));
}

#[test]
fn computational_failures_exit_with_two() {
    // Li2 is only evaluated on the closed unit disk.
    assert_eq!(cli(&["dilog", "--re", "3", "--im", "0"]), ExitCode::from(2));
}

#[test]
fn dilog_prints_decimal_at_working_precision() {
    let dir = tempfile::tempdir().unwrap();
    let path = out(dir.path(), "d.json");
    assert_eq!(cli(&["dilog", "--re", "-1", "--precision", "200", "--out", &path]), ExitCode::SUCCESS);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let re = v["value"]["re"].as_str().unwrap();
    // -pi^2/12 = -0.822467033424113218236207583323...
    assert!(re.starts_with("-8.22467033424113218236207583323"), "{re}");
    assert_eq!(v["precision_bits"], 200);
}

#[test]
fn verify_passes_for_small_ceiling() {
    let dir = tempfile::tempdir().unwrap();
    let path = out(dir.path(), "verify.csv");
    assert_eq!(cli(&["verify", "--family", "residue", "--a", "1", "--p", "3", "--max-n", "24", "--format", "csv", "--out", &path]), ExitCode::SUCCESS);
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.lines().count() > 30);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth_back(1) == Some("0")), "{text}");
}
