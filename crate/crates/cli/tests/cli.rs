//! Drives the `virasoro` binary end to end.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_virasoro"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn csv_column(text: &str, col: usize) -> Vec<String> {
    text.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().to_string()).collect()
}

#[test]
fn ising_vacuum_level_dims() {
    let dir = TempDir::new().unwrap();
    let o = run(&["rep", "--c", "1/2", "--N", "8"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let dims = csv_column(&read(dir.path(), "rep_levels.csv"), 1);
    assert_eq!(dims, ["1", "0", "1", "1", "2", "2", "3", "3", "5"]);
    assert!(read(dir.path(), "rep.json").contains("\"pass\": true"));
}

#[test]
fn central_charge_two_has_level_two_state() {
    let dir = TempDir::new().unwrap();
    let o = run(&["rep", "--c", "2", "--N", "2"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(csv_column(&read(dir.path(), "rep_levels.csv"), 1), ["1", "0", "1"]);
}

#[test]
fn truncation_below_two_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let o = run(&["rep", "--N", "1"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("N"));
}

#[test]
fn empty_eps_grid_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(&["bounds", "--eps-grid", ""], dir.path())), 2);
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(&["frobnicate"], dir.path())), 2);
}

#[test]
fn piecewise_field_corners_have_second_derivative_jump_four() {
    let dir = TempDir::new().unwrap();
    let o = run(&["field"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let corners = read(dir.path(), "field_corners.csv");
    let jumps: Vec<f64> = csv_column(&corners, 7).iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(jumps.len(), 4);
    assert!(jumps.iter().all(|j| (j.abs() - 4.0).abs() < 1e-9), "{jumps:?}");
    assert!(dir.path().join("field_samples.csv").exists());
}

#[test]
fn single_mode_field_has_one_coefficient_row() {
    let dir = TempDir::new().unwrap();
    let o = run(&["field", "mode:2"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = read(dir.path(), "field_coefficients.csv");
    assert_eq!(table.lines().count(), 2, "{table}");
    assert!(table.lines().nth(1).unwrap().starts_with("2,"));
}

#[test]
fn malformed_coefficient_csv_names_the_line() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("bad.csv");
    fs::write(&csv, "n,re,im\n1,0.5,0\n2,0.5\n").unwrap();
    let o = run(&["field", csv.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn non_real_coefficient_csv_lists_offending_modes() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("nr.csv");
    fs::write(&csv, "n,re,im\n1,1,0\n-1,0.5,0\n").unwrap();
    let o = run(&["field", csv.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("not real") && stderr(&o).contains("[1]"), "{}", stderr(&o));
}

#[test]
fn missing_coefficient_file_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let o = run(&["field", "/nonexistent/coeffs.csv"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn bounds_chain_holds_and_heat_table_starts_at_one_sixteenth() {
    let dir = TempDir::new().unwrap();
    let o = run(&["bounds", "--c", "1/2", "--N", "12"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let fm = read(dir.path(), "bounds_fm.csv");
    let row = fm.lines().find(|l| l.starts_with("1,1,")).expect("k=1, m=1 row");
    let sup: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!((sup - 1.0 / 16.0).abs() < 1e-12, "{row}");
    for name in ["bounds_r.csv", "bounds_q.csv", "bounds_r_by_mode.csv", "bounds.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn exact_smear_checks_pass() {
    let dir = TempDir::new().unwrap();
    let o = run(&["smear", "--c", "1/2", "--N", "8", "--pairs", "4"], dir.path());
    assert_eq!(code(&o), 0, "{}\n{}", String::from_utf8_lossy(&o.stdout), stderr(&o));
    assert!(read(dir.path(), "smear_checks.csv").lines().count() > 1);
}

#[test]
fn float_smear_checks_pass() {
    let dir = TempDir::new().unwrap();
    let o = run(&["smear", "--c", "1/2", "--N", "10", "--mode", "float", "--pairs", "4"], dir.path());
    assert_eq!(code(&o), 0, "{}\n{}", String::from_utf8_lossy(&o.stdout), stderr(&o));
}

#[test]
fn check_all_subset_passes() {
    let dir = TempDir::new().unwrap();
    let o = run(&["check-all", "--only", "2,9"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("criterion")).count(), 2);
    assert!(read(dir.path(), "check_all.json").contains("\"all_pass\": true"));
}

#[test]
fn check_all_float_mode_passes() {
    let dir = TempDir::new().unwrap();
    let o = run(&["check-all", "--mode", "float", "--N", "10", "--only", "1,2"], dir.path());
    assert_eq!(code(&o), 0, "{}\n{}", String::from_utf8_lossy(&o.stdout), stderr(&o));
}

#[test]
fn broken_cocycle_fails_the_relation_check() {
    let dir = TempDir::new().unwrap();
    let o = run(&["check-all", "--only", "1", "--fault-cocycle-den", "13"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn unknown_criterion_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(&["check-all", "--only", "11"], dir.path())), 2);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        assert_eq!(code(&run(&["bounds", "--c", "7/10", "--N", "8", "--mollifier"], dir.path())), 0);
        assert_eq!(code(&run(&["smear", "--N", "8", "--pairs", "3", "--seed", "5"], dir.path())), 0);
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 8);
    for name in names {
        let name = name.to_str().unwrap();
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name} differs");
    }
}

fn cache_entry(cache: &Path) -> std::path::PathBuf {
    let entries: Vec<_> = fs::read_dir(cache).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1, "{entries:?}");
    entries.into_iter().next().unwrap()
}

#[test]
fn cache_hit_reproduces_the_miss() {
    let dir = TempDir::new().unwrap();
    let cache = dir.path().join("cache");
    let args = ["rep", "--c", "7/10", "--h", "1/10", "--N", "7", "--cache", cache.to_str().unwrap()];
    let first = run(&args, &dir.path().join("a"));
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    assert!(String::from_utf8_lossy(&first.stdout).contains("cache: miss"));
    let second = run(&args, &dir.path().join("b"));
    assert_eq!(code(&second), 0, "{}", stderr(&second));
    assert!(String::from_utf8_lossy(&second.stdout).contains("cache: hit"));
    let strip = |s: String| s.replace("\"miss\"", "\"hit\"");
    assert_eq!(strip(read(&dir.path().join("a"), "rep.json")), read(&dir.path().join("b"), "rep.json"));
    assert_eq!(read(&dir.path().join("a"), "rep_levels.csv"), read(&dir.path().join("b"), "rep_levels.csv"));
}

#[test]
fn corrupted_cache_entry_is_refused() {
    let dir = TempDir::new().unwrap();
    let cache = dir.path().join("cache");
    let args = ["rep", "--N", "6", "--cache", cache.to_str().unwrap()];
    assert_eq!(code(&run(&args, dir.path())), 0);
    let entry = cache_entry(&cache);
    let text = fs::read_to_string(&entry).unwrap();
    let last = text.trim_end().rfind(|c: char| c.is_ascii_digit()).unwrap();
    let mut bytes = text.into_bytes();
    bytes[last] = if bytes[last] == b'1' { b'2' } else { b'1' };
    fs::write(&entry, bytes).unwrap();
    let o = run(&args, dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("corrupt"), "{}", stderr(&o));
}

#[test]
fn stale_cache_schema_is_refused() {
    let dir = TempDir::new().unwrap();
    let cache = dir.path().join("cache");
    let args = ["rep", "--N", "6", "--cache", cache.to_str().unwrap()];
    assert_eq!(code(&run(&args, dir.path())), 0);
    let entry = cache_entry(&cache);
    let text = fs::read_to_string(&entry).unwrap();
    let (header, rest) = text.split_once(' ').unwrap();
    let (_, rest) = rest.split_once(' ').unwrap();
    fs::write(&entry, format!("{header} v0 {rest}")).unwrap();
    let o = run(&args, dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("stale"), "{}", stderr(&o));
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.ini");
    fs::write(&cfg, "[run]\nc = 2\nh = 1/2\nN = 3\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    assert_eq!(code(&run(&["rep", "--config", cfg], dir.path())), 0);
    assert_eq!(csv_column(&read(dir.path(), "rep_levels.csv"), 1), ["1", "1", "2", "3"]);
    assert_eq!(code(&run(&["rep", "--config", cfg, "--h", "0"], dir.path())), 0);
    assert_eq!(csv_column(&read(dir.path(), "rep_levels.csv"), 1), ["1", "0", "1", "1"]);
    assert_eq!(code(&run(&["rep", "--config", cfg, "--N", "4", "--h", "0"], dir.path())), 0);
    assert_eq!(csv_column(&read(dir.path(), "rep_levels.csv"), 1), ["1", "0", "1", "1", "2"]);
}

#[test]
fn nonpositive_central_charge_is_rejected() {
    let dir = TempDir::new().unwrap();
    let o = run(&["rep", "--c", "0"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("must be positive"), "{}", stderr(&o));
    assert_eq!(code(&run(&["rep", "--h=-1/2"], dir.path())), 2);
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.ini");
    fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(code(&run(&["rep", "--config", cfg.to_str().unwrap()], dir.path())), 2);
}
