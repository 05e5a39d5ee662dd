use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn talenti(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_talenti")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn first_example_reports_constant_and_gap() {
    let o = talenti(&["example", "1", "--eps", "1e-3", "--cond", "1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = stdout(&o);
    // -sqrt(2)(1 + eps)/4 at eps = 1e-3
    assert!(text.contains("-0.3539069440"), "{text}");
    assert!(text.contains("L^2 (squared)"));
    assert!(text.contains("+0.916608"));
    assert!(text.contains("violation |u| > |v| confirmed: true"));
}

#[test]
fn unit_load_disks_pass_pointwise() {
    let o = talenti(&["theorem", "1.2", "--case", "two-disks-f1", "--cond", "2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("sup_t (mu - phi)"));
}

#[test]
fn explicit_exponents_record_out_of_range_entries() {
    let o = talenti(&["theorem", "1.1", "--case", "1", "--cond", "1", "--p", "0.5,1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("recorded only"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["example", "9"][..],
        &["theorem", "1.1", "--case", "nowhere"],
        &["theorem", "1.3", "--case", "1"],
        &["theorem", "1.1", "--case", "1", "--cond", "3"],
        &["theorem", "1.1"],
        &["theorem", "1.1", "--case", "5"],
        &["theorem", "1.2", "--case", "1"],
        &["sweep", "--case", "1", "--param", "zeta", "--values", "0.1"],
        &["example", "1", "--eps", "lots"],
        &["frobnicate"],
    ] {
        let o = talenti(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# two disks\ncase = two-disks-l2\neps = 0.5\ncond = 2\n").unwrap();
    let o = talenti(&["--config", cfg.to_str().unwrap(), "theorem", "1.1"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("eps=0.5") && text.contains("cond_2"), "{text}");
    let o = talenti(&["--config", cfg.to_str().unwrap(), "theorem", "1.1", "--eps", "0.25", "--cond", "1"]);
    let text = stdout(&o);
    assert!(text.contains("eps=0.25") && text.contains("cond_1"), "{text}");

    fs::write(&cfg, "case: 1\n").unwrap();
    assert_eq!(code(&talenti(&["--config", cfg.to_str().unwrap(), "theorem", "1.1"])), 2);
    let missing = dir.path().join("absent.cfg");
    assert_eq!(code(&talenti(&["--config", missing.to_str().unwrap(), "theorem", "1.1"])), 2);
}

fn export_into(dir: &Path) -> Vec<Vec<u8>> {
    let curves = dir.join("curves.csv");
    let o = talenti(&["export", "--curves", curves.to_str().unwrap(), "--case", "3", "--eps", "0.01", "--points", "200"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    ["curves.csv", "curves_rearrangement.csv", "curves_profile.csv"]
        .iter()
        .map(|f| fs::read(dir.join(f)).unwrap())
        .collect()
}

#[test]
fn export_is_byte_identical_with_fixed_headers() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = export_into(a.path());
    assert_eq!(first, export_into(b.path()));
    let headers: Vec<String> = first.iter().map(|f| String::from_utf8_lossy(f).lines().next().unwrap().to_string()).collect();
    assert_eq!(headers, ["t,mu,phi", "s,u_star,v_star", "r,v,dv"]);
    assert_eq!(String::from_utf8_lossy(&first[0]).lines().count(), 202);
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = talenti(&["sweep", "--case", "2", "--param", "eps", "--values", "0.01,0.001", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eps,u_norm,v_norm,gap");
    assert_eq!(lines.len(), 3);
}

#[test]
fn coarse_selftest_passes() {
    let o = talenti(&["selftest", "--resolution", "128", "--variants", "2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));
}

#[test]
fn thread_variable_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_talenti"))
        .args(["selftest", "--resolution", "64", "--variants", "1"])
        .env("TALENTI_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}
