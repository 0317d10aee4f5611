use std::process::{Command, Output};

fn dsx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsx"))
        .args(args)
        .output()
        .expect("spawn dsx")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn phi_prints_factorization_and_totient() {
    let o = dsx(&["phi", "360"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("factorization = 2^3·3^2·5"), "{s}");
    assert!(s.contains("phi = 96"), "{s}");
}

#[test]
fn pair_reports_decomposition() {
    let o = dsx(&["pair", "6", "10"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("r = 2, s = 1, t = 15, gcd = 2"), "{s}");
    assert!(s.contains("pv_product = 15/8"), "{s}");
}

#[test]
fn overlap_writes_one_csv_row() {
    let dir = std::env::temp_dir().join(format!("dsx-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("overlap.csv");
    let o = dsx(&[
        "overlap",
        "14",
        "30",
        "--k",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv, stdout(&o));
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("14,30,1,"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn avgsum_lists_every_scale() {
    let o = dsx(&["avgsum", "22", "240", "--K", "3"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    for k in 1..=3 {
        assert!(s.contains(&format!("k = {k}: P_k = ")), "{s}");
    }
}

#[test]
fn block_exhaustive_and_sampled() {
    let o = dsx(&["block", "--h", "2", "--base", "2", "--eps", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("chosen k = 6"), "{}", stdout(&o));

    let a = dsx(&[
        "block", "--h", "1", "--base", "4", "--eps", "1", "--sample", "20", "--seed", "3",
    ]);
    let b = dsx(&[
        "block", "--h", "1", "--base", "4", "--eps", "1", "--sample", "20", "--seed", "3",
    ]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bc_small_case_is_exact() {
    let o = dsx(&["bc", "--psi", "half", "--N", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("bc_ratio = 169/198"));
}

#[test]
fn table_plain_column() {
    let o = dsx(&["table", "--eps", "1", "--N", "4"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.lines().last().unwrap().starts_with("4,4/3,"), "{s}");
}

#[test]
fn run_executes_a_config() {
    let dir = std::env::temp_dir().join(format!("dsx-run-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("cfg.json");
    let out = dir.join("out.csv");
    std::fs::write(
        &cfg,
        r#"{"psi": "half", "pairs": {"list": [[2, 3], [6, 10]]}, "K": 2}"#,
    )
    .unwrap();
    let o = dsx(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    // header plus two pairs at k = 1, 2
    assert_eq!(csv.lines().count(), 5);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(code(&dsx(&["pair", "6", "10", "--psi", "nope"])), 2);
    assert_eq!(
        code(&dsx(&[
            "block", "--h", "1", "--base", "4", "--eps", "1", "--sample", "5"
        ])),
        2
    );
    assert_eq!(code(&dsx(&["run", "/nonexistent/dsx-config.json"])), 2);
    assert_eq!(code(&dsx(&["bc", "--psi", "file:/nonexistent/psi.txt", "--N", "5"])), 2);
    let dir = std::env::temp_dir().join(format!("dsx-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad.json");
    std::fs::write(
        &cfg,
        r#"{"psi": "half", "pairs": {"list": []}, "bogus": 1}"#,
    )
    .unwrap();
    assert_eq!(code(&dsx(&["run", cfg.to_str().unwrap()])), 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn precision_guard_exits_3() {
    // ε·ln 4 agrees with 1 to about 50 digits
    let eps = "0.72134752044448170367996234050094606871332297707649";
    let o = dsx(&["block", "--h", "1", "--base", "2", "--eps", eps]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn caps_exit_4() {
    assert_eq!(code(&dsx(&["bc", "--psi", "half", "--N", "501"])), 4);
    assert_eq!(
        code(&dsx(&["block", "--h", "1", "--base", "4", "--eps", "1"])),
        4
    );
    assert_eq!(code(&dsx(&["table", "--eps", "1", "--N", "100001"])), 4);
}
