use std::path::PathBuf;
use std::process::{Command, Output};

fn gm4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gm4"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(format!("{name}.gm"))
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn psi_of_unipotent() {
    let o = gm4(&["psi", "[[1,4],[0,1]]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "4\n");
    assert_eq!(stdout(&gm4(&["psi", "[[-1,-4],[0,-1]]"])), "4\n");
}

#[test]
fn matclass_reports_class_and_conjugator() {
    let o = gm4(&["matclass", "[[17,32],[-8,-15]]"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("class: Parabolic(+1,8)\n"), "{text}");
    assert!(text.contains("conjugator: "));
}

#[test]
fn invariants_report_vanishing_euler_characteristic() {
    let o = gm4(&["invariants", &corpus("pants_pair_1_2")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("euler: 0\n"));
    assert!(text.contains("sigma: 0\n"));
    assert!(text.contains("reduced: yes\n"));
}

#[test]
fn reports_are_deterministic() {
    let a = gm4(&["invariants", &corpus("genus_one_pair")]);
    let b = gm4(&["invariants", &corpus("genus_one_pair")]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn compare_exit_codes() {
    let same = gm4(&[
        "compare",
        &corpus("pants_pair_1_2"),
        &corpus("pants_pair_1_2"),
    ]);
    assert_eq!(same.status.code(), Some(0));
    assert!(stdout(&same).starts_with("Yes\n"));
    let different = gm4(&[
        "compare",
        &corpus("pants_pair_1_2"),
        &corpus("pants_pair_1_1"),
    ]);
    assert_eq!(different.status.code(), Some(1));
    assert!(stdout(&different).starts_with("No\n"));
    let open = gm4(&[
        "compare",
        "--search-bound",
        "2",
        &corpus("pants_pair_1_2"),
        &corpus("pants_pair_1_m3"),
    ]);
    assert_eq!(open.status.code(), Some(2));
    assert!(stdout(&open).starts_with("Inconclusive\n"));
    let unreduced = gm4(&["compare", &corpus("sigma2_t2"), &corpus("sigma2_t2")]);
    assert_eq!(unreduced.status.code(), Some(4));
    assert!(stderr(&unreduced).contains("not reduced"));
}

#[test]
fn reduce_prints_a_valid_reduced_manifest() {
    let o = gm4(&["reduce", &corpus("two_pants_one_identity")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("surface orientable 0 4"));
    let gs = gm4::manifest::load(&text).unwrap();
    assert!(gm4::assembly::is_reduced(&gs).0);

    let closed = gm4(&["reduce", &corpus("sigma2_t2")]);
    assert_eq!(closed.status.code(), Some(4));
    assert!(stderr(&closed).contains("not a graph-manifold presentation with boundary blocks"));
}

#[test]
fn invalid_manifest_is_located() {
    let dir = std::env::temp_dir().join(format!("gm4-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.gm");
    std::fs::write(
        &path,
        "version 1\nblock A\n  surface orientable 0 3\n  image c1 [[1,1],[1,1]]\n",
    )
    .unwrap();
    let o = gm4(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(
        err.contains(":4:12: determinant 0, not unimodular"),
        "{err}"
    );
    assert!(stdout(&o).is_empty());
}

#[test]
fn validate_accepts_corpus() {
    let o = gm4(&["validate", &corpus("crosscap_self_swap")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "valid: 1 block(s), 1 edge(s)\n");
}

#[test]
fn usage_errors() {
    assert_eq!(gm4(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(gm4(&["psi"]).status.code(), Some(64));
    assert_eq!(
        gm4(&["--format", "json", "psi", "[[1,0],[0,1]]"])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(gm4(&["psi", "[[1,1],[1,1]]"]).status.code(), Some(3));
}
