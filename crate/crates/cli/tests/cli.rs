use std::process::{Command, Output};

fn hierarchy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hierarchy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn commutator_of_generators_is_one() {
    let o = hierarchy(&["weyl", "eval", "[D,z]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1\n");
}

#[test]
fn weyl_latex_output() {
    let o = hierarchy(&["weyl", "eval", "D z", "--emit", "latex"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), r"z\frac{d}{dz}+1");
}

#[test]
fn truncated_vector_field_reports_offset() {
    let o = hierarchy(&["jets", "eval", "V(1,"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("offset 4"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn vector_field_on_p0() {
    let o = hierarchy(&["jets", "eval", "V(1,1)(p0)", "--tmax", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "p1*t1+2*p2*t2+3*p3*t3\n");
}

#[test]
fn jet_window_is_enforced() {
    let o = hierarchy(&["jets", "eval", "p9", "--jetmax", "8"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn reduction_suite_passes() {
    let o = hierarchy(&["verify", "reduction", "--m-max", "2", "--k-max", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failures"));
}

#[test]
fn zero_curvature_pair_passes() {
    let o = hierarchy(&["verify", "zero-curvature", "--j", "2", "--k", "3", "--depth", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn shallow_depth_is_exhausted() {
    let o = hierarchy(&["verify", "zero-curvature", "--j", "2", "--k", "4", "--depth", "2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let o = hierarchy(&["verify", "no-such-suite"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unpaired_flow_flag_is_a_usage_error() {
    let o = hierarchy(&["verify", "zero-curvature", "--j", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn short_time_range_is_rejected() {
    let o = hierarchy(&["extend", "wave", "--m-max", "2", "--k-max", "3", "--tmax", "4"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        &["extend", "wave", "--m-max", "2", "--k-max", "3", "--emit", "json"][..],
        &["verify", "structure", "--emit", "json"][..],
        &["kp", "flows", "--j", "3", "--depth", "5"][..],
    ] {
        let a = hierarchy(args);
        let b = hierarchy(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let base = ["verify", "extended-flatness", "--emit", "json"];
    let one = hierarchy(&[&base[..], &["--jobs", "1"]].concat());
    let four = hierarchy(&[&base[..], &["--jobs", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn flags_override_config_over_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("window.toml");
    std::fs::write(&cfg, "m_max = 1\nk_max = 1\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_config = hierarchy(&["--config", cfg, "extend", "wave"]);
    assert_eq!(from_config.status.code(), Some(0));
    assert_eq!(stdout(&from_config).lines().count(), 2);

    let from_flag = hierarchy(&["--config", cfg, "extend", "wave", "--k-max", "2"]);
    assert_eq!(stdout(&from_flag).lines().count(), 3);

    let defaults = hierarchy(&["extend", "wave"]);
    assert_eq!(stdout(&defaults).lines().count(), 4);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "m_max = 1\nwidth = 3\n").unwrap();
    let o = hierarchy(&["--config", cfg.to_str().unwrap(), "extend", "wave"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dressing_json_has_three_operators() {
    let o = hierarchy(&["kp", "dress", "--depth", "3", "--emit", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for key in ["\"g\":", "\"g_inv\":", "\"l\":"] {
        assert!(s.contains(key), "{key}");
    }
}
