use std::process::Command;

fn cha() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cha"));
    c.env_remove("CHA_RC").env_remove("CHA_STATES").env_remove("CHA_FORMAT");
    c
}

#[test]
fn sweep_writes_csv_to_stdout() {
    let out = cha()
        .args(["sweep", "--states", "1s", "--rc", "20", "--b", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("state,r_c,alpha,beta,b,family,space,value"));
    assert_eq!(lines.count(), 12);
    assert!(text.contains("1s,20,0.6,3,1,ES,t,5.911"));
}

#[test]
fn environment_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = cha()
        .args(["sweep", "--b", "1"])
        .env("CHA_STATES", "2p")
        .env("CHA_RC", "5:6:1")
        .env("CHA_FORMAT", "json")
        .env("CHA_OUT", &path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rows.len(), 24);
    assert_eq!(rows[0]["state"], "2p");
    assert_eq!(rows[0]["r_c"], 5.0);
    assert_eq!(rows[12]["r_c"], 6.0);
}

#[test]
fn plot_mode_emits_gnuplot_blocks() {
    let out = cha()
        .args(["sweep", "--states", "1s,2p", "--rc", "1,2", "--plot", "ES:r:1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.split("\n\n\n").count(), 2);
    assert!(text.starts_with("# 1s"));
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        vec!["sweep", "--states", "7s", "--rc", "1"],
        vec!["sweep", "--states", "1s", "--rc", "-3"],
        vec!["sweep", "--states", "1s", "--rc", "1", "--format", "xml"],
        vec!["table", "V"],
    ] {
        let out = cha().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let out = cha()
        .args(["table", "I", "--golden", "/nonexistent/golden.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cell_failure_exits_with_one_and_keeps_other_cells() {
    let out = cha()
        .args(["sweep", "--states", "1s", "--rc", "1,0.05", "--pmax", "320", "--no-auto-raise", "--b", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 13);
    assert!(text.lines().skip(1).all(|l| l.starts_with("1s,1,")));
    assert!(String::from_utf8(out.stderr).unwrap().contains("r_c = 0.05"));
}

#[test]
fn single_prints_measures() {
    let out = cha().args(["single", "--state", "1s", "--rc", "100"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let i_r = v["measures"]["i_r"].as_f64().unwrap();
    assert!((i_r - 4.0).abs() < 1e-6);
}
