//! Binary-level checks: exit codes, output shapes, and file plumbing.

use std::process::{Command, Output};

fn fovr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fovr"))
        .args(args)
        .output()
        .expect("spawn cli")
}

fn stdout_of(args: &[&str]) -> String {
    let out = fovr(args);
    assert!(out.status.success(), "{args:?}: {out:?}");
    String::from_utf8(out.stdout).unwrap()
}

fn exit_code(args: &[&str]) -> i32 {
    fovr(args).status.code().unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(exit_code(&["trace", "gen", "--kind", "bogus"]), 2);
    assert_eq!(exit_code(&["trace", "gen"]), 2);
    assert_eq!(exit_code(&["--no-such-flag"]), 2);
    assert_eq!(exit_code(&["catalog", "synth", "--sd-ratios", "1.5"]), 2);
    assert_eq!(exit_code(&["catalog", "synth", "--grid", "0x4"]), 2);
    assert_eq!(exit_code(&["catalog", "synth", "--grid", "4by4"]), 2);
    assert_eq!(exit_code(&["trace", "gen", "--kind", "static", "--rate", "-5"]), 2);
    assert_eq!(exit_code(&["predict", "--trace", "x", "--window", "0"]), 2);
}

#[test]
fn data_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let short = dir.path().join("short.trace");
    let cat = dir.path().join("cat.json");
    assert_eq!(exit_code(&["predict", "--trace", "/no/such/file"]), 1);
    stdout_of(&[
        "trace", "gen", "--kind", "static", "--duration", "3",
        "--out", short.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&["predict", "--trace", short.to_str().unwrap()]), 1);
    stdout_of(&[
        "catalog", "synth", "--clips", "30", "--out", cat.to_str().unwrap(),
    ]);
    // 3 s trace cannot cover a 5 s window plus 30 clips.
    assert_eq!(
        exit_code(&[
            "simulate", "--trace", short.to_str().unwrap(),
            "--manifest", cat.to_str().unwrap(), "--bw", "10",
        ]),
        1
    );
    let garbled = dir.path().join("garbled.trace");
    std::fs::write(&garbled, "0 1 0 0\n").unwrap();
    assert_eq!(exit_code(&["predict", "--trace", garbled.to_str().unwrap()]), 1);
}

#[test]
fn help_exits_0_everywhere() {
    for args in [
        vec!["--help"],
        vec!["trace", "--help"],
        vec!["trace", "gen", "--help"],
        vec!["predict", "--help"],
        vec!["catalog", "synth", "--help"],
        vec!["simulate", "--help"],
    ] {
        let out = fovr(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn trace_gen_line_count_matches_duration_and_rate() {
    let text = stdout_of(&[
        "trace", "gen", "--kind", "static", "--duration", "10", "--rate", "10",
    ]);
    assert_eq!(text.lines().count(), 101);
    for line in text.lines() {
        assert_eq!(line.split_whitespace().count(), 8);
    }
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.trace");
    let args = ["trace", "gen", "--kind", "saccade", "--duration", "5", "--seed", "11"];
    let streamed = stdout_of(&args);
    let mut with_out: Vec<&str> = args.to_vec();
    let path_str = path.to_str().unwrap();
    with_out.extend(["--out", path_str]);
    let silent = stdout_of(&with_out);
    assert!(silent.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), streamed);
}

#[test]
fn predict_reports_perfect_static_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("static.trace");
    stdout_of(&[
        "trace", "gen", "--kind", "static", "--sigma", "0", "--duration", "12",
        "--out", path.to_str().unwrap(),
    ]);
    let text = stdout_of(&["predict", "--trace", path.to_str().unwrap()]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(*lines.last().unwrap(), "# accuracy 1.000000");
    // 12 s trace, 5 s window, 1 s horizon: windows end at 5..=11 s.
    assert_eq!(lines.len(), 8);
    for (i, line) in lines[..7].iter().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(fields.len(), 5);
        assert_eq!(fields[0], i.to_string());
        assert_eq!(fields[4], "1");
    }
    let linear = stdout_of(&[
        "predict", "--trace", path.to_str().unwrap(), "--model", "linear",
    ]);
    assert_eq!(linear.lines().last().unwrap(), "# accuracy 1.000000");
}

#[test]
fn simulate_sweep_emits_reports_in_flag_order() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.trace");
    let cat = dir.path().join("c.json");
    stdout_of(&[
        "trace", "gen", "--kind", "static", "--sigma", "0", "--duration", "11",
        "--out", trace.to_str().unwrap(),
    ]);
    stdout_of(&[
        "catalog", "synth", "--clips", "5", "--out", cat.to_str().unwrap(),
    ]);
    let text = stdout_of(&[
        "simulate", "--trace", trace.to_str().unwrap(), "--manifest", cat.to_str().unwrap(),
        "--sweep", "50,10,5",
    ]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "# bw_mbps 50");
    assert_eq!(lines[2], "# bw_mbps 10");
    assert_eq!(lines[4], "# bw_mbps 5");
    for summary in [lines[1], lines[3], lines[5]] {
        assert!(summary.starts_with("{\"clips\":5,"));
        assert!(summary.ends_with('}'));
    }
}

#[test]
fn simulate_accepts_a_bandwidth_step_file() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.trace");
    let cat = dir.path().join("c.json");
    let bw = dir.path().join("bw.csv");
    stdout_of(&[
        "trace", "gen", "--kind", "static", "--sigma", "0", "--duration", "8",
        "--out", trace.to_str().unwrap(),
    ]);
    stdout_of(&[
        "catalog", "synth", "--clips", "2", "--out", cat.to_str().unwrap(),
    ]);
    std::fs::write(&bw, "0,10000000\n6000,80000000\n").unwrap();
    let rows = stdout_of(&[
        "simulate", "--trace", trace.to_str().unwrap(), "--manifest", cat.to_str().unwrap(),
        "--bw", bw.to_str().unwrap(), "--format", "rows",
    ]);
    assert!(rows.starts_with(
        "clip,request_ms,ready_ms,display_ms,stall_ms,bits,scheduled_qoe,actual_qoe,correct\n"
    ));
    assert_eq!(rows.lines().count(), 3);
    // Malformed step files are data errors.
    std::fs::write(&bw, "5,1000\n").unwrap();
    assert_eq!(
        exit_code(&[
            "simulate", "--trace", trace.to_str().unwrap(),
            "--manifest", cat.to_str().unwrap(), "--bw", bw.to_str().unwrap(),
        ]),
        1
    );
}

#[test]
fn seeds_change_stochastic_outputs_only() {
    let a = stdout_of(&["trace", "gen", "--kind", "pursuit", "--duration", "6", "--seed", "1"]);
    let b = stdout_of(&["trace", "gen", "--kind", "pursuit", "--duration", "6", "--seed", "2"]);
    assert_ne!(a, b, "different seeds must differ under noise");
    let a = stdout_of(&[
        "trace", "gen", "--kind", "pursuit", "--sigma", "0", "--duration", "6", "--seed", "1",
    ]);
    let b = stdout_of(&[
        "trace", "gen", "--kind", "pursuit", "--sigma", "0", "--duration", "6", "--seed", "2",
    ]);
    assert_eq!(a, b, "noiseless pursuit ignores the seed");
    let a = stdout_of(&["catalog", "synth", "--jitter", "0.2", "--seed", "1"]);
    let b = stdout_of(&["catalog", "synth", "--jitter", "0.2", "--seed", "2"]);
    assert_ne!(a, b);
    let a = stdout_of(&["catalog", "synth", "--jitter", "0", "--seed", "1"]);
    let b = stdout_of(&["catalog", "synth", "--jitter", "0", "--seed", "2"]);
    assert_eq!(a, b, "jitter-free catalogs ignore the seed");
}
