//! Scenario runner and CSV output, exercised through the public API.

use vlcris_core::scenario::{
    emit_csv, emit_trace_csv, parse_config, run_scenario, Decision, ResultRow, TraceRow,
    RESULT_COLUMNS,
};

fn row(value: f64, mean: f64) -> ResultRow {
    ResultRow {
        sweep_variable: "optical_power".into(),
        sweep_value: value,
        mean,
        min: mean * 0.5,
        max: mean * 1.5,
        best: Decision {
            omega: Some(0.123456789),
            gamma: Some(-1.0),
            eta_c: vec![1.6, 1.55],
        },
        los_blocked_fraction: 0.25,
        evaluations: 802,
        failed_trials: 0,
        note: String::new(),
        wall_ms: Some(1.5),
    }
}

#[test]
fn empty_rows_write_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/out.csv");
    emit_csv(&[], &path, false).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, format!("{}\n", RESULT_COLUMNS.join(",")));
}

#[test]
fn one_row_gives_two_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    emit_csv(&[row(2.0, 1.0e8)], &path, false).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
}

#[test]
fn timing_adds_a_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    emit_csv(&[row(2.0, 1.0e8)], &path, true).unwrap();
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let header = reader.headers().unwrap().clone();
    assert_eq!(header.len(), RESULT_COLUMNS.len() + 1);
    assert_eq!(&header[RESULT_COLUMNS.len()], "wall_ms");
}

#[test]
fn numbers_round_trip_to_nine_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let rows = [row(1.0, 123456789.123), row(8.0, 9.87654321e-3)];
    emit_csv(&rows, &path, false).unwrap();
    let mut reader = csv::Reader::from_path(&path).unwrap();
    for (rec, want) in reader.records().zip(&rows) {
        let rec = rec.unwrap();
        let mean: f64 = rec[2].parse().unwrap();
        let omega: f64 = rec[5].parse().unwrap();
        assert!(((mean - want.mean) / want.mean).abs() < 1e-9);
        assert!(((omega - 0.123456789) / 0.123456789).abs() < 1e-9);
        assert_eq!(&rec[7].split(';').count(), &2);
        assert_eq!(&rec[9], "802");
    }
}

#[test]
fn trace_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let rows: Vec<TraceRow> = (0..3)
        .map(|i| TraceRow {
            sweep_variable: "none".into(),
            sweep_value: 0.0,
            iteration: i,
            mean: i as f64,
            min: 0.0,
            max: 2.0 * i as f64,
        })
        .collect();
    emit_trace_csv(&rows, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "sweep_variable,sweep_value,iteration,mean,min,max");
    assert_eq!(lines.len(), 4);
}

fn small(kind: &str, extra: &str) -> String {
    format!(
        "kind = \"{kind}\"\nlos = \"off\"\n{extra}\n\
         [params]\nelectric_field = 4.0e6\n\
         [optimizer]\nagents = 2\niterations = 60\n\
         [monte_carlo]\ntrials = 3\nrandomize = true\n"
    )
}

#[test]
fn rate_rises_with_transmit_power() {
    let cfg = parse_config(&format!(
        "{}[sweep]\nvariable = \"optical_power\"\nvalues = [1.0, 4.0, 8.0]\n",
        small("rate_p0", "")
    ))
    .unwrap();
    let rows = run_scenario(&cfg).unwrap().rows;
    assert_eq!(rows.len(), 3);
    assert!(rows.windows(2).all(|w| w[1].mean >= w[0].mean));
    assert!(rows.iter().all(|r| r.min <= r.mean && r.mean <= r.max));
    assert!(rows.iter().all(|r| r.evaluations == 3 * 2 * 61));
}

#[test]
fn lc_receiver_beats_plain_mirror_baseline() {
    let lc = parse_config(&small("rate_p0", "")).unwrap();
    let plain = parse_config(&small("ris_only_baseline", "")).unwrap();
    let a = run_scenario(&lc).unwrap().rows[0].mean;
    let b = run_scenario(&plain).unwrap().rows[0].mean;
    assert!(a > b, "{a} vs {b}");
}

#[test]
fn convergence_trace_has_one_row_per_iteration() {
    let cfg = parse_config(&small("convergence_trace", "problem = \"rate_p0\"")).unwrap();
    let report = run_scenario(&cfg).unwrap();
    assert_eq!(report.traces.len(), 61);
    assert!(report.traces.windows(2).all(|w| w[1].mean >= w[0].mean));
}
