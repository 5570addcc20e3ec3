use std::collections::BTreeMap;

use pdx_core::experiments::{run_experiment, ExperimentConfig, TrialResult};
use pdx_core::report::{
    from_json, histogram_csv, histogram_svg, read_result, to_json, write_result, Format,
    ResultFile, SCHEMA_VERSION,
};
use pdx_core::Error;

fn synthetic(deltas: &[u32]) -> ResultFile {
    let trials = deltas
        .iter()
        .enumerate()
        .map(|(i, &d)| TrialResult {
            trial_index: i as u64,
            delta: Some(d),
            n_points: 1000,
            n_boundary_unsafe: 0,
            exceedances: BTreeMap::from([(d, 1), (d + 1, 0)]),
            e_rho: None,
            max_cluster: None,
        })
        .collect();
    ResultFile::new(ExperimentConfig::new(1e6, deltas.len() as u64, 1), trials)
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let file = run_experiment(&ExperimentConfig::new(500.0, 3, 7)).unwrap();
    write_result(&path, &file, Format::Json).unwrap();
    let back = read_result(&path).unwrap();
    assert_eq!(back.trials, file.trials);
    assert_eq!(back.summary, file.summary);
    assert!(back.is_consistent());
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        to_json(&back).unwrap()
    );
}

#[test]
fn keys_keep_their_order() {
    let text = to_json(&synthetic(&[15])).unwrap();
    let at = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
    assert!(at("schema_version") < at("config"));
    assert!(at("config") < at("trials"));
    assert!(at("trials") < at("summary"));
    assert!(text.contains(SCHEMA_VERSION));
}

#[test]
fn csv_rows_are_contiguous() {
    let f = synthetic(&[13, 15, 15, 16, 19]);
    let csv = histogram_csv(&f.summary);
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "degree,count,probability");
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[1], "13,1,0.2");
    assert_eq!(rows[2], "14,0,0");
    assert_eq!(rows[3], "15,2,0.4");
    assert_eq!(rows[7], "19,1,0.2");
}

#[test]
fn bad_inputs_are_reported() {
    let text = to_json(&synthetic(&[15, 16])).unwrap();
    let wrong = text.replace(SCHEMA_VERSION, "pdx-result/0");
    assert!(matches!(from_json(&wrong), Err(Error::Schema { .. })));
    let cut = text.find("\"summary\"").unwrap();
    let mut broken = text.clone();
    broken.replace_range(cut..cut + 1, "#");
    match from_json(&broken) {
        Err(Error::Parse { offset, .. }) => assert_eq!(offset, cut),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        from_json("{\"schema_version\": 3}"),
        Err(Error::Parse { .. })
    ));
}

#[test]
fn chart_axes_and_bars() {
    let svg = histogram_svg(&synthetic(&[15, 15, 16, 16]).summary);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("Maximal Degree") && svg.contains("Empirical Probability"));
    assert_eq!(svg.matches("fill=\"#4a72b0\"").count(), 2);
}
