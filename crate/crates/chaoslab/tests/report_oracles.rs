//! Artifact-emission contract: frozen CSV dialect, manifest completeness,
//! content hashing, and all-or-nothing writes.

use chaoslab::chaos::TailCurve;
use chaoslab::recovery::{PhaseCell, PhaseDiagram};
use chaoslab::report::{
    emit, phase_table, scaling_table, sha256_hex, tail_curve_table, to_json_pretty, Manifest,
    MANIFEST_FILE,
};
use chaoslab::rip::{ScalingRow, ScalingScan};
use serde::Serialize;

#[derive(Serialize)]
struct DemoConfig {
    n: usize,
    alpha: f64,
    label: String,
}

fn demo_config() -> DemoConfig {
    DemoConfig {
        n: 16,
        alpha: 1.5,
        label: "demo".into(),
    }
}

#[test]
fn emit_writes_files_and_verifiable_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let run_dir = dir.path().join("run");
    let files = vec![
        ("tails.csv".to_string(), "t,empirical,bound\n1,0.5,0.7\n".to_string()),
        ("summary.json".to_string(), "{\n  \"ok\": true\n}\n".to_string()),
    ];
    let manifest = emit(&run_dir, "chaos-tails", 42, &demo_config(), &files).unwrap();

    assert_eq!(manifest.subcommand, "chaos-tails");
    assert_eq!(manifest.seed, 42);
    assert_eq!(manifest.config["n"], 16);
    assert_eq!(manifest.config["alpha"], 1.5);
    assert_eq!(manifest.config["label"], "demo");
    assert_eq!(manifest.outputs.len(), 2);

    // Each listed file exists, with matching byte count and content hash.
    for (record, (name, content)) in manifest.outputs.iter().zip(&files) {
        assert_eq!(&record.file, name);
        let on_disk = std::fs::read(run_dir.join(name)).unwrap();
        assert_eq!(on_disk, content.as_bytes());
        assert_eq!(record.bytes, on_disk.len() as u64);
        assert_eq!(record.sha256, sha256_hex(&on_disk));
    }

    // The manifest on disk is valid JSON, matches the returned value, and
    // ends with LF.
    let manifest_text = std::fs::read_to_string(run_dir.join(MANIFEST_FILE)).unwrap();
    assert!(manifest_text.ends_with('\n'));
    let parsed: serde_json::Value = serde_json::from_str(&manifest_text).unwrap();
    assert_eq!(parsed["subcommand"], "chaos-tails");
    assert_eq!(parsed["outputs"][0]["file"], "tails.csv");
    assert_eq!(
        parsed["outputs"][0]["sha256"],
        sha256_hex(files[0].1.as_bytes())
    );

    // Re-emitting with the same inputs is byte-identical.
    let again = emit(&run_dir, "chaos-tails", 42, &demo_config(), &files).unwrap();
    assert_eq!(to_json_pretty(&manifest).unwrap(), to_json_pretty(&again).unwrap());
    assert_eq!(
        std::fs::read_to_string(run_dir.join(MANIFEST_FILE)).unwrap(),
        manifest_text
    );
}

#[test]
fn emit_removes_partial_outputs_on_failure() {
    let dir = tempfile::tempdir().unwrap();
    let run_dir = dir.path().join("run");
    std::fs::create_dir_all(&run_dir).unwrap();
    // A directory squatting on the second artifact's name forces the second
    // write to fail after the first succeeded.
    std::fs::create_dir(run_dir.join("blocked.csv")).unwrap();
    let files = vec![
        ("first.csv".to_string(), "a\n1\n".to_string()),
        ("blocked.csv".to_string(), "b\n2\n".to_string()),
    ];
    let err = emit(&run_dir, "demo", 1, &demo_config(), &files);
    assert!(err.is_err());
    assert!(
        !run_dir.join("first.csv").exists(),
        "partial output survived a failed run"
    );
    assert!(!run_dir.join(MANIFEST_FILE).exists());

    // Bad artifact names are rejected before anything is written.
    let bad = vec![(format!("sub/dir.csv"), String::new())];
    assert!(emit(&run_dir, "demo", 1, &demo_config(), &bad).is_err());
    assert!(!run_dir.join(MANIFEST_FILE).exists());
    let clash = vec![(MANIFEST_FILE.to_string(), String::new())];
    assert!(emit(&run_dir, "demo", 1, &demo_config(), &clash).is_err());
}

#[test]
fn tail_curve_csv_matches_struct() {
    let curve = TailCurve {
        t: vec![0.5, 1.0, 2.0],
        empirical: vec![0.75, 0.5, 0.005],
        bound: vec![f64::NAN; 3],
    }
    .with_bound(vec![1.0, 0.25, 0.125])
    .unwrap();
    let table = tail_curve_table(&curve).unwrap();
    assert_eq!(
        table.to_csv(),
        "t,empirical,bound\n0.5,0.75,1\n1,0.5,0.25\n2,0.005,0.125\n"
    );
}

#[test]
fn phase_csv_matches_struct() {
    let diagram = PhaseDiagram {
        n: 8,
        m_grid: vec![2, 4],
        s_grid: vec![1],
        cells: vec![
            PhaseCell {
                m: 2,
                s: 1,
                successes: 3,
                trials: 10,
                p_hat: 0.3,
                ci: (0.1078, 0.6032),
            },
            PhaseCell {
                m: 4,
                s: 1,
                successes: 10,
                trials: 10,
                p_hat: 1.0,
                ci: (0.7225, 1.0),
            },
        ],
    };
    let table = phase_table(&diagram).unwrap();
    assert_eq!(
        table.to_csv(),
        "m,s,successes,trials,p_hat,ci_lo,ci_hi\n\
         2,1,3,10,0.3,0.1078,0.6032\n\
         4,1,10,10,1,0.7225,1\n"
    );
}

#[test]
fn scaling_csv_handles_unresolved_rows() {
    let scan = ScalingScan {
        n: 64,
        delta_target: 0.4,
        rows: vec![
            ScalingRow {
                s: 2,
                m_star: Some(12),
                f1: 34.723,
                ratio: Some(12.0 / 34.723),
                probes: vec![],
            },
            ScalingRow {
                s: 4,
                m_star: None,
                f1: 133.1,
                ratio: None,
                probes: vec![],
            },
        ],
        slope: None,
        ratio_spread: None,
    };
    let table = scaling_table(&scan).unwrap();
    let csv = table.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "s,m_star,f1,ratio");
    assert_eq!(lines[1], format!("2,12,34.723,{}", 12.0 / 34.723));
    assert_eq!(lines[2], "4,,133.1,");
}

#[test]
fn manifest_reproduction_loop_closes() {
    // "Reproducible from the manifest alone": regenerate the artifact from
    // the config echoed in the manifest and check the recorded hash.
    let dir = tempfile::tempdir().unwrap();
    let make_artifact = |n: usize, alpha: f64| -> String {
        let mut s = String::from("i,value\n");
        for i in 0..n {
            s.push_str(&format!("{i},{}\n", alpha * i as f64));
        }
        s
    };
    let config = DemoConfig {
        n: 3,
        alpha: 0.5,
        label: "loop".into(),
    };
    let artifact = make_artifact(config.n, config.alpha);
    let manifest: Manifest = emit(
        dir.path(),
        "demo",
        7,
        &config,
        &[("table.csv".to_string(), artifact)],
    )
    .unwrap();

    let n = manifest.config["n"].as_u64().unwrap() as usize;
    let alpha = manifest.config["alpha"].as_f64().unwrap();
    let regenerated = make_artifact(n, alpha);
    assert_eq!(manifest.outputs[0].sha256, sha256_hex(regenerated.as_bytes()));
}
