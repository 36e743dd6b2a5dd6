use chigrid::harness::{
    parse_config, parse_samples_csv, run_experiment_with_workers, write_outputs, ExperimentRun,
    CDF_FILE, MANIFEST_FILE, SAMPLES_FILE, SUMMARY_FILE, TIMING_FILE,
};
use chigrid::Error;

fn config(grid: &str, n_rep: usize, extra: &str) -> String {
    format!(
        r#"{{"m":2,"alpha":1,"r":0,"T":50,"grid":{grid},"n_rep":{n_rep},"master_seed":7,
            "constants_source":"provided","H_alpha":1{extra}}}"#
    )
}

fn run(json: &str, workers: usize) -> ExperimentRun {
    run_experiment_with_workers(&parse_config(json).unwrap(), Some(workers)).unwrap()
}

#[test]
fn report_is_worker_invariant() {
    let json = config(r#"{"kind":"sparse","delta0":0.5}"#, 64, "");
    let a = run(&json, 1);
    let b = run(&json, 3);
    assert_eq!(a.report, b.report);
    assert_eq!(a.replications, b.replications);
    assert_eq!(b.timing.workers, 3);
}

#[test]
fn single_replication_gives_indicator_cdf() {
    let r = run(&config(r#"{"kind":"sparse"}"#, 1, ""), 1);
    assert!(r.report.empirical.iter().all(|&v| v == 0.0 || v == 1.0));
}

#[test]
fn empirical_cdf_is_monotone_and_sup_is_consistent() {
    let r = run(
        &config(
            r#"{"kind":"pickands","D":1}"#,
            100,
            r#","H_D_alpha":0.6,"pickands_term":PT"#,
        )
        .replace(
            "PT",
            &format!(
                "[{}]",
                chigrid::harness::default_eval_points()
                    .iter()
                    .map(|p| format!(r#"{{"x":{},"y":{},"value":0}}"#, p[0], p[1]))
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        ),
        1,
    );
    let rep = &r.report;
    let at = |x: f64, y: f64| {
        rep.eval_points
            .iter()
            .position(|p| p[0] == x && p[1] == y)
            .map(|i| rep.empirical[i])
            .unwrap()
    };
    let axis = [-2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
    for w in axis.windows(2) {
        for &z in &axis {
            assert!(at(w[0], z) <= at(w[1], z));
            assert!(at(z, w[0]) <= at(z, w[1]));
        }
    }
    let sup = rep.per_point.iter().fold(0.0f64, |a, d| a.max(d.abs()));
    assert_eq!(sup, rep.sup_distance);
    assert!(r
        .replications
        .iter()
        .all(|x| x.pair.m_grid <= x.pair.m_cont));
}

#[test]
fn dense_grid_on_the_mesh_copies_the_continuous_maximum() {
    // eta = (2 ln T)^(-1/alpha) puts the dense spacing exactly on the mesh.
    let eta = 1.0 / (2.0 * 50f64.ln());
    let json = config(r#"{"kind":"dense"}"#, 50, &format!(r#","eta":{eta}"#));
    let r = run(&json, 1);
    assert_eq!(r.report.metadata.grid_stride, 1);
    assert!(r
        .replications
        .iter()
        .all(|x| x.normalized.grid == x.normalized.cont));
}

#[test]
fn outputs_round_trip_and_refuse_overwrite() {
    let r = run(&config(r#"{"kind":"sparse"}"#, 40, ""), 1);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let manifest = write_outputs(&r, &out, false).unwrap();
    assert_eq!(manifest.metadata.delta_used, r.report.metadata.delta_used);
    for f in [
        MANIFEST_FILE,
        SAMPLES_FILE,
        CDF_FILE,
        SUMMARY_FILE,
        TIMING_FILE,
    ] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let rows =
        parse_samples_csv(&std::fs::read_to_string(out.join(SAMPLES_FILE)).unwrap()).unwrap();
    assert_eq!(rows.len(), 40);
    for (row, rep) in rows.iter().zip(&r.replications) {
        assert_eq!(
            *row,
            (
                rep.index,
                rep.pair.m_cont,
                rep.pair.m_grid,
                rep.normalized.cont,
                rep.normalized.grid
            )
        );
    }
    let cdf = std::fs::read_to_string(out.join(CDF_FILE)).unwrap();
    assert_eq!(cdf.lines().count(), 37);
    assert!(!cdf.contains('\r'));

    assert!(matches!(
        write_outputs(&r, &out, false),
        Err(Error::OutputExists(_))
    ));
    write_outputs(&r, &out, true).unwrap();
}

#[test]
fn config_errors_carry_paths_and_exit_codes() {
    let e = parse_config(
        r#"{"m":2,"alpha":1,"r":0,"T":"x","grid":{"kind":"dense"},"n_rep":5,"master_seed":1}"#,
    )
    .unwrap_err();
    assert!(
        matches!(&e, Error::Parse { path, .. } if path == "T"),
        "{e}"
    );
    assert_eq!(e.exit_code(), 2);
    let e = parse_config(&config(r#"{"kind":"dense","D":2}"#, 5, "")).unwrap_err();
    assert!(
        matches!(&e, Error::Parse { path, .. } if path.starts_with("grid")),
        "{e}"
    );
}
