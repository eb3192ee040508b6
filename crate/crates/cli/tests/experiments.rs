use flagq_core::experiments::{run, Cell, Experiment, ExperimentConfig};
use flagq_core::Error;

fn su2(extra: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(&format!(
        r#"{{"group":{{"n":2,"special":true}},"family":[{{"law":"power","a":1.0,"p":1.0,"b":0.0}}],{extra}}}"#
    ))
    .unwrap()
}

#[test]
fn identical_config_gives_identical_tables() {
    let c = su2(r#""sweep":[6,12],"level_samples":5000"#);
    for exp in [
        Experiment::Szego,
        Experiment::BerezinLimit,
        Experiment::Verify,
    ] {
        let a = run(exp, &c).unwrap().to_csv().unwrap();
        let b = run(exp, &c).unwrap().to_csv().unwrap();
        assert_eq!(a, b, "{}", exp.name());
    }
}

#[test]
fn pool_size_does_not_change_results() {
    let c = su2(
        r#""sweep":[3,8,5],"quadrature":{"kind":"monte_carlo","samples":3000,"seed":5},"level_samples":4000"#,
    );
    let at = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run(Experiment::Szego, &c).unwrap().to_csv().unwrap())
    };
    let one = at(1);
    assert_eq!(one, at(3));
    assert_eq!(one, at(8));
}

#[test]
fn rows_follow_sweep_order() {
    let t = run(
        Experiment::BerezinLimit,
        &su2(r#""sweep":[9,3,6],"test_points":4"#),
    )
    .unwrap();
    assert_eq!(t.column_f64("lambda1").unwrap(), vec![9.0, 3.0, 6.0]);
    // Out-of-order sweep is not decreasing in λ, so the trend assertion fails.
    assert!(!t.passed());
}

#[test]
fn every_row_has_a_reference() {
    for exp in [
        Experiment::Verify,
        Experiment::Szego,
        Experiment::KernelDecay,
    ] {
        let t = run(exp, &su2(r#""sweep":[4,8],"level_samples":2000"#)).unwrap();
        assert_eq!(t.columns.last().unwrap(), "ref");
        for r in &t.rows {
            assert!(matches!(r.last().unwrap(), Cell::Text(s) if !s.is_empty()));
        }
    }
}

#[test]
fn constant_symbol_szego_is_trivial() {
    let t = run(Experiment::Szego, &su2(r#""sweep":[5,10],"symbol":{"kind":"const","value":0.5},"taus":[0.7],"level_samples":1000"#)).unwrap();
    for col in ["counting_fraction", "level_measure", "gap"] {
        assert!(
            t.column_f64(col).unwrap().iter().all(|&v| v == 0.0),
            "{col}"
        );
    }
}

#[test]
fn constant_symbol_has_no_berezin_error() {
    let t = run(
        Experiment::BerezinLimit,
        &su2(r#""sweep":[2,5,9],"symbol":{"kind":"const","value":0.3}"#),
    )
    .unwrap();
    assert!(t
        .column_f64("sup_error")
        .unwrap()
        .iter()
        .all(|&v| v < 1e-12));
    assert!(t.passed());
}

#[test]
fn product_variant_converges() {
    let t = run(Experiment::BerezinLimit, &su2(r#""sweep":[10,20,40],"symbol2":{"kind":"abs_g11_sq"},"tolerances":{"final_sup_error":0.05}"#)).unwrap();
    assert!(t.passed(), "{:?}", t.assertions);
}

#[test]
fn negative_control_kernel_is_constant() {
    let t = run(
        Experiment::KernelDecay,
        &ExperimentConfig::from_json(
            r#"{"group":{"n":2,"special":true},"family":[{"law":"power","a":0.0,"p":0.0,"b":2.0}],"sweep":[1,4,9],"expect_decay":false}"#,
        )
        .unwrap(),
    )
    .unwrap();
    assert!(t.passed(), "{:?}", t.assertions);
}

#[test]
fn kernel_decay_on_u3_uses_monte_carlo() {
    let c = ExperimentConfig::from_json(
        r#"{"group":{"n":3,"special":false},"family":[{"law":"power","a":1.0,"p":1.0,"b":0.0},null],
            "sweep":[2,6],"quadrature":{"kind":"monte_carlo","samples":100,"seed":1},
            "grid":{"candidates":200},"l1_samples":4000}"#,
    )
    .unwrap();
    let t = run(Experiment::KernelDecay, &c).unwrap();
    let l1 = t.column_f64("l1_norm").unwrap();
    assert!(l1.iter().all(|v| (v - 1.0).abs() < 0.15), "{l1:?}");
    assert!(t.passed(), "{:?}", t.assertions);
}

#[test]
fn commute_on_u3() {
    let c = ExperimentConfig::from_json(
        r#"{"group":{"n":3,"special":false},"family":[{"law":"power","a":1.0,"p":0.0,"b":0.0},{"law":"power","a":1.0,"p":0.0,"b":0.0}],
            "sweep":[1],"quadrature":{"kind":"monte_carlo","samples":2000,"seed":3},
            "pairs":[{"a":{"kind":"abs_g11_sq"},"b":{"kind":"const","value":2.0},"expect":"commute"}]}"#,
    )
    .unwrap();
    let t = run(Experiment::Commute, &c).unwrap();
    // (1,1) of U(3) has a two-dimensional zero weight space.
    assert_eq!(t.rows[0][3], Cell::Bool(false));
    assert!(t.passed(), "{:?}", t.assertions);
}

#[test]
fn inadequate_product_rule_is_a_construction_error() {
    let c = su2(r#""sweep":[10],"quadrature":{"kind":"su2_product","max_degree":6}"#);
    assert!(matches!(
        run(Experiment::Szego, &c),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn symbol_without_degree_needs_monte_carlo() {
    let c = su2(r#""sweep":[10],"symbol":{"kind":"sigmoid","tau":0.5,"steepness":20.0}"#);
    assert!(run(Experiment::Szego, &c).is_err());
    let c = su2(
        r#""sweep":[10],"symbol":{"kind":"sigmoid","tau":0.5,"steepness":20.0},"quadrature":{"kind":"monte_carlo","samples":4000,"seed":2},"level_samples":4000"#,
    );
    assert!(run(Experiment::Szego, &c).is_ok());
}

#[test]
fn json_mirror_matches_csv_rows() {
    let t = run(Experiment::KernelDecay, &su2(r#""sweep":[2,4]"#)).unwrap();
    let j: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
    assert_eq!(j["rows"].as_array().unwrap().len(), 2);
    assert_eq!(j["columns"][2], "sup_outside");
    assert_eq!(j["provenance"]["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(
        t.to_csv()
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .count(),
        3
    );
}
