use nilgevrey::error::ErrorClass;
use nilgevrey::pipeline::{run_pipeline, PipelineConfig, StageStatus};
use nilgevrey::presets::{preset, PotentialSpec, Problem};

#[test]
fn quadratic_wells_give_order_two() {
    for name in ["central-ext", "central-2", "bg"] {
        let report = run_pipeline(&preset(name).unwrap(), &PipelineConfig::default());
        assert!(report.succeeded(), "{name}: {:?}", report.failure);
        let order = report.gevrey.as_ref().unwrap().fitted_order().unwrap();
        assert!((order - 2.0).abs() < 0.05, "{name}: {order}");
    }
}

#[test]
fn heisenberg_halts_at_assumptions() {
    let report = run_pipeline(&preset("heisenberg").unwrap(), &PipelineConfig::default());
    let failure = report.failure.as_ref().unwrap();
    assert_eq!(failure.stage, "check_assumptions");
    assert_eq!(failure.class, ErrorClass::Check);
    assert!(failure.message.contains("s = m = 1"), "{}", failure.message);
    assert!(report.gevrey.is_none());
    assert_eq!(
        report.stage("verify_stratification").unwrap().status,
        StageStatus::Passed
    );
    assert!(report
        .stage("compute_S")
        .is_none_or(|s| s.status == StageStatus::Skipped));
}

#[test]
fn given_potentials_skip_the_algebra() {
    let problem = Problem {
        name: "quartic".into(),
        potentials: Some(PotentialSpec {
            q: "t1^4".into(),
            p: "1".into(),
        }),
        ..Default::default()
    };
    let report = run_pipeline(&problem, &PipelineConfig::default());
    assert!(report.succeeded(), "{:?}", report.failure);
    let order = report.gevrey.as_ref().unwrap().fitted_order().unwrap();
    assert!((order - 3.0).abs() < 0.05, "{order}");
    let json = report.to_json();
    assert!(json.contains("\"gevrey\""));
}

#[test]
fn malformed_potentials_are_input_errors() {
    let problem = Problem {
        name: "broken".into(),
        potentials: Some(PotentialSpec {
            q: "t1^^2".into(),
            p: "1".into(),
        }),
        ..Default::default()
    };
    let report = run_pipeline(&problem, &PipelineConfig::default());
    assert_eq!(report.failure.unwrap().class, ErrorClass::Input);
}
