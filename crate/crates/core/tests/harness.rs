use hermite_potential::harness::emit::{read_sweep_csv, write_region_csv, write_sweep_csv};
use hermite_potential::harness::{
    emit, emit_region, run_counterexample, run_sweep, sweep_report, AxisName, AxisRange,
    CounterexampleKind, CounterexampleSpec, ExperimentReport, Format, PairSampling, RadialInput,
    RegionReport, SweepSpec, SweepTarget,
};
use hermite_potential::kernels::KernelParams;
use hermite_potential::region::{raster, RegionParams};
use hermite_potential::QuadConfig;
use proptest::prelude::*;

fn kp(d: u32, sigma: f64) -> KernelParams {
    KernelParams::new(d, sigma).unwrap()
}

fn potential_spec(d: u32, sigma: f64, seed: u64) -> SweepSpec {
    SweepSpec {
        seed,
        ..SweepSpec::new(SweepTarget::PotentialKernel).kernel(kp(d, sigma))
    }
    .axis(AxisName::U, AxisRange::log(1e-3, 10.0, 30))
    .axis(AxisName::NormSum, AxisRange::log(0.1, 10.0, 25))
}

fn csv_bytes(spec: &SweepSpec) -> Vec<u8> {
    let mut buf = Vec::new();
    write_sweep_csv(&run_sweep(spec).unwrap(), &mut buf).unwrap();
    buf
}

#[test]
fn identical_specs_give_identical_csv() {
    for d in [1, 3] {
        let spec = potential_spec(d, 1.0, 11);
        assert_eq!(csv_bytes(&spec), csv_bytes(&spec));
    }
    assert_ne!(
        csv_bytes(&potential_spec(3, 1.0, 11)),
        csv_bytes(&potential_spec(3, 1.0, 12))
    );
}

#[test]
fn refined_grid_reuses_the_coarse_pairs() {
    let coarse = run_sweep(&potential_spec(2, 1.0, 5)).unwrap();
    let fine = run_sweep(&potential_spec(2, 1.0, 5).refined()).unwrap();
    let key = |r: &hermite_potential::harness::SweepRow| {
        (
            r.u.unwrap().to_bits(),
            r.xnorm.unwrap().to_bits() ^ r.ynorm.unwrap().to_bits(),
        )
    };
    let fine_keys: std::collections::HashSet<_> = fine.iter().map(key).collect();
    assert!(coarse.iter().all(|r| fine_keys.contains(&key(r))));
}

#[test]
fn sweep_rows_are_in_grid_order() {
    let spec = SweepSpec {
        pairs: PairSampling::RandomWithExtremes,
        ..potential_spec(2, 1.0, 3)
    };
    let rows = run_sweep(&spec).unwrap();
    assert!(rows.windows(2).all(|w| w[0].grid_idx < w[1].grid_idx));
    assert!(rows
        .iter()
        .all(|r| r.u.unwrap() <= r.xnorm.unwrap() + r.ynorm.unwrap()));
}

#[test]
fn calibration_examples() {
    let i = SweepSpec::new(SweepTarget::IIntegral)
        .axis(AxisName::A, AxisRange::values(vec![0.0]))
        .axis(AxisName::Gamma, AxisRange::values(vec![1.0]))
        .axis(AxisName::T, AxisRange::log(1.0, 50.0, 40));
    let c = sweep_report(&i).unwrap().calibration.unwrap();
    assert!(
        (c.c1 - 1.0).abs() < 1e-3 && (c.c2 - 1.0).abs() < 1e-3 && c.c <= 1.001,
        "{c:?}"
    );

    let report = sweep_report(&potential_spec(1, 0.25, 0)).unwrap();
    let c = report.calibration.clone().unwrap();
    assert!(c.c.is_finite() && c.c2 > 0.0 && c.c2 <= c.c1, "{c:?}");
    assert!(report.verdict.passed());
}

#[test]
fn small_sweeps_are_reported_without_calibration() {
    let spec = SweepSpec::new(SweepTarget::L1Norm)
        .kernel(kp(1, 0.5))
        .axis(AxisName::Xnorm, AxisRange::values(vec![0.0, 1.0]));
    let report = sweep_report(&spec).unwrap();
    assert!(report.calibration.is_none() && report.checks.is_empty());
    assert_eq!(report.rows.len(), 2);
}

#[test]
fn reports_round_trip_through_json() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let spec = SweepSpec {
        input: Some(RadialInput::Ball { radius: 1.0 }),
        ..SweepSpec::new(SweepTarget::OperatorSample).kernel(kp(2, 0.5))
    }
    .axis(AxisName::Xnorm, AxisRange::linear(0.0, 3.0, 25));
    let sweep = sweep_report(&spec).unwrap();
    let ce = run_counterexample(
        &CounterexampleSpec::new(CounterexampleKind::B, kp(1, 0.25)).exponents(0.2, 0.7),
        &QuadConfig::with_rel_tol(1e-8),
    )
    .unwrap();
    for (k, report) in [sweep, ce].iter().enumerate() {
        let path = dir.join(format!("r{k}.json"));
        let path = path.to_str().unwrap();
        emit(report, Format::Json, path).unwrap();
        let back: ExperimentReport =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(&back, report);
        assert_eq!(back.schema, 1);
    }
    let params = RegionParams::from_kernel(&kp(4, 1.0)).unwrap();
    let region = RegionReport::new(4, 1.0, params, &raster(&params, 10).unwrap());
    let path = dir.join("region.json");
    emit_region(&region, Format::Json, path.to_str().unwrap()).unwrap();
    let back: RegionReport =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, region);
}

#[test]
fn region_csv_has_one_row_per_grid_point() {
    let params = RegionParams::exact(4, 1, 1).unwrap();
    let report = RegionReport::new(4, 1.0, params, &raster(&params, 10).unwrap());
    let mut buf = Vec::new();
    write_region_csv(&report.rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 101);
    assert!(text.lines().skip(1).all(|l| l.split(',').count() == 8));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sweep_csv_round_trips(a in -3.0f64..3.0, t in 1e-3f64..30.0, n in 1usize..6) {
        let spec = SweepSpec::new(SweepTarget::IIntegral)
            .axis(AxisName::A, AxisRange::values(vec![a]))
            .axis(AxisName::Gamma, AxisRange::values(vec![1.0]))
            .axis(AxisName::T, AxisRange::log(t, 2.0 * t, n));
        let rows = run_sweep(&spec).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let back = read_sweep_csv(buf.as_slice()).unwrap();
        let strip = |r: &hermite_potential::harness::SweepRow| { let mut r = r.clone(); r.case_tag = None; r };
        prop_assert_eq!(back, rows.iter().map(strip).collect::<Vec<_>>());
    }
}
