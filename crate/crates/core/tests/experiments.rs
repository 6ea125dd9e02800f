use dcmi::experiments::{run_sweep, run_table1, SweepSpec, SweptParam};
use dcmi::BenchmarkDistribution;

#[test]
fn null_stays_below_signal() {
    let spec = SweepSpec {
        replicates: 20,
        n: 500,
        ..SweepSpec::new(
            BenchmarkDistribution::gaussian(0.0, 1.0).unwrap(),
            SweptParam::YM,
            vec![0.0, 1.0, 3.0],
            8,
        )
    };
    let res = run_sweep(&spec).unwrap();
    for p in &res.points {
        let null_mean = p.null_mean.unwrap();
        let null_std = p.null_std.unwrap();
        assert!(null_mean > 0.0 && null_mean < 0.02, "{null_mean}");
        if p.param > 0.0 {
            assert!(p.mean_mi > null_mean + 5.0 * null_std, "{p:?}");
        }
    }
    assert!((res.points[0].mean_mi - res.points[0].null_mean.unwrap()).abs() < 0.01);
}

#[test]
fn table_rows_are_significant() {
    let table = run_table1(2, 1000, 30, 1.06).unwrap();
    assert_eq!(table.rows.len(), 3);
    for r in &table.rows {
        assert!(r.z > 10.0, "{}: z={}", r.distribution.name(), r.z);
        assert!(r.observed_mi < 3f64.ln() - 2.0 / 3.0 * 2f64.ln());
    }
}
