use std::sync::Arc;

use proptest::prelude::*;
use radflow::io::{fmt, read_trajectory, write_trajectory};
use radflow::pipeline::run_evolution;
use radflow::RunConfig;
use radflow_core::{GridSpec, MetricProfile, SolverConfig, Stretching};

proptest! {
    #[test]
    fn floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}

#[test]
fn trajectory_file_round_trips_exactly() {
    let cfg = RunConfig {
        grid: GridSpec {
            intervals: 48,
            r_max: 30.0,
            stretching: Stretching::Sinh { scale: 4.0 },
        },
        solver: SolverConfig {
            t_end: 0.75,
            dt_out: 0.25,
            ..SolverConfig::default()
        },
        ..RunConfig::default()
    };
    let traj = run_evolution(&cfg).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let snaps: Vec<&MetricProfile> = traj.snapshots.iter().collect();
    write_trajectory(tmp.path(), &snaps).unwrap();
    let grid = Arc::clone(traj.grid());
    let back = read_trajectory(&tmp.path().join("trajectory.csv"), &grid, 3).unwrap();
    assert_eq!(back.snapshots.len(), traj.snapshots.len());
    for (a, b) in back.snapshots.iter().zip(&traj.snapshots) {
        assert_eq!(a.t(), b.t());
        assert_eq!(a.f(), b.f());
    }

    // a different grid is refused
    let other = Arc::new(
        GridSpec {
            intervals: 48,
            r_max: 31.0,
            stretching: Stretching::Sinh { scale: 4.0 },
        }
        .build()
        .unwrap(),
    );
    assert!(read_trajectory(&tmp.path().join("trajectory.csv"), &other, 3).is_err());
}
