use squeezebeam::model::Calibration;
use squeezebeam::{run_scenario, DetectorSpec, Grid, Scenario32, Scenario64};

fn small<T: squeezebeam::Real>(label: &str) -> squeezebeam::Scenario<T> {
    let mut s = squeezebeam::Scenario::<T>::new(label);
    s.grid = Grid::new(T::from(-60e-6).unwrap(), T::from(90e-6).unwrap(), 256).unwrap();
    s.detector = DetectorSpec {
        x1: T::from(10e-6).unwrap(),
        x2: T::from(30e-6).unwrap(),
        probe_window: T::from(20e-6).unwrap(),
    };
    s.params.calibration = Calibration::Fixed(T::one());
    s.evolution.t_final = T::from(1.5e-3).unwrap();
    s
}

#[test]
fn f32_run_tracks_f64() {
    let s32: Scenario32 = small("f32");
    let s64: Scenario64 = small("f64");
    let a = run_scenario(&s32).unwrap();
    let b = run_scenario(&s64).unwrap();
    let (na, nb) = (a.final_point().stats.n_g, b.final_point().stats.n_g);
    assert!(nb > 1e-3, "beam reached the detector: {nb}");
    assert!((f64::from(na) - nb).abs() < 1e-3 * nb.max(1e-2), "f32 {na} vs f64 {nb}");
    let norm_a = f64::from(a.trajectory.steps.last().unwrap().norm);
    let norm_b = b.trajectory.steps.last().unwrap().norm;
    assert!((norm_a / norm_b - 1.0).abs() < 1e-3, "{norm_a} vs {norm_b}");
    assert!(a.trajectory.is_complete());
}
