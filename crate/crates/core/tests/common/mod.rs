//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use num_complex::Complex;
use squeezebeam::dynamics::{solve_probe_envelope, AtomicOperator, Propagator};
use squeezebeam::model::{Calibration, HBAR};
use squeezebeam::{ComplexField, DerivativeScheme, DetectorSpec, Grid, Model, PhysicalParams};

/// Small, fast configuration document on a 256-point grid.
pub fn small_config(mode: &str, values: &[f64], t_final: f64) -> String {
    serde_json::json!({
        "grid": { "x_min": -60e-6, "x_max": 90e-6, "n": 256 },
        "evolution": { "dt": 1e-7, "t_final": t_final },
        "experiment": { "mode": mode, "values": values },
    })
    .to_string()
}

/// Outcome of the momentum-shift comparison.
pub struct ShiftComparison {
    pub relative_error: f64,
    pub peak_density: f64,
}

/// Evolves the momentum-shifted equations with the library propagator and
/// the unshifted equations `ψ = e^{ikx} g` with an independent RK4 loop,
/// then compares `|g|²` with `|ψ|²`.
///
/// The grid is periodic with 256 points; `k` is an integer multiple of the
/// grid wavenumber spacing so that the plane wave is periodic.
pub fn shift_equivalence(steps: usize, dt: f64) -> ShiftComparison {
    let grid = Grid::new(-60e-6, 90e-6, 256).unwrap();
    let harmonics = 20.0;
    let k = 2.0 * std::f64::consts::PI * harmonics / grid.length();
    let mut params = PhysicalParams::reference().with_pump_rabi(2.1e12);
    // counter-propagating beams transfer k = 4π/λ
    params.wavelength = 4.0 * std::f64::consts::PI / k;
    params.calibration = Calibration::Fixed(1.0);
    let detector = DetectorSpec { x1: 40e-6, x2: 60e-6, probe_window: 20e-6 };
    let model = Model::new(params, grid, detector).unwrap();
    assert!((model.momentum_transfer() / k - 1.0).abs() < 1e-12);

    let mut prop = Propagator::new(&model, DerivativeScheme::Spectral, dt);
    let mut shifted = prop.initial_state();
    for _ in 0..steps {
        prop.step(&mut shifted);
    }

    let n = grid.len();
    let plane: Vec<Complex<f64>> = grid.positions().map(|x| Complex::from_polar(1.0, k * x)).collect();
    let recoil = HBAR * k * k / (2.0 * params.mass);
    let mut op = AtomicOperator::new(&grid, params.mass, 0.0, model.drive_frame_constant() - recoil, DerivativeScheme::Spectral);
    let omega = model.coupling().values().to_vec();
    let mut rhs = |psi: &[Complex<f64>]| -> Vec<Complex<f64>> {
        let g: Vec<_> = psi.iter().zip(&plane).map(|(a, e)| a * e.conj()).collect();
        let p = solve_probe_envelope(&ComplexField::from_values(grid, g).unwrap(), &model, 0.0).field;
        let mut lpsi = vec![Complex::default(); n];
        op.apply(psi, &mut lpsi);
        (0..n)
            .map(|j| -Complex::<f64>::i() * (lpsi[j] - omega[j] * plane[j] * p.values()[j]))
            .collect()
    };
    let axpy = |y: &[Complex<f64>], k: &[Complex<f64>], h: f64| -> Vec<Complex<f64>> {
        y.iter().zip(k).map(|(a, b)| a + b * h).collect()
    };
    let mut psi = vec![Complex::default(); n];
    for _ in 0..steps {
        let k1 = rhs(&psi);
        let k2 = rhs(&axpy(&psi, &k1, dt / 2.0));
        let k3 = rhs(&axpy(&psi, &k2, dt / 2.0));
        let k4 = rhs(&axpy(&psi, &k3, dt));
        for j in 0..n {
            psi[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (dt / 6.0);
        }
    }

    let peak = shifted.g.intensity().into_iter().fold(0.0, f64::max);
    let worst = shifted
        .g
        .iter()
        .zip(&psi)
        .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
        .fold(0.0, f64::max);
    ShiftComparison {
        relative_error: worst / peak,
        peak_density: peak,
    }
}
