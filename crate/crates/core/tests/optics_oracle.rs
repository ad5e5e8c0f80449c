use num_complex::Complex;
use proptest::prelude::*;
use squeezebeam::observables::{
    beam_statistics, fano, optical_moments, truncated_moments, FockState, OpticalStateSpec,
};

const DIM: usize = 60;

fn assert_close(spec: OpticalStateSpec<f64>) {
    let closed = optical_moments(&spec).unwrap();
    let oracle = truncated_moments(&spec, DIM).unwrap();
    assert!((closed.n_bar - oracle.n_bar).abs() < 1e-9, "{spec:?}: {closed:?} {oracle:?}");
    assert!((closed.bdag2b2 - oracle.bdag2b2).abs() < 1e-9, "{spec:?}: {closed:?} {oracle:?}");
}

#[test]
fn fock_states_match() {
    for n in 0..=10 {
        assert_close(OpticalStateSpec::Fock(n));
    }
}

#[test]
fn squeezed_vacuum_reference_point() {
    let spec = OpticalStateSpec::SqueezedCoherent {
        alpha: Complex::new(0.0, 0.0),
        r: 0.5,
        theta: 0.0,
    };
    let m = truncated_moments(&spec, DIM).unwrap();
    assert!((m.n_bar - 0.27154).abs() < 1e-5);
    assert!((m.bdag2b2 - 0.4928).abs() < 1e-4);
    assert!((fano(&m).unwrap() - 2.543).abs() < 1e-3);
}

#[test]
fn squeeze_quadrature_convention() {
    // ⟨b²⟩ = −e^{iθ} sinh r cosh r for S(ξ)|0⟩
    let (r, theta) = (0.35f64, 1.1f64);
    let s = FockState::vacuum(DIM).squeezed(Complex::from_polar(r, theta));
    let expect = -Complex::from_polar(r.sinh() * r.cosh(), theta);
    assert!((s.pair_coherence() - expect).norm() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coherent_matches_oracle(mag in 0.0f64..3.16, phase in 0.0f64..std::f64::consts::TAU) {
        assert_close(OpticalStateSpec::Coherent(Complex::from_polar(mag, phase)));
    }

    #[test]
    fn squeezed_coherent_matches_oracle(
        mag in 0.0f64..2.0,
        phase in 0.0f64..std::f64::consts::TAU,
        r in 0.0f64..0.5,
        theta in 0.0f64..std::f64::consts::TAU,
    ) {
        assert_close(OpticalStateSpec::SqueezedCoherent {
            alpha: Complex::from_polar(mag, phase),
            r,
            theta,
        });
    }

    #[test]
    fn variance_identities(n_g in 0.0f64..1.2, n_bar in 1e-3f64..50.0, excess in 0.0f64..100.0) {
        let m = optical_moments(&OpticalStateSpec::DirectMoments {
            n_bar,
            bdag2b2: (n_bar * n_bar - n_bar).max(0.0) + excess,
        })
        .unwrap();
        let s = beam_statistics(n_g, &m).unwrap();
        let v0 = fano(&m).unwrap();
        prop_assert_eq!(s.v, n_g * v0 + (1.0 - n_g));
        prop_assert_eq!(s.v_fock, 1.0 - n_g);
        prop_assert!((s.var_n - s.v * s.mean_n).abs() <= 1e-12 * s.var_n.abs().max(s.mean_n));
    }
}
