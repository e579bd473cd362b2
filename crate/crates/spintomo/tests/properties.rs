//! Randomized invariants: probability identities under arbitrary geometry,
//! rotational covariance, and scheme round trips.

use proptest::prelude::*;

use spintomo::scattering::{
    probability_closed_form, probability_trace, Channel, Kappa, MeasurementSetup,
};
use spintomo::spin_algebra::{bloch_to_density, pauli_dot, BlochVector, UnitDirection, Vec3};
use spintomo::tomography::{
    invert_scheme, strategy1_frame_scheme, strategy1_parallel_scheme, strategy2_scheme,
};

fn direction() -> impl Strategy<Value = UnitDirection> {
    // uniform on the sphere via cos(theta) and phi
    (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(cos_t, phi)| {
        let sin_t = (1.0 - cos_t * cos_t).sqrt();
        UnitDirection::from_components(sin_t * phi.cos(), sin_t * phi.sin(), cos_t).unwrap()
    })
}

fn bloch() -> impl Strategy<Value = BlochVector> {
    // uniform in the ball via a cube-root radial profile
    (direction(), 0.0f64..1.0).prop_map(|(n, u)| {
        BlochVector::new(n.as_vec3().scaled(u.cbrt())).unwrap()
    })
}

fn wave_number() -> impl Strategy<Value = Kappa> {
    // log-uniform over three decades
    (-1.0f64..2.0).prop_map(|e| Kappa::new(10f64.powf(e)).unwrap())
}

fn channel() -> impl Strategy<Value = Channel> {
    prop_oneof![Just(Channel::Transmission), Just(Channel::Reflection)]
}

proptest! {
    #[test]
    fn closed_form_matches_trace_oracle(
        n_i in direction(),
        n_f in direction(),
        kappa in wave_number(),
        ch in channel(),
        v in bloch(),
    ) {
        let setup = MeasurementSetup { n_i, n_f, kappa, channel: ch };
        let closed = probability_closed_form(&setup, &v);
        let traced = probability_trace(&setup, &bloch_to_density(&v)).unwrap();
        prop_assert!((closed - traced).abs() < 1e-12);
    }

    #[test]
    fn four_outcomes_sum_to_one(
        n_i in direction(),
        n_f in direction(),
        kappa in wave_number(),
        v in bloch(),
    ) {
        let mut sum = 0.0;
        for ch in [Channel::Transmission, Channel::Reflection] {
            for detect in [n_f, -n_f] {
                let setup = MeasurementSetup { n_i, n_f: detect, kappa, channel: ch };
                sum += probability_closed_form(&setup, &v);
            }
        }
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probabilities_are_rotation_covariant(
        n_i in direction(),
        n_f in direction(),
        axis in direction(),
        angle in 0.0f64..std::f64::consts::TAU,
        kappa in wave_number(),
        ch in channel(),
        v in bloch(),
    ) {
        // the coupling is isotropic, so rotating every vector together
        // leaves all probabilities unchanged
        let rot_dir = |n: UnitDirection| {
            UnitDirection::new(n.as_vec3().rotated(axis, angle)).unwrap()
        };
        let before = probability_closed_form(
            &MeasurementSetup { n_i, n_f, kappa, channel: ch },
            &v,
        );
        let after = probability_closed_form(
            &MeasurementSetup { n_i: rot_dir(n_i), n_f: rot_dir(n_f), kappa, channel: ch },
            &BlochVector::new(v.as_vec3().rotated(axis, angle)).unwrap(),
        );
        prop_assert!((before - after).abs() < 1e-10);
    }

    #[test]
    fn pauli_projection_squares_to_identity(n in direction()) {
        let s = pauli_dot(n);
        let diff = (s * s).max_abs_diff(&spintomo::spin_algebra::Complex2x2::identity());
        prop_assert!(diff < 1e-14);
    }

    #[test]
    fn frame_scheme_round_trips(
        cos_t in -1.0f64..1.0,
        phi in 0.0f64..std::f64::consts::TAU,
        psi in 0.0f64..std::f64::consts::TAU,
        kappa in wave_number(),
        ch in channel(),
        v in bloch(),
    ) {
        // build an orthonormal pair (n_i, n_1) from Euler-like angles
        let sin_t = (1.0 - cos_t * cos_t).sqrt();
        let n_i = UnitDirection::from_components(
            sin_t * phi.cos(), sin_t * phi.sin(), cos_t,
        ).unwrap();
        let seed = if n_i.as_vec3().z.abs() < 0.9 {
            Vec3::new(0.0, 0.0, 1.0)
        } else {
            Vec3::new(1.0, 0.0, 0.0)
        };
        let u = UnitDirection::new(n_i.as_vec3().cross(seed)).unwrap();
        let n_1 = UnitDirection::new(
            u.as_vec3().scaled(psi.cos())
                + n_i.as_vec3().cross(u.as_vec3()).scaled(psi.sin()),
        ).unwrap();

        let scheme = strategy1_frame_scheme(n_i, n_1, kappa, ch).unwrap();
        let rec = invert_scheme(&scheme, scheme.probabilities(&v)).unwrap();
        prop_assert!((rec.v_raw - v.as_vec3()).norm() < 1e-9);
    }

    #[test]
    fn parallel_scheme_round_trips(
        kappa in wave_number(),
        ch in channel(),
        v in bloch(),
    ) {
        let axes = [
            UnitDirection::x_axis(),
            UnitDirection::y_axis(),
            UnitDirection::z_axis(),
        ];
        let scheme = strategy1_parallel_scheme(axes, kappa, ch).unwrap();
        let rec = invert_scheme(&scheme, scheme.probabilities(&v)).unwrap();
        prop_assert!((rec.v_raw - v.as_vec3()).norm() < 1e-9);
    }

    #[test]
    fn momentum_scheme_round_trips(
        kappa in -0.5f64..1.0,
        ratio in 1.3f64..5.0,
        v in bloch(),
    ) {
        let k1 = Kappa::new(10f64.powf(kappa)).unwrap();
        let k2 = Kappa::new(k1.get() * ratio).unwrap();
        let scheme = strategy2_scheme(
            UnitDirection::z_axis(),
            UnitDirection::x_axis(),
            k1,
            k2,
        ).unwrap();
        let rec = invert_scheme(&scheme, scheme.probabilities(&v)).unwrap();
        prop_assert!((rec.v_raw - v.as_vec3()).norm() < 1e-8);
    }
}
