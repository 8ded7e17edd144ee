mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use telechan::dynamics::{lindblad_rhs, ChannelParams, EnvKind, EnvironmentSpec};
use telechan::metrics::{concurrence, concurrence_spin_flip_eigs, concurrence_x, purity};
use telechan::qcore::{bloch_of, kron, pure_to_density, DensityMatrix, Mat2, PureQubit};
use telechan::teleport::{
    average_fidelity, average_fidelity_quadrature, bell_overlaps, bloch_coefficients, fidelity,
    fidelity_closed_form, fully_entangled_fraction, output_state, TeleportReport,
};

fn mat2() -> impl Strategy<Value = Mat2> {
    proptest::array::uniform8(-2.0..2.0f64).prop_map(|v| {
        let mut m = Mat2::zeros();
        for k in 0..4 {
            m[(k / 2, k % 2)] = common::c(v[2 * k], v[2 * k + 1]);
        }
        m
    })
}

fn seed() -> impl Strategy<Value = u64> {
    any::<u64>()
}

fn qubit() -> impl Strategy<Value = PureQubit> {
    (0.0..=std::f64::consts::PI, 0.0..std::f64::consts::TAU)
        .prop_map(|(t, p)| PureQubit::new(t, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kron_mixed_product(a in mat2(), b in mat2(), c in mat2(), d in mat2()) {
        let lhs = kron(&a, &b) * kron(&c, &d);
        let rhs = kron(&(a * c), &(b * d));
        prop_assert!(lhs.approx_eq(&rhs, 1e-12));
    }

    #[test]
    fn bloch_vector_of_pure_state(q in qubit()) {
        let b = bloch_of(&pure_to_density(&q)).unwrap();
        let want = q.bloch();
        prop_assert!((b.norm() - 1.0).abs() < 1e-12);
        prop_assert!((b.x - want.x).abs() < 1e-12);
        prop_assert!((b.y - want.y).abs() < 1e-12);
        prop_assert!((b.z - want.z).abs() < 1e-12);
    }

    #[test]
    fn output_bloch_is_scaled_input(s in seed(), q in qubit(), m in 0usize..4) {
        let rho = common::random_density(&mut StdRng::seed_from_u64(s));
        let coeffs = bloch_coefficients(&bell_overlaps(&rho), m).unwrap();
        let out = bloch_of(&output_state(&rho, &q, m).unwrap()).unwrap();
        let inp = q.bloch();
        prop_assert!((out.x - coeffs[0] * inp.x).abs() < 1e-12);
        prop_assert!((out.y - coeffs[1] * inp.y).abs() < 1e-12);
        prop_assert!((out.z - coeffs[2] * inp.z).abs() < 1e-12);
    }

    #[test]
    fn fidelity_matches_closed_form(s in seed(), q in qubit(), m in 0usize..4) {
        let rho = common::random_density(&mut StdRng::seed_from_u64(s));
        let chi = bell_overlaps(&rho);
        let f = fidelity(&q, &output_state(&rho, &q, m).unwrap());
        prop_assert!((f - fidelity_closed_form(&chi, m, &q).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn overlaps_form_a_distribution(s in seed()) {
        let rho = common::random_density(&mut StdRng::seed_from_u64(s));
        let chi = bell_overlaps(&rho).chi;
        prop_assert!(chi.iter().all(|c| *c >= -1e-12 && *c <= 1.0 + 1e-12));
        prop_assert!((chi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let (fef, m) = fully_entangled_fraction(&bell_overlaps(&rho));
        prop_assert!(chi.iter().all(|c| *c <= fef));
        prop_assert!(chi[..m].iter().all(|c| *c < fef));
        let report = TeleportReport::new(&rho, None).unwrap();
        prop_assert!(report.avg_fidelity_per_m.iter().all(|f| *f <= report.max_avg_fidelity + 1e-15));
    }

    #[test]
    fn concurrence_and_purity_ranges(s in seed()) {
        let rho = common::random_density(&mut StdRng::seed_from_u64(s));
        let c = concurrence(&rho).unwrap();
        let p = purity(&rho);
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert!((0.25 - 1e-12..=1.0 + 1e-12).contains(&p));
        prop_assert!((c - concurrence_spin_flip_eigs(&rho).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn concurrence_is_local_unitary_invariant(s in seed()) {
        let mut rng = StdRng::seed_from_u64(s);
        let rho = common::random_density(&mut rng);
        let u = kron(&common::random_unitary(&mut rng), &common::random_unitary(&mut rng));
        let rotated = DensityMatrix::new(u * *rho.mat() * u.dagger()).unwrap();
        prop_assert!((concurrence(&rho).unwrap() - concurrence(&rotated).unwrap()).abs() < 1e-10);
        prop_assert!((purity(&rho) - purity(&rotated)).abs() < 1e-12);
    }

    #[test]
    fn x_state_shortcut_matches_general_concurrence(s in seed()) {
        let x = common::random_x_state(&mut StdRng::seed_from_u64(s));
        let rho = x.to_density().unwrap();
        prop_assert!((concurrence(&rho).unwrap() - concurrence_x(&x).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn generator_preserves_trace_and_hermiticity(
        s in seed(), j in -2.0..2.0f64, d in -2.0..2.0f64, g in 0.0..1.0f64, k in 0usize..3,
    ) {
        let rho = common::random_density(&mut StdRng::seed_from_u64(s));
        let p = ChannelParams::new(j, d).unwrap();
        let env = EnvironmentSpec::new(EnvKind::ALL[k], g).unwrap();
        let dr = lindblad_rhs(&rho, &p, &env);
        prop_assert!(dr.trace().norm() < 1e-13);
        prop_assert!(dr.hermiticity_defect() < 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quadrature_converges_to_average_fidelity(s in seed(), m in 0usize..4, n in 8usize..40) {
        let rho = common::random_density(&mut StdRng::seed_from_u64(s));
        let q = average_fidelity_quadrature(&rho, m, n, n).unwrap();
        let exact = average_fidelity(&bell_overlaps(&rho), m).unwrap();
        prop_assert!((q - exact).abs() <= 1.0 / (n * n) as f64, "n={} gap {:e}", n, q - exact);
    }
}
