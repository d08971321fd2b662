use lightcone_core::linalg::{random_density, random_unitary};
use lightcone_core::lr::{c_chain_bessel, c_general};
use lightcone_core::sim::{fidelity, trace_distance, DensityMatrix};
use lightcone_core::task::{correlator_ceiling, spin_flip_ceiling, transfer_fidelity_floor};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pair(seed: u64, dim: usize) -> (DensityMatrix, DensityMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DensityMatrix::new(&[dim], random_density(dim, &mut rng)).unwrap();
    let b = DensityMatrix::new(&[dim], random_density(dim, &mut rng)).unwrap();
    (a, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bessel_coefficient_monotone(r in 1usize..30, t in 0.0f64..5.0, dt in 0.0f64..1.0) {
        let a = c_chain_bessel(1.0, t, r).unwrap().value;
        let b = c_chain_bessel(1.0, t + dt, r).unwrap().value;
        let further = c_chain_bessel(1.0, t, r + 1).unwrap().value;
        prop_assert!(a <= b * (1.0 + 1e-12) + 1e-300);
        prop_assert!(further <= a * (1.0 + 1e-12) + 1e-300);
        prop_assert!((0.0..=2.0).contains(&a));
    }

    #[test]
    fn general_coefficient_scales_with_source(x in 1usize..6, d in 1usize..6, t in 0.0f64..0.2, r in 3usize..20) {
        let one = c_general(1, d, 1.0, t, r).unwrap();
        let many = c_general(x, d, 1.0, t, r).unwrap();
        if !many.clamped {
            prop_assert!((many.value - x as f64 * one.value).abs() <= 1e-12 * many.value);
        }
    }

    #[test]
    fn fuchs_van_de_graaf(seed in any::<u64>(), dim in 2usize..6) {
        let (rho, sigma) = pair(seed, dim);
        let f = fidelity(&rho, &sigma).unwrap();
        let half_d = 0.5 * trace_distance(&rho, &sigma).unwrap();
        prop_assert!(1.0 - f <= half_d + 1e-9);
        prop_assert!(half_d <= (1.0 - f * f).max(0.0).sqrt() + 1e-9);
    }

    #[test]
    fn distances_unitarily_invariant(seed in any::<u64>(), dim in 2usize..5) {
        let (rho, sigma) = pair(seed, dim);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let u = random_unitary(dim, &mut rng);
        let (a, b) = (rho.conjugate(&u).unwrap(), sigma.conjugate(&u).unwrap());
        prop_assert!((fidelity(&rho, &sigma).unwrap() - fidelity(&a, &b).unwrap()).abs() < 1e-8);
        prop_assert!((trace_distance(&rho, &sigma).unwrap() - trace_distance(&a, &b).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn task_bounds_ordered(c in 0.0f64..2.0, dc in 0.0f64..0.5) {
        let lo = spin_flip_ceiling(c).unwrap().value;
        let hi = spin_flip_ceiling(c + dc).unwrap().value;
        prop_assert!(lo <= hi + 1e-15);
        prop_assert!(transfer_fidelity_floor(c + dc, 1.0).unwrap().value <= transfer_fidelity_floor(c, 1.0).unwrap().value);
        prop_assert!(correlator_ceiling(0.1, c, dc).unwrap().value >= 0.1);
    }
}
