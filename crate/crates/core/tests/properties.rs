use proptest::prelude::*;
use rrm::entanglement::{
    branch_value, f_min, f_min_oracle, oracle_feasible_limit, schmidt_verdict, second_moment_cap, Branch,
};
use rrm::ggm::real_count;
use rrm::haar;
use rrm::linalg::partial_transpose;
use rrm::moments::{exact_fourth_moment, exact_sector_moments, sector_sums};
use rrm::overlap::{gamma_for, validate_overlap_params, OverlapVariant};
use rrm::shadows::{global_orthogonal_channel, local_orthogonal_channel, random_matrix, symmetrization, Direction};
use rrm::tensor::correlation_tensor;
use rrm::zoo::{self, RandomKind};
use rrm::{CMatrix, Complex, DensityMatrix, DimSpec, GgmBasis, SeedPath};

fn dims() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((2, 2)), Just((3, 2)), Just((2, 3)), Just((4, 2))]
}

fn state(kind: RandomKind, d: usize, n: usize, seed: u64) -> DensityMatrix {
    let mut rng = SeedPath::new(seed, 0).rng();
    zoo::random_state(kind, DimSpec::new(d, n).unwrap(), &mut rng).unwrap()
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sector_sums_split_by_transpose((d, n) in dims(), seed in any::<u64>()) {
        let basis = GgmBasis::new(d).unwrap();
        let rho = state(RandomKind::MixedHs, d, n, seed);
        let (all, re, im) = sector_sums(&correlation_tensor(&rho, &basis).unwrap(), &basis);
        prop_assert!(re + im <= all + 1e-12);
        let sym = zoo::symmetrize(&rho).unwrap();
        let (all, re, im) = sector_sums(&correlation_tensor(&sym, &basis).unwrap(), &basis);
        if n == 2 {
            prop_assert!((all - re - im).abs() < 1e-10);
        } else {
            prop_assert!(re + im <= all + 1e-12);
        }
    }

    #[test]
    fn local_orthogonal_invariance((d, n) in dims(), seed in any::<u64>()) {
        let basis = GgmBasis::new(d).unwrap();
        let rho = state(RandomKind::MixedHs, d, n, seed);
        let mut rng = SeedPath::new(seed, 1).rng();
        let os = zoo::random_local_orthogonals::<f64, _>(d, n, &mut rng);
        let rot = rho.conjugate_local(&os).unwrap();
        let t0 = correlation_tensor(&rho, &basis).unwrap();
        let t1 = correlation_tensor(&rot, &basis).unwrap();
        let (a, b) = (exact_sector_moments(&t0, &basis), exact_sector_moments(&t1, &basis));
        prop_assert!((a.q2 - b.q2).abs() < 1e-10);
        prop_assert!((a.qhat2 - b.qhat2).abs() < 1e-10);
        prop_assert!((a.r2 - b.r2).abs() < 1e-10);
        if n == 2 {
            let (q0, q1) = (exact_fourth_moment(&t0, &basis).unwrap(), exact_fourth_moment(&t1, &basis).unwrap());
            prop_assert!((q0 - q1).abs() < 1e-10);
        }
    }

    #[test]
    fn local_unitary_invariance_of_r2((d, n) in dims(), seed in any::<u64>()) {
        let basis = GgmBasis::new(d).unwrap();
        let rho = state(RandomKind::MixedHs, d, n, seed);
        let mut rng = SeedPath::new(seed, 2).rng();
        let us: Vec<CMatrix> = (0..n).map(|_| haar::unitary(d, &mut rng)).collect();
        let r0 = exact_sector_moments(&correlation_tensor(&rho, &basis).unwrap(), &basis).r2;
        let r1 = exact_sector_moments(&correlation_tensor(&rho.conjugate_local(&us).unwrap(), &basis).unwrap(), &basis).r2;
        prop_assert!((r0 - r1).abs() < 1e-10);
    }

    #[test]
    fn tensor_round_trip((d, n) in dims(), seed in any::<u64>()) {
        let rho = state(RandomKind::MixedHs, d, n, seed);
        prop_assert!(zoo::tensor_round_trip_error(&rho).unwrap() < 1e-10);
    }

    #[test]
    fn inverse_undoes_forward((d, n) in dims(), seed in any::<u64>()) {
        let dims = DimSpec::new(d, n).unwrap();
        let mut rng = SeedPath::new(seed, 3).rng();
        let x: CMatrix = random_matrix(dims.total(), &mut rng);
        let g = global_orthogonal_channel(&global_orthogonal_channel(&x, Direction::Forward, n, d).unwrap(), Direction::Inverse, n, d).unwrap();
        prop_assert!(max_abs(&(g - symmetrization(&x))) < 1e-12);
        let l = local_orthogonal_channel(&local_orthogonal_channel(&x, Direction::Forward, dims).unwrap(), Direction::Inverse, dims).unwrap();
        let mut want = x.clone();
        for site in 0..n {
            let pt = partial_transpose(&want, &dims.local_dims(), &[site]).unwrap();
            want = (want + pt) * Complex::new(0.5, 0.0);
        }
        prop_assert!(max_abs(&(l - want)) < 1e-12);
    }

    #[test]
    fn f_min_matches_oracle_and_orders(d in 3usize..=4, frac in 0.0f64..=1.0) {
        for x in 1..=d {
            let top = second_moment_cap(x, d).min(oracle_feasible_limit(x, d).unwrap());
            let y = frac * top;
            let f = f_min(x, y, d).unwrap();
            prop_assert!((f - f_min_oracle(x, y, d).unwrap()).abs() < 1e-6);
            prop_assert!(f >= branch_value(x, y, d, Branch::Uniform) - 1e-12);
            if x < d {
                prop_assert!(f_min(x + 1, y, d).unwrap() <= f + 1e-12);
            }
        }
    }

    #[test]
    fn products_are_never_certified(d in 2usize..=4, seed in any::<u64>()) {
        let rho = state(RandomKind::Product, d, 2, seed);
        let (c2, c4) = zoo::rrm_point(&rho).unwrap();
        prop_assert_eq!(schmidt_verdict(c2, c4, d).unwrap().certified_sn_lower_bound, 1);
    }

    #[test]
    fn overlap_constraint_solutions_validate(d in 2usize..=6, a1 in -2.0f64..2.0, a2 in -2.0f64..2.0, b1 in -2.0f64..2.0) {
        let sa = a1 + a2;
        let denom = (d as f64 + 1.0) * sa - 2.0 * a2;
        prop_assume!(denom.abs() > 1e-3);
        let b2 = b1 * (2.0 * a1 - (d as f64 + 1.0) * sa) / denom;
        let g = gamma_for(a1, a2, b1, b2, d);
        prop_assume!(g.abs() > 1e-8 && (b1.abs() + b2.abs()) < 1e3);
        let p = validate_overlap_params(a1, a2, b1, b2, d, OverlapVariant::Global).unwrap();
        prop_assert!((p.gamma - g).abs() < 1e-12);
        prop_assert!(validate_overlap_params(a1, a2, b1, b2 + 0.1, d, OverlapVariant::Global).is_err() || sa.abs() < 1e-9);
    }
}

#[test]
fn seeded_streams_are_reproducible() {
    use rand::Rng;
    let a: Vec<u64> = (0..5).map(|_| SeedPath::new(11, 4).rng().random()).collect();
    assert!(a.windows(2).all(|w| w[0] == w[1]));
    let mut r1 = SeedPath::new(11, 4).rng();
    let mut r2 = SeedPath::new(11, 5).rng();
    assert_ne!(r1.random::<u64>(), r2.random::<u64>());
}

#[test]
fn branch_boundaries_are_continuous() {
    for d in 3..=5 {
        let l = real_count(d);
        for x in 1..=d {
            let cap = second_moment_cap(x, d);
            for n in 1..l {
                let y = cap / (n + 1) as f64;
                let left = if n + 1 == l {
                    Branch::Uniform
                } else {
                    Branch::Grouped(n + 1)
                };
                let jump = branch_value(x, y, d, left) - branch_value(x, y, d, Branch::Grouped(n));
                assert!(jump.abs() < 1e-9, "d={d} x={x} n={n} jump={jump}");
            }
        }
    }
}
