use rrm::imaginarity::{estimate_imaginarity_gaps, imaginarity_gaps, ImagCondition};
use rrm::moments::{estimate_moments_mc, exact_moment, MeasurementKind};
use rrm::shadows::{local_orthogonal_ghz_bias, Ensemble, SnapshotSampler};
use rrm::zoo::{self, StateSpec};
use rrm::{DensityMatrix, DensityMatrixF32, Error};

#[test]
fn every_catalog_entry_builds_or_reports() {
    for name in zoo::CATALOG {
        let r: rrm::Result<DensityMatrix> =
            zoo::named_state(&StateSpec::new(name).with("p", 0.5).with("u", 0.8).with("k", 1.0));
        match r {
            Ok(rho) => assert!((rho.matrix().trace().re - 1.0).abs() < 1e-10, "{name}"),
            Err(e) => assert!(matches!(e, Error::NotPsd { .. }), "{name}: {e}"),
        }
    }
}

#[test]
fn f32_alias_tracks_f64() {
    let a: DensityMatrix = zoo::isotropic(3, 0.8).unwrap();
    let b: DensityMatrixF32 = zoo::isotropic(3, 0.8).unwrap();
    let qa = exact_moment(&a, MeasurementKind::Rrm, 2).unwrap();
    let qb = exact_moment(&b, MeasurementKind::Rrm, 2).unwrap();
    assert!((qa - qb).abs() < 1e-5, "{qa} vs {qb}");
}

#[test]
fn state_files_round_trip_on_disk() {
    let dir = std::env::temp_dir().join(format!("rrm-it-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("chess.json");
    let rho: DensityMatrix = zoo::chessboard(&zoo::detected_chessboard_params()).unwrap();
    rrm::io::write_state(&path, &rho).unwrap();
    let back: DensityMatrix = rrm::io::read_state(&path).unwrap();
    assert!((back.matrix() - rho.matrix()).norm() < 1e-15);
    assert!(matches!(
        rrm::io::read_state::<f64>(&dir.join("missing.json")),
        Err(Error::Io(_))
    ));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn mc_estimates_are_seed_deterministic() {
    let rho: DensityMatrix = zoo::isotropic(3, 0.7).unwrap();
    let a = estimate_moments_mc(&rho, MeasurementKind::Rm, &[2], 300, 50, 17).unwrap();
    let b = estimate_moments_mc(&rho, MeasurementKind::Rm, &[2], 300, 50, 17).unwrap();
    assert_eq!(a[0].value.to_bits(), b[0].value.to_bits());
}

#[test]
fn imaginarity_estimates_flag_the_correlated_row() {
    let rho: DensityMatrix = zoo::table1(1).unwrap();
    let exact = imaginarity_gaps(&rho).unwrap();
    let est = estimate_imaginarity_gaps(&rho, 4000, 3).unwrap();
    assert!((est.g_ab.value - exact.g_ab).abs() < 4.0 * est.g_ab.std_err + 1e-9);
    assert!(est.significant_conditions().contains(&ImagCondition::Correlation));
}

#[test]
fn local_orthogonal_shadows_show_the_ghz_bias() {
    // ½ + (f − ½)/16 for five qubits
    let target: DensityMatrix = zoo::ghz(5, 1.0).unwrap();
    for p in [0.0, 0.25] {
        let rho: DensityMatrix = zoo::noisy_ghz(5, p).unwrap();
        let s = SnapshotSampler::new(&rho, target.matrix(), Ensemble::LocalOrthogonal).unwrap();
        assert!(s.bias_warning());
        let n = 20_000;
        let xs: Vec<f64> = (0..n).map(|i| s.sample(rrm::SeedPath::new(41, i))).collect();
        let est = rrm::shadows::mean_and_se(&xs);
        let want = local_orthogonal_ghz_bias(1.0 - p, 5);
        assert!(
            (est.mean - want).abs() < 3.0 * est.std_err,
            "p={p}: {} vs {want}",
            est.mean
        );
    }
}

#[test]
fn global_orthogonal_shadows_are_unbiased_on_real_states() {
    let target: DensityMatrix = zoo::ghz(3, 1.0).unwrap();
    let rho: DensityMatrix = zoo::noisy_ghz(3, 0.3).unwrap();
    let s = SnapshotSampler::new(&rho, target.matrix(), Ensemble::GlobalOrthogonal).unwrap();
    assert!(!s.bias_warning());
    let xs: Vec<f64> = (0..20_000).map(|i| s.sample(rrm::SeedPath::new(42, i))).collect();
    let est = rrm::shadows::mean_and_se(&xs);
    assert!((est.mean - 0.7).abs() < 3.0 * est.std_err);
}
