//! Halving the grid spacing must not make the hull comparison worse by more
//! than 10%.

use wsupport::verify::{run_scenario, VerifyConfig};

fn distances(name: &str, config: &VerifyConfig) -> Vec<f64> {
    run_scenario(name, config).unwrap().reports.iter().map(|r| r.hausdorff_distance).collect()
}

fn check(name: &str, coarse: VerifyConfig, fine: VerifyConfig) {
    let a = distances(name, &coarse);
    let b = distances(name, &fine);
    for (d0, d1) in a.iter().zip(&b) {
        assert!(*d1 <= 1.1 * d0 + 1e-12, "{name}: {d0} -> {d1}");
    }
}

#[test]
fn rank_one_refinement() {
    for name in ["rank1-abc", "jacobi-1d", "bessel-1d"] {
        let coarse = VerifyConfig::default();
        let fine = VerifyConfig { points_1d: 2 * coarse.points_1d - 1, ..coarse.clone() };
        check(name, coarse, fine);
    }
}

#[test]
fn plane_refinement() {
    for name in ["calogero-A2", "theta-halfspace"] {
        let coarse = VerifyConfig::default();
        let fine = VerifyConfig { points_2d: 2 * coarse.points_2d - 1, ..coarse.clone() };
        check(name, coarse, fine);
    }
}
