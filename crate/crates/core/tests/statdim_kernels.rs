use certilab::objectives::{subdiff_description, ObjectiveCase, ObjectiveSpec, ACT_TOL};
use certilab::sensing::circle_mask;
use certilab::signals::Grid;
use certilab::statdim::{generic_dist_sq, DistanceOracle, SampleSet};
use proptest::prelude::*;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * (1.0 + b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coordinatewise_projection_matches_the_qp(
        case_idx in 0usize..3,
        support in proptest::collection::vec(0u8..3, 4..14),
        seed in any::<u64>(),
        tau in 0.05f64..3.0,
    ) {
        let case = [ObjectiveCase::F1, ObjectiveCase::F2, ObjectiveCase::F3][case_idx];
        let x: Vec<f64> = support
            .iter()
            .map(|&k| match (case, k) {
                (_, 0) => 0.0,
                (ObjectiveCase::F1, 1) => -0.8,
                _ => 1.0,
            })
            .collect();
        let spec = ObjectiveSpec::sparse(case, x.len()).unwrap();
        let sd = subdiff_description(&spec, &x, ACT_TOL).unwrap();
        let fast = DistanceOracle::new(&sd);
        let samples = SampleSet::new(x.len(), 4, seed);
        for i in 0..4 {
            let a = fast.dist_sq(samples.sample(i), tau).unwrap();
            let b = generic_dist_sq(&sd, samples.sample(i), tau).unwrap();
            prop_assert!(close(a, b), "{case:?}: {a} vs {b}");
        }
    }

    #[test]
    fn masked_image_kernel_matches_the_qp(
        case_idx in 0usize..3,
        blob in proptest::collection::vec(any::<bool>(), 36),
        seed in any::<u64>(),
        tau in 0.05f64..3.0,
    ) {
        let case = [ObjectiveCase::F4, ObjectiveCase::F5, ObjectiveCase::F6][case_idx];
        let mask = circle_mask(6);
        let grid = Grid::new(6, 6, Some(&mask)).unwrap();
        let full: Vec<f64> = blob
            .iter()
            .zip(&mask)
            .map(|(&b, &m)| match (m, b, case) {
                (false, _, _) => 0.0,
                (true, true, ObjectiveCase::F4) => -0.5,
                (true, true, _) => 1.0,
                (true, false, ObjectiveCase::F4) => 2.0,
                (true, false, _) => 0.0,
            })
            .collect();
        let x = grid.restrict(&full);
        let spec = ObjectiveSpec::with_analysis(case, grid.gradient_operator()).unwrap();
        let sd = subdiff_description(&spec, &x, ACT_TOL).unwrap();
        let fast = DistanceOracle::new(&sd);
        let samples = SampleSet::new(x.len(), 2, seed);
        for i in 0..2 {
            let a = fast.dist_sq(samples.sample(i), tau).unwrap();
            let b = generic_dist_sq(&sd, samples.sample(i), tau).unwrap();
            prop_assert!(close(a, b), "{case:?}: {a} vs {b}");
        }
    }
}

#[test]
fn full_grid_kernel_matches_the_qp() {
    let spec = ObjectiveSpec::tv_2d(ObjectiveCase::F4, 4, 5).unwrap();
    let x: Vec<f64> = (0..20).map(|k| if k % 4 < 2 && k / 4 < 3 { 1.0 } else { -0.3 }).collect();
    let sd = subdiff_description(&spec, &x, ACT_TOL).unwrap();
    let fast = DistanceOracle::new(&sd);
    let samples = SampleSet::new(20, 10, 5);
    for i in 0..10 {
        for tau in [0.2, 0.9, 2.5] {
            let a = fast.dist_sq(samples.sample(i), tau).unwrap();
            let b = generic_dist_sq(&sd, samples.sample(i), tau).unwrap();
            assert!(close(a, b), "{a} vs {b}");
        }
    }
}
