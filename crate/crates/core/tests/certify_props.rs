use certilab::certify::{certify_general, certify_specialized, CertifyMethod, Verdict, DEFAULT_EPS};
use certilab::linalg::DenseMatrix;
use certilab::objectives::{ObjectiveCase, ObjectiveSpec};
use certilab::rng::rng_from_seed;
use certilab::sensing::gaussian_matrix;
use certilab::solver::FEAS_TOL;
use proptest::prelude::*;
use rand::Rng;

/// Gradient-sparse or sparse signal fitting `case`, `n` in 4..=10.
fn instance(case: ObjectiveCase, seed: u64) -> (ObjectiveSpec, Vec<f64>) {
    let mut rng = rng_from_seed(seed);
    let n = rng.random_range(4..=10);
    let binary = case.is_box();
    let nonneg = matches!(case, ObjectiveCase::F2 | ObjectiveCase::F5);
    let draw = |rng: &mut certilab::rng::Rng| -> f64 {
        if binary {
            return rng.random_range(0..2) as f64;
        }
        let v: f64 = rng.random_range(0.3..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        if nonneg {
            if rng.random_bool(0.3) {
                0.0
            } else {
                v.abs()
            }
        } else {
            v
        }
    };
    if case.is_sparse() {
        let x = (0..n).map(|_| if rng.random_bool(0.3) { draw(&mut rng) } else { 0.0 }).collect();
        (ObjectiveSpec::sparse(case, n).unwrap(), x)
    } else {
        let mut x = vec![draw(&mut rng)];
        for _ in 1..n {
            let v = if rng.random_bool(0.75) { x[x.len() - 1] } else { draw(&mut rng) };
            x.push(v);
        }
        (ObjectiveSpec::tv_1d(case, n).unwrap(), x)
    }
}

fn case_strategy() -> impl Strategy<Value = ObjectiveCase> {
    prop::sample::select(ObjectiveCase::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    /// Extra rows only shrink `N(A)`.
    #[test]
    fn appending_rows_keeps_uniqueness(case in case_strategy(), seed in any::<u64>(), extra in 1usize..4) {
        let (spec, x) = instance(case, seed);
        let n = spec.n();
        let m = 1 + (seed as usize % n);
        let a = gaussian_matrix(m, n, seed ^ 0xa5a5).unwrap();
        let more = gaussian_matrix(extra, n, seed ^ 0x5a5a).unwrap();
        let bigger = DenseMatrix::vstack(&[&a, &more]).unwrap();
        for method in [CertifyMethod::ExactDuality, CertifyMethod::EpsilonLp] {
            let before = certify_general(&a, &spec, &x, method, DEFAULT_EPS, FEAS_TOL).unwrap().verdict;
            let after = certify_general(&bigger, &spec, &x, method, DEFAULT_EPS, FEAS_TOL).unwrap().verdict;
            if before == Verdict::Unique {
                prop_assert_ne!(after, Verdict::NotUnique, "{:?} lost uniqueness", method);
            }
        }
    }

    /// Witnesses attached to unique verdicts satisfy the certificate relations.
    #[test]
    fn witnesses_are_valid(case in case_strategy(), seed in any::<u64>()) {
        let (spec, x) = instance(case, seed);
        let n = spec.n();
        let m = 1 + (seed as usize % n);
        let a = gaussian_matrix(m, n, seed ^ 0x1234).unwrap();
        let results = [
            certify_general(&a, &spec, &x, CertifyMethod::EpsilonLp, DEFAULT_EPS, FEAS_TOL).unwrap(),
            certify_general(&a, &spec, &x, CertifyMethod::ExactDuality, DEFAULT_EPS, FEAS_TOL).unwrap(),
            certify_specialized(&a, &spec, &x, DEFAULT_EPS, FEAS_TOL).unwrap(),
        ];
        for r in &results {
            if r.verdict == Verdict::Unique {
                let w = r.witness.as_ref();
                prop_assert!(w.is_some(), "{:?} gave no witness", r.method);
                let v = r.witness_violation(&a, &spec, &x).unwrap();
                prop_assert!(v <= 1e-6, "{:?} witness violation {}", r.method, v);
                prop_assert!(w.unwrap().t_star < 1.0);
            }
        }
    }
}

#[test]
fn square_gaussian_systems_are_always_unique() {
    for case in ObjectiveCase::ALL {
        for seed in 0..10 {
            let (spec, x) = instance(case, seed);
            let a = gaussian_matrix(spec.n(), spec.n(), seed).unwrap();
            let r = certify_general(&a, &spec, &x, CertifyMethod::EpsilonLp, DEFAULT_EPS, FEAS_TOL).unwrap();
            assert_eq!(r.verdict, Verdict::Unique, "{case:?} seed {seed}");
        }
    }
}
