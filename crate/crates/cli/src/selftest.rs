//! Oracle cross-checks run by `certilab selftest`.

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::Serialize;

use certilab::certify::{
    certify_general, certify_specialized, descent_cone_oracle, recover, strict_feasibility, CertifyMethod,
    StrictSystem, Verdict, DEFAULT_EPS,
};
use certilab::linalg::DenseMatrix;
use certilab::objectives::{ObjectiveCase, ObjectiveSpec};
use certilab::rng::{mix_seed, rng_from_seed, Rng};
use certilab::sensing::gaussian_matrix;
use certilab::solver::FEAS_TOL;
use certilab::statdim::{j_approx, j_closed_form};

#[derive(Serialize)]
pub struct Suite {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

#[derive(Serialize)]
pub struct Report {
    pub passed: bool,
    pub suites: Vec<Suite>,
}

pub fn run(quick: bool, seed: u64) -> Report {
    let scale = if quick { 1 } else { 10 };
    let suites = vec![
        certificates(20 * scale, seed),
        strict_systems(50 * scale, seed),
        statdim_closed_form(if quick { 2_000 } else { 10_000 }, seed),
    ];
    let passed = suites.iter().all(|s| s.failures.is_empty());
    for s in &suites {
        eprintln!("{:<28} {:>5} cases {:>3} failures", s.name, s.cases, s.failures.len());
    }
    Report { passed, suites }
}

fn signal(rng: &mut Rng, case: ObjectiveCase, n: usize) -> Vec<f64> {
    let binary = case.is_box();
    let nonneg = matches!(case, ObjectiveCase::F2 | ObjectiveCase::F5);
    let draw = |rng: &mut Rng| -> f64 {
        if binary {
            return rng.random_range(0..2) as f64;
        }
        let v: f64 = rng.sample(StandardNormal);
        if nonneg {
            v.abs()
        } else {
            v
        }
    };
    if case.is_sparse() {
        (0..n).map(|_| if rng.random_bool(0.35) { draw(rng) } else { 0.0 }).collect()
    } else {
        let mut x = vec![draw(rng)];
        for _ in 1..n {
            let next = if rng.random_bool(0.7) { x[x.len() - 1] } else { draw(rng) };
            x.push(next);
        }
        x
    }
}

/// The ε-LP, the exact dual test, the case-specific test and the
/// descent-cone oracle must agree; unique instances must be recovered.
fn certificates(per_case: usize, seed: u64) -> Suite {
    let mut failures = Vec::new();
    let mut cases = 0;
    for (ci, &case) in ObjectiveCase::ALL.iter().enumerate() {
        for k in 0..per_case {
            let mut rng = rng_from_seed(mix_seed(seed, &[1, ci as u64, k as u64]));
            let n = rng.random_range(3..=10);
            let m = rng.random_range(1..=n);
            let spec = if case.is_sparse() { ObjectiveSpec::sparse(case, n) } else { ObjectiveSpec::tv_1d(case, n) };
            let Ok(spec) = spec else { continue };
            let x = signal(&mut rng, case, n);
            let Ok(a) = gaussian_matrix(m, n, rng.random()) else { continue };
            cases += 1;
            let tag = format!("{case:?} #{k}");
            let verdicts = (|| -> certilab::Result<(Verdict, Verdict, Verdict, bool)> {
                Ok((
                    certify_general(&a, &spec, &x, CertifyMethod::EpsilonLp, DEFAULT_EPS, FEAS_TOL)?.verdict,
                    certify_general(&a, &spec, &x, CertifyMethod::ExactDuality, DEFAULT_EPS, FEAS_TOL)?.verdict,
                    certify_specialized(&a, &spec, &x, DEFAULT_EPS, FEAS_TOL)?.verdict,
                    descent_cone_oracle(&a, &spec, &x, 1e-9)?,
                ))
            })();
            let (eps, exact, special, oracle) = match verdicts {
                Ok(v) => v,
                Err(e) => {
                    failures.push(format!("{tag}: {e}"));
                    continue;
                }
            };
            let truth = if oracle { Verdict::Unique } else { Verdict::NotUnique };
            if exact != truth || special != truth || (eps != Verdict::Indeterminate && eps != truth) {
                failures.push(format!("{tag}: eps {eps:?} exact {exact:?} specialized {special:?} oracle {truth:?}"));
                continue;
            }
            if truth == Verdict::Unique {
                match recover(&a, &a.matvec(&x), &spec, FEAS_TOL) {
                    Ok(xh) if xh.iter().zip(&x).all(|(p, q)| (p - q).abs() <= 1e-6) => {}
                    Ok(_) => failures.push(format!("{tag}: recovery missed the certified signal")),
                    Err(e) => failures.push(format!("{tag}: recovery failed: {e}")),
                }
            }
        }
    }
    Suite { name: "certificate agreement", cases, failures }
}

/// Systems with a planted strict interior point, or with a planted
/// alternative `M^T u + P^T v = 0`, `q^T u + d^T v <= 0`, `v >= 0`.
fn strict_systems(count: usize, seed: u64) -> Suite {
    let mut failures = Vec::new();
    for k in 0..count {
        let mut rng = rng_from_seed(mix_seed(seed, &[2, k as u64]));
        let n = rng.random_range(2..=6);
        let rows = rng.random_range(1..n);
        let l = rng.random_range(1..=6);
        let mut gauss = |r: usize, c: usize| DenseMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal));
        let p = gauss(l, n);
        let mut m = gauss(rows, n);
        let z0: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let pz = p.matvec(&z0);
        let feasible = k % 2 == 0;
        let d: Vec<f64> = if feasible {
            pz.iter().map(|v| v + rng.random_range(0.01..1.0)).collect()
        } else {
            let v: Vec<f64> =
                (0..l).map(|i| if i == 0 || rng.random_bool(0.5) { rng.random_range(0.1..1.0) } else { 0.0 }).collect();
            let w = p.tr_matvec(&v);
            m.row_mut(0).iter_mut().zip(&w).for_each(|(dst, wi)| *dst = -wi);
            pz.iter().zip(&v).map(|(&a, &vi)| if vi > 0.0 { a - rng.random_range(0.0..0.5) } else { a + 1.0 }).collect()
        };
        let q = m.matvec(&z0);
        match strict_feasibility(&StrictSystem { m, q, p, d }, FEAS_TOL) {
            Ok(got) if got == feasible => {}
            other => failures.push(format!("system #{k}: planted {feasible}, got {other:?}")),
        }
    }
    Suite { name: "strict feasibility", cases: count, failures }
}

/// Monte-Carlo `J` within four standard errors of the closed form.
fn statdim_closed_form(samples: usize, seed: u64) -> Suite {
    let mut failures = Vec::new();
    let mut cases = 0;
    let n = 60;
    for case in [ObjectiveCase::F1, ObjectiveCase::F2, ObjectiveCase::F3] {
        for s in [3, 12, 30] {
            let x: Vec<f64> = (0..n).map(|i| if i < s { 1.0 } else { 0.0 }).collect();
            let Ok(spec) = ObjectiveSpec::sparse(case, n) else { continue };
            for tau in [0.5, 1.5, 2.5] {
                cases += 1;
                let res = j_approx(&spec, &x, tau, samples, mix_seed(seed, &[3, s as u64]))
                    .and_then(|(mc, se)| Ok((mc, se, j_closed_form(case, n, s, tau)?)));
                match res {
                    Ok((mc, se, cf)) if (mc - cf).abs() <= 4.0 * se => {}
                    Ok((mc, se, cf)) => {
                        failures.push(format!("{case:?} s={s} tau={tau}: {mc:.3} vs {cf:.3} (se {se:.3})"))
                    }
                    Err(e) => failures.push(format!("{case:?} s={s} tau={tau}: {e}")),
                }
            }
        }
    }
    Suite { name: "statdim closed form", cases, failures }
}
