//! Uniqueness certificates for `min f(x) s.t. A x = A x̄`.
//!
//! `x̄` is the unique minimizer iff
//! (i)  `N(A) ∩ N(D_Λ) ∩ N(Psi) = {0}` and
//! (ii) some `y, α, μ` satisfy `D^T α + Psi μ = A^T y` with
//!      `α_{Λᶜ} = sign(D_{Λᶜ} x̄)`, `|α_Λ| < 1` and `μ > 0`.
//!
//! Condition (ii) is decided either by an ε-relaxed LP or exactly through
//! the dual of a strict-feasibility system.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, nullspace_basis, stacked_full_column_rank, DenseMatrix, PivotedQr, RANK_TOL};
use crate::objectives::{subdiff_description, ObjectiveCase, ObjectiveSpec, SubdiffDescription, ACT_TOL};
use crate::solver::{solve_lp, LinearProgram, LpStatus};

/// Default ε of the relaxed LP.
pub const DEFAULT_EPS: f64 = 1e-8;

/// Cap on the homogenising variable of the ε-LP; keeps the LP bounded.
const THETA_CAP: f64 = 1e3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Unique,
    NotUnique,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertifyMethod {
    EpsilonLp,
    ExactDuality,
    Specialized,
}

/// `D^T α + Psi μ = A^T y`; `mu` is indexed like the active bounds.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub y: Vec<f64>,
    /// Full `α` over all rows of `D`.
    pub alpha: Vec<f64>,
    pub mu: Vec<f64>,
    pub t_star: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateResult {
    pub verdict: Verdict,
    pub condition_i: bool,
    pub method: CertifyMethod,
    /// Optimal `||α_Λ||_inf` of the ε-LP, when that LP was solved.
    pub t_star: Option<f64>,
    pub witness: Option<Witness>,
    pub diagnostic: Option<String>,
}

impl CertificateResult {
    fn new(verdict: Verdict, condition_i: bool, method: CertifyMethod) -> Self {
        Self { verdict, condition_i, method, t_star: None, witness: None, diagnostic: None }
    }

    fn indeterminate(method: CertifyMethod, condition_i: bool, why: String) -> Self {
        Self { diagnostic: Some(why), ..Self::new(Verdict::Indeterminate, condition_i, method) }
    }

    /// Residual of `D^T α + Psi μ - A^T y` and the checks of condition (ii).
    pub fn witness_violation(&self, a: &DenseMatrix, spec: &ObjectiveSpec, x: &[f64]) -> Result<f64> {
        let w = self.witness.as_ref().ok_or_else(|| Error::InvalidInput("no witness attached".into()))?;
        let sd = subdiff_description(spec, x, ACT_TOL)?;
        let mut lhs = spec.d.tr_matvec(&w.alpha);
        for (&(i, s), &m) in sd.ray_coords.iter().zip(&w.mu) {
            lhs[i] += s * m;
        }
        let aty = a.tr_matvec(&w.y);
        let mut worst = lhs.iter().zip(&aty).map(|(l, r)| (l - r).abs()).fold(0.0, f64::max);
        for (&j, &s) in sd.sets.cosupport_complement.iter().zip(&sd.signs) {
            worst = worst.max((w.alpha[j] - s).abs());
        }
        for &j in &sd.sets.cosupport {
            worst = worst.max(w.alpha[j].abs() - 1.0 + f64::EPSILON);
        }
        for &m in &w.mu {
            worst = worst.max(-m + f64::EPSILON);
        }
        Ok(worst.max(0.0))
    }
}

fn check_inputs(a: &DenseMatrix, spec: &ObjectiveSpec, x: &[f64]) -> Result<()> {
    if a.cols() != spec.n() || x.len() != spec.n() {
        return Err(Error::InvalidDimension(format!(
            "A is {}x{}, objective acts on {} unknowns, signal has {} entries",
            a.rows(),
            a.cols(),
            spec.n(),
            x.len()
        )));
    }
    Ok(())
}

/// Condition (i). Skipped (true) when every coordinate sits on a bound,
/// since then `N(Psi) = {0}`.
pub fn condition_i(a: &DenseMatrix, sd: &SubdiffDescription, spec: &ObjectiveSpec) -> Result<bool> {
    if sd.ray_coords.len() == spec.n() {
        return Ok(true);
    }
    let d_lambda = sd.d_lambda_t.transpose();
    let psi_rows = sd.rays.transpose();
    stacked_full_column_rank(&[a, &d_lambda, &psi_rows], RANK_TOL)
}

fn is_binary(x: &[f64]) -> bool {
    x.iter().all(|&v| (v - 0.0).abs() <= ACT_TOL || (v - 1.0).abs() <= ACT_TOL)
}

pub fn certify_general(
    a: &DenseMatrix,
    spec: &ObjectiveSpec,
    x: &[f64],
    method: CertifyMethod,
    eps: f64,
    feas_tol: f64,
) -> Result<CertificateResult> {
    check_inputs(a, spec, x)?;
    let sd = subdiff_description(spec, x, ACT_TOL)?;
    let cond_i = condition_i(a, &sd, spec)?;
    match method {
        CertifyMethod::EpsilonLp => Ok(epsilon_lp(a, spec, &sd, cond_i, eps, feas_tol)),
        CertifyMethod::ExactDuality | CertifyMethod::Specialized => {
            if !cond_i {
                return Ok(CertificateResult::new(Verdict::NotUnique, false, CertifyMethod::ExactDuality));
            }
            let sys = general_system(a, &sd);
            Ok(decide_strict(&sys, feas_tol, CertifyMethod::ExactDuality, |z| general_witness(spec, &sd, a, z)))
        }
    }
}

/// Homogenised ε-LP. With `θ = 1/t`, `α̃ = θ α_Λ`, `ν = θ (μ - ε)` and
/// `ỹ = θ y` the problem `min t` becomes
/// `max θ s.t. A^T ỹ - D_Λ^T α̃ - Psi_r ν - θ (y0 + ε Psi_r 1) = 0`,
/// `|α̃| <= 1`, `ν >= 0`, `0 <= θ <= cap`.
///
/// `ỹ` is eliminated through an orthonormal basis `Z` of `N(A)`: the
/// equality holds for some `ỹ` iff `Z^T (D_Λ^T α̃ + Psi_r ν + θ c) = 0`,
/// which leaves `n - rank(A)` rows. `ỹ` is recovered by least squares.
fn epsilon_lp(
    a: &DenseMatrix,
    spec: &ObjectiveSpec,
    sd: &SubdiffDescription,
    cond_i: bool,
    eps: f64,
    feas_tol: f64,
) -> CertificateResult {
    let method = CertifyMethod::EpsilonLp;
    let (k, r) = (sd.d_lambda_t.cols(), sd.rays.cols());
    let nv = k + r + 1;
    let mut shift = sd.y0.clone();
    for &(i, s) in &sd.ray_coords {
        shift[i] += eps * s;
    }
    let qr = PivotedQr::new(&a.transpose(), RANK_TOL);
    let z = qr.q_columns(qr.rank());
    let dz = z.len();
    // Z^T v for v with few nonzeros.
    let project = |v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; dz];
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0.0 {
                for (o, zc) in out.iter_mut().zip(&z) {
                    *o += vi * zc[i];
                }
            }
        }
        out
    };
    let mut columns: Vec<Vec<f64>> = (0..k).map(|j| project(&sd.d_lambda_t.column(j))).collect();
    for &(i, s) in &sd.ray_coords {
        columns.push(z.iter().map(|zc| s * zc[i]).collect());
    }
    columns.push(project(&shift));

    let primal = if dz == 0 {
        // A injective: every direction is feasible and θ sits at the cap.
        let mut p = vec![0.0; nv];
        p[nv - 1] = THETA_CAP;
        p
    } else {
        let eq = DenseMatrix::from_fn(dz, nv, |i, j| columns[j][i]);
        let mut c = vec![0.0; nv];
        c[nv - 1] = -1.0;
        let mut lower = vec![Some(-1.0); k];
        let mut upper = vec![Some(1.0); k];
        lower.extend(std::iter::repeat_n(Some(0.0), r));
        upper.extend(std::iter::repeat_n(None, r));
        lower.push(Some(0.0));
        upper.push(Some(THETA_CAP));
        let lp = LinearProgram::new(c).with_eq(eq, vec![0.0; dz]).with_bounds(lower, upper);
        match solve_lp(&lp, feas_tol) {
            Ok(s) if s.status == LpStatus::Optimal => s.primal,
            Ok(s) => {
                return CertificateResult::indeterminate(method, cond_i, format!("epsilon LP ended {:?}", s.status))
            }
            Err(e) => return CertificateResult::indeterminate(method, cond_i, e.to_string()),
        }
    };
    let theta = primal[nv - 1];
    if theta <= feas_tol {
        // Only θ = 0 is feasible: t* = inf.
        let mut res = CertificateResult::new(Verdict::NotUnique, cond_i, method);
        res.t_star = Some(f64::INFINITY);
        return res;
    }
    let alpha_l: Vec<f64> = primal[..k].iter().map(|v| v / theta).collect();
    let mu: Vec<f64> = primal[k..k + r].iter().map(|v| eps + v / theta).collect();
    // A^T y = D_Λ^T α_Λ + Psi_r μ + y0.
    let mut rhs = sd.d_lambda_t.matvec(&alpha_l);
    for (&(i, s), &m) in sd.ray_coords.iter().zip(&mu) {
        rhs[i] += s * m;
    }
    for (v, y0) in rhs.iter_mut().zip(&sd.y0) {
        *v += y0;
    }
    let y = qr.solve_least_squares(&rhs);
    let t_star = if theta >= THETA_CAP * (1.0 - 1e-12) { max_abs(&alpha_l) } else { 1.0 / theta };
    let witness = Witness { y, alpha: full_alpha(spec, sd, &alpha_l), mu, t_star };
    let verdict = if !cond_i || t_star >= 1.0 {
        Verdict::NotUnique
    } else if t_star < 1.0 - eps {
        Verdict::Unique
    } else {
        Verdict::Indeterminate
    };
    CertificateResult {
        verdict,
        condition_i: cond_i,
        method,
        t_star: Some(t_star),
        witness: (verdict == Verdict::Unique).then_some(witness),
        diagnostic: None,
    }
}

fn full_alpha(spec: &ObjectiveSpec, sd: &SubdiffDescription, alpha_l: &[f64]) -> Vec<f64> {
    let mut alpha = vec![0.0; spec.p()];
    for (&j, &s) in sd.sets.cosupport_complement.iter().zip(&sd.signs) {
        alpha[j] = s;
    }
    for (&j, &v) in sd.sets.cosupport.iter().zip(alpha_l) {
        alpha[j] = v;
    }
    alpha
}

/// `M z = q`, `P z < d`.
#[derive(Clone, Debug)]
pub struct StrictSystem {
    pub m: DenseMatrix,
    pub q: Vec<f64>,
    pub p: DenseMatrix,
    pub d: Vec<f64>,
}

impl StrictSystem {
    fn check(&self) -> Result<()> {
        if self.m.rows() != self.q.len() || self.p.rows() != self.d.len() || self.m.cols() != self.p.cols() {
            return Err(Error::InvalidDimension("inconsistent strict-feasibility system".into()));
        }
        Ok(())
    }
}

/// `M = [D_Λ^T, Psi_r, A^T]`, `z = (α_Λ, μ, y)`, `q = -y0`,
/// `P = [[-I,0,0],[I,0,0],[0,-I,0]]`, `d = (1, 1, 0)`.
fn general_system(a: &DenseMatrix, sd: &SubdiffDescription) -> StrictSystem {
    let (k, r) = (sd.d_lambda_t.cols(), sd.rays.cols());
    let m = DenseMatrix::hstack(&[&sd.d_lambda_t, &sd.rays, &a.transpose()]).expect("same row count");
    let nz = m.cols();
    let p = DenseMatrix::from_fn(2 * k + r, nz, |i, j| {
        if i < k {
            if j == i {
                -1.0
            } else {
                0.0
            }
        } else if i < 2 * k {
            if j == i - k {
                1.0
            } else {
                0.0
            }
        } else if j == k + (i - 2 * k) {
            -1.0
        } else {
            0.0
        }
    });
    let mut d = vec![1.0; 2 * k];
    d.extend(std::iter::repeat_n(0.0, r));
    StrictSystem { m, q: sd.y0.iter().map(|v| -v).collect(), p, d }
}

fn general_witness(spec: &ObjectiveSpec, sd: &SubdiffDescription, a: &DenseMatrix, z: &[f64]) -> Witness {
    let (k, r) = (sd.d_lambda_t.cols(), sd.rays.cols());
    let alpha_l = &z[..k];
    Witness {
        y: z[k + r..k + r + a.rows()].iter().map(|v| -v).collect(),
        alpha: full_alpha(spec, sd, alpha_l),
        mu: z[k..k + r].to_vec(),
        t_star: max_abs(alpha_l),
    }
}

/// Whether some `z` has `M z = q` and `P z < d`.
///
/// Solves the normalised dual `max 1^T v s.t. M^T u + P^T v = 0,
/// q^T u + d^T v <= 0, 1^T v <= 1, v >= 0`. Its value is 0 exactly when
/// `v = 0` is the only dual solution, i.e. when the system is strictly
/// feasible; otherwise it is 1.
pub fn strict_feasibility(sys: &StrictSystem, feas_tol: f64) -> Result<bool> {
    sys.check()?;
    if !stacked_full_column_rank(&[&sys.m.transpose()], RANK_TOL)? {
        return Err(Error::Precondition("M^T has a nontrivial nullspace".into()));
    }
    Ok(strict_dual_value(sys, feas_tol)? < 0.5)
}

fn strict_dual_value(sys: &StrictSystem, feas_tol: f64) -> Result<f64> {
    let (mu, pv, nz) = (sys.m.rows(), sys.p.rows(), sys.m.cols());
    let nv = mu + pv;
    let eq = DenseMatrix::from_fn(nz, nv, |i, j| if j < mu { sys.m.get(j, i) } else { sys.p.get(j - mu, i) });
    let mut ineq = DenseMatrix::zeros(2, nv);
    for j in 0..nv {
        ineq.set(0, j, if j < mu { sys.q[j] } else { sys.d[j - mu] });
        ineq.set(1, j, if j < mu { 0.0 } else { 1.0 });
    }
    let mut c = vec![0.0; mu];
    c.extend(std::iter::repeat_n(-1.0, pv));
    let mut lower = vec![None; mu];
    lower.extend(std::iter::repeat_n(Some(0.0), pv));
    let lp = LinearProgram::new(c)
        .with_eq(eq, vec![0.0; nz])
        .with_ineq(ineq, vec![0.0, 1.0])
        .with_bounds(lower, vec![None; nv]);
    let sol = solve_lp(&lp, feas_tol)?;
    match sol.status {
        LpStatus::Optimal => Ok(-sol.objective_value),
        // u = v = 0 is always feasible and the objective is capped.
        other => Err(Error::NumericalFailure(format!("normalised dual LP ended {other:?}"))),
    }
}

/// Strictly interior point by `max s s.t. M z = q, P z + s 1 <= d, s <= 1`.
fn max_margin_point(sys: &StrictSystem, feas_tol: f64) -> Result<Option<Vec<f64>>> {
    let (nz, pr) = (sys.m.cols(), sys.p.rows());
    let eq = DenseMatrix::from_fn(sys.m.rows(), nz + 1, |i, j| if j < nz { sys.m.get(i, j) } else { 0.0 });
    let ineq = DenseMatrix::from_fn(pr, nz + 1, |i, j| if j < nz { sys.p.get(i, j) } else { 1.0 });
    let mut c = vec![0.0; nz];
    c.push(-1.0);
    let mut upper = vec![None; nz];
    upper.push(Some(1.0));
    let lp = LinearProgram::new(c)
        .with_eq(eq, sys.q.clone())
        .with_ineq(ineq, sys.d.clone())
        .with_bounds(vec![None; nz + 1], upper);
    let sol = solve_lp(&lp, feas_tol)?;
    if sol.status != LpStatus::Optimal || sol.primal[nz] <= feas_tol {
        return Ok(None);
    }
    Ok(Some(sol.primal[..nz].to_vec()))
}

fn decide_strict(
    sys: &StrictSystem,
    feas_tol: f64,
    method: CertifyMethod,
    witness: impl FnOnce(&[f64]) -> Witness,
) -> CertificateResult {
    let value = match strict_dual_value(sys, feas_tol) {
        Ok(v) => v,
        Err(e) => return CertificateResult::indeterminate(method, true, e.to_string()),
    };
    if value >= 0.5 {
        return CertificateResult::new(Verdict::NotUnique, true, method);
    }
    match max_margin_point(sys, feas_tol) {
        Ok(Some(z)) => {
            let w = witness(&z);
            CertificateResult {
                t_star: None,
                witness: Some(w),
                ..CertificateResult::new(Verdict::Unique, true, method)
            }
        }
        Ok(None) => {
            CertificateResult::indeterminate(method, true, "dual test passed but no interior point was found".into())
        }
        Err(e) => CertificateResult::indeterminate(method, true, e.to_string()),
    }
}

/// The case-by-case conditions: injectivity plus a strict system in `y`
/// (F1-F3), in `(α_Λ, y)` (F4), or the general system (F5, F6).
pub fn certify_specialized(
    a: &DenseMatrix,
    spec: &ObjectiveSpec,
    x: &[f64],
    _eps: f64,
    feas_tol: f64,
) -> Result<CertificateResult> {
    check_inputs(a, spec, x)?;
    let method = CertifyMethod::Specialized;
    if spec.case.is_box() && !is_binary(x) {
        return Err(Error::Precondition("box-constrained cases need a binary signal".into()));
    }
    let sd = subdiff_description(spec, x, ACT_TOL)?;
    let sets = &sd.sets;
    let m = a.rows();
    let at = a.transpose();
    let support = &sets.support;
    let off: Vec<usize> = (0..spec.n()).filter(|i| !support.contains(i)).collect();

    if spec.case.is_sparse() && !spec.is_identity() {
        return Err(Error::InvalidInput("sparse cases need D = I".into()));
    }
    let injective = |cols: &[usize]| -> Result<bool> {
        if cols.is_empty() {
            return Ok(true);
        }
        stacked_full_column_rank(&[&a.select_cols(cols)], RANK_TOL)
    };
    let ones = |k: usize| vec![1.0; k];

    match spec.case {
        ObjectiveCase::F1 | ObjectiveCase::F2 | ObjectiveCase::F3 => {
            let cond_i = spec.case == ObjectiveCase::F3 || injective(support)?;
            if !cond_i {
                return Ok(CertificateResult::new(Verdict::NotUnique, false, method));
            }
            let a_s_t = at.select_rows(support);
            let a_off_t = at.select_rows(&off);
            let sys = match spec.case {
                ObjectiveCase::F1 => {
                    let neg = {
                        let mut t = a_off_t.clone();
                        t.scale(-1.0);
                        t
                    };
                    StrictSystem {
                        m: a_s_t,
                        q: support.iter().map(|&i| x[i].signum()).collect(),
                        p: DenseMatrix::vstack(&[&a_off_t, &neg])?,
                        d: ones(2 * off.len()),
                    }
                }
                ObjectiveCase::F2 => StrictSystem { m: a_s_t, q: ones(support.len()), p: a_off_t, d: ones(off.len()) },
                _ => {
                    let mut neg = a_s_t;
                    neg.scale(-1.0);
                    let mut d = vec![-1.0; support.len()];
                    d.extend(ones(off.len()));
                    StrictSystem {
                        m: DenseMatrix::zeros(0, m),
                        q: Vec::new(),
                        p: DenseMatrix::vstack(&[&neg, &a_off_t])?,
                        d,
                    }
                }
            };
            Ok(decide_strict(&sys, feas_tol, method, |y| sparse_witness(spec, &sd, a, x, y)))
        }
        ObjectiveCase::F4 => {
            let d_lambda = sd.d_lambda_t.transpose();
            let cond_i = stacked_full_column_rank(&[a, &d_lambda], RANK_TOL)?;
            if !cond_i {
                return Ok(CertificateResult::new(Verdict::NotUnique, false, method));
            }
            let k = sd.d_lambda_t.cols();
            let mut neg_at = at.clone();
            neg_at.scale(-1.0);
            let mm = DenseMatrix::hstack(&[&sd.d_lambda_t, &neg_at])?;
            let p = DenseMatrix::from_fn(2 * k, k + m, |i, j| {
                if i < k && j == i {
                    1.0
                } else if i >= k && j == i - k {
                    -1.0
                } else {
                    0.0
                }
            });
            let sys = StrictSystem { m: mm, q: sd.y0.iter().map(|v| -v).collect(), p, d: ones(2 * k) };
            Ok(decide_strict(&sys, feas_tol, method, |z| Witness {
                // D_Λ^T α_Λ - A^T y = -y0  =>  D^T α = A^T y
                y: z[k..].to_vec(),
                alpha: full_alpha(spec, &sd, &z[..k]),
                mu: Vec::new(),
                t_star: max_abs(&z[..k]),
            }))
        }
        ObjectiveCase::F5 | ObjectiveCase::F6 => {
            let cond_i = spec.case == ObjectiveCase::F6 || condition_i(a, &sd, spec)?;
            if !cond_i {
                return Ok(CertificateResult::new(Verdict::NotUnique, false, method));
            }
            let sys = general_system(a, &sd);
            Ok(decide_strict(&sys, feas_tol, method, |z| general_witness(spec, &sd, a, z)))
        }
    }
}

/// For `D = I`: `α + Psi μ = A^T y` split coordinatewise.
fn sparse_witness(spec: &ObjectiveSpec, sd: &SubdiffDescription, a: &DenseMatrix, x: &[f64], y: &[f64]) -> Witness {
    let c = a.tr_matvec(y);
    let n = spec.n();
    let mut alpha = vec![0.0; n];
    let mut mu = Vec::with_capacity(sd.ray_coords.len());
    let mut ray_of = vec![None; n];
    for &(i, s) in &sd.ray_coords {
        ray_of[i] = Some(s);
    }
    for i in 0..n {
        alpha[i] = if x[i].abs() > ACT_TOL { x[i].signum() } else { c[i] };
        match ray_of[i] {
            Some(s) if s > 0.0 => {
                // upper bound: c = 1 + μ
                alpha[i] = 1.0;
            }
            Some(_) if x[i].abs() <= ACT_TOL => {
                // lower bound at zero: c = α - μ with α in [0, 1)
                alpha[i] = (c[i].max(-1.0) + 1.0) / 2.0;
            }
            _ => {}
        }
    }
    for &(i, s) in &sd.ray_coords {
        mu.push(s * (c[i] - alpha[i]));
    }
    let t_star = sd.sets.cosupport.iter().map(|&j| alpha[j].abs()).fold(0.0, f64::max);
    Witness { y: y.to_vec(), alpha, mu, t_star }
}

/// Brute-force test of `D_f(x̄) ∩ N(A) = {0}` for small problems.
///
/// With `Z` a basis of `N(A)` and `s = sign(D_{Λᶜ} x̄)` it minimises
/// `s^T D_{Λᶜ} Z w + ||D_Λ Z w||_1` over feasible directions normalised by
/// `||D_Λ Z w||_1 + ||Psi_r Z w||_1 = 1`. Unique iff the minimum exceeds
/// `tol` or no direction meets the normalisation.
pub fn descent_cone_oracle(a: &DenseMatrix, spec: &ObjectiveSpec, x: &[f64], tol: f64) -> Result<bool> {
    check_inputs(a, spec, x)?;
    if spec.n() > 32 {
        return Err(Error::InvalidInput("the cone oracle is limited to n <= 32".into()));
    }
    let sd = subdiff_description(spec, x, ACT_TOL)?;
    let z = nullspace_basis(a, RANK_TOL);
    if z.cols() == 0 {
        return Ok(true);
    }
    let d_lambda = sd.d_lambda_t.transpose();
    let psi_r = sd.rays.transpose();
    let stack = DenseMatrix::vstack(&[a, &d_lambda, &psi_r])?;
    if nullspace_basis(&stack, RANK_TOL).cols() > 0 {
        return Ok(false);
    }
    let dl_z = d_lambda.matmul(&z)?;
    let psi_z = psi_r.matmul(&z)?;
    let dc_z = spec.d.select_rows(&sd.sets.cosupport_complement).matmul(&z)?;
    let lin = dc_z.tr_matvec(&sd.signs);
    let (wd, k, r) = (z.cols(), dl_z.rows(), psi_z.rows());
    // variables: w (free), a+ (k), a- (k), g (r)
    let nv = wd + 2 * k + r;
    let rows = k + r + 1;
    let mut eq = DenseMatrix::zeros(rows, nv);
    for i in 0..k {
        for j in 0..wd {
            eq.set(i, j, dl_z.get(i, j));
        }
        eq.set(i, wd + i, -1.0);
        eq.set(i, wd + k + i, 1.0);
    }
    for i in 0..r {
        for j in 0..wd {
            eq.set(k + i, j, -psi_z.get(i, j));
        }
        eq.set(k + i, wd + 2 * k + i, -1.0);
    }
    for j in wd..nv {
        eq.set(rows - 1, j, 1.0);
    }
    let mut rhs = vec![0.0; rows];
    rhs[rows - 1] = 1.0;
    let mut c = lin;
    c.extend(std::iter::repeat_n(1.0, 2 * k));
    c.extend(std::iter::repeat_n(0.0, r));
    let mut lower = vec![None; wd];
    lower.extend(std::iter::repeat_n(Some(0.0), 2 * k + r));
    let lp = LinearProgram::new(c).with_eq(eq, rhs).with_bounds(lower, vec![None; nv]);
    let sol = solve_lp(&lp, 1e-10)?;
    match sol.status {
        LpStatus::Infeasible => Ok(true),
        LpStatus::Optimal => Ok(sol.objective_value > tol),
        LpStatus::Unbounded => Err(Error::NumericalFailure("cone oracle LP unbounded".into())),
    }
}

/// A minimiser of `f` over `{A x = b}` via
/// `min 1^T (t+ + t-) s.t. A x = b, D x - t+ + t- = 0, l <= x <= u`.
pub fn recover(a: &DenseMatrix, b: &[f64], spec: &ObjectiveSpec, feas_tol: f64) -> Result<Vec<f64>> {
    if a.cols() != spec.n() || b.len() != a.rows() {
        return Err(Error::InvalidDimension("A, b and objective disagree".into()));
    }
    let (m, n, p) = (a.rows(), spec.n(), spec.p());
    let nv = n + 2 * p;
    let eq = DenseMatrix::from_fn(m + p, nv, |i, j| {
        if i < m {
            if j < n {
                a.get(i, j)
            } else {
                0.0
            }
        } else {
            let r = i - m;
            if j < n {
                spec.d.get(r, j)
            } else if j == n + r {
                -1.0
            } else if j == n + p + r {
                1.0
            } else {
                0.0
            }
        }
    });
    let mut rhs = b.to_vec();
    rhs.extend(std::iter::repeat_n(0.0, p));
    let mut c = vec![0.0; n];
    c.extend(std::iter::repeat_n(1.0, 2 * p));
    let mut lower: Vec<Option<f64>> = spec.lower.iter().map(|v| v.finite()).collect();
    let mut upper: Vec<Option<f64>> = spec.upper.iter().map(|v| v.finite()).collect();
    lower.extend(std::iter::repeat_n(Some(0.0), 2 * p));
    upper.extend(std::iter::repeat_n(None, 2 * p));
    let lp = LinearProgram::new(c).with_eq(eq, rhs).with_bounds(lower, upper);
    let sol = solve_lp(&lp, feas_tol)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.primal[..n].to_vec()),
        LpStatus::Infeasible => Err(Error::Infeasible("no point satisfies A x = b within the bounds".into())),
        LpStatus::Unbounded => Err(Error::NumericalFailure("recovery LP unbounded".into())),
    }
}
