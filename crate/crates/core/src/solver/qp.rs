//! Euclidean projections onto polyhedra.
//!
//! Two set forms: an explicit polyhedron in the ambient space, solved by a
//! primal active-set method, and the image `{B z + c : l <= z <= u}` of a box,
//! solved as bounded-variable least squares.

use crate::error::{Error, Result};
use crate::linalg::{dot, max_abs, norm2, DenseMatrix, PivotedQr, RANK_TOL};
use crate::solver::lp::{solve_lp, LinearProgram, LpStatus};

#[derive(Clone, Debug)]
pub enum QuadraticProjection {
    /// Project `target` onto `{y : E y = e, G y <= h, l <= y <= u}`.
    Polyhedron { target: Vec<f64>, set: LinearProgram },
    /// Project `target` onto `{B z + offset : lower <= z <= upper}`.
    BoxImage {
        target: Vec<f64>,
        basis: DenseMatrix,
        offset: Vec<f64>,
        lower: Vec<Option<f64>>,
        upper: Vec<Option<f64>>,
    },
}

#[derive(Clone, Debug)]
pub struct Projection {
    pub point: Vec<f64>,
    pub sq_distance: f64,
    /// Box coefficients `z` for the box-image form; empty otherwise.
    pub coefficients: Vec<f64>,
}

pub fn solve_projection(qp: &QuadraticProjection, feas_tol: f64) -> Result<Projection> {
    match qp {
        QuadraticProjection::Polyhedron { target, set } => project_polyhedron(target, set, feas_tol),
        QuadraticProjection::BoxImage { target, basis, offset, lower, upper } => {
            if basis.rows() != target.len()
                || offset.len() != target.len()
                || lower.len() != basis.cols()
                || upper.len() != basis.cols()
            {
                return Err(Error::InvalidDimension("inconsistent box-image projection".into()));
            }
            let rhs: Vec<f64> = target.iter().zip(offset).map(|(t, o)| t - o).collect();
            let lo: Vec<f64> = lower.iter().map(|v| v.unwrap_or(f64::NEG_INFINITY)).collect();
            let hi: Vec<f64> = upper.iter().map(|v| v.unwrap_or(f64::INFINITY)).collect();
            if lo.iter().zip(&hi).any(|(l, u)| l > u) {
                return Err(Error::Infeasible("empty coefficient box".into()));
            }
            let z = bvls(basis, &rhs, &lo, &hi, feas_tol)?;
            let mut point = basis.matvec(&z);
            for (p, o) in point.iter_mut().zip(offset) {
                *p += o;
            }
            let sq_distance = point.iter().zip(target).map(|(p, t)| (p - t) * (p - t)).sum();
            Ok(Projection { point, sq_distance, coefficients: z })
        }
    }
}

/// Bounded-variable least squares, `min ||B z - t||` over `lo <= z <= hi`.
pub fn bvls(b: &DenseMatrix, t: &[f64], lo: &[f64], hi: &[f64], tol: f64) -> Result<Vec<f64>> {
    bvls_from(b, t, lo, hi, None, tol)
}

/// Same as [`bvls`] with an optional starting point (clamped into the box).
///
/// A ridge of relative size `1e-14` keeps the free-set subproblems full
/// rank, so the iteration is well defined when `B` has dependent columns.
/// Its effect on the attained residual is below `1e-12` relative.
pub fn bvls_from(
    b: &DenseMatrix,
    t: &[f64],
    lo: &[f64],
    hi: &[f64],
    start: Option<&[f64]>,
    tol: f64,
) -> Result<Vec<f64>> {
    let (m, n) = (b.rows(), b.cols());
    let ridge = 1e-7 * b.max_abs().max(1e-300);
    let aug = DenseMatrix::from_fn(m + n, n, |i, j| {
        if i < m {
            b.get(i, j)
        } else if i - m == j {
            ridge
        } else {
            0.0
        }
    });
    let mut target = t.to_vec();
    target.resize(m + n, 0.0);

    let mut z: Vec<f64> = (0..n).map(|j| start.map_or(0.0, |s| s[j]).clamp(lo[j], hi[j])).collect();
    let mut free: Vec<bool> = (0..n).map(|j| z[j] > lo[j] && z[j] < hi[j]).collect();
    let grad_tol = tol * (1.0 + norm2(t)) * (1.0 + b.max_abs());
    let cap = 10 * (n + 1) * (n + 1) + 100;
    let mut just_freed: Option<usize> = None;
    let mut blocked: Vec<bool> = vec![false; n];

    for _ in 0..cap {
        // Inner loop: least squares on the free set, back off when it leaves the box.
        loop {
            let fidx: Vec<usize> = (0..n).filter(|&j| free[j]).collect();
            if fidx.is_empty() {
                break;
            }
            let mut rhs = target.clone();
            for j in (0..n).filter(|&j| !free[j] && z[j] != 0.0) {
                for (i, r) in rhs.iter_mut().enumerate() {
                    *r -= aug.get(i, j) * z[j];
                }
            }
            let zf = PivotedQr::new(&aug.select_cols(&fidx), RANK_TOL).solve_least_squares(&rhs);
            let inside = fidx.iter().zip(&zf).all(|(&j, &v)| v >= lo[j] && v <= hi[j]);
            if inside {
                for (&j, &v) in fidx.iter().zip(&zf) {
                    z[j] = v;
                }
                if just_freed.take().is_some() {
                    blocked.iter_mut().for_each(|v| *v = false);
                }
                break;
            }
            if let Some(k) = just_freed.take() {
                // Released variable pushed straight back out by rounding: pin it.
                if let Some(pos) = fidx.iter().position(|&j| j == k) {
                    let outward = (z[k] <= lo[k] && zf[pos] < lo[k]) || (z[k] >= hi[k] && zf[pos] > hi[k]);
                    if outward {
                        free[k] = false;
                        blocked[k] = true;
                        continue;
                    }
                }
            }
            let mut step = 1.0_f64;
            let mut hit = None;
            for (&j, &v) in fidx.iter().zip(&zf) {
                let dz = v - z[j];
                let s = if v < lo[j] && dz < 0.0 {
                    (lo[j] - z[j]) / dz
                } else if v > hi[j] && dz > 0.0 {
                    (hi[j] - z[j]) / dz
                } else {
                    continue;
                };
                if s < step {
                    step = s;
                    hit = Some(j);
                }
            }
            let step = step.clamp(0.0, 1.0);
            for (&j, &v) in fidx.iter().zip(&zf) {
                z[j] += step * (v - z[j]);
                let span = 1e-12 * (1.0 + z[j].abs());
                if z[j] <= lo[j] + span || (hit == Some(j) && v < lo[j]) {
                    z[j] = lo[j];
                    free[j] = false;
                } else if z[j] >= hi[j] - span || hit == Some(j) {
                    z[j] = hi[j];
                    free[j] = false;
                }
            }
        }

        // Outer loop: release the bound variable with the steepest descent.
        let resid: Vec<f64> = {
            let bz = aug.matvec(&z);
            target.iter().zip(&bz).map(|(ti, v)| ti - v).collect()
        };
        let w = aug.tr_matvec(&resid);
        let mut best: Option<usize> = None;
        for j in 0..n {
            if free[j] || blocked[j] {
                continue;
            }
            let wants = (z[j] <= lo[j] && w[j] > grad_tol) || (z[j] >= hi[j] && w[j] < -grad_tol);
            if wants && best.is_none_or(|k| w[j].abs() > w[k].abs()) {
                best = Some(j);
            }
        }
        match best {
            Some(j) => {
                free[j] = true;
                just_freed = Some(j);
            }
            None => return Ok(z),
        }
    }
    Err(Error::NumericalFailure("bounded least squares did not converge".into()))
}

fn project_polyhedron(target: &[f64], set: &LinearProgram, feas_tol: f64) -> Result<Projection> {
    let n = target.len();
    if set.num_vars() != n {
        return Err(Error::InvalidDimension("target and set differ in dimension".into()));
    }
    // Inequalities in one list: G rows, then bound rows.
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for k in 0..set.ineq_lhs.rows() {
        rows.push(set.ineq_lhs.row(k).to_vec());
        rhs.push(set.ineq_rhs[k]);
    }
    for j in 0..n {
        if let Some(u) = set.var_upper[j] {
            let mut r = vec![0.0; n];
            r[j] = 1.0;
            rows.push(r);
            rhs.push(u);
        }
        if let Some(l) = set.var_lower[j] {
            let mut r = vec![0.0; n];
            r[j] = -1.0;
            rows.push(r);
            rhs.push(-l);
        }
    }
    let me = set.eq_lhs.rows();

    let phase1 = LinearProgram { objective: vec![0.0; n], ..set.clone() };
    let start = solve_lp(&phase1, feas_tol)?;
    if start.status != LpStatus::Optimal {
        return Err(Error::Infeasible("projection onto an empty set".into()));
    }
    let mut y = start.primal;
    let scale = 1.0 + max_abs(target) + max_abs(&y);
    let tol = feas_tol * scale;

    let mut working: Vec<usize> = (0..rows.len()).filter(|&k| dot(&rows[k], &y) >= rhs[k] - tol).collect();
    let cap = 20 * (rows.len() + n + 1);
    for _ in 0..cap {
        // Keep the active rows linearly independent together with the equalities.
        let cw = working_matrix(set, &rows, &working);
        let qr = PivotedQr::new(&cw.transpose(), RANK_TOL);
        if qr.rank() < cw.rows() {
            let keep: Vec<usize> = qr.permutation()[..qr.rank()].to_vec();
            let mut trimmed = Vec::new();
            for k in 0..working.len() {
                if keep.contains(&(me + k)) {
                    trimmed.push(working[k]);
                }
            }
            working = trimmed;
            continue;
        }
        let g: Vec<f64> = target.iter().zip(&y).map(|(a, b)| a - b).collect();
        let lambda = qr.solve_least_squares(&g);
        let ctl = cw.tr_matvec(&lambda);
        let p: Vec<f64> = g.iter().zip(&ctl).map(|(a, b)| a - b).collect();
        if max_abs(&p) <= tol {
            let worst = (0..working.len()).map(|k| (k, lambda[me + k])).min_by(|a, b| a.1.total_cmp(&b.1));
            match worst {
                Some((k, l)) if l < -tol => {
                    working.remove(k);
                    continue;
                }
                _ => {
                    let sq_distance = g.iter().map(|v| v * v).sum();
                    return Ok(Projection { point: y, sq_distance, coefficients: Vec::new() });
                }
            }
        }
        let mut step = 1.0;
        let mut block = None;
        for k in 0..rows.len() {
            if working.contains(&k) {
                continue;
            }
            let cp = dot(&rows[k], &p);
            if cp > 1e-14 {
                let s = ((rhs[k] - dot(&rows[k], &y)) / cp).max(0.0);
                if s < step {
                    step = s;
                    block = Some(k);
                }
            }
        }
        for (yi, pi) in y.iter_mut().zip(&p) {
            *yi += step * pi;
        }
        if let Some(k) = block {
            working.push(k);
        }
    }
    Err(Error::NumericalFailure("active-set projection did not converge".into()))
}

fn working_matrix(set: &LinearProgram, rows: &[Vec<f64>], working: &[usize]) -> DenseMatrix {
    let n = set.num_vars();
    let me = set.eq_lhs.rows();
    DenseMatrix::from_fn(
        me + working.len(),
        n,
        |i, j| {
            if i < me {
                set.eq_lhs.get(i, j)
            } else {
                rows[working[i - me]][j]
            }
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-8;

    fn strip_set() -> LinearProgram {
        LinearProgram::new(vec![0.0, 0.0])
            .with_eq(DenseMatrix::from_rows(&[vec![1.0, 0.0]]).unwrap(), vec![1.0])
            .with_bounds(vec![None, Some(-1.0)], vec![None, Some(1.0)])
    }

    fn project(target: Vec<f64>, set: LinearProgram) -> Projection {
        solve_projection(&QuadraticProjection::Polyhedron { target, set }, TOL).unwrap()
    }

    #[test]
    fn strip_examples() {
        let p = project(vec![0.0, 0.0], strip_set());
        assert!((p.point[0] - 1.0).abs() < 1e-12 && p.point[1].abs() < 1e-12);
        assert!((p.sq_distance - 1.0).abs() < 1e-12);
        let p = project(vec![2.0, 3.0], strip_set());
        assert!((p.point[0] - 1.0).abs() < 1e-12 && (p.point[1] - 1.0).abs() < 1e-12);
        assert!((p.sq_distance - 5.0).abs() < 1e-12);
        let p = project(vec![1.0, 0.25], strip_set());
        assert!(p.sq_distance.abs() < 1e-20);
    }

    #[test]
    fn box_image_matches_polyhedron() {
        // {1} x [-1, 1] as offset (1, 0) plus z e_2, |z| <= 1
        let qp = QuadraticProjection::BoxImage {
            target: vec![2.0, 3.0],
            basis: DenseMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap(),
            offset: vec![1.0, 0.0],
            lower: vec![Some(-1.0)],
            upper: vec![Some(1.0)],
        };
        let p = solve_projection(&qp, TOL).unwrap();
        assert!((p.sq_distance - 5.0).abs() < 1e-12);
        assert_eq!(p.coefficients, vec![1.0]);
    }

    #[test]
    fn empty_set_is_reported() {
        let set = LinearProgram::new(vec![0.0])
            .with_eq(DenseMatrix::from_rows(&[vec![1.0]]).unwrap(), vec![2.0])
            .with_bounds(vec![None], vec![Some(1.0)]);
        let qp = QuadraticProjection::Polyhedron { target: vec![0.0], set };
        assert!(matches!(solve_projection(&qp, TOL), Err(Error::Infeasible(_))));
    }

    /// Brute force over every subset of active constraints of a 2-D polygon.
    fn brute_force(target: &[f64], g: &[[f64; 2]], h: &[f64]) -> f64 {
        let feasible = |y: &[f64; 2]| g.iter().zip(h).all(|(r, hk)| r[0] * y[0] + r[1] * y[1] <= hk + 1e-9);
        let mut best = f64::INFINITY;
        let t = [target[0], target[1]];
        if feasible(&t) {
            return 0.0;
        }
        for (k, r) in g.iter().enumerate() {
            let nn = r[0] * r[0] + r[1] * r[1];
            let s = (r[0] * t[0] + r[1] * t[1] - h[k]) / nn;
            let y = [t[0] - s * r[0], t[1] - s * r[1]];
            if feasible(&y) {
                best = best.min((y[0] - t[0]).powi(2) + (y[1] - t[1]).powi(2));
            }
            for (l, q) in g.iter().enumerate().skip(k + 1) {
                let det = r[0] * q[1] - r[1] * q[0];
                if det.abs() < 1e-12 {
                    continue;
                }
                let y = [(h[k] * q[1] - r[1] * h[l]) / det, (r[0] * h[l] - h[k] * q[0]) / det];
                if feasible(&y) {
                    best = best.min((y[0] - t[0]).powi(2) + (y[1] - t[1]).powi(2));
                }
            }
        }
        best
    }

    fn polygon(angles: &[f64], radii: &[f64]) -> (Vec<[f64; 2]>, Vec<f64>) {
        let g: Vec<[f64; 2]> = angles.iter().map(|a| [a.cos(), a.sin()]).collect();
        (g, radii.to_vec())
    }

    fn poly_lp(g: &[[f64; 2]], h: &[f64]) -> LinearProgram {
        let rows: Vec<Vec<f64>> = g.iter().map(|r| r.to_vec()).collect();
        LinearProgram::new(vec![0.0, 0.0]).with_ineq(DenseMatrix::from_rows(&rows).unwrap(), h.to_vec())
    }

    proptest! {
        #[test]
        fn matches_brute_force_in_2d(
            angles in prop::collection::vec(0.0f64..std::f64::consts::TAU, 3..7),
            radii in prop::collection::vec(0.2f64..2.0, 10),
            t in prop::collection::vec(-4.0f64..4.0, 2),
        ) {
            let mut angles = angles;
            // Enough spread to keep the polygon bounded.
            angles.extend([0.0, 2.1, 4.2]);
            let (g, h) = polygon(&angles, &radii[..angles.len()]);
            let p = project(t.clone(), poly_lp(&g, &h));
            let want = brute_force(&t, &g, &h);
            prop_assert!((p.sq_distance - want).abs() <= 1e-6, "{} vs {}", p.sq_distance, want);
        }

        #[test]
        fn projection_is_nonexpansive(
            a in prop::collection::vec(-4.0f64..4.0, 3),
            b in prop::collection::vec(-4.0f64..4.0, 3),
        ) {
            let set = LinearProgram::new(vec![0.0; 3])
                .with_eq(DenseMatrix::from_rows(&[vec![1.0, 1.0, 1.0]]).unwrap(), vec![1.0])
                .with_ineq(DenseMatrix::from_rows(&[vec![1.0, -1.0, 0.0]]).unwrap(), vec![0.5])
                .with_bounds(vec![Some(-1.0); 3], vec![Some(2.0); 3]);
            let pa = project(a.clone(), set.clone());
            let pb = project(b.clone(), set);
            let dp: f64 = pa.point.iter().zip(&pb.point).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            let dt: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            prop_assert!(dp <= dt + 10.0 * TOL);
        }

        #[test]
        fn bvls_satisfies_box_kkt(
            cols in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 1..5),
            t in prop::collection::vec(-3.0f64..3.0, 4),
        ) {
            // Image of the box [-1,1]^k under B.
            let k = cols.len();
            let b = DenseMatrix::from_fn(4, k, |i, j| cols[j][i]);
            let qp = QuadraticProjection::BoxImage {
                target: t.clone(),
                basis: b.clone(),
                offset: vec![0.0; 4],
                lower: vec![Some(-1.0); k],
                upper: vec![Some(1.0); k],
            };
            let fast = solve_projection(&qp, TOL).unwrap();
            let resid: Vec<f64> = t.iter().zip(&fast.point).map(|(a, p)| a - p).collect();
            let w = b.tr_matvec(&resid);
            for j in 0..k {
                let z = fast.coefficients[j];
                if z > -1.0 + 1e-9 && z < 1.0 - 1e-9 {
                    prop_assert!(w[j].abs() <= 1e-7);
                } else if z <= -1.0 + 1e-9 {
                    prop_assert!(w[j] <= 1e-7);
                } else {
                    prop_assert!(w[j] >= -1e-7);
                }
            }
        }
    }
}
