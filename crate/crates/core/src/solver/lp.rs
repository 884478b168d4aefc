//! Bounded-variable primal simplex on a dense tableau.
//!
//! Standard form: equality rows first, then inequality rows with a slack
//! each. Every row also owns an artificial column; their tableau columns
//! are `B^-1` up to sign, which gives duals for free and a cheap phase 1.

use crate::error::{Error, Result};
use crate::linalg::{max_abs, DenseMatrix};

/// `min c^T z` subject to `E z = e`, `G z <= h` and optional bounds.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub eq_lhs: DenseMatrix,
    pub eq_rhs: Vec<f64>,
    pub ineq_lhs: DenseMatrix,
    pub ineq_rhs: Vec<f64>,
    /// `None` means unbounded below.
    pub var_lower: Vec<Option<f64>>,
    /// `None` means unbounded above.
    pub var_upper: Vec<Option<f64>>,
}

impl LinearProgram {
    /// Free variables, no constraints.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            eq_lhs: DenseMatrix::zeros(0, n),
            eq_rhs: Vec::new(),
            ineq_lhs: DenseMatrix::zeros(0, n),
            ineq_rhs: Vec::new(),
            var_lower: vec![None; n],
            var_upper: vec![None; n],
        }
    }

    pub fn with_eq(mut self, lhs: DenseMatrix, rhs: Vec<f64>) -> Self {
        self.eq_lhs = lhs;
        self.eq_rhs = rhs;
        self
    }

    pub fn with_ineq(mut self, lhs: DenseMatrix, rhs: Vec<f64>) -> Self {
        self.ineq_lhs = lhs;
        self.ineq_rhs = rhs;
        self
    }

    pub fn with_bounds(mut self, lower: Vec<Option<f64>>, upper: Vec<Option<f64>>) -> Self {
        self.var_lower = lower;
        self.var_upper = upper;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let dims_ok = self.eq_lhs.cols() == n
            && self.ineq_lhs.cols() == n
            && self.eq_lhs.rows() == self.eq_rhs.len()
            && self.ineq_lhs.rows() == self.ineq_rhs.len()
            && self.var_lower.len() == n
            && self.var_upper.len() == n;
        if !dims_ok {
            return Err(Error::InvalidDimension("inconsistent linear program".into()));
        }
        let finite = self
            .objective
            .iter()
            .chain(&self.eq_rhs)
            .chain(&self.ineq_rhs)
            .chain(self.var_lower.iter().flatten())
            .chain(self.var_upper.iter().flatten())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidInput("non-finite data in linear program".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub objective_value: f64,
    /// Multipliers `y` of `E z = e`, with `c = E^T y - G^T v + r`.
    pub dual_eq: Vec<f64>,
    /// Multipliers `v >= 0` of `G z <= h`.
    pub dual_ineq: Vec<f64>,
    /// Reduced costs `r` of the structural variables.
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
}

impl LpSolution {
    fn without_point(status: LpStatus, iterations: usize) -> Self {
        let objective_value = match status {
            LpStatus::Unbounded => f64::NEG_INFINITY,
            _ => f64::INFINITY,
        };
        Self {
            status,
            primal: Vec::new(),
            objective_value,
            dual_eq: Vec::new(),
            dual_ineq: Vec::new(),
            reduced_costs: Vec::new(),
            iterations,
        }
    }

    /// Dual objective `e^T y - h^T v + sum of bound terms`.
    pub fn dual_objective(&self, lp: &LinearProgram) -> f64 {
        let mut obj = crate::linalg::dot(&lp.eq_rhs, &self.dual_eq) - crate::linalg::dot(&lp.ineq_rhs, &self.dual_ineq);
        for (j, &r) in self.reduced_costs.iter().enumerate() {
            if r > 0.0 {
                obj += r * lp.var_lower[j].unwrap_or(0.0);
            } else if r < 0.0 {
                obj += r * lp.var_upper[j].unwrap_or(0.0);
            }
        }
        obj
    }
}

const PIVOT_TOL: f64 = 1e-7;
const PRICE_TOL: f64 = 1e-9;
const DEGENERATE_LIMIT: usize = 50;
const REFRESH_EVERY: usize = 100;
const NONBASIC: usize = usize::MAX;

enum Phase {
    One,
    Two,
}

enum Step {
    Optimal,
    Unbounded,
    Moved,
}

struct Tableau {
    rows: usize,
    /// Structural plus slack columns.
    ncols: usize,
    /// `ncols + rows`; the rhs column `B^-1 b` sits at index `width`.
    width: usize,
    t: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    pos: Vec<usize>,
    cost: Vec<f64>,
    d: Vec<f64>,
    sigma: Vec<f64>,
    a_std: DenseMatrix,
    b: Vec<f64>,
    harris: f64,
    iterations: usize,
    cap: usize,
    degenerate_run: usize,
    /// Devex reference weights.
    weights: Vec<f64>,
}

impl Tableau {
    #[inline]
    fn stride(&self) -> usize {
        self.width + 1
    }

    fn build(lp: &LinearProgram, feas_tol: f64) -> Self {
        let n = lp.num_vars();
        let (me, mi) = (lp.eq_lhs.rows(), lp.ineq_lhs.rows());
        let rows = me + mi;
        let ncols = n + mi;
        let width = ncols + rows;
        let mut a_std = DenseMatrix::zeros(rows, ncols);
        for i in 0..me {
            a_std.row_mut(i)[..n].copy_from_slice(lp.eq_lhs.row(i));
        }
        for k in 0..mi {
            let row = a_std.row_mut(me + k);
            row[..n].copy_from_slice(lp.ineq_lhs.row(k));
            row[n + k] = 1.0;
        }
        let mut b = lp.eq_rhs.clone();
        b.extend_from_slice(&lp.ineq_rhs);

        let mut lower = vec![0.0; width];
        let mut upper = vec![f64::INFINITY; width];
        for j in 0..n {
            lower[j] = lp.var_lower[j].unwrap_or(f64::NEG_INFINITY);
            upper[j] = lp.var_upper[j].unwrap_or(f64::INFINITY);
        }
        let mut x: Vec<f64> = (0..width).map(|j| 0.0_f64.clamp(lower[j], upper[j])).collect();

        // Residual of each row with every column at its starting value.
        let resid: Vec<f64> = (0..rows).map(|i| b[i] - crate::linalg::dot(a_std.row(i), &x[..ncols])).collect();

        // Crash: a singleton column that absorbs its row's residual
        // while staying inside its bounds becomes basic.
        let mut col_count = vec![0usize; ncols];
        let mut col_row = vec![0usize; ncols];
        for i in 0..rows {
            for (j, &v) in a_std.row(i).iter().enumerate() {
                if v != 0.0 {
                    col_count[j] += 1;
                    col_row[j] = i;
                }
            }
        }
        let mut basis = vec![NONBASIC; rows];
        let mut pivot = vec![0.0; rows];
        for j in 0..ncols {
            if col_count[j] != 1 {
                continue;
            }
            let i = col_row[j];
            if basis[i] != NONBASIC {
                continue;
            }
            let a = a_std.get(i, j);
            if a.abs() < 1e-3 * max_abs(a_std.row(i)) {
                continue;
            }
            let val = x[j] + resid[i] / a;
            if val >= lower[j] && val <= upper[j] {
                basis[i] = j;
                pivot[i] = a;
                x[j] = val;
            }
        }
        let mut sigma = vec![1.0; rows];
        for i in 0..rows {
            if basis[i] == NONBASIC {
                sigma[i] = if resid[i] < 0.0 { -1.0 } else { 1.0 };
                basis[i] = ncols + i;
                pivot[i] = sigma[i];
                x[ncols + i] = resid[i].abs();
            }
        }
        let mut pos = vec![NONBASIC; width];
        for (i, &j) in basis.iter().enumerate() {
            pos[j] = i;
        }

        let stride = width + 1;
        let mut t = vec![0.0; rows * stride];
        for i in 0..rows {
            let row = &mut t[i * stride..(i + 1) * stride];
            let p = pivot[i];
            for (dst, &src) in row[..ncols].iter_mut().zip(a_std.row(i)) {
                *dst = src / p;
            }
            row[ncols + i] = sigma[i] / p;
            row[width] = b[i] / p;
        }

        let rhs_scale = 1.0 + max_abs(&b);
        Self {
            rows,
            ncols,
            width,
            t,
            lower,
            upper,
            x,
            basis,
            pos,
            cost: vec![0.0; width],
            d: vec![0.0; width],
            sigma,
            a_std,
            b,
            harris: 0.5 * feas_tol * rhs_scale.min(1e3),
            iterations: 0,
            cap: 50 * (ncols + rows).max(1),
            degenerate_run: 0,
            weights: vec![1.0; width],
        }
    }

    fn set_phase(&mut self, phase: Phase, c: &[f64]) {
        self.cost.iter_mut().for_each(|v| *v = 0.0);
        match phase {
            Phase::One => {
                for k in 0..self.rows {
                    self.cost[self.ncols + k] = 1.0;
                }
            }
            Phase::Two => {
                self.cost[..c.len()].copy_from_slice(c);
                for k in 0..self.rows {
                    let j = self.ncols + k;
                    self.lower[j] = 0.0;
                    self.upper[j] = 0.0;
                    self.x[j] = 0.0;
                }
            }
        }
        self.recompute_reduced_costs();
        self.weights.iter_mut().for_each(|w| *w = 1.0);
        self.degenerate_run = 0;
    }

    fn recompute_reduced_costs(&mut self) {
        let stride = self.stride();
        self.d.copy_from_slice(&self.cost);
        for i in 0..self.rows {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * stride..i * stride + self.width];
                for (dj, &tij) in self.d.iter_mut().zip(row) {
                    *dj -= cb * tij;
                }
            }
        }
        for i in 0..self.rows {
            self.d[self.basis[i]] = 0.0;
        }
    }

    /// `x_B = B^-1 b - B^-1 N x_N` from the tableau.
    fn refresh_basic_values(&mut self) {
        let stride = self.stride();
        let nonbasic: Vec<(usize, f64)> =
            (0..self.width).filter(|&j| self.pos[j] == NONBASIC && self.x[j] != 0.0).map(|j| (j, self.x[j])).collect();
        for i in 0..self.rows {
            let row = &self.t[i * stride..(i + 1) * stride];
            let mut v = row[self.width];
            for &(j, xj) in &nonbasic {
                v -= row[j] * xj;
            }
            self.x[self.basis[i]] = v;
        }
    }

    fn price(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.width {
            if self.pos[j] != NONBASIC || self.upper[j] <= self.lower[j] {
                continue;
            }
            let dj = self.d[j];
            let dir = if dj < -PRICE_TOL && self.x[j] < self.upper[j] {
                1.0
            } else if dj > PRICE_TOL && self.x[j] > self.lower[j] {
                -1.0
            } else {
                continue;
            };
            if bland {
                return Some((j, dir));
            }
            let score = dj * dj / self.weights[j];
            if score > best_score {
                best_score = score;
                best = Some((j, dir));
            }
        }
        best
    }

    fn iterate(&mut self, bland: bool) -> Result<Step> {
        let Some((q, dir)) = self.price(bland) else {
            return Ok(Step::Optimal);
        };
        self.iterations += 1;
        if self.iterations > self.cap {
            return Err(Error::NumericalFailure(format!("simplex iteration cap {} reached", self.cap)));
        }
        let stride = self.stride();
        let alpha: Vec<f64> = (0..self.rows).map(|i| dir * self.t[i * stride + q]).collect();

        // Harris pass 1: largest step with relaxed bounds.
        let mut theta_max = f64::INFINITY;
        for (i, &a) in alpha.iter().enumerate() {
            let bvar = self.basis[i];
            let xb = self.x[bvar];
            if a > PIVOT_TOL && self.lower[bvar].is_finite() {
                theta_max = theta_max.min((xb - self.lower[bvar] + self.harris) / a);
            } else if a < -PIVOT_TOL && self.upper[bvar].is_finite() {
                theta_max = theta_max.min((self.upper[bvar] - xb + self.harris) / -a);
            }
        }
        let flip = if dir > 0.0 { self.upper[q] - self.x[q] } else { self.x[q] - self.lower[q] };
        if theta_max.is_infinite() && flip.is_infinite() {
            return Ok(Step::Unbounded);
        }
        if flip <= theta_max {
            self.move_entering(q, dir, flip, &alpha);
            self.x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
            self.degenerate_run = 0;
            return Ok(Step::Moved);
        }

        // Pass 2: among rows blocking within theta_max take the largest pivot.
        let mut leave: Option<(usize, f64, f64)> = None;
        for (i, &a) in alpha.iter().enumerate() {
            let bvar = self.basis[i];
            let xb = self.x[bvar];
            let (ratio, bound) = if a > PIVOT_TOL && self.lower[bvar].is_finite() {
                ((xb - self.lower[bvar]) / a, self.lower[bvar])
            } else if a < -PIVOT_TOL && self.upper[bvar].is_finite() {
                ((self.upper[bvar] - xb) / -a, self.upper[bvar])
            } else {
                continue;
            };
            if ratio <= theta_max {
                let better = match leave {
                    None => true,
                    Some((r, _, _)) if bland => bvar < self.basis[r],
                    Some((r, _, _)) => a.abs() > alpha[r].abs(),
                };
                if better {
                    leave = Some((i, ratio.max(0.0), bound));
                }
            }
        }
        let (r, step, bound) =
            leave.ok_or_else(|| Error::NumericalFailure("ratio test found no blocking row".into()))?;
        self.move_entering(q, dir, step, &alpha);
        let out = self.basis[r];
        self.x[out] = bound;
        self.pivot(r, q);
        if step * alpha[r].abs() < 1e-12 {
            self.degenerate_run += 1;
        } else {
            self.degenerate_run = 0;
        }
        Ok(Step::Moved)
    }

    fn move_entering(&mut self, q: usize, dir: f64, step: f64, alpha: &[f64]) {
        if step == 0.0 {
            return;
        }
        self.x[q] += dir * step;
        for (i, &a) in alpha.iter().enumerate() {
            if a != 0.0 {
                self.x[self.basis[i]] -= a * step;
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let stride = self.stride();
        let piv = self.t[r * stride + q];
        {
            let row = &mut self.t[r * stride..(r + 1) * stride];
            row.iter_mut().for_each(|v| *v /= piv);
            row[q] = 1.0;
        }
        let prow: Vec<f64> = self.t[r * stride..(r + 1) * stride].to_vec();
        let nz: Vec<usize> = (0..stride).filter(|&j| prow[j] != 0.0).collect();
        let sparse = nz.len() * 3 < stride;
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * stride + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * stride..(i + 1) * stride];
            if sparse {
                for &j in &nz {
                    row[j] -= f * prow[j];
                }
            } else {
                for (v, &p) in row.iter_mut().zip(&prow) {
                    *v -= f * p;
                }
            }
            row[q] = 0.0;
        }
        let dq = self.d[q];
        if dq != 0.0 {
            for &j in &nz {
                if j < self.width {
                    self.d[j] -= dq * prow[j];
                }
            }
        }
        self.d[q] = 0.0;
        let out = self.basis[r];
        let wq = self.weights[q];
        for &j in &nz {
            if j < self.width && j != q {
                let w = prow[j] * prow[j] * wq;
                if w > self.weights[j] {
                    self.weights[j] = w;
                }
            }
        }
        self.weights[out] = (wq / (piv * piv)).max(1.0);
        self.pos[out] = NONBASIC;
        self.pos[q] = r;
        self.basis[r] = q;
    }

    fn run(&mut self) -> Result<bool> {
        let mut since_refresh = 0;
        loop {
            let bland = self.degenerate_run >= DEGENERATE_LIMIT;
            match self.iterate(bland)? {
                Step::Optimal => {
                    self.refresh_basic_values();
                    return Ok(true);
                }
                Step::Unbounded => return Ok(false),
                Step::Moved => {
                    since_refresh += 1;
                    if since_refresh >= REFRESH_EVERY {
                        self.refresh_basic_values();
                        since_refresh = 0;
                    }
                }
            }
        }
    }

    /// Degenerate pivots that move zero-valued artificials out of the basis.
    fn evict_artificials(&mut self) {
        let stride = self.stride();
        for r in 0..self.rows {
            if self.basis[r] < self.ncols {
                continue;
            }
            let row = &self.t[r * stride..r * stride + self.ncols];
            let best = (0..self.ncols)
                .filter(|&j| self.pos[j] == NONBASIC)
                .max_by(|&a, &b| row[a].abs().total_cmp(&row[b].abs()));
            if let Some(j) = best {
                if row[j].abs() > 1e-7 {
                    let out = self.basis[r];
                    self.pivot(r, j);
                    self.x[out] = 0.0;
                }
            }
        }
        self.refresh_basic_values();
    }

    /// Recomputes the tableau from the original columns of the current basis.
    fn reinvert(&mut self) -> Result<()> {
        let m = self.rows;
        let bmat = DenseMatrix::from_fn(m, m, |i, k| self.column(self.basis[k], i));
        let lu = Lu::new(&bmat)?;
        let stride = self.stride();
        let mut col = vec![0.0; m];
        for j in 0..=self.width {
            for (i, c) in col.iter_mut().enumerate() {
                *c = if j == self.width { self.b[i] } else { self.column(j, i) };
            }
            lu.solve_in_place(&mut col);
            for (i, &c) in col.iter().enumerate() {
                self.t[i * stride + j] = c;
            }
        }
        self.recompute_reduced_costs();
        self.refresh_basic_values();
        Ok(())
    }

    fn column(&self, j: usize, i: usize) -> f64 {
        if j < self.ncols {
            self.a_std.get(i, j)
        } else if j - self.ncols == i {
            self.sigma[i]
        } else {
            0.0
        }
    }

    fn primal_residual(&self) -> f64 {
        let x = &self.x[..self.ncols];
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            let r = crate::linalg::dot(self.a_std.row(i), x) - self.b[i];
            worst = worst.max(r.abs());
        }
        for j in 0..self.ncols {
            worst = worst.max(self.lower[j] - self.x[j]).max(self.x[j] - self.upper[j]);
        }
        worst
    }
}

/// LU with partial pivoting, used to rebuild the tableau.
struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn new(a: &DenseMatrix) -> Result<Self> {
        let n = a.rows();
        let mut lu = a.data().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| lu[x * n + k].abs().total_cmp(&lu[y * n + k].abs())).unwrap_or(k);
            if lu[p * n + k].abs() < 1e-14 {
                return Err(Error::NumericalFailure("singular basis".into()));
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        lu[i * n + j] -= f * lu[k * n + j];
                    }
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                y[i] -= self.lu[i * n + k] * y[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] -= self.lu[i * n + k] * y[k];
            }
            y[i] /= self.lu[i * n + i];
        }
        b.copy_from_slice(&y);
    }
}

/// Solves `lp`; `feas_tol` bounds the primal residual of the answer.
pub fn solve_lp(lp: &LinearProgram, feas_tol: f64) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_vars();
    let mut tab = Tableau::build(lp, feas_tol);
    let scale = 1.0 + max_abs(&tab.b);

    tab.set_phase(Phase::One, &[]);
    let start_infeas = (0..tab.rows).map(|k| tab.x[tab.ncols + k]).fold(0.0_f64, f64::max);
    if tab.rows > 0 {
        if start_infeas > feas_tol * scale {
            tab.run()?;
        }
        let infeas = (0..tab.rows).map(|k| tab.x[tab.ncols + k]).fold(0.0_f64, f64::max);
        if infeas > feas_tol * scale {
            return Ok(LpSolution::without_point(LpStatus::Infeasible, tab.iterations));
        }
        tab.evict_artificials();
    }

    let mut costs = lp.objective.clone();
    costs.resize(tab.ncols, 0.0);
    tab.set_phase(Phase::Two, &costs);
    let mut reinverts = 0;
    loop {
        if !tab.run()? {
            return Ok(LpSolution::without_point(LpStatus::Unbounded, tab.iterations));
        }
        if tab.primal_residual() <= feas_tol * scale || reinverts >= 2 || tab.rows == 0 {
            break;
        }
        reinverts += 1;
        tab.reinvert()?;
    }
    if tab.primal_residual() > feas_tol * scale {
        return Err(Error::NumericalFailure(format!(
            "primal residual {:.3e} after refactorization",
            tab.primal_residual()
        )));
    }

    // y_k from the artificial columns: d_{art k} = -sigma_k y_k in phase 2.
    let y: Vec<f64> = (0..tab.rows).map(|k| -tab.d[tab.ncols + k] / tab.sigma[k]).collect();
    let me = lp.eq_lhs.rows();
    let primal = tab.x[..n].to_vec();
    let reduced_costs: Vec<f64> = {
        let mut r = lp.objective.clone();
        for (i, &yi) in y.iter().enumerate() {
            crate::linalg::axpy(-yi, &tab.a_std.row(i)[..n], &mut r);
        }
        r
    };
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value: crate::linalg::dot(&lp.objective, &primal),
        primal,
        dual_eq: y[..me].to_vec(),
        dual_ineq: y[me..].iter().map(|v| -v).collect(),
        reduced_costs,
        iterations: tab.iterations,
    })
}
