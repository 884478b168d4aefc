//! The six objectives `||D x||_1 + indicator of [l, u]`: index sets, the
//! bound-sign matrix `Psi`, subdifferentials and directional derivatives.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{diff_operator_1d, gradient_operator_2d, DenseMatrix};

/// Tolerance for reading off supports, cosupports and active bounds.
pub const ACT_TOL: f64 = 1e-9;

/// A real number or one of the two infinities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExtendedReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// `f64` view with the infinities mapped to IEEE infinities.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::NegInf => f64::NEG_INFINITY,
            ExtendedReal::Finite(v) => v,
            ExtendedReal::PosInf => f64::INFINITY,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInf => write!(f, "-inf"),
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInf => write!(f, "+inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveCase {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
}

impl ObjectiveCase {
    pub const ALL: [ObjectiveCase; 6] = [Self::F1, Self::F2, Self::F3, Self::F4, Self::F5, Self::F6];

    /// `D = I` for the first three cases.
    pub fn is_sparse(self) -> bool {
        matches!(self, Self::F1 | Self::F2 | Self::F3)
    }

    pub fn bounds(self) -> (ExtendedReal, ExtendedReal) {
        use ExtendedReal::*;
        match self {
            Self::F1 | Self::F4 => (NegInf, PosInf),
            Self::F2 | Self::F5 => (Finite(0.0), PosInf),
            Self::F3 | Self::F6 => (Finite(0.0), Finite(1.0)),
        }
    }

    pub fn is_box(self) -> bool {
        matches!(self, Self::F3 | Self::F6)
    }
}

/// Which analysis operator a named objective uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Identity,
    Diff1d,
    Grad2d,
}

/// A command-line objective name such as `f1` or `f6-2d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ObjectiveName {
    pub case: ObjectiveCase,
    pub analysis: Analysis,
}

impl FromStr for ObjectiveName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use ObjectiveCase::*;
        let (case, analysis) = match s.trim().to_ascii_lowercase().as_str() {
            "f1" => (F1, Analysis::Identity),
            "f2" => (F2, Analysis::Identity),
            "f3" => (F3, Analysis::Identity),
            "f4-1d" => (F4, Analysis::Diff1d),
            "f5-1d" => (F5, Analysis::Diff1d),
            "f6-1d" => (F6, Analysis::Diff1d),
            "f4-2d" => (F4, Analysis::Grad2d),
            "f5-2d" => (F5, Analysis::Grad2d),
            "f6-2d" => (F6, Analysis::Grad2d),
            other => return Err(Error::Parse(format!("unknown objective '{other}'"))),
        };
        Ok(Self { case, analysis })
    }
}

impl fmt::Display for ObjectiveName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.case {
            ObjectiveCase::F1 => 1,
            ObjectiveCase::F2 => 2,
            ObjectiveCase::F3 => 3,
            ObjectiveCase::F4 => 4,
            ObjectiveCase::F5 => 5,
            ObjectiveCase::F6 => 6,
        };
        match self.analysis {
            Analysis::Identity => write!(f, "f{k}"),
            Analysis::Diff1d => write!(f, "f{k}-1d"),
            Analysis::Grad2d => write!(f, "f{k}-2d"),
        }
    }
}

impl Serialize for ObjectiveName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ObjectiveName {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Objective `||D x||_1 + indicator of [l, u]`.
#[derive(Clone, Debug)]
pub struct ObjectiveSpec {
    pub case: ObjectiveCase,
    pub d: DenseMatrix,
    pub lower: Vec<ExtendedReal>,
    pub upper: Vec<ExtendedReal>,
}

impl ObjectiveSpec {
    /// Any case with a caller-supplied analysis matrix.
    pub fn with_analysis(case: ObjectiveCase, d: DenseMatrix) -> Result<Self> {
        let n = d.cols();
        if n == 0 {
            return Err(Error::InvalidDimension("analysis matrix has no columns".into()));
        }
        let (l, u) = case.bounds();
        Ok(Self { case, d, lower: vec![l; n], upper: vec![u; n] })
    }

    /// F1-F3 with `D = I`.
    pub fn sparse(case: ObjectiveCase, n: usize) -> Result<Self> {
        Self::with_analysis(case, DenseMatrix::identity(n))
    }

    /// Any case with `D = ∂_n`.
    pub fn tv_1d(case: ObjectiveCase, n: usize) -> Result<Self> {
        Self::with_analysis(case, diff_operator_1d(n)?)
    }

    /// Any case with `D = ∇` for an `rows x cols` image.
    pub fn tv_2d(case: ObjectiveCase, rows: usize, cols: usize) -> Result<Self> {
        Self::with_analysis(case, gradient_operator_2d(rows, cols)?)
    }

    /// Builds the spec a named objective prescribes for `n` unknowns.
    /// For 2-D names `n` must be a perfect square.
    pub fn from_name(name: ObjectiveName, n: usize) -> Result<Self> {
        match name.analysis {
            Analysis::Identity => {
                if !name.case.is_sparse() {
                    return Err(Error::InvalidInput("gradient objective needs a 1d or 2d suffix".into()));
                }
                Self::sparse(name.case, n)
            }
            Analysis::Diff1d => Self::tv_1d(name.case, n),
            Analysis::Grad2d => {
                let side = (n as f64).sqrt().round() as usize;
                if side * side != n {
                    return Err(Error::InvalidDimension(format!("{n} pixels is not a square image")));
                }
                Self::tv_2d(name.case, side, side)
            }
        }
    }

    pub fn n(&self) -> usize {
        self.d.cols()
    }

    pub fn p(&self) -> usize {
        self.d.rows()
    }

    /// Whether every row of `D` is a difference `x_a - x_b`.
    pub fn is_graph_difference(&self) -> bool {
        (0..self.d.rows()).all(|i| {
            let row = self.d.row(i);
            let mut plus = 0;
            let mut minus = 0;
            for &v in row {
                if v == 1.0 {
                    plus += 1;
                } else if v == -1.0 {
                    minus += 1;
                } else if v != 0.0 {
                    return false;
                }
            }
            plus == 1 && minus == 1
        })
    }

    /// Whether `D` is the identity.
    pub fn is_identity(&self) -> bool {
        self.d.rows() == self.d.cols()
            && (0..self.d.rows())
                .all(|i| self.d.row(i).iter().enumerate().all(|(j, &v)| v == if i == j { 1.0 } else { 0.0 }))
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::InvalidDimension(format!(
                "vector of length {} for an objective on {} unknowns",
                x.len(),
                self.n()
            )));
        }
        Ok(())
    }

    fn within_bounds(&self, x: &[f64], act_tol: f64) -> bool {
        x.iter()
            .enumerate()
            .all(|(i, &xi)| xi >= self.lower[i].to_f64() - act_tol && xi <= self.upper[i].to_f64() + act_tol)
    }
}

/// Support, active bounds and cosupport of a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSets {
    pub support: Vec<usize>,
    pub s_lower: Vec<usize>,
    pub s_upper: Vec<usize>,
    pub s_free: Vec<usize>,
    /// `Λ`: rows of `D x` that vanish.
    pub cosupport: Vec<usize>,
    pub cosupport_complement: Vec<usize>,
}

pub fn index_sets(spec: &ObjectiveSpec, x: &[f64], act_tol: f64) -> Result<IndexSets> {
    spec.check_len(x)?;
    if !spec.within_bounds(x, act_tol) {
        return Err(Error::Infeasible("point violates the bounds of the objective".into()));
    }
    let near = |a: f64, b: ExtendedReal| b.finite().is_some_and(|b| (a - b).abs() <= act_tol);
    let mut sets = IndexSets {
        support: Vec::new(),
        s_lower: Vec::new(),
        s_upper: Vec::new(),
        s_free: Vec::new(),
        cosupport: Vec::new(),
        cosupport_complement: Vec::new(),
    };
    for (i, &xi) in x.iter().enumerate() {
        if xi.abs() > act_tol {
            sets.support.push(i);
        }
        if near(xi, spec.lower[i]) {
            sets.s_lower.push(i);
        } else if near(xi, spec.upper[i]) {
            sets.s_upper.push(i);
        } else {
            sets.s_free.push(i);
        }
    }
    for (j, v) in spec.d.matvec(x).into_iter().enumerate() {
        if v.abs() <= act_tol {
            sets.cosupport.push(j);
        } else {
            sets.cosupport_complement.push(j);
        }
    }
    Ok(sets)
}

/// Diagonal `Psi`: `-1` on active lower bounds, `+1` on active upper bounds.
pub fn psi_matrix(spec: &ObjectiveSpec, sets: &IndexSets) -> DenseMatrix {
    DenseMatrix::diagonal(&psi_diagonal(spec.n(), sets))
}

pub fn psi_diagonal(n: usize, sets: &IndexSets) -> Vec<f64> {
    let mut diag = vec![0.0; n];
    for &i in &sets.s_lower {
        diag[i] = -1.0;
    }
    for &i in &sets.s_upper {
        diag[i] = 1.0;
    }
    diag
}

/// `∂f(x) = { y0 + D_Λ^T α + Psi_r μ : |α| <= 1, μ >= 0 }`.
#[derive(Clone, Debug)]
pub struct SubdiffDescription {
    pub sets: IndexSets,
    /// `D_{Λᶜ}^T sign(D_{Λᶜ} x)`.
    pub y0: Vec<f64>,
    /// `sign(D_{Λᶜ} x)`, aligned with `sets.cosupport_complement`.
    pub signs: Vec<f64>,
    /// `D_Λ^T`, `n x |Λ|`.
    pub d_lambda_t: DenseMatrix,
    /// Nonzero columns of `Psi`, one per active bound.
    pub rays: DenseMatrix,
    /// Coordinate of each ray and its sign.
    pub ray_coords: Vec<(usize, f64)>,
}

impl SubdiffDescription {
    pub fn n(&self) -> usize {
        self.y0.len()
    }

    /// `[D_Λ^T, Psi_r]` with the matching coefficient bounds.
    pub fn generators(&self) -> (DenseMatrix, Vec<Option<f64>>, Vec<Option<f64>>) {
        let basis = DenseMatrix::hstack(&[&self.d_lambda_t, &self.rays]).expect("blocks share the row count");
        let k = self.d_lambda_t.cols();
        let r = self.rays.cols();
        let mut lower = vec![Some(-1.0); k];
        lower.extend(std::iter::repeat_n(Some(0.0), r));
        let mut upper = vec![Some(1.0); k];
        upper.extend(std::iter::repeat_n(None, r));
        (basis, lower, upper)
    }

    /// `y0 + D_Λ^T α + Psi_r μ`.
    pub fn point(&self, alpha: &[f64], mu: &[f64]) -> Vec<f64> {
        let mut v = self.y0.clone();
        crate::linalg::axpy(1.0, &self.d_lambda_t.matvec(alpha), &mut v);
        for (&(i, s), &m) in self.ray_coords.iter().zip(mu) {
            v[i] += s * m;
        }
        v
    }

    /// Per-coordinate interval of a separable subdifferential (`D = I`).
    pub fn coordinate_intervals(&self) -> Option<Vec<(f64, f64)>> {
        let n = self.n();
        if self.d_lambda_t.rows() != n {
            return None;
        }
        let mut iv: Vec<(f64, f64)> = self.y0.iter().map(|&v| (v, v)).collect();
        for k in 0..self.d_lambda_t.cols() {
            let col = self.d_lambda_t.column(k);
            let nz: Vec<usize> = (0..n).filter(|&i| col[i] != 0.0).collect();
            if nz.len() != 1 {
                return None;
            }
            let c = col[nz[0]].abs();
            let e = &mut iv[nz[0]];
            e.0 -= c;
            e.1 += c;
        }
        for &(i, s) in &self.ray_coords {
            if s < 0.0 {
                iv[i].0 = f64::NEG_INFINITY;
            } else {
                iv[i].1 = f64::INFINITY;
            }
        }
        Some(iv)
    }

    /// Membership `v ∈ ∂f(x)`, decided by a feasibility LP.
    pub fn contains(&self, v: &[f64], tol: f64) -> Result<bool> {
        use crate::solver::{solve_lp, LinearProgram, LpStatus};
        let (basis, lower, upper) = self.generators();
        let rhs: Vec<f64> = v.iter().zip(&self.y0).map(|(a, b)| a - b).collect();
        let lp = LinearProgram::new(vec![0.0; basis.cols()]).with_eq(basis, rhs).with_bounds(lower, upper);
        Ok(solve_lp(&lp, tol)?.status == LpStatus::Optimal)
    }
}

pub fn subdiff_description(spec: &ObjectiveSpec, x: &[f64], act_tol: f64) -> Result<SubdiffDescription> {
    let sets = index_sets(spec, x, act_tol)?;
    let dx = spec.d.matvec(x);
    let signs: Vec<f64> = sets.cosupport_complement.iter().map(|&j| dx[j].signum()).collect();
    let d_c = spec.d.select_rows(&sets.cosupport_complement);
    let y0 = d_c.tr_matvec(&signs);
    let d_lambda_t = spec.d.select_rows(&sets.cosupport).transpose();
    let n = spec.n();
    let mut ray_coords: Vec<(usize, f64)> =
        sets.s_lower.iter().map(|&i| (i, -1.0)).chain(sets.s_upper.iter().map(|&i| (i, 1.0))).collect();
    ray_coords.sort_by_key(|&(i, _)| i);
    let rays =
        DenseMatrix::from_fn(n, ray_coords.len(), |i, k| if ray_coords[k].0 == i { ray_coords[k].1 } else { 0.0 });
    Ok(SubdiffDescription { sets, y0, signs, d_lambda_t, rays, ray_coords })
}

/// `||D x||_1` inside the box, `+inf` outside.
pub fn objective_value(spec: &ObjectiveSpec, x: &[f64], act_tol: f64) -> ExtendedReal {
    if x.len() != spec.n() || !spec.within_bounds(x, act_tol) {
        return ExtendedReal::PosInf;
    }
    ExtendedReal::Finite(spec.d.matvec(x).iter().map(|v| v.abs()).sum())
}

/// One-sided derivative of the objective at `x` along `dir`.
pub fn directional_derivative(spec: &ObjectiveSpec, x: &[f64], dir: &[f64], sets: &IndexSets) -> ExtendedReal {
    if dir.len() != spec.n() {
        return ExtendedReal::PosInf;
    }
    let blocked = sets.s_lower.iter().any(|&i| dir[i] < 0.0) || sets.s_upper.iter().any(|&i| dir[i] > 0.0);
    if blocked {
        return ExtendedReal::PosInf;
    }
    let dx = spec.d.matvec(x);
    let dd = spec.d.matvec(dir);
    let smooth: f64 = sets.cosupport_complement.iter().map(|&j| dx[j].signum() * dd[j]).sum();
    let kink: f64 = sets.cosupport.iter().map(|&j| dd[j].abs()).sum();
    ExtendedReal::Finite(smooth + kink)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(case: ObjectiveCase, n: usize) -> ObjectiveSpec {
        if case.is_sparse() {
            ObjectiveSpec::sparse(case, n).unwrap()
        } else {
            ObjectiveSpec::tv_1d(case, n).unwrap()
        }
    }

    #[test]
    fn index_set_examples() {
        let s = index_sets(&spec(ObjectiveCase::F3, 3), &[0.0, 0.5, 1.0], ACT_TOL).unwrap();
        assert_eq!(s.s_lower, vec![0]);
        assert_eq!(s.s_free, vec![1]);
        assert_eq!(s.s_upper, vec![2]);
        assert_eq!(s.support, vec![1, 2]);

        let s = index_sets(&spec(ObjectiveCase::F4, 3), &[1.0, 1.0, 0.0], ACT_TOL).unwrap();
        assert_eq!(s.cosupport, vec![0]);
        assert_eq!(s.cosupport_complement, vec![1]);

        let s = index_sets(&spec(ObjectiveCase::F1, 4), &[0.0; 4], ACT_TOL).unwrap();
        assert!(s.support.is_empty());
        assert_eq!(s.cosupport, vec![0, 1, 2, 3]);

        let err = index_sets(&spec(ObjectiveCase::F2, 2), &[-0.5, 1.0], ACT_TOL);
        assert!(matches!(err, Err(Error::Infeasible(_))));
    }

    #[test]
    fn psi_examples() {
        let f3 = spec(ObjectiveCase::F3, 3);
        let s = index_sets(&f3, &[0.0, 0.5, 1.0], ACT_TOL).unwrap();
        assert_eq!(psi_matrix(&f3, &s), DenseMatrix::diagonal(&[-1.0, 0.0, 1.0]));
        let f1 = spec(ObjectiveCase::F1, 3);
        let s = index_sets(&f1, &[0.0, 2.0, -1.0], ACT_TOL).unwrap();
        assert_eq!(psi_matrix(&f1, &s).max_abs(), 0.0);
        let f2 = spec(ObjectiveCase::F2, 2);
        let s = index_sets(&f2, &[1.0, 0.0], ACT_TOL).unwrap();
        assert_eq!(psi_matrix(&f2, &s), DenseMatrix::diagonal(&[0.0, -1.0]));
    }

    #[test]
    fn subdiff_examples() {
        let f1 = spec(ObjectiveCase::F1, 2);
        let sd = subdiff_description(&f1, &[1.0, 0.0], ACT_TOL).unwrap();
        assert_eq!(sd.coordinate_intervals().unwrap(), vec![(1.0, 1.0), (-1.0, 1.0)]);

        let f2 = spec(ObjectiveCase::F2, 2);
        let sd = subdiff_description(&f2, &[1.0, 0.0], ACT_TOL).unwrap();
        assert_eq!(sd.coordinate_intervals().unwrap(), vec![(1.0, 1.0), (f64::NEG_INFINITY, 1.0)]);
        assert!(sd.contains(&[1.0, -7.0], 1e-9).unwrap());
        assert!(!sd.contains(&[1.0, 1.5], 1e-9).unwrap());

        let f4 = spec(ObjectiveCase::F4, 2);
        let sd = subdiff_description(&f4, &[1.0, 1.0], ACT_TOL).unwrap();
        assert_eq!(sd.y0, vec![0.0, 0.0]);
        assert_eq!(sd.d_lambda_t, DenseMatrix::from_rows(&[vec![-1.0], vec![1.0]]).unwrap());
        assert!(sd.contains(&[-0.3, 0.3], 1e-9).unwrap());
        assert!(!sd.contains(&[0.3, 0.3], 1e-9).unwrap());
    }

    #[test]
    fn objective_value_examples() {
        let f1 = spec(ObjectiveCase::F1, 2);
        assert_eq!(objective_value(&f1, &[3.0, -4.0], ACT_TOL), ExtendedReal::Finite(7.0));
        let f3 = spec(ObjectiveCase::F3, 2);
        assert_eq!(objective_value(&f3, &[0.5, 1.2], ACT_TOL), ExtendedReal::PosInf);
        let f4 = spec(ObjectiveCase::F4, 3);
        assert_eq!(objective_value(&f4, &[0.0, 1.0, 1.0], ACT_TOL), ExtendedReal::Finite(1.0));
    }

    #[test]
    fn directional_derivative_examples() {
        let f1 = spec(ObjectiveCase::F1, 2);
        let x = [1.0, 0.0];
        let s = index_sets(&f1, &x, ACT_TOL).unwrap();
        assert_eq!(directional_derivative(&f1, &x, &[-1.0, 0.0], &s), ExtendedReal::Finite(-1.0));
        assert_eq!(directional_derivative(&f1, &x, &[0.0, 1.0], &s), ExtendedReal::Finite(1.0));
        let f3 = spec(ObjectiveCase::F3, 2);
        let s = index_sets(&f3, &x, ACT_TOL).unwrap();
        assert_eq!(directional_derivative(&f3, &x, &[1.0, 0.0], &s), ExtendedReal::PosInf);
    }

    #[test]
    fn names_round_trip() {
        for name in ["f1", "f2", "f3", "f4-1d", "f4-2d", "f5-1d", "f5-2d", "f6-1d", "f6-2d"] {
            let parsed: ObjectiveName = name.parse().unwrap();
            assert_eq!(parsed.to_string(), name);
        }
        assert!("f4".parse::<ObjectiveName>().is_err());
        let s = ObjectiveSpec::from_name("f5-2d".parse().unwrap(), 9).unwrap();
        assert_eq!(s.p(), 12);
        assert!(s.is_graph_difference());
        assert!(ObjectiveSpec::from_name("f5-2d".parse().unwrap(), 10).is_err());
    }

    /// A random feasible point of the case with some entries on the bounds.
    fn random_point(case: ObjectiveCase, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut x: Vec<f64> = (0..n)
            .map(|_| match case {
                ObjectiveCase::F1 | ObjectiveCase::F4 => rng.random_range(-2.0..2.0),
                ObjectiveCase::F2 | ObjectiveCase::F5 => rng.random_range(0.0..2.0),
                _ => rng.random_range(0.0..1.0),
            })
            .collect();
        for i in 0..n {
            if rng.random_bool(0.4) {
                x[i] = match case {
                    ObjectiveCase::F3 | ObjectiveCase::F6 if rng.random_bool(0.5) => 1.0,
                    _ => 0.0,
                };
            }
            if i > 0 && !case.is_sparse() && rng.random_bool(0.4) {
                x[i] = x[i - 1];
            }
        }
        x
    }

    proptest! {
        #[test]
        fn subgradient_inequality(seed in any::<u64>(), ci in 0usize..6, n in 2usize..=10) {
            let case = ObjectiveCase::ALL[ci];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sp = spec(case, n);
            let xbar = random_point(case, n, &mut rng);
            let sd = subdiff_description(&sp, &xbar, ACT_TOL).unwrap();
            let alpha: Vec<f64> = (0..sd.d_lambda_t.cols()).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let mu: Vec<f64> = (0..sd.rays.cols()).map(|_| rng.random_range(0.0..3.0)).collect();
            let v = sd.point(&alpha, &mu);
            let x = random_point(case, n, &mut rng);
            let fx = objective_value(&sp, &x, ACT_TOL).to_f64();
            let fb = objective_value(&sp, &xbar, ACT_TOL).to_f64();
            let inner: f64 = v.iter().zip(x.iter().zip(&xbar)).map(|(vi, (a, b))| vi * (a - b)).sum();
            prop_assert!(fx - fb >= inner - 1e-8);
        }

        #[test]
        fn directional_derivative_matches_difference_quotient(
            seed in any::<u64>(), ci in 0usize..6, n in 2usize..=10,
        ) {
            let case = ObjectiveCase::ALL[ci];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sp = spec(case, n);
            let xbar = random_point(case, n, &mut rng);
            let sets = index_sets(&sp, &xbar, ACT_TOL).unwrap();
            let mut d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            for &i in &sets.s_lower {
                d[i] = d[i].abs() + 0.1;
            }
            for &i in &sets.s_upper {
                d[i] = -d[i].abs() - 0.1;
            }
            let eps = 1e-7;
            let moved: Vec<f64> = xbar.iter().zip(&d).map(|(a, b)| a + eps * b).collect();
            let fd = match objective_value(&sp, &moved, ACT_TOL) {
                ExtendedReal::Finite(v) => v,
                _ => return Ok(()),
            };
            let fb = objective_value(&sp, &xbar, ACT_TOL).to_f64();
            let dd = directional_derivative(&sp, &xbar, &d, &sets).to_f64();
            prop_assert!(((fd - fb) / eps - dd).abs() <= 1e-6 * (1.0 + dd.abs()));
        }
    }
}
