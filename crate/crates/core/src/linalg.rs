//! Dense linear algebra: the matrix type, finite-difference operators,
//! rank decisions and nullspace bases.
//!
//! Images are vectorised column-major: pixel `(i, j)` of an `r x c` image
//! lives at index `j * r + i`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Default relative threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-10;

/// Row-major dense matrix of finite reals.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidDimension(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if let Some(bad) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry at ({}, {})",
                bad / cols.max(1),
                bad % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row vectors; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidDimension("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `A x`
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `A^T y`
    pub fn tr_matvec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows, "tr_matvec dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi != 0.0 {
                axpy(yi, self.row(i), &mut out);
            }
        }
        out
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::InvalidDimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a != 0.0 {
                    axpy(a, other.row(k), out.row_mut(i));
                }
            }
        }
        Ok(out)
    }

    pub fn select_rows(&self, idx: &[usize]) -> DenseMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        DenseMatrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn select_cols(&self, idx: &[usize]) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]))
    }

    /// Stacks blocks vertically. All blocks must share the column count.
    pub fn vstack(blocks: &[&DenseMatrix]) -> Result<DenseMatrix> {
        let cols = match blocks.first() {
            Some(b) => b.cols,
            None => return Err(Error::InvalidInput("empty block list".into())),
        };
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(Error::InvalidDimension("blocks differ in column count".into()));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            data.extend_from_slice(&b.data);
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Concatenates blocks horizontally.
    pub fn hstack(blocks: &[&DenseMatrix]) -> Result<DenseMatrix> {
        let rows = match blocks.first() {
            Some(b) => b.rows,
            None => return Err(Error::InvalidInput("empty block list".into())),
        };
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::InvalidDimension("blocks differ in row count".into()));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                data.extend_from_slice(b.row(i));
            }
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Writes the repo-wide CSV format: a `rows,cols` header, then one line per row.
    pub fn to_csv_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{},{}", self.rows, self.cols);
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(s, "{}", line.join(","));
        }
        s
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let (rows, cols) = parse_header(header)?;
        let mut data = Vec::with_capacity(rows * cols);
        for (k, line) in lines.enumerate() {
            let before = data.len();
            for tok in line.split(',') {
                data.push(parse_f64(tok)?);
            }
            if data.len() - before != cols {
                return Err(Error::Parse(format!("row {k} has {} entries, expected {cols}", data.len() - before)));
            }
        }
        if data.len() != rows * cols {
            return Err(Error::Parse(format!("expected {rows} rows, found {}", data.len() / cols.max(1))));
        }
        Self::new(rows, cols, data)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let mut parts = line.split(',').map(str::trim);
    let rows = parts.next().and_then(|s| s.parse().ok());
    let cols = parts.next().and_then(|s| s.parse().ok());
    match (rows, cols, parts.next()) {
        (Some(r), Some(c), None) => Ok((r, c)),
        _ => Err(Error::Parse(format!("bad header '{line}', expected 'rows,cols'"))),
    }
}

fn parse_f64(tok: &str) -> Result<f64> {
    tok.trim().parse::<f64>().map_err(|_| Error::Parse(format!("not a number: '{tok}'")))
}

/// Reads a signal: either one value per line, or a matrix-format file.
/// Matrices with more than one column are images and are flattened
/// column-major.
pub fn read_signal_str(text: &str) -> Result<Vec<f64>> {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty());
    match first {
        Some(l) if l.contains(',') => {
            let m = DenseMatrix::from_csv_str(text)?;
            let (r, c) = (m.rows(), m.cols());
            Ok((0..r * c).map(|k| m.get(k % r, k / r)).collect())
        }
        Some(_) => text.lines().map(str::trim).filter(|l| !l.is_empty()).map(parse_f64).collect(),
        None => Err(Error::Parse("empty signal file".into())),
    }
}

/// One value per line.
pub fn signal_to_csv_string(x: &[f64]) -> String {
    let mut s = String::new();
    for v in x {
        let _ = writeln!(s, "{v}");
    }
    s
}

/// Column-major image vector to a `rows,cols` matrix.
pub fn image_to_matrix(x: &[f64], rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |i, j| x[j * rows + i])
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Forward-difference operator: `(n-1) x n`, `-1` on the diagonal and `+1`
/// on the superdiagonal.
pub fn diff_operator_1d(n: usize) -> Result<DenseMatrix> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!("diff operator needs n >= 2, got {n}")));
    }
    Ok(DenseMatrix::from_fn(n - 1, n, |i, j| {
        if j == i {
            -1.0
        } else if j == i + 1 {
            1.0
        } else {
            0.0
        }
    }))
}

pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    DenseMatrix::from_fn(a.rows * b.rows, a.cols * b.cols, |i, j| {
        a.get(i / b.rows, j / b.cols) * b.get(i % b.rows, j % b.cols)
    })
}

/// Anisotropic image gradient: `[I_c ⊗ ∂_r ; ∂_c ⊗ I_r]` for an `r x c`
/// image in column-major order. The first block differences along columns
/// of the image (vertical neighbours), the second across columns.
pub fn gradient_operator_2d(img_rows: usize, img_cols: usize) -> Result<DenseMatrix> {
    if img_rows < 2 || img_cols < 2 {
        return Err(Error::InvalidDimension(format!(
            "gradient needs an image of at least 2x2, got {img_rows}x{img_cols}"
        )));
    }
    let top = kron(&DenseMatrix::identity(img_cols), &diff_operator_1d(img_rows)?);
    let bottom = kron(&diff_operator_1d(img_cols)?, &DenseMatrix::identity(img_rows));
    DenseMatrix::vstack(&[&top, &bottom])
}

/// Householder QR with column pivoting, `A P = Q R`.
///
/// Rank is the number of pivots whose residual column norm stays above
/// `tol` times the largest original column norm.
#[derive(Clone, Debug)]
pub struct PivotedQr {
    m: usize,
    n: usize,
    /// Column-major working storage: R above the diagonal, reflectors below.
    cols: Vec<Vec<f64>>,
    /// `beta_k` of each reflector `I - beta v v^T` (v has unit leading entry
    /// stored implicitly).
    betas: Vec<f64>,
    perm: Vec<usize>,
    rank: usize,
}

impl PivotedQr {
    pub fn new(a: &DenseMatrix, tol: f64) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut norms: Vec<f64> = cols.iter().map(|c| dot(c, c)).collect();
        let max_norm = norms.iter().fold(0.0_f64, |a, &b| a.max(b)).sqrt();
        let threshold = tol * max_norm;
        let steps = m.min(n);
        let mut betas = Vec::with_capacity(steps);
        let mut rank = 0;
        for k in 0..steps {
            // Recompute residual norms exactly; downdating loses accuracy on
            // the nearly dependent columns that decide the rank.
            for j in k..n {
                norms[j] = cols[j][k..].iter().map(|v| v * v).sum();
            }
            let (piv, best) = (k..n).map(|j| (j, norms[j])).fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if max_norm == 0.0 || best.sqrt() <= threshold {
                break;
            }
            cols.swap(k, piv);
            perm.swap(k, piv);
            norms.swap(k, piv);
            // Reflector zeroing cols[k][k+1..].
            let x = &cols[k];
            let alpha = x[k];
            let sigma: f64 = x[k + 1..].iter().map(|v| v * v).sum();
            let normx = (alpha * alpha + sigma).sqrt();
            let (beta, v0) = if sigma == 0.0 && alpha >= 0.0 {
                (0.0, 1.0)
            } else {
                let v0 = if alpha <= 0.0 { alpha - normx } else { -sigma / (alpha + normx) };
                (2.0 * v0 * v0 / (sigma + v0 * v0), v0)
            };
            {
                let col = &mut cols[k];
                for v in col[k + 1..].iter_mut() {
                    *v /= v0;
                }
                col[k] = normx;
            }
            betas.push(beta);
            let (head, tail) = cols.split_at_mut(k + 1);
            let refl = &head[k];
            for c in tail.iter_mut() {
                let mut s = c[k];
                for i in k + 1..m {
                    s += refl[i] * c[i];
                }
                s *= beta;
                c[k] -= s;
                for i in k + 1..m {
                    c[i] -= s * refl[i];
                }
            }
            rank += 1;
        }
        Self { m, n, cols, betas, perm, rank }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Applies `Q^T` in place.
    pub fn apply_qt(&self, b: &mut [f64]) {
        for (k, &beta) in self.betas.iter().enumerate() {
            let v = &self.cols[k];
            let mut s = b[k];
            for i in k + 1..self.m {
                s += v[i] * b[i];
            }
            s *= beta;
            b[k] -= s;
            for i in k + 1..self.m {
                b[i] -= s * v[i];
            }
        }
    }

    /// Applies `Q` in place.
    pub fn apply_q(&self, b: &mut [f64]) {
        for (k, &beta) in self.betas.iter().enumerate().rev() {
            let v = &self.cols[k];
            let mut s = b[k];
            for i in k + 1..self.m {
                s += v[i] * b[i];
            }
            s *= beta;
            b[k] -= s;
            for i in k + 1..self.m {
                b[i] -= s * v[i];
            }
        }
    }

    /// Basic least-squares solution of `min ||A x - b||`: coefficients of
    /// columns beyond the numerical rank are zero.
    pub fn solve_least_squares(&self, b: &[f64]) -> Vec<f64> {
        let mut qtb = b.to_vec();
        self.apply_qt(&mut qtb);
        let r = self.rank;
        let mut z = vec![0.0; r];
        for i in (0..r).rev() {
            let mut s = qtb[i];
            for j in i + 1..r {
                s -= self.cols[j][i] * z[j];
            }
            z[i] = s / self.cols[i][i];
        }
        let mut x = vec![0.0; self.n];
        for (k, &zk) in z.iter().enumerate() {
            x[self.perm[k]] = zk;
        }
        x
    }

    /// Columns `from..m` of the full orthogonal factor.
    pub fn q_columns(&self, from: usize) -> Vec<Vec<f64>> {
        (from..self.m)
            .map(|j| {
                let mut e = vec![0.0; self.m];
                e[j] = 1.0;
                self.apply_q(&mut e);
                e
            })
            .collect()
    }
}

/// Orthonormal basis of `{x : A x = 0}` as the columns of an `n x d` matrix.
pub fn nullspace_basis(a: &DenseMatrix, tol: f64) -> DenseMatrix {
    let n = a.cols();
    let qr = PivotedQr::new(&a.transpose(), tol);
    let cols = qr.q_columns(qr.rank());
    DenseMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

/// Whether the vertical stack of `blocks` has full column rank.
pub fn stacked_full_column_rank(blocks: &[&DenseMatrix], tol: f64) -> Result<bool> {
    let stack = DenseMatrix::vstack(blocks)?;
    if stack.cols() == 0 {
        return Ok(true);
    }
    Ok(PivotedQr::new(&stack, tol).rank() == stack.cols())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn diff_operator_small_cases() {
        assert_eq!(diff_operator_1d(2).unwrap(), DenseMatrix::from_rows(&[vec![-1.0, 1.0]]).unwrap());
        let d3 = diff_operator_1d(3).unwrap();
        assert_eq!(d3.data(), &[-1.0, 1.0, 0.0, 0.0, -1.0, 1.0]);
        let d5 = diff_operator_1d(5).unwrap();
        assert_eq!((d5.rows(), d5.cols()), (4, 5));
        assert!((0..4).all(|i| d5.row(i).iter().sum::<f64>() == 0.0));
        assert!(matches!(diff_operator_1d(1), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn gradient_2x2_expansion() {
        let g = gradient_operator_2d(2, 2).unwrap();
        let expected = DenseMatrix::from_rows(&[
            vec![-1.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, -1.0, 1.0],
            vec![-1.0, 0.0, 1.0, 0.0],
            vec![0.0, -1.0, 0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(g, expected);
        let g3 = gradient_operator_2d(3, 3).unwrap();
        assert_eq!((g3.rows(), g3.cols()), (12, 9));
        assert!(g3.matvec(&[2.5; 9]).iter().all(|&v| v == 0.0));
        assert!(gradient_operator_2d(1, 4).is_err());
    }

    #[test]
    fn nullspace_examples() {
        let z = nullspace_basis(&DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap(), RANK_TOL);
        assert_eq!(z.cols(), 1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((z.get(0, 0).abs() - s).abs() < 1e-14);
        assert!((z.get(0, 0) + z.get(1, 0)).abs() < 1e-14);

        let z = nullspace_basis(&DenseMatrix::identity(2), RANK_TOL);
        assert_eq!((z.rows(), z.cols()), (2, 0));

        let a = random_matrix(3, 5, 11);
        let z = nullspace_basis(&a, RANK_TOL);
        assert_eq!(z.cols(), 2);
        assert!(a.matmul(&z).unwrap().max_abs() <= 10.0 * RANK_TOL);
    }

    #[test]
    fn stacked_rank_examples() {
        let tol = RANK_TOL;
        assert!(stacked_full_column_rank(&[&DenseMatrix::identity(3)], tol).unwrap());
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[vec![2.0, 2.0]]).unwrap();
        assert!(!stacked_full_column_rank(&[&a, &b], tol).unwrap());
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[vec![0.0, 1.0]]).unwrap();
        assert!(stacked_full_column_rank(&[&a, &b], tol).unwrap());
        assert!(matches!(stacked_full_column_rank(&[], tol), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn csv_round_trip_and_signal_reader() {
        let a = DenseMatrix::from_rows(&[vec![1.5, -2.0], vec![1e-12, 3.0]]).unwrap();
        let back = DenseMatrix::from_csv_str(&a.to_csv_string()).unwrap();
        assert_eq!(a, back);
        assert!(a.to_csv_string().starts_with("2,2\n"));
        assert_eq!(read_signal_str("1\n-2.5\n0\n").unwrap(), vec![1.0, -2.5, 0.0]);
        // image rows,cols -> column-major vector
        assert_eq!(read_signal_str("2,2\n1,2\n3,4\n").unwrap(), vec![1.0, 3.0, 2.0, 4.0]);
        assert!(DenseMatrix::from_csv_str("2,2\n1,2\n3\n").is_err());
        assert!(DenseMatrix::new(1, 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn least_squares_basic_solution() {
        let a = random_matrix(6, 3, 5);
        let x = vec![0.3, -1.2, 2.0];
        let b = a.matvec(&x);
        let sol = PivotedQr::new(&a, RANK_TOL).solve_least_squares(&b);
        for (s, t) in sol.iter().zip(&x) {
            assert!((s - t).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn diff_kills_constants(n in 2usize..=64, c in -10.0f64..10.0) {
            let d = diff_operator_1d(n).unwrap();
            prop_assert!(d.matvec(&vec![c; n]).iter().all(|&v| v.abs() < 1e-12));
        }

        #[test]
        fn gradient_row_count(r in 2usize..=16, c in 2usize..=16) {
            let g = gradient_operator_2d(r, c).unwrap();
            prop_assert_eq!(g.rows(), c * (r - 1) + r * (c - 1));
            prop_assert_eq!(g.cols(), r * c);
        }

        #[test]
        fn nullspace_is_orthonormal_kernel(rows in 1usize..7, cols in 1usize..9, seed in any::<u64>()) {
            let tol = RANK_TOL;
            let a = random_matrix(rows, cols, seed);
            let z = nullspace_basis(&a, tol);
            prop_assert!(a.matmul(&z).unwrap().max_abs() <= 10.0 * tol);
            let ztz = z.transpose().matmul(&z).unwrap();
            for i in 0..z.cols() {
                for j in 0..z.cols() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((ztz.get(i, j) - want).abs() <= 10.0 * tol);
                }
            }
        }

        #[test]
        fn full_rank_iff_trivial_nullspace(r1 in 1usize..5, r2 in 0usize..4, cols in 1usize..7,
                                            dup in any::<bool>(), seed in any::<u64>()) {
            let a = random_matrix(r1, cols, seed);
            // Optionally make the second block a copy of the first to force deficiency.
            let b = if dup { a.clone() } else { random_matrix(r2, cols, seed ^ 0x9e37) };
            let full = stacked_full_column_rank(&[&a, &b], RANK_TOL).unwrap();
            let stack = DenseMatrix::vstack(&[&a, &b]).unwrap();
            prop_assert_eq!(full, nullspace_basis(&stack, RANK_TOL).cols() == 0);
        }
    }
}
