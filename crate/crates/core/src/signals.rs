//! Random test signals: sparse vectors, 1D gradient-sparse signals and
//! 2D gradient-sparse images, each as real, nonnegative or binary.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{diff_operator_1d, DenseMatrix, PivotedQr, RANK_TOL};
use crate::rng::{rng_from_seed, Rng};

/// Attempts before a generator gives up on a degenerate draw.
const MAX_RESAMPLES: usize = 100;

/// Smallest magnitude accepted for a "nonzero" drawn value or difference.
const MIN_MAGNITUDE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueClass {
    Real,
    Nonnegative,
    Binary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Sparse,
    #[serde(rename = "gradient_sparse_1d", alias = "gradient-sparse-1d")]
    GradientSparse1d,
    #[serde(rename = "gradient_sparse_2d", alias = "gradient-sparse-2d")]
    GradientSparse2d,
}

impl FromStr for ValueClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(Self::Real),
            "nonnegative" | "nonneg" => Ok(Self::Nonnegative),
            "binary" => Ok(Self::Binary),
            _ => Err(Error::Parse(format!("unknown value class '{s}'"))),
        }
    }
}

impl fmt::Display for ValueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Real => "real",
            Self::Nonnegative => "nonnegative",
            Self::Binary => "binary",
        })
    }
}

impl FromStr for Structure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sparse" => Ok(Self::Sparse),
            "gradient_sparse_1d" | "gradient-sparse-1d" | "tv1d" => Ok(Self::GradientSparse1d),
            "gradient_sparse_2d" | "gradient-sparse-2d" | "tv2d" => Ok(Self::GradientSparse2d),
            _ => Err(Error::Parse(format!("unknown structure '{s}'"))),
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Sparse => "sparse",
            Self::GradientSparse1d => "gradient_sparse_1d",
            Self::GradientSparse2d => "gradient_sparse_2d",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    /// Signal length, or the image side for 2D.
    pub n: usize,
    pub rho: f64,
    pub class: ValueClass,
    pub structure: Structure,
    pub seed: u64,
}

impl SignalSpec {
    /// Length of `D x` the sparsity is measured on.
    fn sparsity_base(&self) -> usize {
        match self.structure {
            Structure::Sparse => self.n,
            Structure::GradientSparse1d => self.n.saturating_sub(1),
            Structure::GradientSparse2d => 2 * self.n * self.n.saturating_sub(1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidInput(format!("rho must lie in (0, 1), got {}", self.rho)));
        }
        let base = self.sparsity_base();
        if self.structure != Structure::Sparse && self.n < 2 {
            return Err(Error::InvalidDimension("gradient-sparse signals need n >= 2".into()));
        }
        if (self.rho * base as f64).round() < 1.0 {
            return Err(Error::InvalidInput(format!("rho = {} leaves no nonzeros out of {base}", self.rho)));
        }
        Ok(())
    }
}

/// Dispatch on `spec.structure`; images come back column-major.
pub fn gen_signal(spec: &SignalSpec) -> Result<Vec<f64>> {
    match spec.structure {
        Structure::Sparse => gen_sparse_1d(spec),
        Structure::GradientSparse1d => gen_gradient_sparse_1d(spec),
        Structure::GradientSparse2d => Ok(gen_gradient_sparse_2d(spec, None)?.pixels),
    }
}

fn nonzero_value(rng: &mut Rng, class: ValueClass) -> f64 {
    if class == ValueClass::Binary {
        return 1.0;
    }
    loop {
        let v: f64 = rng.sample(StandardNormal);
        if v.abs() >= MIN_MAGNITUDE {
            return if class == ValueClass::Nonnegative { v.abs() } else { v };
        }
    }
}

pub fn gen_sparse_1d(spec: &SignalSpec) -> Result<Vec<f64>> {
    if spec.structure != Structure::Sparse {
        return Err(Error::InvalidInput("gen_sparse_1d needs the sparse structure".into()));
    }
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let s = (spec.rho * spec.n as f64).round() as usize;
    let mut x = vec![0.0; spec.n];
    for i in sample(&mut rng, spec.n, s) {
        x[i] = nonzero_value(&mut rng, spec.class);
    }
    Ok(x)
}

/// Projection of a standard normal `v` onto `N(D_Λ)`:
/// `x = v - D_Λ^T w` with `w` the least-squares solution of `D_Λ^T w = v`.
pub fn gen_cosupport_projection(d: &DenseMatrix, lambda: &[usize], seed: u64) -> Result<Vec<f64>> {
    let mut rng = rng_from_seed(seed);
    cosupport_projection(d, lambda, &mut rng)
}

fn cosupport_projection(d: &DenseMatrix, lambda: &[usize], rng: &mut Rng) -> Result<Vec<f64>> {
    if let Some(&bad) = lambda.iter().find(|&&j| j >= d.rows()) {
        return Err(Error::InvalidInput(format!("row {bad} outside D with {} rows", d.rows())));
    }
    let v: Vec<f64> = (0..d.cols()).map(|_| rng.sample(StandardNormal)).collect();
    if lambda.is_empty() {
        return Ok(v);
    }
    let dlt = d.select_rows(lambda).transpose();
    let qr = PivotedQr::new(&dlt, RANK_TOL);
    if qr.rank() < lambda.len() {
        return Err(Error::ResampleNeeded("D_Λ is rank deficient".into()));
    }
    let w = qr.solve_least_squares(&v);
    let fit = dlt.matvec(&w);
    Ok(v.iter().zip(&fit).map(|(a, b)| a - b).collect())
}

/// Binary signal with cosupport `lambda`, 0-based: `x[0] = 1`, then
/// `x[i+1] = x[i]` if `i ∈ Λ`, else `1 - x[i]`.
pub fn binary_from_cosupport(lambda: &[usize], n: usize) -> Vec<f64> {
    let mut keep = vec![false; n.saturating_sub(1)];
    for &i in lambda {
        if i + 1 < n {
            keep[i] = true;
        }
    }
    let mut x = Vec::with_capacity(n);
    if n == 0 {
        return x;
    }
    x.push(1.0);
    for &k in &keep {
        let prev = *x.last().expect("nonempty");
        x.push(if k { prev } else { 1.0 - prev });
    }
    x
}

/// Rows `j` with `|(D x)_j| <= tol`.
pub fn cosupport_of(d: &DenseMatrix, x: &[f64], tol: f64) -> Vec<usize> {
    d.matvec(x).iter().enumerate().filter(|(_, v)| v.abs() <= tol).map(|(j, _)| j).collect()
}

pub fn gen_gradient_sparse_1d(spec: &SignalSpec) -> Result<Vec<f64>> {
    if spec.structure != Structure::GradientSparse1d {
        return Err(Error::InvalidInput("needs the gradient_sparse_1d structure".into()));
    }
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let n = spec.n;
    let p = n - 1;
    let s = (spec.rho * p as f64).round() as usize;
    let d = diff_operator_1d(n)?;
    for _ in 0..MAX_RESAMPLES {
        let mut lambda: Vec<usize> = sample(&mut rng, p, p - s).into_vec();
        lambda.sort_unstable();
        if spec.class == ValueClass::Binary {
            return Ok(binary_from_cosupport(&lambda, n));
        }
        let mut x = match cosupport_projection(&d, &lambda, &mut rng) {
            Ok(x) => x,
            Err(Error::ResampleNeeded(_)) => continue,
            Err(e) => return Err(e),
        };
        if spec.class == ValueClass::Nonnegative {
            x.iter_mut().for_each(|v| *v = v.abs());
        }
        // Within a block the projection leaves rounding noise; flatten it
        // so the cosupport is exact.
        let in_lambda = {
            let mut m = vec![false; p];
            lambda.iter().for_each(|&j| m[j] = true);
            m
        };
        let mut start = 0;
        for j in 0..=p {
            if j == p || !in_lambda[j] {
                let mean = x[start..=j].iter().sum::<f64>() / (j + 1 - start) as f64;
                x[start..=j].iter_mut().for_each(|v| *v = mean);
                start = j + 1;
            }
        }
        if cosupport_of(&d, &x, MIN_MAGNITUDE) == lambda {
            return Ok(x);
        }
    }
    Err(Error::ResampleNeeded(format!("no signal with the drawn cosupport after {MAX_RESAMPLES} tries")))
}

/// An `rows x cols` pixel grid, optionally restricted to a mask.
///
/// With a mask, pixels outside it are fixed at zero and dropped from the
/// unknowns; the gradient keeps every edge touching a masked pixel, so an
/// edge to an outside pixel becomes a plain `±x_i` row.
#[derive(Clone, Debug)]
pub struct Grid {
    pub rows: usize,
    pub cols: usize,
    mask: Vec<bool>,
    /// Full index of each unknown.
    active: Vec<usize>,
    /// Reduced index of each full pixel.
    slot: Vec<Option<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Grid {
    pub fn new(rows: usize, cols: usize, mask: Option<&[bool]>) -> Result<Self> {
        let n = rows * cols;
        let mask = match mask {
            Some(m) if m.len() != n => {
                return Err(Error::InvalidDimension(format!("mask has {} entries, grid {n}", m.len())))
            }
            Some(m) => m.to_vec(),
            None => vec![true; n],
        };
        let active: Vec<usize> = (0..n).filter(|&i| mask[i]).collect();
        let mut slot = vec![None; n];
        for (k, &i) in active.iter().enumerate() {
            slot[i] = Some(k);
        }
        let mut edges = Vec::new();
        for j in 0..cols {
            for i in 0..rows.saturating_sub(1) {
                edges.push((j * rows + i, j * rows + i + 1));
            }
        }
        for j in 0..cols.saturating_sub(1) {
            for i in 0..rows {
                edges.push((j * rows + i, (j + 1) * rows + i));
            }
        }
        edges.retain(|&(a, b)| mask[a] || mask[b]);
        Ok(Self { rows, cols, mask, active, slot, edges })
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    /// Gradient edges `(from, to)`, in the row order of the gradient operator.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Gradient restricted to the unknowns, `|edges| x |active|`.
    pub fn gradient_operator(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.edges.len(), self.active.len());
        for (r, &(a, b)) in self.edges.iter().enumerate() {
            if let Some(k) = self.slot[a] {
                d.set(r, k, -1.0);
            }
            if let Some(k) = self.slot[b] {
                d.set(r, k, 1.0);
            }
        }
        d
    }

    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.active.iter().map(|&i| full[i]).collect()
    }

    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.rows * self.cols];
        for (&i, &v) in self.active.iter().zip(reduced) {
            full[i] = v;
        }
        full
    }

    /// Nonzero gradient entries of a full image, outside pixels read as 0.
    pub fn gradient_nnz(&self, full: &[f64]) -> usize {
        let val = |i: usize| if self.mask[i] { full[i] } else { 0.0 };
        self.edges.iter().filter(|&&(a, b)| val(a) != val(b)).count()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratedImage {
    /// Column-major, `side x side`; zero outside the mask.
    pub pixels: Vec<f64>,
    pub side: usize,
    pub gradient_nnz: usize,
    pub achieved_rho: f64,
    /// False when the search ended outside `±0.02` of the target.
    pub reached: bool,
}

#[derive(Clone, Copy, Debug)]
struct Rect {
    top: usize,
    left: usize,
    height: usize,
    width: usize,
}

impl Rect {
    fn random(rng: &mut Rng, side: usize) -> Self {
        let max = (side / 3).max(1);
        let height = rng.random_range(1..=max);
        let width = rng.random_range(1..=max);
        Self { top: rng.random_range(0..=side - height), left: rng.random_range(0..=side - width), height, width }
    }

    fn toggle(&self, img: &mut [bool], side: usize) {
        for j in self.left..self.left + self.width {
            for i in self.top..self.top + self.height {
                img[j * side + i] ^= true;
            }
        }
    }
}

/// Band within which the 2D search stops early.
const SEARCH_BAND: f64 = 0.005;

/// Band that counts as reaching the requested sparsity.
pub const SPARSITY_BAND_2D: f64 = 0.02;

/// XOR random rectangles into a binary image, keeping each add/remove step
/// only if it brings `||∇x||_0 / p` closer to `rho`; at most `10 N` steps.
/// Real and nonnegative classes then give each 4-connected component its
/// own random value.
pub fn gen_gradient_sparse_2d(spec: &SignalSpec, mask: Option<&[bool]>) -> Result<GeneratedImage> {
    if spec.structure != Structure::GradientSparse2d {
        return Err(Error::InvalidInput("needs the gradient_sparse_2d structure".into()));
    }
    spec.validate()?;
    let side = spec.n;
    let grid = Grid::new(side, side, mask)?;
    let p = grid.edges().len();
    if p == 0 {
        return Err(Error::InvalidInput("mask leaves no gradient entries".into()));
    }
    let mut rng = rng_from_seed(spec.seed);
    let mut img = vec![false; side * side];
    let nnz = |img: &[bool]| {
        let val = |i: usize| img[i] && grid.mask[i];
        grid.edges.iter().filter(|&&(a, b)| val(a) != val(b)).count()
    };
    let gap = |count: usize| (count as f64 / p as f64 - spec.rho).abs();
    let mut rects: Vec<Rect> = Vec::new();
    let mut count = 0;
    for _ in 0..10 * side {
        if gap(count) <= SEARCH_BAND {
            break;
        }
        let remove = !rects.is_empty() && rng.random_bool(0.3);
        let (rect, idx) = if remove {
            let k = rng.random_range(0..rects.len());
            (rects[k], Some(k))
        } else {
            (Rect::random(&mut rng, side), None)
        };
        rect.toggle(&mut img, side);
        let next = nnz(&img);
        if gap(next) < gap(count) {
            count = next;
            match idx {
                Some(k) => {
                    rects.swap_remove(k);
                }
                None => rects.push(rect),
            }
        } else {
            rect.toggle(&mut img, side);
        }
    }
    let binary: Vec<f64> = (0..side * side).map(|i| if img[i] && grid.mask[i] { 1.0 } else { 0.0 }).collect();
    let pixels = match spec.class {
        ValueClass::Binary => binary,
        class => relabel_components(&grid, &binary, class, &mut rng),
    };
    let gradient_nnz = grid.gradient_nnz(&pixels);
    let achieved_rho = gradient_nnz as f64 / p as f64;
    Ok(GeneratedImage {
        pixels,
        side,
        gradient_nnz,
        achieved_rho,
        reached: (achieved_rho - spec.rho).abs() <= SPARSITY_BAND_2D,
    })
}

/// Distinct random values per 4-connected component. Zero components that
/// touch the outside of the mask stay zero so the boundary edges keep their
/// state.
fn relabel_components(grid: &Grid, binary: &[f64], class: ValueClass, rng: &mut Rng) -> Vec<f64> {
    let (rows, cols) = (grid.rows, grid.cols);
    let n = rows * cols;
    let mut label = vec![usize::MAX; n];
    let mut out = vec![0.0; n];
    let mut stack = Vec::new();
    for start in grid.active.iter().copied() {
        if label[start] != usize::MAX {
            continue;
        }
        let mut members = Vec::new();
        let mut touches_outside = false;
        label[start] = start;
        stack.push(start);
        while let Some(k) = stack.pop() {
            members.push(k);
            let (i, j) = (k % rows, k / rows);
            let mut nbrs = [None; 4];
            if i > 0 {
                nbrs[0] = Some(k - 1);
            }
            if i + 1 < rows {
                nbrs[1] = Some(k + 1);
            }
            if j > 0 {
                nbrs[2] = Some(k - rows);
            }
            if j + 1 < cols {
                nbrs[3] = Some(k + rows);
            }
            for nb in nbrs.into_iter().flatten() {
                if !grid.mask[nb] {
                    touches_outside = true;
                } else if label[nb] == usize::MAX && binary[nb] == binary[start] {
                    label[nb] = start;
                    stack.push(nb);
                }
            }
        }
        let keep_zero = binary[start] == 0.0 && touches_outside;
        let value = if keep_zero { 0.0 } else { nonzero_value(rng, class) };
        for k in members {
            out[k] = value;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gradient_operator_2d;
    use proptest::prelude::*;

    fn spec(n: usize, rho: f64, class: ValueClass, structure: Structure, seed: u64) -> SignalSpec {
        SignalSpec { n, rho, class, structure, seed }
    }

    #[test]
    fn sparse_examples() {
        let x = gen_sparse_1d(&spec(10, 0.3, ValueClass::Real, Structure::Sparse, 1)).unwrap();
        assert_eq!(x.iter().filter(|v| **v != 0.0).count(), 3);
        let b = gen_sparse_1d(&spec(50, 0.2, ValueClass::Binary, Structure::Sparse, 2)).unwrap();
        assert!(b.iter().all(|&v| v == 0.0 || v == 1.0));
        let s = spec(40, 0.25, ValueClass::Nonnegative, Structure::Sparse, 3);
        assert_eq!(gen_sparse_1d(&s).unwrap(), gen_sparse_1d(&s).unwrap());
        assert!(gen_sparse_1d(&s).unwrap().iter().all(|&v| v >= 0.0));
        assert!(gen_sparse_1d(&spec(10, 1.0, ValueClass::Real, Structure::Sparse, 1)).is_err());
        assert!(gen_sparse_1d(&spec(10, 0.01, ValueClass::Real, Structure::Sparse, 1)).is_err());
    }

    #[test]
    fn algorithm_one_examples() {
        assert_eq!(binary_from_cosupport(&[0, 2], 4), vec![1.0, 1.0, 0.0, 0.0]);
        assert_eq!(binary_from_cosupport(&[], 3), vec![1.0, 0.0, 1.0]);
        assert_eq!(binary_from_cosupport(&[0, 1], 3), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn projection_examples() {
        let d = diff_operator_1d(3).unwrap();
        let x = gen_cosupport_projection(&d, &[0], 4).unwrap();
        assert!((x[0] - x[1]).abs() < 1e-12);
        let v = gen_cosupport_projection(&d, &[], 4).unwrap();
        let mut rng = rng_from_seed(4);
        let expect: Vec<f64> = (0..3).map(|_| rng.sample(StandardNormal)).collect();
        assert_eq!(v, expect);
        let d = diff_operator_1d(6).unwrap();
        let c = gen_cosupport_projection(&d, &[0, 1, 2, 3, 4], 9).unwrap();
        assert!(c.iter().all(|v| (v - c[0]).abs() < 1e-12));
        let dup = DenseMatrix::from_rows(&[vec![1.0, -1.0], vec![2.0, -2.0]]).unwrap();
        assert!(matches!(gen_cosupport_projection(&dup, &[0, 1], 1), Err(Error::ResampleNeeded(_))));
    }

    #[test]
    fn gradient_sparse_1d_is_exact() {
        let d = diff_operator_1d(100).unwrap();
        for class in [ValueClass::Real, ValueClass::Nonnegative, ValueClass::Binary] {
            for (k, rho) in [0.05, 0.3, 0.5, 0.95].into_iter().enumerate() {
                let x = gen_gradient_sparse_1d(&spec(100, rho, class, Structure::GradientSparse1d, k as u64)).unwrap();
                let nnz = 99 - cosupport_of(&d, &x, 0.0).len();
                assert_eq!(nnz, (rho * 99.0).round() as usize, "{class} {rho}");
                match class {
                    ValueClass::Nonnegative => assert!(x.iter().all(|&v| v >= 0.0)),
                    ValueClass::Binary => assert!(x.iter().all(|&v| v == 0.0 || v == 1.0)),
                    ValueClass::Real => {}
                }
            }
        }
    }

    #[test]
    fn grid_without_mask_matches_gradient() {
        let g = Grid::new(3, 4, None).unwrap();
        assert_eq!(g.gradient_operator(), gradient_operator_2d(3, 4).unwrap());
        let mask = vec![true, false, true, true];
        let g = Grid::new(2, 2, Some(&mask)).unwrap();
        let d = g.gradient_operator();
        assert_eq!((d.rows(), d.cols()), (4, 3));
        assert_eq!(g.expand(&g.restrict(&[1.0, 2.0, 3.0, 4.0])), vec![1.0, 0.0, 3.0, 4.0]);
    }

    #[test]
    fn full_frame_rectangle_is_constant() {
        let mut img = vec![false; 16];
        Rect { top: 0, left: 0, height: 4, width: 4 }.toggle(&mut img, 4);
        let g = Grid::new(4, 4, None).unwrap();
        let x: Vec<f64> = img.iter().map(|&b| b as u8 as f64).collect();
        assert_eq!(g.gradient_nnz(&x), 0);
    }

    #[test]
    fn image_sparsity_band_and_relabel() {
        let s = spec(64, 0.1, ValueClass::Binary, Structure::GradientSparse2d, 11);
        let img = gen_gradient_sparse_2d(&s, None).unwrap();
        assert!((0.08..=0.12).contains(&img.achieved_rho), "{}", img.achieved_rho);
        assert_eq!(img.pixels, gen_gradient_sparse_2d(&s, None).unwrap().pixels);
        let real = gen_gradient_sparse_2d(&SignalSpec { class: ValueClass::Real, ..s }, None).unwrap();
        let g = Grid::new(64, 64, None).unwrap();
        let support = |x: &[f64]| -> Vec<bool> { g.edges().iter().map(|&(a, b)| x[a] != x[b]).collect() };
        assert_eq!(support(&real.pixels), support(&img.pixels));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn algorithm_one_cosupport(n in 2usize..40, bits in proptest::collection::vec(any::<bool>(), 39)) {
            let lambda: Vec<usize> = (0..n - 1).filter(|&i| bits[i]).collect();
            let x = binary_from_cosupport(&lambda, n);
            prop_assert_eq!(cosupport_of(&diff_operator_1d(n).unwrap(), &x, 0.0), lambda);
        }

        #[test]
        fn masked_relabel_keeps_support(seed in any::<u64>(), rho in 0.05f64..0.4) {
            let side = 16;
            let c = (side as f64 - 1.0) / 2.0;
            let mask: Vec<bool> = (0..side * side)
                .map(|k| {
                    let (i, j) = ((k % side) as f64, (k / side) as f64);
                    (i - c).powi(2) + (j - c).powi(2) <= (side as f64 / 2.0).powi(2)
                })
                .collect();
            let s = spec(side, rho, ValueClass::Binary, Structure::GradientSparse2d, seed);
            let b = gen_gradient_sparse_2d(&s, Some(&mask)).unwrap();
            let r = gen_gradient_sparse_2d(&SignalSpec { class: ValueClass::Nonnegative, ..s }, Some(&mask)).unwrap();
            prop_assert_eq!(b.gradient_nnz, r.gradient_nnz);
            prop_assert!(r.pixels.iter().all(|&v| v >= 0.0));
            for k in 0..side * side {
                if !mask[k] {
                    prop_assert_eq!(r.pixels[k], 0.0);
                }
            }
        }
    }
}
