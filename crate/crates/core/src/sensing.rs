//! Measurement matrices: i.i.d. Gaussian and parallel-beam tomography.
//!
//! Tomography geometry: pixel side 1, the `N x N` image centred at the
//! origin with row 0 on top, pixel `(i, j)` covering
//! `x ∈ [j - N/2, j + 1 - N/2)`, `y ∈ [N/2 - i - 1, N/2 - i)`. For angle
//! `θ` a ray with offset `s` is the line `{ s n + t u }` with
//! `u = (cos θ, sin θ)` and `n = (-sin θ, cos θ)`, so `θ = 0` gives
//! horizontal rays. Offsets are `linspace(-w/2, w/2, p)` with detector
//! width `w = √2 N` and `p = round(√2 N)`. Rows are angle-major.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::rng::rng_from_seed;

/// Intersection lengths at or below this count as a miss.
const LENGTH_TOL: f64 = 1e-12;

pub const DEFAULT_PERTURB_SCALE: f64 = 1e-3;

pub fn gaussian_matrix(m: usize, n: usize, seed: u64) -> Result<DenseMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidDimension(format!("gaussian matrix needs m, n >= 1, got {m}x{n}")));
    }
    let mut rng = rng_from_seed(seed);
    let data: Vec<f64> = (0..m * n).map(|_| rng.sample(StandardNormal)).collect();
    DenseMatrix::new(m, n, data)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mask {
    Circle,
    Rectangle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TomoVariant {
    Binary,
    Perturbed,
    Real,
}

/// Kinds of sensing matrix accepted by the tools.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasurementKind {
    #[serde(rename = "gaussian")]
    Gaussian,
    #[serde(rename = "tomo-binary")]
    TomoBinary,
    #[serde(rename = "tomo-perturbed")]
    TomoPerturbed,
    #[serde(rename = "tomo-real")]
    TomoReal,
}

impl MeasurementKind {
    pub fn tomo_variant(self) -> Option<TomoVariant> {
        match self {
            Self::Gaussian => None,
            Self::TomoBinary => Some(TomoVariant::Binary),
            Self::TomoPerturbed => Some(TomoVariant::Perturbed),
            Self::TomoReal => Some(TomoVariant::Real),
        }
    }
}

impl FromStr for MeasurementKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "tomo-binary" => Ok(Self::TomoBinary),
            "tomo-perturbed" => Ok(Self::TomoPerturbed),
            "tomo-real" => Ok(Self::TomoReal),
            _ => Err(Error::Parse(format!("unknown measurement kind '{s}'"))),
        }
    }
}

impl fmt::Display for MeasurementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gaussian => "gaussian",
            Self::TomoBinary => "tomo-binary",
            Self::TomoPerturbed => "tomo-perturbed",
            Self::TomoReal => "tomo-real",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomoGeometry {
    pub side: usize,
    /// Radians.
    pub angles: Vec<f64>,
    pub rays: usize,
    pub detector_width: f64,
    pub mask: Mask,
}

impl TomoGeometry {
    /// `num_angles` equidistant angles `k π / num_angles`.
    pub fn standard(side: usize, num_angles: usize, mask: Mask) -> Self {
        let w = std::f64::consts::SQRT_2 * side as f64;
        Self {
            side,
            angles: (0..num_angles).map(|k| k as f64 * std::f64::consts::PI / num_angles as f64).collect(),
            rays: w.round() as usize,
            detector_width: w,
            mask,
        }
    }

    pub fn offsets(&self) -> Vec<f64> {
        let half = self.detector_width / 2.0;
        if self.rays == 1 {
            return vec![0.0];
        }
        let step = self.detector_width / (self.rays - 1) as f64;
        (0..self.rays).map(|r| -half + r as f64 * step).collect()
    }

    /// Pixels whose centres lie in the inscribed circle (all for a rectangle).
    pub fn pixel_mask(&self) -> Vec<bool> {
        match self.mask {
            Mask::Rectangle => vec![true; self.side * self.side],
            Mask::Circle => circle_mask(self.side),
        }
    }
}

/// Column-major mask of pixel centres inside the inscribed circle.
pub fn circle_mask(side: usize) -> Vec<bool> {
    let h = side as f64 / 2.0;
    (0..side * side)
        .map(|k| {
            let (i, j) = (k % side, k / side);
            let (cx, cy) = (j as f64 + 0.5 - h, h - i as f64 - 0.5);
            cx * cx + cy * cy <= h * h
        })
        .collect()
}

/// Length of the line `{ s n + t u }` inside `[x0, x1) x [y0, y1)`.
///
/// Lines along a pixel edge belong to the square whose lower/left edge
/// they run on.
fn clip_length(s: f64, cos: f64, sin: f64, x0: f64, y0: f64) -> f64 {
    let (x1, y1) = (x0 + 1.0, y0 + 1.0);
    let (px, py) = (-s * sin, s * cos);
    if sin.abs() <= 1e-15 {
        return if py >= y0 && py < y1 { 1.0 } else { 0.0 };
    }
    if cos.abs() <= 1e-15 {
        return if px >= x0 && px < x1 { 1.0 } else { 0.0 };
    }
    let (ta, tb) = ((x0 - px) / cos, (x1 - px) / cos);
    let (tc, td) = ((y0 - py) / sin, (y1 - py) / sin);
    let lo = ta.min(tb).max(tc.min(td));
    let hi = ta.max(tb).min(tc.max(td));
    (hi - lo).max(0.0)
}

/// Tomographic system with the bookkeeping of which ray gave each row.
#[derive(Clone, Debug)]
pub struct TomoSystem {
    /// `m x N^2`, zero columns outside the mask.
    pub matrix: DenseMatrix,
    /// `(angle index, ray index)` of each kept row.
    pub rays: Vec<(usize, usize)>,
}

pub fn tomo_system(geom: &TomoGeometry, variant: TomoVariant, perturb_scale: f64, seed: u64) -> Result<TomoSystem> {
    let n_side = geom.side;
    if n_side < 2 {
        return Err(Error::InvalidDimension("tomography needs N >= 2".into()));
    }
    if geom.angles.is_empty() || geom.rays == 0 {
        return Err(Error::InvalidInput("tomography needs at least one angle and one ray".into()));
    }
    let n = n_side * n_side;
    let h = n_side as f64 / 2.0;
    let mask = geom.pixel_mask();
    let offsets = geom.offsets();
    let mut rng = rng_from_seed(seed);
    let mut data = Vec::new();
    let mut rays = Vec::new();
    let mut row = vec![0.0; n];
    for (ai, &theta) in geom.angles.iter().enumerate() {
        let (sin, cos) = theta.sin_cos();
        for (ri, &s) in offsets.iter().enumerate() {
            // Under the circle mask the object is the inscribed disk; a ray
            // missing it measures nothing even if it grazes a corner pixel.
            if geom.mask == Mask::Circle && s.abs() > h {
                continue;
            }
            let mut hit = false;
            for (k, slot) in row.iter_mut().enumerate() {
                *slot = 0.0;
                if !mask[k] {
                    continue;
                }
                let (i, j) = (k % n_side, k / n_side);
                let len = clip_length(s, cos, sin, j as f64 - h, h - i as f64 - 1.0);
                if len > LENGTH_TOL {
                    *slot = match variant {
                        TomoVariant::Real => len,
                        TomoVariant::Binary => 1.0,
                        TomoVariant::Perturbed => 1.0 + rng.random_range(-perturb_scale..=perturb_scale),
                    };
                    hit = true;
                }
            }
            if hit {
                data.extend_from_slice(&row);
                rays.push((ai, ri));
            }
        }
    }
    let m = rays.len();
    Ok(TomoSystem { matrix: DenseMatrix::new(m, n, data)?, rays })
}

pub fn tomo_matrix(geom: &TomoGeometry, variant: TomoVariant, perturb_scale: f64, seed: u64) -> Result<DenseMatrix> {
    Ok(tomo_system(geom, variant, perturb_scale, seed)?.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_examples() {
        let a = gaussian_matrix(3, 5, 1).unwrap();
        assert_eq!((a.rows(), a.cols()), (3, 5));
        assert_eq!(a, gaussian_matrix(3, 5, 1).unwrap());
        let big = gaussian_matrix(200, 200, 2).unwrap();
        let k = big.data().len() as f64;
        let mean = big.data().iter().sum::<f64>() / k;
        let var = big.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
        assert!(mean.abs() < 0.02 && (0.95..1.05).contains(&var), "{mean} {var}");
        assert!(gaussian_matrix(0, 3, 1).is_err());
    }

    #[test]
    fn two_by_two_horizontal_rays() {
        let geom = TomoGeometry::standard(2, 1, Mask::Rectangle);
        assert_eq!(geom.rays, 3);
        let sys = tomo_system(&geom, TomoVariant::Binary, 0.0, 0).unwrap();
        assert_eq!(sys.matrix.rows(), 1);
        assert_eq!(sys.matrix.row(0).iter().sum::<f64>(), 2.0);
    }

    #[test]
    fn rays_through_centres_have_unit_length() {
        let geom = TomoGeometry { side: 4, angles: vec![0.0], rays: 4, detector_width: 3.0, mask: Mask::Rectangle };
        let a = tomo_matrix(&geom, TomoVariant::Real, 0.0, 0).unwrap();
        assert_eq!(a.rows(), 4);
        for r in 0..4 {
            let row = a.row(r);
            assert_eq!(row.iter().filter(|v| **v != 0.0).count(), 4);
            assert!(row.iter().all(|&v| v == 0.0 || (v - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn circle_mask_columns() {
        let geom = TomoGeometry::standard(64, 16, Mask::Circle);
        let a = tomo_matrix(&geom, TomoVariant::Binary, 0.0, 0).unwrap();
        let inside = circle_mask(64).iter().filter(|&&b| b).count();
        let used = (0..a.cols()).filter(|&j| (0..a.rows()).any(|i| a.get(i, j) != 0.0)).count();
        assert_eq!(used, inside);
    }

    #[test]
    fn binary_and_perturbed_follow_real() {
        let geom = TomoGeometry::standard(8, 7, Mask::Circle);
        let real = tomo_matrix(&geom, TomoVariant::Real, 0.0, 3).unwrap();
        let bin = tomo_matrix(&geom, TomoVariant::Binary, 0.0, 3).unwrap();
        let pert = tomo_matrix(&geom, TomoVariant::Perturbed, 1e-3, 3).unwrap();
        assert_eq!(pert, tomo_matrix(&geom, TomoVariant::Perturbed, 1e-3, 3).unwrap());
        for (k, &r) in real.data().iter().enumerate() {
            assert_eq!(bin.data()[k], if r > 0.0 { 1.0 } else { 0.0 });
            if r > 0.0 {
                assert!((pert.data()[k] - 1.0).abs() <= 1e-3);
            } else {
                assert_eq!(pert.data()[k], 0.0);
            }
        }
    }

    #[test]
    fn unpruned_row_count() {
        let geom = TomoGeometry::standard(6, 5, Mask::Rectangle);
        let sys = tomo_system(&geom, TomoVariant::Real, 0.0, 0).unwrap();
        assert!(sys.matrix.rows() <= 5 * geom.rays);
        assert!(sys.rays.windows(2).all(|w| w[0] < w[1]));
    }
}
