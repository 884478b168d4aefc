use certilab::rng::rng_from_seed;
use certilab::sensing::{circle_mask, tomo_system, Mask, TomoGeometry, TomoVariant};
use rand::Rng;

/// Per-pixel length of the line `{ s (-sin, cos) + t (cos, sin) }` by
/// stepping along it and binning midpoints.
fn march(side: usize, theta: f64, s: f64, step: f64) -> Vec<f64> {
    let h = side as f64 / 2.0;
    let (sin, cos) = theta.sin_cos();
    let (px, py) = (-s * sin, s * cos);
    let reach = side as f64;
    let mut out = vec![0.0; side * side];
    let mut t = -reach + step / 2.0;
    while t < reach {
        let (x, y) = (px + t * cos, py + t * sin);
        let (jf, if_) = ((x + h).floor(), (h - y).ceil() - 1.0);
        if jf >= 0.0 && if_ >= 0.0 && (jf as usize) < side && (if_ as usize) < side {
            out[jf as usize * side + if_ as usize] += step;
        }
        t += step;
    }
    out
}

#[test]
fn real_lengths_match_pixel_marching() {
    let mut rng = rng_from_seed(11);
    for side in [3usize, 5, 8] {
        let angles: Vec<f64> = (0..4).map(|_| rng.random_range(0.05..3.1)).collect();
        let geom = TomoGeometry {
            side,
            angles: angles.clone(),
            rays: 7,
            detector_width: 1.3 * side as f64,
            mask: Mask::Rectangle,
        };
        let sys = tomo_system(&geom, TomoVariant::Real, 0.0, 0).unwrap();
        let offsets = geom.offsets();
        let mut kept = sys.rays.iter().enumerate();
        for (ai, &theta) in angles.iter().enumerate() {
            for (ri, &s) in offsets.iter().enumerate() {
                let oracle = march(side, theta, s, 2e-5);
                let total: f64 = oracle.iter().sum();
                match kept.clone().next() {
                    Some((row, &(a, r))) if (a, r) == (ai, ri) => {
                        kept.next();
                        for (k, &len) in oracle.iter().enumerate() {
                            let got = sys.matrix.get(row, k);
                            assert!((got - len).abs() < 1e-3, "N={side} angle {theta} s={s} pixel {k}: {got} vs {len}");
                        }
                    }
                    _ => assert!(total < 1e-3, "pruned ray N={side} angle {theta} s={s} has length {total}"),
                }
            }
        }
    }
}

#[test]
fn horizontal_row_sums_count_masked_pixels() {
    for side in [4usize, 6, 8] {
        let geom =
            TomoGeometry { side, angles: vec![0.0], rays: side, detector_width: side as f64 - 1.0, mask: Mask::Circle };
        let sys = tomo_system(&geom, TomoVariant::Real, 0.0, 0).unwrap();
        let mask = circle_mask(side);
        let offsets = geom.offsets();
        for (row, &(_, ri)) in sys.rays.iter().enumerate() {
            let sum: f64 = sys.matrix.row(row).iter().sum();
            // The ray at height s sits in image row i with h - i - 1 <= s < h - i.
            let i = (side as f64 / 2.0 - offsets[ri]).ceil() as usize - 1;
            let width = (0..side).filter(|&j| mask[j * side + i]).count();
            assert!((sum - width as f64).abs() < 1e-12, "N={side} ray {ri}: {sum} vs {width}");
            assert!(sum <= side as f64);
            let oracle: f64 =
                march(side, 0.0, offsets[ri], 1e-4).iter().zip(&mask).filter(|(_, &m)| m).map(|(v, _)| v).sum();
            assert!((sum - oracle).abs() < 1e-3);
        }
    }
}

#[test]
fn circle_mask_gives_every_angle_the_same_ray_count() {
    for side in [8usize, 16, 32] {
        for num_angles in [3usize, 7, 12, 20] {
            let geom = TomoGeometry::standard(side, num_angles, Mask::Circle);
            let sys = tomo_system(&geom, TomoVariant::Binary, 0.0, 0).unwrap();
            let mut counts = vec![0usize; num_angles];
            for &(a, _) in &sys.rays {
                counts[a] += 1;
            }
            let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
            assert!(hi - lo <= 1, "N={side}, {num_angles} angles: {counts:?}");
        }
    }
}

#[test]
fn binary_is_the_support_of_real() {
    let geom = TomoGeometry::standard(10, 5, Mask::Circle);
    let real = tomo_system(&geom, TomoVariant::Real, 0.0, 3).unwrap();
    let bin = tomo_system(&geom, TomoVariant::Binary, 0.0, 3).unwrap();
    assert_eq!(real.rays, bin.rays);
    for (r, b) in real.matrix.data().iter().zip(bin.matrix.data()) {
        assert_eq!(*b, if *r > 0.0 { 1.0 } else { 0.0 });
    }
}
