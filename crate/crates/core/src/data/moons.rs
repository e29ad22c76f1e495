//! Interleaving half-moon datasets in the plane.
//!
//! Moon `m` is a unit semicircle sampled on an inclusive grid of angles
//! `t in [0, pi]`:
//!
//! * even `m`: `(m + cos t, sin t)` (opening downward from above the axis),
//! * odd  `m`: `(m - cos t, 1/2 - sin t)` (flipped and raised by 1/2).
//!
//! Consecutive moons therefore interleave exactly like the usual two-moons
//! construction, and the third moon repeats the pattern one unit further
//! right. Isotropic Gaussian noise with the requested standard deviation is
//! added per coordinate.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::graph::Dataset;

/// Parameters for [`generate_moons`].
#[derive(Debug, Clone, Copy)]
pub struct MoonsSpec {
    pub n_points: usize,
    /// 2 or 3.
    pub n_moons: usize,
    /// Standard deviation of the per-coordinate Gaussian displacement.
    pub noise_std: f64,
    pub seed: u64,
}

/// Generates the dataset with true labels = moon index. Points are grouped
/// by moon; the first `n_points % n_moons` moons receive one extra point.
/// Bit-identical for identical spec.
pub fn generate_moons(spec: &MoonsSpec) -> Result<Dataset> {
    if spec.n_moons != 2 && spec.n_moons != 3 {
        return Err(Error::Config(format!(
            "n_moons must be 2 or 3, got {}",
            spec.n_moons
        )));
    }
    if spec.n_points < spec.n_moons.max(2) {
        return Err(Error::Config(format!(
            "need at least {} points for {} moons",
            spec.n_moons.max(2),
            spec.n_moons
        )));
    }
    if !(spec.noise_std.is_finite() && spec.noise_std >= 0.0) {
        return Err(Error::Config(format!(
            "noise_std must be non-negative, got {}",
            spec.noise_std
        )));
    }

    let k = spec.n_moons;
    let base = spec.n_points / k;
    let extra = spec.n_points % k;
    let mut points = Array2::zeros((spec.n_points, 2));
    let mut labels = Vec::with_capacity(spec.n_points);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = if spec.noise_std > 0.0 {
        Some(Normal::new(0.0, spec.noise_std).map_err(|e| Error::Config(e.to_string()))?)
    } else {
        None
    };

    let mut row = 0;
    for m in 0..k {
        let count = base + usize::from(m < extra);
        for i in 0..count {
            let t = if count == 1 {
                0.0
            } else {
                std::f64::consts::PI * i as f64 / (count - 1) as f64
            };
            let (mut x, mut y) = if m % 2 == 0 {
                (m as f64 + t.cos(), t.sin())
            } else {
                (m as f64 - t.cos(), 0.5 - t.sin())
            };
            if let Some(n) = &noise {
                x += n.sample(&mut rng);
                y += n.sample(&mut rng);
            }
            points[[row, 0]] = x;
            points[[row, 1]] = y;
            labels.push(m);
            row += 1;
        }
    }
    Dataset::with_labels(points, labels)
}

/// Distance from a point to the ideal (noise-free) arc of its moon.
/// Used by tests; exposed for fixtures and diagnostics.
pub fn distance_to_arc(moon: usize, x: f64, y: f64) -> f64 {
    // Undo the moon placement, then measure against the unit circle with
    // the correct half-plane.
    let (cx, cy, flip) = if moon % 2 == 0 {
        (moon as f64, 0.0, false)
    } else {
        (moon as f64, 0.5, true)
    };
    let (dx, dy) = if flip {
        (cx - x, cy - y)
    } else {
        (x - cx, y - cy)
    };
    let r = (dx * dx + dy * dy).sqrt();
    if dy >= 0.0 {
        (r - 1.0).abs()
    } else {
        // Below the sampled half: nearest arc point is an endpoint (+-1, 0).
        let ex = (dx.abs() - 1.0).abs().min((dx.abs() + 1.0).abs());
        (ex * ex + dy * dy).sqrt()
    }
}
