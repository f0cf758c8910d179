use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ManifoldSpec, RunError};
use crate::scalar::Scalar;

/// Grid resolution: sampled coordinates are multiples of 1/1024, exact in both modes.
pub const GRID: i64 = 1024;
/// Coordinates are drawn from `[−BOX, BOX]`.
pub const BOX: i64 = 3;

/// Uniform dyadic coordinate in `[−BOX, BOX]`.
pub fn dyadic<S: Scalar>(rng: &mut ChaCha8Rng) -> S {
    let k = rng.random_range(-BOX * GRID..=BOX * GRID);
    S::from_ratio(k, GRID).expect("nonzero grid")
}

/// Explicit spec points if present, else `count` seeded points inside the domain.
pub fn sample_points<S: Scalar>(spec: &ManifoldSpec, count: usize, seed: u64) -> Result<Vec<Vec<S>>, RunError> {
    if !spec.points.is_empty() {
        let points = spec.explicit_points::<S>().map_err(|e| RunError::Input(format!("explicit point: {e}")))?;
        for p in &points {
            spec.chart().check_point(p).map_err(|e| RunError::Input(format!("explicit point {}: {e}", format_point(p))))?;
        }
        return Ok(points);
    }
    let n = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limit = 1000 * count;
    let mut rejections = 0;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p: Vec<S> = (0..n).map(|_| dyadic(&mut rng)).collect();
        if spec.chart().contains(&p) {
            out.push(p);
        } else {
            rejections += 1;
            if rejections >= limit {
                return Err(RunError::SamplingExhausted { requested: count, rejections });
            }
        }
    }
    Ok(out)
}

pub fn format_point<S: Scalar>(p: &[S]) -> String {
    let parts: Vec<String> = p.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}
