//! Seeded synthetic label maps and fields for tests and benchmarks.
//!
//! All generators are deterministic in their seed so oracle values stay
//! portable across runs and machines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{DirectionField, LabelMap};

/// Voronoi partition of the raster under `k` random sites: each pixel takes
/// the label of its nearest site (integer squared distance, ties to the
/// smallest site index).
pub fn voronoi_labels(width: u32, height: u32, k: usize, seed: u64) -> LabelMap {
    assert!(k >= 1 && (k as u64) <= (width as u64) * (height as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sites: Vec<(i64, i64)> = Vec::with_capacity(k);
    while sites.len() < k {
        let s = (rng.gen_range(0..height) as i64, rng.gen_range(0..width) as i64);
        if !sites.contains(&s) {
            sites.push(s);
        }
    }
    let mut labels = Vec::with_capacity((width * height) as usize);
    for r in 0..height as i64 {
        for c in 0..width as i64 {
            let mut best = (i64::MAX, 0u32);
            for (i, &(sr, sc)) in sites.iter().enumerate() {
                let d = (r - sr) * (r - sr) + (c - sc) * (c - sc);
                if d < best.0 {
                    best = (d, i as u32);
                }
            }
            labels.push(best.1);
        }
    }
    LabelMap { width, height, labels }
}

/// Two labels: 1 inside the disc of the given center and radius, 0 outside.
pub fn disc_labels(width: u32, height: u32, center_row: f64, center_col: f64, radius: f64) -> LabelMap {
    let mut labels = Vec::with_capacity((width * height) as usize);
    for r in 0..height {
        for c in 0..width {
            let dr = r as f64 - center_row;
            let dc = c as f64 - center_col;
            labels.push(if dr * dr + dc * dc <= radius * radius { 1 } else { 0 });
        }
    }
    LabelMap { width, height, labels }
}

/// Nested axis-aligned rectangles: a pixel's label is the number of insets
/// it lies inside. `insets` must be ascending and leave a non-empty core.
pub fn nested_rect_labels(width: u32, height: u32, insets: &[u32]) -> LabelMap {
    for w in insets.windows(2) {
        assert!(w[0] < w[1], "insets must be ascending");
    }
    if let Some(&max) = insets.last() {
        assert!(2 * max < width && 2 * max < height, "innermost rectangle is empty");
    }
    let mut labels = Vec::with_capacity((width * height) as usize);
    for r in 0..height {
        for c in 0..width {
            let depth = insets
                .iter()
                .take_while(|&&m| {
                    r >= m && r < height - m && c >= m && c < width - m
                })
                .count();
            labels.push(depth as u32);
        }
    }
    LabelMap { width, height, labels }
}

/// Independent uniformly random unit vector per pixel.
pub fn random_unit_field(width: u32, height: u32, seed: u64) -> DirectionField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vectors = (0..(width as usize) * (height as usize))
        .map(|_| {
            let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            [angle.sin() as f32, angle.cos() as f32]
        })
        .collect();
    DirectionField { width, height, vectors }
}
