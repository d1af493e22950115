//! Boundary-to-pixel direction fields.
//!
//! A direction field stores, per pixel, the unit vector pointing from the
//! pixel's nearest region-boundary point to the pixel itself. Boundaries are
//! realized as half-integer *sites*: the midpoints between 4-adjacent pixels
//! whose labels differ. Every pixel is then at distance >= 0.5 from every
//! site, so the direction is well defined over the whole raster. The image
//! frame is not a boundary; only inter-region edges produce sites.
//!
//! To keep tests exact, all distance comparisons run on doubled (integer)
//! coordinates: pixel `(r, c)` sits at `(2r, 2c)` and a site midpoint at its
//! doubled half-integer position, so squared distances are exact integers.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Per-pixel region identifiers, row-major. Labels need not be contiguous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    pub width: u32,
    pub height: u32,
    pub labels: Vec<u32>,
}

impl LabelMap {
    pub fn new(width: u32, height: u32, labels: Vec<u32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster("zero dimension".into()));
        }
        if labels.len() != (width as usize) * (height as usize) {
            return Err(Error::InvalidRaster(format!(
                "label buffer holds {} entries, raster is {}x{}",
                labels.len(),
                width,
                height
            )));
        }
        Ok(Self { width, height, labels })
    }

    #[inline]
    pub fn index(&self, row: u32, col: u32) -> usize {
        row as usize * self.width as usize + col as usize
    }

    #[inline]
    pub fn label(&self, row: u32, col: u32) -> u32 {
        self.labels[self.index(row, col)]
    }

    pub fn pixel_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of distinct labels present.
    pub fn distinct_labels(&self) -> usize {
        let mut seen: Vec<u32> = self.labels.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// Pixel count of every region, keyed by label.
    pub fn region_sizes(&self) -> HashMap<u32, u64> {
        let mut sizes = HashMap::new();
        for &l in &self.labels {
            *sizes.entry(l).or_insert(0u64) += 1;
        }
        sizes
    }

    /// Relabel to contiguous ids `0..K-1` in raster order of first occurrence.
    pub fn compact(&self) -> LabelMap {
        let mut remap: HashMap<u32, u32> = HashMap::new();
        let mut next = 0u32;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                *remap.entry(l).or_insert_with(|| {
                    let id = next;
                    next += 1;
                    id
                })
            })
            .collect();
        LabelMap { width: self.width, height: self.height, labels }
    }
}

/// Per-pixel 2D unit vectors `(d_row, d_col)`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionField {
    pub width: u32,
    pub height: u32,
    pub vectors: Vec<[f32; 2]>,
}

/// Loosest squared-norm deviation accepted when constructing a field; file
/// readers enforce the same bound. Freshly generated fields stay well within
/// 1e-4 (see `unit_norm_max_error`).
pub const UNIT_NORM_SQ_TOLERANCE: f64 = 2.5e-3;

impl DirectionField {
    pub fn new(width: u32, height: u32, vectors: Vec<[f32; 2]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster("zero dimension".into()));
        }
        if vectors.len() != (width as usize) * (height as usize) {
            return Err(Error::InvalidRaster(format!(
                "vector buffer holds {} entries, raster is {}x{}",
                vectors.len(),
                width,
                height
            )));
        }
        for (i, v) in vectors.iter().enumerate() {
            let sq = (v[0] as f64) * (v[0] as f64) + (v[1] as f64) * (v[1] as f64);
            if !sq.is_finite() || (sq - 1.0).abs() > UNIT_NORM_SQ_TOLERANCE {
                return Err(Error::InvalidRaster(format!(
                    "non-unit vector ({}, {}) at pixel {}",
                    v[0], v[1], i
                )));
            }
        }
        Ok(Self { width, height, vectors })
    }

    #[inline]
    pub fn index(&self, row: u32, col: u32) -> usize {
        row as usize * self.width as usize + col as usize
    }

    #[inline]
    pub fn at(&self, row: u32, col: u32) -> [f32; 2] {
        self.vectors[self.index(row, col)]
    }

    pub fn pixel_count(&self) -> usize {
        self.vectors.len()
    }

    /// Largest deviation of any squared norm from 1.
    pub fn unit_norm_max_error(&self) -> f64 {
        self.vectors
            .iter()
            .map(|v| ((v[0] as f64).powi(2) + (v[1] as f64).powi(2) - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// A boundary site: the midpoint of a 4-adjacent differing-label pixel pair,
/// stored in doubled coordinates so it stays an exact integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Site {
    pub row2: u32,
    pub col2: u32,
}

impl Site {
    /// Row coordinate in pixel units (half-integer).
    pub fn row(&self) -> f64 {
        self.row2 as f64 / 2.0
    }

    /// Column coordinate in pixel units (half-integer).
    pub fn col(&self) -> f64 {
        self.col2 as f64 / 2.0
    }
}

/// Boundary sites of a label map, in row-major midpoint order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundarySiteSet {
    pub sites: Vec<Site>,
}

impl BoundarySiteSet {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

/// Enumerate the boundary sites of `gt`: one site per 4-adjacent pixel pair
/// with differing labels, ordered row-major by midpoint position.
///
/// A single-label map yields an empty set.
pub fn boundary_sites(gt: &LabelMap) -> BoundarySiteSet {
    let (w, h) = (gt.width, gt.height);
    let mut sites = Vec::new();
    // Doubled rows interleave horizontal-pair midpoints (even rows) with
    // vertical-pair midpoints (odd rows); scanning them in order yields the
    // row-major midpoint ordering directly.
    for row2 in 0..(2 * h - 1) {
        if row2 % 2 == 0 {
            let r = row2 / 2;
            for c in 0..w.saturating_sub(1) {
                if gt.label(r, c) != gt.label(r, c + 1) {
                    sites.push(Site { row2, col2: 2 * c + 1 });
                }
            }
        } else {
            let r = (row2 - 1) / 2;
            for c in 0..w {
                if gt.label(r, c) != gt.label(r + 1, c) {
                    sites.push(Site { row2, col2: 2 * c });
                }
            }
        }
    }
    BoundarySiteSet { sites }
}

/// Exact nearest-site assignment for every pixel.
///
/// `dist_sq4` stores squared distances in quarter-pixel units (the doubled
/// grid), so `dist_sq4 / 4.0` is the exact squared Euclidean distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearestSites {
    pub width: u32,
    pub height: u32,
    /// Index into the site set of the nearest site, per pixel.
    pub site_index: Vec<u32>,
    /// Squared distance to that site on the doubled grid, per pixel.
    pub dist_sq4: Vec<u64>,
}

impl NearestSites {
    /// Euclidean distance from pixel `(row, col)` to its nearest site.
    pub fn distance(&self, row: u32, col: u32) -> f64 {
        let i = row as usize * self.width as usize + col as usize;
        (self.dist_sq4[i] as f64).sqrt() / 2.0
    }

    /// Exact squared Euclidean distance in pixel units.
    pub fn distance_sq(&self, row: u32, col: u32) -> f64 {
        let i = row as usize * self.width as usize + col as usize;
        self.dist_sq4[i] as f64 / 4.0
    }
}

/// Exact Euclidean nearest-site transform with deterministic tie-breaking:
/// among equidistant sites the smallest site index wins, matching an
/// exhaustive scan over all pixel-site pairs.
///
/// Runs a separable lower-envelope pass over the doubled integer grid. To
/// make the tie rule exact, parabolas are keyed by `S * dist_sq4 + index`
/// (`S` = site count), which orders candidates lexicographically by
/// (distance, index) and never collides at integer query points.
pub fn nearest_site_transform(
    sites: &BoundarySiteSet,
    width: u32,
    height: u32,
) -> Result<NearestSites> {
    if sites.is_empty() {
        return Err(Error::NoBoundary);
    }
    let w = width as usize;
    let h = height as usize;
    let width2 = 2 * w - 1;
    let site_count = sites.len() as u64;

    // Bucket sites per doubled column; row-major generation order means each
    // bucket is already ascending in (row2, index).
    let mut columns: Vec<Vec<(u32, u32)>> = vec![Vec::new(); width2];
    for (idx, s) in sites.sites.iter().enumerate() {
        columns[s.col2 as usize].push((s.row2, idx as u32));
    }

    // Column pass: per (pixel row, doubled column), the key of the best site
    // in that column. u64::MAX marks columns without sites.
    const EMPTY: u64 = u64::MAX;
    let mut column_best = vec![EMPTY; h * width2];
    for (cx, column) in columns.iter().enumerate() {
        if column.is_empty() {
            continue;
        }
        let mut j = 0usize;
        for r in 0..h {
            let y2 = 2 * r as i64;
            let dist = |k: usize| {
                let d = (column[k].0 as i64 - y2).unsigned_abs();
                d * d
            };
            while j + 1 < column.len() && dist(j + 1) < dist(j) {
                j += 1;
            }
            column_best[r * width2 + cx] = site_count * dist(j) + column[j].1 as u64;
        }
    }

    // Row pass: lower envelope of parabolas key(x) = S*(x - cx)^2 + F over
    // the doubled x axis, queried at even x (pixel columns). Boundaries are
    // exact rationals; adjacent arcs never tie at an integer x, so queries
    // resolve to the unique lexicographic minimum.
    let mut site_index = vec![0u32; w * h];
    let mut dist_sq4 = vec![0u64; w * h];
    site_index
        .par_chunks_mut(w)
        .zip(dist_sq4.par_chunks_mut(w))
        .enumerate()
        .for_each(|(r, (idx_row, dist_row))| {
            let g = &column_best[r * width2..(r + 1) * width2];
            let s = site_count as i128;

            // Envelope state: parabola centers, offsets, and left boundaries
            // as rationals (num/den, den > 0). Arc 0 extends to -infinity.
            let mut centers: Vec<i128> = Vec::with_capacity(width2);
            let mut offsets: Vec<i128> = Vec::with_capacity(width2);
            let mut bnum: Vec<i128> = Vec::with_capacity(width2 + 1);
            let mut bden: Vec<i128> = Vec::with_capacity(width2 + 1);
            bnum.push(0);
            bden.push(1); // placeholder for the -infinity boundary

            for (cx, &f) in g.iter().enumerate() {
                if f == EMPTY {
                    continue;
                }
                let cq = cx as i128;
                let fq = f as i128;
                loop {
                    match centers.last() {
                        None => {
                            centers.push(cq);
                            offsets.push(fq);
                            break;
                        }
                        Some(&cp) => {
                            let fp = *offsets.last().unwrap();
                            // Crossing of the two key parabolas.
                            let num = (fq - fp) + s * (cq * cq - cp * cp);
                            let den = 2 * s * (cq - cp);
                            let k = centers.len() - 1;
                            // Pop the top arc if the crossing is at or left
                            // of its own left boundary.
                            let pop = k > 0 && num * bden[k] <= bnum[k] * den;
                            if pop {
                                centers.pop();
                                offsets.pop();
                                bnum.pop();
                                bden.pop();
                            } else {
                                centers.push(cq);
                                offsets.push(fq);
                                bnum.push(num);
                                bden.push(den);
                                break;
                            }
                        }
                    }
                }
            }

            let mut k = 0usize;
            for c in 0..w {
                let x = 2 * c as i128;
                while k + 1 < centers.len() && bnum[k + 1] < x * bden[k + 1] {
                    k += 1;
                }
                let d = x - centers[k];
                let key = (s * d * d + offsets[k]) as u64;
                idx_row[c] = (key % site_count) as u32;
                dist_row[c] = key / site_count;
            }
        });

    Ok(NearestSites { width, height, site_index, dist_sq4 })
}

/// Build the ground-truth direction field of a label map: each pixel's unit
/// vector points from its nearest boundary site toward the pixel center.
pub fn gt_field(gt: &LabelMap) -> Result<DirectionField> {
    let sites = boundary_sites(gt);
    if sites.is_empty() {
        return Err(Error::DegenerateSegmentation);
    }
    let nearest = nearest_site_transform(&sites, gt.width, gt.height)?;
    let w = gt.width as usize;
    let mut vectors = vec![[0.0f32; 2]; gt.pixel_count()];
    vectors
        .par_chunks_mut(w)
        .enumerate()
        .for_each(|(r, row_out)| {
            for (c, out) in row_out.iter_mut().enumerate() {
                let site = sites.sites[nearest.site_index[r * w + c] as usize];
                // Doubled-grid offset from site to pixel; never zero.
                let dr = 2.0 * r as f64 - site.row2 as f64;
                let dc = 2.0 * c as f64 - site.col2 as f64;
                let norm = (dr * dr + dc * dc).sqrt();
                *out = [(dr / norm) as f32, (dc / norm) as f32];
            }
        });
    DirectionField::new(gt.width, gt.height, vectors)
}

/// Rotate every vector by an independent zero-mean Gaussian angle with
/// standard deviation `sigma_deg`. Deterministic for a given seed.
pub fn perturb(field: &DirectionField, sigma_deg: f64, seed: u64) -> DirectionField {
    assert!(sigma_deg >= 0.0, "sigma_deg must be non-negative");
    if sigma_deg == 0.0 {
        return field.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma_deg.to_radians()).expect("valid sigma");
    let vectors = field
        .vectors
        .iter()
        .map(|v| {
            let theta: f64 = normal.sample(&mut rng);
            let (sin, cos) = theta.sin_cos();
            let dr = v[0] as f64;
            let dc = v[1] as f64;
            [(cos * dr - sin * dc) as f32, (sin * dr + cos * dc) as f32]
        })
        .collect();
    DirectionField { width: field.width, height: field.height, vectors }
}

/// Discrepancy between a reference field and a prediction, weighted per
/// pixel by the inverse square root of the ground-truth region size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldDiscrepancy {
    pub total: f64,
    pub l2_term: f64,
    pub angle_term: f64,
}

/// Sum over pixels of `w(p) * (|D - D'|^2 + alpha * acos^2<D, D'>)` with
/// `w(p) = 1 / sqrt(region size at p)`. The inner product is clamped to
/// `[-1, 1]` before the arccos.
pub fn field_discrepancy(
    reference: &DirectionField,
    pred: &DirectionField,
    gt: &LabelMap,
    alpha: f64,
) -> Result<FieldDiscrepancy> {
    if reference.width != pred.width || reference.height != pred.height {
        return Err(Error::DimensionMismatch(
            reference.width,
            reference.height,
            pred.width,
            pred.height,
        ));
    }
    if reference.width != gt.width || reference.height != gt.height {
        return Err(Error::DimensionMismatch(
            reference.width,
            reference.height,
            gt.width,
            gt.height,
        ));
    }
    assert!(alpha >= 0.0, "alpha must be non-negative");

    let sizes = gt.region_sizes();
    let mut l2_term = 0.0f64;
    let mut angle_term = 0.0f64;
    for (i, (a, b)) in reference.vectors.iter().zip(&pred.vectors).enumerate() {
        // Identical vectors contribute exactly zero; computing acos of their
        // slightly-off-unit dot product would not.
        if a == b {
            continue;
        }
        let weight = 1.0 / (sizes[&gt.labels[i]] as f64).sqrt();
        let dr = a[0] as f64 - b[0] as f64;
        let dc = a[1] as f64 - b[1] as f64;
        l2_term += weight * (dr * dr + dc * dc);
        let dot = (a[0] as f64 * b[0] as f64 + a[1] as f64 * b[1] as f64).clamp(-1.0, 1.0);
        let angle = dot.acos();
        angle_term += weight * angle * angle;
    }
    Ok(FieldDiscrepancy { total: l2_term + alpha * angle_term, l2_term, angle_term })
}
