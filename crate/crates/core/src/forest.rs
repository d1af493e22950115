//! Partitioning a direction field into super-BPDs.
//!
//! Each pixel points at one of its 8 neighbors (the one best aligned with
//! its direction vector). If the two pixels' directions agree within a
//! threshold, the pixel adopts that neighbor as its parent; otherwise it is
//! a root. The parent image partitions the raster into a forest of
//! stripe-like trees whose roots concentrate near region symmetry axes.

use crate::error::{Error, Result};
use crate::field::{DirectionField, LabelMap};

/// Direction-agreement threshold for grouping a pixel with its next pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionConfig {
    pub theta_a_deg: f64,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self { theta_a_deg: 45.0 }
    }
}

impl PartitionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta_a_deg > 0.0 && self.theta_a_deg < 180.0) {
            return Err(Error::InvalidConfig(format!(
                "theta_a must lie in (0, 180) degrees, got {}",
                self.theta_a_deg
            )));
        }
        Ok(())
    }
}

/// Parent image plus the set of root pixels.
///
/// After finalization every parent chain terminates at a self-parented
/// pixel, and `roots` is exactly the ascending list of those pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParentForest {
    pub width: u32,
    pub height: u32,
    /// Row-major parent pixel index per pixel.
    pub parent: Vec<u32>,
    /// Self-parented pixels, ascending.
    pub roots: Vec<u32>,
}

impl ParentForest {
    #[inline]
    pub fn is_root(&self, p: u32) -> bool {
        self.parent[p as usize] == p
    }

    /// Walk `steps` parent links from `p`, stopping early at a root.
    pub fn walk(&self, p: u32, steps: u32) -> u32 {
        let mut q = p;
        for _ in 0..steps {
            let next = self.parent[q as usize];
            if next == q {
                break;
            }
            q = next;
        }
        q
    }

    /// Follow parent links from `p` to its root (no memoization).
    pub fn root_of(&self, p: u32) -> u32 {
        let mut q = p;
        while self.parent[q as usize] != q {
            q = self.parent[q as usize];
        }
        q
    }
}

/// 8-neighborhood scan order used for next-pixel selection and tie-breaking:
/// N, NE, E, SE, S, SW, W, NW as (row, col) offsets.
const NEIGHBOR_OFFSETS: [(i64, i64); 8] = [
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
];

const DIAG: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// Unit vectors of `NEIGHBOR_OFFSETS`.
const NEIGHBOR_DIRS: [(f64, f64); 8] = [
    (-1.0, 0.0),
    (-DIAG, DIAG),
    (0.0, 1.0),
    (DIAG, DIAG),
    (1.0, 0.0),
    (DIAG, -DIAG),
    (0.0, -1.0),
    (-DIAG, -DIAG),
];

/// The neighbor pixel pointed to by `p`'s direction vector: the 8-neighbor
/// whose offset direction maximizes the dot product, ties resolved by scan
/// order. Returns `None` when that neighbor falls outside the raster.
pub fn next_pixel(field: &DirectionField, p: u32) -> Option<u32> {
    let w = field.width as i64;
    let h = field.height as i64;
    let row = p as i64 / w;
    let col = p as i64 % w;
    let v = field.vectors[p as usize];
    let (dr, dc) = (v[0] as f64, v[1] as f64);

    let mut best = 0usize;
    let mut best_dot = f64::NEG_INFINITY;
    for (i, d) in NEIGHBOR_DIRS.iter().enumerate() {
        let dot = dr * d.0 + dc * d.1;
        if dot > best_dot {
            best_dot = dot;
            best = i;
        }
    }
    let (or, oc) = NEIGHBOR_OFFSETS[best];
    let (nr, nc) = (row + or, col + oc);
    if nr < 0 || nr >= h || nc < 0 || nc >= w {
        None
    } else {
        Some((nr * w + nc) as u32)
    }
}

#[inline]
fn angle_between(a: [f32; 2], b: [f32; 2]) -> f64 {
    let dot = (a[0] as f64 * b[0] as f64 + a[1] as f64 * b[1] as f64).clamp(-1.0, 1.0);
    dot.acos()
}

/// Build the parent forest of a field: a raster-order grouping pass followed
/// by cycle finalization.
///
/// A pixel adopts its next pixel as parent when the angle between their
/// direction vectors is strictly below `theta_a`; otherwise it is a root.
/// The raw parent image is a functional graph that can contain directed
/// cycles (slowly rotating flows); each cycle is broken by promoting its
/// smallest pixel index to a root.
pub fn build_forest(field: &DirectionField, cfg: &PartitionConfig) -> ParentForest {
    let n = field.pixel_count();
    let theta_a = cfg.theta_a_deg.to_radians();
    let mut parent: Vec<u32> = (0..n as u32).collect();

    for p in 0..n as u32 {
        if let Some(np) = next_pixel(field, p) {
            if angle_between(field.vectors[p as usize], field.vectors[np as usize]) < theta_a {
                parent[p as usize] = np;
            }
        }
    }

    break_cycles(&mut parent);

    let roots = (0..n as u32).filter(|&p| parent[p as usize] == p).collect();
    ParentForest { width: field.width, height: field.height, parent, roots }
}

/// Promote the smallest pixel index of every directed cycle to a root.
fn break_cycles(parent: &mut [u32]) {
    const UNSEEN: u8 = 0;
    const ACTIVE: u8 = 1;
    const DONE: u8 = 2;
    let mut state = vec![UNSEEN; parent.len()];
    let mut path: Vec<u32> = Vec::new();

    for start in 0..parent.len() as u32 {
        if state[start as usize] != UNSEEN {
            continue;
        }
        path.clear();
        let mut p = start;
        while state[p as usize] == UNSEEN {
            state[p as usize] = ACTIVE;
            path.push(p);
            let q = parent[p as usize];
            if q == p {
                break;
            }
            p = q;
        }
        // Landing on an ACTIVE non-root pixel means the walk closed a cycle.
        if state[p as usize] == ACTIVE && parent[p as usize] != p {
            let mut min = p;
            let mut q = parent[p as usize];
            while q != p {
                min = min.min(q);
                q = parent[q as usize];
            }
            parent[min as usize] = min;
        }
        for &q in &path {
            state[q as usize] = DONE;
        }
    }
}

/// Label every pixel with the pixel index of its tree root.
pub fn flatten(forest: &ParentForest) -> LabelMap {
    const UNSET: u32 = u32::MAX;
    let n = forest.parent.len();
    let mut labels = vec![UNSET; n];
    let mut chain: Vec<u32> = Vec::new();
    for p in 0..n as u32 {
        let mut q = p;
        while labels[q as usize] == UNSET {
            if forest.parent[q as usize] == q {
                labels[q as usize] = q;
                break;
            }
            chain.push(q);
            q = forest.parent[q as usize];
        }
        let root = labels[q as usize];
        for &x in &chain {
            labels[x as usize] = root;
        }
        chain.clear();
    }
    LabelMap { width: forest.width, height: forest.height, labels }
}
