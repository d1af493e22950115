//! Merging super-BPDs into a final segmentation.
//!
//! The forest's roots are first dilated into an initial segmentation by
//! re-parenting each root onto a raster-forward neighboring root. A region
//! adjacency graph over the surviving roots is then scored with the
//! direction similarity of the field a few parent steps inside each region,
//! and greedily partitioned: edges with very low similarity become repulsive
//! constraints, the rest are consumed in decreasing similarity order against
//! size-adaptive thresholds, and leftover tiny regions are absorbed by their
//! most similar non-repulsive neighbor.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{DirectionField, LabelMap};
use crate::forest::{build_forest, flatten, ParentForest, PartitionConfig};

/// Tunables of the graph-partition stage. Angles are radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegConfig {
    /// Parent steps walked inward when sampling directions for Eq.-style
    /// similarity (0 samples the boundary pixels themselves).
    pub steps: u32,
    /// Similarity below this marks an edge repulsive.
    pub s0: f64,
    /// Merge threshold when both regions are large.
    pub theta_l: f64,
    /// Merge threshold when either region is small.
    pub theta_s: f64,
    /// Area at or above which a region counts as large, in pixels.
    pub area_small: u64,
    /// Regions below this area are absorbed in the cleanup phase.
    pub area_tiny: u64,
}

impl Default for SegConfig {
    fn default() -> Self {
        Self {
            steps: 3,
            s0: std::f64::consts::PI / 18.0,
            theta_l: 150f64.to_radians(),
            theta_s: 115f64.to_radians(),
            area_small: 1500,
            area_tiny: 200,
        }
    }
}

impl SegConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=std::f64::consts::PI).contains(&self.s0) {
            return Err(Error::InvalidConfig(format!(
                "s0 must lie in [0, pi], got {}",
                self.s0
            )));
        }
        if !(self.theta_s >= 0.0 && self.theta_s < self.theta_l) {
            return Err(Error::InvalidConfig(format!(
                "need 0 <= theta_s < theta_l, got theta_s={} theta_l={}",
                self.theta_s, self.theta_l
            )));
        }
        if self.theta_l > std::f64::consts::PI {
            return Err(Error::InvalidConfig(format!(
                "theta_l must not exceed pi, got {}",
                self.theta_l
            )));
        }
        if !(self.area_tiny > 0 && self.area_tiny < self.area_small) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < area_tiny < area_small, got a_t={} a_s={}",
                self.area_tiny, self.area_small
            )));
        }
        Ok(())
    }
}

/// An adjacency edge between two regions, identified by dense region ids.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionEdge {
    /// Dense index of the first region (`a < b`).
    pub a: u32,
    pub b: u32,
    /// 4-adjacent cross-boundary pixel pairs in row-major discovery order;
    /// `.0` lies in region `a`, `.1` in region `b`.
    pub pairs: Vec<(u32, u32)>,
    /// Direction similarity in `[0, pi]`; NaN until computed.
    pub similarity: f64,
    /// Fraction of boundary pairs whose directions point at each other.
    /// Directions on either side of a real region boundary always point
    /// away from it, so any substantial convergence certifies that the
    /// contact runs inside one region (a symmetry-axis seam).
    pub convergence: f64,
}

/// Region adjacency graph over the surviving roots of an initial
/// segmentation. Region `i` is rooted at pixel `roots[i]` and covers
/// `areas[i]` pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionGraph {
    pub width: u32,
    pub height: u32,
    /// Root pixel index per region, ascending.
    pub roots: Vec<u32>,
    /// Pixel count per region; sums to `width * height`.
    pub areas: Vec<u64>,
    pub edges: Vec<RegionEdge>,
}

/// Margin on the converging tests below, as a direction component along the
/// pair separation.
const CONVERGING_MARGIN: f64 = 0.1;

/// An edge is certified as region-internal when at least this fraction of
/// its boundary pairs converge.
const CONVERGENCE_MERGE_FRACTION: f64 = 0.5;

/// Threshold merges between regions of at least `EVIDENCE_EXEMPT_AREA`
/// pixels need this many boundary pairs: two sizable regions meeting in a
/// one- or two-pixel contact with accidentally parallel directions (wedge
/// tips at region corners) carry no usable similarity evidence. Regions
/// below the exemption are too small to produce longer contacts at all.
const MIN_EVIDENCE_PAIRS: usize = 3;
const EVIDENCE_EXEMPT_AREA: u64 = 64;

/// Two nearby roots sit on opposite sides of the same symmetry axis when
/// their directions point at each other: each vector has a clearly positive
/// component along the direction toward the other root.
fn converging(field: &DirectionField, r: u32, q: u32) -> bool {
    let w = field.width as i64;
    let (rr, rc) = (r as i64 / w, r as i64 % w);
    let (qr, qc) = (q as i64 / w, q as i64 % w);
    let (ur, uc) = (qr as f64 - rr as f64, qc as f64 - rc as f64);
    let norm = (ur * ur + uc * uc).sqrt();
    let (ur, uc) = (ur / norm, uc / norm);
    let a = field.vectors[r as usize];
    let b = field.vectors[q as usize];
    let toward_q = a[0] as f64 * ur + a[1] as f64 * uc;
    let toward_r = -(b[0] as f64 * ur + b[1] as f64 * uc);
    toward_q > CONVERGING_MARGIN && toward_r > CONVERGING_MARGIN
}

/// Dilate nearby roots: scanning roots in raster order, each root adopts the
/// last current converging root inside the bottom half of its 3x3 window,
/// i.e. the candidates `(r, c+1), (r+1, c-1), (r+1, c), (r+1, c+1)` in that
/// order. Links only ever point raster-forward, so the result stays a
/// forest.
///
/// Only converging pairs merge here. Pairs facing each other straddle a
/// region symmetry axis and are safe to fuse; that is also the one merge the
/// later graph partition cannot perform itself, because head-on directions
/// make the shared edge repulsive. Every other nearby-root configuration is
/// ambiguous at this scale: in particular the medial axes of two adjacent
/// regions meet at region corners, and chaining roots there fuses distinct
/// regions into one initial segment that no later stage can split.
pub fn merge_nearby_roots(forest: &ParentForest, field: &DirectionField) -> ParentForest {
    let w = forest.width as i64;
    let h = forest.height as i64;
    let mut parent = forest.parent.clone();
    let mut is_root = vec![false; parent.len()];
    for &r in &forest.roots {
        is_root[r as usize] = true;
    }

    for &r in &forest.roots {
        let (row, col) = (r as i64 / w, r as i64 % w);
        let window = [(row, col + 1), (row + 1, col - 1), (row + 1, col), (row + 1, col + 1)];
        let mut target = None;
        for (nr, nc) in window {
            if nr < 0 || nr >= h || nc < 0 || nc >= w {
                continue;
            }
            let q = (nr * w + nc) as u32;
            if is_root[q as usize] && converging(field, r, q) {
                target = Some(q);
            }
        }
        if let Some(q) = target {
            parent[r as usize] = q;
            is_root[r as usize] = false;
        }
    }

    let roots = (0..parent.len() as u32).filter(|&p| is_root[p as usize]).collect();
    ParentForest { width: forest.width, height: forest.height, parent, roots }
}

/// Build the region adjacency graph of an initial segmentation.
///
/// `labels` must be the flattening of `forest` (labels are root pixel
/// indices). Edges collect every 4-adjacent cross-region pixel pair in
/// row-major discovery order; similarities are left NaN.
pub fn build_rag(labels: &LabelMap, forest: &ParentForest) -> RegionGraph {
    let w = labels.width;
    let h = labels.height;
    let roots = forest.roots.clone();
    let dense: HashMap<u32, u32> =
        roots.iter().enumerate().map(|(i, &r)| (r, i as u32)).collect();

    let mut areas = vec![0u64; roots.len()];
    for &l in &labels.labels {
        areas[dense[&l] as usize] += 1;
    }

    let mut edges: Vec<RegionEdge> = Vec::new();
    let mut edge_of: HashMap<(u32, u32), usize> = HashMap::new();
    let mut add_pair = |edges: &mut Vec<RegionEdge>, p: usize, q: usize| {
        let (la, lb) = (labels.labels[p], labels.labels[q]);
        let (da, db) = (dense[&la], dense[&lb]);
        let (a, b, pair) = if da < db {
            (da, db, (p as u32, q as u32))
        } else {
            (db, da, (q as u32, p as u32))
        };
        let idx = *edge_of.entry((a, b)).or_insert_with(|| {
            edges.push(RegionEdge {
                a,
                b,
                pairs: Vec::new(),
                similarity: f64::NAN,
                convergence: f64::NAN,
            });
            edges.len() - 1
        });
        edges[idx].pairs.push(pair);
    };

    for r in 0..h {
        for c in 0..w {
            let p = labels.index(r, c);
            if c + 1 < w && labels.labels[p] != labels.labels[p + 1] {
                add_pair(&mut edges, p, p + 1);
            }
            if r + 1 < h {
                let q = p + w as usize;
                if labels.labels[p] != labels.labels[q] {
                    add_pair(&mut edges, p, q);
                }
            }
        }
    }

    RegionGraph { width: w, height: h, roots, areas, edges }
}

/// Direction similarity of an edge: pi minus the mean angle between the
/// directions sampled `steps` parent links inside each region along the
/// shared boundary. Uses the pre-dilation forest so walks stay tree-internal.
pub fn edge_similarity(
    field: &DirectionField,
    forest: &ParentForest,
    edge: &RegionEdge,
    steps: u32,
) -> f64 {
    debug_assert!(!edge.pairs.is_empty());
    let mut sum = 0.0f64;
    for &(p, q) in &edge.pairs {
        let a = field.vectors[forest.walk(p, steps) as usize];
        let b = field.vectors[forest.walk(q, steps) as usize];
        let dot = (a[0] as f64 * b[0] as f64 + a[1] as f64 * b[1] as f64).clamp(-1.0, 1.0);
        sum += dot.acos();
    }
    std::f64::consts::PI - sum / edge.pairs.len() as f64
}

/// Fraction of an edge's boundary pairs whose directions converge: one side
/// points clearly into the contact while the other at least does not point
/// clearly out of it. Head-on symmetry-axis seams converge on both sides;
/// 90-degree corner seams converge on one side with the other flowing along
/// the seam. Across a real boundary both sides point clearly away, and a
/// degenerate parallel contact (both components near zero) has no side
/// pointing in, so neither counts.
pub fn edge_convergence(field: &DirectionField, edge: &RegionEdge) -> f64 {
    debug_assert!(!edge.pairs.is_empty());
    let w = field.width as i64;
    let mut converging_pairs = 0usize;
    for &(p, q) in &edge.pairs {
        let (pr, pc) = (p as i64 / w, p as i64 % w);
        let (qr, qc) = (q as i64 / w, q as i64 % w);
        // 4-adjacent pair, so the offset is already a unit vector.
        let (ur, uc) = ((qr - pr) as f64, (qc - pc) as f64);
        let a = field.vectors[p as usize];
        let b = field.vectors[q as usize];
        let toward_q = a[0] as f64 * ur + a[1] as f64 * uc;
        let toward_p = -(b[0] as f64 * ur + b[1] as f64 * uc);
        let converges = (toward_q > CONVERGING_MARGIN && toward_p > -CONVERGING_MARGIN)
            || (toward_p > CONVERGING_MARGIN && toward_q > -CONVERGING_MARGIN);
        if converges {
            converging_pairs += 1;
        }
    }
    converging_pairs as f64 / edge.pairs.len() as f64
}

/// Fill in `similarity` and `convergence` for every edge of the graph.
pub fn compute_similarities(
    graph: &mut RegionGraph,
    field: &DirectionField,
    forest: &ParentForest,
    steps: u32,
) {
    let scores: Vec<(f64, f64)> = graph
        .edges
        .par_iter()
        .map(|e| (edge_similarity(field, forest, e, steps), edge_convergence(field, e)))
        .collect();
    for (e, (s, c)) in graph.edges.iter_mut().zip(scores) {
        e.similarity = s;
        e.convergence = c;
    }
}

/// Outcome of partitioning: a resolved union-find over dense region ids plus
/// the consumed attractive-edge schedule for invariant checks.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionResult {
    /// Final representative (dense region id) per region.
    pub rep: Vec<u32>,
    /// Similarities of attractive edges in processing order (non-increasing).
    pub attractive_schedule: Vec<f64>,
    /// Number of merges performed in the attractive phase.
    pub merges: usize,
    /// Number of tiny regions absorbed in the cleanup phase.
    pub tiny_merges: usize,
}

struct MergeState {
    parent: Vec<u32>,
    area: Vec<u64>,
    /// Repulsion partners per current representative.
    rep: Vec<BTreeSet<u32>>,
}

impl MergeState {
    fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            self.parent[root as usize] = self.parent[self.parent[root as usize] as usize];
            root = self.parent[root as usize];
        }
        root
    }

    /// Merge representative `loser` into representative `survivor`, summing
    /// areas and rewriting repulsion partners onto the survivor.
    fn merge_into(&mut self, loser: u32, survivor: u32) {
        debug_assert_ne!(loser, survivor);
        self.parent[loser as usize] = survivor;
        self.area[survivor as usize] += self.area[loser as usize];
        let partners = std::mem::take(&mut self.rep[loser as usize]);
        for x in partners {
            self.rep[x as usize].remove(&loser);
            self.rep[x as usize].insert(survivor);
            self.rep[survivor as usize].insert(x);
        }
    }

    fn repulsive(&self, a: u32, b: u32) -> bool {
        self.rep[a as usize].contains(&b)
    }
}

/// Partition the region graph.
///
/// Edges with similarity below `s0` become repulsive constraints between
/// their current representatives. The remaining edges are processed in
/// decreasing similarity order (ties by ascending region ids) and merged
/// when the representatives are not repulsive and either (a) the edge is
/// convergence-certified (the flows point into the contact, which never
/// happens across a real boundary, only along symmetry-axis seams), or
/// (b) the similarity strictly exceeds the size-adaptive threshold
/// (`theta_l` if both current areas reach `area_small`, else `theta_s`) and
/// the contact is at least `MIN_EVIDENCE_PAIRS` long. Every merge sums
/// areas and unions repulsion sets. Finally each region smaller than
/// `area_tiny` is absorbed by its most similar non-repulsive neighbor
/// (ascending area order), or kept if every neighbor repels it.
pub fn partition_graph(graph: &RegionGraph, cfg: &SegConfig) -> PartitionResult {
    let n = graph.roots.len();
    let mut state = MergeState {
        parent: (0..n as u32).collect(),
        area: graph.areas.clone(),
        rep: vec![BTreeSet::new(); n],
    };

    for e in &graph.edges {
        debug_assert!(!e.similarity.is_nan(), "similarities must be computed");
        debug_assert!(!e.convergence.is_nan(), "convergence must be computed");
        if e.similarity < cfg.s0 {
            state.rep[e.a as usize].insert(e.b);
            state.rep[e.b as usize].insert(e.a);
        }
    }

    let mut attractive: Vec<usize> = (0..graph.edges.len())
        .filter(|&i| graph.edges[i].similarity >= cfg.s0)
        .collect();
    attractive.sort_by(|&i, &j| {
        let (ei, ej) = (&graph.edges[i], &graph.edges[j]);
        ej.similarity
            .total_cmp(&ei.similarity)
            .then((ei.a, ei.b).cmp(&(ej.a, ej.b)))
    });

    let mut schedule = Vec::with_capacity(attractive.len());
    let mut merges = 0usize;
    for i in attractive {
        let e = &graph.edges[i];
        schedule.push(e.similarity);
        let ra = state.find(e.a);
        let rb = state.find(e.b);
        if ra == rb || state.repulsive(ra, rb) {
            continue;
        }
        let h = if state.area[ra as usize].min(state.area[rb as usize]) >= cfg.area_small {
            cfg.theta_l
        } else {
            cfg.theta_s
        };
        let certified = e.convergence >= CONVERGENCE_MERGE_FRACTION;
        let evidenced = e.pairs.len() >= MIN_EVIDENCE_PAIRS
            || state.area[ra as usize].min(state.area[rb as usize]) < EVIDENCE_EXEMPT_AREA;
        if certified || (e.similarity > h && evidenced) {
            let (survivor, loser) = (ra.min(rb), ra.max(rb));
            state.merge_into(loser, survivor);
            merges += 1;
        }
    }

    // Tiny cleanup, smallest region first; adjacency follows the current
    // representatives, similarity of a neighbor is the best original edge
    // between the two groups.
    let mut tiny_merges = 0usize;
    let mut unmergeable: BTreeSet<u32> = BTreeSet::new();
    loop {
        let mut tiny: Vec<(u64, u32)> = Vec::new();
        for r in 0..n as u32 {
            if state.find(r) == r
                && state.area[r as usize] < cfg.area_tiny
                && !unmergeable.contains(&r)
            {
                tiny.push((state.area[r as usize], r));
            }
        }
        tiny.sort_unstable();
        let Some(&(_, t)) = tiny.first() else { break };

        let mut best: Option<(f64, u32)> = None;
        for e in &graph.edges {
            let ra = state.find(e.a);
            let rb = state.find(e.b);
            let other = if ra == t && rb != t {
                rb
            } else if rb == t && ra != t {
                ra
            } else {
                continue;
            };
            if state.repulsive(t, other) {
                continue;
            }
            let better = match best {
                None => true,
                Some((s, nb)) => e.similarity > s || (e.similarity == s && other < nb),
            };
            if better {
                best = Some((e.similarity, other));
            }
        }
        match best {
            Some((_, nb)) => {
                state.merge_into(t, nb);
                tiny_merges += 1;
            }
            None => {
                unmergeable.insert(t);
            }
        }
    }

    let rep = (0..n as u32).map(|r| state.find(r)).collect();
    PartitionResult { rep, attractive_schedule: schedule, merges, tiny_merges }
}

/// Full post-field pipeline: forest, root dilation, region graph, similarity
/// scoring, graph partition, and contiguous relabeling in raster order of
/// first occurrence.
pub fn segment(
    field: &DirectionField,
    cfg_part: &PartitionConfig,
    cfg_seg: &SegConfig,
) -> Result<LabelMap> {
    cfg_part.validate()?;
    cfg_seg.validate()?;

    let forest = build_forest(field, cfg_part);
    let merged = merge_nearby_roots(&forest, field);
    let initial = flatten(&merged);
    let mut graph = build_rag(&initial, &merged);
    // Similarity walks use the original tree parents, not the dilated ones.
    compute_similarities(&mut graph, field, &forest, cfg_seg.steps);
    let part = partition_graph(&graph, cfg_seg);

    let dense: HashMap<u32, u32> =
        graph.roots.iter().enumerate().map(|(i, &r)| (r, i as u32)).collect();
    let final_labels: Vec<u32> = initial
        .labels
        .iter()
        .map(|l| part.rep[dense[l] as usize])
        .collect();
    let relabeled = LabelMap { width: field.width, height: field.height, labels: final_labels };
    Ok(relabeled.compact())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gt_field;
    use crate::metrics;

    /// Forest + label map for a hand-specified region layout: each region's
    /// root is its first pixel in raster order, all other pixels parent
    /// directly to their root.
    fn regions_fixture(width: u32, height: u32, regions: &[u32]) -> (LabelMap, ParentForest) {
        let n = (width * height) as usize;
        assert_eq!(regions.len(), n);
        let mut first: HashMap<u32, u32> = HashMap::new();
        let mut parent = vec![0u32; n];
        let mut labels = vec![0u32; n];
        for p in 0..n as u32 {
            let root = *first.entry(regions[p as usize]).or_insert(p);
            parent[p as usize] = root;
            labels[p as usize] = root;
        }
        let mut roots: Vec<u32> = first.values().copied().collect();
        roots.sort_unstable();
        (
            LabelMap { width, height, labels },
            ParentForest { width, height, parent, roots },
        )
    }

    fn all_root_forest(width: u32, height: u32, roots: &[u32]) -> ParentForest {
        // Pixels not listed as roots hang off the first root.
        let n = (width * height) as usize;
        let anchor = roots[0];
        let mut parent: Vec<u32> = vec![anchor; n];
        for &r in roots {
            parent[r as usize] = r;
        }
        let mut sorted = roots.to_vec();
        sorted.sort_unstable();
        ParentForest { width, height, parent, roots: sorted }
    }

    fn east_field(width: u32, height: u32) -> DirectionField {
        DirectionField::new(width, height, vec![[0.0, 1.0]; (width * height) as usize]).unwrap()
    }

    #[test]
    fn merge_adjacent_converging_roots() {
        let f = all_root_forest(8, 8, &[5 * 8 + 5, 5 * 8 + 6]);
        let mut field = east_field(8, 8);
        field.vectors[5 * 8 + 6] = [0.0, -1.0]; // faces back toward (5,5)
        let merged = merge_nearby_roots(&f, &field);
        assert_eq!(merged.roots, vec![5 * 8 + 6]);
        assert_eq!(merged.parent[(5 * 8 + 5) as usize], 5 * 8 + 6);
    }

    #[test]
    fn isolated_root_is_unchanged() {
        let f = all_root_forest(8, 8, &[2 * 8 + 2, 6 * 8 + 6]);
        let merged = merge_nearby_roots(&f, &east_field(8, 8));
        assert_eq!(merged.roots, vec![2 * 8 + 2, 6 * 8 + 6]);
    }

    #[test]
    fn last_converging_window_candidate_wins() {
        // Root (5,5) points south; all three row-6 window candidates point
        // north back at it, so the last one in window order, (6,6), wins.
        let roots = [5 * 8 + 5, 6 * 8 + 4, 6 * 8 + 5, 6 * 8 + 6];
        let f = all_root_forest(8, 8, &roots);
        let mut field = east_field(8, 8);
        field.vectors[(5 * 8 + 5) as usize] = [1.0, 0.0];
        for q in [6 * 8 + 4, 6 * 8 + 5, 6 * 8 + 6] {
            field.vectors[q as usize] = [-1.0, 0.0];
        }
        let merged = merge_nearby_roots(&f, &field);
        assert_eq!(merged.parent[(5 * 8 + 5) as usize], 6 * 8 + 6);
        assert_eq!(merged.roots, vec![6 * 8 + 4, 6 * 8 + 5, 6 * 8 + 6]);
    }

    #[test]
    fn converging_roots_merge_but_others_do_not() {
        // Roots facing each other across a symmetry axis merge.
        let forest = all_root_forest(8, 8, &[3 * 8 + 4, 4 * 8 + 4]);
        let mut field = east_field(8, 8);
        field.vectors[3 * 8 + 4] = [1.0, 0.0]; // points south, toward the other
        field.vectors[4 * 8 + 4] = [-1.0, 0.0]; // points north, toward the other
        let merged = merge_nearby_roots(&forest, &field);
        assert_eq!(merged.roots, vec![4 * 8 + 4]);

        // Roots facing away across a region boundary stay separate.
        let forest = all_root_forest(8, 8, &[3 * 8 + 4, 4 * 8 + 4]);
        let mut field = east_field(8, 8);
        field.vectors[3 * 8 + 4] = [-1.0, 0.0]; // points north, away
        field.vectors[4 * 8 + 4] = [1.0, 0.0]; // points south, away
        let merged = merge_nearby_roots(&forest, &field);
        assert_eq!(merged.roots, vec![3 * 8 + 4, 4 * 8 + 4]);

        // Parallel flows are ambiguous (same signature on both sides of a
        // region corner) and are left to the graph phase.
        let forest = all_root_forest(8, 8, &[3 * 8 + 4, 4 * 8 + 4]);
        let merged = merge_nearby_roots(&forest, &east_field(8, 8));
        assert_eq!(merged.roots, vec![3 * 8 + 4, 4 * 8 + 4]);
    }

    #[test]
    fn rag_of_two_half_planes() {
        let regions: Vec<u32> = (0..16).map(|p| if p < 8 { 0 } else { 1 }).collect();
        let (labels, forest) = regions_fixture(4, 4, &regions);
        let g = build_rag(&labels, &forest);
        assert_eq!(g.roots.len(), 2);
        assert_eq!(g.areas, vec![8, 8]);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edges[0].pairs.len(), 4);
        assert_eq!(g.areas.iter().sum::<u64>(), 16);
    }

    #[test]
    fn rag_of_checkerboard_quadrants() {
        let mut regions = vec![0u32; 16];
        for r in 0..4 {
            for c in 0..4 {
                regions[r * 4 + c] = ((r / 2) * 2 + c / 2) as u32;
            }
        }
        let (labels, forest) = regions_fixture(4, 4, &regions);
        let g = build_rag(&labels, &forest);
        assert_eq!(g.roots.len(), 4);
        // Diagonal quadrants are not 4-adjacent.
        assert_eq!(g.edges.len(), 4);
    }

    #[test]
    fn rag_matches_brute_force_adjacency() {
        let gt = crate::synth::voronoi_labels(24, 20, 6, 31);
        let (labels, forest) = regions_fixture(24, 20, &gt.labels);
        let g = build_rag(&labels, &forest);

        let mut expected: BTreeSet<(u32, u32)> = BTreeSet::new();
        for r in 0..20u32 {
            for c in 0..24u32 {
                for (nr, nc) in [(r + 1, c), (r, c + 1)] {
                    if nr < 20 && nc < 24 && labels.label(r, c) != labels.label(nr, nc) {
                        let la = labels.label(r, c);
                        let lb = labels.label(nr, nc);
                        let da = g.roots.iter().position(|&x| x == la).unwrap() as u32;
                        let db = g.roots.iter().position(|&x| x == lb).unwrap() as u32;
                        expected.insert((da.min(db), da.max(db)));
                    }
                }
            }
        }
        let got: BTreeSet<(u32, u32)> = g.edges.iter().map(|e| (e.a, e.b)).collect();
        assert_eq!(got, expected);
        for e in &g.edges {
            assert!(!e.pairs.is_empty());
        }
    }

    #[test]
    fn similarity_extremes() {
        let regions: Vec<u32> = (0..16).map(|p| if p % 4 < 2 { 0 } else { 1 }).collect();
        let (labels, forest) = regions_fixture(4, 4, &regions);
        let g = build_rag(&labels, &forest);
        assert_eq!(g.edges.len(), 1);

        let same = DirectionField::new(4, 4, vec![[0.0, 1.0]; 16]).unwrap();
        let s = edge_similarity(&same, &forest, &g.edges[0], 0);
        assert_eq!(s, std::f64::consts::PI);

        let mut opposed = same.clone();
        for p in 0..16usize {
            if p % 4 >= 2 {
                opposed.vectors[p] = [0.0, -1.0];
            }
        }
        let s = edge_similarity(&opposed, &forest, &g.edges[0], 0);
        assert_eq!(s, 0.0);
    }

    #[test]
    fn similarity_zero_on_straight_gt_boundary() {
        let mut regions = vec![0u32; 8 * 8];
        regions[8 * 4..].fill(1);
        let gt = LabelMap::new(8, 8, regions.clone()).unwrap();
        let field = gt_field(&gt).unwrap();
        let (labels, forest) = regions_fixture(8, 8, &regions);
        let g = build_rag(&labels, &forest);
        assert_eq!(g.edges.len(), 1);
        // Facing vectors across the straight boundary are exactly antipodal.
        assert_eq!(edge_similarity(&field, &forest, &g.edges[0], 0), 0.0);
    }

    #[test]
    fn similarity_walk_stops_at_root() {
        // Chain 3 -> 2 -> 1 -> 0 in a 4x1 strip; pixel 3's direction differs
        // from everything upstream, so the walk distance matters.
        let parent = vec![0u32, 0, 1, 2];
        let forest = ParentForest { width: 4, height: 1, parent, roots: vec![0] };
        assert_eq!(forest.walk(3, 0), 3);
        assert_eq!(forest.walk(3, 2), 1);
        assert_eq!(forest.walk(3, 10), 0, "walk stops at the root");
    }

    fn graph_of(
        areas: &[u64],
        edges: &[(u32, u32, f64)],
    ) -> RegionGraph {
        RegionGraph {
            width: 1,
            height: areas.iter().sum::<u64>() as u32,
            roots: (0..areas.len() as u32).collect(),
            areas: areas.to_vec(),
            edges: edges
                .iter()
                .map(|&(a, b, s)| RegionEdge {
                    a,
                    b,
                    pairs: vec![(0, 0); 4],
                    similarity: s,
                    convergence: 0.0,
                })
                .collect(),
        }
    }

    #[test]
    fn partition_merges_two_large_similar_regions() {
        let g = graph_of(&[2000, 2000], &[(0, 1, std::f64::consts::PI)]);
        let part = partition_graph(&g, &SegConfig::default());
        assert_eq!(part.rep[0], part.rep[1]);
        assert_eq!(part.merges, 1);
    }

    #[test]
    fn repulsion_blocks_transitive_merge() {
        // A-B and B-C are highly similar, but A-C is repulsive. After A and B
        // merge, the inherited repulsion must block (A u B)-C.
        let cfg = SegConfig::default();
        let g = graph_of(
            &[2000, 2000, 2000],
            &[(0, 1, 3.0), (0, 2, 0.0), (1, 2, 2.9)],
        );
        let part = partition_graph(&g, &cfg);
        assert_eq!(part.rep[0], part.rep[1]);
        assert_ne!(part.rep[0], part.rep[2]);
        assert_eq!(part.merges, 1);
    }

    #[test]
    fn size_adaptive_threshold_switches_between_theta_l_and_theta_s() {
        let cfg = SegConfig {
            theta_l: 2.85,
            theta_s: 2.0,
            ..SegConfig::default()
        };
        // B is small, so B-C uses theta_s and merges; A-B then compares two
        // large groups (2000 and 2100) against theta_l = 2.85 and fails.
        let g = graph_of(&[2000, 100, 2000], &[(0, 1, 2.8), (1, 2, 2.9)]);
        let part = partition_graph(&g, &cfg);
        assert_eq!(part.rep[1], part.rep[2]);
        assert_ne!(part.rep[0], part.rep[1]);

        // With theta_l = 2.7 the second merge goes through as well.
        let cfg = SegConfig { theta_l: 2.7, theta_s: 2.0, ..SegConfig::default() };
        let part = partition_graph(&g, &cfg);
        assert_eq!(part.rep[0], part.rep[1]);
        assert_eq!(part.rep[1], part.rep[2]);
        assert_eq!(part.merges, 2);
    }

    #[test]
    fn attractive_schedule_is_monotone() {
        let gt = crate::synth::voronoi_labels(48, 48, 6, 77);
        let field = gt_field(&gt).unwrap();
        let forest = build_forest(&field, &PartitionConfig::default());
        let merged = merge_nearby_roots(&forest, &field);
        let labels = flatten(&merged);
        let mut graph = build_rag(&labels, &merged);
        compute_similarities(&mut graph, &field, &forest, 3);
        let part = partition_graph(&graph, &SegConfig::default());
        for w in part.attractive_schedule.windows(2) {
            assert!(w[0] >= w[1], "schedule must be non-increasing");
        }
    }

    #[test]
    fn partition_conserves_area_and_soundness() {
        let gt = crate::synth::voronoi_labels(40, 40, 5, 13);
        let field = gt_field(&gt).unwrap();
        let forest = build_forest(&field, &PartitionConfig::default());
        let merged = merge_nearby_roots(&forest, &field);
        let labels = flatten(&merged);
        let mut graph = build_rag(&labels, &merged);
        compute_similarities(&mut graph, &field, &forest, 3);
        assert_eq!(graph.areas.iter().sum::<u64>(), 1600);

        let cfg = SegConfig::default();
        let part = partition_graph(&graph, &cfg);
        // Area conservation: group areas sum to the raster size.
        let mut group_area: HashMap<u32, u64> = HashMap::new();
        for (i, &rep) in part.rep.iter().enumerate() {
            *group_area.entry(rep).or_insert(0) += graph.areas[i];
        }
        assert_eq!(group_area.values().sum::<u64>(), 1600);
        // Soundness: regions joined by a repulsive edge never share a group;
        // repulsion propagates through merges, so this holds unconditionally.
        for e in &graph.edges {
            if e.similarity < cfg.s0 {
                assert_ne!(part.rep[e.a as usize], part.rep[e.b as usize]);
            }
        }
    }

    #[test]
    fn short_parallel_contacts_carry_no_merge_evidence() {
        // A single-pair edge with accidentally identical directions (S = pi)
        // must not merge two regions on its own.
        let mut g = graph_of(&[2000, 2000], &[(0, 1, std::f64::consts::PI)]);
        g.edges[0].pairs.truncate(1);
        let part = partition_graph(&g, &SegConfig::default());
        assert_ne!(part.rep[0], part.rep[1]);
        assert_eq!(part.merges, 0);
    }

    #[test]
    fn converging_seam_merges_below_threshold() {
        // A seam edge whose flows point into the contact merges even though
        // its similarity is far below theta_s.
        let mut g = graph_of(&[2000, 2000], &[(0, 1, 1.5)]);
        g.edges[0].convergence = 1.0;
        let part = partition_graph(&g, &SegConfig::default());
        assert_eq!(part.rep[0], part.rep[1]);

        // Without the certificate the same edge stays split.
        let g = graph_of(&[2000, 2000], &[(0, 1, 1.5)]);
        let part = partition_graph(&g, &SegConfig::default());
        assert_ne!(part.rep[0], part.rep[1]);
    }

    #[test]
    fn convergence_is_zero_across_real_boundaries() {
        // Cross-boundary directions depart from the boundary by
        // construction, so no pair converges even under noise.
        let gt = crate::synth::voronoi_labels(64, 64, 5, 23);
        let field = crate::field::perturb(&gt_field(&gt).unwrap(), 10.0, 7);
        let (labels, forest) = regions_fixture(64, 64, &gt.labels);
        let g = build_rag(&labels, &forest);
        for e in &g.edges {
            assert_eq!(edge_convergence(&field, e), 0.0);
        }
    }

    #[test]
    fn tiny_region_joins_most_similar_non_repulsive_neighbor() {
        let cfg = SegConfig::default();
        // T (50 px) sits between X and Y; Y is more similar but repulsive.
        let g = graph_of(
            &[50, 5000, 5000],
            &[(0, 1, 1.0), (0, 2, 0.05)],
        );
        // Edge T-Y has similarity below s0 (pi/18 ~ 0.1745) so it is
        // repulsive; T must join X even though nothing in the attractive
        // phase merges.
        let part = partition_graph(&g, &cfg);
        assert_eq!(part.rep[0], part.rep[1]);
        assert_ne!(part.rep[0], part.rep[2]);
        assert_eq!(part.tiny_merges, 1);
    }

    #[test]
    fn tiny_region_with_only_repulsive_neighbors_remains() {
        let cfg = SegConfig::default();
        let g = graph_of(&[50, 5000], &[(0, 1, 0.01)]);
        let part = partition_graph(&g, &cfg);
        assert_ne!(part.rep[0], part.rep[1]);
        assert_eq!(part.tiny_merges, 0);
    }

    #[test]
    fn segment_uniform_field_yields_single_region() {
        let f = DirectionField::new(16, 16, vec![[0.0, 1.0]; 256]).unwrap();
        let out = segment(&f, &PartitionConfig::default(), &SegConfig::default()).unwrap();
        assert_eq!(out.distinct_labels(), 1);
    }

    #[test]
    fn segment_recovers_two_region_map() {
        let mut regions = vec![0u32; 64 * 64];
        regions[64 * 32..].fill(1);
        let gt = LabelMap::new(64, 64, regions).unwrap();
        let field = gt_field(&gt).unwrap();
        let out = segment(&field, &PartitionConfig::default(), &SegConfig::default()).unwrap();
        let cov = metrics::covering(&out, &gt).unwrap();
        assert!(cov >= 0.95, "covering {cov}");
    }

    #[test]
    fn segment_is_deterministic() {
        let gt = crate::synth::voronoi_labels(48, 48, 5, 4);
        let field = gt_field(&gt).unwrap();
        let a = segment(&field, &PartitionConfig::default(), &SegConfig::default()).unwrap();
        let b = segment(&field, &PartitionConfig::default(), &SegConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn segment_rejects_invalid_config() {
        let f = DirectionField::new(4, 4, vec![[0.0, 1.0]; 16]).unwrap();
        let bad = SegConfig { theta_s: 3.0, theta_l: 2.0, ..SegConfig::default() };
        assert!(matches!(
            segment(&f, &PartitionConfig::default(), &bad),
            Err(Error::InvalidConfig(_))
        ));
    }
}
