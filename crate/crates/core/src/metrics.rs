//! Segmentation comparison metrics: covering, probabilistic Rand index, and
//! variation of information, all computed from a label co-occurrence table
//! so they run in O(pixels + table) rather than O(pixel pairs).
//!
//! Conventions: covering is reported ground-truth-to-prediction (each GT
//! region weighted by size, matched to its best-overlap predicted region);
//! VI uses natural logarithms. With multiple ground truths every metric is
//! the arithmetic mean of the per-ground-truth values.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::LabelMap;

/// Co-occurrence counts between a predicted and a ground-truth labeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    /// `(pred_id, gt_id, count)` for every non-empty cell, sorted by ids.
    /// Ids are dense, assigned by raster order of first occurrence.
    pub counts: Vec<(u32, u32, u64)>,
    /// Pixels per predicted region (row marginals).
    pub pred_sizes: Vec<u64>,
    /// Pixels per ground-truth region (column marginals).
    pub gt_sizes: Vec<u64>,
    pub total: u64,
}

fn dense_ids(map: &LabelMap) -> (Vec<u32>, usize) {
    let mut remap: HashMap<u32, u32> = HashMap::new();
    let mut next = 0u32;
    let ids = map
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
    (ids, next as usize)
}

fn check_dims(pred: &LabelMap, gt: &LabelMap) -> Result<()> {
    if pred.width != gt.width || pred.height != gt.height {
        return Err(Error::DimensionMismatch(pred.width, pred.height, gt.width, gt.height));
    }
    Ok(())
}

/// Exact co-occurrence counts of `pred` and `gt` labels.
pub fn contingency(pred: &LabelMap, gt: &LabelMap) -> Result<ContingencyTable> {
    check_dims(pred, gt)?;
    let (pred_ids, n_pred) = dense_ids(pred);
    let (gt_ids, n_gt) = dense_ids(gt);

    let mut cells: HashMap<(u32, u32), u64> = HashMap::new();
    let mut pred_sizes = vec![0u64; n_pred];
    let mut gt_sizes = vec![0u64; n_gt];
    for (&i, &j) in pred_ids.iter().zip(&gt_ids) {
        *cells.entry((i, j)).or_insert(0) += 1;
        pred_sizes[i as usize] += 1;
        gt_sizes[j as usize] += 1;
    }
    let mut counts: Vec<(u32, u32, u64)> =
        cells.into_iter().map(|((i, j), c)| (i, j, c)).collect();
    counts.sort_unstable();

    Ok(ContingencyTable { counts, pred_sizes, gt_sizes, total: pred.labels.len() as u64 })
}

/// Segmentation covering of `gt` by `pred`:
/// `(1/N) * sum over GT regions R of |R| * max over pred regions R' of IoU(R, R')`.
pub fn covering(pred: &LabelMap, gt: &LabelMap) -> Result<f64> {
    let t = contingency(pred, gt)?;
    let mut best = vec![0.0f64; t.gt_sizes.len()];
    for &(i, j, n) in &t.counts {
        let union = t.pred_sizes[i as usize] + t.gt_sizes[j as usize] - n;
        let iou = n as f64 / union as f64;
        if iou > best[j as usize] {
            best[j as usize] = iou;
        }
    }
    let sum: f64 = best
        .iter()
        .zip(&t.gt_sizes)
        .map(|(&iou, &size)| iou * size as f64)
        .sum();
    Ok(sum / t.total as f64)
}

fn pairs(x: u64) -> u64 {
    x * (x - 1) / 2
}

fn rand_index(t: &ContingencyTable) -> f64 {
    if t.total < 2 {
        return 1.0;
    }
    let same_both: u64 = t.counts.iter().map(|&(_, _, n)| pairs(n)).sum();
    let same_pred: u64 = t.pred_sizes.iter().map(|&n| pairs(n)).sum();
    let same_gt: u64 = t.gt_sizes.iter().map(|&n| pairs(n)).sum();
    let all = pairs(t.total);
    // Agreements = pairs joint in both + pairs split in both.
    1.0 + (2.0 * same_both as f64 - same_pred as f64 - same_gt as f64) / all as f64
}

fn variation_of_information(t: &ContingencyTable) -> f64 {
    let n = t.total as f64;
    let mut h_pred_given_gt = 0.0f64;
    let mut h_gt_given_pred = 0.0f64;
    for &(i, j, c) in &t.counts {
        let p = c as f64 / n;
        h_pred_given_gt -= p * (c as f64 / t.gt_sizes[j as usize] as f64).ln();
        h_gt_given_pred -= p * (c as f64 / t.pred_sizes[i as usize] as f64).ln();
    }
    h_pred_given_gt + h_gt_given_pred
}

/// Probabilistic Rand index: mean over ground truths of the fraction of
/// pixel pairs on which the two labelings agree.
pub fn pri(pred: &LabelMap, gts: &[LabelMap]) -> Result<f64> {
    assert!(!gts.is_empty(), "need at least one ground truth");
    let mut sum = 0.0;
    for gt in gts {
        sum += rand_index(&contingency(pred, gt)?);
    }
    Ok(sum / gts.len() as f64)
}

/// Variation of information in nats: mean over ground truths of
/// `H(pred | gt) + H(gt | pred)`. Zero iff the partitions coincide up to
/// relabeling.
pub fn vi(pred: &LabelMap, gts: &[LabelMap]) -> Result<f64> {
    assert!(!gts.is_empty(), "need at least one ground truth");
    let mut sum = 0.0;
    for gt in gts {
        sum += variation_of_information(&contingency(pred, gt)?);
    }
    Ok(sum / gts.len() as f64)
}

/// Covering, PRI, and VI of a prediction against one or more ground truths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub covering: f64,
    pub pri: f64,
    pub vi: f64,
}

pub fn evaluate(pred: &LabelMap, gts: &[LabelMap]) -> Result<MetricReport> {
    assert!(!gts.is_empty(), "need at least one ground truth");
    let mut cov = 0.0;
    for gt in gts {
        cov += covering(pred, gt)?;
    }
    Ok(MetricReport {
        covering: cov / gts.len() as f64,
        pri: pri(pred, gts)?,
        vi: vi(pred, gts)?,
    })
}
