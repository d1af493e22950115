use std::collections::HashMap;
use super_bpd::*;
use super_bpd::forest::{build_forest, flatten};
use super_bpd::segmenter::merge_nearby_roots;

fn purity(stage: &str, labels: &LabelMap, gt: &LabelMap) {
    let mut tree_label: HashMap<u32, u32> = HashMap::new();
    let mut impure = 0usize;
    let mut impure_px = 0usize;
    let mut seen: HashMap<u32, bool> = HashMap::new();
    for (i, &root) in labels.labels.iter().enumerate() {
        let l = gt.labels[i];
        match tree_label.entry(root) {
            std::collections::hash_map::Entry::Vacant(e) => { e.insert(l); }
            std::collections::hash_map::Entry::Occupied(e) => {
                if *e.get() != l {
                    impure_px += 1;
                    if !seen.get(&root).copied().unwrap_or(false) { impure += 1; seen.insert(root, true); }
                }
            }
        }
    }
    println!("  {stage}: {} regions, {} impure regions, {} impure px", labels.distinct_labels(), impure, impure_px);
}

fn main() {
    for seed in [1u64, 5, 6, 8, 11, 12] {
        let sizes = [128u32, 160, 192, 224, 256];
        let i = seed - 1;
        let side = sizes[(i % 5) as usize];
        let k = 3 + (i % 6) as usize;
        println!("seed {seed} ({side}x{side}, k={k}):");
        let gt = synth::voronoi_labels(side, side, k, seed);
        let f = gt_field(&gt).unwrap();
        let forest = build_forest(&f, &PartitionConfig::default());
        purity("forest ", &flatten(&forest), &gt);
        let merged = merge_nearby_roots(&forest, &f);
        purity("dilated", &flatten(&merged), &gt);
        let seg = segment(&f, &PartitionConfig::default(), &SegConfig::default()).unwrap();
        purity("final  ", &seg, &gt);
    }
}
