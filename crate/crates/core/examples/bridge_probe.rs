use std::collections::HashMap;
use super_bpd::*;
use super_bpd::forest::{build_forest, flatten};
use super_bpd::segmenter::{merge_nearby_roots, build_rag, compute_similarities};

fn main() {
    // seed index 11 -> voronoi 160x160 k=8 seed 12
    let gt = synth::voronoi_labels(160, 160, 8, 12);
    let f = gt_field(&gt).unwrap();
    let forest = build_forest(&f, &PartitionConfig::default());
    let merged = merge_nearby_roots(&forest, &f);
    let labels0 = flatten(&merged);
    let mut graph = build_rag(&labels0, &merged);
    compute_similarities(&mut graph, &f, &forest, 3);
    let dense: HashMap<u32, u32> = graph.roots.iter().enumerate().map(|(i, &r)| (r, i as u32)).collect();
    let mut region_gt: Vec<HashMap<u32, usize>> = vec![HashMap::new(); graph.roots.len()];
    for (i, &l) in labels0.labels.iter().enumerate() {
        *region_gt[dense[&l] as usize].entry(gt.labels[i]).or_default() += 1;
    }
    let gt_major = |i: u32| -> u32 { *region_gt[i as usize].iter().max_by_key(|&(_, &c)| c).unwrap().0 };
    // cross edges that are attractive and could merge under current rules
    let cfg = SegConfig::default();
    for e in &graph.edges {
        if gt_major(e.a) != gt_major(e.b) && e.similarity >= cfg.s0 {
            let (aa, ab) = (graph.areas[e.a as usize], graph.areas[e.b as usize]);
            if e.similarity > cfg.theta_s || e.convergence >= 0.5 {
                println!("cross edge {}-{}: S {:.3} conv {:.2} pairs {} init_areas {} {} (gt {} vs {})",
                    e.a, e.b, e.similarity, e.convergence, e.pairs.len(), aa, ab, gt_major(e.a), gt_major(e.b));
            }
        }
    }
}
