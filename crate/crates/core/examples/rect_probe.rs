use std::collections::HashMap;
use super_bpd::*;
use super_bpd::forest::{build_forest, flatten};
use super_bpd::segmenter::{merge_nearby_roots, build_rag, compute_similarities, partition_graph};

fn main() {
    let gt = synth::nested_rect_labels(128, 128, &[20, 50]);
    let f = gt_field(&gt).unwrap();
    let forest = build_forest(&f, &PartitionConfig::default());
    let merged = merge_nearby_roots(&forest, &f);
    let labels0 = flatten(&merged);
    let mut graph = build_rag(&labels0, &merged);
    compute_similarities(&mut graph, &f, &forest, 3);
    let part = partition_graph(&graph, &SegConfig::default());
    let dense: HashMap<u32, u32> = graph.roots.iter().enumerate().map(|(i, &r)| (r, i as u32)).collect();

    // gt majority per initial region
    let mut region_gt: Vec<HashMap<u32, usize>> = vec![HashMap::new(); graph.roots.len()];
    for (i, &l) in labels0.labels.iter().enumerate() {
        *region_gt[dense[&l] as usize].entry(gt.labels[i]).or_default() += 1;
    }
    let gt_major = |i: u32| -> u32 { *region_gt[i as usize].iter().max_by_key(|&(_, &c)| c).unwrap().0 };

    // edges between different final groups with same gt majority
    let mut printed = 0;
    for e in &graph.edges {
        let (ga, gb) = (part.rep[e.a as usize], part.rep[e.b as usize]);
        if ga != gb && gt_major(e.a) == gt_major(e.b) && printed < 40 {
            println!("gt {} edge {}-{}: S {:.3} conv {:.2} pairs {} areas {} {}",
                gt_major(e.a), e.a, e.b, e.similarity, e.convergence, e.pairs.len(),
                graph.areas[e.a as usize], graph.areas[e.b as usize]);
            printed += 1;
        }
    }
    // group sizes
    let mut group_area: HashMap<u32, u64> = HashMap::new();
    for (i, &rep) in part.rep.iter().enumerate() { *group_area.entry(rep).or_default() += graph.areas[i]; }
    let mut ga: Vec<_> = group_area.into_iter().collect();
    ga.sort_by_key(|&(_, a)| std::cmp::Reverse(a));
    println!("final groups: {:?}", &ga[..ga.len().min(12)]);
}
