use std::collections::HashMap;
use super_bpd::*;
use super_bpd::forest::{build_forest, flatten};
use super_bpd::segmenter::{merge_nearby_roots, build_rag, compute_similarities, partition_graph};

fn main() {
    let gt = synth::voronoi_labels(192, 192, 4, 8); // seed index 7 -> seed 8
    let f = gt_field(&gt).unwrap();
    let seg = segment(&f, &PartitionConfig::default(), &SegConfig::default()).unwrap();
    println!("final regions {}", seg.distinct_labels());
    // map final region -> gt label histogram
    let mut hist: HashMap<u32, HashMap<u32, usize>> = HashMap::new();
    for (i, &l) in seg.labels.iter().enumerate() {
        *hist.entry(l).or_default().entry(gt.labels[i]).or_default() += 1;
    }
    let mut keys: Vec<_> = hist.keys().copied().collect();
    keys.sort();
    for k in keys {
        println!("  region {k}: {:?}", hist[&k]);
    }

    // Look at the partition-level graph: group regions by final rep, find the
    // pair of final groups that share a gt label, and print edge similarities
    // between them.
    let forest = build_forest(&f, &PartitionConfig::default());
    let merged = merge_nearby_roots(&forest, &f);
    let labels0 = flatten(&merged);
    let mut graph = build_rag(&labels0, &merged);
    compute_similarities(&mut graph, &f, &forest, 3);
    let part = partition_graph(&graph, &SegConfig::default());
    // gt label of each initial region (majority)
    let dense: HashMap<u32, u32> = graph.roots.iter().enumerate().map(|(i, &r)| (r, i as u32)).collect();
    let mut region_gt: Vec<HashMap<u32, usize>> = vec![HashMap::new(); graph.roots.len()];
    for (i, &l) in labels0.labels.iter().enumerate() {
        *region_gt[dense[&l] as usize].entry(gt.labels[i]).or_default() += 1;
    }
    // final groups and their gt majorities
    let mut groups: HashMap<u32, Vec<u32>> = HashMap::new();
    for (i, &rep) in part.rep.iter().enumerate() { groups.entry(rep).or_default().push(i as u32); }
    let gt_major = |i: u32| -> u32 { *region_gt[i as usize].iter().max_by_key(|(_, &c)| c).unwrap().0 };
    let mut group_of: HashMap<u32, u32> = HashMap::new();
    for (&rep, members) in &groups { for &m in members { group_of.insert(m, rep); } }
    // find split: two groups with same gt majority (by pixel mass)
    let mut by_gt: HashMap<u32, Vec<(u32, usize)>> = HashMap::new();
    for (&rep, members) in &groups {
        let mut m: HashMap<u32, usize> = HashMap::new();
        for &x in members { for (&g, &c) in &region_gt[x as usize] { *m.entry(g).or_default() += c; } }
        let (&g, &c) = m.iter().max_by_key(|(_, &c)| c).unwrap();
        by_gt.entry(g).or_default().push((rep, c));
    }
    for (g, reps) in &by_gt {
        if reps.len() > 1 {
            println!("gt cell {g} split across groups {:?}", reps);
            // print all edges between the two groups
            for e in &graph.edges {
                let (ga, gb) = (group_of[&e.a], group_of[&e.b]);
                let reps_set: Vec<u32> = reps.iter().map(|&(r, _)| r).collect();
                if ga != gb && reps_set.contains(&ga) && reps_set.contains(&gb) {
                    println!("  edge {}-{} sim {:.4} pairs {} areas {} {}",
                        e.a, e.b, e.similarity, e.pairs.len(),
                        graph.areas[e.a as usize], graph.areas[e.b as usize]);
                }
            }
        }
    }
}
