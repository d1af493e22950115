// Re-implements the attractive phase with tracing to find the exact merge
// that fuses two GT cells in the failing seed.
use std::collections::{BTreeSet, HashMap};
use super_bpd::*;
use super_bpd::forest::{build_forest, flatten};
use super_bpd::segmenter::{merge_nearby_roots, build_rag, compute_similarities};

fn main() {
    let gt = synth::voronoi_labels(160, 160, 8, 12);
    let f = gt_field(&gt).unwrap();
    let forest = build_forest(&f, &PartitionConfig::default());
    let merged = merge_nearby_roots(&forest, &f);
    let labels0 = flatten(&merged);
    let mut graph = build_rag(&labels0, &merged);
    compute_similarities(&mut graph, &f, &forest, 3);
    let cfg = SegConfig::default();

    let dense: HashMap<u32, u32> = graph.roots.iter().enumerate().map(|(i, &r)| (r, i as u32)).collect();
    let mut region_gt: Vec<HashMap<u32, usize>> = vec![HashMap::new(); graph.roots.len()];
    for (i, &l) in labels0.labels.iter().enumerate() {
        *region_gt[dense[&l] as usize].entry(gt.labels[i]).or_default() += 1;
    }
    let n = graph.roots.len();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    let mut area = graph.areas.clone();
    let mut rep: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
    // group gt histogram
    let mut ghist: Vec<HashMap<u32, usize>> = region_gt.clone();

    fn find(parent: &mut Vec<u32>, x: u32) -> u32 {
        let mut r = x;
        while parent[r as usize] != r { parent[r as usize] = parent[parent[r as usize] as usize]; r = parent[r as usize]; }
        r
    }

    for e in &graph.edges {
        if e.similarity < cfg.s0 { rep[e.a as usize].insert(e.b); rep[e.b as usize].insert(e.a); }
    }
    let mut attractive: Vec<usize> = (0..graph.edges.len()).filter(|&i| graph.edges[i].similarity >= cfg.s0).collect();
    attractive.sort_by(|&i, &j| {
        let (ei, ej) = (&graph.edges[i], &graph.edges[j]);
        ej.similarity.total_cmp(&ei.similarity).then((ei.a, ei.b).cmp(&(ej.a, ej.b)))
    });
    for i in attractive {
        let e = &graph.edges[i];
        let ra = find(&mut parent, e.a);
        let rb = find(&mut parent, e.b);
        if ra == rb || rep[ra as usize].contains(&rb) { continue; }
        let h = if area[ra as usize].min(area[rb as usize]) >= cfg.area_small { cfg.theta_l } else { cfg.theta_s };
        let certified = e.convergence >= 0.5;
        let evidenced = e.pairs.len() >= 3 || area[ra as usize].min(area[rb as usize]) < 64;
        if certified || (e.similarity > h && evidenced) {
            // gt majority of each group
            let major = |h: &HashMap<u32, usize>| -> (u32, usize, usize) {
                let t: usize = h.values().sum();
                let (&g, &c) = h.iter().max_by_key(|&(_, &c)| c).unwrap();
                (g, c, t)
            };
            let (ga, ca, ta) = major(&ghist[ra as usize]);
            let (gb, cb, tb) = major(&ghist[rb as usize]);
            if ga != gb && ta > 50 && tb > 50 {
                println!("CROSS-GROUP MERGE: edge {}-{} S {:.3} conv {:.2} pairs {} | groups gt{}({}) {}px vs gt{}({}) {}px | cert {} evid {} (areas {} {})",
                    e.a, e.b, e.similarity, e.convergence, e.pairs.len(), ga, ca, ta, gb, cb, tb, certified, evidenced,
                    area[ra as usize], area[rb as usize]);
            }
            let (s, l) = (ra.min(rb), ra.max(rb));
            parent[l as usize] = s;
            area[s as usize] += area[l as usize];
            let partners: Vec<u32> = std::mem::take(&mut rep[l as usize]).into_iter().collect();
            for x in partners { rep[x as usize].remove(&l); rep[x as usize].insert(s); rep[s as usize].insert(x); }
            let hl = std::mem::take(&mut ghist[l as usize]);
            for (g, c) in hl { *ghist[s as usize].entry(g).or_default() += c; }
        }
    }
}
