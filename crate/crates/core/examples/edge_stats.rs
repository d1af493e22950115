use std::collections::HashMap;
use super_bpd::*;
use super_bpd::forest::{build_forest, flatten};
use super_bpd::segmenter::{merge_nearby_roots, build_rag, compute_similarities};

fn fixtures() -> Vec<(String, LabelMap)> {
    let sizes = [128u32, 160, 192, 224, 256];
    let mut out = Vec::new();
    for i in 0..14u64 {
        let side = sizes[(i % 5) as usize];
        let k = 3 + (i % 6) as usize;
        out.push((format!("v{i}"), synth::voronoi_labels(side, side, k, i + 1)));
    }
    out
}

fn main() {
    // Classify each RAG edge by ground truth: same  = every boundary pair
    // joins pixels of the same GT cell; cross = every pair crosses cells;
    // mixed = both kinds.
    let mut rows: Vec<(String, f64, f64, usize, &'static str)> = Vec::new();
    for (name, gt) in fixtures() {
        let f = gt_field(&gt).unwrap();
        let forest = build_forest(&f, &PartitionConfig::default());
        let merged = merge_nearby_roots(&forest, &f);
        let labels0 = flatten(&merged);
        let mut graph = build_rag(&labels0, &merged);
        compute_similarities(&mut graph, &f, &forest, 3);
        for e in &graph.edges {
            let mut same = 0usize;
            let mut cross = 0usize;
            let mut conv = 0usize;
            for &(p, q) in &e.pairs {
                if gt.labels[p as usize] == gt.labels[q as usize] { same += 1 } else { cross += 1 }
                // convergence of raw directions along the pair offset
                let w = gt.width as i64;
                let (pr, pc) = (p as i64 / w, p as i64 % w);
                let (qr, qc) = (q as i64 / w, q as i64 % w);
                let (ur, uc) = ((qr - pr) as f64, (qc - pc) as f64);
                let a = f.vectors[p as usize];
                let b = f.vectors[q as usize];
                let ta = a[0] as f64 * ur + a[1] as f64 * uc;
                let tb = -(b[0] as f64 * ur + b[1] as f64 * uc);
                if ta > 0.1 && tb > 0.1 { conv += 1; }
            }
            let kind = if cross == 0 { "same" } else if same == 0 { "cross" } else { "mixed" };
            rows.push((name.clone(), e.similarity, conv as f64 / e.pairs.len() as f64, e.pairs.len(), kind));
        }
    }
    // summarize: per kind, distribution of S and conv fraction
    for kind in ["same", "cross", "mixed"] {
        let mut sims: Vec<f64> = rows.iter().filter(|r| r.4 == kind).map(|r| r.1).collect();
        let mut convs: Vec<f64> = rows.iter().filter(|r| r.4 == kind).map(|r| r.2).collect();
        sims.sort_by(f64::total_cmp);
        convs.sort_by(f64::total_cmp);
        let q = |v: &Vec<f64>, p: f64| v[(p * (v.len().max(1) - 1) as f64) as usize];
        if sims.is_empty() { continue; }
        println!("{kind}: n={} S[min {:.3} p5 {:.3} p50 {:.3} p95 {:.3} max {:.3}] conv[min {:.2} p5 {:.2} p50 {:.2} p95 {:.2} max {:.2}]",
            sims.len(), q(&sims,0.0), q(&sims,0.05), q(&sims,0.5), q(&sims,0.95), q(&sims,1.0),
            q(&convs,0.0), q(&convs,0.05), q(&convs,0.5), q(&convs,0.95), q(&convs,1.0));
    }
    // the interesting overlap: same-kind edges with low S, cross/mixed with high S
    let mut low_same: Vec<&(String, f64, f64, usize, &str)> = rows.iter().filter(|r| r.4 == "same" && r.1 < 2.2).collect();
    low_same.sort_by(|a, b| a.1.total_cmp(&b.1));
    println!("lowest-S same edges:");
    for r in low_same.iter().take(12) { println!("  {} S {:.3} conv {:.2} pairs {}", r.0, r.1, r.2, r.3); }
    let mut hi_cross: Vec<&(String, f64, f64, usize, &str)> = rows.iter().filter(|r| (r.4 == "cross" || r.4 == "mixed") && r.1 > 1.4).collect();
    hi_cross.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("highest-S cross/mixed edges:");
    for r in hi_cross.iter().take(12) { println!("  {} {} S {:.3} conv {:.2} pairs {}", r.0, r.4, r.1, r.2, r.3); }
}
