use std::time::Instant;
use super_bpd::*;

fn fixtures() -> Vec<(String, LabelMap)> {
    let sizes = [128u32, 160, 192, 224, 256];
    let mut out = Vec::new();
    for i in 0..14u64 {
        let side = sizes[(i % 5) as usize];
        let k = 3 + (i % 6) as usize;
        out.push((format!("voronoi-{side}-k{k}-s{i}"), synth::voronoi_labels(side, side, k, i + 1)));
    }
    for (i, (side, r)) in [(128u32, 40.0f64), (192, 60.0), (256, 80.0)].iter().enumerate() {
        let c = *side as f64 / 2.0;
        out.push((format!("disc-{side}"), synth::disc_labels(*side, *side, c + i as f64, c - i as f64, *r)));
    }
    for (side, insets) in [(128u32, vec![20u32, 50]), (192, vec![24, 60]), (256, vec![32, 80])] {
        out.push((format!("rects-{side}"), synth::nested_rect_labels(side, side, &insets)));
    }
    out
}

fn main() {
    let t0 = Instant::now();
    let mut worst_cov = 1.0f64; let mut worst_pri = 1.0f64; let mut worst_vi = 0.0f64; let mut fails = 0;
    for (name, gt) in fixtures() {
        let f = gt_field(&gt).unwrap();
        let seg = segment(&f, &PartitionConfig::default(), &SegConfig::default()).unwrap();
        let rep = evaluate(&seg, std::slice::from_ref(&gt)).unwrap();
        let ok = rep.covering >= 0.95 && rep.pri >= 0.95 && rep.vi <= 0.30;
        if !ok { fails += 1; }
        println!("{name}: regions {} (gt {}), cov {:.4} pri {:.4} vi {:.4} {}",
            seg.distinct_labels(), gt.distinct_labels(), rep.covering, rep.pri, rep.vi, if ok {"ok"} else {"FAIL"});
        worst_cov = worst_cov.min(rep.covering); worst_pri = worst_pri.min(rep.pri); worst_vi = worst_vi.max(rep.vi);
    }
    println!("total {:?}, worst cov {worst_cov:.4} pri {worst_pri:.4} vi {worst_vi:.4}, fails {fails}", t0.elapsed());
}
