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
    // clean pass
    let mut clean_fails = 0;
    for (name, gt) in fixtures() {
        let f = gt_field(&gt).unwrap();
        let seg = segment(&f, &PartitionConfig::default(), &SegConfig::default()).unwrap();
        let rep = evaluate(&seg, std::slice::from_ref(&gt)).unwrap();
        let ok = rep.covering >= 0.95 && rep.pri >= 0.95 && rep.vi <= 0.30;
        if !ok { clean_fails += 1; println!("CLEAN FAIL {name}: cov {:.4} pri {:.4} vi {:.4} ({} vs {})", rep.covering, rep.pri, rep.vi, seg.distinct_labels(), gt.distinct_labels()); }
    }
    println!("clean fails: {clean_fails}/20");
    // noise pass: sigma=10, seed = fixture index
    let mut noise_pass = 0;
    for (i, (name, gt)) in fixtures().into_iter().enumerate() {
        let f = gt_field(&gt).unwrap();
        let p = perturb(&f, 10.0, i as u64);
        let seg = segment(&p, &PartitionConfig::default(), &SegConfig::default()).unwrap();
        let cov = covering(&seg, &gt).unwrap();
        let ok = cov >= 0.90;
        if ok { noise_pass += 1; } else { println!("NOISE fail {name}: cov {:.4} ({} regions vs {})", cov, seg.distinct_labels(), gt.distinct_labels()); }
    }
    println!("noise pass: {noise_pass}/20 (need >= 18)");
}
