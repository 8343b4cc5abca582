use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strebel::harmonic_solver::PLGraphMap;
use strebel::metric_graph::{GraphPath, Seg};

/// Moves interior vertex images along their graph edge by up to `amp`.
/// Each move is a homotopy, so curve words are unchanged.
pub fn perturb(f: &PLGraphMap, amp: f64, seed: u64) -> PLGraphMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = f.graph_arc();
    let mut images = f.images().to_vec();
    let mut paths = f.paths().to_vec();
    for (v, img) in images.iter_mut().enumerate() {
        let p = *img;
        let d = rng.gen_range(-amp..amp);
        let q = p.t + d;
        if d == 0.0 || q <= amp || q >= g.len(p.edge) - amp || p.t <= 0.0 || p.t >= g.len(p.edge) {
            continue;
        }
        for &(e, is_v0) in f.incident(v) {
            let old = &paths[e];
            paths[e] = if is_v0 {
                let mut segs = vec![Seg { edge: p.edge, from: q, to: p.t }];
                segs.extend_from_slice(old.segs());
                GraphPath::from_segs(&g, strebel::metric_graph::GraphPoint { edge: p.edge, t: q }, segs)
            } else {
                let mut segs = old.segs().to_vec();
                segs.push(Seg { edge: p.edge, from: p.t, to: q });
                GraphPath::from_segs(&g, old.start(), segs)
            };
        }
        img.t = q;
    }
    PLGraphMap::new(f.surface_arc(), g, images, paths).expect("perturbed map is continuous")
}
