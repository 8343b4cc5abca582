//! Property tests for the solver invariants.

mod common;

use proptest::prelude::*;
use strebel::corpus_gen;
use strebel::harmonic_solver::{energy, frechet_mean, relocate_vertex, solve, sweep, SolveOptions, SweepOrder};
use strebel::metric_graph::{path_of_word, tree_distance, DirEdge, GraphEdge, GraphPath, MetricGraph};

fn figure_eight() -> MetricGraph {
    MetricGraph::new(1, vec![GraphEdge { tail: 0, head: 0, length: 1.0 }, GraphEdge { tail: 0, head: 0, length: 0.7 }])
        .unwrap()
}

fn word() -> impl Strategy<Value = Vec<DirEdge>> {
    prop::collection::vec((0usize..2, any::<bool>()).prop_map(|(edge, forward)| DirEdge { edge, forward }), 0..6)
}

/// All words start at the single vertex; the empty word is the constant path.
fn word_path(g: &MetricGraph, w: &[DirEdge]) -> GraphPath {
    if w.is_empty() { GraphPath::constant(g.vertex_point(0)) } else { path_of_word(g, w) }
}

fn objective(g: &MetricGraph, terms: &[(f64, GraphPath)], at: &GraphPath) -> f64 {
    let o = terms[0].1.start();
    terms.iter().map(|(w, p)| 0.5 * w * tree_distance(g, o, at, p).unwrap().powi(2)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frechet_mean_beats_base_and_neighbours(
        ws in prop::collection::vec(word(), 2..6),
        weights in prop::collection::vec(0.1f64..3.0, 6),
    ) {
        let g = figure_eight();
        let terms: Vec<(f64, GraphPath)> =
            ws.iter().zip(&weights).map(|(w, &x)| (x, word_path(&g, w))).collect();
        let sol = frechet_mean(&g, &terms, None).unwrap();
        let base = GraphPath::constant(terms[0].1.start());
        let at_base = objective(&g, &terms, &base);
        prop_assert!(sol.objective <= at_base + 1e-12);
        prop_assert!((objective(&g, &terms, &sol.relocation) - sol.objective).abs() < 1e-9);
        for (_, p) in &terms {
            prop_assert!(sol.objective <= objective(&g, &terms, p) + 1e-12);
        }
    }

    #[test]
    fn sweeps_never_raise_energy(seed in 0u64..1000, order in 0usize..3) {
        let g = corpus_gen::square_torus(4, 1.0).unwrap();
        let f0 = common::perturb(&g.leaf_space.projection, 0.05, seed);
        let order = [SweepOrder::Ascending, SweepOrder::SeededRandom(seed), SweepOrder::Colored][order];
        let mut f = f0.clone();
        let mut e = energy(&f).total;
        for _ in 0..5 {
            sweep(&mut f, order, None).unwrap();
            let next = energy(&f).total;
            prop_assert!(next <= e);
            e = next;
        }
        for c in f.surface().curves() {
            prop_assert_eq!(f.curve_word(c), f0.curve_word(c));
        }
    }

    #[test]
    fn relocation_never_raises_energy(seed in 0u64..1000, v in 0usize..16) {
        let g = corpus_gen::square_torus(4, 1.0).unwrap();
        let f = common::perturb(&g.leaf_space.projection, 0.1, seed);
        let before = energy(&f).total;
        let after = energy(&relocate_vertex(&f, v, None).unwrap()).total;
        prop_assert!(after <= before);
    }
}

#[test]
fn perturbed_torus_returns_to_oracle() {
    let g = corpus_gen::square_torus(4, 1.0).unwrap();
    let f0 = common::perturb(&g.leaf_space.projection, 0.1, 3);
    assert!(energy(&f0).total > g.oracle.energy);
    let opts = SolveOptions { tol: 1e-12, order: SweepOrder::Colored, ..Default::default() };
    let (f, log) = solve(&f0, &opts).unwrap();
    assert!(log.converged);
    assert!((energy(&f).total - g.oracle.energy).abs() < 1e-10);
}
