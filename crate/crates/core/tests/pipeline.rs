//! Surface -> foliation -> leaf space -> solve -> Hopf -> decomposition,
//! with file round trips in between.

mod common;

use std::sync::Arc;

use strebel::corpus_gen::{self, CorpusError, OrigamiGluing, OrigamiSpec};
use strebel::flat_surface::TriSurface;
use strebel::foliation::{whitehead_equivalent, FoliationSpec};
use strebel::harmonic_solver::{energy, solve, PLGraphMap, SolveOptions, SweepOrder};
use strebel::hopf::{cylinder_decomposition, hopf_differential, l1_norm};
use strebel::io::{read_json, surface_hash, write_json, QuadDiffFile};
use strebel::metric_graph::{build_leaf_space, MetricGraph};

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("strebel-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn torus_from_files() {
    let g = corpus_gen::square_torus(6, 0.5).unwrap();
    let sp = scratch("torus.json");
    write_json(&sp, &g.surface.to_desc()).unwrap();
    let surface = Arc::new(TriSurface::build(&read_json(&sp).unwrap()).unwrap());
    assert_eq!(surface_hash(&surface), surface_hash(&g.surface));

    let fp = scratch("torus_fol.json");
    write_json(&fp, &g.foliation.to_file()).unwrap();
    let fol = FoliationSpec::from_file(surface, &read_json(&fp).unwrap()).unwrap();
    let leaf = build_leaf_space(&fol).unwrap();

    let f0 = common::perturb(&leaf.projection, 0.05, 11);
    let opts = SolveOptions { tol: 1e-12, order: SweepOrder::Colored, ..Default::default() };
    let (f, log) = solve(&f0, &opts).unwrap();
    assert!(log.converged);
    let q = hopf_differential(&f);
    for z in q.phi.iter().flatten() {
        assert!((z - g.oracle.phi).norm() < 1e-8, "{z}");
    }
    assert!((l1_norm(&q) / (2.0 * energy(&f).total) - 1.0).abs() < 1e-10);
    let d = cylinder_decomposition(&f, &q, &fol).unwrap();
    assert_eq!(d.cylinders.len(), 1);
    assert!((d.cylinders[0].height - 0.5).abs() < 1e-8);
    assert!(whitehead_equivalent(&d, &fol, 1e-6).unwrap());

    let qp = scratch("torus_q.json");
    write_json(&qp, &QuadDiffFile::new(f.surface(), &q)).unwrap();
    let back: QuadDiffFile = read_json(&qp).unwrap();
    assert_eq!(back.surface_hash, surface_hash(f.surface()));
    assert_eq!(back.phi(), q.phi);
}

#[test]
fn map_file_round_trip() {
    let g = corpus_gen::l_shaped_surface(1).unwrap();
    let f = &g.oracle_map;
    let mp = scratch("lshape_map.json");
    write_json(&mp, &f.to_file()).unwrap();
    let back = PLGraphMap::from_file(f.surface_arc(), f.graph_arc(), &read_json(&mp).unwrap()).unwrap();
    assert_eq!(back.images(), f.images());
    assert_eq!(back.paths(), f.paths());

    let gp = scratch("lshape_graph.json");
    write_json(&gp, &f.graph().to_file()).unwrap();
    let graph = MetricGraph::from_file(&read_json(&gp).unwrap()).unwrap();
    assert_eq!(graph.content_hash(), f.graph().content_hash());
}

#[test]
fn lshape_level1_has_one_six_prong_zero() {
    let g = corpus_gen::l_shaped_surface(1).unwrap();
    let (f, _) = solve(&g.leaf_space.projection, &SolveOptions { tol: 1e-12, ..Default::default() }).unwrap();
    let q = hopf_differential(&f);
    let d = cylinder_decomposition(&f, &q, &g.foliation).unwrap();
    assert_eq!(d.singular_set.len(), 1);
    assert_eq!(d.singular_set[0].prongs, 6);
    assert_eq!(d.zero_order_sum(), 4 * f.surface().genus() - 4);
    assert!(whitehead_equivalent(&d, &g.foliation, 1e-6).unwrap());
}

#[test]
fn two_cycle_origami_is_rejected() {
    let spec = OrigamiSpec {
        square_count: 4,
        horizontal_perm: vec![1, 0, 3, 2],
        gluing: OrigamiGluing::Translation { vertical_perm: vec![2, 3, 0, 1] },
        subdivision: 2,
    };
    assert!(matches!(corpus_gen::one_cylinder_origami(&spec), Err(CorpusError::NotOneCylinder(2))));
}
