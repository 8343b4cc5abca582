//! Oracle surfaces written as `surface.json`, `foliation.json` and
//! `oracle.json`.

use std::path::Path;

use serde::Serialize;
use strebel::corpus_gen::{self, Generated, OrigamiGluing, OrigamiSpec, Oracle};
use strebel::io::{content_hash, surface_hash, write_json};

use crate::{create_dir, io_output, CmdResult, Fail};

#[derive(Serialize)]
struct OracleFile<'a> {
    surface_hash: String,
    foliation_hash: String,
    #[serde(flatten)]
    oracle: &'a Oracle,
    /// Curves crossing the cylinders, for the height identity.
    test_curves: &'a [String],
    /// Boundary curves of the leaf space, if any.
    alphas: Vec<String>,
}

fn write(g: &Generated, alphas: Vec<String>, dir: &Path) -> CmdResult {
    create_dir(dir)?;
    let fol = g.foliation.to_file();
    write_json(&dir.join("surface.json"), &g.surface.to_desc()).map_err(io_output)?;
    write_json(&dir.join("foliation.json"), &fol).map_err(io_output)?;
    let oracle = OracleFile {
        surface_hash: surface_hash(&g.surface),
        foliation_hash: content_hash(&fol),
        oracle: &g.oracle,
        test_curves: &g.test_curves,
        alphas,
    };
    write_json(&dir.join("oracle.json"), &oracle).map_err(io_output)?;
    println!(
        "{}: {} vertices, {} triangles, genus {}",
        dir.display(),
        g.surface.vertex_count(),
        g.surface.triangle_count(),
        g.surface.genus()
    );
    Ok(())
}

pub fn torus(n: usize, height: f64, dir: &Path) -> CmdResult {
    let g = corpus_gen::square_torus(n, height).map_err(|e| Fail::Input(e.into()))?;
    write(&g, Vec::new(), dir)
}

pub fn lshape(refine: u32, dir: &Path) -> CmdResult {
    let g = corpus_gen::l_shaped_surface(refine).map_err(|e| Fail::Input(e.into()))?;
    write(&g, Vec::new(), dir)
}

pub fn origami(perm: Vec<usize>, vertical: Option<Vec<usize>>, refine: u32, dir: &Path) -> CmdResult {
    let spec = OrigamiSpec {
        square_count: perm.len(),
        horizontal_perm: perm,
        gluing: match vertical {
            Some(vertical_perm) => OrigamiGluing::Translation { vertical_perm },
            None => OrigamiGluing::Fold,
        },
        subdivision: refine,
    };
    let o = corpus_gen::one_cylinder_origami(&spec).map_err(|e| Fail::Input(e.into()))?;
    write(&o.generated, o.alphas.iter().map(|a| a.label.clone()).collect(), dir)
}
