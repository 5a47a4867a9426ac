//! Boundaries, spanning subtree and closure of a vertex set.
//!
//!     cargo run --example tree_boundaries

use treerep::tree::{build_tree, VertexSet};

fn main() -> treerep::Result<()> {
    let t = build_tree(&[(0, 1), (1, 2), (2, 3), (1, 4), (2, 5), (3, 6), (6, 7)], 0)?;
    for s in [VertexSet::from_iter([1, 2, 3]), VertexSet::from_iter([0, 3]), VertexSet::from_iter([2, 5, 6])] {
        let b = t.boundaries(s)?;
        let sp = t.spanning_subtree(s)?;
        println!(
            "S = {s:<10} connected = {:<5}  B- = {:<8} B+ = {:<10} span = {:<12} closure = {:<12} R = {}",
            t.is_connected(s)?,
            b.inner.to_string(),
            b.outer.to_string(),
            sp.vertices.to_string(),
            sp.closure.to_string(),
            sp.r_set
        );
    }
    println!("{} connected subsets", t.connected_subsets().len());
    Ok(())
}
