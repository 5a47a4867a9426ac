//! `∂_{E_S} ν(S)` at `p ≡ 0` on spiders, next to `(1-r) r^{b-1}` and the
//! Bell-corrected closed form.
//!
//!     cargo run --release --example small_p_derivatives

use treerep::calculus::{boundary_edges, closed_form_p0, d_nu_dp, leading_p0, BasePoint, Multiset};
use treerep::chain::ChainParams;
use treerep::rational::q;
use treerep::tree::{spider, spider_vertex, VertexSet};

fn main() -> treerep::Result<()> {
    println!("{:>2} {:>6} {:>14} {:>14} {:>14}", "b", "r", "jet", "(1-r)r^(b-1)", "bell form");
    for k in 2..=5 {
        let t = spider(k, 2)?;
        let s = VertexSet::from_iter(std::iter::once(0).chain((0..k).map(|j| spider_vertex(2, j, 0))));
        let es = Multiset::edges(boundary_edges(&t, s));
        for r in [q(1, 2), q(3, 5)] {
            let c = ChainParams::uniform(&t, &r, &q(1, 2))?;
            let jet = d_nu_dp(&t, &c, s, &es, BasePoint::P0, 6)?;
            println!(
                "{k:>2} {:>6} {:>14} {:>14} {:>14}",
                r.to_string(),
                jet.to_string(),
                leading_p0(k, &r)?.to_string(),
                closed_form_p0(k, &r)?.to_string()
            );
        }
    }
    Ok(())
}
