//! `∂_{E(T_S)} ν(S)` at `p ≡ 1` against the polylogarithm product.
//!
//!     cargo run --release --example large_p_derivatives

use treerep::calculus::{closed_form_p1, d_nu_dp, span_edges, BasePoint, Multiset};
use treerep::chain::ChainParams;
use treerep::rational::q;
use treerep::tree::{octopus, path, star, VertexSet};

fn main() -> treerep::Result<()> {
    let cases = [
        ("path:2", path(2)?, VertexSet::from_iter([0, 1])),
        ("path:4", path(4)?, VertexSet::full(4)),
        ("star:3", star(3)?, VertexSet::full(4)),
        ("octopus:3x2", octopus(3, 2)?, VertexSet::full(7)),
        ("octopus:4x1", octopus(4, 1)?, VertexSet::full(5)),
    ];
    for (name, t, s) in cases {
        for r in [q(1, 3), q(1, 2), q(3, 4)] {
            let c = ChainParams::uniform(&t, &r, &q(1, 2))?;
            let jet = d_nu_dp(&t, &c, s, &Multiset::edges(span_edges(&t, s)), BasePoint::P1, 6)?;
            let closed = closed_form_p1(&t, s, &r)?;
            println!("{name:<12} S = {s:<10} r = {r:<4} jet = {jet:<16} closed form = {closed}");
        }
    }
    Ok(())
}
