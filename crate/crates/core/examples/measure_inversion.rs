//! The signed measure of a short path, its exact signs, and the round trip
//! back to the all-zero probabilities.
//!
//!     cargo run --example measure_inversion

use num_traits::One;
use treerep::chain::{prob_all_zero, ChainParams};
use treerep::measure::{nu_full, reduced_pair};
use treerep::rational::{q, Q};
use treerep::tree::{path, VertexSet};

fn main() -> treerep::Result<()> {
    let t = path(4)?;
    let c = ChainParams::uniform(&t, &q(1, 2), &q(1, 2))?;
    let m = nu_full(&t, &c)?;
    let mut entries = m.entries();
    entries.sort_by_key(|(s, _)| (s.len(), s.bits()));
    for (s, v) in &entries {
        let (num, den) = reduced_pair(v);
        println!("nu({s:<9}) {} {:>12.8}   exp = {num}/{den}", v.sign().symbol(), v.log_value);
    }

    // exp(nu) of a single interior vertex: 1 + p^2 r(1-r)/(r + (1-p) - (1-p) r)^2 = 10/9.
    let mid = m.get(VertexSet::singleton(1)).unwrap().exp();
    println!("exp nu({{1}}) = {mid}");
    assert_eq!(mid, q(10, 9));

    let z = m.zero_probabilities();
    for i in 1..1u64 << t.n() {
        let set = VertexSet(i);
        assert_eq!(z[m.index_of(set)], prob_all_zero(&t, &c, set)?);
    }
    let total: Q = entries.iter().map(|(_, v)| v.exp()).product();
    println!("P(X = 0) = {}", Q::one() / total);
    Ok(())
}
