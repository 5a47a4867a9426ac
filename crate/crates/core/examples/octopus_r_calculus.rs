//! Derivatives in the vertex parameters at `r ≡ 1` on the depth-2 octopus.
//!
//!     cargo run --example octopus_r_calculus

use num_traits::One;
use treerep::calculus::{d_nu_dr, d_nu_dr_octopus, octopus_params, Multiset};
use treerep::measure::nu_connected;
use treerep::rational::{q, Q};
use treerep::tree::{octopus, VertexSet};

fn main() -> treerep::Result<()> {
    let t = octopus(3, 2)?;
    let s = VertexSet::from_iter([0, 1, 3, 5]);
    let p1 = [q(1, 3), q(1, 5), q(2, 7)];
    let p2 = [q(1, 2), q(3, 4), q(4, 9)];
    let c = octopus_params(&t, 3, &Q::one(), &p1, &p2)?;
    println!("nu(S) at r = 1: zero = {}", nu_connected(&t, &c, s)?.is_zero());
    for k in [vec![0], vec![1], vec![0, 0], vec![0, 1], vec![2, 4]] {
        let d = d_nu_dr(&t, &c, s, &Multiset::vertices(k.iter().copied()), 6)?;
        println!("d/dr_{k:?} nu(S) = {d}");
    }
    println!("-prod (1-p1) p2 = {}", d_nu_dr_octopus(&p1, &p2)?);
    Ok(())
}
