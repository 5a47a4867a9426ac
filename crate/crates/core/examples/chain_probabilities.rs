//! Exact all-zero probabilities by message passing, checked against the
//! percolation enumeration and against both samplers.
//!
//!     cargo run --release --example chain_probabilities

use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use treerep::chain::{brute_force_prob_all_zero, prob_all_zero, ChainParams, PercolationSampler, RecursiveSampler, Sampler};
use treerep::rational::{fmt_rational, q, to_f64};
use treerep::tree::{star, VertexSet};

fn main() -> treerep::Result<()> {
    let t = star(3)?;
    let c = ChainParams::uniform(&t, &q(1, 3), &q(1, 4))?;
    let rec = RecursiveSampler { tree: &t, params: (&c).into() };
    let perc = PercolationSampler { tree: &t, params: (&c).into() };
    let draws = 200_000;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a: Vec<VertexSet> = (0..draws).map(|_| rec.draw(&mut rng)).collect();
    let b: Vec<VertexSet> = (0..draws).map(|_| perc.draw(&mut rng)).collect();

    println!("{:<10} {:>12} {:>10} {:>10} {:>10}", "A", "P(X(A)=0)", "exact", "recursive", "percol.");
    for m in 1..1u64 << t.n() {
        let set = VertexSet(m);
        let p = prob_all_zero(&t, &c, set)?;
        assert_eq!(p, brute_force_prob_all_zero(&t, &c, set)?);
        let freq = |xs: &[VertexSet]| xs.iter().filter(|x| x.intersection(set).is_empty()).count() as f64 / draws as f64;
        println!("{:<10} {:>12} {:>10.5} {:>10.5} {:>10.5}", set.to_string(), fmt_rational(&p), to_f64(&p), freq(&a), freq(&b));
    }
    Ok(())
}
