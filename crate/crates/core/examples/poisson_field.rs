//! Samples the Poisson field of a nonnegative measure and compares it with
//! the chain it came from.
//!
//!     cargo run --release --example poisson_field

use treerep::chain::{ChainParams, PercolationSampler, RecursiveSampler};
use treerep::measure::nu_full;
use treerep::montecarlo::{compare_laws, zero_pattern_check, PoissonField};
use treerep::rational::q;
use treerep::tree::octopus;

fn main() -> treerep::Result<()> {
    let t = octopus(3, 1)?;
    let c = ChainParams::uniform(&t, &q(1, 2), &q(1, 2))?;
    let field = PoissonField::from_measure(&nu_full(&t, &c)?)?;
    for (s, lambda) in &field.atoms {
        println!("atom {s:<10} intensity {lambda:.6}");
    }
    let draws = 1_000_000;
    let zero = zero_pattern_check(&t, &c, &field, draws, 42, 4.0)?;
    println!("zero patterns: worst {:.2} sigma at {:?}", zero.max_sigma, zero.worst_set);
    let rec = RecursiveSampler { tree: &t, params: (&c).into() };
    let perc = PercolationSampler { tree: &t, params: (&c).into() };
    let chi = compare_laws(&rec, &perc, t.n(), draws, 7, 0.01)?;
    println!("recursive vs percolation: chi2 = {:.2}, dof = {}, p = {:.3}", chi.statistic, chi.dof, chi.p_value);
    let chi = compare_laws(&field, &rec, t.n(), draws, 8, 0.01)?;
    println!("field vs recursive:       chi2 = {:.2}, dof = {}, p = {:.3}", chi.statistic, chi.dof, chi.p_value);

    let bad = ChainParams::uniform(&t, &q(1, 4), &q(19, 20))?;
    match PoissonField::from_measure(&nu_full(&t, &bad)?) {
        Err(e) => println!("r = 1/4, p = 19/20: {e}"),
        Ok(_) => println!("r = 1/4, p = 19/20: unexpectedly nonnegative"),
    }
    Ok(())
}
