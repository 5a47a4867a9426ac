//! Monte-Carlo checks: the Poisson field built from a nonnegative `ν` against
//! the chain, and the two chain samplers against each other.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::chain::{prob_all_zero, ChainParams, Sampler};
use crate::error::{Error, Result};
use crate::measure::{Sign, SignedMeasure};
use crate::rational::to_f64;
use crate::tree::{RootedTree, VertexSet};

/// Draws per RNG stream; the tally is independent of the thread count.
const CHUNK: u64 = 1 << 15;

/// Largest vertex set whose full outcome table is tallied.
pub const TALLY_CAP: usize = 16;

/// Union of independent Poisson numbers of copies of each atom.
#[derive(Clone, Debug)]
pub struct PoissonField {
    pub ground: VertexSet,
    pub atoms: Vec<(VertexSet, f64)>,
}

impl PoissonField {
    pub fn from_measure(m: &SignedMeasure) -> Result<Self> {
        let mut atoms = Vec::new();
        for (s, v) in m.entries() {
            match v.sign() {
                Sign::Negative => return Err(Error::NegativeIntensity(s.to_vec())),
                Sign::Zero => {}
                Sign::Positive => atoms.push((s, v.log_value)),
            }
        }
        atoms.sort_by_key(|a| (a.0.len(), a.0.bits()));
        Ok(PoissonField { ground: m.ground(), atoms })
    }
}

impl Sampler for PoissonField {
    fn draw(&self, rng: &mut ChaCha8Rng) -> VertexSet {
        let mut out = VertexSet::EMPTY;
        for &(s, lambda) in &self.atoms {
            // P(at least one copy) = 1 − e^{−λ}.
            if rng.random::<f64>() < -(-lambda).exp_m1() {
                out = out.union(s);
            }
        }
        out
    }
}

pub fn sample_poisson_field(field: &PoissonField, seed: u64) -> VertexSet {
    field.draw(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Outcome counts indexed by the bit pattern of the ones-set, over `n` vertices.
pub fn tally(sampler: &dyn Sampler, n: usize, draws: u64, seed: u64) -> Result<Vec<u64>> {
    if n > TALLY_CAP {
        return Err(Error::TooLarge { n, cap: TALLY_CAP });
    }
    let chunks = draws.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let mut local = vec![0u64; 1 << n];
            for _ in 0..CHUNK.min(draws - c * CHUNK) {
                local[sampler.draw(&mut rng).bits() as usize] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; 1 << n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(counts)
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroPatternReport {
    pub draws: u64,
    pub sets_checked: usize,
    /// Largest `|empirical − exact| / σ` over nonempty `I`.
    pub max_sigma: f64,
    pub worst_set: Vec<usize>,
    pub tolerance_sigma: f64,
    pub passed: bool,
}

/// Compares empirical `P(X(I) ≡ 0)` with the exact chain value for every nonempty `I`.
pub fn zero_pattern_check(
    tree: &RootedTree,
    params: &ChainParams,
    sampler: &dyn Sampler,
    draws: u64,
    seed: u64,
    tolerance_sigma: f64,
) -> Result<ZeroPatternReport> {
    let n = tree.n();
    let counts = tally(sampler, n, draws, seed)?;
    // zeros[W] = #draws whose ones-set lies inside W.
    let mut zeros = counts;
    crate::lattice::zeta_subsets(&mut zeros);
    let full = (1usize << n) - 1;
    let nf = draws as f64;
    let mut worst = (0.0f64, VertexSet::EMPTY);
    for i in 1..=full {
        let set = VertexSet(i as u64);
        let exact = to_f64(&prob_all_zero(tree, params, set)?);
        let emp = zeros[full & !i] as f64 / nf;
        let sigma = (exact * (1.0 - exact) / nf).sqrt();
        let z = if sigma > 0.0 {
            (emp - exact).abs() / sigma
        } else if emp == exact {
            0.0
        } else {
            f64::INFINITY
        };
        if z > worst.0 {
            worst = (z, set);
        }
    }
    Ok(ZeroPatternReport {
        draws,
        sets_checked: full,
        max_sigma: worst.0,
        worst_set: worst.1.to_vec(),
        tolerance_sigma,
        passed: worst.0 <= tolerance_sigma,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChiSquareReport {
    pub draws: u64,
    pub cells: usize,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub alpha: f64,
    pub passed: bool,
}

/// Groups cell indices in increasing expectation (ties by index) into bins
/// whose expectation reaches `min`; a short tail joins the last bin.
fn pool(expect: &[f64], min: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..expect.len()).filter(|&i| expect[i] > 0.0).collect();
    order.sort_by(|&a, &b| expect[a].total_cmp(&expect[b]).then(a.cmp(&b)));
    let mut bins: Vec<Vec<usize>> = Vec::new();
    let mut cur = Vec::new();
    let mut acc = 0.0;
    for i in order {
        cur.push(i);
        acc += expect[i];
        if acc >= min {
            bins.push(std::mem::take(&mut cur));
            acc = 0.0;
        }
    }
    if !cur.is_empty() {
        match bins.last_mut() {
            Some(last) => last.extend(cur),
            None => bins.push(cur),
        }
    }
    bins
}

fn chi_square(observed: &[(u64, u64)], expect: &[f64], alpha: f64, draws: u64, two_sample: bool) -> Result<ChiSquareReport> {
    let bins = pool(expect, 5.0);
    if bins.len() < 2 {
        return Err(Error::InsufficientCounts);
    }
    let mut stat = 0.0;
    for bin in &bins {
        let a: u64 = bin.iter().map(|&i| observed[i].0).sum();
        let b: u64 = bin.iter().map(|&i| observed[i].1).sum();
        let e: f64 = bin.iter().map(|&i| expect[i]).sum();
        stat += if two_sample {
            let d = a as f64 - b as f64;
            d * d / (a + b) as f64
        } else {
            let d = a as f64 - e;
            d * d / e
        };
    }
    let dof = bins.len() - 1;
    let p_value = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidSize(e.to_string()))?.sf(stat);
    Ok(ChiSquareReport { draws, cells: bins.len(), statistic: stat, dof, p_value, alpha, passed: p_value >= alpha })
}

/// Two-sample chi-square test of homogeneity between equally sized samples.
/// The second sampler runs on a seed derived from `seed`.
pub fn compare_laws(a: &dyn Sampler, b: &dyn Sampler, n: usize, draws: u64, seed: u64, alpha: f64) -> Result<ChiSquareReport> {
    let ca = tally(a, n, draws, seed)?;
    let cb = tally(b, n, draws, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    let observed: Vec<(u64, u64)> = ca.into_iter().zip(cb).collect();
    let expect: Vec<f64> = observed.iter().map(|&(x, y)| (x + y) as f64 / 2.0).collect();
    chi_square(&observed, &expect, alpha, draws, true)
}

/// Goodness of fit of one sampler against an exact law indexed like [`tally`].
pub fn fit_law(s: &dyn Sampler, law: &[f64], draws: u64, seed: u64, alpha: f64) -> Result<ChiSquareReport> {
    let n = law.len().trailing_zeros() as usize;
    let counts = tally(s, n, draws, seed)?;
    let observed: Vec<(u64, u64)> = counts.into_iter().map(|c| (c, 0)).collect();
    let expect: Vec<f64> = law.iter().map(|p| p * draws as f64).collect();
    chi_square(&observed, &expect, alpha, draws, false)
}
