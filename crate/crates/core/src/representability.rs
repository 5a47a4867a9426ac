//! Exact representability verdicts, phase scans and the subdivision check.

use num_traits::{One, Pow, Signed};
use rayon::prelude::*;

use crate::chain::ChainParams;
use crate::error::{Error, Result};
use crate::measure::{nu_connected, nu_full, restrict_measure, Sign};
use crate::rational::Q;
use crate::tree::{RootedTree, VertexSet};

/// Largest tree accepted by [`is_representable`].
pub const VERDICT_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub representable: bool,
    /// First connected set with `ν < 0` in `(size, bits)` order.
    pub witness: Option<VertexSet>,
    pub checked_sets: usize,
    /// Always true: disconnected sets carry `ν = 0` and are skipped.
    pub restricted_to_connected: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasePoint {
    pub r: Q,
    pub p: Q,
    pub verdict: Verdict,
}

pub fn is_representable(tree: &RootedTree, params: &ChainParams) -> Result<Verdict> {
    if tree.n() > VERDICT_CAP {
        return Err(Error::TooLarge { n: tree.n(), cap: VERDICT_CAP });
    }
    params.require_positive_r()?;
    let sets = tree.connected_subsets();
    let negative: Vec<bool> = sets
        .par_iter()
        .map(|&s| nu_connected(tree, params, s).map(|v| v.sign() == Sign::Negative))
        .collect::<Result<_>>()?;
    let witness = sets.iter().zip(&negative).find(|(_, &neg)| neg).map(|(&s, _)| s);
    Ok(Verdict { representable: witness.is_none(), witness, checked_sets: sets.len(), restricted_to_connected: true })
}

/// Verdicts for uniform parameters over `r_grid × p_grid`, row-major in `r`.
pub fn phase_scan(tree: &RootedTree, r_grid: &[Q], p_grid: &[Q]) -> Result<Vec<PhasePoint>> {
    for x in r_grid.iter().chain(p_grid) {
        if !x.is_positive() || *x >= Q::one() {
            return Err(Error::ParamOutOfRange(format!("grid value {x} is not in (0,1)")));
        }
    }
    let grid: Vec<(Q, Q)> = r_grid.iter().flat_map(|r| p_grid.iter().map(move |p| (r.clone(), p.clone()))).collect();
    grid.into_par_iter()
        .map(|(r, p)| {
            let params = ChainParams::uniform(tree, &r, &p)?;
            let verdict = is_representable(tree, &params)?;
            Ok(PhasePoint { r, p, verdict })
        })
        .collect()
}

/// Restricting the chain on the `k`-fold subdivision to the original vertices
/// gives the chain on `tree` with `p' = 1 − (1 − p)^k`; compares the two
/// measures entry by entry.
pub fn scaling_check(tree: &RootedTree, r: &Q, p: &Q, k: usize) -> Result<bool> {
    if k == 0 {
        return Err(Error::InvalidSize("subdivision factor must be at least 1".into()));
    }
    let (sub, v0) = tree.subdivide(k)?;
    if sub.n() > crate::measure::EAGER_CAP {
        return Err(Error::TooLarge { n: sub.n(), cap: crate::measure::EAGER_CAP });
    }
    let fine = nu_full(&sub, &ChainParams::uniform(&sub, r, p)?)?;
    let restricted = restrict_measure(&fine, v0)?;
    let p_prime = Q::one() - Pow::pow(Q::one() - p, k);
    let coarse = nu_full(tree, &ChainParams::uniform(tree, r, &p_prime)?)?;
    Ok(restricted.equals_relabelled(&coarse, |v| v))
}
