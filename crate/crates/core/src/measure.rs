//! The signed measure `ν` of a finite chain, defined by
//! `ν(S_I^∪) = −log P(X(I) ≡ 0)` for every nonempty `I`.
//!
//! Every entry is a signed sum of `log P(X(A) ≡ 0)` terms with as many `+`
//! as `−` terms. Each probability is held as the integer `P · D`, where `D`
//! is the product of all parameter denominators, so `D` cancels and the sign
//! of an entry is a comparison of two integer products.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{scaled_all_zero, ChainParams, Weights};
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, ln_ratio, product, Q};
use crate::tree::{RootedTree, VertexSet};

/// Largest order for which every entry is built eagerly.
pub const EAGER_CAP: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Negative => "-",
            Sign::Zero => "0",
            Sign::Positive => "+",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `ν = log(num / den)` with `num = pos / D^k` and `den = neg / D^k`.
#[derive(Clone, Debug)]
pub struct MeasureValue {
    pos: BigUint,
    neg: BigUint,
    scale: BigUint,
    terms: usize,
    pub log_value: f64,
}

impl MeasureValue {
    pub fn from_parts(pos: BigUint, neg: BigUint, scale: BigUint, terms: usize) -> Self {
        let log_value = ln_ratio(&pos, &neg);
        MeasureValue { pos, neg, scale, terms, log_value }
    }

    /// The value `log(num / den)` for positive rationals.
    pub fn from_ratio(num: &Q, den: &Q) -> Self {
        let pos = num.numer().magnitude() * den.denom().magnitude();
        let neg = den.numer().magnitude() * num.denom().magnitude();
        Self::from_parts(pos, neg, BigUint::one(), 1)
    }

    pub fn zero() -> Self {
        Self::from_parts(BigUint::one(), BigUint::one(), BigUint::one(), 0)
    }

    /// Product of the `+` terms.
    pub fn num(&self) -> Q {
        let d = self.scale.clone().pow(self.terms);
        Q::new(BigInt::from(self.pos.clone()), BigInt::from(d))
    }

    /// Product of the `−` terms.
    pub fn den(&self) -> Q {
        let d = self.scale.clone().pow(self.terms);
        Q::new(BigInt::from(self.neg.clone()), BigInt::from(d))
    }

    /// `exp(ν)` as a reduced rational.
    pub fn exp(&self) -> Q {
        Q::new(BigInt::from(self.pos.clone()), BigInt::from(self.neg.clone()))
    }

    pub fn sign(&self) -> Sign {
        nu_sign(self)
    }

    pub fn is_zero(&self) -> bool {
        self.pos == self.neg
    }

    /// Exact equality of the measure values.
    pub fn value_eq(&self, o: &MeasureValue) -> bool {
        &self.pos * &o.neg == &o.pos * &self.neg
    }

    /// The value `self + o`. Both must share the same scale.
    pub fn add(&self, o: &MeasureValue) -> MeasureValue {
        if o.terms == 0 {
            return self.clone();
        }
        if self.terms == 0 {
            return o.clone();
        }
        debug_assert_eq!(self.scale, o.scale);
        Self::from_parts(&self.pos * &o.pos, &self.neg * &o.neg, self.scale.clone(), self.terms + o.terms)
    }

    /// The value `−self`.
    pub fn neg(&self) -> MeasureValue {
        MeasureValue {
            pos: self.neg.clone(),
            neg: self.pos.clone(),
            scale: self.scale.clone(),
            terms: self.terms,
            log_value: -self.log_value,
        }
    }

    pub fn record(&self, set: VertexSet) -> MeasureRecord {
        MeasureRecord {
            set: set.to_vec(),
            sign: self.sign().symbol().to_string(),
            log_value: self.log_value,
            num: fmt_rational(&self.num()),
            den: fmt_rational(&self.den()),
        }
    }
}

/// Exact sign from the integer products; never consults the float.
pub fn nu_sign(value: &MeasureValue) -> Sign {
    match value.pos.cmp(&value.neg) {
        Ordering::Less => Sign::Negative,
        Ordering::Equal => Sign::Zero,
        Ordering::Greater => Sign::Positive,
    }
}

/// Serialized entry: `{set, sign, log_value, num, den}`.
#[derive(Clone, Debug, Serialize)]
pub struct MeasureRecord {
    pub set: Vec<usize>,
    pub sign: String,
    pub log_value: f64,
    pub num: String,
    pub den: String,
}

/// A signed log-probability term: `sign · log P(X(set) ≡ 0)`.
pub type Term = (i8, VertexSet);

/// Inversion over all subsets: `ν(K) = Σ_{I ⊆ K} (−1)^{|K|−|I|} log P(X(V∖I) ≡ 0)`.
pub fn mobius_terms(n: usize, k: VertexSet) -> Vec<Term> {
    let all = VertexSet::full(n);
    k.subsets()
        .map(|i| {
            let sign = if (k.len() - i.len()).is_multiple_of(2) { 1 } else { -1 };
            (sign, all.difference(i))
        })
        .collect()
}

/// Vertices of `s` that must be anchored: the inner boundary together with
/// the leaves of the subtree induced by `s`.
pub fn anchor_set(tree: &RootedTree, s: VertexSet) -> VertexSet {
    let inner = tree.inner_boundary(s);
    let leaves = VertexSet::from_iter(s.iter().filter(|&v| tree.neighbors(v).intersection(s).len() <= 1));
    inner.union(leaves)
}

/// Boundary terms for a connected `s`. For `|s| ≥ 2` this is
/// `Σ_{J ⊆ L} (−1)^{|J|} log P(X(J ∪ (B⁺(s) ∖ ∂_s J)) ≡ 0)` with `L` the anchor set;
/// for a singleton it is `log P(X(B⁺)) − log P(X({v} ∪ B⁺))`.
pub fn anchored_terms(tree: &RootedTree, s: VertexSet) -> Result<Vec<Term>> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    if !tree.is_connected(s)? {
        return Err(Error::NotConnected);
    }
    let b = tree.boundaries(s)?;
    if s.len() == 1 {
        return Ok(vec![(1, b.outer), (-1, b.outer.union(s))]);
    }
    let anchors = anchor_set(tree, s);
    Ok(anchors
        .subsets()
        .map(|j| {
            let sign = if j.len() % 2 == 0 { 1 } else { -1 };
            (sign, j.union(b.outer.difference(b.outer_of(j))))
        })
        .collect())
}

/// Assembles a value from a balanced term list and a probability oracle
/// returning `P(X(A) ≡ 0) · scale`.
pub fn combine_terms<F>(terms: &[Term], scale: &BigUint, mut prob: F) -> MeasureValue
where
    F: FnMut(VertexSet) -> BigUint,
{
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for &(sign, a) in terms {
        if sign > 0 {
            pos.push(prob(a));
        } else {
            neg.push(prob(a));
        }
    }
    debug_assert_eq!(pos.len(), neg.len(), "unbalanced term list");
    let k = pos.len();
    MeasureValue::from_parts(product(pos), product(neg), scale.clone(), k)
}

/// `ν(s)` for a connected `s` from boundary terms alone.
pub fn nu_connected(tree: &RootedTree, params: &ChainParams, s: VertexSet) -> Result<MeasureValue> {
    params.require_positive_r()?;
    let terms = anchored_terms(tree, s)?;
    let w = Weights::integer(params);
    Ok(combine_terms(&terms, &params.scale(), |a| scaled_all_zero(tree, &w, a)))
}

/// A single entry by direct inversion; valid for any nonempty `k`.
pub fn nu_entry(tree: &RootedTree, params: &ChainParams, k: VertexSet) -> Result<MeasureValue> {
    params.require_positive_r()?;
    if k.is_empty() {
        return Err(Error::EmptySet);
    }
    if !k.is_subset(tree.vertices()) {
        let vertex = k.difference(tree.vertices()).min().unwrap();
        return Err(Error::VertexOutOfRange { vertex, n: tree.n() });
    }
    let w = Weights::integer(params);
    Ok(combine_terms(&mobius_terms(tree.n(), k), &params.scale(), |a| scaled_all_zero(tree, &w, a)))
}

#[derive(Clone)]
enum Storage {
    /// Indexed by the compressed position of the set within the ground set.
    Eager(Vec<Option<MeasureValue>>),
    Lazy(Arc<(RootedTree, ChainParams)>),
}

/// `ν` on the nonempty subsets of a ground set.
#[derive(Clone)]
pub struct SignedMeasure {
    ground: VertexSet,
    storage: Storage,
}

impl fmt::Debug for SignedMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SignedMeasure")
            .field("ground", &self.ground)
            .field("lazy", &matches!(self.storage, Storage::Lazy(_)))
            .finish()
    }
}

/// Position of `set` among the subsets of `ground`, reading ground bits in order.
fn compress(ground: VertexSet, set: VertexSet) -> usize {
    ground
        .iter()
        .enumerate()
        .filter(|&(_, v)| set.contains(v))
        .fold(0usize, |m, (i, _)| m | 1 << i)
}

fn expand(ground: VertexSet, idx: usize) -> VertexSet {
    VertexSet::from_iter(ground.iter().enumerate().filter(|&(i, _)| idx >> i & 1 == 1).map(|(_, v)| v))
}

impl SignedMeasure {
    pub fn from_entries(ground: VertexSet, entries: Vec<(VertexSet, MeasureValue)>) -> Self {
        let mut table = vec![None; 1usize << ground.len()];
        for (s, v) in entries {
            table[compress(ground, s)] = Some(v);
        }
        SignedMeasure { ground, storage: Storage::Eager(table) }
    }

    pub fn ground(&self) -> VertexSet {
        self.ground
    }

    pub fn is_lazy(&self) -> bool {
        matches!(self.storage, Storage::Lazy(_))
    }

    /// `ν(k)`; sets outside the ground set or empty have no entry.
    pub fn get(&self, k: VertexSet) -> Option<MeasureValue> {
        if k.is_empty() || !k.is_subset(self.ground) {
            return None;
        }
        match &self.storage {
            Storage::Eager(t) => t[compress(self.ground, k)].clone(),
            Storage::Lazy(ctx) => nu_entry(&ctx.0, &ctx.1, k).ok(),
        }
    }

    /// All nonempty subsets of the ground set in increasing compressed order.
    pub fn sets(&self) -> impl Iterator<Item = VertexSet> + '_ {
        (1..1usize << self.ground.len()).map(move |i| expand(self.ground, i))
    }

    pub fn entries(&self) -> Vec<(VertexSet, MeasureValue)> {
        let sets: Vec<VertexSet> = self.sets().collect();
        sets.into_par_iter().filter_map(|s| self.get(s).map(|v| (s, v))).collect()
    }

    /// `exp(−Σ_{K ∩ i ≠ ∅} ν(K))` as a reduced rational, through a multiplicative
    /// zeta transform of `exp(ν)`: the result equals `Z(G ∖ i) / Z(G)` with
    /// `Z(U) = ∏_{K ⊆ U} exp(ν(K))`.
    pub fn zero_probabilities(&self) -> Vec<Q> {
        let m = self.ground.len();
        let mut z: Vec<Q> = (0..1usize << m)
            .into_par_iter()
            .map(|i| if i == 0 { Q::one() } else { self.get(expand(self.ground, i)).map(|v| v.exp()).unwrap_or_else(Q::one) })
            .collect();
        crate::lattice::zeta_product(&mut z);
        let full = (1usize << m) - 1;
        let total = z[full].clone();
        (0..1usize << m).map(|i| &z[full & !i] / &total).collect()
    }

    /// Position of `set` in [`SignedMeasure::zero_probabilities`].
    pub fn index_of(&self, set: VertexSet) -> usize {
        compress(self.ground, set)
    }

    /// Exact entry-by-entry equality after relabelling `self`'s vertices by `map`.
    pub fn equals_relabelled(&self, other: &SignedMeasure, map: impl Fn(usize) -> usize) -> bool {
        if self.ground.len() != other.ground.len() {
            return false;
        }
        self.sets().all(|s| {
            let t = VertexSet::from_iter(s.iter().map(&map));
            match (self.get(s), other.get(t)) {
                (Some(a), Some(b)) => a.value_eq(&b),
                (None, None) => true,
                (Some(a), None) | (None, Some(a)) => a.is_zero(),
            }
        })
    }
}

/// Every entry of `ν` for the chain. Built eagerly up to [`EAGER_CAP`] vertices;
/// larger trees get entries assembled on demand.
pub fn nu_full(tree: &RootedTree, params: &ChainParams) -> Result<SignedMeasure> {
    params.require_positive_r()?;
    let n = tree.n();
    if n > EAGER_CAP {
        return Ok(SignedMeasure {
            ground: tree.vertices(),
            storage: Storage::Lazy(Arc::new((tree.clone(), params.clone()))),
        });
    }
    let w = Weights::integer(params);
    let scale = params.scale();
    let full = (1u64 << n) - 1;
    // Multiplicative Möbius transform on (pos, neg, count) triples, starting from log P(X(V∖I) ≡ 0).
    let mut cells: Vec<(BigUint, BigUint, usize, usize)> = (0..=full)
        .into_par_iter()
        .map(|i| (scaled_all_zero(tree, &w, VertexSet(full & !i)), BigUint::one(), 1, 0))
        .collect();
    for bit in 0..n {
        let b = 1usize << bit;
        cells.par_chunks_mut(2 * b).for_each(|chunk| {
            let (lo, hi) = chunk.split_at_mut(b);
            for (h, l) in hi.iter_mut().zip(lo.iter()) {
                let pos = &h.0 * &l.1;
                let neg = &h.1 * &l.0;
                *h = (pos, neg, h.2 + l.3, h.3 + l.2);
            }
        });
    }
    let table: Vec<Option<MeasureValue>> = cells
        .into_par_iter()
        .enumerate()
        .map(|(m, (pos, neg, kp, kn))| {
            (m != 0).then(|| {
                debug_assert_eq!(kp, kn);
                MeasureValue::from_parts(pos, neg, scale.clone(), kp)
            })
        })
        .collect();
    Ok(SignedMeasure { ground: tree.vertices(), storage: Storage::Eager(table) })
}

/// Law of `X|_B`: `ν_B(A) = Σ_{A' ∩ B = A} ν(A')`.
pub fn restrict_measure(m: &SignedMeasure, b: VertexSet) -> Result<SignedMeasure> {
    if b.is_empty() {
        return Err(Error::EmptySet);
    }
    let b = b.intersection(m.ground);
    let mut acc: Vec<MeasureValue> = vec![MeasureValue::zero(); 1usize << b.len()];
    for (s, v) in m.entries() {
        if v.is_zero() {
            continue;
        }
        let a = s.intersection(b);
        if a.is_empty() {
            continue;
        }
        let i = compress(b, a);
        acc[i] = acc[i].add(&v);
    }
    let entries = acc
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(i, v)| (expand(b, i), v))
        .collect();
    Ok(SignedMeasure::from_entries(b, entries))
}

/// Law of `X|_B` given `X ≡ 0` off `B`: the entries on subsets of `B`.
pub fn condition_measure(m: &SignedMeasure, b: VertexSet) -> Result<SignedMeasure> {
    if b.is_empty() {
        return Err(Error::EmptySet);
    }
    let b = b.intersection(m.ground);
    let entries = (1..1usize << b.len())
        .map(|i| expand(b, i))
        .filter_map(|s| m.get(s).map(|v| (s, v)))
        .collect();
    Ok(SignedMeasure::from_entries(b, entries))
}

/// Reduced `exp(ν)` pairs, useful for printing small cases.
pub fn reduced_pair(v: &MeasureValue) -> (BigUint, BigUint) {
    let g = v.pos.gcd(&v.neg);
    if g.is_zero() {
        return (v.pos.clone(), v.neg.clone());
    }
    (&v.pos / &g, &v.neg / &g)
}
