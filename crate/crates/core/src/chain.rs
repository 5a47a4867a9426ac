//! Tree-indexed Markov chains with per-vertex parameters `r_v = P(R(v) = 0)`
//! and per-edge resampling probabilities `p_e`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, in_unit_interval, parse_rational, to_f64, Q};
use crate::tree::{RootedTree, VertexSet};

/// Exact chain parameters. `p[e]` refers to `tree.edges()[e]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainParams {
    pub r: Vec<Q>,
    pub p: Vec<Q>,
}

impl ChainParams {
    pub fn new(tree: &RootedTree, r: Vec<Q>, p: Vec<Q>) -> Result<Self> {
        if r.len() != tree.n() || p.len() != tree.edge_count() {
            return Err(Error::ParamOutOfRange(format!(
                "expected {} vertex and {} edge parameters, got {} and {}",
                tree.n(),
                tree.edge_count(),
                r.len(),
                p.len()
            )));
        }
        for (v, x) in r.iter().enumerate() {
            if !in_unit_interval(x) {
                return Err(Error::ParamOutOfRange(format!("r_{v} = {}", fmt_rational(x))));
            }
        }
        for (e, x) in p.iter().enumerate() {
            if !in_unit_interval(x) {
                let (a, b) = tree.edges()[e];
                return Err(Error::ParamOutOfRange(format!("p_{a}-{b} = {}", fmt_rational(x))));
            }
        }
        Ok(ChainParams { r, p })
    }

    pub fn uniform(tree: &RootedTree, r: &Q, p: &Q) -> Result<Self> {
        Self::new(tree, vec![r.clone(); tree.n()], vec![p.clone(); tree.edge_count()])
    }

    /// Independent parameters `k/d` with `d ≤ max_den`: `r_v ∈ (0, 1]`, `p_e ∈ [0, 1]`.
    pub fn random<R: Rng + ?Sized>(tree: &RootedTree, max_den: i64, rng: &mut R) -> Self {
        let mut draw = |lo: i64| {
            let d = rng.random_range(2..=max_den.max(2));
            Q::new(rng.random_range(lo..=d).into(), d.into())
        };
        let r = (0..tree.n()).map(|_| draw(1)).collect();
        let p = (0..tree.edge_count()).map(|_| draw(0)).collect();
        ChainParams { r, p }
    }

    /// Rejects `r_v = 0`, for which the signed measure has infinite entries.
    pub fn require_positive_r(&self) -> Result<()> {
        match self.r.iter().position(|x| x.is_zero()) {
            Some(v) => Err(Error::ZeroResample(v)),
            None => Ok(()),
        }
    }

    /// Parses `{"r": number|string|{vertex: value}, "p": number|string|{"u-v": value}}`.
    pub fn from_json(tree: &RootedTree, json: &Value) -> Result<Self> {
        let obj = json
            .as_object()
            .ok_or_else(|| Error::Parse("params must be a JSON object".into()))?;
        let field = |k: &str| obj.get(k).ok_or_else(|| Error::Parse(format!("missing field {k:?}")));
        let r = match field("r")? {
            Value::Object(map) => {
                let mut r = vec![None; tree.n()];
                for (k, v) in map {
                    let idx: usize = k
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad vertex key {k:?}")))?;
                    if idx >= tree.n() {
                        return Err(Error::VertexOutOfRange { vertex: idx, n: tree.n() });
                    }
                    r[idx] = Some(json_rational(v)?);
                }
                collect_all(r, "r", |i| i.to_string())?
            }
            v => vec![json_rational(v)?; tree.n()],
        };
        let p = match field("p")? {
            Value::Object(map) => {
                let mut p = vec![None; tree.edge_count()];
                for (k, v) in map {
                    let (a, b) = k
                        .split_once('-')
                        .ok_or_else(|| Error::Parse(format!("bad edge key {k:?}")))?;
                    let parse = |s: &str| {
                        s.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad edge key {k:?}")))
                    };
                    let e = tree
                        .edge_index(parse(a)?, parse(b)?)
                        .ok_or_else(|| Error::Parse(format!("{k:?} is not an edge")))?;
                    p[e] = Some(json_rational(v)?);
                }
                collect_all(p, "p", |e| {
                    let (a, b) = tree.edges()[e];
                    format!("{a}-{b}")
                })?
            }
            v => vec![json_rational(v)?; tree.edge_count()],
        };
        Self::new(tree, r, p)
    }

    pub fn to_json(&self, tree: &RootedTree) -> Value {
        let r: serde_json::Map<String, Value> = self
            .r
            .iter()
            .enumerate()
            .map(|(v, x)| (v.to_string(), Value::String(fmt_rational(x))))
            .collect();
        let p: serde_json::Map<String, Value> = self
            .p
            .iter()
            .enumerate()
            .map(|(e, x)| {
                let (a, b) = tree.edges()[e];
                (format!("{a}-{b}"), Value::String(fmt_rational(x)))
            })
            .collect();
        serde_json::json!({ "r": r, "p": p })
    }

    /// Product of all parameter denominators. Multiplying any zero-pattern
    /// probability by this yields an integer.
    pub fn scale(&self) -> BigUint {
        let dens = self.r.iter().chain(self.p.iter()).map(|x| x.denom().magnitude().clone());
        crate::rational::product(dens)
    }
}

fn json_rational(v: &Value) -> Result<Q> {
    match v {
        // The shortest decimal representation is parsed exactly, so 0.45 becomes 9/20.
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        other => Err(Error::Parse(format!("expected a number or fraction string, got {other}"))),
    }
}

fn collect_all(v: Vec<Option<Q>>, what: &str, name: impl Fn(usize) -> String) -> Result<Vec<Q>> {
    v.into_iter()
        .enumerate()
        .map(|(i, x)| x.ok_or_else(|| Error::Parse(format!("missing {what} for {}", name(i)))))
        .collect()
}

/// Commutative semiring operations needed by the message-passing evaluator.
pub trait Scalar: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
}

impl Scalar for BigRational {
    fn zero_like(&self) -> Self {
        Q::zero()
    }
    fn one_like(&self) -> Self {
        Q::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl Scalar for BigUint {
    fn zero_like(&self) -> Self {
        BigUint::zero()
    }
    fn one_like(&self) -> Self {
        BigUint::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

/// Weighted form of the chain. Vertex weights `(w0, w1)` give the root value
/// distribution up to the factor `w0 + w1`; edge weights `(keep, resample)`
/// likewise. Probabilities are recovered by dividing by the product of all
/// weight sums, which is 1 for probability weights.
#[derive(Clone, Debug)]
pub struct Weights<S> {
    pub vertex: Vec<(S, S)>,
    pub edge: Vec<(S, S)>,
}

impl Weights<Q> {
    pub fn from_params(params: &ChainParams) -> Self {
        Weights {
            vertex: params.r.iter().map(|r| (r.clone(), Q::one() - r)).collect(),
            edge: params.p.iter().map(|p| (Q::one() - p, p.clone())).collect(),
        }
    }
}

impl Weights<BigUint> {
    /// Integer weights `(num, den - num)` per parameter. Every probability
    /// computed from them is scaled by [`ChainParams::scale`].
    pub fn integer(params: &ChainParams) -> Self {
        let split = |x: &Q| {
            let d = x.denom().magnitude().clone();
            let n = x.numer().magnitude().clone();
            let rest = &d - &n;
            (n, rest)
        };
        Weights {
            vertex: params.r.iter().map(split).collect(),
            edge: params
                .p
                .iter()
                .map(|p| {
                    let (n, rest) = split(p);
                    (rest, n)
                })
                .collect(),
        }
    }
}

/// Weighted all-zero mass of `a` by root-to-leaf message passing:
/// `f_v(x) = [v ∈ a ⇒ x = 0] · ∏_c Σ_y K(x, y) f_c(y)`.
pub fn weighted_all_zero<S: Scalar>(tree: &RootedTree, w: &Weights<S>, a: VertexSet) -> S {
    let n = tree.n();
    let seed = &w.vertex[0].0;
    let zero = seed.zero_like();
    let mut f: Vec<(S, S)> = vec![(zero.clone(), zero.clone()); n];
    for &v in tree.bfs_order().iter().rev() {
        let mut f0 = seed.one_like();
        let mut f1 = if a.contains(v) { zero.clone() } else { seed.one_like() };
        for &c in tree.children(v) {
            let e = tree.parent_edge(c).unwrap();
            let (keep, res) = &w.edge[e];
            let (r0, r1) = &w.vertex[c];
            let (c0, c1) = &f[c];
            let total = r0.add(r1);
            let fresh = res.mul(&r0.mul(c0).add(&r1.mul(c1)));
            let kept = keep.mul(&total);
            f0 = f0.mul(&kept.mul(c0).add(&fresh));
            if !a.contains(v) {
                f1 = f1.mul(&kept.mul(c1).add(&fresh));
            }
        }
        f[v] = (f0, f1);
    }
    let o = tree.root();
    let (r0, r1) = &w.vertex[o];
    r0.mul(&f[o].0).add(&r1.mul(&f[o].1))
}

/// Exact `P(X(a) ≡ 0)`.
pub fn prob_all_zero(tree: &RootedTree, params: &ChainParams, a: VertexSet) -> Result<Q> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(weighted_all_zero(tree, &Weights::from_params(params), a))
}

/// `P(X(a) ≡ 0) · scale` as an integer, without any gcd reductions.
pub fn scaled_all_zero(tree: &RootedTree, w: &Weights<BigUint>, a: VertexSet) -> BigUint {
    if a.is_empty() {
        // Same scale as every other entry: the product of all weight sums.
        let sums = w
            .vertex
            .iter()
            .chain(w.edge.iter())
            .map(|(x, y)| x + y);
        return crate::rational::product(sums);
    }
    weighted_all_zero(tree, w, a)
}

/// Maximum edge count accepted by [`brute_force_prob_all_zero`].
pub const BRUTE_FORCE_EDGE_CAP: usize = 20;

/// Independent oracle: sums over all `2^|E|` percolation configurations. In
/// each, components take the value drawn at their top vertex.
pub fn brute_force_prob_all_zero(tree: &RootedTree, params: &ChainParams, a: VertexSet) -> Result<Q> {
    let m = tree.edge_count();
    if m > BRUTE_FORCE_EDGE_CAP {
        return Err(Error::TooManyEdges(m, BRUTE_FORCE_EDGE_CAP));
    }
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let one = Q::one();
    let mut total = Q::zero();
    let mut top = vec![0usize; tree.n()];
    for removed in 0u64..(1u64 << m) {
        let mut weight = Q::one();
        for e in 0..m {
            weight *= if removed >> e & 1 == 1 { params.p[e].clone() } else { &one - &params.p[e] };
        }
        if weight.is_zero() {
            continue;
        }
        for &v in tree.bfs_order() {
            top[v] = match tree.parent(v) {
                None => v,
                Some(u) => {
                    let e = tree.parent_edge(v).unwrap();
                    if removed >> e & 1 == 1 {
                        v
                    } else {
                        top[u]
                    }
                }
            };
        }
        let tops = VertexSet::from_iter(a.iter().map(|v| top[v]));
        for t in tops.iter() {
            weight *= &params.r[t];
        }
        total += weight;
    }
    Ok(total)
}

/// Exact law of `X` as a table indexed by the set of vertices with value 1.
pub fn exact_law(tree: &RootedTree, params: &ChainParams) -> Result<Vec<Q>> {
    let n = tree.n();
    if n > 16 {
        return Err(Error::TooLarge { n, cap: 16 });
    }
    let full = (1usize << n) - 1;
    let w = Weights::from_params(params);
    // g[U] = P(X(complement of U) ≡ 0), then Möbius over U gives P(ones = U).
    let mut g: Vec<Q> = (0..=full)
        .into_par_iter()
        .map(|u| {
            let zeros = VertexSet((full & !u) as u64);
            if zeros.is_empty() {
                Q::one()
            } else {
                weighted_all_zero(tree, &w, zeros)
            }
        })
        .collect();
    crate::lattice::mobius_subsets(&mut g);
    debug_assert!(g.iter().all(|x| !x.is_negative()));
    Ok(g)
}

/// Float parameters used by the samplers.
#[derive(Clone, Debug)]
pub struct FloatParams {
    pub r: Vec<f64>,
    pub p: Vec<f64>,
}

impl From<&ChainParams> for FloatParams {
    fn from(c: &ChainParams) -> Self {
        FloatParams { r: c.r.iter().map(to_f64).collect(), p: c.p.iter().map(to_f64).collect() }
    }
}

/// Produces one `{0,1}` assignment per call, returned as the set of vertices with value 1.
pub trait Sampler: Sync {
    fn draw(&self, rng: &mut ChaCha8Rng) -> VertexSet;
}

/// Draws the value of `R(v)`: 0 with probability `r`.
fn fresh_value(rng: &mut ChaCha8Rng, r: f64) -> bool {
    rng.random::<f64>() >= r
}

/// Sequential construction: each child keeps its parent's value with
/// probability `1 - p_e`, otherwise takes a fresh draw.
pub struct RecursiveSampler<'a> {
    pub tree: &'a RootedTree,
    pub params: FloatParams,
}

impl Sampler for RecursiveSampler<'_> {
    fn draw(&self, rng: &mut ChaCha8Rng) -> VertexSet {
        let t = self.tree;
        let mut x = vec![false; t.n()];
        for &v in t.bfs_order() {
            x[v] = match t.parent(v) {
                None => fresh_value(rng, self.params.r[v]),
                Some(u) => {
                    let e = t.parent_edge(v).unwrap();
                    if rng.random::<f64>() < self.params.p[e] {
                        fresh_value(rng, self.params.r[v])
                    } else {
                        x[u]
                    }
                }
            };
        }
        VertexSet::from_iter((0..t.n()).filter(|&v| x[v]))
    }
}

/// Divide and color: delete edges independently, then color each component
/// by the fresh value at its top vertex.
pub struct PercolationSampler<'a> {
    pub tree: &'a RootedTree,
    pub params: FloatParams,
}

impl Sampler for PercolationSampler<'_> {
    fn draw(&self, rng: &mut ChaCha8Rng) -> VertexSet {
        let t = self.tree;
        let removed: Vec<bool> = (0..t.edge_count()).map(|e| rng.random::<f64>() < self.params.p[e]).collect();
        let values: Vec<bool> = (0..t.n()).map(|v| fresh_value(rng, self.params.r[v])).collect();
        let mut top = vec![0usize; t.n()];
        for &v in t.bfs_order() {
            top[v] = match t.parent(v) {
                Some(u) if !removed[t.parent_edge(v).unwrap()] => top[u],
                _ => v,
            };
        }
        VertexSet::from_iter((0..t.n()).filter(|&v| values[top[v]]))
    }
}

pub fn sample_recursive(tree: &RootedTree, params: &ChainParams, seed: u64) -> VertexSet {
    let s = RecursiveSampler { tree, params: params.into() };
    s.draw(&mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn sample_percolation(tree: &RootedTree, params: &ChainParams, seed: u64) -> VertexSet {
    let s = PercolationSampler { tree, params: params.into() };
    s.draw(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Scaled probability table `P(X(A) ≡ 0) · scale` for every `A ⊆ V`, indexed by mask.
pub fn scaled_table(tree: &RootedTree, params: &ChainParams) -> (BigUint, Vec<BigUint>) {
    let w = Weights::integer(params);
    let n = tree.n();
    let table: Vec<BigUint> = (0..1u64 << n)
        .into_par_iter()
        .map(|m| scaled_all_zero(tree, &w, VertexSet(m)))
        .collect();
    (table[0].clone(), table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::tree::{build_tree, path, star};

    fn vs(v: &[usize]) -> VertexSet {
        VertexSet::from_iter(v.iter().copied())
    }

    #[test]
    fn two_vertex_path() {
        let t = path(2).unwrap();
        let c = ChainParams::uniform(&t, &q(1, 2), &q(1, 2)).unwrap();
        assert_eq!(prob_all_zero(&t, &c, vs(&[0, 1])).unwrap(), q(3, 8));
        assert_eq!(brute_force_prob_all_zero(&t, &c, vs(&[0, 1])).unwrap(), q(3, 8));
        assert_eq!(brute_force_prob_all_zero(&t, &c, vs(&[1])).unwrap(), q(1, 2));
    }

    #[test]
    fn frozen_and_independent_limits() {
        let t = build_tree(&[(0, 1), (1, 2), (1, 3), (3, 4)], 0).unwrap();
        let r = vec![q(1, 3), q(1, 2), q(2, 5), q(3, 4), q(1, 7)];
        let frozen = ChainParams::new(&t, r.clone(), vec![Q::zero(); 4]).unwrap();
        let indep = ChainParams::new(&t, r.clone(), vec![Q::one(); 4]).unwrap();
        for a in (1u64..32).map(VertexSet) {
            assert_eq!(prob_all_zero(&t, &frozen, a).unwrap(), r[0]);
            assert_eq!(brute_force_prob_all_zero(&t, &frozen, a).unwrap(), r[0]);
            let prod: Q = a.iter().map(|v| r[v].clone()).product();
            assert_eq!(prob_all_zero(&t, &indep, a).unwrap(), prod);
        }
    }

    #[test]
    fn star_oracle_agrees() {
        let t = star(3).unwrap();
        let c = ChainParams::uniform(&t, &q(1, 2), &q(1, 2)).unwrap();
        let all = t.vertices();
        assert_eq!(prob_all_zero(&t, &c, all).unwrap(), brute_force_prob_all_zero(&t, &c, all).unwrap());
    }

    #[test]
    fn scaled_values_are_exact_multiples() {
        let t = build_tree(&[(0, 1), (1, 2), (0, 3)], 0).unwrap();
        let c = ChainParams::new(&t, vec![q(1, 3), q(2, 7), q(1, 2), q(5, 9)], vec![q(1, 4), q(3, 5), q(2, 3)]).unwrap();
        let w = Weights::integer(&c);
        let scale = c.scale();
        for a in (1u64..16).map(VertexSet) {
            let exact = prob_all_zero(&t, &c, a).unwrap();
            let scaled = scaled_all_zero(&t, &w, a);
            assert_eq!(Q::from_integer(scaled.into()), exact * Q::from_integer(scale.clone().into()));
        }
        assert_eq!(scaled_all_zero(&t, &w, VertexSet::EMPTY), scale);
    }

    #[test]
    fn exact_law_sums_to_one() {
        let t = star(3).unwrap();
        let c = ChainParams::uniform(&t, &q(1, 3), &q(2, 5)).unwrap();
        let law = exact_law(&t, &c).unwrap();
        assert_eq!(law.iter().sum::<Q>(), Q::one());
        assert_eq!(law[0], prob_all_zero(&t, &c, t.vertices()).unwrap());
    }

    #[test]
    fn params_json_round_trip() {
        let t = path(3).unwrap();
        let c = ChainParams::from_json(&t, &serde_json::json!({"r": 0.45, "p": "1/3"})).unwrap();
        assert_eq!(c.r[2], q(9, 20));
        assert_eq!(c.p[1], q(1, 3));
        let back = ChainParams::from_json(&t, &c.to_json(&t)).unwrap();
        assert_eq!(back, c);
        let m = ChainParams::from_json(&t, &serde_json::json!({"r": {"0": 0.5, "1": "1/4", "2": 1}, "p": {"1-0": 0.1, "1-2": 0.2}})).unwrap();
        assert_eq!(m.r[1], q(1, 4));
        assert_eq!(m.p[0], q(1, 10));
        assert!(ChainParams::from_json(&t, &serde_json::json!({"r": 1.5, "p": 0.5})).is_err());
        assert!(ChainParams::from_json(&t, &serde_json::json!({"r": {"0": 0.5}, "p": 0.5})).is_err());
    }

    #[test]
    fn samplers_degenerate_cases() {
        let t = path(5).unwrap();
        let frozen = ChainParams::uniform(&t, &q(1, 2), &Q::zero()).unwrap();
        for seed in 0..20 {
            let x = sample_recursive(&t, &frozen, seed);
            assert!(x.is_empty() || x == t.vertices());
            let y = sample_percolation(&t, &frozen, seed);
            assert!(y.is_empty() || y == t.vertices());
        }
        let c = ChainParams::uniform(&t, &q(1, 2), &q(1, 2)).unwrap();
        assert_eq!(sample_recursive(&t, &c, 7), sample_recursive(&t, &c, 7));
        assert_eq!(sample_percolation(&t, &c, 7), sample_percolation(&t, &c, 7));
    }
}
