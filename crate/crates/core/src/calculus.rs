//! Exact partial derivatives of `ν(S)` in the edge parameters `p_e` and the
//! vertex parameters `r_v`, and the closed forms they are checked against.
//!
//! Every `P(X(A) ≡ 0)` is affine in each single parameter, so its jet in a set
//! of directions is recovered exactly from its values at the corners
//! `x_0 + {0, 1}` of each direction. Logs are then expanded inside the
//! truncated algebra.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Pow, Zero};
use rayon::prelude::*;

use crate::chain::{weighted_all_zero, ChainParams, Weights};
use crate::error::{Error, Result};
use crate::jet::{DualValue, JetShape};
use crate::measure::{anchored_terms, mobius_terms, Term};
use crate::rational::Q;
use crate::thresholds::{f_k, f_poly};
use crate::tree::{RootedTree, VertexSet};

/// Default cap on the total multiplicity of a derivative request.
pub const DEFAULT_JET_CAP: u32 = 6;

/// A chain parameter that can be differentiated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    /// `r_v`.
    Vertex(usize),
    /// `p_e`, by edge index.
    Edge(usize),
}

/// Multiset of parameters: parameter → multiplicity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Multiset(pub BTreeMap<Param, u32>);

/// Multiset of edges, the index set of `d/dp_E`.
pub type EdgeMultiset = Multiset;

impl Multiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn edges<I: IntoIterator<Item = usize>>(edges: I) -> Self {
        let mut m = Self::new();
        for e in edges {
            m.push(Param::Edge(e));
        }
        m
    }

    pub fn vertices<I: IntoIterator<Item = usize>>(vertices: I) -> Self {
        let mut m = Self::new();
        for v in vertices {
            m.push(Param::Vertex(v));
        }
        m
    }

    pub fn push(&mut self, p: Param) {
        *self.0.entry(p).or_insert(0) += 1;
    }

    pub fn total(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    /// Parses comma-separated edges given as `u-v` (or plain edge indices),
    /// repeated entries adding multiplicity.
    pub fn parse_edges(tree: &RootedTree, s: &str) -> Result<Self> {
        let mut m = Self::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let e = match tok.split_once('-') {
                Some((a, b)) => {
                    let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad edge {tok:?}")));
                    tree.edge_index(parse(a)?, parse(b)?)
                        .ok_or_else(|| Error::Parse(format!("{tok:?} is not an edge")))?
                }
                None => {
                    let e: usize = tok.parse().map_err(|_| Error::Parse(format!("bad edge {tok:?}")))?;
                    if e >= tree.edge_count() {
                        return Err(Error::Parse(format!("edge index {e} out of range")));
                    }
                    e
                }
            };
            m.push(Param::Edge(e));
        }
        Ok(m)
    }

    /// Parses comma-separated vertex ids, repeated entries adding multiplicity.
    pub fn parse_vertices(tree: &RootedTree, s: &str) -> Result<Self> {
        let mut m = Self::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let v: usize = tok.parse().map_err(|_| Error::Parse(format!("bad vertex {tok:?}")))?;
            if v >= tree.n() {
                return Err(Error::VertexOutOfRange { vertex: v, n: tree.n() });
            }
            m.push(Param::Vertex(v));
        }
        Ok(m)
    }
}

/// Where the edge parameters are fixed before differentiating.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasePoint {
    /// Every `p_e = 0`.
    P0,
    /// Every `p_e = 1`.
    P1,
    /// The supplied parameters unchanged.
    Given,
}

/// Term list valid for every parameter value: boundary terms for connected
/// sets, full inversion otherwise.
pub fn terms_for(tree: &RootedTree, s: VertexSet) -> Result<Vec<Term>> {
    if tree.is_connected(s)? {
        anchored_terms(tree, s)
    } else {
        Ok(mobius_terms(tree.n(), s))
    }
}

/// `∂^dirs Σ_t sign_t log P(X(A_t) ≡ 0)` at `base`, exactly.
pub fn derivative_of_terms(tree: &RootedTree, base: &Weights<Q>, terms: &[Term], dirs: &Multiset, cap: u32) -> Result<Q> {
    let total = dirs.total();
    if total == 0 {
        return Err(Error::InvalidSize("derivative needs a nonempty multiset".into()));
    }
    if total > cap {
        return Err(Error::JetCap(total, cap));
    }
    let vars: Vec<(Param, u32)> = dirs.0.iter().map(|(&p, &m)| (p, m)).collect();
    let shape = JetShape::new(vars.iter().map(|&(_, m)| m).collect());
    let q = vars.len();
    // Corner weights: direction i shifted by one when bit i is set.
    let corners: Vec<Weights<Q>> = (0..1usize << q)
        .map(|mask| {
            let mut w = base.clone();
            for (i, &(p, _)) in vars.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    match p {
                        Param::Vertex(v) => {
                            w.vertex[v].0 += Q::one();
                            w.vertex[v].1 -= Q::one();
                        }
                        Param::Edge(e) => {
                            w.edge[e].0 -= Q::one();
                            w.edge[e].1 += Q::one();
                        }
                    }
                }
            }
            w
        })
        .collect();
    let target: Vec<u32> = vars.iter().map(|&(_, m)| m).collect();
    let logs: Vec<Result<DualValue>> = terms
        .par_iter()
        .map(|&(sign, a)| {
            let jet = affine_jet(tree, &corners, &shape, a);
            let l = jet.log_ratio()?;
            Ok(if sign > 0 { l } else { l.scale(&-Q::one()) })
        })
        .collect();
    let mut sum = DualValue::constant(&shape, Q::zero());
    for l in logs {
        sum = sum.add(&l?);
    }
    Ok(sum.derivative(&target))
}

/// Jet of `P(X(a) ≡ 0)` from its corner values by Möbius inversion.
fn affine_jet(tree: &RootedTree, corners: &[Weights<Q>], shape: &Arc<JetShape>, a: VertexSet) -> DualValue {
    let q = corners.len().trailing_zeros() as usize;
    let mut vals: Vec<Q> = corners
        .iter()
        .map(|w| if a.is_empty() { Q::one() } else { weighted_all_zero(tree, w, a) })
        .collect();
    crate::lattice::mobius_subsets(&mut vals);
    let mut c = vec![Q::zero(); shape.size()];
    for (mask, v) in vals.into_iter().enumerate() {
        let exps: Vec<u32> = (0..q).map(|i| (mask >> i & 1) as u32).collect();
        c[shape.index(&exps)] = v;
    }
    DualValue::from_coefficients(shape, c)
}

fn base_weights(params: &ChainParams, at: BasePoint) -> Weights<Q> {
    let mut w = Weights::from_params(params);
    let fixed = match at {
        BasePoint::P0 => Some(Q::zero()),
        BasePoint::P1 => Some(Q::one()),
        BasePoint::Given => None,
    };
    if let Some(p) = fixed {
        for e in &mut w.edge {
            *e = (Q::one() - &p, p.clone());
        }
    }
    w
}

/// `d/dp_E ν(S)` at the chosen base point. The multiset may mix in vertex
/// parameters as well.
pub fn d_nu_dp(tree: &RootedTree, params: &ChainParams, s: VertexSet, e: &EdgeMultiset, at: BasePoint, cap: u32) -> Result<Q> {
    params.require_positive_r()?;
    let terms = terms_for(tree, s)?;
    derivative_of_terms(tree, &base_weights(params, at), &terms, e, cap)
}

/// `d/dr_K ν(S)` at the supplied parameters.
pub fn d_nu_dr(tree: &RootedTree, params: &ChainParams, s: VertexSet, k: &Multiset, cap: u32) -> Result<Q> {
    params.require_positive_r()?;
    let terms = terms_for(tree, s)?;
    derivative_of_terms(tree, &Weights::from_params(params), &terms, k, cap)
}

/// `(1−r) r^{b−1} − (−1)^b B̃_b (1−r)^b` with `b = |B⁺(S)|`.
pub fn closed_form_p0(b: usize, r: &Q) -> Result<Q> {
    if b < 2 {
        return Err(Error::InvalidSize(format!("outer boundary size {b} must be at least 2")));
    }
    f_k(b, r)
}

/// `(1−r) r^{b−1}`: the exact value of `∂_{E_S} ν(S)` at `p ≡ 0` as computed
/// by the jets. It agrees with [`closed_form_p0`] only when `B̃_b = 0`
/// (`b = 2`); the Bell correction cancels once the `(k−1)!` weights of the
/// logarithm's partition expansion are accounted for.
pub fn leading_p0(b: usize, r: &Q) -> Result<Q> {
    if b < 2 {
        return Err(Error::InvalidSize(format!("outer boundary size {b} must be at least 2")));
    }
    Ok((Q::one() - r) * Pow::pow(r.clone(), b - 1))
}

/// Edges joining `s` to its outer boundary.
pub fn boundary_edges(tree: &RootedTree, s: VertexSet) -> Vec<usize> {
    (0..tree.edge_count())
        .filter(|&e| {
            let (a, b) = tree.edges()[e];
            s.contains(a) != s.contains(b)
        })
        .collect()
}

/// Edges of the minimal subtree spanning `s`.
pub fn span_edges(tree: &RootedTree, s: VertexSet) -> Vec<usize> {
    let span = tree.span(s);
    (0..tree.edge_count())
        .filter(|&e| {
            let (a, b) = tree.edges()[e];
            span.contains(a) && span.contains(b)
        })
        .collect()
}

/// `(−1)^{|E(T_S)|} (1−r)/r · ∏_{j ≥ 2} (−f(j, r))^{k_j}` with `k_j` the number
/// of degree-`j` vertices of the spanning subtree.
pub fn closed_form_p1(tree: &RootedTree, s: VertexSet, r: &Q) -> Result<Q> {
    if s.len() < 2 {
        return Err(Error::InvalidSize("the set needs at least two vertices".into()));
    }
    if !tree.is_connected(s)? {
        return Err(Error::NotConnected);
    }
    let sp = tree.spanning_subtree(s)?;
    let edges = sp.tree.edge_count();
    let one = Q::one();
    let mut v = (&one - r) / r;
    if edges % 2 == 1 {
        v = -v;
    }
    for (j, &k) in sp.degree_counts().iter().enumerate().skip(2) {
        if k > 0 {
            v *= Pow::pow(-f_poly(j, r)?, k);
        }
    }
    Ok(v)
}

/// `−∏_j (1 − p_{j,1}) p_{j,2}`.
pub fn d_nu_dr_octopus(p1: &[Q], p2: &[Q]) -> Result<Q> {
    if p1.len() != p2.len() || p1.len() < 3 {
        return Err(Error::InvalidSize("need m >= 3 matching arm parameters".into()));
    }
    let prod: Q = p1.iter().zip(p2).map(|(a, b)| (Q::one() - a) * b).product();
    Ok(-prod)
}

/// Depth-2 octopus with arm parameters `p_{j,1}` (center edge) and `p_{j,2}`
/// (outer edge), all `r_v = r`.
pub fn octopus_params(tree: &RootedTree, m: usize, r: &Q, p1: &[Q], p2: &[Q]) -> Result<ChainParams> {
    let mut p = vec![Q::zero(); tree.edge_count()];
    for j in 0..m {
        let inner = crate::tree::spider_vertex(2, j, 0);
        let outer = crate::tree::spider_vertex(2, j, 1);
        let e1 = tree.edge_index(0, inner).ok_or_else(|| Error::InvalidSize("not an octopus".into()))?;
        let e2 = tree.edge_index(inner, outer).ok_or_else(|| Error::InvalidSize("not an octopus".into()))?;
        p[e1] = p1[j].clone();
        p[e2] = p2[j].clone();
    }
    ChainParams::new(tree, vec![r.clone(); tree.n()], p)
}

/// Base point of a derivative check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckPoint {
    /// `d/dp_E` at `p ≡ 0`.
    P0,
    /// `d/dp_E` at `p ≡ 1`.
    P1,
    /// `d/dr_K` at `r ≡ 1`, edge parameters as supplied.
    R1,
}

/// A jet derivative next to the closed form predicted for its multiset.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivCheck {
    pub jet: Q,
    /// `None` when no closed form covers the request.
    pub closed_form: Option<Q>,
    /// `(1−r) r^{b−1}`, reported at `p ≡ 0` for the multiset `E_S`.
    pub leading_term: Option<Q>,
}

impl DerivCheck {
    pub fn agrees(&self) -> Option<bool> {
        self.closed_form.as_ref().map(|c| *c == self.jet)
    }
}

fn common_r(params: &ChainParams) -> Option<Q> {
    let r = params.r.first()?;
    params.r.iter().all(|x| x == r).then(|| r.clone())
}

/// Predicted `d/dp_E ν(S)` when `E` is an edge multiset of order at most
/// `|distinguished|`: zero below that order and off the distinguished set.
fn edge_prediction(m: &Multiset, distinguished: &[usize], at_distinguished: impl FnOnce() -> Result<Option<Q>>) -> Result<Option<Q>> {
    if m.0.keys().any(|p| matches!(p, Param::Vertex(_))) {
        return Ok(None);
    }
    let order = m.total() as usize;
    if order < distinguished.len() {
        return Ok(Some(Q::zero()));
    }
    if order > distinguished.len() {
        return Ok(None);
    }
    if *m == Multiset::edges(distinguished.iter().copied()) {
        at_distinguished()
    } else {
        Ok(Some(Q::zero()))
    }
}

/// The center `o` when `s = {o} ∪ N(o)`, `deg o ≥ 3` and every neighbour has
/// exactly one further neighbour; returns `o` and the arm parameters.
fn octopus_center(tree: &RootedTree, params: &ChainParams, s: VertexSet) -> Option<(usize, Vec<Q>, Vec<Q>)> {
    let o = s.iter().find(|&v| tree.degree(v) >= 3)?;
    let nbrs = tree.neighbors(o);
    if s != nbrs.union(VertexSet::singleton(o)) {
        return None;
    }
    let mut p1 = Vec::new();
    let mut p2 = Vec::new();
    for j in nbrs.iter() {
        let outer = tree.neighbors(j).difference(VertexSet::singleton(o));
        if outer.len() != 1 {
            return None;
        }
        p1.push(params.p[tree.edge_index(o, j)?].clone());
        p2.push(params.p[tree.edge_index(j, outer.min()?)?].clone());
    }
    Some((o, p1, p2))
}

/// Jet derivative of `ν(S)` at the base point together with the closed form
/// that applies to the multiset, if any.
pub fn deriv_check(tree: &RootedTree, params: &ChainParams, s: VertexSet, m: &Multiset, at: CheckPoint, cap: u32) -> Result<DerivCheck> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let connected = s.len() >= 2 && tree.is_connected(s)?;
    let r = common_r(params);
    let mut leading_term = None;
    let (jet, closed_form) = match at {
        CheckPoint::P0 | CheckPoint::P1 => {
            let jet = d_nu_dp(tree, params, s, m, if at == CheckPoint::P0 { BasePoint::P0 } else { BasePoint::P1 }, cap)?;
            let closed = if !connected {
                None
            } else if at == CheckPoint::P0 {
                let es = boundary_edges(tree, s);
                let b = tree.outer_boundary(s).len();
                edge_prediction(m, &es, || {
                    let Some(r) = r.as_ref() else { return Ok(None) };
                    if b < 2 {
                        return Ok(None);
                    }
                    leading_term = Some(leading_p0(b, r)?);
                    closed_form_p0(b, r).map(Some)
                })?
            } else {
                edge_prediction(m, &span_edges(tree, s), || match r.as_ref() {
                    Some(r) => closed_form_p1(tree, s, r).map(Some),
                    None => Ok(None),
                })?
            };
            (jet, closed)
        }
        CheckPoint::R1 => {
            let at_one = ChainParams::new(tree, vec![Q::one(); tree.n()], params.p.clone())?;
            let jet = d_nu_dr(tree, &at_one, s, m, cap)?;
            let only_vertices = m.0.keys().all(|p| matches!(p, Param::Vertex(_)));
            let closed = match octopus_center(tree, params, s) {
                Some((o, p1, p2)) if only_vertices => {
                    if !m.0.contains_key(&Param::Vertex(o)) {
                        Some(Q::zero())
                    } else if *m == Multiset::vertices([o]) {
                        Some(d_nu_dr_octopus(&p1, &p2)?)
                    } else {
                        None
                    }
                }
                _ => None,
            };
            (jet, closed)
        }
    };
    Ok(DerivCheck { jet, closed_form, leading_term })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::nu_connected;
    use crate::rational::{q, qi};
    use crate::tree::{octopus, path, spider, star};

    fn center_and_inner(k: usize, leg: usize) -> VertexSet {
        VertexSet::from_iter(std::iter::once(0).chain((0..k).map(|j| crate::tree::spider_vertex(leg, j, 0))))
    }

    #[test]
    fn spider_small_p_leading_derivative() {
        let t = spider(4, 2).unwrap();
        let s = center_and_inner(4, 2);
        let es = boundary_edges(&t, s);
        assert_eq!(es.len(), 4);
        let full = Multiset::edges(es.iter().copied());
        let three = Multiset::edges(es[..3].iter().copied());
        let doubled = Multiset::edges([es[0], es[0], es[1], es[2]]);
        for r in [q(1, 2), q(3, 5), q(9, 20)] {
            let c = ChainParams::uniform(&t, &r, &q(1, 2)).unwrap();
            assert_eq!(d_nu_dp(&t, &c, s, &full, BasePoint::P0, 6).unwrap(), leading_p0(4, &r).unwrap());
            assert_eq!(d_nu_dp(&t, &c, s, &three, BasePoint::P0, 6).unwrap(), qi(0));
            assert_eq!(d_nu_dp(&t, &c, s, &doubled, BasePoint::P0, 6).unwrap(), qi(0));
        }
        assert_eq!(leading_p0(4, &q(1, 2)).unwrap(), q(1, 16));
        assert_eq!(closed_form_p0(4, &q(1, 2)).unwrap(), qi(0));
        assert_eq!(closed_form_p0(2, &q(1, 3)).unwrap(), leading_p0(2, &q(1, 3)).unwrap());
    }

    #[test]
    fn one_edge_large_p_derivative() {
        let t = path(2).unwrap();
        for r in [q(1, 2), q(1, 3), q(4, 5)] {
            let c = ChainParams::uniform(&t, &r, &q(1, 2)).unwrap();
            let d = d_nu_dp(&t, &c, t.vertices(), &Multiset::edges([0]), BasePoint::P1, 6).unwrap();
            assert_eq!(d, -(qi(1) - &r) / &r);
            assert_eq!(closed_form_p1(&t, t.vertices(), &r).unwrap(), d);
        }
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(closed_form_p0(3, &q(1, 2)).unwrap(), q(1, 4));
        assert!(closed_form_p0(4, &q(11, 20)).unwrap() > qi(0));
        let st = star(3).unwrap();
        assert_eq!(closed_form_p1(&st, st.vertices(), &q(1, 2)).unwrap(), qi(0));
        assert_ne!(closed_form_p1(&st, st.vertices(), &q(2, 3)).unwrap(), qi(0));
    }

    #[test]
    fn star_large_p_matches_closed_form() {
        let st = star(3).unwrap();
        for r in [q(1, 2), q(2, 3), q(1, 4)] {
            let c = ChainParams::uniform(&st, &r, &q(1, 2)).unwrap();
            let e = Multiset::edges(0..3);
            let d = d_nu_dp(&st, &c, st.vertices(), &e, BasePoint::P1, 6).unwrap();
            assert_eq!(d, closed_form_p1(&st, st.vertices(), &r).unwrap());
        }
    }

    #[test]
    fn octopus_r_derivative() {
        let t = octopus(3, 2).unwrap();
        let p1 = [q(1, 2), q(1, 3), q(2, 7)];
        let p2 = [q(1, 2), q(3, 5), q(1, 9)];
        let c = octopus_params(&t, 3, &qi(1), &p1, &p2).unwrap();
        let s = center_and_inner(3, 2);
        let d = d_nu_dr(&t, &c, s, &Multiset::vertices([0]), 6).unwrap();
        assert_eq!(d, d_nu_dr_octopus(&p1, &p2).unwrap());
        let all_half = octopus_params(&t, 3, &qi(1), &vec![q(1, 2); 3], &vec![q(1, 2); 3]).unwrap();
        assert_eq!(d_nu_dr(&t, &all_half, s, &Multiset::vertices([0]), 6).unwrap(), q(-1, 64));
        assert!(nu_connected(&t, &c, s).unwrap().is_zero());
    }

    #[test]
    fn checks_pair_jet_with_prediction() {
        let t = spider(3, 2).unwrap();
        let s = center_and_inner(3, 2);
        let c = ChainParams::uniform(&t, &q(1, 2), &q(1, 3)).unwrap();
        let es = boundary_edges(&t, s);
        let at_es = deriv_check(&t, &c, s, &Multiset::edges(es.iter().copied()), CheckPoint::P0, 6).unwrap();
        assert_eq!(at_es.closed_form, Some(q(1, 4)));
        assert_eq!(at_es.leading_term, Some(q(1, 8)));
        assert_eq!(at_es.jet, q(1, 8));
        let low = deriv_check(&t, &c, s, &Multiset::edges([es[0], es[1]]), CheckPoint::P0, 6).unwrap();
        assert_eq!(low.agrees(), Some(true));
        let span = Multiset::edges(span_edges(&t, s));
        assert_eq!(deriv_check(&t, &c, s, &span, CheckPoint::P1, 6).unwrap().agrees(), Some(true));
        let oct = octopus(3, 2).unwrap();
        let p = octopus_params(&oct, 3, &q(1, 2), &[q(1, 2), q(1, 3), q(1, 4)], &[q(1, 5), q(1, 6), q(1, 7)]).unwrap();
        let s = center_and_inner(3, 2);
        let d = deriv_check(&oct, &p, s, &Multiset::vertices([0]), CheckPoint::R1, 6).unwrap();
        assert_eq!(d.agrees(), Some(true));
        assert_eq!(deriv_check(&oct, &p, s, &Multiset::vertices([1, 2]), CheckPoint::R1, 6).unwrap().agrees(), Some(true));
    }

    #[test]
    fn multiset_parsing() {
        let t = path(3).unwrap();
        let m = Multiset::parse_edges(&t, "0-1,0-1,2-1").unwrap();
        assert_eq!(m.total(), 3);
        assert_eq!(m.0[&Param::Edge(0)], 2);
        assert!(Multiset::parse_edges(&t, "0-2").is_err());
    }

    #[test]
    fn jet_cap_enforced() {
        let t = path(3).unwrap();
        let c = ChainParams::uniform(&t, &q(1, 2), &q(1, 2)).unwrap();
        let m = Multiset::edges([0, 0, 0, 1]);
        assert_eq!(d_nu_dp(&t, &c, t.vertices(), &m, BasePoint::P1, 3).unwrap_err(), Error::JetCap(4, 3));
    }
}
