//! Rooted trees, vertex bit sets, boundaries, spanning subtrees and the
//! standard generators (paths, stars, spiders, octopus truncations).

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest tree order accepted by default. Subset enumeration is exponential.
pub const DEFAULT_ORDER_CAP: usize = 24;
const HARD_ORDER_CAP: usize = 64;

/// A subset of `0..n` stored as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VertexSet(pub u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1u64 << v)
    }

    pub fn bits(self) -> u64 {
        self.0
    }
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
    pub fn contains(self, v: usize) -> bool {
        v < 64 && self.0 >> v & 1 == 1
    }
    pub fn insert(&mut self, v: usize) {
        self.0 |= 1u64 << v;
    }
    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1u64 << v);
    }
    pub fn union(self, o: Self) -> Self {
        VertexSet(self.0 | o.0)
    }
    pub fn intersection(self, o: Self) -> Self {
        VertexSet(self.0 & o.0)
    }
    pub fn difference(self, o: Self) -> Self {
        VertexSet(self.0 & !o.0)
    }
    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }
    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(v)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = VertexSet> {
        let full = self.0;
        let mut sub = 0u64;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = VertexSet(sub);
            if sub == full {
                done = true;
            } else {
                sub = (sub.wrapping_sub(full)) & full;
            }
            Some(out)
        })
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Self {
        VertexSet(it.into_iter().fold(0u64, |m, v| m | (1u64 << v)))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// An immutable tree on vertices `0..n`, oriented away from `root`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    n: usize,
    root: usize,
    edges: Vec<(usize, usize)>,
    parent: Vec<Option<usize>>,
    parent_edge: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    nbrs: Vec<VertexSet>,
    /// Vertices in breadth-first order from the root.
    order: Vec<usize>,
}

/// Serialized form: `{"n": 4, "root": 0, "edges": [[0,1],[1,2],[2,3]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TreeJson {
    pub n: usize,
    #[serde(default)]
    pub root: usize,
    pub edges: Vec<[usize; 2]>,
}

/// Builds a rooted tree on `0..n` where `n` is one more than the largest id mentioned.
pub fn build_tree(edges: &[(usize, usize)], root: usize) -> Result<RootedTree> {
    let n = edges
        .iter()
        .map(|&(a, b)| a.max(b) + 1)
        .max()
        .unwrap_or(1)
        .max(root + 1);
    RootedTree::new(n, root, edges, DEFAULT_ORDER_CAP)
}

impl RootedTree {
    pub fn new(n: usize, root: usize, edges: &[(usize, usize)], cap: usize) -> Result<Self> {
        let cap = cap.min(HARD_ORDER_CAP);
        if n == 0 {
            return Err(Error::InvalidSize("a tree needs at least one vertex".into()));
        }
        if n > cap {
            return Err(Error::TooLarge { n, cap });
        }
        if root >= n {
            return Err(Error::RootAbsent(root));
        }
        let mut nbrs = vec![VertexSet::EMPTY; n];
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, &(a, b)) in edges.iter().enumerate() {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b || nbrs[a].contains(b) {
                return Err(Error::CycleDetected);
            }
            nbrs[a].insert(b);
            nbrs[b].insert(a);
            adj[a].push((b, i));
            adj[b].push((a, i));
        }
        let mut parent = vec![None; n];
        let mut parent_edge = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(w, ei) in &adj[v] {
                if Some(w) == parent[v] && parent_edge[v] == Some(ei) {
                    continue;
                }
                if seen[w] {
                    return Err(Error::CycleDetected);
                }
                seen[w] = true;
                parent[w] = Some(v);
                parent_edge[w] = Some(ei);
                children[v].push(w);
                queue.push_back(w);
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::Disconnected(v));
        }
        for c in &mut children {
            c.sort_unstable();
        }
        Ok(RootedTree {
            n,
            root,
            edges: edges.to_vec(),
            parent,
            parent_edge,
            children,
            nbrs,
            order,
        })
    }

    pub fn from_json(json: &TreeJson, cap: usize) -> Result<Self> {
        let edges: Vec<(usize, usize)> = json.edges.iter().map(|e| (e[0], e[1])).collect();
        if edges.len() + 1 != json.n {
            if edges.len() + 1 > json.n {
                return Err(Error::CycleDetected);
            }
            return Err(Error::Disconnected(json.n - 1));
        }
        Self::new(json.n, json.root, &edges, cap)
    }

    pub fn to_json(&self) -> TreeJson {
        TreeJson {
            n: self.n,
            root: self.root,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn root(&self) -> usize {
        self.root
    }
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }
    /// Index of the edge joining `v` to its parent.
    pub fn parent_edge(&self, v: usize) -> Option<usize> {
        self.parent_edge[v]
    }
    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }
    pub fn neighbors(&self, v: usize) -> VertexSet {
        self.nbrs[v]
    }
    pub fn degree(&self, v: usize) -> usize {
        self.nbrs[v].len()
    }
    /// Breadth-first order from the root.
    pub fn bfs_order(&self) -> &[usize] {
        &self.order
    }
    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }
    pub fn leaves(&self) -> VertexSet {
        VertexSet::from_iter((0..self.n).filter(|&v| self.degree(v) <= 1))
    }

    /// Index of the edge joining `a` and `b`.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        if a >= self.n || b >= self.n {
            return None;
        }
        if self.parent[b] == Some(a) {
            self.parent_edge[b]
        } else if self.parent[a] == Some(b) {
            self.parent_edge[a]
        } else {
            None
        }
    }

    /// The endpoint of edge `e` farther from the root.
    pub fn edge_child(&self, e: usize) -> usize {
        let (a, b) = self.edges[e];
        if self.parent[b] == Some(a) {
            b
        } else {
            a
        }
    }

    /// Same undirected tree rooted elsewhere.
    pub fn rerooted(&self, root: usize) -> Result<Self> {
        Self::new(self.n, root, &self.edges, HARD_ORDER_CAP)
    }

    fn check(&self, s: VertexSet) -> Result<()> {
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
        if !s.is_subset(self.vertices()) {
            let v = s.difference(self.vertices()).min().unwrap();
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(())
    }

    /// Vertices outside `s` adjacent to some member of `s`.
    pub fn outer_boundary(&self, s: VertexSet) -> VertexSet {
        let mut out = VertexSet::EMPTY;
        for v in s.iter() {
            out = out.union(self.nbrs[v]);
        }
        out.difference(s)
    }

    /// Members of `s` with a neighbor outside `s`.
    pub fn inner_boundary(&self, s: VertexSet) -> VertexSet {
        VertexSet::from_iter(s.iter().filter(|&v| !self.nbrs[v].is_subset(s)))
    }

    pub fn boundaries(&self, s: VertexSet) -> Result<BoundaryReport> {
        self.check(s)?;
        let inner = self.inner_boundary(s);
        let outer = self.outer_boundary(s);
        Ok(BoundaryReport {
            inner,
            outer,
            full: inner.union(outer),
            nbrs: self.nbrs.clone(),
        })
    }

    pub fn is_connected(&self, s: VertexSet) -> Result<bool> {
        self.check(s)?;
        Ok(self.connected_unchecked(s))
    }

    pub(crate) fn connected_unchecked(&self, s: VertexSet) -> bool {
        let Some(start) = s.min() else {
            return false;
        };
        let mut reached = VertexSet::singleton(start);
        let mut frontier = reached;
        while !frontier.is_empty() {
            let mut next = VertexSet::EMPTY;
            for v in frontier.iter() {
                next = next.union(self.nbrs[v]);
            }
            next = next.intersection(s).difference(reached);
            reached = reached.union(next);
            frontier = next;
        }
        reached == s
    }

    /// Vertex set of the smallest subtree containing `s`.
    pub fn span(&self, s: VertexSet) -> VertexSet {
        // Peel leaves outside `s` until none remain.
        let mut span = self.vertices();
        loop {
            let peel = VertexSet::from_iter(
                span.difference(s)
                    .iter()
                    .filter(|&v| self.nbrs[v].intersection(span).len() <= 1),
            );
            if peel.is_empty() {
                return span;
            }
            span = span.difference(peel);
        }
    }

    pub fn spanning_subtree(&self, s: VertexSet) -> Result<SpanningSubtree> {
        self.check(s)?;
        let span = self.span(s);
        let map: Vec<usize> = span.to_vec();
        let index = |v: usize| map.binary_search(&v).unwrap();
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|&&(a, b)| span.contains(a) && span.contains(b))
            .map(|&(a, b)| (index(a), index(b)))
            .collect();
        let root = if span.contains(self.root) {
            self.root
        } else {
            // The member of the span closest to the original root.
            *self.order.iter().find(|&&v| span.contains(v)).unwrap()
        };
        let tree = RootedTree::new(map.len(), index(root), &edges, HARD_ORDER_CAP)?;
        let inner = self.inner_boundary(s);
        let span_degree = |v: usize| self.nbrs[v].intersection(span).len();
        let r_set = VertexSet::from_iter(inner.iter().filter(|&v| span_degree(v) >= 2));
        let mut closure = span;
        for v in r_set.iter() {
            closure = closure.union(self.nbrs[v]);
        }
        Ok(SpanningSubtree {
            tree,
            map,
            vertices: span,
            closure,
            r_set,
        })
    }

    /// Replaces every edge by a path of `k` edges. Original ids are kept and
    /// new vertices are appended edge by edge.
    pub fn subdivide(&self, k: usize) -> Result<(RootedTree, VertexSet)> {
        if k == 0 {
            return Err(Error::InvalidSize("subdivision factor must be at least 1".into()));
        }
        let mut next = self.n;
        let mut edges = Vec::with_capacity(self.edges.len() * k);
        for &(a, b) in &self.edges {
            let mut prev = a;
            for _ in 1..k {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
            edges.push((prev, b));
        }
        let tree = RootedTree::new(next, self.root, &edges, HARD_ORDER_CAP)?;
        Ok((tree, VertexSet::full(self.n)))
    }

    /// All connected nonempty subsets ordered by `(size, bit pattern)`.
    pub fn connected_subsets(&self) -> Vec<VertexSet> {
        let mut out = Vec::new();
        for v in 0..self.n {
            // Grow sets whose minimum is `v`.
            let allowed = VertexSet(!((1u64 << v) - 1)).intersection(self.vertices());
            let start = VertexSet::singleton(v);
            let ext = self.nbrs[v].intersection(allowed);
            self.grow(start, ext, VertexSet::EMPTY, allowed, &mut out);
        }
        out.sort_by_key(|s| (s.len(), s.0));
        out
    }

    fn grow(
        &self,
        set: VertexSet,
        ext: VertexSet,
        banned: VertexSet,
        allowed: VertexSet,
        out: &mut Vec<VertexSet>,
    ) {
        out.push(set);
        let mut ext = ext;
        let mut banned = banned;
        while let Some(w) = ext.min() {
            ext.remove(w);
            let mut next = set;
            next.insert(w);
            let fresh = self.nbrs[w]
                .intersection(allowed)
                .difference(next)
                .difference(banned);
            self.grow(next, ext.union(fresh), banned, allowed, out);
            banned.insert(w);
        }
    }
}

/// Inner and outer vertex boundaries of a set.
#[derive(Clone, Debug)]
pub struct BoundaryReport {
    pub inner: VertexSet,
    pub outer: VertexSet,
    pub full: VertexSet,
    nbrs: Vec<VertexSet>,
}

impl BoundaryReport {
    /// Outer-boundary vertices adjacent to some member of `i`.
    pub fn outer_of(&self, i: VertexSet) -> VertexSet {
        let mut out = VertexSet::EMPTY;
        for v in i.iter() {
            out = out.union(self.nbrs[v]);
        }
        out.intersection(self.outer)
    }
}

/// The minimal subtree spanning a set, with the closure and the set of inner
/// boundary vertices that are not leaves of the span.
#[derive(Clone, Debug)]
pub struct SpanningSubtree {
    /// Relabelled subtree on `0..map.len()`.
    pub tree: RootedTree,
    /// `map[i]` is the original id of subtree vertex `i`.
    pub map: Vec<usize>,
    pub vertices: VertexSet,
    pub closure: VertexSet,
    pub r_set: VertexSet,
}

impl SpanningSubtree {
    /// Number of span vertices of each degree, indexed by degree.
    pub fn degree_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.tree.n() + 1];
        for v in 0..self.tree.n() {
            counts[self.tree.degree(v)] += 1;
        }
        counts
    }
}

/// Uniform labelled tree on `n` vertices (Prüfer decoding) rooted at 0.
pub fn random_tree<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Result<RootedTree> {
    if n <= 2 {
        return path(n);
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in &seq {
        let leaf = (0..n).find(|&u| degree[u] == 1).expect("a leaf always remains");
        edges.push((leaf, v));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    RootedTree::new(n, 0, &edges, HARD_ORDER_CAP)
}

pub fn path(n: usize) -> Result<RootedTree> {
    if n == 0 {
        return Err(Error::InvalidSize("path needs n >= 1".into()));
    }
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    RootedTree::new(n, 0, &edges, HARD_ORDER_CAP)
}

/// Center 0 with leaves `1..=k`.
pub fn star(k: usize) -> Result<RootedTree> {
    if k == 0 {
        return Err(Error::InvalidSize("star needs k >= 1".into()));
    }
    spider(k, 1)
}

/// Center 0 with `k` legs of `leg` vertices; leg `j` holds `1 + j*leg .. 1 + (j+1)*leg`,
/// ordered outward.
pub fn spider(k: usize, leg: usize) -> Result<RootedTree> {
    if k == 0 || leg == 0 {
        return Err(Error::InvalidSize("spider needs k >= 1 and leg >= 1".into()));
    }
    let mut edges = Vec::with_capacity(k * leg);
    for j in 0..k {
        let base = 1 + j * leg;
        edges.push((0, base));
        for t in 1..leg {
            edges.push((base + t - 1, base + t));
        }
    }
    RootedTree::new(1 + k * leg, 0, &edges, HARD_ORDER_CAP)
}

/// Depth-`depth` truncation of the octopus tree with a degree-`m` center.
pub fn octopus(m: usize, depth: usize) -> Result<RootedTree> {
    if m < 3 {
        return Err(Error::InvalidSize("octopus needs m >= 3".into()));
    }
    spider(m, depth)
}

/// First vertex of leg `j` in a spider/octopus with legs of length `leg`.
pub fn spider_vertex(leg: usize, j: usize, t: usize) -> usize {
    1 + j * leg + t
}

/// Parses `path:5`, `star:4`, `octopus:3x2`, `spider:4x2`, or a path to a tree JSON file.
pub fn parse_tree(desc: &str, cap: usize) -> Result<RootedTree> {
    let bad = || Error::Parse(format!("unrecognized tree {desc:?}"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let pair = |s: &str| -> Result<(usize, usize)> {
        let (a, b) = s.split_once('x').ok_or_else(bad)?;
        Ok((num(a)?, num(b)?))
    };
    let tree = if let Some(rest) = desc.strip_prefix("path:") {
        path(num(rest)?)?
    } else if let Some(rest) = desc.strip_prefix("star:") {
        star(num(rest)?)?
    } else if let Some(rest) = desc.strip_prefix("octopus:") {
        let (m, d) = pair(rest)?;
        octopus(m, d)?
    } else if let Some(rest) = desc.strip_prefix("spider:") {
        let (k, l) = pair(rest)?;
        spider(k, l)?
    } else {
        let text = std::fs::read_to_string(desc)?;
        let json: TreeJson = serde_json::from_str(&text)?;
        return RootedTree::from_json(&json, cap);
    };
    if tree.n() > cap {
        return Err(Error::TooLarge { n: tree.n(), cap });
    }
    Ok(tree)
}

/// Parses `"0,2,3"` or `"{0,2,3}"` into a vertex set.
pub fn parse_vertex_set(s: &str, n: usize) -> Result<VertexSet> {
    let body = s.trim().trim_start_matches(['{', '[']).trim_end_matches(['}', ']']);
    let mut set = VertexSet::EMPTY;
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let v: usize = part
            .parse()
            .map_err(|_| Error::Parse(format!("bad vertex id {part:?}")))?;
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        set.insert(v);
    }
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(v: &[usize]) -> VertexSet {
        VertexSet::from_iter(v.iter().copied())
    }

    #[test]
    fn builds_small_trees() {
        let t = build_tree(&[(0, 1)], 0).unwrap();
        assert_eq!(t.n(), 2);
        assert_eq!(t.parent(1), Some(0));
        let s = build_tree(&[(0, 1), (0, 2), (0, 3)], 0).unwrap();
        assert_eq!(s.children(0), &[1, 2, 3]);
        assert_eq!(build_tree(&[(0, 1), (1, 0)], 0), Err(Error::CycleDetected));
        assert_eq!(build_tree(&[(0, 1), (1, 2), (2, 0)], 0), Err(Error::CycleDetected));
        assert!(matches!(
            RootedTree::new(4, 0, &[(0, 1), (2, 3)], 24),
            Err(Error::Disconnected(_))
        ));
        assert_eq!(RootedTree::new(2, 5, &[(0, 1)], 24), Err(Error::RootAbsent(5)));
    }

    #[test]
    fn boundaries_of_small_sets() {
        let st = star(3).unwrap();
        let b = st.boundaries(vs(&[0])).unwrap();
        assert_eq!(b.inner, vs(&[0]));
        assert_eq!(b.outer, vs(&[1, 2, 3]));
        let p3 = path(3).unwrap();
        let b = p3.boundaries(vs(&[1])).unwrap();
        assert_eq!((b.inner, b.outer), (vs(&[1]), vs(&[0, 2])));
        let p4 = path(4).unwrap();
        let b = p4.boundaries(vs(&[1, 2])).unwrap();
        assert_eq!((b.inner, b.outer), (vs(&[1, 2]), vs(&[0, 3])));
        assert_eq!(b.outer_of(vs(&[1])), vs(&[0]));
        assert_eq!(b.full, vs(&[0, 1, 2, 3]));
        assert_eq!(p4.boundaries(VertexSet::EMPTY).unwrap_err(), Error::EmptySet);
    }

    #[test]
    fn connectivity() {
        let p3 = path(3).unwrap();
        assert!(!p3.is_connected(vs(&[0, 2])).unwrap());
        assert!(p3.is_connected(vs(&[0, 1])).unwrap());
        assert!(p3.is_connected(vs(&[2])).unwrap());
        assert!(p3.is_connected(VertexSet::EMPTY).is_err());
    }

    #[test]
    fn spanning_subtrees() {
        let p4 = path(4).unwrap();
        let sp = p4.spanning_subtree(vs(&[0, 3])).unwrap();
        assert_eq!(sp.vertices, vs(&[0, 1, 2, 3]));
        let st = star(3).unwrap();
        let sp = st.spanning_subtree(vs(&[1, 2])).unwrap();
        assert_eq!(sp.vertices, vs(&[0, 1, 2]));
        assert_eq!(sp.tree.edge_count(), 2);
    }

    /// An 8-vertex analog of the closure picture: a spine 0-1-2-3 with
    /// pendant vertices 4 (at 1), 5 (at 2), 6 (at 3) and 7 (at 6).
    #[test]
    fn closure_fixture() {
        let t = build_tree(&[(0, 1), (1, 2), (2, 3), (1, 4), (2, 5), (3, 6), (6, 7)], 0).unwrap();
        let s = vs(&[1, 2, 3]);
        let sp = t.spanning_subtree(s).unwrap();
        // 2 is the only inner-boundary vertex of degree 2 in the span.
        assert_eq!(sp.r_set, vs(&[2]));
        assert_eq!(sp.closure, vs(&[1, 2, 3, 5]));
        let closed = t.spanning_subtree(sp.closure).unwrap();
        assert!(closed.r_set.is_empty());
    }

    #[test]
    fn subdivision() {
        let (t, v0) = path(2).unwrap().subdivide(3).unwrap();
        assert_eq!(t.n(), 4);
        assert_eq!(v0, vs(&[0, 1]));
        assert_eq!(t.leaves(), vs(&[0, 1]));
        let (t, v0) = star(3).unwrap().subdivide(2).unwrap();
        assert_eq!(t.n(), 7);
        assert_eq!(v0, vs(&[0, 1, 2, 3]));
        assert_eq!(t.degree(0), 3);
        let p = path(5).unwrap();
        let (same, all) = p.subdivide(1).unwrap();
        assert_eq!(same, p);
        assert_eq!(all, p.vertices());
        assert!(p.subdivide(0).is_err());
    }

    #[test]
    fn generators() {
        let o = octopus(3, 2).unwrap();
        assert_eq!(o.n(), 7);
        assert_eq!(o.degree(0), 3);
        assert_eq!(spider(4, 1).unwrap(), star(4).unwrap());
        let p1 = path(1).unwrap();
        assert_eq!((p1.n(), p1.edge_count()), (1, 0));
        assert!(octopus(2, 2).is_err());
        assert!(path(0).is_err());
        assert_eq!(parse_tree("spider:4x2", 24).unwrap(), spider(4, 2).unwrap());
        assert_eq!(parse_tree("star:4", 24).unwrap().n(), 5);
        assert!(parse_tree("path:30", 24).is_err());
    }

    #[test]
    fn connected_subsets_match_brute_force() {
        let t = build_tree(&[(0, 1), (1, 2), (1, 3), (3, 4), (3, 5), (0, 6)], 0).unwrap();
        let fast = t.connected_subsets();
        let mut slow: Vec<VertexSet> = (1..1u64 << t.n())
            .map(VertexSet)
            .filter(|&s| t.connected_unchecked(s))
            .collect();
        slow.sort_by_key(|s| (s.len(), s.0));
        assert_eq!(fast, slow);
    }

    #[test]
    fn subset_iteration() {
        let s = vs(&[1, 3, 4]);
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|x| x.is_subset(s)));
    }
}
