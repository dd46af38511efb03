//! Weighted finite trees.
//!
//! A [`WeightedTree`] is built once through [`validate_tree`] and never
//! mutated afterwards. Every undirected edge is stored a single time,
//! oriented parent → child away from a degree-one root, and carries its
//! weight `c`, its length `l = 1/c` and the cached square root `c^{1/2}`
//! used by the discrete derivative.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a vertex, in `0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeError {
    #[error("a tree needs at least one vertex")]
    Empty,
    #[error("vertex {vertex} is outside 0..{n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("the edge set does not connect all {n} vertices")]
    NotConnected { n: usize },
    #[error("edge ({x}, {y}) closes a cycle")]
    HasCycle { x: usize, y: usize },
    #[error("edge ({x}, {y}) has weight {weight}, weights must be finite and > 0")]
    NonPositiveWeight { x: usize, y: usize, weight: f64 },
    #[error("root {root} has degree {degree}, the root must have exactly one neighbour")]
    RootDegreeNotOne { root: usize, degree: usize },
    #[error("edge ({x}, {y}) is listed more than once")]
    DuplicateEdge { x: usize, y: usize },
    #[error("potential has {got} values but the tree has {expected} vertices")]
    PotentialLength { expected: usize, got: usize },
    #[error("potential value at vertex {vertex} is not finite")]
    NonFinitePotential { vertex: usize },
    #[error("tree size {0} is too small, need n >= 2")]
    BadSize(usize),
    #[error("invalid range uniform({a}, {b})")]
    BadWeightRange { a: f64, b: f64 },
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

/// Unvalidated description of a tree, as read from a file or built by hand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTree {
    pub n: usize,
    pub root: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

/// An undirected edge oriented away from the root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    parent: VertexId,
    child: VertexId,
    weight: f64,
    length: f64,
    sqrt_weight: f64,
}

impl Edge {
    fn new(parent: VertexId, child: VertexId, weight: f64) -> Self {
        Edge {
            parent,
            child,
            weight,
            length: 1.0 / weight,
            sqrt_weight: weight.sqrt(),
        }
    }

    #[inline]
    pub fn parent(&self) -> VertexId {
        self.parent
    }

    #[inline]
    pub fn child(&self) -> VertexId {
        self.child
    }

    /// Conductance `c(x, y) > 0`.
    #[inline]
    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Metric length `l(x, y) = 1 / c(x, y)`.
    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    #[inline]
    pub fn sqrt_weight(&self) -> f64 {
        self.sqrt_weight
    }

    /// The endpoint that is not `v`. Panics if `v` is not on the edge.
    pub fn other(&self, v: VertexId) -> VertexId {
        if v == self.parent {
            self.child
        } else {
            assert_eq!(v, self.child, "vertex {v} is not an endpoint of this edge");
            self.parent
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbour {
    pub vertex: VertexId,
    /// Index into [`WeightedTree::edges`].
    pub edge: usize,
}

/// A validated weighted tree. Immutable; share freely between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTree {
    n: usize,
    root: VertexId,
    /// Breadth-first discovery order from the root.
    edges: Vec<Edge>,
    /// Sorted by neighbour index.
    adjacency: Vec<Vec<Neighbour>>,
    parent_edge: Vec<Option<usize>>,
}

/// Checks the tree axioms and orients the edges away from the root by a
/// breadth-first traversal that visits neighbours in ascending index order.
///
/// The orientation and edge order only depend on the edge *set*, so two raw
/// descriptions of the same tree validate to equal values.
pub fn validate_tree(raw: &RawTree) -> Result<WeightedTree, TreeError> {
    let n = raw.n;
    if n == 0 {
        return Err(TreeError::Empty);
    }
    if raw.root >= n {
        return Err(TreeError::VertexOutOfRange { vertex: raw.root, n });
    }

    let mut seen = HashSet::with_capacity(raw.edges.len());
    let mut dsu = DisjointSets::new(n);
    for &(x, y, c) in &raw.edges {
        for v in [x, y] {
            if v >= n {
                return Err(TreeError::VertexOutOfRange { vertex: v, n });
            }
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(TreeError::NonPositiveWeight { x, y, weight: c });
        }
        if x == y {
            return Err(TreeError::HasCycle { x, y });
        }
        if !seen.insert((x.min(y), x.max(y))) {
            return Err(TreeError::DuplicateEdge { x, y });
        }
        if !dsu.union(x, y) {
            return Err(TreeError::HasCycle { x, y });
        }
    }
    // Acyclic with N - 1 edges <=> connected.
    if raw.edges.len() != n - 1 {
        return Err(TreeError::NotConnected { n });
    }

    let mut undirected: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(x, y, c) in &raw.edges {
        undirected[x].push((y, c));
        undirected[y].push((x, c));
    }
    for list in &mut undirected {
        list.sort_by_key(|&(v, _)| v);
    }
    let root_degree = undirected[raw.root].len();
    if root_degree != 1 {
        return Err(TreeError::RootDegreeNotOne {
            root: raw.root,
            degree: root_degree,
        });
    }

    let mut edges = Vec::with_capacity(n - 1);
    let mut parent_edge = vec![None; n];
    let mut visited = vec![false; n];
    let mut queue = VecDeque::from([raw.root]);
    visited[raw.root] = true;
    while let Some(x) = queue.pop_front() {
        for &(y, c) in &undirected[x] {
            if !visited[y] {
                visited[y] = true;
                parent_edge[y] = Some(edges.len());
                edges.push(Edge::new(VertexId(x), VertexId(y), c));
                queue.push_back(y);
            }
        }
    }
    debug_assert!(visited.iter().all(|&v| v));

    let mut adjacency: Vec<Vec<Neighbour>> = vec![Vec::new(); n];
    for (i, e) in edges.iter().enumerate() {
        adjacency[e.parent.0].push(Neighbour {
            vertex: e.child,
            edge: i,
        });
        adjacency[e.child.0].push(Neighbour {
            vertex: e.parent,
            edge: i,
        });
    }
    for list in &mut adjacency {
        list.sort_by_key(|nb| nb.vertex);
    }

    Ok(WeightedTree {
        n,
        root: VertexId(raw.root),
        edges,
        adjacency,
        parent_edge,
    })
}

impl WeightedTree {
    /// Shorthand for [`validate_tree`].
    pub fn from_edges(
        n: usize,
        root: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, TreeError> {
        validate_tree(&RawTree {
            n,
            root,
            edges: edges.into_iter().collect(),
        })
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn root(&self) -> VertexId {
        self.root
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    #[inline]
    pub fn neighbours(&self, x: VertexId) -> &[Neighbour] {
        &self.adjacency[x.0]
    }

    #[inline]
    pub fn degree(&self, x: VertexId) -> usize {
        self.adjacency[x.0].len()
    }

    #[inline]
    pub fn is_leaf(&self, x: VertexId) -> bool {
        self.degree(x) == 1
    }

    /// Index of the edge from the parent of `x` to `x`; `None` for the root.
    #[inline]
    pub fn parent_edge(&self, x: VertexId) -> Option<usize> {
        self.parent_edge[x.0]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.n).map(VertexId)
    }

    /// Index of the edge joining `x` and `y`, if they are adjacent.
    pub fn edge_between(&self, x: VertexId, y: VertexId) -> Option<usize> {
        let list = &self.adjacency[x.0];
        list.binary_search_by_key(&y, |nb| nb.vertex).ok().map(|i| list[i].edge)
    }

    /// `c(x, y)`, zero when `x` and `y` are not adjacent.
    pub fn weight(&self, x: VertexId, y: VertexId) -> f64 {
        self.edge_between(x, y).map_or(0.0, |e| self.edges[e].weight)
    }

    /// `l(x, y)` for adjacent vertices.
    pub fn length(&self, x: VertexId, y: VertexId) -> Option<f64> {
        self.edge_between(x, y).map(|e| self.edges[e].length)
    }

    /// Vertices in breadth-first order from the root.
    pub fn bfs_order(&self) -> Vec<VertexId> {
        let mut order = Vec::with_capacity(self.n);
        order.push(self.root);
        order.extend(self.edges.iter().map(|e| e.child));
        order
    }

    /// The oriented edge list, suitable for re-validation.
    pub fn to_raw(&self) -> RawTree {
        RawTree {
            n: self.n,
            root: self.root.0,
            edges: self.edges.iter().map(|e| (e.parent.0, e.child.0, e.weight)).collect(),
        }
    }

    /// The same tree with vertex `v` renamed to `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<WeightedTree, TreeError> {
        assert_eq!(perm.len(), self.n, "permutation length must equal vertex count");
        validate_tree(&RawTree {
            n: self.n,
            root: perm[self.root.0],
            edges: self
                .edges
                .iter()
                .map(|e| (perm[e.parent.0], perm[e.child.0], e.weight))
                .collect(),
        })
    }
}

/// Real-valued potential `r: V -> R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Potential(Vec<f64>);

impl Potential {
    pub fn new(values: Vec<f64>) -> Result<Self, TreeError> {
        if let Some(vertex) = values.iter().position(|r| !r.is_finite()) {
            return Err(TreeError::NonFinitePotential { vertex });
        }
        Ok(Potential(values))
    }

    pub fn zeros(n: usize) -> Self {
        Potential(vec![0.0; n])
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check_against(&self, tree: &WeightedTree) -> Result<(), TreeError> {
        if self.0.len() != tree.vertex_count() {
            return Err(TreeError::PotentialLength {
                expected: tree.vertex_count(),
                got: self.0.len(),
            });
        }
        Ok(())
    }

    pub fn relabeled(&self, perm: &[usize]) -> Potential {
        let mut out = vec![0.0; self.0.len()];
        for (v, &r) in self.0.iter().enumerate() {
            out[perm[v]] = r;
        }
        Potential(out)
    }
}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star5() -> WeightedTree {
        WeightedTree::from_edges(5, 1, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (0, 4, 1.0)]).unwrap()
    }

    #[test]
    fn smallest_tree() {
        let t = WeightedTree::from_edges(2, 0, [(0, 1, 1.0)]).unwrap();
        assert_eq!(t.edges().len(), 1);
        assert_eq!(t.length(VertexId(0), VertexId(1)), Some(1.0));
        assert_eq!(t.edge(0).parent(), VertexId(0));
    }

    #[test]
    fn star_with_leaf_root() {
        let t = star5();
        assert_eq!(t.degree(VertexId(0)), 4);
        assert_eq!(t.root(), VertexId(1));
        // Root edge first, then the rest in BFS order from the centre.
        assert_eq!(t.edge(0).parent(), VertexId(1));
        assert_eq!(t.edge(0).child(), VertexId(0));
        assert!(t.edges()[1..].iter().all(|e| e.parent() == VertexId(0)));
    }

    #[test]
    fn triangle_has_cycle() {
        let err = WeightedTree::from_edges(3, 0, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap_err();
        assert_eq!(err, TreeError::HasCycle { x: 2, y: 0 });
    }

    #[test]
    fn error_paths() {
        assert!(matches!(
            WeightedTree::from_edges(3, 0, [(0, 1, 1.0)]),
            Err(TreeError::NotConnected { n: 3 })
        ));
        assert!(matches!(
            WeightedTree::from_edges(2, 0, [(0, 1, -1.0)]),
            Err(TreeError::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            WeightedTree::from_edges(2, 0, [(0, 1, f64::NAN)]),
            Err(TreeError::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            WeightedTree::from_edges(3, 0, [(0, 1, 1.0), (1, 0, 2.0)]),
            Err(TreeError::DuplicateEdge { x: 1, y: 0 })
        ));
        assert!(matches!(
            WeightedTree::from_edges(3, 1, [(0, 1, 1.0), (1, 2, 1.0)]),
            Err(TreeError::RootDegreeNotOne { root: 1, degree: 2 })
        ));
        assert!(matches!(
            WeightedTree::from_edges(2, 0, [(0, 5, 1.0)]),
            Err(TreeError::VertexOutOfRange { vertex: 5, n: 2 })
        ));
        assert!(matches!(
            WeightedTree::from_edges(1, 0, []),
            Err(TreeError::RootDegreeNotOne { .. })
        ));
        assert_eq!(WeightedTree::from_edges(0, 0, []), Err(TreeError::Empty));
    }

    #[test]
    fn orientation_is_canonical() {
        let a = WeightedTree::from_edges(4, 3, [(0, 1, 2.0), (1, 2, 3.0), (1, 3, 0.5)]).unwrap();
        let b = WeightedTree::from_edges(4, 3, [(3, 1, 0.5), (2, 1, 3.0), (1, 0, 2.0)]).unwrap();
        assert_eq!(a, b);
        for v in a.vertices() {
            assert_eq!(a.parent_edge(v).is_none(), v == a.root());
        }
    }

    #[test]
    fn weight_lookup_symmetric() {
        let t = star5();
        assert_eq!(t.weight(VertexId(0), VertexId(3)), 1.0);
        assert_eq!(t.weight(VertexId(3), VertexId(0)), 1.0);
        assert_eq!(t.weight(VertexId(2), VertexId(3)), 0.0);
    }

    #[test]
    fn potential_checks() {
        assert!(matches!(
            Potential::new(vec![0.0, f64::INFINITY]),
            Err(TreeError::NonFinitePotential { vertex: 1 })
        ));
        let p = Potential::zeros(4);
        assert!(matches!(
            p.check_against(&star5()),
            Err(TreeError::PotentialLength { expected: 5, got: 4 })
        ));
    }
}
