//! Zeros and nodal domains of vertex functions extended linearly along edges.
//!
//! A vertex function `u` is classified against the threshold
//! `θ = ε_z · ‖u‖_∞`: vertices with `|u| <= θ` are zero vertices, the rest
//! carry a strict sign. Strong sign graphs are the connected components of
//! the strictly positive and strictly negative vertex sets; zero graphs are
//! the components of the zero set. Each zero graph counts as one zero of the
//! extension `ũ`, and every edge whose endpoints have strictly opposite
//! signs carries exactly one interior zero.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Serialize, Serializer};

use crate::matrix::norm_inf;
use crate::operator::OperatorError;
use crate::tree::{VertexId, WeightedTree};

/// Default relative zero threshold.
pub const DEFAULT_EPS_Z: f64 = 1e-9;
/// Vertices with `θ < |u| <= FRAGILE_FACTOR · θ` are reported as fragile.
pub const FRAGILE_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

/// Sign class of a vertex after thresholding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexClass {
    Strict(Sign),
    Zero,
}

/// Absolute threshold `ε_z · ‖u‖_∞` and the class of every vertex.
pub fn classify(u: &[f64], eps_z: f64) -> (f64, Vec<VertexClass>) {
    let threshold = eps_z * norm_inf(u);
    let classes = u
        .iter()
        .map(|&v| {
            if v > threshold {
                VertexClass::Strict(Sign::Positive)
            } else if v < -threshold {
                VertexClass::Strict(Sign::Negative)
            } else {
                VertexClass::Zero
            }
        })
        .collect();
    (threshold, classes)
}

/// The piecewise-affine extension `ũ` of a vertex function.
#[derive(Debug, Clone)]
pub struct LinearExtension<'a> {
    tree: &'a WeightedTree,
    values: Vec<f64>,
}

pub fn extend<'a>(tree: &'a WeightedTree, u: &[f64]) -> Result<LinearExtension<'a>, OperatorError> {
    if u.len() != tree.vertex_count() {
        return Err(OperatorError::DimensionMismatch {
            expected: tree.vertex_count(),
            got: u.len(),
        });
    }
    Ok(LinearExtension {
        tree,
        values: u.to_vec(),
    })
}

impl<'a> LinearExtension<'a> {
    pub fn tree(&self) -> &'a WeightedTree {
        self.tree
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `ũ_{xy}(t) = (u(y) - u(x)) / l(x, y) · t + u(x)` for `t ∈ [0, l(x, y)]`.
    /// `None` if `x` and `y` are not adjacent.
    pub fn eval(&self, x: VertexId, y: VertexId, t: f64) -> Option<f64> {
        let l = self.tree.length(x, y)?;
        let (ux, uy) = (self.values[x.index()], self.values[y.index()]);
        Some((uy - ux) / l * t + ux)
    }

    /// `∇ũ` along the edge oriented from `x` to `y`, i.e. `-c(x, y)(u(x) - u(y))`.
    pub fn slope(&self, x: VertexId, y: VertexId) -> Option<f64> {
        let l = self.tree.length(x, y)?;
        Some((self.values[y.index()] - self.values[x.index()]) / l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    /// Strictly inside the edge.
    Interior,
    /// On the far endpoint `y` of the oriented edge `(x, y)`, i.e. `t = l(x, y)`.
    AtChildVertex,
}

/// A zero of `ũ` on the oriented edge `(x, y)` at distance `t ∈ (0, l]` from `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeZero {
    pub edge: (VertexId, VertexId),
    pub t: f64,
    pub kind: ZeroKind,
}

/// Zeros of `ũ` on edges, with edges oriented parent → child.
///
/// Vertices within `ε_z · ‖u‖_∞` of zero are treated as exact zeros. An edge
/// with strictly opposite signs yields one interior zero at
/// `t = l·u(x)/(u(x) - u(y))`; an edge with `u(x) != 0 = u(y)` yields a zero
/// at `t = l` on the child; an edge starting at a zero vertex yields nothing,
/// the zero there belongs to the vertex.
pub fn locate_zeros(ext: &LinearExtension<'_>, eps_z: f64) -> Vec<EdgeZero> {
    let (_, classes) = classify(&ext.values, eps_z);
    let u = &ext.values;
    ext.tree
        .edges()
        .iter()
        .filter_map(|e| {
            let (x, y) = (e.parent(), e.child());
            match (classes[x.index()], classes[y.index()]) {
                (VertexClass::Strict(sx), VertexClass::Strict(sy)) if sx != sy => {
                    let (ux, uy) = (u[x.index()], u[y.index()]);
                    Some(EdgeZero {
                        edge: (x, y),
                        t: e.length() * ux / (ux - uy),
                        kind: ZeroKind::Interior,
                    })
                }
                (VertexClass::Strict(_), VertexClass::Zero) => Some(EdgeZero {
                    edge: (x, y),
                    t: e.length(),
                    kind: ZeroKind::AtChildVertex,
                }),
                _ => None,
            }
        })
        .collect()
}

/// A strong sign graph: a maximal subtree on which `u` has one strict sign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignGraph {
    /// Ascending.
    pub vertices: Vec<VertexId>,
    pub sign: Sign,
}

/// A maximal connected set of zero vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ZeroGraph {
    pub vertices: Vec<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    /// A zero vertex with a nonzero neighbour but without neighbours of both
    /// strict signs. Impossible for an exact eigenvector.
    DichotomyViolation { vertex: VertexId },
    /// A nodal domain boundary sits on a leaf.
    LeafBoundary { vertex: VertexId },
    /// `|u|` lies in `(θ, FRAGILE_FACTOR·θ]`: classified as signed, but close
    /// enough to the threshold that the classification is not robust.
    Fragile { vertex: VertexId, relative: f64 },
}

/// Which sign graph or zero graph a vertex belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Sign(usize),
    Zero(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignGraphPartition {
    pub sign_graphs: Vec<SignGraph>,
    pub zero_graphs: Vec<ZeroGraph>,
    pub membership: Vec<Membership>,
    pub diagnostics: Vec<Diagnostic>,
    pub threshold: f64,
}

/// Strong sign graphs and zero graphs of `u`, found by breadth-first search
/// over equal-class neighbours. Components are listed in order of their
/// smallest vertex.
pub fn sign_graphs(tree: &WeightedTree, u: &[f64], eps_z: f64) -> Result<SignGraphPartition, OperatorError> {
    let n = tree.vertex_count();
    if u.len() != n {
        return Err(OperatorError::DimensionMismatch {
            expected: n,
            got: u.len(),
        });
    }
    let (threshold, classes) = classify(u, eps_z);

    let mut membership: Vec<Option<Membership>> = vec![None; n];
    let mut sign_graphs = Vec::new();
    let mut zero_graphs = Vec::new();
    for start in 0..n {
        if membership[start].is_some() {
            continue;
        }
        let class = classes[start];
        let tag = match class {
            VertexClass::Strict(_) => Membership::Sign(sign_graphs.len()),
            VertexClass::Zero => Membership::Zero(zero_graphs.len()),
        };
        let mut vertices = Vec::new();
        let mut queue = VecDeque::from([start]);
        membership[start] = Some(tag);
        while let Some(x) = queue.pop_front() {
            vertices.push(VertexId(x));
            for nb in tree.neighbours(VertexId(x)) {
                let y = nb.vertex.index();
                if membership[y].is_none() && classes[y] == class {
                    membership[y] = Some(tag);
                    queue.push_back(y);
                }
            }
        }
        vertices.sort();
        match class {
            VertexClass::Strict(sign) => sign_graphs.push(SignGraph { vertices, sign }),
            VertexClass::Zero => zero_graphs.push(ZeroGraph { vertices }),
        }
    }

    let mut diagnostics = Vec::new();
    for x in tree.vertices() {
        match classes[x.index()] {
            VertexClass::Zero => {
                let mut pos = false;
                let mut neg = false;
                for nb in tree.neighbours(x) {
                    match classes[nb.vertex.index()] {
                        VertexClass::Strict(Sign::Positive) => pos = true,
                        VertexClass::Strict(Sign::Negative) => neg = true,
                        VertexClass::Zero => {}
                    }
                }
                if (pos || neg) && !(pos && neg) {
                    diagnostics.push(Diagnostic::DichotomyViolation { vertex: x });
                }
            }
            VertexClass::Strict(_) => {
                let a = u[x.index()].abs();
                if threshold > 0.0 && a <= FRAGILE_FACTOR * threshold {
                    diagnostics.push(Diagnostic::Fragile {
                        vertex: x,
                        relative: a / norm_inf(u),
                    });
                }
            }
        }
    }

    Ok(SignGraphPartition {
        sign_graphs,
        zero_graphs,
        membership: membership
            .into_iter()
            .map(|m| m.expect("every vertex visited"))
            .collect(),
        diagnostics,
        threshold,
    })
}

/// Sub-interval `[from, to]` of the oriented edge `(x, y)` measured from `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialEdge {
    pub edge: (VertexId, VertexId),
    pub from: f64,
    pub to: f64,
}

/// The nodal domain `G̃` determined by a strong sign graph `G`.
///
/// The domain consists of the vertices of `G`, every edge with both ends in
/// `G`, and for each boundary edge `(x, y)` with `x ∈ G`, `y ∈ δ(G)` the
/// piece `[0, t(x, y))` of that edge. `boundary` lists the points `t(x, y)`,
/// each edge oriented from inside the domain outward.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodalDomain {
    pub sign_graph: SignGraph,
    pub boundary: Vec<EdgeZero>,
    pub contains_partial_edges: Vec<PartialEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodalDecomposition {
    /// One-based eigenvalue index, when `u` is an eigenvector.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigen_index: Option<usize>,
    pub eps_z: f64,
    pub threshold: f64,
    pub sign_graphs: Vec<SignGraph>,
    pub zero_graphs: Vec<ZeroGraph>,
    pub edge_zeros: Vec<EdgeZero>,
    pub domains: Vec<NodalDomain>,
    pub zero_count: usize,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(skip)]
    pub membership: Vec<Membership>,
}

impl NodalDecomposition {
    pub fn with_eigen_index(mut self, n: usize) -> Self {
        self.eigen_index = Some(n);
        self
    }

    /// Zeros strictly inside edges.
    pub fn interior_zeros(&self) -> impl Iterator<Item = &EdgeZero> {
        self.edge_zeros.iter().filter(|z| z.kind == ZeroKind::Interior)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decompositions always serialize")
    }

    /// Graphviz rendering: vertices filled by sign, edges carrying an
    /// interior zero drawn dashed and labelled with its position.
    pub fn to_dot(&self, tree: &WeightedTree) -> String {
        let mut out = String::from("graph nodal {\n  node [style=filled];\n");
        for x in tree.vertices() {
            let colour = match self.membership[x.index()] {
                Membership::Sign(i) => match self.sign_graphs[i].sign {
                    Sign::Positive => "\"#f4a582\"",
                    Sign::Negative => "\"#92c5de\"",
                },
                Membership::Zero(_) => "white",
            };
            let _ = writeln!(out, "  {x} [fillcolor={colour}];");
        }
        for e in tree.edges() {
            let zero = self.interior_zeros().find(|z| z.edge == (e.parent(), e.child()));
            match zero {
                Some(z) => {
                    let _ = writeln!(
                        out,
                        "  {} -- {} [label=\"c={:?} zero t={:?}\", style=dashed];",
                        e.parent(),
                        e.child(),
                        e.weight(),
                        z.t
                    );
                }
                None => {
                    let _ = writeln!(out, "  {} -- {} [label=\"c={:?}\"];", e.parent(), e.child(), e.weight());
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Full nodal decomposition of `ũ`: one domain per strong sign graph, with
/// boundary points `B(G̃) = { t(x, y) : x ∈ G, y ∈ δ(G) }`.
///
/// `zero_count` is the number of interior edge zeros plus the number of zero
/// graphs, so a zero sitting on a vertex is counted once however many
/// domains it bounds.
pub fn nodal_domains(tree: &WeightedTree, u: &[f64], eps_z: f64) -> Result<NodalDecomposition, OperatorError> {
    let partition = sign_graphs(tree, u, eps_z)?;
    let ext = extend(tree, u)?;
    let edge_zeros = locate_zeros(&ext, eps_z);
    let mut diagnostics = partition.diagnostics;

    let mut domains = Vec::with_capacity(partition.sign_graphs.len());
    for (gi, g) in partition.sign_graphs.iter().enumerate() {
        let mut boundary = Vec::new();
        let mut partial = Vec::new();
        for &x in &g.vertices {
            for nb in tree.neighbours(x) {
                let y = nb.vertex;
                if partition.membership[y.index()] == Membership::Sign(gi) {
                    continue;
                }
                let l = tree.edge(nb.edge).length();
                let zero = match partition.membership[y.index()] {
                    Membership::Zero(_) => {
                        if tree.is_leaf(y) {
                            diagnostics.push(Diagnostic::LeafBoundary { vertex: y });
                        }
                        EdgeZero {
                            edge: (x, y),
                            t: l,
                            kind: ZeroKind::AtChildVertex,
                        }
                    }
                    Membership::Sign(_) => {
                        let (ux, uy) = (u[x.index()], u[y.index()]);
                        EdgeZero {
                            edge: (x, y),
                            t: l * ux / (ux - uy),
                            kind: ZeroKind::Interior,
                        }
                    }
                };
                partial.push(PartialEdge {
                    edge: (x, y),
                    from: 0.0,
                    to: zero.t,
                });
                boundary.push(zero);
            }
        }
        domains.push(NodalDomain {
            sign_graph: g.clone(),
            boundary,
            contains_partial_edges: partial,
        });
    }

    let interior = edge_zeros.iter().filter(|z| z.kind == ZeroKind::Interior).count();
    Ok(NodalDecomposition {
        eigen_index: None,
        eps_z,
        threshold: partition.threshold,
        zero_count: interior + partition.zero_graphs.len(),
        sign_graphs: partition.sign_graphs,
        zero_graphs: partition.zero_graphs,
        edge_zeros,
        domains,
        diagnostics,
        membership: partition.membership,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, TreeKind, WeightLaw};

    const STAR_U2: [f64; 5] = [0.0, -1.0, 0.0, 1.0, 1.0];

    fn star() -> WeightedTree {
        generate(TreeKind::Star, 5, WeightLaw::Unit, 0).unwrap()
    }

    fn single_edge(l: f64) -> WeightedTree {
        WeightedTree::from_edges(2, 0, [(0, 1, 1.0 / l)]).unwrap()
    }

    #[test]
    fn extension_endpoints_and_slope() {
        let t = single_edge(2.0);
        let ext = extend(&t, &[1.0, -1.0]).unwrap();
        let (x, y) = (VertexId(0), VertexId(1));
        assert_eq!(ext.eval(x, y, 0.0), Some(1.0));
        assert_eq!(ext.eval(x, y, 2.0), Some(-1.0));
        assert_eq!(ext.slope(x, y), Some(-1.0));
        assert_eq!(ext.slope(y, x), Some(1.0));
        // ∇ũ = -c(u(x) - u(y))
        assert_eq!(ext.slope(x, y), Some(-0.5 * (1.0 - -1.0)));
        assert!(extend(&t, &[1.0]).is_err());
    }

    #[test]
    fn midpoint_zero() {
        let t = single_edge(2.0);
        let zeros = locate_zeros(&extend(&t, &[1.0, -1.0]).unwrap(), DEFAULT_EPS_Z);
        assert_eq!(
            zeros,
            vec![EdgeZero {
                edge: (VertexId(0), VertexId(1)),
                t: 1.0,
                kind: ZeroKind::Interior
            }]
        );
    }

    #[test]
    fn constant_has_no_zero() {
        let t = single_edge(2.0);
        assert!(locate_zeros(&extend(&t, &[3.0, 3.0]).unwrap(), DEFAULT_EPS_Z).is_empty());
    }

    #[test]
    fn zero_at_child() {
        let t = single_edge(1.0);
        let zeros = locate_zeros(&extend(&t, &[1.0, 0.0]).unwrap(), DEFAULT_EPS_Z);
        assert_eq!(zeros.len(), 1);
        assert_eq!(zeros[0].kind, ZeroKind::AtChildVertex);
        assert_eq!(zeros[0].t, 1.0);
        // Zero at the parent is attributed to the vertex, not the edge.
        assert!(locate_zeros(&extend(&t, &[0.0, 1.0]).unwrap(), DEFAULT_EPS_Z).is_empty());
    }

    #[test]
    fn direct_formula() {
        let t = single_edge(3.0);
        let zeros = locate_zeros(&extend(&t, &[2.0, -1.0]).unwrap(), DEFAULT_EPS_Z);
        assert_eq!(zeros[0].t, 2.0);
    }

    #[test]
    fn star_vector_zeros_sit_on_vertices() {
        let t = star();
        let zeros = locate_zeros(&extend(&t, &STAR_U2).unwrap(), DEFAULT_EPS_Z);
        assert!(zeros.iter().all(|z| z.kind == ZeroKind::AtChildVertex));
        // The root edge 1 -> 0 reaches the zero centre; 0 -> 2 starts at a zero.
        assert_eq!(zeros.len(), 1);
        assert_eq!(zeros[0].edge, (VertexId(1), VertexId(0)));

        let d = nodal_domains(&t, &STAR_U2, DEFAULT_EPS_Z).unwrap();
        assert_eq!(
            d.zero_graphs,
            vec![ZeroGraph {
                vertices: vec![VertexId(0), VertexId(2)]
            }]
        );
        assert_eq!(d.interior_zeros().count(), 0);
    }

    #[test]
    fn star_vector_three_sign_graphs() {
        let p = sign_graphs(&star(), &STAR_U2, DEFAULT_EPS_Z).unwrap();
        assert_eq!(p.sign_graphs.len(), 3);
        assert_eq!(
            p.sign_graphs[0],
            SignGraph {
                vertices: vec![VertexId(1)],
                sign: Sign::Negative
            }
        );
        // Centre sees both signs; the zero leaf sees only the zero centre.
        assert!(p.diagnostics.is_empty(), "{:?}", p.diagnostics);
    }

    #[test]
    fn star_vector_domains_share_the_centre() {
        let d = nodal_domains(&star(), &STAR_U2, DEFAULT_EPS_Z).unwrap();
        assert_eq!(d.domains.len(), 3);
        for dom in &d.domains {
            assert_eq!(dom.boundary.len(), 1);
            assert_eq!(dom.boundary[0].edge.1, VertexId(0));
            assert_eq!(dom.boundary[0].kind, ZeroKind::AtChildVertex);
            assert_eq!(dom.boundary[0].t, 1.0);
        }
        assert_eq!(d.zero_count, 1);
    }

    #[test]
    fn perron_like_vector_single_domain() {
        let u = [0.3, 0.1, 0.7, 0.2, 0.9];
        let d = nodal_domains(&star(), &u, DEFAULT_EPS_Z).unwrap();
        assert_eq!(d.sign_graphs.len(), 1);
        assert_eq!(d.domains.len(), 1);
        assert!(d.domains[0].boundary.is_empty());
        assert_eq!(d.zero_count, 0);
    }

    #[test]
    fn dichotomy_violation_is_reported() {
        // Zero centre whose neighbours are positive or zero only.
        let u = [0.0, 1.0, 0.0, 2.0, 1.0];
        let p = sign_graphs(&star(), &u, DEFAULT_EPS_Z).unwrap();
        assert!(p
            .diagnostics
            .contains(&Diagnostic::DichotomyViolation { vertex: VertexId(0) }));
    }

    #[test]
    fn leaf_boundary_is_reported() {
        let t = WeightedTree::from_edges(3, 0, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let d = nodal_domains(&t, &[1.0, 1.0, 0.0], DEFAULT_EPS_Z).unwrap();
        assert!(d
            .diagnostics
            .contains(&Diagnostic::LeafBoundary { vertex: VertexId(2) }));
    }

    #[test]
    fn fragile_vertices_are_flagged() {
        let t = single_edge(1.0);
        let d = nodal_domains(&t, &[1.0, -5e-7], DEFAULT_EPS_Z).unwrap();
        assert!(matches!(
            d.diagnostics[0],
            Diagnostic::Fragile {
                vertex: VertexId(1),
                ..
            }
        ));
        // Below the threshold the same vertex is an exact zero.
        let d = nodal_domains(&t, &[1.0, -5e-10], DEFAULT_EPS_Z).unwrap();
        assert_eq!(d.zero_graphs.len(), 1);
    }

    #[test]
    fn json_export_shape() {
        let d = nodal_domains(&single_edge(2.0), &[1.0, -1.0], DEFAULT_EPS_Z).unwrap();
        let v: serde_json::Value = serde_json::from_str(&d.to_json()).unwrap();
        assert_eq!(v["sign_graphs"][0]["vertices"], serde_json::json!([0]));
        assert_eq!(v["sign_graphs"][1]["sign"], serde_json::json!(-1));
        assert_eq!(v["edge_zeros"][0]["edge"], serde_json::json!([0, 1]));
        assert_eq!(v["edge_zeros"][0]["t"], serde_json::json!(1.0));
        assert!(d.to_dot(&single_edge(2.0)).contains("style=dashed"));
    }
}
