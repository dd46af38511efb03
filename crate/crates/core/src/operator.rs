//! Laplacian and Schrödinger operators on a weighted tree, together with the
//! discrete derivative `∂u(x, y) = c(x, y)^{1/2} (u(x) - u(y))` and its
//! adjoint `∂*g(x) = Σ_{y~x} c(x, y)^{1/2} g(x, y)`.

use std::sync::Arc;

use thiserror::Error;

use crate::matrix::DenseMatrix;
use crate::tree::{Potential, VertexId, WeightedTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperatorError {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

fn check_len(expected: usize, got: usize) -> Result<(), OperatorError> {
    if expected == got {
        Ok(())
    } else {
        Err(OperatorError::DimensionMismatch { expected, got })
    }
}

/// Dense matrix of `A = L + r` on the tree it was assembled from.
///
/// Off-diagonal entries are `-c(x, y)` for adjacent vertices and zero
/// otherwise; the diagonal is `Σ_{y~x} c(x, y) + r(x)`. Both triangles are
/// written from the same value, so the matrix is bitwise symmetric.
#[derive(Debug, Clone)]
pub struct SchrodingerOperator {
    matrix: DenseMatrix,
    tree: Arc<WeightedTree>,
    potential: Potential,
}

pub fn assemble(
    tree: impl Into<Arc<WeightedTree>>,
    potential: &Potential,
) -> Result<SchrodingerOperator, OperatorError> {
    let tree = tree.into();
    let n = tree.vertex_count();
    check_len(n, potential.len())?;

    let mut matrix = DenseMatrix::zeros(n, n);
    for e in tree.edges() {
        let (x, y) = (e.parent().index(), e.child().index());
        matrix[(x, y)] = -e.weight();
        matrix[(y, x)] = -e.weight();
    }
    for x in tree.vertices() {
        // Ascending neighbour order; `apply` sums the off-diagonal row in the
        // same order so constants are annihilated exactly.
        let degree: f64 = tree.neighbours(x).iter().map(|nb| tree.edge(nb.edge).weight()).sum();
        matrix[(x.index(), x.index())] = degree + potential.values()[x.index()];
    }
    Ok(SchrodingerOperator {
        matrix,
        tree,
        potential: potential.clone(),
    })
}

impl SchrodingerOperator {
    #[inline]
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    #[inline]
    pub fn tree(&self) -> &Arc<WeightedTree> {
        &self.tree
    }

    #[inline]
    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.frobenius_norm()
    }

    /// `(A f)(x)`. The off-diagonal part of each row is summed before the
    /// diagonal term is added.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>, OperatorError> {
        let n = self.dim();
        check_len(n, f.len())?;
        Ok((0..n)
            .map(|x| {
                let row = self.matrix.row(x);
                let off: f64 = row
                    .iter()
                    .zip(f)
                    .enumerate()
                    .filter(|&(j, _)| j != x)
                    .map(|(_, (a, b))| a * b)
                    .sum();
                off + row[x] * f[x]
            })
            .collect())
    }
}

/// Antisymmetric function on oriented edges, stored once per edge in the
/// tree's parent → child orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFunction {
    values: Vec<f64>,
}

impl EdgeFunction {
    pub fn zeros(tree: &WeightedTree) -> Self {
        EdgeFunction {
            values: vec![0.0; tree.edges().len()],
        }
    }

    /// Values on the parent → child orientation, indexed like
    /// [`WeightedTree::edges`].
    pub fn from_parent_child(tree: &WeightedTree, values: Vec<f64>) -> Result<Self, OperatorError> {
        check_len(tree.edges().len(), values.len())?;
        Ok(EdgeFunction { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `f(x, y)`, negated when `(x, y)` runs against the stored orientation.
    /// `None` if `x` and `y` are not adjacent.
    pub fn get(&self, tree: &WeightedTree, x: VertexId, y: VertexId) -> Option<f64> {
        let e = tree.edge_between(x, y)?;
        let v = self.values[e];
        Some(if tree.edge(e).parent() == x { v } else { -v })
    }

    /// Sets `f(x, y)` (and thereby `f(y, x) = -f(x, y)`).
    pub fn set(&mut self, tree: &WeightedTree, x: VertexId, y: VertexId, value: f64) -> Option<()> {
        let e = tree.edge_between(x, y)?;
        self.values[e] = if tree.edge(e).parent() == x { value } else { -value };
        Some(())
    }
}

pub fn derivative(tree: &WeightedTree, u: &[f64]) -> Result<EdgeFunction, OperatorError> {
    check_len(tree.vertex_count(), u.len())?;
    let values = tree
        .edges()
        .iter()
        .map(|e| e.sqrt_weight() * (u[e.parent().index()] - u[e.child().index()]))
        .collect();
    Ok(EdgeFunction { values })
}

pub fn adjoint(tree: &WeightedTree, g: &EdgeFunction) -> Result<Vec<f64>, OperatorError> {
    check_len(tree.edges().len(), g.values.len())?;
    let mut out = vec![0.0; tree.vertex_count()];
    for (e, &value) in tree.edges().iter().zip(&g.values) {
        let s = e.sqrt_weight() * value;
        out[e.parent().index()] += s;
        out[e.child().index()] -= s;
    }
    Ok(out)
}

/// `⟨u, v⟩_V = Σ_x u(x) v(x)`.
pub fn inner_vertex(u: &[f64], v: &[f64]) -> f64 {
    crate::matrix::dot(u, v)
}

/// `⟨f, g⟩_E = Σ_{(x,y) ∈ E} f(x, y) g(x, y)`, one term per undirected edge.
pub fn inner_edge(f: &EdgeFunction, g: &EdgeFunction) -> f64 {
    crate::matrix::dot(&f.values, &g.values)
}

/// `½ Σ_x Σ_{y~x} f(x, y) g(x, y)`; equals [`inner_edge`] by antisymmetry.
pub fn inner_edge_double_sum(tree: &WeightedTree, f: &EdgeFunction, g: &EdgeFunction) -> f64 {
    let mut total = 0.0;
    for x in tree.vertices() {
        for nb in tree.neighbours(x) {
            let fv = f.get(tree, x, nb.vertex).expect("adjacent");
            let gv = g.get(tree, x, nb.vertex).expect("adjacent");
            total += fv * gv;
        }
    }
    0.5 * total
}
