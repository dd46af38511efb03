//! Zero vertices of an eigenvector: since `Σ_{y~x} c(x, y) u(y) = 0` at a
//! zero vertex `x`, either all neighbours vanish or both strict signs occur
//! among them.

use serde::Serialize;

use crate::matrix::norm2;
use crate::nodal::{classify, Sign, VertexClass};
use crate::operator::SchrodingerOperator;
use crate::tree::VertexId;

use super::{Verdict, VerifyError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroVertex {
    pub vertex: VertexId,
    pub all_neighbours_zero: bool,
    pub positive_neighbour: bool,
    pub negative_neighbour: bool,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomyReport {
    pub lambda: f64,
    /// `‖Au - λu‖₂`, for context; the verdict only looks at signs.
    pub eigen_residual: f64,
    pub zero_vertices: Vec<ZeroVertex>,
    /// Zero leaves whose single neighbour carries a strict sign.
    pub leaf_violations: Vec<VertexId>,
    pub verdict: Verdict,
}

pub fn zero_dichotomy_check(
    op: &SchrodingerOperator,
    u: &[f64],
    lambda: f64,
    eps_z: f64,
) -> Result<DichotomyReport, VerifyError> {
    let tree = op.tree();
    let au = op.apply(u)?;
    let residual: Vec<f64> = au.iter().zip(u).map(|(a, x)| a - lambda * x).collect();
    let (_, classes) = classify(u, eps_z);

    let mut zero_vertices = Vec::new();
    let mut leaf_violations = Vec::new();
    for x in tree.vertices() {
        if classes[x.index()] != VertexClass::Zero {
            continue;
        }
        let mut pos = false;
        let mut neg = false;
        for nb in tree.neighbours(x) {
            match classes[nb.vertex.index()] {
                VertexClass::Strict(Sign::Positive) => pos = true,
                VertexClass::Strict(Sign::Negative) => neg = true,
                VertexClass::Zero => {}
            }
        }
        let all_zero = !pos && !neg;
        if tree.is_leaf(x) && !all_zero {
            leaf_violations.push(x);
        }
        zero_vertices.push(ZeroVertex {
            vertex: x,
            all_neighbours_zero: all_zero,
            positive_neighbour: pos,
            negative_neighbour: neg,
            ok: all_zero || (pos && neg),
        });
    }
    let verdict = Verdict::from_bool(zero_vertices.iter().all(|z| z.ok) && leaf_violations.is_empty());
    Ok(DichotomyReport {
        lambda,
        eigen_residual: norm2(&residual),
        zero_vertices,
        leaf_violations,
        verdict,
    })
}
