//! Discrete Green's formula on a nodal domain:
//!
//! `Σ_{x∈G} Au(x) v(x) - Σ_{x∈G} u(x) Av(x) = -Σ_{t∈B(G̃)} ∇ũ(t) ṽ(t)`.

use serde::Serialize;

use crate::eigen::Spectrum;
use crate::nodal::{classify, sign_graphs, SignGraph, VertexClass};
use crate::operator::SchrodingerOperator;
use crate::tree::WeightedTree;

use super::{Verdict, VerifyError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenpairForm {
    pub lambda: f64,
    pub mu: f64,
    /// `(λ - μ) Σ_{x∈G} u(x) v(x)`.
    pub value: f64,
    /// `|lhs - value| / max(1, |lhs|, |value|)`.
    pub rel_discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreensCheckReport {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    /// `abs_residual / max(1, |lhs|, |rhs|)`.
    pub rel_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain_id: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenpair: Option<EigenpairForm>,
    pub verdict: Verdict,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

/// Confirms that `g` is a strong sign graph of `u` under the `eps_z`
/// classification: one strict sign throughout, connected, and maximal.
fn check_sign_graph(tree: &WeightedTree, u: &[f64], g: &SignGraph, eps_z: f64) -> Result<(), VerifyError> {
    if g.vertices.is_empty() {
        return Err(VerifyError::NotASignGraph("empty vertex set".into()));
    }
    let (_, classes) = classify(u, eps_z);
    let n = tree.vertex_count();
    let mut inside = vec![false; n];
    for &x in &g.vertices {
        if x.index() >= n {
            return Err(VerifyError::NotASignGraph(format!("vertex {x} out of range")));
        }
        if classes[x.index()] != VertexClass::Strict(g.sign) {
            return Err(VerifyError::NotASignGraph(format!(
                "u({x}) = {} does not have sign {}",
                u[x.index()],
                g.sign.as_i8()
            )));
        }
        inside[x.index()] = true;
    }
    // Connected: a search inside G reaches every member.
    let mut seen = vec![false; n];
    let mut stack = vec![g.vertices[0]];
    seen[g.vertices[0].index()] = true;
    let mut reached = 0;
    while let Some(x) = stack.pop() {
        reached += 1;
        for nb in tree.neighbours(x) {
            let y = nb.vertex;
            if inside[y.index()] && !seen[y.index()] {
                seen[y.index()] = true;
                stack.push(y);
            }
            if !inside[y.index()] && classes[y.index()] == VertexClass::Strict(g.sign) {
                return Err(VerifyError::NotASignGraph(format!(
                    "not maximal: neighbour {y} has the same sign"
                )));
            }
        }
    }
    if reached != g.vertices.len() {
        return Err(VerifyError::NotASignGraph("vertex set is not connected".into()));
    }
    Ok(())
}

/// Both sides of the formula given precomputed `Au` and `Av`.
fn sides(
    tree: &WeightedTree,
    u: &[f64],
    v: &[f64],
    au: &[f64],
    av: &[f64],
    g: &SignGraph,
    inside: &[bool],
) -> (f64, f64) {
    let mut lhs_uv = 0.0;
    let mut lhs_vu = 0.0;
    let mut rhs = 0.0;
    for &x in &g.vertices {
        let xi = x.index();
        lhs_uv += au[xi] * v[xi];
        lhs_vu += u[xi] * av[xi];
        for nb in tree.neighbours(x) {
            let yi = nb.vertex.index();
            if inside[yi] {
                continue;
            }
            let l = tree.edge(nb.edge).length();
            let (ux, uy) = (u[xi], u[yi]);
            let t = l * ux / (ux - uy);
            let grad = (uy - ux) / l;
            let v_at_t = v[xi] + (v[yi] - v[xi]) * t / l;
            rhs -= grad * v_at_t;
        }
    }
    (lhs_uv - lhs_vu, rhs)
}

fn membership_mask(n: usize, g: &SignGraph) -> Vec<bool> {
    let mut inside = vec![false; n];
    for &x in &g.vertices {
        inside[x.index()] = true;
    }
    inside
}

fn report(lhs: f64, rhs: f64, eigenpair: Option<EigenpairForm>, tolerance: f64) -> GreensCheckReport {
    let abs_residual = (lhs - rhs).abs();
    let rel_residual = abs_residual / 1f64.max(lhs.abs()).max(rhs.abs());
    let ok = rel_residual <= tolerance && eigenpair.as_ref().is_none_or(|e| e.rel_discrepancy <= tolerance);
    GreensCheckReport {
        lhs,
        rhs,
        abs_residual,
        rel_residual,
        domain_id: None,
        eigenpair,
        verdict: Verdict::from_bool(ok),
    }
}

/// Evaluates both sides of Green's formula for arbitrary `u`, `v` on the
/// nodal domain of the strong sign graph `g` of `u`.
///
/// The left side comes from the assembled matrix, the right side only from
/// boundary data: `∇ũ(t) = (u(y) - u(x)) / l(x, y)` and `ṽ` evaluated at
/// `t(x, y)` by affine interpolation on the same edge.
pub fn greens_check(
    op: &SchrodingerOperator,
    u: &[f64],
    v: &[f64],
    g: &SignGraph,
    eps_z: f64,
    tolerance: f64,
) -> Result<GreensCheckReport, VerifyError> {
    let tree = op.tree();
    check_sign_graph(tree, u, g, eps_z)?;
    let au = op.apply(u)?;
    let av = op.apply(v)?;
    let inside = membership_mask(tree.vertex_count(), g);
    let (lhs, rhs) = sides(tree, u, v, &au, &av, g, &inside);
    Ok(report(lhs, rhs, None, tolerance))
}

/// As [`greens_check`] for eigenpairs `(λ, u)` and `(μ, v)`, additionally
/// comparing the left side with `(λ - μ) Σ_G u v`.
pub fn greens_check_eigenpairs(
    op: &SchrodingerOperator,
    (lambda, u): (f64, &[f64]),
    (mu, v): (f64, &[f64]),
    g: &SignGraph,
    eps_z: f64,
    tolerance: f64,
) -> Result<GreensCheckReport, VerifyError> {
    let base = greens_check(op, u, v, g, eps_z, tolerance)?;
    let eigen = eigen_form(lambda, mu, u, v, g, base.lhs);
    Ok(report(base.lhs, base.rhs, Some(eigen), tolerance))
}

fn eigen_form(lambda: f64, mu: f64, u: &[f64], v: &[f64], g: &SignGraph, lhs: f64) -> EigenpairForm {
    let overlap: f64 = g.vertices.iter().map(|x| u[x.index()] * v[x.index()]).sum();
    let value = (lambda - mu) * overlap;
    EigenpairForm {
        lambda,
        mu,
        value,
        rel_discrepancy: rel(lhs, value),
    }
}

/// Aggregate of Green's formula over every eigenpair pair `i < j` and every
/// strong sign graph of the lower eigenvector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreensSweep {
    pub checks: usize,
    pub max_rel_residual: f64,
    pub max_eigen_discrepancy: f64,
    pub failures: Vec<(usize, usize, GreensCheckReport)>,
    pub verdict: Verdict,
}

pub fn greens_sweep(
    op: &SchrodingerOperator,
    spectrum: &Spectrum,
    eps_z: f64,
    tolerance: f64,
) -> Result<GreensSweep, VerifyError> {
    let tree = op.tree();
    let n = spectrum.len();
    let products: Vec<Vec<f64>> = spectrum
        .eigenvectors()
        .iter()
        .map(|u| op.apply(u))
        .collect::<Result<_, _>>()?;

    let mut sweep = GreensSweep {
        checks: 0,
        max_rel_residual: 0.0,
        max_eigen_discrepancy: 0.0,
        failures: Vec::new(),
        verdict: Verdict::Pass,
    };
    for i in 0..n {
        let u = spectrum.eigenvector(i);
        let partition = sign_graphs(tree, u, eps_z)?;
        for (gid, g) in partition.sign_graphs.iter().enumerate() {
            let inside = membership_mask(tree.vertex_count(), g);
            for j in i + 1..n {
                let v = spectrum.eigenvector(j);
                let (lhs, rhs) = sides(tree, u, v, &products[i], &products[j], g, &inside);
                let eigen = eigen_form(spectrum.eigenvalue(i), spectrum.eigenvalue(j), u, v, g, lhs);
                let mut r = report(lhs, rhs, Some(eigen), tolerance);
                r.domain_id = Some(gid);
                sweep.checks += 1;
                sweep.max_rel_residual = sweep.max_rel_residual.max(r.rel_residual);
                sweep.max_eigen_discrepancy = sweep
                    .max_eigen_discrepancy
                    .max(r.eigenpair.as_ref().map_or(0.0, |e| e.rel_discrepancy));
                if r.verdict == Verdict::Fail {
                    sweep.failures.push((i + 1, j + 1, r));
                }
            }
        }
    }
    sweep.verdict = Verdict::from_bool(sweep.failures.is_empty());
    Ok(sweep)
}
