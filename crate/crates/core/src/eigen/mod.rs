//! Full symmetric eigendecomposition with residual certification, plus an
//! independent characteristic-polynomial oracle for small matrices.

mod charpoly;
pub mod dd;
mod ql;

use std::ops::Range;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::matrix::{dot, norm2, DenseMatrix};
use crate::operator::SchrodingerOperator;

pub use charpoly::{charpoly_coefficients, charpoly_oracle, charpoly_roots, ORACLE_MAX_DIM};
pub use ql::MAX_SWEEPS;

/// Residual bound factor: `‖Av - λv‖₂ <= EPS_RES · ‖A‖_F`.
pub const EPS_RES: f64 = 1e-12;
/// Bound on `max |⟨v_i, v_j⟩ - δ_ij|`.
pub const EPS_ORTHO: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("QL iteration did not converge for eigenvalue {index} within {MAX_SWEEPS} sweeps")]
    NoConvergence { index: usize },
    #[error("matrix is not square and symmetric")]
    NotSymmetric,
    #[error("eigenpair certification failed: {what} = {value:e} exceeds {bound:e}")]
    Uncertified { what: &'static str, value: f64, bound: f64 },
    #[error("characteristic polynomial oracle supports N <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("root isolation failed for root {index}: {detail}")]
    RootIsolationFailure { index: usize, detail: String },
}

/// Ascending eigenvalues with orthonormal, sign-normalized eigenvectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    /// `eigenvectors[i]` belongs to `eigenvalues[i]`.
    eigenvectors: Vec<Vec<f64>>,
    #[serde(rename = "residuals")]
    residual_norms: Vec<f64>,
    orthogonality_defect: f64,
    frobenius_norm: f64,
}

impl Spectrum {
    #[inline]
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    #[inline]
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    #[inline]
    pub fn eigenvectors(&self) -> &[Vec<f64>] {
        &self.eigenvectors
    }

    /// Zero-based: `eigenvalue(0)` is λ₁.
    #[inline]
    pub fn eigenvalue(&self, i: usize) -> f64 {
        self.eigenvalues[i]
    }

    #[inline]
    pub fn eigenvector(&self, i: usize) -> &[f64] {
        &self.eigenvectors[i]
    }

    #[inline]
    pub fn residual_norms(&self) -> &[f64] {
        &self.residual_norms
    }

    #[inline]
    pub fn orthogonality_defect(&self) -> f64 {
        self.orthogonality_defect
    }

    /// `‖A‖_F` of the decomposed matrix.
    #[inline]
    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm
    }

    pub fn max_residual(&self) -> f64 {
        self.residual_norms.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectra always serialize")
    }
}

/// Decomposes `op` and certifies the result.
pub fn decompose(op: &SchrodingerOperator) -> Result<Spectrum, EigenError> {
    decompose_matrix(op.matrix())
}

pub fn decompose_matrix(a: &DenseMatrix) -> Result<Spectrum, EigenError> {
    if !a.is_symmetric() {
        return Err(EigenError::NotSymmetric);
    }
    let n = a.rows();
    let mut z = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    if n > 0 {
        ql::tridiagonalize(&mut z, &mut d, &mut e);
        ql::ql_implicit(&mut d, &mut e, &mut z)?;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| {
            let mut v = z.column(i);
            normalize_sign(&mut v);
            v
        })
        .collect();

    let residual_norms: Vec<f64> = eigenvalues
        .iter()
        .zip(&eigenvectors)
        .map(|(&lambda, v)| {
            let av = a.matvec(v);
            let r: Vec<f64> = av.iter().zip(v).map(|(x, y)| x - lambda * y).collect();
            norm2(&r)
        })
        .collect();
    let orthogonality_defect = orthogonality_defect(&eigenvectors);
    let frobenius_norm = a.frobenius_norm();

    let spectrum = Spectrum {
        eigenvalues,
        eigenvectors,
        residual_norms,
        orthogonality_defect,
        frobenius_norm,
    };
    let bound = EPS_RES * frobenius_norm;
    if spectrum.max_residual() > bound {
        return Err(EigenError::Uncertified {
            what: "residual",
            value: spectrum.max_residual(),
            bound,
        });
    }
    if orthogonality_defect > EPS_ORTHO {
        return Err(EigenError::Uncertified {
            what: "orthogonality defect",
            value: orthogonality_defect,
            bound: EPS_ORTHO,
        });
    }
    Ok(spectrum)
}

/// Flips `v` so that its entry of largest magnitude (first one on ties) is
/// positive. A Perron vector comes out entrywise positive.
pub fn normalize_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn orthogonality_defect(vectors: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..vectors.len() {
        for j in i..vectors.len() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(&vectors[i], &vectors[j]) - target).abs());
        }
    }
    worst
}

/// Default gap tolerance `1e-8 · max(1, ‖A‖_F)`.
pub fn default_tau_gap(frobenius_norm: f64) -> f64 {
    1e-8 * frobenius_norm.max(1.0)
}

/// Clusters of numerically equal eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityReport {
    /// Zero-based, half-open index ranges partitioning `0..N`.
    pub groups: Vec<Range<usize>>,
    pub is_simple: bool,
    pub tau_gap: f64,
}

impl MultiplicityReport {
    /// The group containing eigenvalue index `i` (zero-based).
    pub fn group_of(&self, i: usize) -> &Range<usize> {
        self.groups
            .iter()
            .find(|g| g.contains(&i))
            .expect("groups partition the index set")
    }

    pub fn multiplicity(&self, i: usize) -> usize {
        self.group_of(i).len()
    }
}

impl Serialize for MultiplicityReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            /// One-based eigenvalue indices.
            groups: Vec<Vec<usize>>,
            is_simple: bool,
            tau_gap: f64,
        }
        Wire {
            groups: self.groups.iter().map(|g| g.clone().map(|i| i + 1).collect()).collect(),
            is_simple: self.is_simple,
            tau_gap: self.tau_gap,
        }
        .serialize(serializer)
    }
}

/// Groups adjacent eigenvalues whose gap is at most `tau_gap`; grouping is
/// transitive along the sorted spectrum.
pub fn multiplicity_groups(spectrum: &Spectrum, tau_gap: f64) -> MultiplicityReport {
    group_sorted(spectrum.eigenvalues(), tau_gap)
}

pub fn group_sorted(eigenvalues: &[f64], tau_gap: f64) -> MultiplicityReport {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=eigenvalues.len() {
        if i == eigenvalues.len() || eigenvalues[i] - eigenvalues[i - 1] > tau_gap {
            groups.push(start..i);
            start = i;
        }
    }
    let is_simple = groups.iter().all(|g| g.len() == 1);
    MultiplicityReport {
        groups,
        is_simple,
        tau_gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, generate_potential, generate_with, PotentialLaw, TreeKind, WeightLaw};
    use crate::operator::assemble;
    use crate::tree::{Potential, WeightedTree};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn laplacian(kind: TreeKind, n: usize) -> SchrodingerOperator {
        assemble(generate(kind, n, WeightLaw::Unit, 0).unwrap(), &Potential::zeros(n)).unwrap()
    }

    #[test]
    fn p2_spectrum() {
        let s = decompose(&laplacian(TreeKind::Path, 2)).unwrap();
        assert!((s.eigenvalue(0) - 0.0).abs() < 1e-15);
        assert!((s.eigenvalue(1) - 2.0).abs() < 1e-15);
        let r = 0.5_f64.sqrt();
        assert!((s.eigenvector(0)[0] - r).abs() < 1e-15 && (s.eigenvector(0)[1] - r).abs() < 1e-15);
    }

    #[test]
    fn star_spectrum_and_multiplicity() {
        let s = decompose(&laplacian(TreeKind::Star, 5)).unwrap();
        for (l, e) in s.eigenvalues().iter().zip([0.0, 1.0, 1.0, 1.0, 5.0]) {
            assert!((l - e).abs() < 1e-10);
        }
        let m = multiplicity_groups(&s, default_tau_gap(s.frobenius_norm()));
        assert_eq!(m.groups, vec![0..1, 1..4, 4..5]);
        assert!(!m.is_simple);
        assert_eq!(m.multiplicity(2), 3);
        assert_eq!(
            serde_json::to_value(&m).unwrap()["groups"],
            serde_json::json!([[1], [2, 3, 4], [5]])
        );
    }

    #[test]
    fn two_separated_values_are_simple() {
        let m = group_sorted(&[0.0, 2.0], 1e-8);
        assert_eq!(m.groups, vec![0..1, 1..2]);
        assert!(m.is_simple);
    }

    #[test]
    fn perturbed_star_is_simple() {
        let t = WeightedTree::from_edges(5, 1, [(0, 1, 1.001), (0, 2, 0.999), (0, 3, 1.0005), (0, 4, 0.9993)]).unwrap();
        let s = decompose(&assemble(t, &Potential::zeros(5)).unwrap()).unwrap();
        let m = multiplicity_groups(&s, default_tau_gap(s.frobenius_norm()));
        assert!(m.is_simple, "{:?}", s.eigenvalues());
    }

    #[test]
    fn unit_path_matches_closed_form_and_oracle() {
        // Path Laplacian eigenvalues: 2 - 2 cos(kπ/N), k = 0..N-1.
        let op = laplacian(TreeKind::Path, 8);
        let s = decompose(&op).unwrap();
        let oracle = charpoly_oracle(&op).unwrap();
        for (k, root) in oracle.iter().enumerate() {
            let exact = 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / 8.0).cos();
            assert!((s.eigenvalue(k) - exact).abs() < 1e-12);
            assert!((root - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn oracle_agrees_on_integer_weight_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let t = generate_with(TreeKind::RandomPruefer, 6, WeightLaw::Unit, &mut rng).unwrap();
            // Integer weights 1..=3.
            let raw = t.to_raw();
            let edges: Vec<_> = raw
                .edges
                .iter()
                .enumerate()
                .map(|(i, &(x, y, _))| (x, y, (1 + (i * 7 + x) % 3) as f64))
                .collect();
            let t = WeightedTree::from_edges(6, raw.root, edges).unwrap();
            let p = generate_potential(6, PotentialLaw::Zero, &mut rng).unwrap();
            let op = assemble(t, &p).unwrap();
            let s = decompose(&op).unwrap();
            let roots = charpoly_oracle(&op).unwrap();
            for (a, b) in s.eigenvalues().iter().zip(&roots) {
                assert!((a - b).abs() < 1e-9, "{:?} vs {roots:?}", s.eigenvalues());
            }
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        assert_eq!(decompose_matrix(&a).unwrap_err(), EigenError::NotSymmetric);
    }

    #[test]
    fn sign_normalization() {
        let mut v = vec![0.1, -0.9, 0.3];
        normalize_sign(&mut v);
        assert_eq!(v, vec![-0.1, 0.9, -0.3]);
    }

    #[test]
    fn spectrum_json_shape() {
        let s = decompose(&laplacian(TreeKind::Path, 2)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 2);
        assert_eq!(v["eigenvectors"].as_array().unwrap().len(), 2);
        assert_eq!(v["residuals"].as_array().unwrap().len(), 2);
    }
}
