//! Perron–Frobenius facts: `λ₁` is simple with a strictly positive
//! eigenvector, and every later eigenvector changes sign.

use serde::Serialize;

use crate::eigen::Spectrum;
use crate::nodal::classify;
use crate::nodal::{Sign, VertexClass};

use super::Verdict;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerronReport {
    /// `λ₂ - λ₁`, or `None` for a one-vertex spectrum.
    pub first_gap: Option<f64>,
    pub first_simple: bool,
    pub min_first_entry: f64,
    pub first_positive: bool,
    /// One-based indices `n >= 2` whose eigenvector lacks a strict sign.
    pub no_sign_change: Vec<usize>,
    pub verdict: Verdict,
}

/// Expects a sign-normalized spectrum, as produced by
/// [`decompose`](crate::eigen::decompose).
pub fn perron_check(spectrum: &Spectrum, tau_gap: f64, eps_z: f64) -> PerronReport {
    let first_gap = (spectrum.len() > 1).then(|| spectrum.eigenvalue(1) - spectrum.eigenvalue(0));
    let first_simple = first_gap.is_none_or(|g| g > tau_gap);
    let u1 = spectrum.eigenvector(0);
    let min_first_entry = u1.iter().copied().fold(f64::INFINITY, f64::min);
    let first_positive = min_first_entry > 0.0;

    let no_sign_change = (1..spectrum.len())
        .filter(|&i| {
            let (_, classes) = classify(spectrum.eigenvector(i), eps_z);
            let pos = classes.contains(&VertexClass::Strict(Sign::Positive));
            let neg = classes.contains(&VertexClass::Strict(Sign::Negative));
            !(pos && neg)
        })
        .map(|i| i + 1)
        .collect::<Vec<_>>();

    let verdict = Verdict::from_bool(first_simple && first_positive && no_sign_change.is_empty());
    PerronReport {
        first_gap,
        first_simple,
        min_first_entry,
        first_positive,
        no_sign_change,
        verdict,
    }
}
