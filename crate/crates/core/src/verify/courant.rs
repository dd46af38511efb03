//! Exact nodal count for simple spectra, and the sign-graph upper bound
//! `n + r - 1` for an eigenvalue `λ_n` of multiplicity `r`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::eigen::{multiplicity_groups, Spectrum};
use crate::nodal::{nodal_domains, sign_graphs};
use crate::operator::SchrodingerOperator;

use super::{Verdict, VerifyError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CourantOptions {
    pub eps_z: f64,
    pub tau_gap: f64,
    /// Random combinations drawn inside each degenerate eigenspace, in
    /// addition to the solver's basis vectors.
    pub remix_samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CourantEntry {
    /// One-based eigenvalue index.
    pub n: usize,
    pub sign_graph_count: usize,
    pub expected_sign_graphs: usize,
    pub zero_count: usize,
    pub expected_zeros: usize,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DaviesEntry {
    /// One-based index of the first eigenvalue in the group.
    pub n: usize,
    pub multiplicity: usize,
    pub bound: usize,
    pub max_sign_graphs: usize,
    pub vectors_checked: usize,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CourantReport {
    pub spectrum_simple: bool,
    pub tau_gap: f64,
    pub eps_z: f64,
    pub entries: Vec<CourantEntry>,
    /// `Inapplicable` when the spectrum is not simple.
    pub verdict: Verdict,
    pub davies: Vec<DaviesEntry>,
    pub davies_verdict: Verdict,
}

/// Counts strong sign graphs and zeros of every eigenvector.
///
/// With a simple spectrum, `u_n` must have exactly `n` sign graphs and `ũ_n`
/// exactly `n - 1` zeros. Otherwise those entries are reported
/// `Inapplicable` and only the bound `n + r - 1` is asserted, over the
/// solver's basis and over seeded random vectors of each degenerate
/// eigenspace.
pub fn courant_check(
    op: &SchrodingerOperator,
    spectrum: &Spectrum,
    opts: &CourantOptions,
) -> Result<CourantReport, VerifyError> {
    let tree = op.tree();
    let multiplicity = multiplicity_groups(spectrum, opts.tau_gap);
    let simple = multiplicity.is_simple;

    let mut entries = Vec::with_capacity(spectrum.len());
    let mut counts = Vec::with_capacity(spectrum.len());
    for i in 0..spectrum.len() {
        let n = i + 1;
        let d = nodal_domains(tree, spectrum.eigenvector(i), opts.eps_z)?;
        counts.push(d.sign_graphs.len());
        let verdict = if simple {
            Verdict::from_bool(d.sign_graphs.len() == n && d.zero_count == n - 1)
        } else {
            Verdict::Inapplicable
        };
        entries.push(CourantEntry {
            n,
            sign_graph_count: d.sign_graphs.len(),
            expected_sign_graphs: n,
            zero_count: d.zero_count,
            expected_zeros: n - 1,
            verdict,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut davies = Vec::with_capacity(multiplicity.groups.len());
    for group in &multiplicity.groups {
        let n = group.start + 1;
        let r = group.len();
        let bound = n + r - 1;
        let mut max_sign_graphs = group.clone().map(|i| counts[i]).max().unwrap_or(0);
        let mut vectors_checked = r;
        if r > 1 {
            for _ in 0..opts.remix_samples {
                let mut w = vec![0.0; spectrum.len()];
                for i in group.clone() {
                    let alpha: f64 = StandardNormal.sample(&mut rng);
                    for (wk, vk) in w.iter_mut().zip(spectrum.eigenvector(i)) {
                        *wk += alpha * vk;
                    }
                }
                let p = sign_graphs(tree, &w, opts.eps_z)?;
                max_sign_graphs = max_sign_graphs.max(p.sign_graphs.len());
                vectors_checked += 1;
            }
        }
        davies.push(DaviesEntry {
            n,
            multiplicity: r,
            bound,
            max_sign_graphs,
            vectors_checked,
            verdict: Verdict::from_bool(max_sign_graphs <= bound),
        });
    }

    let verdict = if simple {
        Verdict::from_bool(entries.iter().all(|e| e.verdict == Verdict::Pass))
    } else {
        Verdict::Inapplicable
    };
    let davies_verdict = Verdict::from_bool(davies.iter().all(|d| d.verdict == Verdict::Pass));
    Ok(CourantReport {
        spectrum_simple: simple,
        tau_gap: opts.tau_gap,
        eps_z: opts.eps_z,
        entries,
        verdict,
        davies,
        davies_verdict,
    })
}
