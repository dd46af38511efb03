//! Interlacing of zeros: every nodal domain of `ũ_{n-1}` contains exactly
//! one zero of `ũ_n`.

use serde::Serialize;

use crate::eigen::{MultiplicityReport, Spectrum};
use crate::nodal::{nodal_domains, Membership, NodalDecomposition, ZeroKind};
use crate::tree::{VertexId, WeightedTree};

use super::{Verdict, VerifyError};

/// Relative slack on edge parameters when deciding interior membership.
pub const MEMBERSHIP_SLACK: f64 = 1e-12;

/// A zero of the upper function lying (within slack) on a boundary point of
/// a lower domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCoincidence {
    pub domain: usize,
    pub edge: Option<(VertexId, VertexId)>,
    pub vertex: Option<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterlacingReport {
    /// One-based indices `n - 1` and `n`.
    pub lower: usize,
    pub upper: usize,
    /// Zeros of `ũ_n` strictly inside each domain of `ũ_{n-1}`.
    pub counts: Vec<usize>,
    pub coincidences: Vec<BoundaryCoincidence>,
    /// Exploratory, not part of the verdict: zeros of `ũ_{n-1}` strictly
    /// inside each domain of `ũ_n`.
    pub converse_counts: Vec<usize>,
    pub verdict: Verdict,
}

/// Counts, for every domain of `domains_of`, the zeros of `zeros_of` strictly
/// inside it.
fn zeros_per_domain(
    tree: &WeightedTree,
    domains_of: &NodalDecomposition,
    zeros_of: &NodalDecomposition,
) -> (Vec<usize>, Vec<BoundaryCoincidence>) {
    let mut counts = vec![0usize; domains_of.domains.len()];
    let mut coincidences = Vec::new();

    for z in zeros_of.edge_zeros.iter().filter(|z| z.kind == ZeroKind::Interior) {
        let (a, b) = z.edge;
        let l = tree.length(a, b).expect("zeros lie on edges");
        // Distance of the zero from each endpoint.
        for (end, other, dist) in [(a, b, z.t), (b, a, l - z.t)] {
            let Membership::Sign(d) = domains_of.membership[end.index()] else {
                continue;
            };
            if domains_of.membership[other.index()] == Membership::Sign(d) {
                // Full edge of the domain; count once, from the `a` side.
                if end == a {
                    counts[d] += 1;
                }
                continue;
            }
            let boundary = domains_of.domains[d]
                .boundary
                .iter()
                .find(|bz| bz.edge == (end, other))
                .expect("a boundary edge carries a boundary point");
            let slack = MEMBERSHIP_SLACK * l;
            if (dist - boundary.t).abs() <= slack {
                coincidences.push(BoundaryCoincidence {
                    domain: d,
                    edge: Some((end, other)),
                    vertex: None,
                });
            } else if dist < boundary.t {
                counts[d] += 1;
            }
        }
    }

    for zg in &zeros_of.zero_graphs {
        let mut hit: Vec<usize> = Vec::new();
        for &v in &zg.vertices {
            match domains_of.membership[v.index()] {
                Membership::Sign(d) => {
                    if !hit.contains(&d) {
                        hit.push(d);
                    }
                }
                Membership::Zero(_) => {
                    // Both functions vanish at v, which bounds every
                    // adjacent domain.
                    for nb in tree.neighbours(v) {
                        if let Membership::Sign(d) = domains_of.membership[nb.vertex.index()] {
                            coincidences.push(BoundaryCoincidence {
                                domain: d,
                                edge: None,
                                vertex: Some(v),
                            });
                        }
                    }
                }
            }
        }
        for d in hit {
            counts[d] += 1;
        }
    }
    (counts, coincidences)
}

/// Checks one consecutive pair. Both decompositions must carry their
/// eigenvalue index, and the spectrum must be simple.
pub fn interlacing_check(
    tree: &WeightedTree,
    multiplicity: &MultiplicityReport,
    lower: &NodalDecomposition,
    upper: &NodalDecomposition,
) -> Result<InterlacingReport, VerifyError> {
    let (lo, up) = match (lower.eigen_index, upper.eigen_index) {
        (Some(lo), Some(up)) if up == lo + 1 => (lo, up),
        (l, u) => return Err(VerifyError::IndexMismatch { lower: l, upper: u }),
    };
    if !multiplicity.is_simple {
        return Err(VerifyError::NotSimple);
    }
    let (counts, coincidences) = zeros_per_domain(tree, lower, upper);
    let (converse_counts, _) = zeros_per_domain(tree, upper, lower);
    let verdict = Verdict::from_bool(counts.iter().all(|&c| c == 1));
    Ok(InterlacingReport {
        lower: lo,
        upper: up,
        counts,
        coincidences,
        converse_counts,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterlacingSweep {
    pub spectrum_simple: bool,
    pub pairs: Vec<InterlacingReport>,
    pub verdict: Verdict,
}

/// All consecutive pairs `(n - 1, n)`, `n = 2..=N`. Reports
/// `Inapplicable` without checking when the spectrum is not simple.
pub fn interlacing_sweep(
    tree: &WeightedTree,
    spectrum: &Spectrum,
    multiplicity: &MultiplicityReport,
    eps_z: f64,
) -> Result<InterlacingSweep, VerifyError> {
    if !multiplicity.is_simple {
        return Ok(InterlacingSweep {
            spectrum_simple: false,
            pairs: Vec::new(),
            verdict: Verdict::Inapplicable,
        });
    }
    let decompositions: Vec<NodalDecomposition> = (0..spectrum.len())
        .map(|i| nodal_domains(tree, spectrum.eigenvector(i), eps_z).map(|d| d.with_eigen_index(i + 1)))
        .collect::<Result<_, _>>()?;
    let pairs: Vec<InterlacingReport> = decompositions
        .windows(2)
        .map(|w| interlacing_check(tree, multiplicity, &w[0], &w[1]))
        .collect::<Result<_, _>>()?;
    let verdict = Verdict::from_bool(pairs.iter().all(|p| p.verdict == Verdict::Pass));
    Ok(InterlacingSweep {
        spectrum_simple: true,
        pairs,
        verdict,
    })
}
