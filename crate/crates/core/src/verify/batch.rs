//! Seeded corpus runs over all checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{
    charpoly_oracle, decompose, default_tau_gap, multiplicity_groups, EigenError, Spectrum, EPS_ORTHO, EPS_RES,
    ORACLE_MAX_DIM,
};
use crate::generate::{generate_potential, generate_with, PotentialLaw, TreeKind, WeightLaw};
use crate::nodal::DEFAULT_EPS_Z;
use crate::operator::{assemble, SchrodingerOperator};
use crate::tree::{Potential, TreeError, WeightedTree};

use super::{
    courant_check, greens_sweep, interlacing_sweep, perron_check, zero_dichotomy_check, CheckReport, CourantOptions,
    Verdict, VerifyError, CHECK_NAMES,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub kind: TreeKind,
    pub n_min: usize,
    pub n_max: usize,
    pub weights: WeightLaw,
    pub potential: PotentialLaw,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            kind: TreeKind::RandomPruefer,
            n_min: 4,
            n_max: 12,
            weights: WeightLaw::Uniform { a: 0.5, b: 2.0 },
            potential: PotentialLaw::Uniform { a: -1.0, b: 1.0 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub eps_z: f64,
    /// `None` means `1e-8 · max(1, ‖A‖_F)` per instance.
    pub tau_gap: Option<f64>,
    pub greens_tol: f64,
    pub oracle_tol: f64,
    pub remix_samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_z: DEFAULT_EPS_Z,
            tau_gap: None,
            greens_tol: 1e-8,
            oracle_tol: 1e-9,
            remix_samples: 16,
        }
    }
}

/// SplitMix64 of the base seed advanced `index + 1` steps.
pub fn instance_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub index: usize,
    pub seed: u64,
    pub tree: WeightedTree,
    pub potential: Potential,
}

/// Instance `index` of the corpus: size, tree and potential all come from
/// one generator seeded by [`instance_seed`].
pub fn corpus_instance(spec: &CorpusSpec, base_seed: u64, index: usize) -> Result<Instance, TreeError> {
    if spec.n_min < 2 {
        return Err(TreeError::BadSize(spec.n_min));
    }
    if spec.n_max < spec.n_min {
        return Err(TreeError::BadSize(spec.n_max));
    }
    let seed = instance_seed(base_seed, index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(spec.n_min..=spec.n_max);
    let tree = generate_with(spec.kind, n, spec.weights, &mut rng)?;
    let potential = generate_potential(n, spec.potential, &mut rng)?;
    Ok(Instance {
        index,
        seed,
        tree,
        potential,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub greens_max_rel_residual: f64,
    pub greens_max_eigen_discrepancy: f64,
    /// `max_i ‖Au_i - λ_i u_i‖ / ‖A‖_F`.
    pub residual_ratio: f64,
    pub orthogonality_defect: f64,
    /// `max_i |λ_i - oracle_i|`, only for `N <= 12`.
    pub oracle_discrepancy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verification {
    pub spectrum_simple: bool,
    pub checks: Vec<CheckReport>,
    pub metrics: Metrics,
}

impl Verification {
    pub fn verdict(&self) -> Verdict {
        self.checks
            .iter()
            .fold(Verdict::Inapplicable, |v, c| v.combine(c.verdict))
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.check == name)
    }
}

#[derive(Serialize)]
struct Certification {
    max_residual: f64,
    residual_bound: f64,
    orthogonality_defect: f64,
    orthogonality_bound: f64,
    oracle_discrepancy: Option<f64>,
    oracle_tolerance: f64,
}

#[derive(Serialize)]
struct SolverFailure {
    error: String,
}

#[derive(Serialize)]
struct DichotomySweep {
    zero_vertices: usize,
    failures: Vec<super::DichotomyReport>,
}

/// Runs every check in [`CHECK_NAMES`] on one operator. `seed` drives the
/// random remixes of degenerate eigenspaces.
pub fn verify_instance(op: &SchrodingerOperator, tol: &Tolerances, seed: u64) -> Result<Verification, VerifyError> {
    let spectrum = match decompose(op) {
        Ok(s) => s,
        Err(e @ (EigenError::Uncertified { .. } | EigenError::NoConvergence { .. })) => {
            return Ok(solver_failed(&e));
        }
        Err(e) => return Err(e.into()),
    };
    verify_spectrum(op, &spectrum, tol, seed)
}

fn solver_failed(e: &EigenError) -> Verification {
    let mut checks = vec![CheckReport::new(
        CHECK_NAMES[0],
        Verdict::Fail,
        &SolverFailure { error: e.to_string() },
    )];
    for name in &CHECK_NAMES[1..] {
        checks.push(CheckReport::new(name, Verdict::Inapplicable, &serde_json::Value::Null));
    }
    Verification {
        spectrum_simple: false,
        checks,
        metrics: Metrics {
            greens_max_rel_residual: f64::NAN,
            greens_max_eigen_discrepancy: f64::NAN,
            residual_ratio: f64::NAN,
            orthogonality_defect: f64::NAN,
            oracle_discrepancy: None,
        },
    }
}

fn verify_spectrum(
    op: &SchrodingerOperator,
    spectrum: &Spectrum,
    tol: &Tolerances,
    seed: u64,
) -> Result<Verification, VerifyError> {
    let tree = op.tree();
    let norm = spectrum.frobenius_norm();
    let tau_gap = tol.tau_gap.unwrap_or_else(|| default_tau_gap(norm));
    let multiplicity = multiplicity_groups(spectrum, tau_gap);
    let mut checks = Vec::with_capacity(CHECK_NAMES.len());

    let oracle_discrepancy = if spectrum.len() <= ORACLE_MAX_DIM {
        let roots = charpoly_oracle(op)?;
        Some(
            roots
                .iter()
                .zip(spectrum.eigenvalues())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    } else {
        None
    };
    let cert = Certification {
        max_residual: spectrum.max_residual(),
        residual_bound: EPS_RES * norm,
        orthogonality_defect: spectrum.orthogonality_defect(),
        orthogonality_bound: EPS_ORTHO,
        oracle_discrepancy,
        oracle_tolerance: tol.oracle_tol,
    };
    let certified = cert.max_residual <= cert.residual_bound
        && cert.orthogonality_defect <= cert.orthogonality_bound
        && oracle_discrepancy.is_none_or(|d| d <= tol.oracle_tol);
    checks.push(CheckReport::new(CHECK_NAMES[0], Verdict::from_bool(certified), &cert));

    let perron = perron_check(spectrum, tau_gap, tol.eps_z);
    checks.push(CheckReport::new(CHECK_NAMES[1], perron.verdict, &perron));

    let greens = greens_sweep(op, spectrum, tol.eps_z, tol.greens_tol)?;
    checks.push(CheckReport::new(CHECK_NAMES[2], greens.verdict, &greens));

    let courant = courant_check(
        op,
        spectrum,
        &CourantOptions {
            eps_z: tol.eps_z,
            tau_gap,
            remix_samples: tol.remix_samples,
            seed,
        },
    )?;
    checks.push(CheckReport::new(
        CHECK_NAMES[3],
        courant.davies_verdict,
        &courant.davies,
    ));
    checks.push(CheckReport::new(CHECK_NAMES[4], courant.verdict, &courant.entries));

    let interlacing = interlacing_sweep(tree, spectrum, &multiplicity, tol.eps_z)?;
    checks.push(CheckReport::new(CHECK_NAMES[5], interlacing.verdict, &interlacing));

    let mut dichotomy = DichotomySweep {
        zero_vertices: 0,
        failures: Vec::new(),
    };
    for i in 0..spectrum.len() {
        let r = zero_dichotomy_check(op, spectrum.eigenvector(i), spectrum.eigenvalue(i), tol.eps_z)?;
        dichotomy.zero_vertices += r.zero_vertices.len();
        if r.verdict == Verdict::Fail {
            dichotomy.failures.push(r);
        }
    }
    let verdict = Verdict::from_bool(dichotomy.failures.is_empty());
    checks.push(CheckReport::new(CHECK_NAMES[6], verdict, &dichotomy));

    Ok(Verification {
        spectrum_simple: multiplicity.is_simple,
        checks,
        metrics: Metrics {
            greens_max_rel_residual: greens.max_rel_residual,
            greens_max_eigen_discrepancy: greens.max_eigen_discrepancy,
            residual_ratio: spectrum.max_residual() / norm.max(f64::MIN_POSITIVE),
            orthogonality_defect: spectrum.orthogonality_defect(),
            oracle_discrepancy,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceOutcome {
    pub index: usize,
    pub seed: u64,
    pub n: usize,
    pub verification: Verification,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerdictCounts {
    pub check: String,
    pub pass: usize,
    pub fail: usize,
    pub inapplicable: usize,
}

impl VerdictCounts {
    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Pass => self.pass += 1,
            Verdict::Fail => self.fail += 1,
            Verdict::Inapplicable => self.inapplicable += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureRecord {
    pub index: usize,
    pub seed: u64,
    pub check: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchSummary {
    pub corpus: CorpusSpec,
    pub seed: u64,
    pub count: usize,
    pub tolerances: Tolerances,
    pub simple_spectra: usize,
    pub checks: Vec<VerdictCounts>,
    pub max_greens_rel_residual: f64,
    pub max_greens_eigen_discrepancy: f64,
    pub max_residual_ratio: f64,
    pub max_orthogonality_defect: f64,
    pub max_oracle_discrepancy: Option<f64>,
    pub failures: Vec<FailureRecord>,
}

impl BatchSummary {
    pub fn has_failures(&self) -> bool {
        !self.failures.is_empty()
    }

    pub fn counts(&self, check: &str) -> Option<&VerdictCounts> {
        self.checks.iter().find(|c| c.check == check)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary always serializes")
    }

    /// Fixed-width table followed by the maxima and any failures.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "instances {}  seed {}  simple spectra {}\n{:<22}{:>8}{:>8}{:>14}\n",
            self.count, self.seed, self.simple_spectra, "check", "pass", "fail", "inapplicable"
        );
        for c in &self.checks {
            out += &format!("{:<22}{:>8}{:>8}{:>14}\n", c.check, c.pass, c.fail, c.inapplicable);
        }
        out += &format!("max greens rel residual     {:e}\n", self.max_greens_rel_residual);
        out += &format!("max greens eigen mismatch   {:e}\n", self.max_greens_eigen_discrepancy);
        out += &format!("max residual / |A|_F        {:e}\n", self.max_residual_ratio);
        out += &format!("max orthogonality defect    {:e}\n", self.max_orthogonality_defect);
        match self.max_oracle_discrepancy {
            Some(d) => out += &format!("max oracle discrepancy      {d:e}\n"),
            None => out += "max oracle discrepancy      n/a\n",
        }
        for f in &self.failures {
            out += &format!("FAIL instance {} (seed {}): {}\n", f.index, f.seed, f.check);
        }
        out
    }
}

fn run_one(spec: &CorpusSpec, seed: u64, index: usize, tol: &Tolerances) -> Result<InstanceOutcome, VerifyError> {
    let inst = corpus_instance(spec, seed, index)?;
    let n = inst.tree.vertex_count();
    let op = assemble(inst.tree, &inst.potential)?;
    let verification = verify_instance(&op, tol, inst.seed)?;
    Ok(InstanceOutcome {
        index,
        seed: inst.seed,
        n,
        verification,
    })
}

/// Runs `count` corpus instances on `jobs` worker threads. Outcomes are
/// returned in index order, so the result does not depend on `jobs`.
pub fn run_batch_outcomes(
    spec: &CorpusSpec,
    seed: u64,
    count: usize,
    tol: &Tolerances,
    jobs: usize,
) -> Result<Vec<InstanceOutcome>, VerifyError> {
    if jobs <= 1 {
        return (0..count).map(|i| run_one(spec, seed, i, tol)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| VerifyError::Pool(e.to_string()))?;
    pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|i| run_one(spec, seed, i, tol))
            .collect()
    })
}

pub fn summarize(spec: &CorpusSpec, seed: u64, tol: &Tolerances, outcomes: &[InstanceOutcome]) -> BatchSummary {
    let mut checks: Vec<VerdictCounts> = CHECK_NAMES
        .iter()
        .map(|name| VerdictCounts {
            check: (*name).to_owned(),
            ..Default::default()
        })
        .collect();
    let mut summary = BatchSummary {
        corpus: *spec,
        seed,
        count: outcomes.len(),
        tolerances: *tol,
        simple_spectra: 0,
        checks: Vec::new(),
        max_greens_rel_residual: 0.0,
        max_greens_eigen_discrepancy: 0.0,
        max_residual_ratio: 0.0,
        max_orthogonality_defect: 0.0,
        max_oracle_discrepancy: None,
        failures: Vec::new(),
    };
    for o in outcomes {
        let v = &o.verification;
        summary.simple_spectra += usize::from(v.spectrum_simple);
        for (tally, report) in checks.iter_mut().zip(&v.checks) {
            tally.add(report.verdict);
            if report.verdict == Verdict::Fail {
                summary.failures.push(FailureRecord {
                    index: o.index,
                    seed: o.seed,
                    check: report.check.to_owned(),
                });
            }
        }
        let m = &v.metrics;
        // `f64::max` ignores NaN, which marks metrics of a failed solve.
        summary.max_greens_rel_residual = summary.max_greens_rel_residual.max(m.greens_max_rel_residual);
        summary.max_greens_eigen_discrepancy = summary.max_greens_eigen_discrepancy.max(m.greens_max_eigen_discrepancy);
        summary.max_residual_ratio = summary.max_residual_ratio.max(m.residual_ratio);
        summary.max_orthogonality_defect = summary.max_orthogonality_defect.max(m.orthogonality_defect);
        if let Some(d) = m.oracle_discrepancy {
            summary.max_oracle_discrepancy = Some(summary.max_oracle_discrepancy.map_or(d, |x: f64| x.max(d)));
        }
    }
    summary.checks = checks;
    summary
}

pub fn run_batch(
    spec: &CorpusSpec,
    seed: u64,
    count: usize,
    tol: &Tolerances,
    jobs: usize,
) -> Result<BatchSummary, VerifyError> {
    let outcomes = run_batch_outcomes(spec, seed, count, tol, jobs)?;
    Ok(summarize(spec, seed, tol, &outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_seeds_differ() {
        let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|i| instance_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(instance_seed(7, 0), instance_seed(8, 0));
    }

    #[test]
    fn corpus_sizes_in_range() {
        let spec = CorpusSpec::default();
        for i in 0..50 {
            let inst = corpus_instance(&spec, 3, i).unwrap();
            assert!((4..=12).contains(&inst.tree.vertex_count()));
            assert_eq!(inst.potential.len(), inst.tree.vertex_count());
        }
    }

    #[test]
    fn bad_spec_rejected() {
        let spec = CorpusSpec {
            n_min: 5,
            n_max: 4,
            ..CorpusSpec::default()
        };
        assert!(corpus_instance(&spec, 0, 0).is_err());
    }

    #[test]
    fn small_batch_passes_and_is_job_independent() {
        let spec = CorpusSpec::default();
        let tol = Tolerances::default();
        let a = run_batch(&spec, 7, 40, &tol, 1).unwrap();
        let b = run_batch(&spec, 7, 40, &tol, 3).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(!a.has_failures(), "{}", a.to_text());
        assert_eq!(a.checks.len(), CHECK_NAMES.len());
    }

    #[test]
    fn unit_star_instance() {
        let tree = crate::generate::generate(TreeKind::Star, 5, WeightLaw::Unit, 0).unwrap();
        let op = assemble(tree, &Potential::zeros(5)).unwrap();
        let v = verify_instance(&op, &Tolerances::default(), 1).unwrap();
        assert!(!v.spectrum_simple);
        assert_eq!(v.check("nodal_count").unwrap().verdict, Verdict::Inapplicable);
        assert_eq!(v.check("interlacing").unwrap().verdict, Verdict::Inapplicable);
        assert_eq!(v.check("davies_bound").unwrap().verdict, Verdict::Pass);
        assert_eq!(v.check("perron_frobenius").unwrap().verdict, Verdict::Pass);
        assert_eq!(v.check("solver_certification").unwrap().verdict, Verdict::Pass);
        assert_eq!(v.verdict(), Verdict::Pass);
    }
}
