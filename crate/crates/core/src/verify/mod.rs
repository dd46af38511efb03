//! Executable checks of the tree nodal theorems.
//!
//! Every checker is a pure function of its inputs and returns a report
//! carrying a [`Verdict`]. `Inapplicable` is distinct from `Pass`: checks
//! whose hypotheses require a simple spectrum say so instead of passing
//! vacuously.

mod batch;
mod courant;
mod dichotomy;
mod greens;
mod interlacing;
mod perron;

use serde::Serialize;
use thiserror::Error;

use crate::eigen::EigenError;
use crate::operator::OperatorError;
use crate::tree::TreeError;

pub use batch::{
    corpus_instance, instance_seed, run_batch, run_batch_outcomes, summarize, verify_instance, BatchSummary,
    CorpusSpec, FailureRecord, Instance, InstanceOutcome, Metrics, Tolerances, VerdictCounts, Verification,
};
pub use courant::{courant_check, CourantEntry, CourantOptions, CourantReport, DaviesEntry};
pub use dichotomy::{zero_dichotomy_check, DichotomyReport, ZeroVertex};
pub use greens::{greens_check, greens_check_eigenpairs, greens_sweep, EigenpairForm, GreensCheckReport, GreensSweep};
pub use interlacing::{interlacing_check, interlacing_sweep, BoundaryCoincidence, InterlacingReport, InterlacingSweep};
pub use perron::{perron_check, PerronReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inapplicable,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// `Fail` dominates, then `Pass`; all-inapplicable stays inapplicable.
    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Pass, _) | (_, Pass) => Pass,
            _ => Inapplicable,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inapplicable => "inapplicable",
        }
    }
}

/// Stable wire form of any check: `{"check", "verdict", "details"}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: &'static str,
    pub verdict: Verdict,
    pub details: serde_json::Value,
}

impl CheckReport {
    pub fn new(check: &'static str, verdict: Verdict, details: &impl Serialize) -> Self {
        CheckReport {
            check,
            verdict,
            details: serde_json::to_value(details).expect("report details always serialize"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("vertex set is not a strong sign graph of u: {0}")]
    NotASignGraph(String),
    #[error("interlacing needs consecutive eigenvector indices, got {lower:?} and {upper:?}")]
    IndexMismatch { lower: Option<usize>, upper: Option<usize> },
    #[error("spectrum is not simple")]
    NotSimple,
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// Names of the checks produced by [`verify_instance`], in output order.
pub const CHECK_NAMES: [&str; 7] = [
    "solver_certification",
    "perron_frobenius",
    "greens_formula",
    "davies_bound",
    "nodal_count",
    "interlacing",
    "zero_dichotomy",
];
