//! Schrödinger operators on weighted trees, their spectra, nodal domains of
//! eigenvectors, and executable checks of the classical nodal theorems for
//! trees: exact sign-graph counts, interlacing of zeros, Green's formula on
//! nodal domains and the Perron–Frobenius facts.
//!
//! ```
//! use nodaltree::{assemble, decompose, generate, Potential, TreeKind, WeightLaw};
//!
//! let tree = generate(TreeKind::Path, 2, WeightLaw::Unit, 0).unwrap();
//! let op = assemble(tree, &Potential::zeros(2)).unwrap();
//! let spectrum = decompose(&op).unwrap();
//! assert!((spectrum.eigenvalue(1) - 2.0).abs() < 1e-12);
//! ```

pub mod eigen;
pub mod generate;
pub mod io;
pub mod matrix;
pub mod nodal;
pub mod operator;
pub mod tree;
pub mod verify;

pub use eigen::{
    charpoly_oracle, decompose, decompose_matrix, default_tau_gap, multiplicity_groups, EigenError, MultiplicityReport,
    Spectrum,
};
pub use generate::{generate, generate_instance, generate_potential, PotentialLaw, TreeKind, WeightLaw};
pub use io::{TreeDocument, TreeFormat};
pub use matrix::DenseMatrix;
pub use nodal::{nodal_domains, sign_graphs, NodalDecomposition, SignGraphPartition, DEFAULT_EPS_Z};
pub use operator::{assemble, OperatorError, SchrodingerOperator};
pub use tree::{validate_tree, Potential, RawTree, TreeError, VertexId, WeightedTree};
pub use verify::{CheckReport, Verdict, VerifyError};
