//! Fixtures shared by the benchmarks.

use nodaltree::{assemble, generate, Potential, SchrodingerOperator, TreeKind, WeightLaw};

/// Random Prüfer tree with weights in `[0.5, 2]` and zero potential.
pub fn random_operator(n: usize, seed: u64) -> SchrodingerOperator {
    let tree = generate(TreeKind::RandomPruefer, n, WeightLaw::Uniform { a: 0.5, b: 2.0 }, seed)
        .expect("bench sizes are valid");
    assemble(tree, &Potential::zeros(n)).expect("potential matches tree")
}
