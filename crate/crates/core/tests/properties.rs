use proptest::prelude::*;

use nodaltree::io::{parse_json, to_json};
use nodaltree::nodal::{extend, locate_zeros, Membership};
use nodaltree::verify::{verify_instance, Tolerances};
use nodaltree::{
    assemble, decompose, generate, generate_potential, sign_graphs, Potential, PotentialLaw, TreeKind, WeightLaw,
    WeightedTree, DEFAULT_EPS_Z,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_case(n: usize, seed: u64) -> (WeightedTree, Potential) {
    let tree = generate(TreeKind::RandomPruefer, n, WeightLaw::Uniform { a: 0.5, b: 2.0 }, seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
    let potential = generate_potential(n, PotentialLaw::Uniform { a: -1.0, b: 1.0 }, &mut rng).unwrap();
    (tree, potential)
}

fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    perm
}

/// Number of distinct sign-graph components, ignoring labels.
fn component_count(tree: &WeightedTree, u: &[f64]) -> (usize, usize) {
    let p = sign_graphs(tree, u, DEFAULT_EPS_Z).unwrap();
    (p.sign_graphs.len(), p.zero_graphs.len())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_is_relabeling_invariant(n in 2usize..20, seed in any::<u64>(), pseed in any::<u64>()) {
        let (tree, potential) = random_case(n, seed);
        let perm = permutation(n, pseed);
        let a = decompose(&assemble(tree.clone(), &potential).unwrap()).unwrap();
        let b = decompose(&assemble(tree.relabeled(&perm).unwrap(), &potential.relabeled(&perm)).unwrap()).unwrap();
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            prop_assert!((x - y).abs() <= 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn verdicts_are_relabeling_invariant(n in 2usize..13, seed in any::<u64>(), pseed in any::<u64>()) {
        let (tree, potential) = random_case(n, seed);
        let perm = permutation(n, pseed);
        let tol = Tolerances::default();
        let a = verify_instance(&assemble(tree.clone(), &potential).unwrap(), &tol, 1).unwrap();
        let b = verify_instance(&assemble(tree.relabeled(&perm).unwrap(), &potential.relabeled(&perm)).unwrap(), &tol, 1).unwrap();
        let va: Vec<_> = a.checks.iter().map(|c| (c.check, c.verdict)).collect();
        let vb: Vec<_> = b.checks.iter().map(|c| (c.check, c.verdict)).collect();
        prop_assert_eq!(va, vb);
    }

    #[test]
    fn sign_graphs_scale_and_flip(n in 2usize..30, seed in any::<u64>(), k in 1usize..30, scale in 1e-6f64..1e6) {
        let (tree, potential) = random_case(n, seed);
        let s = decompose(&assemble(tree.clone(), &potential).unwrap()).unwrap();
        let u = s.eigenvector((k - 1) % n).to_vec();
        let base = sign_graphs(&tree, &u, DEFAULT_EPS_Z).unwrap();

        let scaled: Vec<f64> = u.iter().map(|x| x * scale).collect();
        let p = sign_graphs(&tree, &scaled, DEFAULT_EPS_Z).unwrap();
        prop_assert_eq!(&p.sign_graphs, &base.sign_graphs);
        prop_assert_eq!(&p.zero_graphs, &base.zero_graphs);

        let negated: Vec<f64> = u.iter().map(|x| -x).collect();
        let q = sign_graphs(&tree, &negated, DEFAULT_EPS_Z).unwrap();
        prop_assert_eq!(q.sign_graphs.len(), base.sign_graphs.len());
        for (g, h) in q.sign_graphs.iter().zip(&base.sign_graphs) {
            prop_assert_eq!(&g.vertices, &h.vertices);
            prop_assert_eq!(g.sign, h.sign.flip());
        }
        prop_assert_eq!(component_count(&tree, &u), component_count(&tree, &negated));
    }

    #[test]
    fn at_most_one_zero_per_edge(n in 2usize..30, seed in any::<u64>(), values in proptest::collection::vec(-1.0f64..1.0, 30)) {
        let (tree, _) = random_case(n, seed);
        let u = &values[..n];
        let zeros = locate_zeros(&extend(&tree, u).unwrap(), DEFAULT_EPS_Z);
        let mut edges: Vec<_> = zeros.iter().map(|z| z.edge).collect();
        let total = edges.len();
        edges.sort();
        edges.dedup();
        prop_assert_eq!(edges.len(), total);
        for z in &zeros {
            let l = tree.length(z.edge.0, z.edge.1).unwrap();
            prop_assert!(z.t > 0.0 && z.t <= l);
        }
    }

    #[test]
    fn every_vertex_has_one_membership(n in 2usize..30, seed in any::<u64>(), values in proptest::collection::vec(-1.0f64..1.0, 30)) {
        let (tree, _) = random_case(n, seed);
        let p = sign_graphs(&tree, &values[..n], DEFAULT_EPS_Z).unwrap();
        let covered: usize = p.sign_graphs.iter().map(|g| g.vertices.len()).sum::<usize>()
            + p.zero_graphs.iter().map(|g| g.vertices.len()).sum::<usize>();
        prop_assert_eq!(covered, n);
        for (i, g) in p.sign_graphs.iter().enumerate() {
            for v in &g.vertices {
                prop_assert_eq!(p.membership[v.index()], Membership::Sign(i));
            }
        }
    }

    #[test]
    fn json_round_trip(n in 2usize..40, seed in any::<u64>()) {
        let (tree, potential) = random_case(n, seed);
        let text = to_json(&tree, &potential);
        let (t2, p2) = parse_json(&text).unwrap();
        prop_assert_eq!(t2.to_raw(), tree.to_raw());
        prop_assert_eq!(p2.values(), potential.values());
    }
}
