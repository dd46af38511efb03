//! Seeded tree and potential generators.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::tree::{validate_tree, Potential, RawTree, TreeError, WeightedTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeKind {
    Path,
    Star,
    Caterpillar,
    #[serde(alias = "random")]
    RandomPruefer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightLaw {
    Unit,
    Uniform { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialLaw {
    Zero,
    Uniform { a: f64, b: f64 },
}

impl WeightLaw {
    fn check(&self) -> Result<(), TreeError> {
        match *self {
            WeightLaw::Unit => Ok(()),
            WeightLaw::Uniform { a, b } => {
                if a.is_finite() && b.is_finite() && a > 0.0 && b >= a {
                    Ok(())
                } else {
                    Err(TreeError::BadWeightRange { a, b })
                }
            }
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            WeightLaw::Unit => 1.0,
            WeightLaw::Uniform { a, b } => rng.random_range(a..=b),
        }
    }
}

impl PotentialLaw {
    fn check(&self) -> Result<(), TreeError> {
        match *self {
            PotentialLaw::Zero => Ok(()),
            PotentialLaw::Uniform { a, b } => {
                if a.is_finite() && b.is_finite() && b >= a {
                    Ok(())
                } else {
                    Err(TreeError::BadWeightRange { a, b })
                }
            }
        }
    }
}

/// Builds a tree of the requested shape with `n` vertices.
///
/// The root is always a leaf: vertex 0 for paths and caterpillars, vertex 1
/// for stars (whose centre is vertex 0), and the smallest-index leaf for
/// random trees. Output is a pure function of the arguments.
pub fn generate(kind: TreeKind, n: usize, weights: WeightLaw, seed: u64) -> Result<WeightedTree, TreeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_with(kind, n, weights, &mut rng)
}

/// As [`generate`], drawing from a caller-owned generator.
pub fn generate_with<R: Rng>(
    kind: TreeKind,
    n: usize,
    weights: WeightLaw,
    rng: &mut R,
) -> Result<WeightedTree, TreeError> {
    if n < 2 {
        return Err(TreeError::BadSize(n));
    }
    weights.check()?;

    let (pairs, root) = match kind {
        TreeKind::Path => ((1..n).map(|i| (i - 1, i)).collect(), 0),
        TreeKind::Star => ((1..n).map(|i| (0, i)).collect(), 1),
        TreeKind::Caterpillar => caterpillar(n),
        TreeKind::RandomPruefer => {
            let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
            let pairs = pruefer_decode(&seq, n);
            let mut degree = vec![0usize; n];
            for &(x, y) in &pairs {
                degree[x] += 1;
                degree[y] += 1;
            }
            let root = degree.iter().position(|&d| d == 1).expect("every tree has a leaf");
            (pairs, root)
        }
    };

    let edges = pairs.into_iter().map(|(x, y)| (x, y, weights.sample(rng))).collect();
    validate_tree(&RawTree { n, root, edges })
}

pub fn generate_potential<R: Rng>(n: usize, law: PotentialLaw, rng: &mut R) -> Result<Potential, TreeError> {
    law.check()?;
    let values = match law {
        PotentialLaw::Zero => vec![0.0; n],
        PotentialLaw::Uniform { a, b } => (0..n).map(|_| rng.random_range(a..=b)).collect(),
    };
    Potential::new(values)
}

/// Tree and potential from one generator seeded with `seed`. The tree equals
/// `generate(kind, n, weights, seed)`.
pub fn generate_instance(
    kind: TreeKind,
    n: usize,
    weights: WeightLaw,
    potential: PotentialLaw,
    seed: u64,
) -> Result<(WeightedTree, Potential), TreeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tree = generate_with(kind, n, weights, &mut rng)?;
    let potential = generate_potential(n, potential, &mut rng)?;
    Ok((tree, potential))
}

/// Spine `0..s` with the remaining vertices hung off the interior spine
/// vertices round-robin, so vertex 0 stays a leaf.
fn caterpillar(n: usize) -> (Vec<(usize, usize)>, usize) {
    let spine = (n.div_ceil(2)).max(2);
    let mut pairs: Vec<(usize, usize)> = (1..spine).map(|i| (i - 1, i)).collect();
    let interior = spine.saturating_sub(2).max(1);
    for (k, leg) in (spine..n).enumerate() {
        // With a two-vertex spine the only choice is vertex 1.
        let anchor = if spine > 2 { 1 + k % interior } else { 1 };
        pairs.push((anchor, leg));
    }
    (pairs, 0)
}

/// Decodes a Prüfer sequence of length `n - 2` into the edge list of the
/// labelled tree it encodes.
pub fn pruefer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    assert_eq!(seq.len() + 2, n, "Prüfer sequence must have length n - 2");
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> = (0..n).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let Reverse(leaf) = leaves.pop().expect("a leaf always exists");
        edges.push((leaf, s));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.push(Reverse(s));
        }
    }
    let Reverse(a) = leaves.pop().expect("two vertices remain");
    let Reverse(b) = leaves.pop().expect("two vertices remain");
    edges.push((a, b));
    edges
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawParseError(pub String);

impl fmt::Display for LawParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for LawParseError {}

fn parse_uniform(s: &str) -> Option<(f64, f64)> {
    let rest = s.strip_prefix("uniform:")?;
    let (a, b) = rest.split_once(':')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

impl FromStr for TreeKind {
    type Err = LawParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "path" => Ok(TreeKind::Path),
            "star" => Ok(TreeKind::Star),
            "caterpillar" => Ok(TreeKind::Caterpillar),
            "random" | "random_pruefer" => Ok(TreeKind::RandomPruefer),
            other => Err(LawParseError(format!(
                "unknown tree kind `{other}`, expected path|star|caterpillar|random"
            ))),
        }
    }
}

impl FromStr for WeightLaw {
    type Err = LawParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "unit" {
            return Ok(WeightLaw::Unit);
        }
        let (a, b) = parse_uniform(s)
            .ok_or_else(|| LawParseError(format!("bad weight law `{s}`, expected unit|uniform:a:b")))?;
        let law = WeightLaw::Uniform { a, b };
        law.check().map_err(|e| LawParseError(e.to_string()))?;
        Ok(law)
    }
}

impl FromStr for PotentialLaw {
    type Err = LawParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "zero" {
            return Ok(PotentialLaw::Zero);
        }
        let (a, b) = parse_uniform(s)
            .ok_or_else(|| LawParseError(format!("bad potential law `{s}`, expected zero|uniform:a:b")))?;
        let law = PotentialLaw::Uniform { a, b };
        law.check().map_err(|e| LawParseError(e.to_string()))?;
        Ok(law)
    }
}

impl fmt::Display for TreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeKind::Path => "path",
            TreeKind::Star => "star",
            TreeKind::Caterpillar => "caterpillar",
            TreeKind::RandomPruefer => "random",
        })
    }
}

impl fmt::Display for WeightLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightLaw::Unit => f.write_str("unit"),
            WeightLaw::Uniform { a, b } => write!(f, "uniform:{a}:{b}"),
        }
    }
}

impl fmt::Display for PotentialLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialLaw::Zero => f.write_str("zero"),
            PotentialLaw::Uniform { a, b } => write!(f, "uniform:{a}:{b}"),
        }
    }
}
