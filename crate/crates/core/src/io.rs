//! Text formats for a tree together with its potential.
//!
//! JSON: `{"n": N, "root": r, "edges": [[x, y, c], ...], "potential": [...]}`.
//! DOT: an undirected graph whose edge labels are the weights `c` and whose
//! vertex labels are `r=<value>`; the root is stored as the graph attribute
//! `root`. Floats are written in shortest round-trip form, so parsing what
//! was written reproduces every weight and potential bit-for-bit.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::tree::{validate_tree, Potential, RawTree, TreeError, WeightedTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeFormat {
    Json,
    Dot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub n: usize,
    pub root: usize,
    pub edges: Vec<(usize, usize, f64)>,
    #[serde(default)]
    pub potential: Option<Vec<f64>>,
}

impl TreeDocument {
    pub fn new(tree: &WeightedTree, potential: &Potential) -> Self {
        let raw = tree.to_raw();
        TreeDocument {
            n: raw.n,
            root: raw.root,
            edges: raw.edges,
            potential: Some(potential.values().to_vec()),
        }
    }

    /// Validates the document; a missing potential means `r = 0`.
    pub fn into_parts(self) -> Result<(WeightedTree, Potential), TreeError> {
        let tree = validate_tree(&RawTree {
            n: self.n,
            root: self.root,
            edges: self.edges,
        })?;
        let potential = match self.potential {
            Some(values) => Potential::new(values)?,
            None => Potential::zeros(tree.vertex_count()),
        };
        potential.check_against(&tree)?;
        Ok((tree, potential))
    }
}

pub fn serialize(tree: &WeightedTree, potential: &Potential, format: TreeFormat) -> String {
    match format {
        TreeFormat::Json => to_json(tree, potential),
        TreeFormat::Dot => to_dot(tree, potential),
    }
}

/// Parses either format, picking by the first non-blank character.
pub fn parse(text: &str) -> Result<(WeightedTree, Potential), TreeError> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_dot(text)
    }
}

pub fn to_json(tree: &WeightedTree, potential: &Potential) -> String {
    serde_json::to_string_pretty(&TreeDocument::new(tree, potential)).expect("tree documents always serialize")
}

pub fn parse_json(text: &str) -> Result<(WeightedTree, Potential), TreeError> {
    let doc: TreeDocument = serde_json::from_str(text).map_err(|e| TreeError::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    doc.into_parts()
}

pub fn to_dot(tree: &WeightedTree, potential: &Potential) -> String {
    let mut out = String::from("graph tree {\n");
    let _ = writeln!(out, "  graph [root=\"{}\"];", tree.root());
    for (v, r) in potential.values().iter().enumerate() {
        let _ = writeln!(out, "  {v} [label=\"r={r:?}\"];");
    }
    for e in tree.edges() {
        let _ = writeln!(out, "  {} -- {} [label=\"{:?}\"];", e.parent(), e.child(), e.weight());
    }
    out.push_str("}\n");
    out
}

/// Reads back the DOT subset written by [`to_dot`].
pub fn parse_dot(text: &str) -> Result<(WeightedTree, Potential), TreeError> {
    let err = |line: usize, message: String| TreeError::Parse {
        location: format!("line {line}"),
        message,
    };

    let mut root = None;
    let mut vertices: Vec<(usize, f64)> = Vec::new();
    let mut edges = Vec::new();
    let mut opened = false;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with("//") {
            continue;
        }
        if !opened {
            if line.starts_with("graph") && line.ends_with('{') {
                opened = true;
                continue;
            }
            return Err(err(lineno, format!("expected `graph <name> {{`, found `{line}`")));
        }
        if line == "}" {
            break;
        }
        let stmt = line
            .strip_suffix(';')
            .ok_or_else(|| err(lineno, "statement must end with `;`".into()))?;
        let (head, label) = split_label(stmt).ok_or_else(|| err(lineno, "missing label attribute".into()))?;

        if head == "graph" {
            let value = attr_value(label, "root").ok_or_else(|| err(lineno, "graph attribute must be root".into()))?;
            root = Some(value.parse::<usize>().map_err(|e| err(lineno, format!("root: {e}")))?);
        } else if let Some((x, y)) = head.split_once("--") {
            let x = parse_index(x).map_err(|m| err(lineno, m))?;
            let y = parse_index(y).map_err(|m| err(lineno, m))?;
            let c = attr_value(label, "label").ok_or_else(|| err(lineno, "edge needs a label".into()))?;
            let c: f64 = c.parse().map_err(|e| err(lineno, format!("edge weight `{c}`: {e}")))?;
            edges.push((x, y, c));
        } else {
            let v = parse_index(head).map_err(|m| err(lineno, m))?;
            let value = attr_value(label, "label")
                .and_then(|l| l.strip_prefix("r="))
                .ok_or_else(|| err(lineno, "vertex label must read r=<value>".into()))?;
            let r: f64 = value
                .parse()
                .map_err(|e| err(lineno, format!("potential `{value}`: {e}")))?;
            vertices.push((v, r));
        }
    }
    if !opened {
        return Err(err(1, "empty document".into()));
    }

    let n = vertices.len();
    let mut values = vec![f64::NAN; n];
    for &(v, r) in &vertices {
        if v >= n {
            return Err(TreeError::VertexOutOfRange { vertex: v, n });
        }
        values[v] = r;
    }
    let root = root.ok_or_else(|| err(1, "missing `graph [root=...]`".into()))?;
    let tree = validate_tree(&RawTree { n, root, edges })?;
    let potential = Potential::new(values)?;
    Ok((tree, potential))
}

fn split_label(stmt: &str) -> Option<(&str, &str)> {
    let open = stmt.find('[')?;
    let inner = stmt[open + 1..].strip_suffix(']')?;
    Some((stmt[..open].trim(), inner.trim()))
}

fn attr_value<'a>(attrs: &'a str, key: &str) -> Option<&'a str> {
    let rest = attrs.strip_prefix(key)?.trim_start().strip_prefix('=')?.trim();
    rest.strip_prefix('"')?.strip_suffix('"')
}

fn parse_index(s: &str) -> Result<usize, String> {
    let s = s.trim().trim_matches('"');
    s.parse().map_err(|_| format!("`{s}` is not a vertex index"))
}
