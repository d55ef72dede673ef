//! Line-oriented text format for finite trees and their decorations.
//!
//! ```text
//! tree 4            # vertices are 0..4
//! edge 0 1 2        # undirected edge with optional color
//! edge 1 2 0
//! edge 1 3 1
//! weight 3 1/2      # vertex weight (defaults to 1)
//! arc 0 1           # directed edge, member of the edge set H
//! mark 2            # member of the vertex set S / A / Y
//! subtree 1 2       # one member of a subtree family
//! ```

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use super::{DirectedEdge, EdgeColoring, FiniteTree, SubtreeFamily, TreeError, VertexWeights};
use crate::weight::parse_ratio;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A parsed tree file.
#[derive(Debug, Clone)]
pub struct TreeDocument {
    pub tree: FiniteTree<u32>,
    pub coloring: EdgeColoring<u32>,
    pub weights: VertexWeights<u32>,
    pub arcs: Vec<DirectedEdge<u32>>,
    pub marks: BTreeSet<u32>,
    pub family: SubtreeFamily<u32>,
}

pub fn parse_tree_document(text: &str) -> Result<TreeDocument, FormatError> {
    let mut n: Option<u32> = None;
    let mut edges = Vec::new();
    let mut coloring = EdgeColoring::new();
    let mut weight_lines = Vec::new();
    let mut arcs = Vec::new();
    let mut marks = BTreeSet::new();
    let mut family = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |msg: &str| FormatError::Syntax {
            line,
            msg: msg.to_string(),
        };
        let mut toks = content.split_whitespace();
        let kw = toks.next().unwrap();
        let rest: Vec<&str> = toks.collect();
        let vertex = |s: &str| -> Result<u32, FormatError> {
            let v: u32 = s.parse().map_err(|_| syntax(&format!("bad vertex `{s}`")))?;
            match n {
                Some(n) if v < n => Ok(v),
                Some(_) => Err(syntax(&format!("vertex {v} out of range"))),
                None => Err(syntax("`tree <n>` header must come first")),
            }
        };
        match kw {
            "tree" => {
                if n.is_some() {
                    return Err(syntax("duplicate header"));
                }
                let [count] = rest[..] else {
                    return Err(syntax("expected `tree <n>`"));
                };
                n = Some(count.parse().map_err(|_| syntax("bad vertex count"))?);
            }
            "edge" => {
                if !(2..=3).contains(&rest.len()) {
                    return Err(syntax("expected `edge u v [color]`"));
                }
                let (u, v) = (vertex(rest[0])?, vertex(rest[1])?);
                if let Some(c) = rest.get(2) {
                    coloring.set(&u, &v, c.parse().map_err(|_| syntax("bad color"))?);
                }
                edges.push((u, v));
            }
            "weight" => {
                let [v, w] = rest[..] else {
                    return Err(syntax("expected `weight v num/den`"));
                };
                let v = vertex(v)?;
                let w = parse_ratio(w).map_err(|e| syntax(&e.to_string()))?;
                weight_lines.push((v, w));
            }
            "arc" => {
                let [u, v] = rest[..] else {
                    return Err(syntax("expected `arc u v`"));
                };
                arcs.push(DirectedEdge::new(vertex(u)?, vertex(v)?));
            }
            "mark" => {
                for v in &rest {
                    marks.insert(vertex(v)?);
                }
            }
            "subtree" => {
                family.push(rest.iter().map(|v| vertex(v)).collect::<Result<BTreeSet<_>, _>>()?);
            }
            other => return Err(syntax(&format!("unknown keyword `{other}`"))),
        }
    }
    let n = n.ok_or(FormatError::Syntax {
        line: 0,
        msg: "missing `tree <n>` header".into(),
    })?;
    let tree = FiniteTree::new(0..n, edges)?;
    let mut weights: VertexWeights<u32> = (0..n).map(|v| (v, BigRational::one())).collect();
    weights.extend(weight_lines);
    Ok(TreeDocument {
        tree,
        coloring,
        weights,
        arcs,
        marks,
        family,
    })
}
