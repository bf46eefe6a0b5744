//! Newick reading and writing.
//!
//! Supported grammar: nested parentheses, comma-separated children, node
//! names (bare or single-quoted with `''` as an escaped quote), `:length`
//! branch lengths, `[...]` comments anywhere whitespace is allowed, and one
//! or more `;`-terminated trees per input. Comments that follow a node are
//! kept on it so `[&height=x]` annotations can be read back.
//!
//! The parser is iterative, so nesting depth is bounded only by memory.

use thiserror::Error;

use crate::tree::{MergeTree, NodeId, PhyloTree, RawNode, TreeError};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NewickNode {
    pub name: Option<String>,
    pub branch_length: Option<f64>,
    pub children: Vec<NewickNode>,
    /// Bodies of the comments that trail this node, without brackets.
    pub comments: Vec<String>,
}

// Iterative so that deeply nested input cannot exhaust the stack.
impl Drop for NewickNode {
    fn drop(&mut self) {
        let mut stack = std::mem::take(&mut self.children);
        while let Some(mut node) = stack.pop() {
            stack.append(&mut node.children);
        }
    }
}

impl NewickNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Value of `key` in an `[&key=value,...]` comment.
    pub fn annotation(&self, key: &str) -> Option<&str> {
        self.comments.iter().find_map(|c| {
            c.strip_prefix('&')?.split(',').find_map(|kv| {
                let (k, v) = kv.split_once('=')?;
                (k.trim() == key).then(|| v.trim())
            })
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NewickError {
    #[error("syntax error at byte {position}: expected {expected}")]
    SyntaxError {
        position: usize,
        expected: &'static str,
    },
    #[error("unterminated quoted name starting at byte {position}")]
    UnterminatedQuote { position: usize },
    #[error("missing ';' at end of input (byte {position})")]
    MissingSemicolon { position: usize },
    #[error("negative branch length at byte {position}")]
    NegativeBranchLength { position: usize },
    #[error("input is not valid UTF-8 (byte {position})")]
    InvalidUtf8 { position: usize },
    #[error("leaf without a name")]
    UnnamedLeaf,
    #[error("tree is not ultrametric: leaf depths range over [{min}, {max}]")]
    NotUltrametric { min: f64, max: f64 },
    #[error("node {node} has no [&height=...] annotation")]
    MissingHeightAnnotation { node: String },
    #[error("node {node} has an unreadable height annotation {value:?}")]
    BadHeightAnnotation { node: String, value: String },
    #[error("node {node} has no branch length")]
    MissingBranchLength { node: String },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

impl NewickError {
    /// Byte offset for errors raised while reading text.
    pub fn position(&self) -> Option<usize> {
        match *self {
            NewickError::SyntaxError { position, .. }
            | NewickError::UnterminatedQuote { position }
            | NewickError::MissingSemicolon { position }
            | NewickError::NegativeBranchLength { position }
            | NewickError::InvalidUtf8 { position } => Some(position),
            _ => None,
        }
    }

    /// True for errors in the text itself rather than in the tree it
    /// describes.
    pub fn is_syntax(&self) -> bool {
        self.position().is_some()
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

fn is_delim(b: u8) -> bool {
    matches!(b, b'(' | b')' | b'[' | b']' | b'\'' | b':' | b';' | b',') || b.is_ascii_whitespace()
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn syntax(&self, expected: &'static str) -> NewickError {
        NewickError::SyntaxError {
            position: self.pos,
            expected,
        }
    }

    /// Skips whitespace and comments, collecting comment bodies.
    fn skip(&mut self, comments: &mut Option<&mut Vec<String>>) -> Result<(), NewickError> {
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'[') => {
                    let start = self.pos;
                    let end = self.src[start + 1..]
                        .find(']')
                        .map(|i| start + 1 + i)
                        .ok_or(NewickError::SyntaxError {
                            position: self.bytes.len(),
                            expected: "']' closing comment",
                        })?;
                    if let Some(out) = comments.as_deref_mut() {
                        out.push(self.src[start + 1..end].to_owned());
                    }
                    self.pos = end + 1;
                }
                _ => return Ok(()),
            }
        }
    }

    fn quoted(&mut self) -> Result<String, NewickError> {
        let start = self.pos;
        self.pos += 1;
        let mut out = String::new();
        loop {
            let rest = &self.src[self.pos..];
            match rest.find('\'') {
                None => return Err(NewickError::UnterminatedQuote { position: start }),
                Some(i) => {
                    out.push_str(&rest[..i]);
                    self.pos += i + 1;
                    if self.peek() == Some(b'\'') {
                        out.push('\'');
                        self.pos += 1;
                    } else {
                        return Ok(out);
                    }
                }
            }
        }
    }

    fn bare_token(&mut self) -> &'a str {
        let start = self.pos;
        while let Some(b) = self.peek() {
            if is_delim(b) {
                break;
            }
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    /// `[name] [:length]` with comments anywhere in between.
    fn trailer(&mut self, node: &mut NewickNode) -> Result<(), NewickError> {
        self.skip(&mut Some(&mut node.comments))?;
        match self.peek() {
            Some(b'\'') => node.name = Some(self.quoted()?),
            Some(b) if !is_delim(b) => node.name = Some(self.bare_token().to_owned()),
            _ => {}
        }
        self.skip(&mut Some(&mut node.comments))?;
        if self.peek() == Some(b':') {
            self.pos += 1;
            self.skip(&mut Some(&mut node.comments))?;
            let at = self.pos;
            let tok = self.bare_token();
            if tok.is_empty() {
                return Err(NewickError::SyntaxError {
                    position: at,
                    expected: "branch length",
                });
            }
            let len: f64 = match tok.parse() {
                Ok(v) if f64::is_finite(v) => v,
                _ => {
                    return Err(NewickError::SyntaxError {
                        position: at,
                        expected: "finite number",
                    })
                }
            };
            if len < 0.0 {
                return Err(NewickError::NegativeBranchLength { position: at });
            }
            node.branch_length = Some(len);
            self.skip(&mut Some(&mut node.comments))?;
        }
        Ok(())
    }

    fn tree(&mut self) -> Result<NewickNode, NewickError> {
        // Children collected so far for every open parenthesis.
        let mut open: Vec<Vec<NewickNode>> = Vec::new();
        'node: loop {
            self.skip(&mut None)?;
            match self.peek() {
                Some(b'(') => {
                    self.pos += 1;
                    open.push(Vec::new());
                    continue 'node;
                }
                None => return Err(self.syntax("tree node")),
                Some(_) => {}
            }
            let mut done = NewickNode::default();
            self.trailer(&mut done)?;
            loop {
                let Some(children) = open.last_mut() else {
                    return Ok(done);
                };
                match self.peek() {
                    Some(b',') => {
                        self.pos += 1;
                        children.push(done);
                        continue 'node;
                    }
                    Some(b')') => {
                        self.pos += 1;
                        children.push(done);
                        let children = open.pop().expect("nonempty");
                        done = NewickNode {
                            name: None,
                            branch_length: None,
                            children,
                            comments: Vec::new(),
                        };
                        self.trailer(&mut done)?;
                    }
                    _ => return Err(self.syntax("',' or ')'")),
                }
            }
        }
    }

    fn all(&mut self) -> Result<Vec<NewickNode>, NewickError> {
        let mut trees = Vec::new();
        loop {
            self.skip(&mut None)?;
            if self.peek().is_none() {
                if trees.is_empty() {
                    return Err(self.syntax("tree"));
                }
                return Ok(trees);
            }
            let t = self.tree()?;
            match self.peek() {
                Some(b';') => self.pos += 1,
                None => return Err(NewickError::MissingSemicolon { position: self.pos }),
                Some(_) => return Err(self.syntax("';'")),
            }
            trees.push(t);
        }
    }
}

/// Parses every `;`-terminated tree in `text`.
pub fn parse_newick(text: &str) -> Result<Vec<NewickNode>, NewickError> {
    Parser {
        src: text,
        bytes: text.as_bytes(),
        pos: 0,
    }
    .all()
}

/// [`parse_newick`] over raw bytes; invalid UTF-8 is a positioned error.
pub fn parse_newick_bytes(bytes: &[u8]) -> Result<Vec<NewickNode>, NewickError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_newick(text),
        Err(e) => Err(NewickError::InvalidUtf8 {
            position: e.valid_up_to(),
        }),
    }
}

/// How node heights are derived from a parsed tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeightConvention {
    /// `height = -(distance from the root)`; root at 0.
    #[default]
    DepthNegative,
    /// Requires equal root-to-leaf lengths (within `1e-9`); leaves at 0.
    LeafZeroUltrametric,
    /// Heights read from `[&height=x]` on every node.
    ExplicitHeights,
}

const ULTRAMETRIC_TOLERANCE: f64 = 1e-9;

fn describe(node: &NewickNode, ordinal: usize) -> String {
    match &node.name {
        Some(n) if !n.is_empty() => format!("{n:?}"),
        _ => format!("#{ordinal} (preorder)"),
    }
}

/// Converts a parse tree into a labeled merge tree.
pub fn to_phylo(root: &NewickNode, convention: HeightConvention) -> Result<PhyloTree, NewickError> {
    // Flatten in preorder: (node, parent index).
    let mut flat: Vec<(&NewickNode, Option<usize>)> = Vec::new();
    let mut stack = vec![(root, None)];
    while let Some((node, parent)) = stack.pop() {
        let id = flat.len();
        flat.push((node, parent));
        for c in node.children.iter().rev() {
            stack.push((c, Some(id)));
        }
    }

    let mut heights = vec![0.0f64; flat.len()];
    match convention {
        HeightConvention::DepthNegative | HeightConvention::LeafZeroUltrametric => {
            let mut depth = vec![0.0f64; flat.len()];
            for (i, &(node, parent)) in flat.iter().enumerate() {
                if let Some(p) = parent {
                    let len = node.branch_length.ok_or_else(|| NewickError::MissingBranchLength {
                        node: describe(node, i),
                    })?;
                    depth[i] = depth[p] + len;
                }
            }
            if convention == HeightConvention::DepthNegative {
                for (h, d) in heights.iter_mut().zip(&depth) {
                    *h = 0.0 - d;
                }
            } else {
                let leaf_depths = flat
                    .iter()
                    .zip(&depth)
                    .filter(|((n, _), _)| n.is_leaf())
                    .map(|(_, &d)| d);
                let (min, max) = leaf_depths
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d), hi.max(d)));
                if max - min > ULTRAMETRIC_TOLERANCE {
                    return Err(NewickError::NotUltrametric { min, max });
                }
                for (i, &(node, _)) in flat.iter().enumerate() {
                    heights[i] = if node.is_leaf() { 0.0 } else { max - depth[i] };
                }
            }
        }
        HeightConvention::ExplicitHeights => {
            for (i, &(node, _)) in flat.iter().enumerate() {
                let raw = node.annotation("height").ok_or_else(|| {
                    NewickError::MissingHeightAnnotation {
                        node: describe(node, i),
                    }
                })?;
                heights[i] = raw
                    .parse::<f64>()
                    .ok()
                    .filter(|h| h.is_finite())
                    .ok_or_else(|| NewickError::BadHeightAnnotation {
                        node: describe(node, i),
                        value: raw.to_owned(),
                    })?;
            }
        }
    }

    let mut raw = Vec::with_capacity(flat.len());
    for (i, &(node, parent)) in flat.iter().enumerate() {
        let name = if node.is_leaf() {
            match node.name.as_deref() {
                Some(n) if !n.is_empty() => Some(n.to_owned()),
                _ => return Err(NewickError::UnnamedLeaf),
            }
        } else {
            None
        };
        raw.push(RawNode {
            height: heights[i],
            parent,
            name,
        });
    }
    Ok(PhyloTree::from_named(MergeTree::build(&raw)?)?)
}

/// Picks [`HeightConvention::ExplicitHeights`] when every node carries a
/// height annotation, [`HeightConvention::DepthNegative`] otherwise.
pub fn detect_convention(root: &NewickNode) -> HeightConvention {
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        if n.annotation("height").is_none() {
            return HeightConvention::DepthNegative;
        }
        stack.extend(&n.children);
    }
    HeightConvention::ExplicitHeights
}

fn needs_quotes(name: &str) -> bool {
    name.bytes().any(is_delim)
}

fn push_name(out: &mut String, name: &str) {
    if needs_quotes(name) {
        out.push('\'');
        out.push_str(&name.replace('\'', "''"));
        out.push('\'');
    } else {
        out.push_str(name);
    }
}

/// Canonical Newick with `[&height=x]` on every node and no branch lengths.
/// Heights use the shortest representation that reads back exactly.
pub fn serialize(t: &PhyloTree) -> String {
    let tree = t.tree();
    let mut out = String::new();
    enum Step {
        Enter(NodeId),
        Sep,
        Close(NodeId),
    }
    let mut stack = vec![Step::Enter(tree.root())];
    while let Some(step) = stack.pop() {
        match step {
            Step::Enter(v) => {
                let children = tree.children(v);
                if children.is_empty() {
                    push_name(&mut out, tree.node(v).name.as_deref().unwrap_or_default());
                    push_height(&mut out, tree.height(v));
                } else {
                    out.push('(');
                    stack.push(Step::Close(v));
                    for (k, &c) in children.iter().enumerate().rev() {
                        stack.push(Step::Enter(c));
                        if k > 0 {
                            stack.push(Step::Sep);
                        }
                    }
                }
            }
            Step::Sep => out.push(','),
            Step::Close(v) => {
                out.push(')');
                push_height(&mut out, tree.height(v));
            }
        }
    }
    out.push(';');
    out
}

fn push_height(out: &mut String, h: f64) {
    use std::fmt::Write;
    let _ = write!(out, "[&height={h}]");
}
