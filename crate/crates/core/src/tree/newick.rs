//! Newick reading and writing.
//!
//! Unrooted trees are written from an arbitrary internal vertex. A root of
//! degree two in the input is suppressed, so `((a,b),(c,d));` and
//! `(a,b,(c,d));` parse to the same unrooted tree. Missing branch lengths
//! read as `0`. Internal node labels are accepted and discarded.

use std::fmt::Write;

use super::{PhyloTree, TreeBuilder};
use crate::error::{NewickError, Result};

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    builder: TreeBuilder,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, NewickError> {
        Err(NewickError {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn label(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() {
            let c = self.text[self.pos];
            if c.is_ascii_alphanumeric() || matches!(c, b'_' | b'.' | b'-') {
                self.pos += 1;
            } else {
                break;
            }
        }
        String::from_utf8_lossy(&self.text[start..self.pos]).into_owned()
    }

    fn length(&mut self) -> Result<f64, NewickError> {
        if self.peek() != Some(b':') {
            return Ok(0.0);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() {
            let c = self.text[self.pos];
            if c.is_ascii_digit() || matches!(c, b'.' | b'-' | b'+' | b'e' | b'E') {
                self.pos += 1;
            } else {
                break;
            }
        }
        let token = std::str::from_utf8(&self.text[start..self.pos]).unwrap_or("");
        match token.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => {
                self.pos = start;
                self.err(format!("invalid branch length {token:?}"))
            }
        }
    }

    /// Parses one subtree and returns its vertex and incoming branch length.
    fn subtree(&mut self) -> Result<(usize, f64), NewickError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let node = self.builder.add_internal();
                loop {
                    let (child, len) = self.subtree()?;
                    self.builder.connect(node, child, len);
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return self.err("expected ',' or ')'"),
                    }
                }
                let _internal_label = self.label();
                let len = self.length()?;
                Ok((node, len))
            }
            Some(_) => {
                let name = self.label();
                if name.is_empty() {
                    return self.err("expected a taxon name or '('");
                }
                let node = self.builder.add_leaf(name);
                let len = self.length()?;
                Ok((node, len))
            }
            None => self.err("unexpected end of input"),
        }
    }
}

impl PhyloTree {
    pub fn from_newick(text: &str) -> Result<PhyloTree> {
        let mut p = Parser {
            text: text.as_bytes(),
            pos: 0,
            builder: TreeBuilder::new(),
        };
        if p.peek() != Some(b'(') {
            return Ok(p.err("tree must start with '('")?);
        }
        p.subtree()?;
        if p.peek() != Some(b';') {
            return Ok(p.err("expected ';'")?);
        }
        p.pos += 1;
        if p.peek().is_some() {
            return Ok(p.err("trailing characters after ';'")?);
        }
        p.builder.build()
    }

    /// Newick text rooted at the first internal vertex. Branch lengths use
    /// the shortest decimal form that reads back to the same `f64`.
    pub fn to_newick(&self) -> String {
        let mut out = String::new();
        let root = (0..self.n_nodes()).find(|&v| self.taxon_at(v).is_none());
        match root {
            None => {
                // two leaves joined by a single edge
                let len = self.edges()[0].length;
                let _ = write!(out, "({}:{},{}:0);", self.taxa[0], len, self.taxa[1]);
            }
            Some(root) => {
                self.write_node(root, usize::MAX, &mut out);
                out.push(';');
            }
        }
        out
    }

    fn write_node(&self, v: usize, parent: usize, out: &mut String) {
        if let Some(t) = self.taxon_at(v) {
            out.push_str(&self.taxa[t]);
            return;
        }
        out.push('(');
        let mut first = true;
        for &(w, e) in self.neighbors(v) {
            if w == parent {
                continue;
            }
            if !first {
                out.push(',');
            }
            first = false;
            self.write_node(w, v, out);
            let _ = write!(out, ":{}", self.edges()[e].length);
        }
        out.push(')');
    }
}
