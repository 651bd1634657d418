//! graph6 encoding for graphs of order 1..=62.
//!
//! Layout: one order byte `63 + n`, then the upper triangle of the adjacency
//! matrix in column order `x(0,1) x(0,2) x(1,2) x(0,3) ...`, packed six bits
//! per byte (most significant first), zero padded, each byte offset by 63.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::canonical_form;
use crate::graph::{Graph, GraphError, MAX_ORDER};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Graph6Error {
    #[error("empty graph6 string")]
    Empty,
    #[error("malformed order byte {0:#04x}")]
    MalformedHeader(u8),
    #[error("non-printable byte {byte:#04x} at offset {offset}")]
    NonPrintable { byte: u8, offset: usize },
    #[error("graph6 length mismatch: order {order} needs {expected} bytes, found {found}")]
    WrongLength { order: usize, expected: usize, found: usize },
    #[error("nonzero padding bits in final byte")]
    NonzeroPadding,
    #[error(transparent)]
    Order(#[from] GraphError),
}

fn body_len(n: usize) -> usize {
    (n * (n - 1) / 2).div_ceil(6)
}

pub fn encode_graph6(g: &Graph) -> String {
    let n = g.order();
    let mut out = String::with_capacity(1 + body_len(n));
    out.push((63 + n as u8) as char);
    let mut acc = 0u8;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            acc = acc << 1 | g.has_edge(i, j) as u8;
            k += 1;
            if k == 6 {
                out.push((acc + 63) as char);
                acc = 0;
                k = 0;
            }
        }
    }
    if k > 0 {
        out.push(((acc << (6 - k)) + 63) as char);
    }
    out
}

pub fn decode_graph6(text: &str) -> Result<Graph, Graph6Error> {
    let bytes = text.as_bytes();
    let (&head, body) = bytes.split_first().ok_or(Graph6Error::Empty)?;
    if !(63..=126).contains(&head) {
        return Err(Graph6Error::MalformedHeader(head));
    }
    if head == 126 {
        // multi-byte order headers encode n >= 63
        return Err(Graph6Error::Order(GraphError::OrderOutOfRange(63)));
    }
    let n = (head - 63) as usize;
    if n == 0 || n > MAX_ORDER {
        return Err(Graph6Error::Order(GraphError::OrderOutOfRange(n)));
    }
    if let Some(offset) = body.iter().position(|b| !(63..=126).contains(b)) {
        return Err(Graph6Error::NonPrintable { byte: body[offset], offset: offset + 1 });
    }
    let expected = body_len(n);
    if body.len() != expected {
        return Err(Graph6Error::WrongLength { order: n, expected, found: body.len() });
    }
    let bits = n * (n - 1) / 2;
    if !bits.is_multiple_of(6) {
        let last = body[expected - 1] - 63;
        let pad = 6 - bits % 6;
        if last & ((1 << pad) - 1) != 0 {
            return Err(Graph6Error::NonzeroPadding);
        }
    }
    let mut g = Graph::empty(n)?;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = body[k / 6] - 63;
            if byte >> (5 - k % 6) & 1 == 1 {
                g.add_edge(i, j);
            }
            k += 1;
        }
    }
    Ok(g)
}

/// graph6 text of a canonical form: the identity of an isomorphism class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Signature(String);

impl Signature {
    /// Signature of the isomorphism class of `g`.
    pub fn of(g: &Graph) -> Signature {
        Signature(encode_graph6(&canonical_form(g).0))
    }

    /// Wraps `g`'s encoding without canonicalising; `g` must already be canonical.
    pub fn of_canonical(g: &Graph) -> Signature {
        Signature(encode_graph6(g))
    }

    /// Parses graph6 text. The text must decode; it is not required to be canonical.
    pub fn parse(text: &str) -> Result<Signature, Graph6Error> {
        decode_graph6(text)?;
        Ok(Signature(text.to_owned()))
    }

    pub fn decode(&self) -> Graph {
        decode_graph6(&self.0).expect("signature text always decodes")
    }

    /// Order encoded in the header byte.
    pub fn order(&self) -> usize {
        (self.0.as_bytes()[0] - 63) as usize
    }

    pub fn is_canonical(&self) -> bool {
        Signature::of(&self.decode()) == *self
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Signature {
    type Err = Graph6Error;

    fn from_str(s: &str) -> Result<Signature, Graph6Error> {
        Signature::parse(s)
    }
}

impl TryFrom<String> for Signature {
    type Error = Graph6Error;

    fn try_from(s: String) -> Result<Signature, Graph6Error> {
        decode_graph6(&s)?;
        Ok(Signature(s))
    }
}

impl From<Signature> for String {
    fn from(s: Signature) -> String {
        s.0
    }
}
