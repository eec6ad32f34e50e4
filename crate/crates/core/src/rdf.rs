// Copyright 2026 The rdfvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! RDF terms, quads and datasets, with an N-Quads reader and the canonical
//! N-Quads writer used for hashing and storage.
//!
//! Terms are compared syntactically: IRIs by exact string, literals by lexical
//! form, datatype and language tag. No value-space normalization happens.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("invalid IRI {0:?}: must be non-empty without whitespace or angle brackets")]
    InvalidIri(String),
    #[error("invalid blank node label {0:?}")]
    InvalidBlankNode(String),
    #[error("invalid language tag {0:?}")]
    InvalidLanguage(String),
    #[error("literal in subject position")]
    LiteralSubject,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("input is not valid UTF-8 (byte offset {0})")]
    Utf8(usize),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("dataset is not normalized: blank node label {0:?} is not canonical")]
pub struct NotNormalized(pub String);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(String);

impl Iri {
    pub fn new(iri: impl Into<String>) -> Result<Self, TermError> {
        let iri = iri.into();
        let bad = iri.is_empty()
            || iri
                .chars()
                .any(|c| c.is_whitespace() || c == '<' || c == '>');
        if bad {
            return Err(TermError::InvalidIri(iri));
        }
        Ok(Iri(iri))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlankNode(String);

impl BlankNode {
    pub fn new(label: impl Into<String>) -> Result<Self, TermError> {
        let label = label.into();
        if !is_valid_label(&label) {
            return Err(TermError::InvalidBlankNode(label));
        }
        Ok(BlankNode(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// N-Quads blank node labels: a letter, digit or underscore first, then any of
/// those plus `-` and `.`, never ending in `.`.
fn is_valid_label(label: &str) -> bool {
    let mut chars = label.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    if !(first.is_alphanumeric() || first == '_') {
        return false;
    }
    if label.ends_with('.') {
        return false;
    }
    chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
    language: Option<String>,
}

impl Literal {
    /// A plain literal, typed `xsd:string`.
    pub fn simple(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: Iri(XSD_STRING.to_owned()),
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype,
            language: None,
        }
    }

    pub fn lang_tagged(
        lexical: impl Into<String>,
        language: impl Into<String>,
    ) -> Result<Self, TermError> {
        let language = language.into();
        if !is_valid_language(&language) {
            return Err(TermError::InvalidLanguage(language));
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype: Iri(RDF_LANG_STRING.to_owned()),
            language: Some(language),
        })
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }
}

fn is_valid_language(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let Some(primary) = parts.next() else {
        return false;
    };
    !primary.is_empty()
        && primary.chars().all(|c| c.is_ascii_alphabetic())
        && parts.all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    BlankNode(BlankNode),
    Literal(Literal),
}

impl Term {
    pub fn iri(iri: &str) -> Result<Self, TermError> {
        Iri::new(iri).map(Term::Iri)
    }

    pub fn blank(label: &str) -> Result<Self, TermError> {
        BlankNode::new(label).map(Term::BlankNode)
    }

    pub fn as_blank(&self) -> Option<&BlankNode> {
        match self {
            Term::BlankNode(b) => Some(b),
            _ => None,
        }
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::BlankNode(_))
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<BlankNode> for Term {
    fn from(b: BlankNode) -> Self {
        Term::BlankNode(b)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GraphName {
    Default,
    Named(Iri),
}

/// A statement with graph context. The subject is an IRI or blank node, the
/// predicate an IRI, the graph either an IRI or the default graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quad {
    subject: Term,
    predicate: Iri,
    object: Term,
    graph: GraphName,
}

impl Quad {
    pub fn new(
        subject: impl Into<Term>,
        predicate: Iri,
        object: impl Into<Term>,
        graph: GraphName,
    ) -> Result<Self, TermError> {
        let subject = subject.into();
        if matches!(subject, Term::Literal(_)) {
            return Err(TermError::LiteralSubject);
        }
        Ok(Quad {
            subject,
            predicate,
            object: object.into(),
            graph,
        })
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Iri {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    pub fn graph(&self) -> &GraphName {
        &self.graph
    }

    pub fn is_ground(&self) -> bool {
        !self.subject.is_blank() && !self.object.is_blank()
    }

    /// Blank nodes in subject and object position, in that order.
    pub fn blank_nodes(&self) -> impl Iterator<Item = &BlankNode> {
        self.subject
            .as_blank()
            .into_iter()
            .chain(self.object.as_blank())
    }

    /// Rewrites every blank node through `f`, keeping all other terms.
    pub fn map_blank_nodes(&self, mut f: impl FnMut(&BlankNode) -> BlankNode) -> Quad {
        let mut map = |t: &Term| match t {
            Term::BlankNode(b) => Term::BlankNode(f(b)),
            other => other.clone(),
        };
        Quad {
            subject: map(&self.subject),
            predicate: self.predicate.clone(),
            object: map(&self.object),
            graph: self.graph.clone(),
        }
    }
}

impl fmt::Display for Quad {
    /// One N-Quads statement in canonical form, without the line terminator.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut line = String::new();
        write_quad(&mut line, self);
        f.write_str(&line)
    }
}

/// A set of quads. Blank node labels are scoped to the whole dataset.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Dataset {
    quads: BTreeSet<Quad>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, quad: Quad) -> bool {
        self.quads.insert(quad)
    }

    pub fn remove(&mut self, quad: &Quad) -> bool {
        self.quads.remove(quad)
    }

    pub fn contains(&self, quad: &Quad) -> bool {
        self.quads.contains(quad)
    }

    pub fn len(&self) -> usize {
        self.quads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quads.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Quad> {
        self.quads.iter()
    }
}

impl FromIterator<Quad> for Dataset {
    fn from_iter<I: IntoIterator<Item = Quad>>(iter: I) -> Self {
        Dataset {
            quads: iter.into_iter().collect(),
        }
    }
}

impl IntoIterator for Dataset {
    type Item = Quad;
    type IntoIter = std::collections::btree_set::IntoIter<Quad>;

    fn into_iter(self) -> Self::IntoIter {
        self.quads.into_iter()
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a Quad;
    type IntoIter = std::collections::btree_set::Iter<'a, Quad>;

    fn into_iter(self) -> Self::IntoIter {
        self.quads.iter()
    }
}

impl Extend<Quad> for Dataset {
    fn extend<I: IntoIterator<Item = Quad>>(&mut self, iter: I) {
        self.quads.extend(iter)
    }
}

// ---------------------------------------------------------------------------
// Canonical writer

/// Serializes a normalized dataset: one line per quad, lines sorted as byte
/// strings, each terminated by `\n`.
pub fn serialize_canonical(dataset: &Dataset) -> Result<Vec<u8>, NotNormalized> {
    for quad in dataset {
        for b in quad.blank_nodes() {
            if !is_normalized_label(b.as_str()) {
                return Err(NotNormalized(b.as_str().to_owned()));
            }
        }
    }
    Ok(sorted_lines(dataset.iter()))
}

/// Sorted canonical lines for any quads, without checking blank labels.
pub(crate) fn sorted_lines<'a>(quads: impl Iterator<Item = &'a Quad>) -> Vec<u8> {
    let mut lines: Vec<String> = quads.map(|q| q.to_string()).collect();
    lines.sort_unstable();
    join_lines(&lines)
}

pub(crate) fn join_lines<S: AsRef<str>>(lines: &[S]) -> Vec<u8> {
    let len = lines.iter().map(|l| l.as_ref().len() + 1).sum();
    let mut out = Vec::with_capacity(len);
    for line in lines {
        out.extend_from_slice(line.as_ref().as_bytes());
        out.push(b'\n');
    }
    out
}

/// Dataset-level canonical labels look like `c<hex>x<index>`; class-level ones
/// like `c<index>`.
pub fn is_normalized_label(label: &str) -> bool {
    let Some(rest) = label.strip_prefix('c') else {
        return false;
    };
    match rest.split_once('x') {
        Some((hash, index)) => {
            hash.len() >= 16
                && hash.len() <= 64
                && hash.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
                && is_decimal(index)
        }
        None => is_decimal(rest),
    }
}

fn is_decimal(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'))
}

pub(crate) fn write_quad(out: &mut String, quad: &Quad) {
    write_term(out, &quad.subject);
    out.push(' ');
    write_iri(out, &quad.predicate);
    out.push(' ');
    write_term(out, &quad.object);
    if let GraphName::Named(g) = &quad.graph {
        out.push(' ');
        write_iri(out, g);
    }
    out.push_str(" .");
}

pub(crate) fn write_term(out: &mut String, term: &Term) {
    match term {
        Term::Iri(iri) => write_iri(out, iri),
        Term::BlankNode(b) => {
            out.push_str("_:");
            out.push_str(&b.0);
        }
        Term::Literal(l) => {
            out.push('"');
            for c in l.lexical.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\r' => out.push_str("\\r"),
                    c if (c as u32) < 0x20 || c == '\u{7F}' => push_uescape(out, c),
                    c => out.push(c),
                }
            }
            out.push('"');
            if let Some(lang) = &l.language {
                out.push('@');
                out.push_str(lang);
            } else if l.datatype.0 != XSD_STRING {
                out.push_str("^^");
                write_iri(out, &l.datatype);
            }
        }
    }
}

pub(crate) fn write_iri(out: &mut String, iri: &Iri) {
    out.push('<');
    for c in iri.0.chars() {
        match c {
            '"' | '{' | '}' | '|' | '^' | '`' | '\\' => push_uescape(out, c),
            c if (c as u32) <= 0x20 || c == '\u{7F}' => push_uescape(out, c),
            c => out.push(c),
        }
    }
    out.push('>');
}

fn push_uescape(out: &mut String, c: char) {
    let _ = write!(out, "\\u{:04X}", c as u32);
}

// ---------------------------------------------------------------------------
// Reader

/// Parses N-Quads. Duplicate statements collapse; blank node labels are kept
/// as written.
pub fn parse_nquads(bytes: &[u8]) -> Result<Dataset, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ParseError::Utf8(e.valid_up_to()))?;
    let mut dataset = Dataset::new();
    for (idx, line) in text.lines().enumerate() {
        if let Some(quad) = parse_line(line).map_err(|message| ParseError::Syntax {
            line: idx + 1,
            message,
        })? {
            dataset.insert(quad);
        }
    }
    Ok(dataset)
}

/// Parses one N-Quads line. Returns `None` for blank or comment-only lines.
pub fn parse_line(line: &str) -> Result<Option<Quad>, String> {
    let mut cur = Cursor { src: line, pos: 0 };
    cur.skip_ws();
    if cur.at_end_or_comment() {
        return Ok(None);
    }
    let subject = match cur.term()? {
        Term::Literal(_) => return Err("literal in subject position".into()),
        t => t,
    };
    cur.skip_ws();
    let predicate = match cur.term()? {
        Term::Iri(i) => i,
        _ => return Err("predicate must be an IRI".into()),
    };
    cur.skip_ws();
    let object = cur.term()?;
    cur.skip_ws();
    let graph = if cur.peek() == Some('.') {
        GraphName::Default
    } else {
        match cur.term()? {
            Term::Iri(i) => GraphName::Named(i),
            _ => return Err("graph label must be an IRI".into()),
        }
    };
    cur.skip_ws();
    if cur.next() != Some('.') {
        return Err("expected '.' at end of statement".into());
    }
    cur.skip_ws();
    if !cur.at_end_or_comment() {
        return Err("unexpected content after '.'".into());
    }
    Quad::new(subject, predicate, object, graph)
        .map(Some)
        .map_err(|e| e.to_string())
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.next();
        }
    }

    fn at_end_or_comment(&self) -> bool {
        matches!(self.peek(), None | Some('#'))
    }

    fn term(&mut self) -> Result<Term, String> {
        match self.peek() {
            Some('<') => self.iri().map(Term::Iri),
            Some('_') => self.blank_node().map(Term::BlankNode),
            Some('"') => self.literal().map(Term::Literal),
            Some(c) => Err(format!("unexpected character {c:?}")),
            None => Err("unexpected end of line".into()),
        }
    }

    fn iri(&mut self) -> Result<Iri, String> {
        self.next();
        let mut iri = String::new();
        loop {
            match self.next() {
                Some('>') => break,
                Some('\\') => iri.push(self.unicode_escape()?),
                Some(c) if c == ' ' || c == '<' || c == '"' => {
                    return Err(format!("invalid character {c:?} in IRI"))
                }
                Some(c) => iri.push(c),
                None => return Err("unterminated IRI".into()),
            }
        }
        Iri::new(iri).map_err(|e| e.to_string())
    }

    fn unicode_escape(&mut self) -> Result<char, String> {
        let width = match self.next() {
            Some('u') => 4,
            Some('U') => 8,
            other => return Err(format!("invalid escape {other:?}")),
        };
        let mut hex = String::with_capacity(width);
        for _ in 0..width {
            hex.push(self.next().ok_or("truncated unicode escape")?);
        }
        u32::from_str_radix(&hex, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| format!("invalid unicode escape {hex:?}"))
    }

    fn blank_node(&mut self) -> Result<BlankNode, String> {
        self.next();
        if self.next() != Some(':') {
            return Err("expected ':' after '_'".into());
        }
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            self.next();
        }
        // A trailing '.' terminates the statement, not the label.
        while self.pos > start && self.src[..self.pos].ends_with('.') {
            self.pos -= 1;
        }
        BlankNode::new(&self.src[start..self.pos]).map_err(|e| e.to_string())
    }

    fn literal(&mut self) -> Result<Literal, String> {
        self.next();
        let mut lexical = String::new();
        loop {
            match self.next() {
                Some('"') => break,
                Some('\\') => match self.peek() {
                    Some('u' | 'U') => lexical.push(self.unicode_escape()?),
                    Some(c) => {
                        self.next();
                        lexical.push(match c {
                            't' => '\t',
                            'b' => '\u{8}',
                            'n' => '\n',
                            'r' => '\r',
                            'f' => '\u{C}',
                            '"' => '"',
                            '\'' => '\'',
                            '\\' => '\\',
                            other => return Err(format!("invalid escape \\{other}")),
                        });
                    }
                    None => return Err("unterminated literal".into()),
                },
                Some(c) => lexical.push(c),
                None => return Err("unterminated literal".into()),
            }
        }
        match self.peek() {
            Some('@') => {
                self.next();
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
                    self.next();
                }
                Literal::lang_tagged(lexical, &self.src[start..self.pos]).map_err(|e| e.to_string())
            }
            Some('^') => {
                self.next();
                if self.next() != Some('^') {
                    return Err("expected '^^' before datatype".into());
                }
                if self.peek() != Some('<') {
                    return Err("datatype must be an IRI".into());
                }
                let datatype = self.iri()?;
                if datatype.0 == RDF_LANG_STRING {
                    return Err("rdf:langString literal without language tag".into());
                }
                Ok(Literal::typed(lexical, datatype))
            }
            _ => Ok(Literal::simple(lexical)),
        }
    }
}
