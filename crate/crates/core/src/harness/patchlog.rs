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

//! Update logs for replay.
//!
//! ```text
//! A <http://example.org/s> <http://example.org/p> _:b1 .
//! A _:b1 <http://example.org/q> "x" .
//! D <http://example.org/s> <http://example.org/p> "old" .
//! END rename
//! ```
//!
//! Blank node labels only mean something inside one transaction.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rdf::{self, Quad};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transaction {
    pub added: Vec<Quad>,
    pub removed: Vec<Quad>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatchLog {
    pub transactions: Vec<Transaction>,
}

impl PatchLog {
    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for tx in &self.transactions {
            for q in &tx.added {
                writeln!(out, "A {q}").expect("writing to a String");
            }
            for q in &tx.removed {
                writeln!(out, "D {q}").expect("writing to a String");
            }
            writeln!(out, "END {}", tx.message).expect("writing to a String");
        }
        out
    }

    pub fn parse(text: &str) -> Result<PatchLog> {
        let mut log = PatchLog::default();
        let mut tx = Transaction::default();
        let mut open = false;
        for (idx, line) in text.lines().enumerate() {
            let bad = |m: String| Error::Format {
                what: "patch log",
                message: format!("line {}: {m}", idx + 1),
            };
            if line.trim().is_empty() {
                continue;
            }
            if line == "END" || line.starts_with("END ") {
                tx.message = line.get(4..).unwrap_or("").to_owned();
                log.transactions.push(std::mem::take(&mut tx));
                open = false;
                continue;
            }
            let (side, rest) = if let Some(rest) = line.strip_prefix("A ") {
                (&mut tx.added, rest)
            } else if let Some(rest) = line.strip_prefix("D ") {
                (&mut tx.removed, rest)
            } else {
                return Err(bad("expected 'A ', 'D ' or 'END'".into()));
            };
            let quad = rdf::parse_line(rest)
                .map_err(&bad)?
                .ok_or_else(|| bad("missing statement".into()))?;
            side.push(quad);
            open = true;
        }
        if open {
            return Err(Error::Format {
                what: "patch log",
                message: "last transaction has no END line".into(),
            });
        }
        Ok(log)
    }
}
