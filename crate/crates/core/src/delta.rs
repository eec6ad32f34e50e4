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

//! Changes between datasets, expressed as added and removed atomic graph
//! classes.

use std::fmt;

use thiserror::Error;

use crate::atomic::{atomic_partition, partition_quads, AtomicPartition, ClassHash};
use crate::rdf::{self, Dataset, ParseError};

/// A constraint a change must satisfy against the dataset it applies to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Added classes already present in the target.
    AdditionPresent(Vec<ClassHash>),
    /// Removed classes missing from the target.
    RemovalAbsent(Vec<ClassHash>),
    /// Classes both added and removed.
    AddedAndRemoved(Vec<ClassHash>),
    /// Neither side holds a class.
    Empty,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, what: &str, hs: &[ClassHash]| {
            write!(f, "{what}:")?;
            for h in hs {
                write!(f, " {h}")?;
            }
            Ok(())
        };
        match self {
            Violation::AdditionPresent(hs) => list(f, "added classes already present", hs),
            Violation::RemovalAbsent(hs) => list(f, "removed classes not present", hs),
            Violation::AddedAndRemoved(hs) => list(f, "classes both added and removed", hs),
            Violation::Empty => f.write_str("change adds and removes nothing"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeltaError {
    #[error("invalid change: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

fn join_violations(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// Added and removed classes. Classes are compared by hash, so equivalent
/// atomic graphs count as the same element.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Change {
    pub positive: AtomicPartition,
    pub negative: AtomicPartition,
}

impl Change {
    pub fn new(positive: AtomicPartition, negative: AtomicPartition) -> Self {
        Change { positive, negative }
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }

    pub fn len(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    /// Swaps additions and removals.
    pub fn invert(&self) -> Change {
        Change {
            positive: self.negative.clone(),
            negative: self.positive.clone(),
        }
    }

    /// Serializes as sorted `A <quad>` / `D <quad>` lines.
    pub fn to_text(&self) -> String {
        let mut lines: Vec<String> = Vec::new();
        for (prefix, side) in [("A ", &self.positive), ("D ", &self.negative)] {
            for q in &side.to_dataset() {
                lines.push(format!("{prefix}{q}"));
            }
        }
        lines.sort_unstable();
        String::from_utf8(rdf::join_lines(&lines)).expect("quads serialize to UTF-8")
    }

    pub fn from_text(text: &str) -> Result<Change, DeltaError> {
        let mut added = Dataset::new();
        let mut removed = Dataset::new();
        for (idx, line) in text.lines().enumerate() {
            let err = |message: String| DeltaError::Format {
                line: idx + 1,
                message,
            };
            if line.trim().is_empty() {
                continue;
            }
            let (target, rest) = if let Some(rest) = line.strip_prefix("A ") {
                (&mut added, rest)
            } else if let Some(rest) = line.strip_prefix("D ") {
                (&mut removed, rest)
            } else {
                return Err(err("expected 'A ' or 'D ' prefix".into()));
            };
            match rdf::parse_line(rest).map_err(err)? {
                Some(q) => {
                    target.insert(q);
                }
                None => return Err(err("missing statement".into())),
            }
        }
        Ok(Change {
            positive: atomic_partition(&added),
            negative: atomic_partition(&removed),
        })
    }
}

impl From<ParseError> for DeltaError {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::Syntax { line, message } => DeltaError::Format { line, message },
            ParseError::Utf8(offset) => DeltaError::Format {
                line: 0,
                message: format!("invalid UTF-8 at byte {offset}"),
            },
        }
    }
}

pub fn diff(g: &Dataset, g2: &Dataset) -> Change {
    diff_partitions(&atomic_partition(g), &atomic_partition(g2))
}

pub fn diff_partitions(from: &AtomicPartition, to: &AtomicPartition) -> Change {
    Change {
        positive: to.difference(from),
        negative: from.difference(to),
    }
}

pub fn invert(c: &Change) -> Change {
    c.invert()
}

/// Checks every change constraint against `target`, returning all violations.
pub fn validate(c: &Change, target: &AtomicPartition) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    let present: Vec<ClassHash> = c.positive.hashes().filter(|h| target.contains(h)).copied().collect();
    if !present.is_empty() {
        violations.push(Violation::AdditionPresent(present));
    }
    let absent: Vec<ClassHash> = c.negative.hashes().filter(|h| !target.contains(h)).copied().collect();
    if !absent.is_empty() {
        violations.push(Violation::RemovalAbsent(absent));
    }
    let both: Vec<ClassHash> = c.positive.intersection(&c.negative).hashes().copied().collect();
    if !both.is_empty() {
        violations.push(Violation::AddedAndRemoved(both));
    }
    if c.is_empty() {
        violations.push(Violation::Empty);
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

pub fn validate_dataset(c: &Change, g: &Dataset) -> Result<(), Vec<Violation>> {
    validate(c, &atomic_partition(g))
}

/// Applies a valid change: removes the negative classes, adds the positive
/// ones.
pub fn apply(target: &AtomicPartition, c: &Change) -> Result<AtomicPartition, DeltaError> {
    validate(c, target).map_err(DeltaError::Invalid)?;
    Ok(apply_unchecked(target, c))
}

pub fn apply_dataset(g: &Dataset, c: &Change) -> Result<Dataset, DeltaError> {
    apply(&atomic_partition(g), c).map(|p| p.to_dataset())
}

/// Applies whatever part of `c` has an effect on `target`: additions already
/// present and removals of absent classes are dropped. Returns the new state
/// and the change that actually took effect.
pub fn apply_lenient(target: &AtomicPartition, c: &Change) -> (AtomicPartition, Change) {
    // A class on both sides cancels out.
    let both = c.positive.intersection(&c.negative);
    let effective = Change {
        positive: c.positive.filter(|h| !target.contains(h) && !both.contains(h)),
        negative: c.negative.filter(|h| target.contains(h) && !both.contains(h)),
    };
    (apply_unchecked(target, &effective), effective)
}

fn apply_unchecked(target: &AtomicPartition, c: &Change) -> AtomicPartition {
    let mut out = target.clone();
    for h in c.negative.hashes() {
        out.remove(h);
    }
    for (h, g) in c.positive.iter() {
        out.insert_canonical(*h, g.clone());
    }
    out
}

/// Builds a change from raw added and removed quads. Each side is split into
/// atomic graphs on its own.
pub fn change_from_quads<'a>(
    added: impl IntoIterator<Item = &'a rdf::Quad>,
    removed: impl IntoIterator<Item = &'a rdf::Quad>,
) -> Change {
    Change {
        positive: partition_quads(added),
        negative: partition_quads(removed),
    }
}
