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

//! Atomic graphs and atomic partitions.
//!
//! An atomic graph is a non-empty set of quads that cannot be split into two
//! parts with disjoint blank nodes. Every ground quad is atomic on its own;
//! quads sharing blank nodes (across graph contexts too) form one atomic graph.
//!
//! Two atomic graphs are equivalent when a blank node bijection maps one onto
//! the other. Equivalence is decided through canonical labeling: colors are
//! refined from each blank node's incident quads, and when refinement stalls
//! every member of the first non-trivial color cell is individualized in turn,
//! keeping the lexicographically smallest serialization. The SHA-256 of that
//! serialization is the class hash.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::rdf::{self, BlankNode, Dataset, Quad, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AtomicError {
    #[error("an atomic graph needs at least one quad")]
    Empty,
    #[error("quads split into {0} blank-node-disjoint components")]
    NotConnected(usize),
    #[error("invalid class hash {0:?}")]
    InvalidHash(String),
}

/// SHA-256 digest identifying an equivalence class of atomic graphs.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassHash([u8; 32]);

impl ClassHash {
    pub fn of_bytes(bytes: &[u8]) -> Self {
        ClassHash(Sha256::digest(bytes).into())
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Display for ClassHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for ClassHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClassHash({})", &self.to_hex()[..12])
    }
}

impl FromStr for ClassHash {
    type Err = AtomicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = [0u8; 32];
        if s.len() != 64 || s.bytes().any(|b| b.is_ascii_uppercase()) {
            return Err(AtomicError::InvalidHash(s.to_owned()));
        }
        hex::decode_to_slice(s, &mut out).map_err(|_| AtomicError::InvalidHash(s.to_owned()))?;
        Ok(ClassHash(out))
    }
}

/// A connected, non-empty set of quads.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AtomicGraph {
    quads: Vec<Quad>,
}

impl AtomicGraph {
    pub fn new(quads: impl IntoIterator<Item = Quad>) -> Result<Self, AtomicError> {
        let mut quads: Vec<Quad> = quads.into_iter().collect();
        quads.sort();
        quads.dedup();
        if quads.is_empty() {
            return Err(AtomicError::Empty);
        }
        let components = components(&quads).len();
        if components != 1 {
            return Err(AtomicError::NotConnected(components));
        }
        Ok(AtomicGraph { quads })
    }

    pub fn quads(&self) -> &[Quad] {
        &self.quads
    }

    pub fn len(&self) -> usize {
        self.quads.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_ground(&self) -> bool {
        self.quads.len() == 1 && self.quads[0].is_ground()
    }

    pub fn blank_nodes(&self) -> Vec<&BlankNode> {
        let mut seen: Vec<&BlankNode> = self.quads.iter().flat_map(Quad::blank_nodes).collect();
        seen.sort();
        seen.dedup();
        seen
    }
}

/// Relabels the blank nodes of `g` as `c0`, `c1`, ... so that equivalent graphs
/// come out identical.
pub fn canonical_labels(g: &AtomicGraph) -> AtomicGraph {
    canonicalize(&g.quads).0
}

pub fn class_hash(g: &AtomicGraph) -> ClassHash {
    ClassHash::of_bytes(&canonicalize(&g.quads).1)
}

pub fn equivalent(g: &AtomicGraph, h: &AtomicGraph) -> bool {
    if g.quads.len() != h.quads.len() {
        return false;
    }
    canonicalize(&g.quads).1 == canonicalize(&h.quads).1
}

/// Canonical form of a connected quad set and its serialization.
fn canonicalize(quads: &[Quad]) -> (AtomicGraph, Vec<u8>) {
    let mut labels: Vec<&BlankNode> = quads.iter().flat_map(Quad::blank_nodes).collect();
    labels.sort();
    labels.dedup();
    if labels.is_empty() {
        let graph = AtomicGraph {
            quads: quads.to_vec(),
        };
        let bytes = rdf::sorted_lines(quads.iter());
        return (graph, bytes);
    }

    let labeler = Labeler::new(quads, &labels);
    let colors = labeler.initial_colors();
    let (bytes, order) = labeler.search(colors);
    let rename: HashMap<&BlankNode, BlankNode> = order
        .iter()
        .enumerate()
        .map(|(rank, &node)| (labels[node], canonical_label(rank)))
        .collect();
    let mut relabeled: Vec<Quad> = quads
        .iter()
        .map(|q| q.map_blank_nodes(|b| rename[b].clone()))
        .collect();
    relabeled.sort();
    (AtomicGraph { quads: relabeled }, bytes)
}

fn canonical_label(rank: usize) -> BlankNode {
    BlankNode::new(format!("c{rank}")).expect("alphanumeric label")
}

type Color = [u8; 32];

/// A blank-node slot of a quad: either a fixed term or a blank node index.
enum Slot<'a> {
    Fixed(&'a Term),
    Blank(usize),
}

struct Labeler<'a> {
    quads: &'a [Quad],
    slots: Vec<(Slot<'a>, Slot<'a>)>,
    incident: Vec<Vec<usize>>,
}

impl<'a> Labeler<'a> {
    fn new(quads: &'a [Quad], labels: &[&BlankNode]) -> Self {
        let index: HashMap<&BlankNode, usize> =
            labels.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let slot = |t: &'a Term| match t {
            Term::BlankNode(b) => Slot::Blank(index[b]),
            other => Slot::Fixed(other),
        };
        let slots: Vec<_> = quads
            .iter()
            .map(|q| (slot(q.subject()), slot(q.object())))
            .collect();
        let mut incident = vec![Vec::new(); labels.len()];
        for (qi, (s, o)) in slots.iter().enumerate() {
            if let Slot::Blank(b) = s {
                incident[*b].push(qi);
            }
            if let Slot::Blank(b) = o {
                if !matches!(s, Slot::Blank(sb) if sb == b) {
                    incident[*b].push(qi);
                }
            }
        }
        Labeler {
            quads,
            slots,
            incident,
        }
    }

    /// Renders quad `qi` from the viewpoint of `node`, naming other blank
    /// nodes through `name`.
    fn render(&self, qi: usize, node: usize, name: &dyn Fn(usize) -> String) -> String {
        let quad = &self.quads[qi];
        let term = |line: &mut String, slot: &Slot<'_>| match slot {
            Slot::Blank(b) if *b == node => line.push_str("_:@"),
            Slot::Blank(b) => {
                line.push_str("_:");
                line.push_str(&name(*b));
            }
            Slot::Fixed(t) => rdf::write_term(line, t),
        };
        let (s, o) = &self.slots[qi];
        let mut line = String::new();
        term(&mut line, s);
        line.push(' ');
        rdf::write_iri(&mut line, quad.predicate());
        line.push(' ');
        term(&mut line, o);
        if let rdf::GraphName::Named(g) = quad.graph() {
            line.push(' ');
            rdf::write_iri(&mut line, g);
        }
        line
    }

    fn node_color(&self, node: usize, prev: Option<&Color>, name: &dyn Fn(usize) -> String) -> Color {
        let mut lines: Vec<String> = self.incident[node]
            .iter()
            .map(|&qi| self.render(qi, node, name))
            .collect();
        lines.sort_unstable();
        let mut hasher = Sha256::new();
        if let Some(prev) = prev {
            hasher.update(prev);
        }
        for line in &lines {
            hasher.update(line.as_bytes());
            hasher.update(b"\n");
        }
        hasher.finalize().into()
    }

    fn initial_colors(&self) -> Vec<Color> {
        (0..self.incident.len())
            .map(|n| self.node_color(n, None, &|_| "z".to_owned()))
            .collect()
    }

    /// Refines until the number of distinct colors stops growing.
    fn refine(&self, mut colors: Vec<Color>) -> Vec<Color> {
        let mut cells = distinct(&colors);
        loop {
            let name = |b: usize| hex::encode(colors[b]);
            let next: Vec<Color> = (0..colors.len())
                .map(|n| self.node_color(n, Some(&colors[n]), &name))
                .collect();
            let next_cells = distinct(&next);
            if next_cells <= cells {
                return colors;
            }
            colors = next;
            cells = next_cells;
        }
    }

    /// Returns the smallest leaf serialization and the node order that
    /// produced it.
    fn search(&self, colors: Vec<Color>) -> (Vec<u8>, Vec<usize>) {
        let colors = self.refine(colors);
        let Some(cell) = target_cell(&colors) else {
            return self.leaf(&colors);
        };
        let mut best: Option<(Vec<u8>, Vec<usize>)> = None;
        for node in cell {
            let mut branch = colors.clone();
            let mut hasher = Sha256::new();
            hasher.update(branch[node]);
            hasher.update(b"individualized");
            branch[node] = hasher.finalize().into();
            let candidate = self.search(branch);
            if best.as_ref().is_none_or(|(b, _)| candidate.0 < *b) {
                best = Some(candidate);
            }
        }
        best.expect("target cell is non-empty")
    }

    fn leaf(&self, colors: &[Color]) -> (Vec<u8>, Vec<usize>) {
        let mut order: Vec<usize> = (0..colors.len()).collect();
        order.sort_by_key(|&n| colors[n]);
        let mut rank = vec![0; colors.len()];
        for (r, &n) in order.iter().enumerate() {
            rank[n] = r;
        }
        let mut lines: Vec<String> = (0..self.quads.len())
            .map(|qi| self.render(qi, usize::MAX, &|b| format!("c{}", rank[b])))
            .map(|l| l + " .")
            .collect();
        lines.sort_unstable();
        (rdf::join_lines(&lines), order)
    }
}

fn distinct(colors: &[Color]) -> usize {
    colors.iter().collect::<HashSet<_>>().len()
}

/// Smallest color cell with more than one member, ties broken by color.
fn target_cell(colors: &[Color]) -> Option<Vec<usize>> {
    let mut cells: BTreeMap<&Color, Vec<usize>> = BTreeMap::new();
    for (n, c) in colors.iter().enumerate() {
        cells.entry(c).or_default().push(n);
    }
    cells
        .into_iter()
        .filter(|(_, members)| members.len() > 1)
        .min_by(|(ca, a), (cb, b)| a.len().cmp(&b.len()).then(ca.cmp(cb)))
        .map(|(_, members)| members)
}

// ---------------------------------------------------------------------------
// Partitioning

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Groups quads into blank-node-connected components. Ground quads are
/// singleton components.
pub(crate) fn components<'a, I>(quads: I) -> Vec<Vec<Quad>>
where
    I: IntoIterator<Item = &'a Quad>,
{
    let mut ground = Vec::new();
    let mut blank_quads = Vec::new();
    let mut index: HashMap<&BlankNode, usize> = HashMap::new();
    for q in quads {
        if q.is_ground() {
            ground.push(vec![q.clone()]);
        } else {
            for b in q.blank_nodes() {
                let next = index.len();
                index.entry(b).or_insert(next);
            }
            blank_quads.push(q);
        }
    }
    let mut uf = UnionFind::new(index.len());
    for q in &blank_quads {
        let mut nodes = q.blank_nodes().map(|b| index[b]);
        let first = nodes.next().expect("non-ground quad has a blank node");
        for other in nodes {
            uf.union(first, other);
        }
    }
    let mut groups: BTreeMap<usize, Vec<Quad>> = BTreeMap::new();
    for q in blank_quads {
        let b = q.blank_nodes().next().expect("blank node");
        let root = uf.find(index[b]);
        groups.entry(root).or_default().push(q.clone());
    }
    ground.extend(groups.into_values());
    ground
}

/// A set of atomic graph classes keyed by class hash, each stored with
/// canonical `c<n>` labels. Serves both as the atomic partition of a dataset
/// and as either side of a change.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AtomicPartition {
    classes: BTreeMap<ClassHash, Arc<AtomicGraph>>,
}

impl AtomicPartition {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts the class of `g`. Returns its hash and whether it was new.
    pub fn insert(&mut self, g: &AtomicGraph) -> (ClassHash, bool) {
        let (canonical, bytes) = canonicalize(&g.quads);
        let hash = ClassHash::of_bytes(&bytes);
        let fresh = !self.classes.contains_key(&hash);
        if fresh {
            self.classes.insert(hash, Arc::new(canonical));
        }
        (hash, fresh)
    }

    pub(crate) fn insert_canonical(&mut self, hash: ClassHash, g: Arc<AtomicGraph>) {
        self.classes.entry(hash).or_insert(g);
    }

    pub fn remove(&mut self, hash: &ClassHash) -> Option<Arc<AtomicGraph>> {
        self.classes.remove(hash)
    }

    pub fn contains(&self, hash: &ClassHash) -> bool {
        self.classes.contains_key(hash)
    }

    pub fn get(&self, hash: &ClassHash) -> Option<&Arc<AtomicGraph>> {
        self.classes.get(hash)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn hashes(&self) -> impl Iterator<Item = &ClassHash> {
        self.classes.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ClassHash, &Arc<AtomicGraph>)> {
        self.classes.iter()
    }

    pub fn quad_count(&self) -> usize {
        self.classes.values().map(|g| g.len()).sum()
    }

    pub fn union(&self, other: &AtomicPartition) -> AtomicPartition {
        let mut out = self.clone();
        for (h, g) in &other.classes {
            out.classes.entry(*h).or_insert_with(|| g.clone());
        }
        out
    }

    pub fn difference(&self, other: &AtomicPartition) -> AtomicPartition {
        self.filter(|h| !other.contains(h))
    }

    pub fn intersection(&self, other: &AtomicPartition) -> AtomicPartition {
        self.filter(|h| other.contains(h))
    }

    pub fn is_disjoint(&self, other: &AtomicPartition) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.hashes().all(|h| !large.contains(h))
    }

    pub fn is_subset(&self, other: &AtomicPartition) -> bool {
        self.hashes().all(|h| other.contains(h))
    }

    pub fn filter(&self, mut keep: impl FnMut(&ClassHash) -> bool) -> AtomicPartition {
        AtomicPartition {
            classes: self
                .classes
                .iter()
                .filter(|(h, _)| keep(h))
                .map(|(h, g)| (*h, g.clone()))
                .collect(),
        }
    }

    /// Materializes the classes as a normalized dataset.
    pub fn to_dataset(&self) -> Dataset {
        let width = self.label_width();
        self.classes
            .iter()
            .flat_map(|(h, g)| relabel_for_dataset(h, g, width))
            .collect()
    }

    /// Canonical N-Quads bytes of [`AtomicPartition::to_dataset`].
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let width = self.label_width();
        let mut lines: Vec<String> = Vec::with_capacity(self.quad_count());
        for (h, g) in &self.classes {
            if g.is_ground() {
                lines.push(g.quads[0].to_string());
            } else {
                lines.extend(relabel_for_dataset(h, g, width).map(|q| q.to_string()));
            }
        }
        lines.sort_unstable();
        rdf::join_lines(&lines)
    }

    /// Hex digits of the class hash used in dataset-level blank labels: 16,
    /// unless two blank classes share that prefix.
    fn label_width(&self) -> usize {
        let mut seen = HashSet::new();
        for (h, g) in &self.classes {
            if !g.is_ground() && !seen.insert(&h.0[..8]) {
                return 64;
            }
        }
        16
    }
}

fn relabel_for_dataset<'a>(
    hash: &ClassHash,
    g: &'a AtomicGraph,
    width: usize,
) -> impl Iterator<Item = Quad> + 'a {
    let prefix = hash.to_hex()[..width].to_owned();
    g.quads.iter().map(move |q| {
        q.map_blank_nodes(|b| {
            let index = &b.as_str()[1..];
            BlankNode::new(format!("c{prefix}x{index}")).expect("alphanumeric label")
        })
    })
}

impl FromIterator<AtomicGraph> for AtomicPartition {
    fn from_iter<I: IntoIterator<Item = AtomicGraph>>(iter: I) -> Self {
        let mut p = AtomicPartition::new();
        for g in iter {
            p.insert(&g);
        }
        p
    }
}

/// Splits a dataset into atomic graphs, collapsing equivalent ones.
pub fn atomic_partition(d: &Dataset) -> AtomicPartition {
    partition_quads(d.iter())
}

pub(crate) fn partition_quads<'a>(quads: impl IntoIterator<Item = &'a Quad>) -> AtomicPartition {
    let mut p = AtomicPartition::new();
    for component in components(quads) {
        let (canonical, bytes) = canonicalize(&component);
        p.insert_canonical(ClassHash::of_bytes(&bytes), Arc::new(canonical));
    }
    p
}

/// One representative per equivalence class, with canonical blank labels.
pub fn normalize(d: &Dataset) -> Dataset {
    atomic_partition(d).to_dataset()
}

/// Exhaustive equivalence check used as a test oracle.
pub mod oracle {
    use std::collections::{BTreeSet, HashMap};

    use thiserror::Error;

    use super::AtomicGraph;
    use crate::rdf::{BlankNode, Quad};

    pub const MAX_BLANK_NODES: usize = 8;

    #[derive(Debug, Error, Clone, PartialEq, Eq)]
    #[error("{0} blank nodes exceed the brute-force limit of {MAX_BLANK_NODES}")]
    pub struct TooManyBlankNodes(pub usize);

    /// Tries every blank node bijection from `g` to `h`.
    pub fn bruteforce_equivalent(g: &AtomicGraph, h: &AtomicGraph) -> Result<bool, TooManyBlankNodes> {
        bruteforce_quads(g.quads(), h.quads())
    }

    /// Same as [`bruteforce_equivalent`] over arbitrary quad sets.
    pub fn bruteforce_quads(g: &[Quad], h: &[Quad]) -> Result<bool, TooManyBlankNodes> {
        let gb = blanks(g);
        let hb = blanks(h);
        for n in [gb.len(), hb.len()] {
            if n > MAX_BLANK_NODES {
                return Err(TooManyBlankNodes(n));
            }
        }
        let target: BTreeSet<&Quad> = h.iter().collect();
        let source: BTreeSet<&Quad> = g.iter().collect();
        if gb.len() != hb.len() || source.len() != target.len() {
            return Ok(false);
        }
        let mut perm: Vec<usize> = (0..hb.len()).collect();
        let mut found = false;
        permute(&mut perm, 0, &mut |perm| {
            let map: HashMap<&BlankNode, &BlankNode> =
                gb.iter().zip(perm.iter().map(|&i| hb[i])).map(|(&a, b)| (a, b)).collect();
            let hit = source
                .iter()
                .all(|q| target.contains(&q.map_blank_nodes(|b| map[b].clone())));
            found |= hit;
            hit
        });
        Ok(found)
    }

    fn blanks(quads: &[Quad]) -> Vec<&BlankNode> {
        let set: BTreeSet<&BlankNode> = quads.iter().flat_map(Quad::blank_nodes).collect();
        set.into_iter().collect()
    }

    /// Visits permutations until `visit` returns true.
    fn permute(perm: &mut [usize], k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if k == perm.len() {
            return visit(perm);
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            if permute(perm, k + 1, visit) {
                return true;
            }
            perm.swap(k, i);
        }
        false
    }
}
