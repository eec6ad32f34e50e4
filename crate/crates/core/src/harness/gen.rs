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

//! Seeded random datasets, changes and patch logs.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atomic::{atomic_partition, AtomicGraph, AtomicPartition};
use crate::delta::{apply_lenient, change_from_quads, validate, Change};
use crate::error::{Error, Result};
use crate::harness::patchlog::{PatchLog, Transaction};
use crate::rdf::{BlankNode, Dataset, GraphName, Iri, Literal, Quad, Term};

const NS: &str = "http://example.org/";
const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";

/// Blank-node share of generated changes.
pub const CHANGE_BLANK_RATIO: f64 = 0.25;

/// Random statement source. Subjects are drawn from a pool sized to the
/// dataset so that most subjects carry several statements.
pub struct QuadGen {
    rng: ChaCha8Rng,
    subjects: u64,
    label: u64,
}

impl QuadGen {
    pub fn new(seed: u64, subjects: u64) -> Self {
        QuadGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            subjects: subjects.max(1),
            label: 0,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn iri(&self, local: String) -> Iri {
        Iri::new(format!("{NS}{local}")).expect("generated IRIs are valid")
    }

    fn subject(&mut self) -> Iri {
        let n = self.rng.gen_range(0..self.subjects);
        self.iri(format!("s{n}"))
    }

    fn predicate(&mut self) -> Iri {
        let n = self.rng.gen_range(0..24);
        self.iri(format!("p{n}"))
    }

    fn graph(&mut self) -> GraphName {
        if self.rng.gen_bool(0.8) {
            GraphName::Default
        } else {
            let n = self.rng.gen_range(0..4);
            GraphName::Named(self.iri(format!("g{n}")))
        }
    }

    fn literal(&mut self) -> Literal {
        let v: u32 = self.rng.gen();
        match self.rng.gen_range(0..10) {
            0..=3 => Literal::simple(format!("v{v}")),
            4..=5 => Literal::typed(v.to_string(), Iri::new(XSD_INTEGER).expect("valid")),
            6..=7 => {
                let lang = ["en", "de", "en-GB"][self.rng.gen_range(0..3)];
                Literal::lang_tagged(format!("w{v}"), lang).expect("valid language tag")
            }
            8 => Literal::simple(format!("line\n\"{v}\"\ttab\\ \u{e9}")),
            _ => Literal::simple(format!("\u{1}{v}\u{7f}")),
        }
    }

    fn object(&mut self) -> Term {
        if self.rng.gen_bool(0.4) {
            Term::Iri(self.subject())
        } else {
            Term::Literal(self.literal())
        }
    }

    pub fn ground_quad(&mut self) -> Quad {
        let (s, p, o, g) = (self.subject(), self.predicate(), self.object(), self.graph());
        Quad::new(s, p, o, g).expect("IRI subject")
    }

    fn fresh(&mut self, prefix: &str) -> BlankNode {
        self.label += 1;
        BlankNode::new(format!("{prefix}{}", self.label)).expect("alphanumeric label")
    }

    /// An atomic graph of 1 to 4 blank nodes and at most `max_quads`
    /// statements: a tree of blank nodes hanging off an IRI, each node with a
    /// literal property. Labels are `<prefix><n>`.
    pub fn blank_graph(&mut self, max_quads: usize, prefix: &str) -> Vec<Quad> {
        debug_assert!(max_quads >= 1);
        let g = self.graph();
        if max_quads == 1 {
            let b = self.fresh(prefix);
            let (p, o) = (self.predicate(), self.object());
            return vec![Quad::new(b, p, o, g).expect("blank subject")];
        }
        let nodes = self.rng.gen_range(1..=4).min(max_quads / 2);
        let labels: Vec<BlankNode> = (0..nodes).map(|_| self.fresh(prefix)).collect();
        let mut out = Vec::with_capacity(2 * nodes);
        let (s, p) = (self.subject(), self.predicate());
        out.push(Quad::new(s, p, labels[0].clone(), g.clone()).expect("IRI subject"));
        for i in 1..nodes {
            let parent = labels[self.rng.gen_range(0..i)].clone();
            let p = self.predicate();
            out.push(Quad::new(parent, p, labels[i].clone(), g.clone()).expect("blank subject"));
        }
        for b in &labels {
            let (p, o) = (self.predicate(), Term::Literal(self.literal()));
            out.push(Quad::new(b.clone(), p, o, g.clone()).expect("blank subject"));
        }
        out
    }

    /// One new class: a ground statement or, with probability `blank_ratio`,
    /// a blank-node graph.
    pub fn class(&mut self, blank_ratio: f64, prefix: &str) -> AtomicGraph {
        let quads = if self.rng.gen_bool(blank_ratio) {
            self.blank_graph(8, prefix)
        } else {
            vec![self.ground_quad()]
        };
        AtomicGraph::new(quads).expect("generated graphs are atomic")
    }
}

/// A dataset of exactly `size` statements. About `blank_ratio` of them
/// belong to blank-node graphs.
pub fn gen_dataset(seed: u64, size: usize, blank_ratio: f64) -> Dataset {
    let blank_ratio = blank_ratio.clamp(0.0, 1.0);
    let mut gen = QuadGen::new(seed, (size as u64 / 4).max(8));
    let mut d = Dataset::new();
    let mut blank_quads = 0usize;
    while d.len() < size {
        let want_blank = blank_ratio > 0.0 && (blank_quads as f64) < blank_ratio * (d.len() + 1) as f64;
        if want_blank {
            for q in gen.blank_graph(size - d.len(), "b") {
                if d.insert(q) {
                    blank_quads += 1;
                }
            }
        } else {
            d.insert(gen.ground_quad());
        }
    }
    d
}

/// A valid change against `d` removing `remove_count` of its classes and
/// adding `add_count` new ones.
pub fn gen_change(seed: u64, d: &Dataset, add_count: usize, remove_count: usize) -> Result<Change> {
    let target = atomic_partition(d);
    let mut gen = QuadGen::new(seed, (d.len() as u64 / 4).max(8));
    gen_change_on(&mut gen, &target, add_count, remove_count, &AtomicPartition::new())
}

/// As [`gen_change`], against a partition. Added classes also avoid
/// `exclude`.
pub fn gen_change_on(
    gen: &mut QuadGen,
    target: &AtomicPartition,
    add_count: usize,
    remove_count: usize,
    exclude: &AtomicPartition,
) -> Result<Change> {
    if add_count + remove_count == 0 {
        return Err(Error::Unsatisfiable("a change must add or remove something".into()));
    }
    let negative = pick_classes(gen, target, remove_count)?;
    let positive = fresh_classes(gen, add_count, &[target, exclude])?;
    let change = Change::new(positive, negative);
    validate(&change, target).expect("generated changes are valid by construction");
    Ok(change)
}

/// `count` distinct classes of `from`, chosen uniformly.
pub fn pick_classes(gen: &mut QuadGen, from: &AtomicPartition, count: usize) -> Result<AtomicPartition> {
    if count > from.len() {
        return Err(Error::Unsatisfiable(format!(
            "cannot remove {count} classes from a dataset with {}",
            from.len()
        )));
    }
    let mut picked: Vec<usize> = sample(gen.rng(), from.len(), count).into_vec();
    picked.sort_unstable();
    let mut out = AtomicPartition::new();
    let mut want = picked.into_iter().peekable();
    for (i, (_, g)) in from.iter().enumerate() {
        if want.peek() == Some(&i) {
            want.next();
            out.insert(g);
        }
    }
    Ok(out)
}

/// `count` new classes absent from every partition in `avoid`.
pub fn fresh_classes(gen: &mut QuadGen, count: usize, avoid: &[&AtomicPartition]) -> Result<AtomicPartition> {
    let mut out = AtomicPartition::new();
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * (count + 10) {
            return Err(Error::Unsatisfiable("could not find enough new classes".into()));
        }
        let g = gen.class(CHANGE_BLANK_RATIO, "n");
        let hash = crate::atomic::class_hash(&g);
        if avoid.iter().any(|p| p.contains(&hash)) {
            continue;
        }
        out.insert(&g);
    }
    Ok(out)
}

/// A patch log of `transactions` updates starting from `initial`. Most
/// transactions add and remove a handful of statements; every 25th has no
/// effect, to exercise skipping.
pub fn gen_patch_log(seed: u64, initial: &Dataset, transactions: usize) -> PatchLog {
    let mut gen = QuadGen::new(seed, (initial.len() as u64 / 4).max(8));
    let mut state = atomic_partition(initial);
    let mut log = PatchLog::default();
    for i in 0..transactions {
        let tx = if i % 25 == 24 {
            noop_transaction(&mut gen, &state, i)
        } else {
            update_transaction(&mut gen, &state, i)
        };
        let change = change_from_quads(&tx.added, &tx.removed);
        state = apply_lenient(&state, &change).0;
        log.transactions.push(tx);
    }
    log
}

fn class_quads(g: &AtomicGraph, prefix: &str) -> Vec<Quad> {
    g.quads()
        .iter()
        .map(|q| q.map_blank_nodes(|b| BlankNode::new(format!("{prefix}{}", b.as_str())).expect("alphanumeric")))
        .collect()
}

fn update_transaction(gen: &mut QuadGen, state: &AtomicPartition, i: usize) -> Transaction {
    let mut tx = Transaction {
        message: format!("update {i}"),
        ..Transaction::default()
    };
    let removals = gen.rng().gen_range(0..=3).min(state.len());
    let adds = gen.rng().gen_range(if removals == 0 { 1 } else { 0 }..=4);
    if let Ok(picked) = pick_classes(gen, state, removals) {
        for (_, g) in picked.iter() {
            tx.removed.extend(class_quads(g, "d"));
        }
    }
    for _ in 0..adds {
        if gen.rng().gen_bool(CHANGE_BLANK_RATIO) {
            // Labels restart in every transaction; they are local to it.
            let quads = gen.blank_graph(8, "b");
            tx.added.extend(quads);
        } else {
            tx.added.push(gen.ground_quad());
        }
    }
    gen.label = 0;
    tx
}

fn noop_transaction(gen: &mut QuadGen, state: &AtomicPartition, i: usize) -> Transaction {
    let mut tx = Transaction {
        message: format!("no-op {i}"),
        ..Transaction::default()
    };
    if let Ok(picked) = pick_classes(gen, state, 1.min(state.len())) {
        for (_, g) in picked.iter() {
            tx.added.extend(class_quads(g, "e"));
        }
    }
    let absent = fresh_classes(gen, 1, &[state]).expect("plenty of unused statements");
    for (_, g) in absent.iter() {
        tx.removed.extend(class_quads(g, "f"));
    }
    tx
}
