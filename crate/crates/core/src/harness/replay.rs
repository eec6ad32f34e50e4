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

//! Replays a patch log into a repository and into a plain in-memory store,
//! comparing the two after every commit.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::atomic::oracle::bruteforce_quads;
use crate::atomic::{atomic_partition, AtomicGraph, AtomicPartition, ClassHash};
use crate::delta::{apply_lenient, change_from_quads};
use crate::error::{Error, Result};
use crate::harness::patchlog::PatchLog;
use crate::history::{Repository, Signature};
use crate::rdf::{self, BlankNode, Dataset, Quad};

/// In-memory quad store that tracks statements directly. Ground statements
/// live in a set; each blank-node component is kept once per isomorphism
/// class, found by exhaustive bijection search.
///
/// Serialized lines are maintained alongside, so producing the normalized
/// bytes does not re-partition the whole store.
#[derive(Default)]
pub struct ReferenceStore {
    ground: BTreeMap<Quad, String>,
    ground_lines: BTreeSet<String>,
    blank: HashMap<Vec<String>, Vec<(Vec<Quad>, ClassHash)>>,
    blank_classes: AtomicPartition,
    next_label: u64,
}

/// Statements of a component with blank nodes blotted out. Equal for
/// isomorphic components.
fn shape(component: &[Quad]) -> Vec<String> {
    let anon = BlankNode::new("x").expect("valid label");
    let mut lines: Vec<String> = component
        .iter()
        .map(|q| q.map_blank_nodes(|_| anon.clone()).to_string())
        .collect();
    lines.sort_unstable();
    lines
}

/// Groups quads that share blank nodes.
fn blank_components(quads: &[Quad]) -> Vec<Vec<Quad>> {
    let mut by_label: HashMap<&BlankNode, Vec<usize>> = HashMap::new();
    for (i, q) in quads.iter().enumerate() {
        for b in q.blank_nodes() {
            by_label.entry(b).or_default().push(i);
        }
    }
    let mut seen = vec![false; quads.len()];
    let mut out = Vec::new();
    for start in 0..quads.len() {
        if seen[start] || quads[start].is_ground() {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut component = Vec::new();
        while let Some(i) = stack.pop() {
            for b in quads[i].blank_nodes() {
                for &j in &by_label[b] {
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            component.push(quads[i].clone());
        }
        component.sort();
        component.dedup();
        out.push(component);
    }
    out
}

fn same_class(a: &[Quad], b: &[Quad]) -> Result<bool> {
    bruteforce_quads(a, b).map_err(|e| Error::Unsatisfiable(format!("reference store: {e}")))
}

impl ReferenceStore {
    pub fn new(initial: &Dataset) -> Result<ReferenceStore> {
        let mut store = ReferenceStore::default();
        let quads: Vec<Quad> = initial.iter().cloned().collect();
        for q in quads.iter().filter(|q| q.is_ground()) {
            store.insert_ground(q);
        }
        for c in blank_components(&quads) {
            store.add_component(c)?;
        }
        Ok(store)
    }

    fn find(&self, component: &[Quad]) -> Result<Option<(Vec<String>, usize)>> {
        let key = shape(component);
        if let Some(bucket) = self.blank.get(&key) {
            for (i, (existing, _)) in bucket.iter().enumerate() {
                if same_class(existing, component)? {
                    return Ok(Some((key, i)));
                }
            }
        }
        Ok(None)
    }

    fn add_component(&mut self, component: Vec<Quad>) -> Result<bool> {
        if self.find(&component)?.is_some() {
            return Ok(false);
        }
        // Fresh labels keep components from different updates apart.
        let mut renames: HashMap<BlankNode, BlankNode> = HashMap::new();
        let relabeled: Vec<Quad> = component
            .iter()
            .map(|q| {
                q.map_blank_nodes(|b| {
                    renames
                        .entry(b.clone())
                        .or_insert_with(|| {
                            self.next_label += 1;
                            BlankNode::new(format!("r{}", self.next_label)).expect("valid label")
                        })
                        .clone()
                })
            })
            .collect();
        let graph = AtomicGraph::new(relabeled.iter().cloned())?;
        let (hash, _) = self.blank_classes.insert(&graph);
        self.blank.entry(shape(&relabeled)).or_default().push((relabeled, hash));
        Ok(true)
    }

    fn remove_component(&mut self, component: &[Quad]) -> Result<bool> {
        let Some((key, i)) = self.find(component)? else {
            return Ok(false);
        };
        let bucket = self.blank.get_mut(&key).expect("found above");
        let (_, hash) = bucket.swap_remove(i);
        self.blank_classes.remove(&hash);
        if bucket.is_empty() {
            self.blank.remove(&key);
        }
        Ok(true)
    }

    /// Applies one update. Statements both added and removed cancel out;
    /// adding what is present and removing what is absent do nothing.
    /// Returns whether the store changed.
    pub fn apply(&mut self, added: &[Quad], removed: &[Quad]) -> Result<bool> {
        let added_ground: BTreeSet<&Quad> = added.iter().filter(|q| q.is_ground()).collect();
        let removed_ground: BTreeSet<&Quad> = removed.iter().filter(|q| q.is_ground()).collect();
        let mut added_blank = blank_components(added);
        let mut removed_blank = blank_components(removed);
        let mut i = 0;
        while i < added_blank.len() {
            let mut twin = None;
            for (j, r) in removed_blank.iter().enumerate() {
                if same_class(&added_blank[i], r)? {
                    twin = Some(j);
                    break;
                }
            }
            match twin {
                Some(j) => {
                    added_blank.swap_remove(i);
                    removed_blank.swap_remove(j);
                }
                None => i += 1,
            }
        }
        let mut changed = false;
        for q in removed_ground.difference(&added_ground) {
            changed |= self.remove_ground(q);
        }
        for c in &removed_blank {
            changed |= self.remove_component(c)?;
        }
        for q in added_ground.difference(&removed_ground) {
            changed |= self.insert_ground(q);
        }
        for c in added_blank {
            changed |= self.add_component(c)?;
        }
        Ok(changed)
    }

    fn insert_ground(&mut self, q: &Quad) -> bool {
        if self.ground.contains_key(q) {
            return false;
        }
        let line = q.to_string();
        self.ground_lines.insert(line.clone());
        self.ground.insert(q.clone(), line);
        true
    }

    fn remove_ground(&mut self, q: &Quad) -> bool {
        match self.ground.remove(q) {
            Some(line) => self.ground_lines.remove(&line),
            None => false,
        }
    }

    pub fn len(&self) -> usize {
        self.ground.len() + self.blank_classes.quad_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_dataset(&self) -> Dataset {
        let mut d: Dataset = self.ground.keys().cloned().collect();
        d.extend(self.blank.values().flatten().flat_map(|(c, _)| c.iter().cloned()));
        d
    }

    /// Canonical bytes of the normalized contents: ground lines merged with
    /// the normalized blank-node classes.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let blank = self.blank_classes.canonical_bytes();
        let blank_text = std::str::from_utf8(&blank).expect("UTF-8");
        let mut out = Vec::with_capacity(blank.len() + self.ground_lines.len() * 80);
        let mut ground = self.ground_lines.iter().peekable();
        for line in blank_text.lines() {
            while let Some(g) = ground.next_if(|g| g.as_str() < line) {
                out.extend_from_slice(g.as_bytes());
                out.push(b'\n');
            }
            out.extend_from_slice(line.as_bytes());
            out.push(b'\n');
        }
        for g in ground {
            out.extend_from_slice(g.as_bytes());
            out.push(b'\n');
        }
        out
    }

    /// The same bytes computed from scratch through a full normalization.
    pub fn canonical_bytes_slow(&self) -> Vec<u8> {
        rdf::serialize_canonical(&atomic_partition(&self.to_dataset()).to_dataset())
            .expect("normalized datasets serialize")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReplayReport {
    pub transactions: usize,
    pub applied: usize,
    pub skipped: usize,
    pub mismatches: usize,
    /// Index of the first transaction after which repository and reference
    /// disagreed. Replay stops there.
    pub first_mismatch: Option<usize>,
    pub statements: usize,
}

impl ReplayReport {
    pub fn is_ok(&self) -> bool {
        self.mismatches == 0
    }
}

/// Commits `initial` and then every transaction of `log` that has an effect,
/// checking after each commit that the stored snapshot matches the reference
/// store byte for byte.
pub fn verify_replay(repo: &Repository, initial: &Dataset, log: &PatchLog) -> Result<ReplayReport> {
    let mut reference = ReferenceStore::new(initial)?;
    let mut ws = repo.working_state()?;
    if ws.head().is_some() {
        return Err(Error::Unsatisfiable("replay needs a repository without commits".into()));
    }
    let mut clock = 0i64;
    let mut sig = || {
        clock += 1;
        Signature::new("replay", clock)
    };
    let mut report = ReplayReport {
        transactions: log.len(),
        ..ReplayReport::default()
    };
    let check = |repo: &Repository, head, reference: &ReferenceStore| -> Result<bool> {
        let snapshot = repo.read_commit(&head)?.snapshot;
        Ok(repo.store().get_blob(&snapshot)? == reference.canonical_bytes())
    };
    let head = repo.commit(&mut ws, atomic_partition(initial), &sig(), "initial import")?;
    if !check(repo, head, &reference)? {
        report.mismatches = 1;
        report.first_mismatch = Some(0);
        return Ok(report);
    }
    for (i, tx) in log.transactions.iter().enumerate() {
        let reference_changed = reference.apply(&tx.added, &tx.removed)?;
        let change = change_from_quads(&tx.added, &tx.removed);
        let (next, effective) = apply_lenient(ws.dataset(), &change);
        let repo_changed = !effective.is_empty();
        if reference_changed != repo_changed {
            report.mismatches = 1;
            report.first_mismatch = Some(i);
            return Ok(report);
        }
        if !repo_changed {
            report.skipped += 1;
            continue;
        }
        let head = repo.commit(&mut ws, next, &sig(), &tx.message)?;
        report.applied += 1;
        if !check(repo, head, &reference)? {
            report.mismatches = 1;
            report.first_mismatch = Some(i);
            return Ok(report);
        }
    }
    report.statements = reference.len();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::gen::{gen_dataset, gen_patch_log};
    use crate::rdf::parse_nquads;

    fn repo() -> (tempfile::TempDir, Repository) {
        let dir = tempfile::tempdir().unwrap();
        let repo = Repository::init(dir.path().join("r")).unwrap();
        (dir, repo)
    }

    #[test]
    fn hand_built_log() {
        let (_d, repo) = repo();
        let initial = parse_nquads(b"<s> <p> <o> .\n").unwrap();
        let log = PatchLog::parse(
            "A <s> <p> _:b .\nA _:b <q> \"1\" .\nEND one\n\
             D <s> <p> <o> .\nEND two\n\
             D <s> <p> _:x .\nD _:x <q> \"1\" .\nA <t> <p> <o> .\nEND three\n",
        )
        .unwrap();
        let report = verify_replay(&repo, &initial, &log).unwrap();
        assert_eq!((report.applied, report.skipped, report.mismatches), (3, 0, 0));
        let ws = repo.working_state().unwrap();
        assert_eq!(repo.log(ws.head().unwrap()).unwrap().len(), 4);
    }

    #[test]
    fn no_effect_is_skipped() {
        let (_d, repo) = repo();
        let initial = parse_nquads(b"<s> <p> <o> .\n<s> <p> _:a .\n").unwrap();
        let log = PatchLog::parse(
            "A <s> <p> <o> .\nD <z> <p> <o> .\nEND nothing\n\
             A <s> <p> _:other .\nEND same blank class\n\
             A <n> <p> <o> .\nD <n> <p> <o> .\nEND cancels\n\
             A <t> <p> <o> .\nEND real\n",
        )
        .unwrap();
        let report = verify_replay(&repo, &initial, &log).unwrap();
        assert_eq!((report.applied, report.skipped, report.mismatches), (1, 3, 0));
    }

    #[test]
    fn generated_log() {
        let (_d, repo) = repo();
        let initial = gen_dataset(11, 400, 0.2);
        let log = gen_patch_log(12, &initial, 60);
        let report = verify_replay(&repo, &initial, &log).unwrap();
        assert!(report.is_ok(), "{report:?}");
        let mut reference = ReferenceStore::new(&initial).unwrap();
        for tx in &log.transactions {
            reference.apply(&tx.added, &tx.removed).unwrap();
        }
        assert_eq!(reference.canonical_bytes(), reference.canonical_bytes_slow());
        assert!(report.skipped >= 2);
        assert_eq!(report.applied + report.skipped, 60);
    }

    #[test]
    fn reference_collapses_isomorphic_components() {
        let d = parse_nquads(b"<s> <p> _:a .\n<s> <p> _:b .\n<s> <p> _:c .\n_:c <q> <o> .\n").unwrap();
        let r = ReferenceStore::new(&d).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.canonical_bytes(), r.canonical_bytes_slow());
    }
}
