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

//! Merge strategies over atomic partitions.
//!
//! All set operations compare classes by hash. `union`, `ours` and `theirs`
//! need no common ancestor. `three-way` keeps what both sides share plus what
//! either side added over the base, and never conflicts. `touch` additionally
//! folds every step change along each side's first-parent path and reports
//! classes one side (re-)added while the other removed them.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::atomic::{AtomicPartition, ClassHash};
use crate::delta::diff_partitions;
use crate::error::{Error, Result};
use crate::history::{Repository, Signature, WorkingState};
use crate::rdf;
use crate::store::CommitId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Union,
    Ours,
    Theirs,
    ThreeWay,
    Touch,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Union,
        Strategy::Ours,
        Strategy::Theirs,
        Strategy::ThreeWay,
        Strategy::Touch,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Union => "union",
            Strategy::Ours => "ours",
            Strategy::Theirs => "theirs",
            Strategy::ThreeWay => "three-way",
            Strategy::Touch => "touch",
        }
    }

    pub fn needs_base(self) -> bool {
        matches!(self, Strategy::ThreeWay | Strategy::Touch)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::UnknownStrategy(s.to_owned()))
    }
}

/// Strategy tag recorded on merge commits finished by manual resolution.
pub const MANUAL_RESOLUTION_TAG: &str = "touch+manual";

/// Classes touched along one side of a merge: `plus` were last added, `minus`
/// were last removed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TouchSets {
    pub plus: AtomicPartition,
    pub minus: AtomicPartition,
}

impl TouchSets {
    /// Folds one parent-to-child step into the sets.
    pub fn fold_step(&mut self, positive: &AtomicPartition, negative: &AtomicPartition) {
        self.plus = self.plus.difference(negative).union(positive);
        self.minus = self.minus.difference(positive).union(negative);
    }
}

/// Classes the two sides disagree on.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Conflicts {
    /// Added on our side, removed on theirs.
    pub ours_added_theirs_removed: AtomicPartition,
    /// Added on their side, removed on ours.
    pub theirs_added_ours_removed: AtomicPartition,
}

impl Conflicts {
    pub fn is_empty(&self) -> bool {
        self.ours_added_theirs_removed.is_empty() && self.theirs_added_ours_removed.is_empty()
    }

    pub fn len(&self) -> usize {
        self.ours_added_theirs_removed.len() + self.theirs_added_ours_removed.len()
    }

    pub fn all(&self) -> AtomicPartition {
        self.ours_added_theirs_removed.union(&self.theirs_added_ours_removed)
    }

    /// Conflict file: one section per side, each class as a `class <hash>`
    /// line followed by its canonical N-Quads.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (title, side) in [
            ("ours-added-theirs-removed", &self.ours_added_theirs_removed),
            ("theirs-added-ours-removed", &self.theirs_added_ours_removed),
        ] {
            out.push_str(&format!("## {title}\n"));
            for (hash, graph) in side.iter() {
                out.push_str(&format!("class {hash}\n"));
                let bytes = rdf::sorted_lines(graph.quads().iter());
                out.push_str(std::str::from_utf8(&bytes).expect("UTF-8"));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Conflicts> {
        let bad = |line: usize, m: &str| Error::Format {
            what: "conflict file",
            message: format!("line {line}: {m}"),
        };
        // (section, declared hash, statements, line of the class header)
        let mut blocks: Vec<(usize, ClassHash, rdf::Dataset, usize)> = Vec::new();
        let mut section = None;
        for (idx, line) in text.lines().enumerate() {
            let n = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            if let Some(title) = line.strip_prefix("## ") {
                section = Some(match title.trim() {
                    "ours-added-theirs-removed" => 0,
                    "theirs-added-ours-removed" => 1,
                    other => return Err(bad(n, &format!("unknown section {other:?}"))),
                });
            } else if let Some(hash) = line.strip_prefix("class ") {
                let s = section.ok_or_else(|| bad(n, "class outside a section"))?;
                let hash = hash.trim().parse().map_err(|_| bad(n, "invalid class hash"))?;
                blocks.push((s, hash, rdf::Dataset::new(), n));
            } else {
                let quad = rdf::parse_line(line)
                    .map_err(|m| bad(n, &m))?
                    .ok_or_else(|| bad(n, "expected a statement"))?;
                blocks
                    .last_mut()
                    .ok_or_else(|| bad(n, "statement outside a class block"))?
                    .2
                    .insert(quad);
            }
        }
        let mut sides = [AtomicPartition::new(), AtomicPartition::new()];
        for (s, hash, quads, n) in blocks {
            let graph = crate::atomic::AtomicGraph::new(quads)
                .map_err(|e| bad(n, &e.to_string()))?;
            let (actual, _) = sides[s].insert(&graph);
            if actual != hash {
                return Err(bad(n, &format!("class {hash} does not match its statements")));
            }
        }
        let [ours_added_theirs_removed, theirs_added_ours_removed] = sides;
        Ok(Conflicts {
            ours_added_theirs_removed,
            theirs_added_ours_removed,
        })
    }
}

/// Result of merging two commits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeOutcome {
    pub result: AtomicPartition,
    pub conflicts: Conflicts,
    pub strategy: Strategy,
    pub base: Option<CommitId>,
    pub ours: CommitId,
    pub theirs: CommitId,
}

pub fn merge_union(a: &AtomicPartition, b: &AtomicPartition) -> AtomicPartition {
    a.union(b)
}

pub fn merge_ours(a: &AtomicPartition, _b: &AtomicPartition) -> AtomicPartition {
    a.clone()
}

pub fn merge_theirs(_a: &AtomicPartition, b: &AtomicPartition) -> AtomicPartition {
    b.clone()
}

/// `(A ∩ B) ∪ (A ∖ base) ∪ (B ∖ base)` on classes.
pub fn merge_three_way(
    base: &AtomicPartition,
    a: &AtomicPartition,
    b: &AtomicPartition,
) -> AtomicPartition {
    a.intersection(b)
        .union(&a.difference(base))
        .union(&b.difference(base))
}

/// Folds the step changes along the first-parent path from `ancestor` up to
/// `tip`.
pub fn touch_accumulate(repo: &Repository, tip: CommitId, ancestor: CommitId) -> Result<TouchSets> {
    let mut path = vec![tip];
    let mut cursor = tip;
    while cursor != ancestor {
        let record = repo.read_commit(&cursor)?;
        match record.parents[..] {
            [] => return Err(Error::AncestorNotOnPath { tip, ancestor }),
            [parent] => {
                path.push(parent);
                cursor = parent;
            }
            _ => {
                return Err(Error::PathThroughMerge {
                    tip,
                    ancestor,
                    merge: cursor,
                })
            }
        }
    }
    let mut sets = TouchSets::default();
    let mut parent_state = repo.snapshot(&ancestor)?;
    for child in path.iter().rev().skip(1) {
        let child_state = repo.snapshot(child)?;
        let step = diff_partitions(&parent_state, &child_state);
        sets.fold_step(&step.positive, &step.negative);
        parent_state = child_state;
    }
    Ok(sets)
}

/// Touch merge of `ours` and `theirs` against their merge base.
pub fn merge_touch(repo: &Repository, ours: CommitId, theirs: CommitId) -> Result<MergeOutcome> {
    let base = repo
        .find_merge_base(ours, theirs)?
        .ok_or(Error::NoMergeBase(ours, theirs))?;
    let ours_state = repo.snapshot(&ours)?;
    let theirs_state = repo.snapshot(&theirs)?;
    let a = touch_accumulate(repo, ours, base)?;
    let b = touch_accumulate(repo, theirs, base)?;
    Ok(touch_outcome(&ours_state, &theirs_state, &a, &b, base, ours, theirs))
}

fn touch_outcome(
    ours_state: &AtomicPartition,
    theirs_state: &AtomicPartition,
    a: &TouchSets,
    b: &TouchSets,
    base: CommitId,
    ours: CommitId,
    theirs: CommitId,
) -> MergeOutcome {
    let shared = ours_state.intersection(theirs_state);
    // Both tips hold the class in the end, so there is nothing to decide.
    let conflicts = Conflicts {
        ours_added_theirs_removed: a.plus.intersection(&b.minus).difference(&shared),
        theirs_added_ours_removed: b.plus.intersection(&a.minus).difference(&shared),
    };
    let pending = conflicts.all();
    let result = shared
        .union(&a.plus.difference(&b.minus))
        .union(&b.plus.difference(&a.minus))
        .difference(&pending);
    MergeOutcome {
        result,
        conflicts,
        strategy: Strategy::Touch,
        base: Some(base),
        ours,
        theirs,
    }
}

/// Computes the merge of two commits without writing anything.
pub fn compute_merge(
    repo: &Repository,
    ours: CommitId,
    theirs: CommitId,
    strategy: Strategy,
) -> Result<MergeOutcome> {
    if strategy == Strategy::Touch {
        return merge_touch(repo, ours, theirs);
    }
    let a = repo.snapshot(&ours)?;
    let b = repo.snapshot(&theirs)?;
    let (result, base) = match strategy {
        Strategy::Union => (merge_union(&a, &b), None),
        Strategy::Ours => (merge_ours(&a, &b), None),
        Strategy::Theirs => (merge_theirs(&a, &b), None),
        Strategy::ThreeWay => {
            let base = repo
                .find_merge_base(ours, theirs)?
                .ok_or(Error::NoMergeBase(ours, theirs))?;
            (merge_three_way(&repo.snapshot(&base)?, &a, &b), Some(base))
        }
        Strategy::Touch => unreachable!("handled above"),
    };
    Ok(MergeOutcome {
        result,
        conflicts: Conflicts::default(),
        strategy,
        base,
        ours,
        theirs,
    })
}

impl Repository {
    /// Merges `theirs` into the current branch.
    ///
    /// Writes a two-parent merge commit when the outcome has no conflicts.
    /// Nothing is written when there are conflicts, or when `theirs` is
    /// already contained in the current head.
    pub fn merge(
        &self,
        ws: &mut WorkingState,
        theirs: CommitId,
        strategy: Strategy,
        sig: &Signature,
        message: Option<&str>,
    ) -> Result<(MergeOutcome, Option<CommitId>)> {
        let ours = ws.head().ok_or_else(|| Error::UnbornBranch(ws.branch().to_owned()))?;
        if ws.is_dirty() {
            return Err(Error::Dirty);
        }
        let outcome = compute_merge(self, ours, theirs, strategy)?;
        if !outcome.conflicts.is_empty() || self.is_ancestor(theirs, ours)? {
            return Ok((outcome, None));
        }
        let message = message
            .map(str::to_owned)
            .unwrap_or_else(|| format!("Merge {theirs} into {}", ws.branch()));
        let id = self.finish_merge(ws, &outcome.result, ours, theirs, sig, &message, strategy.as_str())?;
        Ok((outcome, Some(id)))
    }

    /// Completes a conflicted merge. Every conflict class must be listed in
    /// exactly one of `keep` and `drop`.
    pub fn resolve(
        &self,
        ws: &mut WorkingState,
        outcome: &MergeOutcome,
        keep: &BTreeSet<ClassHash>,
        drop: &BTreeSet<ClassHash>,
        sig: &Signature,
    ) -> Result<CommitId> {
        let all = outcome.conflicts.all();
        if let Some(h) = keep.intersection(drop).next() {
            return Err(Error::Resolution(format!("class {h} is both kept and dropped")));
        }
        if let Some(h) = keep.iter().chain(drop).find(|h| !all.contains(h)) {
            return Err(Error::Resolution(format!("class {h} is not in conflict")));
        }
        if let Some(h) = all.hashes().find(|h| !keep.contains(h) && !drop.contains(h)) {
            return Err(Error::Resolution(format!("class {h} is not resolved")));
        }
        if ws.head() != Some(outcome.ours) {
            return Err(Error::Resolution(format!(
                "branch {} moved since the merge was computed",
                ws.branch()
            )));
        }
        let kept = all.filter(|h| keep.contains(h));
        let result = outcome.result.union(&kept);
        let message = format!("Merge {} into {} (resolved)", outcome.theirs, ws.branch());
        self.finish_merge(ws, &result, outcome.ours, outcome.theirs, sig, &message, MANUAL_RESOLUTION_TAG)
    }

    #[allow(clippy::too_many_arguments)]
    fn finish_merge(
        &self,
        ws: &mut WorkingState,
        result: &AtomicPartition,
        ours: CommitId,
        theirs: CommitId,
        sig: &Signature,
        message: &str,
        tag: &str,
    ) -> Result<CommitId> {
        let id = self.write_commit_on(
            ws.branch(),
            Some(ours),
            result,
            vec![ours, theirs],
            sig,
            message,
            Some(tag),
        )?;
        *ws = self.working_state_at(ws.branch(), id, result.clone());
        Ok(id)
    }
}

/// Parsed `keep <hash>` / `drop <hash>` lines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Resolution {
    pub keep: BTreeSet<ClassHash>,
    pub drop: BTreeSet<ClassHash>,
}

impl Resolution {
    pub fn parse(text: &str) -> Result<Resolution> {
        let mut out = Resolution::default();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::Format {
                what: "resolution file",
                message: format!("line {}: expected 'keep <hash>' or 'drop <hash>'", idx + 1),
            };
            let (verb, hash) = line.split_once(' ').ok_or_else(bad)?;
            let hash: ClassHash = hash.trim().parse().map_err(|_| bad())?;
            let set = match verb {
                "keep" => &mut out.keep,
                "drop" => &mut out.drop,
                _ => return Err(bad()),
            };
            set.insert(hash);
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for h in &self.keep {
            out.push_str(&format!("keep {h}\n"));
        }
        for h in &self.drop {
            out.push_str(&format!("drop {h}\n"));
        }
        out
    }
}

/// A conflicted merge waiting for resolution, persisted in the repository.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PendingMerge {
    pub branch: String,
    pub ours: CommitId,
    pub theirs: CommitId,
    pub strategy: Strategy,
}

pub const MERGE_STATE_FILE: &str = "MERGE_STATE";
pub const CONFLICTS_FILE: &str = "CONFLICTS";

impl PendingMerge {
    pub fn to_text(&self) -> String {
        format!(
            "branch {}\nours {}\ntheirs {}\nstrategy {}\n",
            self.branch, self.ours, self.theirs, self.strategy
        )
    }

    pub fn from_text(text: &str) -> Result<PendingMerge> {
        let bad = |m: &str| Error::Format {
            what: "merge state",
            message: m.to_owned(),
        };
        let mut fields = std::collections::HashMap::new();
        for line in text.lines() {
            let (k, v) = line.split_once(' ').ok_or_else(|| bad(line))?;
            fields.insert(k, v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| bad(&format!("missing {k}")));
        Ok(PendingMerge {
            branch: get("branch")?.to_owned(),
            ours: get("ours")?.parse()?,
            theirs: get("theirs")?.parse()?,
            strategy: get("strategy")?.parse()?,
        })
    }
}

impl Repository {
    pub fn save_pending_merge(&self, pending: &PendingMerge, conflicts: &Conflicts) -> Result<()> {
        self.store().write_meta(CONFLICTS_FILE, &conflicts.to_text())?;
        self.store().write_meta(MERGE_STATE_FILE, &pending.to_text())?;
        Ok(())
    }

    pub fn pending_merge(&self) -> Result<Option<PendingMerge>> {
        self.store()
            .read_meta(MERGE_STATE_FILE)?
            .map(|t| PendingMerge::from_text(&t))
            .transpose()
    }

    pub fn clear_pending_merge(&self) -> Result<()> {
        self.store().remove_meta(MERGE_STATE_FILE)?;
        self.store().remove_meta(CONFLICTS_FILE)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::atomic_partition;
    use crate::rdf::parse_nquads;

    fn part(text: &str) -> AtomicPartition {
        atomic_partition(&parse_nquads(text.as_bytes()).unwrap())
    }

    fn sig(t: i64) -> Signature {
        Signature::new("tester", t)
    }

    #[test]
    fn strategy_names() {
        for s in Strategy::ALL {
            assert_eq!(s.as_str().parse::<Strategy>().unwrap(), s);
        }
        assert!(matches!("octopus".parse::<Strategy>(), Err(Error::UnknownStrategy(_))));
    }

    #[test]
    fn naive_strategies() {
        let a = part("<t1> <p> <o> .");
        let b = part("<t2> <p> <o> .");
        assert_eq!(merge_union(&a, &b), part("<t1> <p> <o> .\n<t2> <p> <o> ."));
        assert_eq!(merge_union(&a, &a), a);
        assert_eq!(merge_ours(&a, &b), a);
        assert_eq!(merge_theirs(&a, &b), b);
        let blank_a = part("<s> <p> _:x .");
        let blank_b = part("<s> <p> _:y .");
        assert_eq!(merge_union(&blank_a, &blank_b).len(), 1);
    }

    #[test]
    fn three_way_set_formula() {
        let base = part("<t1> <p> <o> .\n<t2> <p> <o> .");
        let a = part("<t1> <p> <o> .\n<t2> <p> <o> .\n<t3> <p> <o> .");
        let b = part("<t1> <p> <o> .");
        assert_eq!(merge_three_way(&base, &a, &b), part("<t1> <p> <o> .\n<t3> <p> <o> ."));
        assert_eq!(merge_three_way(&base, &base, &base), base);
    }

    #[test]
    fn touch_fold_rules() {
        let t = part("<t> <p> <o> .");
        let none = AtomicPartition::new();
        let mut sets = TouchSets::default();
        sets.fold_step(&t, &none);
        assert_eq!(sets, TouchSets { plus: t.clone(), minus: none.clone() });
        sets.fold_step(&none, &t);
        assert_eq!(sets, TouchSets { plus: none.clone(), minus: t.clone() });
        sets.fold_step(&t, &none);
        assert_eq!(sets, TouchSets { plus: t.clone(), minus: none });
    }

    #[test]
    fn conflict_file_roundtrip() {
        let conflicts = Conflicts {
            ours_added_theirs_removed: part("<g> <p> <o> .\n<s> <p> _:b .\n_:b <q> \"x\" ."),
            theirs_added_ours_removed: part("<h> <p> <o> <http://g> ."),
        };
        let text = conflicts.to_text();
        assert!(text.starts_with("## ours-added-theirs-removed\nclass "));
        assert_eq!(Conflicts::from_text(&text).unwrap(), conflicts);
        assert_eq!(Conflicts::from_text(&Conflicts::default().to_text()).unwrap(), Conflicts::default());
        let tampered = text.replace("<g> <p> <o> .", "<g> <p> <z> .");
        assert!(Conflicts::from_text(&tampered).is_err());
    }

    #[test]
    fn resolution_parsing() {
        let h = *part("<g> <p> <o> .").hashes().next().unwrap();
        let text = format!("# pick\nkeep {h}\n\n");
        let r = Resolution::parse(&text).unwrap();
        assert!(r.keep.contains(&h) && r.drop.is_empty());
        assert_eq!(Resolution::parse(&r.to_text()).unwrap(), r);
        assert!(Resolution::parse("keep nothex").is_err());
        assert!(Resolution::parse(&format!("maybe {h}")).is_err());
    }

    #[test]
    fn merge_same_commit_refuses_commit() {
        let dir = tempfile::tempdir().unwrap();
        let repo = Repository::init(dir.path().join("r")).unwrap();
        let mut ws = repo.working_state().unwrap();
        let x = repo.commit(&mut ws, part("<a> <p> <o> ."), &sig(1), "x").unwrap();
        for s in Strategy::ALL {
            let (outcome, id) = repo.merge(&mut ws, x, s, &sig(2), None).unwrap();
            assert_eq!(outcome.result, part("<a> <p> <o> ."));
            assert!(id.is_none());
        }
    }

    struct Diverged {
        _dir: tempfile::TempDir,
        repo: Repository,
        b: CommitId,
        c: CommitId,
        d: CommitId,
        g: AtomicPartition,
    }

    // a: base. b adds g on top of a, c removes it again; d adds g on a
    // second branch from a.
    fn diverged() -> Diverged {
        let dir = tempfile::tempdir().unwrap();
        let repo = Repository::init(dir.path().join("r")).unwrap();
        let mut ws = repo.working_state().unwrap();
        let base = "<s> <p> <o1> .\n<s> <p> <o2> .";
        let g = "<s> <q> _:n .\n_:n <r> \"g\" .";
        let a = repo.commit(&mut ws, part(base), &sig(1), "a").unwrap();
        let b = repo
            .commit(&mut ws, part(&format!("{base}\n{g}")), &sig(2), "b")
            .unwrap();
        let c = repo
            .commit(&mut ws, part(&format!("{base}\n<s> <p> <o3> .")), &sig(3), "c")
            .unwrap();
        repo.branch("other", a).unwrap();
        let mut other = repo.checkout(&ws, "other", false).unwrap();
        let d = repo
            .commit(&mut other, part(&format!("{base}\n{g}\n<s> <p> <o4> .")), &sig(4), "d")
            .unwrap();
        repo.checkout(&other, "main", false).unwrap();
        Diverged { _dir: dir, repo, b, c, d, g: part(g) }
    }

    #[test]
    fn three_way_keeps_readded_graph() {
        let f = diverged();
        let out = compute_merge(&f.repo, f.c, f.d, Strategy::ThreeWay).unwrap();
        assert!(f.g.is_subset(&out.result));
        assert!(out.conflicts.is_empty());
    }

    #[test]
    fn touch_reports_readded_graph() {
        let f = diverged();
        let base = f.repo.find_merge_base(f.c, f.d).unwrap().unwrap();
        let ours = touch_accumulate(&f.repo, f.c, base).unwrap();
        assert!(ours.plus.intersection(&f.g).is_empty());
        assert!(f.g.is_subset(&ours.minus));
        let out = merge_touch(&f.repo, f.c, f.d).unwrap();
        assert!(out.conflicts.ours_added_theirs_removed.is_empty());
        assert_eq!(out.conflicts.theirs_added_ours_removed, f.g);
        assert!(out.result.is_disjoint(&f.g));
        assert!(out.result.contains(part("<s> <p> <o3> .").hashes().next().unwrap()));
        assert!(out.result.contains(part("<s> <p> <o4> .").hashes().next().unwrap()));
    }

    #[test]
    fn touch_merge_writes_nothing_then_resolves() {
        let f = diverged();
        let mut ws = f.repo.working_state().unwrap();
        let (outcome, id) = f.repo.merge(&mut ws, f.d, Strategy::Touch, &sig(5), None).unwrap();
        assert!(id.is_none());
        assert_eq!(ws.head(), Some(f.c));
        let g_hash = *f.g.hashes().next().unwrap();

        let omitted = f.repo.resolve(&mut ws, &outcome, &BTreeSet::new(), &BTreeSet::new(), &sig(5));
        assert!(matches!(omitted, Err(Error::Resolution(_))));
        let both = BTreeSet::from([g_hash]);
        assert!(f.repo.resolve(&mut ws, &outcome, &both, &both, &sig(5)).is_err());

        let mut drop_ws = ws.clone();
        let dropped = f
            .repo
            .resolve(&mut drop_ws, &outcome, &BTreeSet::new(), &both, &sig(5))
            .unwrap();
        let record = f.repo.read_commit(&dropped).unwrap();
        assert_eq!(record.parents, vec![f.c, f.d]);
        assert_eq!(record.strategy.as_deref(), Some(MANUAL_RESOLUTION_TAG));
        assert!(f.repo.snapshot(&dropped).unwrap().is_disjoint(&f.g));

        let three_way = compute_merge(&f.repo, f.c, f.d, Strategy::ThreeWay).unwrap().result;
        let kept = outcome.result.union(&outcome.conflicts.all());
        assert_eq!(kept, three_way);
    }

    #[test]
    fn touch_accumulate_add_remove_readd() {
        let dir = tempfile::tempdir().unwrap();
        let repo = Repository::init(dir.path().join("r")).unwrap();
        let mut ws = repo.working_state().unwrap();
        let base = "<s> <p> <o> .";
        let with_t = "<s> <p> <o> .\n<t> <p> <o> .";
        let a = repo.commit(&mut ws, part(base), &sig(1), "a").unwrap();
        let one = repo.commit(&mut ws, part(with_t), &sig(2), "1").unwrap();
        assert_eq!(
            touch_accumulate(&repo, one, a).unwrap(),
            TouchSets { plus: part("<t> <p> <o> ."), minus: AtomicPartition::new() }
        );
        repo.commit(&mut ws, part(base), &sig(3), "2").unwrap();
        let three = repo.commit(&mut ws, part(with_t), &sig(4), "3").unwrap();
        let sets = touch_accumulate(&repo, three, a).unwrap();
        assert_eq!(sets.plus, part("<t> <p> <o> ."));
        assert!(sets.minus.is_empty());
        assert!(matches!(
            touch_accumulate(&repo, a, three),
            Err(Error::AncestorNotOnPath { .. })
        ));
    }

    #[test]
    fn touch_disjoint_matches_three_way() {
        let dir = tempfile::tempdir().unwrap();
        let repo = Repository::init(dir.path().join("r")).unwrap();
        let mut ws = repo.working_state().unwrap();
        let a = repo
            .commit(&mut ws, part("<a> <p> <o> .\n<b> <p> <o> .\n<c> <p> <o> ."), &sig(1), "a")
            .unwrap();
        let ours = repo
            .commit(&mut ws, part("<a> <p> <o> .\n<c> <p> <o> .\n<d> <p> <o> ."), &sig(2), "ours")
            .unwrap();
        repo.branch("side", a).unwrap();
        let mut side = repo.checkout(&ws, "side", false).unwrap();
        let theirs = repo
            .commit(&mut side, part("<a> <p> <o> .\n<b> <p> <o> .\n<e> <p> _:x ."), &sig(3), "theirs")
            .unwrap();
        let touch = merge_touch(&repo, ours, theirs).unwrap();
        assert!(touch.conflicts.is_empty());
        let three = compute_merge(&repo, ours, theirs, Strategy::ThreeWay).unwrap();
        assert_eq!(touch.result, three.result);
        assert_eq!(touch.result, part("<a> <p> <o> .\n<d> <p> <o> .\n<e> <p> _:x ."));
    }

    #[test]
    fn merge_commit_shape_and_path_rejection() {
        let f = diverged();
        let mut ws = f.repo.working_state().unwrap();
        let (outcome, id) = f.repo.merge(&mut ws, f.d, Strategy::ThreeWay, &sig(6), None).unwrap();
        let id = id.unwrap();
        let record = f.repo.read_commit(&id).unwrap();
        assert_eq!(record.parents, vec![f.c, f.d]);
        assert_eq!(record.strategy.as_deref(), Some("three-way"));
        assert_eq!(f.repo.snapshot(&id).unwrap(), outcome.result);
        assert_eq!(ws.head(), Some(id));
        assert!(matches!(
            touch_accumulate(&f.repo, id, f.b),
            Err(Error::PathThroughMerge { .. })
        ));
    }

    #[test]
    fn base_required_only_for_three_way_and_touch() {
        let f = diverged();
        let other = tempfile::tempdir().unwrap();
        let lone = Repository::init(other.path().join("r")).unwrap();
        let mut ws = lone.working_state().unwrap();
        lone.commit(&mut ws, part("<z> <p> <o> ."), &sig(9), "z").unwrap();
        let z = ws.head().unwrap();
        let bytes = lone.store().get_blob(&lone.read_commit(&z).unwrap().snapshot).unwrap();
        f.repo.store().put_blob(&bytes).unwrap();
        let z = f.repo.store().write_commit(&lone.read_commit(&z).unwrap()).unwrap();
        for s in Strategy::ALL {
            let r = compute_merge(&f.repo, f.c, z, s);
            assert_eq!(r.is_err(), s.needs_base(), "{s}");
        }
    }

    #[test]
    fn pending_merge_roundtrip() {
        let id: CommitId = "a".repeat(64).parse().unwrap();
        let p = PendingMerge {
            branch: "main".into(),
            ours: id,
            theirs: id,
            strategy: Strategy::Touch,
        };
        assert_eq!(PendingMerge::from_text(&p.to_text()).unwrap(), p);
    }
}
