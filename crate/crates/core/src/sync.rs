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

//! Exchanging commits with other repositories on the same filesystem.
//!
//! Remotes are listed in the `remotes` file at the repository root, one
//! `<name> <path>` per line.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::history::{Repository, Signature, WorkingState};
use crate::merge::{MergeOutcome, Strategy};
use crate::store::{check_name, CommitId, ObjectStore, RefExpect, RefName, StoreError};

pub const REMOTES_FILE: &str = "remotes";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Remote {
    pub name: String,
    pub location: PathBuf,
}

impl Repository {
    pub fn remotes(&self) -> Result<Vec<Remote>> {
        let Some(text) = self.store().read_meta(REMOTES_FILE)? else {
            return Ok(Vec::new());
        };
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|line| {
                let (name, path) = line.split_once(' ').ok_or_else(|| Error::Format {
                    what: "remotes file",
                    message: format!("expected '<name> <path>', got {line:?}"),
                })?;
                Ok(Remote {
                    name: name.to_owned(),
                    location: PathBuf::from(path),
                })
            })
            .collect()
    }

    pub fn remote(&self, name: &str) -> Result<Remote> {
        self.remotes()?
            .into_iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRemote(name.to_owned()))
    }

    /// Registers the repository at `location` as remote `name`.
    pub fn add_remote(&self, name: &str, location: &Path) -> Result<Remote> {
        check_name(name)?;
        let location = std::fs::canonicalize(location).map_err(|source| StoreError::Io {
            path: location.to_owned(),
            source,
        })?;
        ObjectStore::open(&location)?;
        let mut remotes = self.remotes()?;
        if remotes.iter().any(|r| r.name == name) {
            return Err(Error::RemoteExists(name.to_owned()));
        }
        let remote = Remote {
            name: name.to_owned(),
            location,
        };
        remotes.push(remote.clone());
        let mut text = String::new();
        for r in &remotes {
            text.push_str(&format!("{} {}\n", r.name, r.location.display()));
        }
        self.store().write_meta(REMOTES_FILE, &text)?;
        Ok(remote)
    }
}

/// Copies every commit and snapshot reachable from `head` that `dst` lacks.
/// Ancestors land before descendants, so `dst` never holds a commit whose
/// parents are missing. Returns the number of objects copied.
pub fn transfer(src: &ObjectStore, dst: &ObjectStore, head: CommitId) -> Result<usize> {
    let mut missing = Vec::new();
    let mut seen = HashSet::new();
    let mut stack = vec![head];
    while let Some(id) = stack.pop() {
        if !seen.insert(id) || dst.contains(&id.0) {
            continue;
        }
        let record = src.read_commit(&id)?;
        stack.extend(record.parents.iter().copied());
        missing.push((id, record.snapshot));
    }
    // Reversed discovery order can still put a child first in a diamond.
    let order = topo_parents_first(src, &missing)?;
    let mut copied = 0;
    for (id, snapshot) in order {
        if !dst.contains(&snapshot) {
            dst.import_object(snapshot, &src.get_blob(&snapshot)?)?;
            copied += 1;
        }
        dst.import_object(id.0, &src.get_blob(&id.0)?)?;
        copied += 1;
    }
    Ok(copied)
}

fn topo_parents_first(
    src: &ObjectStore,
    commits: &[(CommitId, crate::store::ObjectId)],
) -> Result<Vec<(CommitId, crate::store::ObjectId)>> {
    let wanted: std::collections::HashMap<CommitId, crate::store::ObjectId> =
        commits.iter().copied().collect();
    let mut done = HashSet::new();
    let mut out = Vec::with_capacity(commits.len());
    for &(start, _) in commits {
        // Iterative post-order DFS over parents restricted to `wanted`.
        let mut stack = vec![(start, false)];
        while let Some((id, expanded)) = stack.pop() {
            if done.contains(&id) {
                continue;
            }
            if expanded {
                done.insert(id);
                out.push((id, wanted[&id]));
                continue;
            }
            stack.push((id, true));
            for p in src.read_commit(&id)?.parents {
                if wanted.contains_key(&p) && !done.contains(&p) {
                    stack.push((p, false));
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FetchReport {
    pub head: CommitId,
    pub objects: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PullOutcome {
    UpToDate(CommitId),
    FastForward(CommitId),
    Merged(CommitId, MergeOutcome),
    Conflicts(MergeOutcome),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PushReport {
    pub previous: Option<CommitId>,
    pub head: CommitId,
    pub objects: usize,
}

impl PushReport {
    pub fn is_noop(&self) -> bool {
        self.previous == Some(self.head)
    }
}

impl Repository {
    /// Copies `branch` of `remote` into this repository and records it as
    /// `refs/remotes/<remote>/<branch>`. Local branches are untouched.
    pub fn fetch(&self, remote: &str, branch: &str) -> Result<FetchReport> {
        let remote_ref = RefName::remote(remote, branch)?;
        let theirs = ObjectStore::open(self.remote(remote)?.location)?;
        let head = theirs.read_ref(&RefName::branch(branch)?)?;
        let objects = transfer(&theirs, self.store(), head)?;
        self.store().set_ref(&remote_ref, head, RefExpect::Any)?;
        Ok(FetchReport { head, objects })
    }

    /// Fetches and then fast-forwards or merges the current branch.
    pub fn pull(
        &self,
        ws: &mut WorkingState,
        remote: &str,
        branch: &str,
        strategy: Strategy,
        sig: &Signature,
    ) -> Result<PullOutcome> {
        if ws.is_dirty() {
            return Err(Error::Dirty);
        }
        let fetched = self.fetch(remote, branch)?.head;
        let Some(ours) = ws.head() else {
            self.store()
                .set_ref(&RefName::branch(ws.branch())?, fetched, RefExpect::Absent)?;
            *ws = self.working_state_at(ws.branch(), fetched, self.snapshot(&fetched)?);
            return Ok(PullOutcome::FastForward(fetched));
        };
        if self.is_ancestor(fetched, ours)? {
            return Ok(PullOutcome::UpToDate(ours));
        }
        if self.is_ancestor(ours, fetched)? {
            self.store()
                .set_ref(&RefName::branch(ws.branch())?, fetched, RefExpect::Exactly(ours))?;
            *ws = self.working_state_at(ws.branch(), fetched, self.snapshot(&fetched)?);
            return Ok(PullOutcome::FastForward(fetched));
        }
        let message = format!("Merge {remote}/{branch} into {}", ws.branch());
        match self.merge(ws, fetched, strategy, sig, Some(&message))? {
            (outcome, Some(id)) => Ok(PullOutcome::Merged(id, outcome)),
            (outcome, None) => Ok(PullOutcome::Conflicts(outcome)),
        }
    }

    /// Sends `local_branch` to `branch` on `remote`. Only fast-forward
    /// updates are accepted.
    pub fn push(&self, local_branch: &str, remote: &str, branch: &str) -> Result<PushReport> {
        let head = self.store().read_ref(&RefName::branch(local_branch)?)?;
        let theirs = ObjectStore::open(self.remote(remote)?.location)?;
        let target = RefName::branch(branch)?;
        let previous = theirs.try_read_ref(&target)?;
        let non_ff = || Error::NonFastForward {
            remote: remote.to_owned(),
            branch: branch.to_owned(),
        };
        if let Some(prev) = previous {
            if prev == head {
                return Ok(PushReport { previous, head, objects: 0 });
            }
            if !self.store().contains(&prev.0) || !self.is_ancestor(prev, head)? {
                return Err(non_ff());
            }
        }
        let objects = transfer(self.store(), &theirs, head)?;
        let expect = previous.map_or(RefExpect::Absent, RefExpect::Exactly);
        theirs.set_ref(&target, head, expect).map_err(|e| match e {
            StoreError::StaleRef { .. } => non_ff(),
            other => other.into(),
        })?;
        self.store()
            .set_ref(&RefName::remote(remote, branch)?, head, RefExpect::Any)?;
        Ok(PushReport { previous, head, objects })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::{atomic_partition, AtomicPartition};
    use crate::rdf::parse_nquads;

    fn part(text: &str) -> AtomicPartition {
        atomic_partition(&parse_nquads(text.as_bytes()).unwrap())
    }

    fn sig(t: i64) -> Signature {
        Signature::new("tester", t)
    }

    fn pair() -> (tempfile::TempDir, Repository, Repository) {
        let dir = tempfile::tempdir().unwrap();
        let a = Repository::init(dir.path().join("a")).unwrap();
        let b = Repository::init(dir.path().join("b")).unwrap();
        a.add_remote("origin", &dir.path().join("b")).unwrap();
        b.add_remote("origin", &dir.path().join("a")).unwrap();
        (dir, a, b)
    }

    #[test]
    fn remotes_file() {
        let (dir, a, _) = pair();
        assert_eq!(a.remotes().unwrap().len(), 1);
        assert!(matches!(
            a.add_remote("origin", &dir.path().join("b")),
            Err(Error::RemoteExists(_))
        ));
        assert!(a.add_remote("nowhere", &dir.path().join("missing")).is_err());
        assert!(matches!(a.fetch("upstream", "main"), Err(Error::UnknownRemote(_))));
    }

    #[test]
    fn fetch_counts_objects() {
        let (_dir, a, b) = pair();
        let mut ws = b.working_state().unwrap();
        b.commit(&mut ws, part("<a> <p> <o> ."), &sig(1), "1").unwrap();
        b.commit(&mut ws, part("<a> <p> <o> .\n<b> <p> <o> ."), &sig(2), "2").unwrap();
        let two = b.commit(&mut ws, part("<b> <p> <o> ."), &sig(3), "3").unwrap();
        let first = a.fetch("origin", "main").unwrap();
        assert_eq!(first, FetchReport { head: two, objects: 6 });
        assert_eq!(a.store().read_ref(&RefName::remote("origin", "main").unwrap()).unwrap(), two);
        assert!(a.store().try_read_ref(&RefName::branch("main").unwrap()).unwrap().is_none());
        assert_eq!(a.fetch("origin", "main").unwrap().objects, 0);

        let four = b.commit(&mut ws, part("<c> <p> <o> ."), &sig(4), "4").unwrap();
        assert_eq!(a.fetch("origin", "main").unwrap(), FetchReport { head: four, objects: 2 });
        // Back to an earlier state: the snapshot blob is already present.
        b.commit(&mut ws, part("<b> <p> <o> ."), &sig(5), "5").unwrap();
        assert_eq!(a.fetch("origin", "main").unwrap().objects, 1);
        for id in a.store().object_ids().unwrap() {
            a.store().get_blob(&id).unwrap();
        }
    }

    #[test]
    fn pull_fast_forward_and_noop() {
        let (_dir, a, b) = pair();
        let mut wb = b.working_state().unwrap();
        let one = b.commit(&mut wb, part("<a> <p> <o> ."), &sig(1), "1").unwrap();
        let mut wa = a.working_state().unwrap();
        assert_eq!(a.pull(&mut wa, "origin", "main", Strategy::ThreeWay, &sig(2)).unwrap(), PullOutcome::FastForward(one));
        let two = b.commit(&mut wb, part("<b> <p> <o> ."), &sig(3), "2").unwrap();
        assert_eq!(a.pull(&mut wa, "origin", "main", Strategy::ThreeWay, &sig(4)).unwrap(), PullOutcome::FastForward(two));
        assert_eq!(wa.dataset(), &part("<b> <p> <o> ."));
        assert_eq!(a.pull(&mut wa, "origin", "main", Strategy::ThreeWay, &sig(5)).unwrap(), PullOutcome::UpToDate(two));
    }

    #[test]
    fn push_fast_forward_only() {
        let (_dir, a, b) = pair();
        let mut wa = a.working_state().unwrap();
        let one = a.commit(&mut wa, part("<a> <p> <o> ."), &sig(1), "1").unwrap();
        let r = a.push("main", "origin", "main").unwrap();
        assert_eq!((r.previous, r.head, r.objects), (None, one, 2));
        assert!(a.push("main", "origin", "main").unwrap().is_noop());

        let mut wb = b.working_state().unwrap();
        b.commit(&mut wb, part("<b> <p> <o> ."), &sig(2), "b").unwrap();
        a.commit(&mut wa, part("<c> <p> <o> ."), &sig(3), "a").unwrap();
        assert!(matches!(a.push("main", "origin", "main"), Err(Error::NonFastForward { .. })));
    }

    #[test]
    fn diverged_pull_merges_and_converges() {
        let (_dir, a, b) = pair();
        let mut wa = a.working_state().unwrap();
        a.commit(&mut wa, part("<s> <p> <o> ."), &sig(1), "base").unwrap();
        a.push("main", "origin", "main").unwrap();
        let mut wb = b.working_state().unwrap();
        b.pull(&mut wb, "origin", "main", Strategy::ThreeWay, &sig(2)).unwrap();

        a.commit(&mut wa, part("<s> <p> <o> .\n<a> <p> _:x ."), &sig(3), "a").unwrap();
        b.commit(&mut wb, part("<b> <p> <o> ."), &sig(4), "b").unwrap();

        let PullOutcome::Merged(id, _) = a.pull(&mut wa, "origin", "main", Strategy::ThreeWay, &sig(5)).unwrap() else {
            panic!("expected a merge");
        };
        assert_eq!(a.snapshot(&id).unwrap(), part("<a> <p> _:y .\n<b> <p> <o> ."));
        a.push("main", "origin", "main").unwrap();
        // The push moved b's checked-out branch, so its working state is stale.
        assert!(b.pull(&mut wb, "origin", "main", Strategy::ThreeWay, &sig(6)).is_err());
        let mut wb = b.working_state().unwrap();
        assert_eq!(b.pull(&mut wb, "origin", "main", Strategy::ThreeWay, &sig(6)).unwrap(), PullOutcome::UpToDate(id));
        assert_eq!(wa.head(), wb.head());
        assert_eq!(wa.dataset(), wb.dataset());
    }

    #[test]
    fn touch_pull_with_conflict_leaves_ref() {
        let (_dir, a, b) = pair();
        let g = "<s> <q> \"g\" .";
        let mut wa = a.working_state().unwrap();
        a.commit(&mut wa, part("<s> <p> <o> ."), &sig(1), "a").unwrap();
        a.push("main", "origin", "main").unwrap();
        let mut wb = b.working_state().unwrap();
        b.pull(&mut wb, "origin", "main", Strategy::Touch, &sig(2)).unwrap();
        a.commit(&mut wa, part(&format!("<s> <p> <o> .\n{g}")), &sig(3), "b").unwrap();
        a.commit(&mut wa, part("<s> <p> <o> .\n<s> <p> <o3> ."), &sig(4), "c").unwrap();
        b.commit(&mut wb, part(&format!("<s> <p> <o> .\n{g}")), &sig(5), "d").unwrap();
        let before = wa.head();
        let PullOutcome::Conflicts(outcome) = a.pull(&mut wa, "origin", "main", Strategy::Touch, &sig(6)).unwrap() else {
            panic!("expected conflicts");
        };
        assert_eq!(outcome.conflicts.theirs_added_ours_removed, part(g));
        assert_eq!(wa.head(), before);
        assert_eq!(a.store().read_ref(&RefName::branch("main").unwrap()).unwrap(), before.unwrap());
    }
}
