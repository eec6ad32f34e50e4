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

//! Commits, branches and the commit graph.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet, VecDeque};
use std::path::Path;
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::atomic::{atomic_partition, AtomicPartition};
use crate::delta::diff_partitions;
use crate::error::{Error, Result};
use crate::merge;
use crate::rdf::{parse_nquads, Dataset};
use crate::store::{CommitId, CommitRecord, ObjectId, ObjectStore, RefExpect, RefName};

/// Who made a commit and when (Unix seconds, UTC).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub author: String,
    pub timestamp: i64,
}

impl Signature {
    pub fn new(author: impl Into<String>, timestamp: i64) -> Self {
        Signature {
            author: author.into(),
            timestamp,
        }
    }

    pub fn now(author: impl Into<String>) -> Self {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs() as i64);
        Signature::new(author, secs)
    }
}

/// The checked-out branch, its head commit and the materialized dataset.
#[derive(Clone, Debug)]
pub struct WorkingState {
    branch: String,
    head: Option<CommitId>,
    dataset: AtomicPartition,
    dirty: bool,
}

impl WorkingState {
    pub fn branch(&self) -> &str {
        &self.branch
    }

    pub fn head(&self) -> Option<CommitId> {
        self.head
    }

    pub fn dataset(&self) -> &AtomicPartition {
        &self.dataset
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    /// Replaces the working dataset without committing it.
    pub fn stage(&mut self, dataset: AtomicPartition) {
        self.dirty = true;
        self.dataset = dataset;
    }
}

const SNAPSHOT_CACHE_LIMIT: usize = 16;

pub struct Repository {
    store: ObjectStore,
    snapshots: Mutex<HashMap<ObjectId, AtomicPartition>>,
}

impl Repository {
    pub fn init(path: impl AsRef<Path>) -> Result<Repository> {
        Ok(Repository::from_store(ObjectStore::init(path)?))
    }

    pub fn open(path: impl AsRef<Path>) -> Result<Repository> {
        Ok(Repository::from_store(ObjectStore::open(path)?))
    }

    pub fn from_store(store: ObjectStore) -> Repository {
        Repository {
            store,
            snapshots: Mutex::new(HashMap::new()),
        }
    }

    pub fn store(&self) -> &ObjectStore {
        &self.store
    }

    pub fn working_state(&self) -> Result<WorkingState> {
        let branch = self.store.read_head()?;
        self.state_for(branch)
    }

    fn state_for(&self, branch: String) -> Result<WorkingState> {
        let head = self.store.try_read_ref(&RefName::branch(&branch)?)?;
        let dataset = match head {
            Some(id) => self.snapshot(&id)?,
            None => AtomicPartition::new(),
        };
        Ok(WorkingState {
            branch,
            head,
            dataset,
            dirty: false,
        })
    }

    pub(crate) fn working_state_at(&self, branch: &str, head: CommitId, dataset: AtomicPartition) -> WorkingState {
        WorkingState {
            branch: branch.to_owned(),
            head: Some(head),
            dataset,
            dirty: false,
        }
    }

    pub fn read_commit(&self, id: &CommitId) -> Result<CommitRecord> {
        Ok(self.store.read_commit(id)?)
    }

    /// The dataset recorded by a commit, as an atomic partition.
    pub fn snapshot(&self, id: &CommitId) -> Result<AtomicPartition> {
        let record = self.store.read_commit(id)?;
        self.load_blob(&record.snapshot)
    }

    pub fn snapshot_dataset(&self, id: &CommitId) -> Result<Dataset> {
        Ok(self.snapshot(id)?.to_dataset())
    }

    fn load_blob(&self, blob: &ObjectId) -> Result<AtomicPartition> {
        if let Some(p) = self.cache().get(blob) {
            return Ok(p.clone());
        }
        let bytes = self.store.get_blob(blob)?;
        let partition = atomic_partition(&parse_nquads(&bytes)?);
        self.remember(*blob, &partition);
        Ok(partition)
    }

    fn cache(&self) -> std::sync::MutexGuard<'_, HashMap<ObjectId, AtomicPartition>> {
        self.snapshots.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn remember(&self, blob: ObjectId, partition: &AtomicPartition) {
        let mut cache = self.cache();
        if cache.len() >= SNAPSHOT_CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(blob, partition.clone());
    }

    pub(crate) fn write_snapshot(&self, dataset: &AtomicPartition) -> Result<ObjectId> {
        let id = self.store.put_blob(&dataset.canonical_bytes())?;
        self.remember(id, dataset);
        Ok(id)
    }

    /// Writes a commit record for `dataset` and moves `branch` from
    /// `expected` to it.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn write_commit_on(
        &self,
        branch: &str,
        expected: Option<CommitId>,
        dataset: &AtomicPartition,
        parents: Vec<CommitId>,
        sig: &Signature,
        message: &str,
        strategy: Option<&str>,
    ) -> Result<CommitId> {
        let snapshot = self.write_snapshot(dataset)?;
        let record = CommitRecord {
            snapshot,
            parents,
            author: sig.author.clone(),
            timestamp: sig.timestamp,
            message: message.to_owned(),
            strategy: strategy.map(str::to_owned),
        };
        let id = self.store.write_commit(&record)?;
        let expect = expected.map_or(RefExpect::Absent, RefExpect::Exactly);
        self.store.set_ref(&RefName::branch(branch)?, id, expect)?;
        Ok(id)
    }

    /// Commits `dataset` on the current branch. The change against the head
    /// snapshot must not be empty.
    pub fn commit(
        &self,
        ws: &mut WorkingState,
        dataset: AtomicPartition,
        sig: &Signature,
        message: &str,
    ) -> Result<CommitId> {
        if let Some(head) = ws.head {
            let current = self.snapshot(&head)?;
            if diff_partitions(&current, &dataset).is_empty() {
                return Err(Error::EmptyChange);
            }
        }
        let parents = ws.head.into_iter().collect();
        let id = self.write_commit_on(&ws.branch, ws.head, &dataset, parents, sig, message, None)?;
        ws.head = Some(id);
        ws.dataset = dataset;
        ws.dirty = false;
        Ok(id)
    }

    pub fn commit_dataset(
        &self,
        ws: &mut WorkingState,
        dataset: &Dataset,
        sig: &Signature,
        message: &str,
    ) -> Result<CommitId> {
        self.commit(ws, atomic_partition(dataset), sig, message)
    }

    /// Creates branch `name` at commit `at`.
    pub fn branch(&self, name: &str, at: CommitId) -> Result<RefName> {
        let r = RefName::branch(name)?;
        self.store.read_commit(&at)?;
        if self.store.try_read_ref(&r)?.is_some() {
            return Err(Error::BranchExists(name.to_owned()));
        }
        self.store.set_ref(&r, at, RefExpect::Absent).map_err(|e| match e {
            crate::store::StoreError::StaleRef { .. } => Error::BranchExists(name.to_owned()),
            other => other.into(),
        })?;
        Ok(r)
    }

    /// Switches to branch `name`, which must exist.
    pub fn checkout(&self, ws: &WorkingState, name: &str, force: bool) -> Result<WorkingState> {
        let r = RefName::branch(name)?;
        if ws.dirty && !force {
            return Err(Error::Dirty);
        }
        if name == ws.branch && !ws.dirty {
            return Ok(ws.clone());
        }
        self.store.read_ref(&r)?;
        self.store.write_head(name)?;
        self.state_for(name.to_owned())
    }

    /// Resolves a branch name, `remotes/<remote>/<branch>`, a commit id or a
    /// unique commit id prefix of at least four hex digits.
    pub fn resolve_rev(&self, rev: &str) -> Result<CommitId> {
        let unknown = || Error::UnknownRevision(rev.to_owned());
        if let Some(rest) = rev.strip_prefix("remotes/") {
            let (remote, branch) = rest.split_once('/').ok_or_else(unknown)?;
            return self.store.try_read_ref(&RefName::remote(remote, branch)?)?.ok_or_else(unknown);
        }
        if let Ok(name) = RefName::branch(rev) {
            if let Some(id) = self.store.try_read_ref(&name)? {
                return Ok(id);
            }
        }
        let is_hex = rev.len() >= 4 && rev.len() <= 64 && rev.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'));
        if !is_hex {
            return Err(unknown());
        }
        let mut found = None;
        for id in self.store.object_ids()? {
            if !id.to_hex().starts_with(rev) {
                continue;
            }
            let id = CommitId(id);
            if self.store.read_commit(&id).is_err() {
                continue;
            }
            if found.replace(id).is_some() {
                return Err(Error::AmbiguousRevision(rev.to_owned()));
            }
        }
        found.ok_or_else(unknown)
    }

    /// Commits reachable from `from`, children before parents. Among commits
    /// that are ready at the same time the newest comes first, then the
    /// smallest id.
    pub fn log(&self, from: CommitId) -> Result<Vec<(CommitId, CommitRecord)>> {
        let records = self.reachable(from)?;
        let mut pending_children: HashMap<CommitId, usize> = HashMap::new();
        for record in records.values() {
            for p in &record.parents {
                *pending_children.entry(*p).or_default() += 1;
            }
        }
        let mut ready = BinaryHeap::new();
        ready.push((records[&from].timestamp, Reverse(from)));
        let mut out = Vec::with_capacity(records.len());
        while let Some((_, Reverse(id))) = ready.pop() {
            let record = records[&id].clone();
            for p in &record.parents {
                let n = pending_children.get_mut(p).expect("counted");
                *n -= 1;
                if *n == 0 {
                    ready.push((records[p].timestamp, Reverse(*p)));
                }
            }
            out.push((id, record));
        }
        Ok(out)
    }

    fn reachable(&self, from: CommitId) -> Result<HashMap<CommitId, CommitRecord>> {
        let mut records = HashMap::new();
        let mut queue = VecDeque::from([from]);
        while let Some(id) = queue.pop_front() {
            if records.contains_key(&id) {
                continue;
            }
            let record = self.store.read_commit(&id)?;
            queue.extend(record.parents.iter().copied());
            records.insert(id, record);
        }
        Ok(records)
    }

    fn ancestors(&self, from: CommitId) -> Result<HashSet<CommitId>> {
        Ok(self.reachable(from)?.into_keys().collect())
    }

    /// True when `ancestor` is `descendant` or one of its ancestors.
    pub fn is_ancestor(&self, ancestor: CommitId, descendant: CommitId) -> Result<bool> {
        if ancestor == descendant {
            return Ok(true);
        }
        self.store.read_commit(&ancestor)?;
        Ok(self.ancestors(descendant)?.contains(&ancestor))
    }

    /// The most recent common ancestor. When several are maximal the smallest
    /// id wins; `None` for unrelated histories.
    pub fn find_merge_base(&self, a: CommitId, b: CommitId) -> Result<Option<CommitId>> {
        let left = self.reachable(a)?;
        let right = self.ancestors(b)?;
        let common: BTreeSet<CommitId> = left.keys().filter(|c| right.contains(c)).copied().collect();
        let mut dominated = HashSet::new();
        let mut queue: VecDeque<CommitId> = common
            .iter()
            .flat_map(|c| left[c].parents.iter().copied())
            .collect();
        while let Some(id) = queue.pop_front() {
            if dominated.insert(id) {
                queue.extend(left[&id].parents.iter().copied());
            }
        }
        Ok(common.into_iter().find(|c| !dominated.contains(c)))
    }

    /// Undoes commit `target` on top of the current head.
    ///
    /// Reverting the head applies the inverse of its change. For an older
    /// commit the result is a three-way merge with the reverted commit as
    /// base, its parent on one side and the head on the other.
    pub fn revert(&self, ws: &mut WorkingState, target: CommitId, sig: &Signature) -> Result<CommitId> {
        let head = ws.head.ok_or_else(|| Error::UnbornBranch(ws.branch.clone()))?;
        let record = self.store.read_commit(&target)?;
        if !self.is_ancestor(target, head)? {
            return Err(Error::NotAncestor { target, head });
        }
        let [parent] = record.parents[..] else {
            return Err(Error::NotRevertible(target));
        };
        let reverted = self.snapshot(&target)?;
        let before = self.snapshot(&parent)?;
        let result = if target == head {
            let inverse = diff_partitions(&before, &reverted).invert();
            crate::delta::apply(&reverted, &inverse)?
        } else {
            let current = self.snapshot(&head)?;
            merge::merge_three_way(&reverted, &before, &current)
        };
        let message = format!("Revert {target}");
        self.commit(ws, result, sig, &message)
    }
}
