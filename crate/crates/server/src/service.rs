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


//! Repository operations behind a request/response interface.

use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard, RwLock};

use rdfvc_core::atomic::atomic_partition;
use rdfvc_core::delta::diff_partitions;
use rdfvc_core::history::{Repository, Signature, WorkingState};
use rdfvc_core::merge::{compute_merge, MergeOutcome, PendingMerge, Resolution, Strategy};
use rdfvc_core::rdf::parse_nquads;
use rdfvc_core::store::{CommitId, StoreError};
use rdfvc_core::sync::PullOutcome;
use rdfvc_core::Error;
use rdfvc_proto::*;

pub const DEFAULT_AUTHOR: &str = "rdfvc";

/// Maps library errors onto API error kinds.
pub fn api_error(e: Error) -> ApiError {
    let kind = match &e {
        Error::Store(StoreError::NotARepository(_))
        | Error::Store(StoreError::UnknownObject(_))
        | Error::Store(StoreError::UnknownRef(_))
        | Error::UnknownRevision(_)
        | Error::UnknownRemote(_)
        | Error::UnbornBranch(_)
        | Error::NoPendingMerge => ErrorKind::NotFound,
        Error::Store(StoreError::StaleRef { .. })
        | Error::Store(StoreError::NotEmpty(_))
        | Error::NonFastForward { .. }
        | Error::MergePending
        | Error::Dirty
        | Error::BranchExists(_)
        | Error::RemoteExists(_) => ErrorKind::Conflict,
        Error::Store(StoreError::Io { .. }) | Error::Store(StoreError::Corrupt(..)) => ErrorKind::Internal,
        _ => ErrorKind::BadRequest,
    };
    ApiError::new(kind, e.to_string())
}

type Result<T> = std::result::Result<T, ApiError>;

trait OrApi<T> {
    fn api(self) -> Result<T>;
}

impl<T, E: Into<Error>> OrApi<T> for std::result::Result<T, E> {
    fn api(self) -> Result<T> {
        self.map_err(|e| api_error(e.into()))
    }
}

fn signature(author: &Author) -> Signature {
    let name = author.name.clone().unwrap_or_else(|| DEFAULT_AUTHOR.to_owned());
    match author.timestamp {
        Some(t) => Signature::new(name, t),
        None => Signature::now(name),
    }
}

fn commit_info(id: CommitId, r: &rdfvc_core::store::CommitRecord) -> CommitInfo {
    CommitInfo {
        id: id.to_string(),
        parents: r.parents.iter().map(ToString::to_string).collect(),
        author: r.author.clone(),
        timestamp: r.timestamp,
        message: r.message.clone(),
        strategy: r.strategy.clone(),
    }
}

fn merge_response(outcome: &MergeOutcome, commit: Option<CommitId>) -> MergeResponse {
    let mut conflicts = Vec::new();
    for (side, part) in [
        (ConflictSide::OursAddedTheirsRemoved, &outcome.conflicts.ours_added_theirs_removed),
        (ConflictSide::TheirsAddedOursRemoved, &outcome.conflicts.theirs_added_ours_removed),
    ] {
        conflicts.extend(part.hashes().map(|h| ConflictEntry {
            side,
            class: h.to_string(),
        }));
    }
    let status = if !conflicts.is_empty() {
        MergeStatus::Conflicts
    } else if commit.is_some() {
        MergeStatus::Merged
    } else {
        MergeStatus::UpToDate
    };
    MergeResponse {
        status,
        strategy: outcome.strategy.to_string(),
        ours: outcome.ours.to_string(),
        theirs: outcome.theirs.to_string(),
        base: outcome.base.map(|b| b.to_string()),
        commit: commit.map(|c| c.to_string()),
        result_statements: outcome.result.quad_count(),
        conflict_file: (!outcome.conflicts.is_empty()).then(|| outcome.conflicts.to_text()),
        conflicts,
    }
}

/// One repository served to many callers. Reads run concurrently; anything
/// that moves a ref or touches merge state runs under a single writer lock.
pub struct Service {
    root: PathBuf,
    repo: RwLock<Option<Arc<Repository>>>,
    writer: Mutex<()>,
}

impl Service {
    pub fn new(root: impl Into<PathBuf>) -> Service {
        Service {
            root: root.into(),
            repo: RwLock::new(None),
            writer: Mutex::new(()),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn repo(&self) -> Result<Arc<Repository>> {
        if let Some(repo) = self.repo.read().unwrap_or_else(|e| e.into_inner()).as_ref() {
            return Ok(repo.clone());
        }
        let mut slot = self.repo.write().unwrap_or_else(|e| e.into_inner());
        if slot.is_none() {
            *slot = Some(Arc::new(Repository::open(&self.root).api()?));
        }
        Ok(slot.as_ref().expect("set above").clone())
    }

    fn write_lock(&self) -> MutexGuard<'_, ()> {
        self.writer.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Working state for a write, refused while a merge waits for resolution.
    fn writable(&self, repo: &Repository) -> Result<WorkingState> {
        if repo.pending_merge().api()?.is_some() {
            return Err(api_error(Error::MergePending));
        }
        repo.working_state().api()
    }

    pub fn init(&self) -> Result<Status> {
        let _w = self.write_lock();
        let repo = Repository::init(&self.root).api()?;
        *self.repo.write().unwrap_or_else(|e| e.into_inner()) = Some(Arc::new(repo));
        self.status()
    }

    pub fn status(&self) -> Result<Status> {
        let repo = self.repo()?;
        let ws = repo.working_state().api()?;
        let pending = repo.pending_merge().api()?.map(|p| PendingMergeInfo {
            ours: p.ours.to_string(),
            theirs: p.theirs.to_string(),
            strategy: p.strategy.to_string(),
        });
        Ok(Status {
            branch: ws.branch().to_owned(),
            head: ws.head().map(|h| h.to_string()),
            statements: ws.dataset().quad_count(),
            classes: ws.dataset().len(),
            pending_merge: pending,
        })
    }

    pub fn commit(&self, req: CommitRequest) -> Result<CommitResponse> {
        let dataset = parse_nquads(req.nquads.as_bytes()).api()?;
        let next = atomic_partition(&dataset);
        let _w = self.write_lock();
        let repo = self.repo()?;
        let mut ws = self.writable(&repo)?;
        let change = diff_partitions(ws.dataset(), &next);
        let id = repo.commit(&mut ws, next, &signature(&req.author), &req.message).api()?;
        Ok(CommitResponse {
            id: id.to_string(),
            added: change.positive.len(),
            removed: change.negative.len(),
        })
    }

    fn head_or(&self, repo: &Repository, rev: Option<&str>) -> Result<Option<CommitId>> {
        match rev {
            Some(rev) => repo.resolve_rev(rev).map(Some).api(),
            None => Ok(repo.working_state().api()?.head()),
        }
    }

    pub fn log(&self, rev: Option<String>) -> Result<Vec<CommitInfo>> {
        let repo = self.repo()?;
        let Some(from) = self.head_or(&repo, rev.as_deref())? else {
            return Ok(Vec::new());
        };
        Ok(repo.log(from).api()?.iter().map(|(id, r)| commit_info(*id, r)).collect())
    }

    pub fn diff(&self, from: &str, to: &str) -> Result<DiffResponse> {
        let repo = self.repo()?;
        let a = repo.snapshot(&repo.resolve_rev(from).api()?).api()?;
        let b = repo.snapshot(&repo.resolve_rev(to).api()?).api()?;
        let change = diff_partitions(&a, &b);
        Ok(DiffResponse {
            added: change.positive.len(),
            removed: change.negative.len(),
            text: change.to_text(),
        })
    }

    pub fn snapshot(&self, rev: Option<String>) -> Result<Snapshot> {
        let repo = self.repo()?;
        let id = self
            .head_or(&repo, rev.as_deref())?
            .ok_or_else(|| api_error(Error::UnbornBranch(repo.working_state().map(|w| w.branch().to_owned()).unwrap_or_default())))?;
        let blob = repo.read_commit(&id).api()?.snapshot;
        let bytes = repo.store().get_blob(&blob).api()?;
        Ok(Snapshot {
            commit: id.to_string(),
            nquads: String::from_utf8(bytes).map_err(|e| ApiError::new(ErrorKind::Internal, e.to_string()))?,
        })
    }

    pub fn branches(&self) -> Result<BranchList> {
        let repo = self.repo()?;
        let current = repo.store().read_head().api()?;
        let branches = repo
            .store()
            .branches()
            .api()?
            .into_iter()
            .map(|(name, head)| BranchInfo {
                name,
                head: head.to_string(),
            })
            .collect();
        Ok(BranchList { current, branches })
    }

    pub fn create_branch(&self, req: BranchRequest) -> Result<BranchInfo> {
        let _w = self.write_lock();
        let repo = self.repo()?;
        let at = match self.head_or(&repo, req.at.as_deref())? {
            Some(at) => at,
            None => return Err(api_error(Error::UnbornBranch(repo.store().read_head().api()?))),
        };
        repo.branch(&req.name, at).api()?;
        Ok(BranchInfo {
            name: req.name,
            head: at.to_string(),
        })
    }

    pub fn checkout(&self, req: CheckoutRequest) -> Result<Status> {
        {
            let _w = self.write_lock();
            let repo = self.repo()?;
            let ws = self.writable(&repo)?;
            repo.checkout(&ws, &req.name, false).api()?;
        }
        self.status()
    }

    pub fn merge(&self, req: MergeRequest) -> Result<MergeResponse> {
        let strategy: Strategy = req.strategy.parse().api()?;
        let _w = self.write_lock();
        let repo = self.repo()?;
        let mut ws = self.writable(&repo)?;
        let theirs = repo.resolve_rev(&req.theirs).api()?;
        let (outcome, commit) = repo
            .merge(&mut ws, theirs, strategy, &signature(&req.author), req.message.as_deref())
            .api()?;
        self.record_conflicts(&repo, &ws, &outcome)?;
        Ok(merge_response(&outcome, commit))
    }

    fn record_conflicts(&self, repo: &Repository, ws: &WorkingState, outcome: &MergeOutcome) -> Result<()> {
        if outcome.conflicts.is_empty() {
            return Ok(());
        }
        let pending = PendingMerge {
            branch: ws.branch().to_owned(),
            ours: outcome.ours,
            theirs: outcome.theirs,
            strategy: outcome.strategy,
        };
        repo.save_pending_merge(&pending, &outcome.conflicts).api()
    }

    pub fn resolve(&self, req: ResolveRequest) -> Result<CommitResponse> {
        let resolution = Resolution::parse(&req.resolution).api()?;
        let _w = self.write_lock();
        let repo = self.repo()?;
        let pending = repo.pending_merge().api()?.ok_or_else(|| api_error(Error::NoPendingMerge))?;
        let mut ws = repo.working_state().api()?;
        if ws.branch() != pending.branch {
            return Err(api_error(Error::Resolution(format!(
                "the pending merge belongs to branch {}",
                pending.branch
            ))));
        }
        let outcome = compute_merge(&repo, pending.ours, pending.theirs, pending.strategy).api()?;
        let before = ws.dataset().clone();
        let id = repo
            .resolve(&mut ws, &outcome, &resolution.keep, &resolution.drop, &signature(&req.author))
            .api()?;
        repo.clear_pending_merge().api()?;
        let change = diff_partitions(&before, ws.dataset());
        Ok(CommitResponse {
            id: id.to_string(),
            added: change.positive.len(),
            removed: change.negative.len(),
        })
    }

    pub fn abort_merge(&self) -> Result<Status> {
        {
            let _w = self.write_lock();
            let repo = self.repo()?;
            repo.pending_merge().api()?.ok_or_else(|| api_error(Error::NoPendingMerge))?;
            repo.clear_pending_merge().api()?;
        }
        self.status()
    }

    pub fn revert(&self, req: RevertRequest) -> Result<CommitResponse> {
        let _w = self.write_lock();
        let repo = self.repo()?;
        let mut ws = self.writable(&repo)?;
        let target = repo.resolve_rev(&req.rev).api()?;
        let before = ws.dataset().clone();
        let id = repo.revert(&mut ws, target, &signature(&req.author)).api()?;
        let change = diff_partitions(&before, ws.dataset());
        Ok(CommitResponse {
            id: id.to_string(),
            added: change.positive.len(),
            removed: change.negative.len(),
        })
    }

    pub fn remotes(&self) -> Result<Vec<RemoteInfo>> {
        let repo = self.repo()?;
        Ok(repo
            .remotes()
            .api()?
            .into_iter()
            .map(|r| RemoteInfo {
                name: r.name,
                path: r.location.display().to_string(),
            })
            .collect())
    }

    pub fn add_remote(&self, req: RemoteInfo) -> Result<RemoteInfo> {
        let _w = self.write_lock();
        let repo = self.repo()?;
        let r = repo.add_remote(&req.name, Path::new(&req.path)).api()?;
        Ok(RemoteInfo {
            name: r.name,
            path: r.location.display().to_string(),
        })
    }

    pub fn push(&self, req: PushRequest) -> Result<PushResponse> {
        let _w = self.write_lock();
        let repo = self.repo()?;
        let local = match req.local_branch {
            Some(b) => b,
            None => repo.store().read_head().api()?,
        };
        let report = repo.push(&local, &req.remote, &req.branch).api()?;
        Ok(PushResponse {
            previous: report.previous.map(|p| p.to_string()),
            head: report.head.to_string(),
            objects: report.objects,
        })
    }

    pub fn pull(&self, req: PullRequest) -> Result<PullResponse> {
        let strategy: Strategy = req.strategy.parse().api()?;
        let _w = self.write_lock();
        let repo = self.repo()?;
        let mut ws = self.writable(&repo)?;
        let outcome = repo
            .pull(&mut ws, &req.remote, &req.branch, strategy, &signature(&req.author))
            .api()?;
        Ok(match outcome {
            PullOutcome::UpToDate(id) => PullResponse {
                status: PullStatus::UpToDate,
                head: Some(id.to_string()),
                merge: None,
            },
            PullOutcome::FastForward(id) => PullResponse {
                status: PullStatus::FastForward,
                head: Some(id.to_string()),
                merge: None,
            },
            PullOutcome::Merged(id, outcome) => PullResponse {
                status: PullStatus::Merged,
                head: Some(id.to_string()),
                merge: Some(merge_response(&outcome, Some(id))),
            },
            PullOutcome::Conflicts(outcome) => {
                self.record_conflicts(&repo, &ws, &outcome)?;
                PullResponse {
                    status: PullStatus::Conflicts,
                    head: ws.head().map(|h| h.to_string()),
                    merge: Some(merge_response(&outcome, None)),
                }
            }
        })
    }
}
