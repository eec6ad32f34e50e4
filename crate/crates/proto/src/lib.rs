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


//! Wire types for the rdfvc HTTP/JSON API and the [`Api`] trait that both
//! the in-process service and the HTTP client implement.
//!
//! Commit ids and class hashes travel as lowercase hex strings. Revisions
//! accept a branch name, `remotes/<remote>/<branch>`, a full commit id or a
//! unique id prefix of at least four hex digits.

use std::fmt;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    /// Malformed input or an operation that does not apply.
    BadRequest,
    NotFound,
    /// The repository is not in a state that allows the operation: a stale
    /// ref, a rejected push, a merge waiting for resolution.
    Conflict,
    Internal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub kind: ErrorKind,
    pub message: String,
}

impl ApiError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        ApiError {
            kind,
            message: message.into(),
        }
    }
}

impl fmt::Display for ApiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for ApiError {}

pub type ApiResult<T> = Result<T, ApiError>;

/// Who and when, for operations that write commits. Missing fields fall back
/// to the service defaults (author `rdfvc`, the current time).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Author {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendingMergeInfo {
    pub ours: String,
    pub theirs: String,
    pub strategy: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Status {
    pub branch: String,
    pub head: Option<String>,
    pub statements: usize,
    pub classes: usize,
    pub pending_merge: Option<PendingMergeInfo>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRequest {
    pub message: String,
    /// The complete new state of the branch as N-Quads.
    pub nquads: String,
    #[serde(default)]
    pub author: Author,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitResponse {
    pub id: String,
    /// Classes added and removed relative to the parent.
    pub added: usize,
    pub removed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitInfo {
    pub id: String,
    pub parents: Vec<String>,
    pub author: String,
    pub timestamp: i64,
    pub message: String,
    pub strategy: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffResponse {
    pub added: usize,
    pub removed: usize,
    /// `A <quad>` / `D <quad>` lines.
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub commit: String,
    /// Canonical N-Quads.
    pub nquads: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchInfo {
    pub name: String,
    pub head: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchList {
    pub current: String,
    pub branches: Vec<BranchInfo>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchRequest {
    pub name: String,
    /// Defaults to the current head.
    #[serde(default)]
    pub at: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckoutRequest {
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeRequest {
    /// Revision to merge into the current branch.
    pub theirs: String,
    pub strategy: String,
    #[serde(default)]
    pub message: Option<String>,
    #[serde(default)]
    pub author: Author,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MergeStatus {
    Merged,
    /// Theirs is already contained in the current head.
    UpToDate,
    /// Nothing was written; the conflicts wait for `resolve`.
    Conflicts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConflictSide {
    OursAddedTheirsRemoved,
    TheirsAddedOursRemoved,
}

impl ConflictSide {
    pub fn as_str(self) -> &'static str {
        match self {
            ConflictSide::OursAddedTheirsRemoved => "ours-added-theirs-removed",
            ConflictSide::TheirsAddedOursRemoved => "theirs-added-ours-removed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictEntry {
    pub side: ConflictSide,
    pub class: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeResponse {
    pub status: MergeStatus,
    pub strategy: String,
    pub ours: String,
    pub theirs: String,
    pub base: Option<String>,
    pub commit: Option<String>,
    pub result_statements: usize,
    pub conflicts: Vec<ConflictEntry>,
    /// The conflict file, when there are conflicts.
    pub conflict_file: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolveRequest {
    /// `keep <hash>` / `drop <hash>` lines.
    pub resolution: String,
    #[serde(default)]
    pub author: Author,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevertRequest {
    pub rev: String,
    #[serde(default)]
    pub author: Author,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemoteInfo {
    pub name: String,
    pub path: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PushRequest {
    pub remote: String,
    pub branch: String,
    /// Defaults to the current branch.
    #[serde(default)]
    pub local_branch: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PushResponse {
    pub previous: Option<String>,
    pub head: String,
    pub objects: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PullRequest {
    pub remote: String,
    pub branch: String,
    pub strategy: String,
    #[serde(default)]
    pub author: Author,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PullStatus {
    UpToDate,
    FastForward,
    Merged,
    Conflicts,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PullResponse {
    pub status: PullStatus,
    pub head: Option<String>,
    pub merge: Option<MergeResponse>,
}

/// Repository operations. Implemented in process by the service and over
/// HTTP by the client.
#[async_trait]
pub trait Api: Send + Sync {
    async fn init(&self) -> ApiResult<Status>;
    async fn status(&self) -> ApiResult<Status>;
    async fn commit(&self, req: CommitRequest) -> ApiResult<CommitResponse>;
    async fn log(&self, rev: Option<String>) -> ApiResult<Vec<CommitInfo>>;
    async fn diff(&self, from: String, to: String) -> ApiResult<DiffResponse>;
    async fn snapshot(&self, rev: Option<String>) -> ApiResult<Snapshot>;
    async fn branches(&self) -> ApiResult<BranchList>;
    async fn create_branch(&self, req: BranchRequest) -> ApiResult<BranchInfo>;
    async fn checkout(&self, req: CheckoutRequest) -> ApiResult<Status>;
    async fn merge(&self, req: MergeRequest) -> ApiResult<MergeResponse>;
    async fn resolve(&self, req: ResolveRequest) -> ApiResult<CommitResponse>;
    async fn abort_merge(&self) -> ApiResult<Status>;
    async fn revert(&self, req: RevertRequest) -> ApiResult<CommitResponse>;
    async fn remotes(&self) -> ApiResult<Vec<RemoteInfo>>;
    async fn add_remote(&self, req: RemoteInfo) -> ApiResult<RemoteInfo>;
    async fn push(&self, req: PushRequest) -> ApiResult<PushResponse>;
    async fn pull(&self, req: PullRequest) -> ApiResult<PullResponse>;
}

/// Route paths, relative to the service root.
pub mod routes {
    pub const INIT: &str = "/init";
    pub const STATUS: &str = "/status";
    pub const COMMITS: &str = "/commits";
    pub const LOG: &str = "/log";
    pub const DIFF: &str = "/diff";
    pub const SNAPSHOT: &str = "/snapshot";
    pub const BRANCHES: &str = "/branches";
    pub const CHECKOUT: &str = "/checkout";
    pub const MERGE: &str = "/merge";
    pub const RESOLVE: &str = "/merge/resolve";
    pub const ABORT: &str = "/merge/abort";
    pub const REVERT: &str = "/revert";
    pub const REMOTES: &str = "/remotes";
    pub const PUSH: &str = "/push";
    pub const PULL: &str = "/pull";
}

/// Query string of `GET /log` and `GET /snapshot`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevQuery {
    #[serde(default)]
    pub rev: Option<String>,
}

/// Query string of `GET /diff`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffQuery {
    pub from: String,
    pub to: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enums_use_kebab_case() {
        let s = serde_json::to_string(&ConflictSide::TheirsAddedOursRemoved).unwrap();
        assert_eq!(s, "\"theirs-added-ours-removed\"");
        assert_eq!(s.trim_matches('"'), ConflictSide::TheirsAddedOursRemoved.as_str());
        assert_eq!(serde_json::to_string(&MergeStatus::UpToDate).unwrap(), "\"up-to-date\"");
        let e: ApiError = serde_json::from_str(r#"{"kind":"not-found","message":"x"}"#).unwrap();
        assert_eq!(e.kind, ErrorKind::NotFound);
    }

    #[test]
    fn author_defaults() {
        let r: CommitRequest = serde_json::from_str(r#"{"message":"m","nquads":""}"#).unwrap();
        assert_eq!(r.author, Author::default());
        assert_eq!(serde_json::to_string(&Author::default()).unwrap(), "{}");
    }
}
