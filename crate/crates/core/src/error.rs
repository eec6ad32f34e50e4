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

use thiserror::Error;

use crate::atomic::AtomicError;
use crate::delta::DeltaError;
use crate::rdf::{NotNormalized, ParseError};
use crate::store::{CommitId, StoreError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Delta(#[from] DeltaError),
    #[error(transparent)]
    Atomic(#[from] AtomicError),
    #[error(transparent)]
    NotNormalized(#[from] NotNormalized),
    #[error("nothing to commit: the change is empty")]
    EmptyChange,
    #[error("branch {0} already exists")]
    BranchExists(String),
    #[error("branch {0} has no commits yet")]
    UnbornBranch(String),
    #[error("working state has uncommitted changes")]
    Dirty,
    #[error("{target} is not an ancestor of {head}")]
    NotAncestor { target: CommitId, head: CommitId },
    #[error("cannot revert {0}: only commits with exactly one parent can be reverted")]
    NotRevertible(CommitId),
    #[error("no common ancestor between {0} and {1}")]
    NoMergeBase(CommitId, CommitId),
    #[error("path from {tip} to {ancestor} passes through merge commit {merge}")]
    PathThroughMerge {
        tip: CommitId,
        ancestor: CommitId,
        merge: CommitId,
    },
    #[error("{ancestor} is not on the first-parent path of {tip}")]
    AncestorNotOnPath { tip: CommitId, ancestor: CommitId },
    #[error("unknown merge strategy {0:?}")]
    UnknownStrategy(String),
    #[error("invalid resolution: {0}")]
    Resolution(String),
    #[error("a merge with unresolved conflicts is pending; resolve it first")]
    MergePending,
    #[error("no merge is pending")]
    NoPendingMerge,
    #[error("push to {remote}/{branch} is not a fast-forward; pull first")]
    NonFastForward { remote: String, branch: String },
    #[error("unknown remote {0}")]
    UnknownRemote(String),
    #[error("remote {0} already exists")]
    RemoteExists(String),
    #[error("unknown revision {0:?}")]
    UnknownRevision(String),
    #[error("revision {0:?} is ambiguous")]
    AmbiguousRevision(String),
    #[error("malformed {what}: {message}")]
    Format { what: &'static str, message: String },
    #[error("cannot generate: {0}")]
    Unsatisfiable(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
