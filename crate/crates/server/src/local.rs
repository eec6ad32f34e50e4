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


//! The [`Api`] trait served in process, without HTTP.

use std::sync::Arc;

use async_trait::async_trait;
use rdfvc_proto::*;

use crate::http::blocking;
use crate::Service;

#[derive(Clone)]
pub struct LocalApi(pub Arc<Service>);

impl LocalApi {
    pub fn new(service: Service) -> Self {
        LocalApi(Arc::new(service))
    }
}

#[async_trait]
impl Api for LocalApi {
    async fn init(&self) -> ApiResult<Status> {
        blocking(self.0.clone(), |s| s.init()).await
    }

    async fn status(&self) -> ApiResult<Status> {
        blocking(self.0.clone(), |s| s.status()).await
    }

    async fn commit(&self, req: CommitRequest) -> ApiResult<CommitResponse> {
        blocking(self.0.clone(), move |s| s.commit(req)).await
    }

    async fn log(&self, rev: Option<String>) -> ApiResult<Vec<CommitInfo>> {
        blocking(self.0.clone(), move |s| s.log(rev)).await
    }

    async fn diff(&self, from: String, to: String) -> ApiResult<DiffResponse> {
        blocking(self.0.clone(), move |s| s.diff(&from, &to)).await
    }

    async fn snapshot(&self, rev: Option<String>) -> ApiResult<Snapshot> {
        blocking(self.0.clone(), move |s| s.snapshot(rev)).await
    }

    async fn branches(&self) -> ApiResult<BranchList> {
        blocking(self.0.clone(), |s| s.branches()).await
    }

    async fn create_branch(&self, req: BranchRequest) -> ApiResult<BranchInfo> {
        blocking(self.0.clone(), move |s| s.create_branch(req)).await
    }

    async fn checkout(&self, req: CheckoutRequest) -> ApiResult<Status> {
        blocking(self.0.clone(), move |s| s.checkout(req)).await
    }

    async fn merge(&self, req: MergeRequest) -> ApiResult<MergeResponse> {
        blocking(self.0.clone(), move |s| s.merge(req)).await
    }

    async fn resolve(&self, req: ResolveRequest) -> ApiResult<CommitResponse> {
        blocking(self.0.clone(), move |s| s.resolve(req)).await
    }

    async fn abort_merge(&self) -> ApiResult<Status> {
        blocking(self.0.clone(), |s| s.abort_merge()).await
    }

    async fn revert(&self, req: RevertRequest) -> ApiResult<CommitResponse> {
        blocking(self.0.clone(), move |s| s.revert(req)).await
    }

    async fn remotes(&self) -> ApiResult<Vec<RemoteInfo>> {
        blocking(self.0.clone(), |s| s.remotes()).await
    }

    async fn add_remote(&self, req: RemoteInfo) -> ApiResult<RemoteInfo> {
        blocking(self.0.clone(), move |s| s.add_remote(req)).await
    }

    async fn push(&self, req: PushRequest) -> ApiResult<PushResponse> {
        blocking(self.0.clone(), move |s| s.push(req)).await
    }

    async fn pull(&self, req: PullRequest) -> ApiResult<PullResponse> {
        blocking(self.0.clone(), move |s| s.pull(req)).await
    }
}
