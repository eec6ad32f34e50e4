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


//! HTTP client for the rdfvc service.

use async_trait::async_trait;
use rdfvc_proto::*;
use reqwest::{Method, RequestBuilder};
use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    /// `base` is the service root, e.g. `http://127.0.0.1:7878`.
    pub fn new(base: impl Into<String>) -> Client {
        Client {
            base: base.into().trim_end_matches('/').to_owned(),
            http: reqwest::Client::new(),
        }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    fn request(&self, method: Method, path: &str) -> RequestBuilder {
        self.http.request(method, format!("{}{path}", self.base))
    }

    async fn send<T: DeserializeOwned>(&self, req: RequestBuilder) -> ApiResult<T> {
        let transport = |e: reqwest::Error| ApiError::new(ErrorKind::Internal, format!("request to {} failed: {e}", self.base));
        let resp = req.send().await.map_err(transport)?;
        if resp.status().is_success() {
            return resp.json().await.map_err(transport);
        }
        let status = resp.status();
        let body = resp.bytes().await.map_err(transport)?;
        Err(serde_json::from_slice::<ApiError>(&body).unwrap_or_else(|_| {
            ApiError::new(
                ErrorKind::Internal,
                format!("{status}: {}", String::from_utf8_lossy(&body)),
            )
        }))
    }

    async fn get<T: DeserializeOwned, Q: Serialize>(&self, path: &str, query: &Q) -> ApiResult<T> {
        self.send(self.request(Method::GET, path).query(query)).await
    }

    async fn post<T: DeserializeOwned, B: Serialize>(&self, path: &str, body: &B) -> ApiResult<T> {
        self.send(self.request(Method::POST, path).json(body)).await
    }
}

#[async_trait]
impl Api for Client {
    async fn init(&self) -> ApiResult<Status> {
        self.post(routes::INIT, &()).await
    }

    async fn status(&self) -> ApiResult<Status> {
        self.get(routes::STATUS, &()).await
    }

    async fn commit(&self, req: CommitRequest) -> ApiResult<CommitResponse> {
        self.post(routes::COMMITS, &req).await
    }

    async fn log(&self, rev: Option<String>) -> ApiResult<Vec<CommitInfo>> {
        self.get(routes::LOG, &RevQuery { rev }).await
    }

    async fn diff(&self, from: String, to: String) -> ApiResult<DiffResponse> {
        self.get(routes::DIFF, &DiffQuery { from, to }).await
    }

    async fn snapshot(&self, rev: Option<String>) -> ApiResult<Snapshot> {
        self.get(routes::SNAPSHOT, &RevQuery { rev }).await
    }

    async fn branches(&self) -> ApiResult<BranchList> {
        self.get(routes::BRANCHES, &()).await
    }

    async fn create_branch(&self, req: BranchRequest) -> ApiResult<BranchInfo> {
        self.post(routes::BRANCHES, &req).await
    }

    async fn checkout(&self, req: CheckoutRequest) -> ApiResult<Status> {
        self.post(routes::CHECKOUT, &req).await
    }

    async fn merge(&self, req: MergeRequest) -> ApiResult<MergeResponse> {
        self.post(routes::MERGE, &req).await
    }

    async fn resolve(&self, req: ResolveRequest) -> ApiResult<CommitResponse> {
        self.post(routes::RESOLVE, &req).await
    }

    async fn abort_merge(&self) -> ApiResult<Status> {
        self.post(routes::ABORT, &()).await
    }

    async fn revert(&self, req: RevertRequest) -> ApiResult<CommitResponse> {
        self.post(routes::REVERT, &req).await
    }

    async fn remotes(&self) -> ApiResult<Vec<RemoteInfo>> {
        self.get(routes::REMOTES, &()).await
    }

    async fn add_remote(&self, req: RemoteInfo) -> ApiResult<RemoteInfo> {
        self.post(routes::REMOTES, &req).await
    }

    async fn push(&self, req: PushRequest) -> ApiResult<PushResponse> {
        self.post(routes::PUSH, &req).await
    }

    async fn pull(&self, req: PullRequest) -> ApiResult<PullResponse> {
        self.post(routes::PULL, &req).await
    }
}
