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


//! HTTP/JSON routes over [`Service`].

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{DefaultBodyLimit, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use rdfvc_proto::{routes, ApiError, ApiResult, DiffQuery, ErrorKind, RevQuery};
use serde::Serialize;

use crate::Service;

type Svc = State<Arc<Service>>;

fn status_of(kind: ErrorKind) -> StatusCode {
    match kind {
        ErrorKind::BadRequest => StatusCode::BAD_REQUEST,
        ErrorKind::NotFound => StatusCode::NOT_FOUND,
        ErrorKind::Conflict => StatusCode::CONFLICT,
        ErrorKind::Internal => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

pub struct Reply<T>(ApiResult<T>);

impl<T: Serialize> IntoResponse for Reply<T> {
    fn into_response(self) -> Response {
        match self.0 {
            Ok(v) => Json(v).into_response(),
            Err(e) => (status_of(e.kind), Json(e)).into_response(),
        }
    }
}

/// Runs a blocking service call off the async workers.
pub(crate) async fn blocking<T, F>(svc: Arc<Service>, f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce(&Service) -> ApiResult<T> + Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&svc))
        .await
        .unwrap_or_else(|e| Err(ApiError::new(ErrorKind::Internal, format!("request task failed: {e}"))))
}

macro_rules! handler {
    ($name:ident, $method:ident) => {
        async fn $name(State(svc): Svc) -> impl IntoResponse {
            Reply(blocking(svc, |s| s.$method()).await)
        }
    };
    ($name:ident, $method:ident, $req:ty) => {
        async fn $name(State(svc): Svc, Json(req): Json<$req>) -> impl IntoResponse {
            Reply(blocking(svc, move |s| s.$method(req)).await)
        }
    };
}

handler!(init, init);
handler!(status, status);
handler!(branches, branches);
handler!(remotes, remotes);
handler!(abort_merge, abort_merge);
handler!(commit, commit, rdfvc_proto::CommitRequest);
handler!(create_branch, create_branch, rdfvc_proto::BranchRequest);
handler!(checkout, checkout, rdfvc_proto::CheckoutRequest);
handler!(merge, merge, rdfvc_proto::MergeRequest);
handler!(resolve, resolve, rdfvc_proto::ResolveRequest);
handler!(revert, revert, rdfvc_proto::RevertRequest);
handler!(add_remote, add_remote, rdfvc_proto::RemoteInfo);
handler!(push, push, rdfvc_proto::PushRequest);
handler!(pull, pull, rdfvc_proto::PullRequest);

async fn log(State(svc): Svc, Query(q): Query<RevQuery>) -> impl IntoResponse {
    Reply(blocking(svc, move |s| s.log(q.rev)).await)
}

async fn snapshot(State(svc): Svc, Query(q): Query<RevQuery>) -> impl IntoResponse {
    Reply(blocking(svc, move |s| s.snapshot(q.rev)).await)
}

async fn diff(State(svc): Svc, Query(q): Query<DiffQuery>) -> impl IntoResponse {
    Reply(blocking(svc, move |s| s.diff(&q.from, &q.to)).await)
}

pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route(routes::INIT, post(init))
        .route(routes::STATUS, get(status))
        .route(routes::COMMITS, post(commit))
        .route(routes::LOG, get(log))
        .route(routes::DIFF, get(diff))
        .route(routes::SNAPSHOT, get(snapshot))
        .route(routes::BRANCHES, get(branches).post(create_branch))
        .route(routes::CHECKOUT, post(checkout))
        .route(routes::MERGE, post(merge))
        .route(routes::RESOLVE, post(resolve))
        .route(routes::ABORT, post(abort_merge))
        .route(routes::REVERT, post(revert))
        .route(routes::REMOTES, get(remotes).post(add_remote))
        .route(routes::PUSH, post(push))
        .route(routes::PULL, post(pull))
        // Whole datasets travel in commit requests.
        .layer(DefaultBodyLimit::disable())
        .with_state(service)
}

/// Serves `service` on `listener` until the process ends.
pub async fn serve(listener: tokio::net::TcpListener, service: Arc<Service>) -> std::io::Result<()> {
    let addr: Option<SocketAddr> = listener.local_addr().ok();
    log::info!("serving {} on {:?}", service.root().display(), addr);
    axum::serve(listener, router(service)).await
}
