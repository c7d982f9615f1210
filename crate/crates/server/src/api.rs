use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use ltree_core::eventlog::{ArgDefaults, Verification, DEFAULT_OWNER};
use ltree_core::session::SessionError;
use ltree_core::social::SocialError;
use ltree_core::Payload;
use serde_json::{json, Map, Value};
use tokio::sync::{mpsc, oneshot};

use crate::view::status_json;
use crate::writer::{Job, Shared};

#[derive(Clone)]
pub struct AppState {
    jobs: mpsc::UnboundedSender<Job>,
    shared: Arc<Shared>,
}

impl AppState {
    pub fn new(session: ltree_core::Session, snapshot_path: Option<std::path::PathBuf>) -> Self {
        let (jobs, shared) = crate::writer::spawn(session, snapshot_path);
        Self { jobs, shared }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/events", post(post_event))
        .route("/state", get(get_state))
        .route("/geometry", get(get_geometry))
        .route("/log", get(get_log))
        .route("/verify", post(post_verify))
        .with_state(state)
}

fn json_body(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error(status: StatusCode, message: impl std::fmt::Display) -> Response {
    json_body(status, json!({ "error": message.to_string() }).to_string())
}

fn is_json(headers: &HeaderMap) -> bool {
    headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.split(';').next())
        .is_some_and(|m| m.trim().eq_ignore_ascii_case("application/json"))
}

/// Reads `{actor?, type, args?}`. Arguments may also sit at the top level
/// next to `type`; a missing post means a random one and a missing prune
/// threshold means the default.
pub fn parse_event(body: &[u8]) -> Result<(String, Payload), String> {
    let value: Value = serde_json::from_slice(body).map_err(|e| format!("invalid JSON: {e}"))?;
    let Value::Object(mut obj) = value else {
        return Err("event must be a JSON object".into());
    };
    let kind = match obj.remove("type") {
        Some(Value::String(s)) => s,
        _ => return Err("missing string field 'type'".into()),
    };
    let actor = match obj.remove("actor") {
        None => DEFAULT_OWNER.to_owned(),
        Some(Value::String(s)) if !s.is_empty() => s,
        Some(_) => return Err("'actor' must be a non-empty string".into()),
    };
    let mut args = match obj.remove("args") {
        None => Map::new(),
        Some(Value::Object(m)) => m,
        Some(_) => return Err("'args' must be an object".into()),
    };
    for (k, v) in obj {
        if args.insert(k.clone(), v).is_some() {
            return Err(format!("argument '{k}' given twice"));
        }
    }
    let payload = Payload::from_args(&kind, &args, ArgDefaults::Allow).map_err(|e| e.to_string())?;
    Ok((actor, payload))
}

async fn post_event(State(app): State<AppState>, headers: HeaderMap, body: Bytes) -> Response {
    if !is_json(&headers) {
        return error(StatusCode::UNSUPPORTED_MEDIA_TYPE, "content-type must be application/json");
    }
    let (actor, payload) = match parse_event(&body) {
        Ok(ev) => ev,
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    let (reply, rx) = oneshot::channel();
    if app.jobs.send(Job::Apply { actor, payload, reply }).is_err() {
        return error(StatusCode::SERVICE_UNAVAILABLE, "writer stopped");
    }
    match rx.await {
        Ok(Ok(applied)) => {
            let mut body = json!({ "seq": applied.seq, "status": status_json(applied.status) });
            if let Payload::Prune { .. } = payload {
                body["prunedIds"] = applied.effect.pruned.iter().map(|n| n.0).collect::<Vec<_>>().into();
            }
            if let Some(post) = applied.effect.target {
                body["post"] = post.0.into();
            }
            if let Some(id) = applied.effect.created {
                body["created"] = id.0.into();
            }
            json_body(StatusCode::OK, body.to_string())
        }
        Ok(Err(SessionError::Rejected(e @ SocialError::NoPosts))) => error(StatusCode::CONFLICT, e),
        Ok(Err(SessionError::Rejected(e @ SocialError::UnknownPost(_)))) => error(StatusCode::UNPROCESSABLE_ENTITY, e),
        Ok(Err(e @ SessionError::Log(_))) => error(StatusCode::INTERNAL_SERVER_ERROR, e),
        Err(_) => error(StatusCode::SERVICE_UNAVAILABLE, "writer stopped"),
    }
}

async fn get_state(State(app): State<AppState>) -> Response {
    json_body(StatusCode::OK, app.shared.current().state.clone())
}

async fn get_geometry(State(app): State<AppState>) -> Response {
    json_body(StatusCode::OK, app.shared.current().geometry.clone())
}

async fn get_log(State(app): State<AppState>) -> Response {
    let view = app.shared.current();
    json_body(StatusCode::OK, app.shared.log_json(&view))
}

async fn post_verify(State(app): State<AppState>) -> Response {
    let (reply, rx) = oneshot::channel();
    if app.jobs.send(Job::Verify { reply }).is_err() {
        return error(StatusCode::SERVICE_UNAVAILABLE, "writer stopped");
    }
    let body = match rx.await {
        Ok(Verification::Ok) => json!({ "ok": true }),
        Ok(Verification::Broken { seq, violation }) => {
            json!({ "ok": false, "seq": seq, "reason": violation.to_string() })
        }
        Err(_) => return error(StatusCode::SERVICE_UNAVAILABLE, "writer stopped"),
    };
    json_body(StatusCode::OK, body.to_string())
}
