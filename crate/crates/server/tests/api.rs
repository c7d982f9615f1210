use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use ltree_core::eventlog::FixedClock;
use ltree_core::{EventLog, Payload, Session};
use ltree_server::{open_session, router, AppState, ServerConfig};
use ltree_testkit::gen::{events, Mix};
use serde_json::{json, Value};
use tower::ServiceExt;

fn app(seed: u64) -> Router {
    router(AppState::new(Session::in_memory(seed).with_clock(FixedClock(0)), None))
}

async fn send(app: &Router, req: Request<Body>) -> (StatusCode, Value) {
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn post(app: &Router, body: Value) -> (StatusCode, Value) {
    let req = Request::post("/events").header("content-type", "application/json").body(Body::from(body.to_string()));
    send(app, req.unwrap()).await
}

async fn get(app: &Router, path: &str) -> Value {
    let (status, v) = send(app, Request::get(path).body(Body::empty()).unwrap()).await;
    assert_eq!(status, StatusCode::OK);
    v
}

fn event_json(p: &Payload) -> Value {
    json!({ "actor": "alice", "type": p.type_name(), "args": p.args() })
}

#[tokio::test]
async fn fresh_session() {
    let app = app(1);
    let state = get(&app, "/state").await;
    assert_eq!(state["status"], json!({ "branches": 1, "posts": 0, "friends": 0 }));
    assert_eq!(state["posts"], json!([]));
    assert_eq!(state["friends"], json!([]));
    let geometry = get(&app, "/geometry").await;
    assert_eq!(geometry["segments"].as_array().unwrap().len(), 5);
    assert!(geometry["segments"].as_array().unwrap().iter().all(|s| s["kind"] == "trunk"));
    assert_eq!(geometry["markers"], json!([]));
    assert_eq!(get(&app, "/log").await, json!([]));
}

#[tokio::test]
async fn add_post_then_like_all() {
    let app = app(1);
    let (status, body) = post(&app, json!({ "type": "AddPost" })).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["seq"], 0);
    assert_eq!(body["status"], json!({ "branches": 2, "posts": 1, "friends": 0 }));
    post(&app, json!({ "type": "LikeAll" })).await;
    let state = get(&app, "/state").await;
    let p = &state["posts"][0];
    assert_eq!((p["likes"].as_u64(), p["views"].as_u64(), p["shares"].as_u64()), (Some(1), Some(1), Some(0)));
    assert_eq!(state, get(&app, "/state").await);
    assert_eq!(state["owner"], "user");
}

#[tokio::test]
async fn error_statuses() {
    let app = app(1);
    let (status, _) = post(&app, json!({ "type": "AddComment", "post": "RANDOM" })).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = post(&app, json!({ "type": "AddShare" })).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = post(&app, json!({ "type": "Like", "args": { "post": 99 } })).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    for bad in [
        json!({ "type": "Explode" }),
        json!({ "args": {} }),
        json!({ "type": "AddPost", "post": 1 }),
        json!({ "type": "Prune", "threshold": -1 }),
        json!({ "type": "Prune", "threshold": 5, "args": { "threshold": 5 } }),
        json!({ "type": "AddPost", "actor": 3 }),
        json!([1, 2]),
    ] {
        let (status, _) = post(&app, bad.clone()).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{bad}");
    }
    let req = Request::post("/events").header("content-type", "application/json").body(Body::from("{nope"));
    assert_eq!(send(&app, req.unwrap()).await.0, StatusCode::BAD_REQUEST);
    let req = Request::post("/events").header("content-type", "text/plain").body(Body::from(r#"{"type":"AddPost"}"#));
    assert_eq!(send(&app, req.unwrap()).await.0, StatusCode::UNSUPPORTED_MEDIA_TYPE);
    let req = Request::post("/events").body(Body::from(r#"{"type":"AddPost"}"#));
    assert_eq!(send(&app, req.unwrap()).await.0, StatusCode::UNSUPPORTED_MEDIA_TYPE);
    assert_eq!(get(&app, "/log").await, json!([]), "rejected requests must not be logged");
}

#[tokio::test]
async fn prune_reports_ids() {
    let app = app(1);
    post(&app, json!({ "type": "AddPost" })).await;
    let (_, body) = post(&app, json!({ "type": "Prune", "threshold": 50 })).await;
    assert_eq!(body["prunedIds"], json!([]));
    for _ in 0..51 {
        post(&app, json!({ "type": "View", "post": 1 })).await;
    }
    let (_, body) = post(&app, json!({ "type": "Prune" })).await;
    assert_eq!(body["prunedIds"], json!([1]));
    assert_eq!(body["status"]["posts"], 0);
}

#[tokio::test]
async fn friend_marker_in_geometry() {
    let app = app(1);
    post(&app, json!({ "type": "AddFriend", "actor": "bob" })).await;
    let g = get(&app, "/geometry").await;
    let markers = g["markers"].as_array().unwrap();
    assert_eq!(markers.len(), 1);
    assert_eq!(markers[0]["kind"], "friend");
    let again = app.clone().oneshot(Request::get("/geometry").body(Body::empty()).unwrap()).await.unwrap();
    let a = again.into_body().collect().await.unwrap().to_bytes();
    let b = app.clone().oneshot(Request::get("/geometry").body(Body::empty()).unwrap()).await.unwrap();
    assert_eq!(a, b.into_body().collect().await.unwrap().to_bytes());
}

#[tokio::test]
async fn every_success_is_one_record_and_geometry_matches_state() {
    let app = app(9);
    let mut accepted = 0u64;
    for p in events(9, 150, Mix::default()) {
        let (status, body) = post(&app, event_json(&p)).await;
        if status == StatusCode::OK {
            assert_eq!(body["seq"], accepted);
            accepted += 1;
        } else {
            assert!(matches!(status, StatusCode::CONFLICT | StatusCode::UNPROCESSABLE_ENTITY), "{status}");
        }
        let log = get(&app, "/log").await;
        assert_eq!(log.as_array().unwrap().len() as u64, accepted);
        let state = get(&app, "/state").await;
        let g = get(&app, "/geometry").await;
        let kinds = |k: &str| g["markers"].as_array().unwrap().iter().filter(|m| m["kind"] == k).count();
        let posts = state["posts"].as_array().unwrap();
        let sum = |f: &str| posts.iter().map(|p| p[f].as_u64().unwrap() as usize).sum::<usize>();
        assert_eq!(kinds("friend"), state["friends"].as_array().unwrap().len());
        assert_eq!(kinds("comment"), sum("comments"));
        assert_eq!(kinds("share"), sum("shares"));
        assert_eq!(g["labels"].as_array().unwrap().len(), posts.len());
    }
    assert_eq!(send(&app, Request::post("/verify").body(Body::empty()).unwrap()).await.1, json!({ "ok": true }));
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_writes_are_serialized() {
    let app = app(2);
    post(&app, json!({ "type": "AddPost" })).await;
    let mut handles = Vec::new();
    for i in 0..64 {
        let app = app.clone();
        let kind = if i % 2 == 0 { "AddComment" } else { "ViewAll" };
        handles.push(tokio::spawn(async move { post(&app, json!({ "type": kind })).await }));
    }
    let mut seqs = Vec::new();
    for h in handles {
        let (status, body) = h.await.unwrap();
        assert_eq!(status, StatusCode::OK);
        seqs.push(body["seq"].as_u64().unwrap());
    }
    seqs.sort();
    assert_eq!(seqs, (1..65).collect::<Vec<_>>());
    let state = get(&app, "/state").await;
    assert_eq!(state["posts"][0]["comments"], 32);
    assert_eq!(state["posts"][0]["views"], 64);
}

#[tokio::test]
async fn file_log_survives_restart_and_tamper_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let config = ServerConfig {
        port: 0,
        seed: 4,
        log_path: Some(dir.path().join("events.log")),
        snapshot_path: Some(dir.path().join("tree.snap")),
    };
    let first = router(AppState::new(open_session(&config).unwrap(), config.snapshot_path.clone()));
    for body in [json!({ "type": "AddPost" }), json!({ "type": "AddFriend", "actor": "bob" }), json!({ "type": "AddComment" })] {
        assert_eq!(post(&first, body).await.0, StatusCode::OK);
    }
    let state = get(&first, "/state").await;
    drop(first);
    assert!(config.snapshot_path.as_ref().unwrap().exists());

    let resumed = router(AppState::new(open_session(&config).unwrap(), None));
    assert_eq!(get(&resumed, "/state").await, state);
    let plain = ServerConfig { snapshot_path: None, ..config.clone() };
    let replayed = router(AppState::new(open_session(&plain).unwrap(), None));
    assert_eq!(get(&replayed, "/state").await, state);

    let path = config.log_path.as_ref().unwrap();
    let text = std::fs::read_to_string(path).unwrap().replacen("\"bob\"", "\"eve\"", 1);
    std::fs::write(path, text).unwrap();
    let (_, verdict) = send(&replayed, Request::post("/verify").body(Body::empty()).unwrap()).await;
    assert_eq!(verdict["ok"], false);
    assert_eq!(verdict["seq"], 1);
    assert!(open_session(&plain).is_err());
}

#[test]
fn log_records_match_the_wire_format() {
    let mut log = EventLog::in_memory();
    log.append("alice", Payload::AddPost, &FixedClock(3)).unwrap();
    let line: Value = serde_json::from_str(&log.records()[0].to_line()).unwrap();
    assert_eq!(line["type"], "AddPost");
    assert_eq!(line["prevHash"].as_str().unwrap().len(), 64);
}
