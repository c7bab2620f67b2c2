use std::time::{Duration, Instant};

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use serde_json::{json, Value};
use tower::ServiceExt;
use vip_core::engine::CorpusOptions;
use vip_core::video::Rational;
use vip_service::{router, AppState, Config};

struct Harness {
    _dir: tempfile::TempDir,
    state: AppState,
    app: Router,
}

fn harness_with(workers: usize, corpus: CorpusOptions, cap: usize) -> Harness {
    let dir = tempfile::tempdir().unwrap();
    let mut config = Config::new(dir.path());
    config.workers = workers;
    config.max_upload_bytes = cap;
    config.seed_corpus = Some(corpus);
    let state = AppState::start(config).unwrap();
    let app = router(state.clone());
    Harness { _dir: dir, state, app }
}

fn small_corpus() -> CorpusOptions {
    CorpusOptions { width: 64, height: 48, frames: 16, fps: Rational::integer(24) }
}

fn harness() -> Harness {
    harness_with(2, small_corpus(), 1 << 20)
}

async fn call(app: &Router, req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let body = to_bytes(res.into_body(), usize::MAX).await.unwrap();
    (status, body.to_vec())
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Vec<u8>) {
    call(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

async fn get_json(app: &Router, uri: &str) -> (StatusCode, Value) {
    let (s, b) = get(app, uri).await;
    (s, serde_json::from_slice(&b).unwrap_or(Value::Null))
}

async fn post_json(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    let req = Request::post(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let (s, b) = call(app, req).await;
    (s, serde_json::from_slice(&b).unwrap_or(Value::Null))
}

async fn input_id(app: &Router, name: &str) -> String {
    let (_, v) = get_json(app, "/api/inputs").await;
    v["inputs"].as_array().unwrap().iter().find(|i| i["name"] == name).unwrap()["input_id"]
        .as_str()
        .unwrap()
        .to_string()
}

async fn wait_done(app: &Router, job: &str) -> Value {
    let deadline = Instant::now() + Duration::from_secs(120);
    loop {
        let (_, v) = get_json(app, &format!("/api/renders/{job}")).await;
        match v["state"].as_str().unwrap() {
            "done" | "failed" => return v,
            _ => {}
        }
        assert!(Instant::now() < deadline, "job {job} did not finish");
        tokio::time::sleep(Duration::from_millis(10)).await;
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn catalog_has_ten_categories_and_is_stable() {
    let h = harness();
    let (s, a) = get(&h.app, "/api/catalog").await;
    assert_eq!(s, StatusCode::OK);
    let (_, b) = get(&h.app, "/api/catalog").await;
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    let cats = v["categories"].as_array().unwrap();
    assert_eq!(cats.len(), 10);
    for c in cats {
        for d in c["demos"].as_array().unwrap() {
            for p in d["param_schema"].as_array().unwrap() {
                assert!(p.get("default").is_some(), "{p}");
            }
        }
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn render_then_resubmit_hits_cache() {
    let h = harness();
    let input = input_id(&h.app, "blob-motion").await;
    let req = json!({"demo_id": "dct-spatial", "input_id": input, "params": {"frames": 3}});
    let (s, v) = post_json(&h.app, "/api/renders", req).await;
    assert_eq!(s, StatusCode::ACCEPTED, "{v}");
    let job = v["job_id"].as_str().unwrap().to_string();
    let done = wait_done(&h.app, &job).await;
    assert_eq!(done["state"], "done", "{done}");
    assert_eq!(done["progress"], 1.0);
    assert_eq!(h.state.renders(), 1);

    // Same request with keys reordered and a default spelled out.
    let again = json!({"params": {"keep_fraction": 0.05, "frames": 3.0}, "input_id": input, "demo_id": "dct-spatial"});
    let (s, v) = post_json(&h.app, "/api/renders", again).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["manifest"], done["manifest"]);
    assert_eq!(h.state.renders(), 1);
    assert_eq!(h.state.cache_hits(), 1);
    let (_, stats) = get_json(&h.app, "/api/stats").await;
    assert_eq!(stats, json!({"cache_hits": 1, "renders": 1}));

    // Frames and stream.
    let m = &done["manifest"];
    let n = m["frame_count"].as_u64().unwrap();
    let (s, png) = get(&h.app, &format!("/api/renders/{job}/frames/0")).await;
    assert_eq!(s, StatusCode::OK);
    let dec = png::Decoder::new(std::io::Cursor::new(png));
    let reader = dec.read_info().unwrap();
    assert_eq!(reader.info().width as u64, m["width"].as_u64().unwrap());
    assert_eq!(reader.info().height as u64, m["height"].as_u64().unwrap());
    let (s, _) = get(&h.app, &format!("/api/renders/{job}/frames/{n}")).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, y4m) = get(&h.app, &format!("/api/renders/{job}/video.y4m")).await;
    assert_eq!(s, StatusCode::OK);
    let payload = n * (6 + m["frame_payload_len"].as_u64().unwrap());
    let header_len = y4m.iter().position(|&b| b == b'\n').unwrap() as u64 + 1;
    assert_eq!(y4m.len() as u64, header_len + payload);
}

#[tokio::test(flavor = "multi_thread")]
async fn cache_survives_restart() {
    let dir = tempfile::tempdir().unwrap();
    let start = || {
        let mut c = Config::new(dir.path());
        c.workers = 1;
        c.seed_corpus = Some(small_corpus());
        let s = AppState::start(c).unwrap();
        (s.clone(), router(s))
    };
    let (_, app) = start();
    let req = json!({"demo_id": "csf-sweep", "params": {"width": 64, "height": 48, "duration": 1}});
    let (s, v) = post_json(&app, "/api/renders", req.clone()).await;
    assert_eq!(s, StatusCode::ACCEPTED, "{v}");
    let done = wait_done(&app, v["job_id"].as_str().unwrap()).await;
    assert_eq!(done["state"], "done", "{done}");

    let (state, app) = start();
    let (s, v) = post_json(&app, "/api/renders", req).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["manifest"], done["manifest"]);
    assert_eq!((state.renders(), state.cache_hits()), (0, 1));
}

#[tokio::test(flavor = "multi_thread")]
async fn live_duplicates_share_a_job_and_states_never_regress() {
    let h = harness_with(1, small_corpus(), 1 << 20);
    let input = input_id(&h.app, "blob-motion").await;
    // Occupies the only worker so the next job stays queued.
    let blocker = json!({"demo_id": "flow-hs", "input_id": input, "params": {"frames": 6, "iterations": 300}});
    let (_, b) = post_json(&h.app, "/api/renders", blocker).await;
    let req = json!({"demo_id": "dct-spatial", "input_id": input, "params": {"frames": 2}});
    let (s1, a) = post_json(&h.app, "/api/renders", req.clone()).await;
    let (s2, c) = post_json(&h.app, "/api/renders", req).await;
    assert_eq!((s1, s2), (StatusCode::ACCEPTED, StatusCode::ACCEPTED));
    assert_eq!(a["job_id"], c["job_id"]);
    let job = a["job_id"].as_str().unwrap().to_string();

    let (s, _) = get(&h.app, &format!("/api/renders/{job}/frames/0")).await;
    assert_eq!(s, StatusCode::CONFLICT);

    let rank = |s: &str| match s {
        "queued" => 0,
        "running" => 1,
        _ => 2,
    };
    for id in [b["job_id"].as_str().unwrap(), job.as_str()] {
        let (mut last_rank, mut last_progress) = (0, 0.0);
        loop {
            let (_, v) = get_json(&h.app, &format!("/api/renders/{id}")).await;
            let (r, p) = (rank(v["state"].as_str().unwrap()), v["progress"].as_f64().unwrap());
            assert!(r >= last_rank && p >= last_progress, "{v}");
            assert_eq!(v.get("manifest").is_some(), v["state"] == "done");
            (last_rank, last_progress) = (r, p);
            if r == 2 {
                assert_eq!(v["state"], "done", "{v}");
                break;
            }
            tokio::time::sleep(Duration::from_millis(5)).await;
        }
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn request_errors() {
    let h = harness();
    let input = input_id(&h.app, "blob-motion").await;
    let (s, v) = post_json(&h.app, "/api/renders", json!({"demo_id": "nope"})).await;
    assert_eq!(s, StatusCode::NOT_FOUND, "{v}");
    let (s, v) = post_json(&h.app, "/api/renders", json!({"demo_id": "dft-spatial", "input_id": "0".repeat(64)})).await;
    assert_eq!(s, StatusCode::NOT_FOUND, "{v}");
    let (s, v) =
        post_json(&h.app, "/api/renders", json!({"demo_id": "dct-spatial", "input_id": input, "params": {"keep_fraction": 7}}))
            .await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["code"], "schema_violation");
    assert_eq!(v["field"], "keep_fraction");
    assert!(!v["message"].as_str().unwrap().is_empty());
    let (s, v) = post_json(&h.app, "/api/renders", json!({"demo_id": "dft-spatial"})).await;
    assert_eq!((s, v["field"].clone()), (StatusCode::UNPROCESSABLE_ENTITY, json!("input_id")));
    let (s, v) = post_json(&h.app, "/api/renders", json!({"demo_id": "rr-map", "input_id": input})).await;
    assert_eq!((s, v["field"].clone()), (StatusCode::UNPROCESSABLE_ENTITY, json!("seed")));
    let (s, _) = post_json(&h.app, "/api/renders", json!({"params": 3})).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    let (s, _) = get(&h.app, "/api/renders/job-missing").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = get(&h.app, "/api/inputs/zz").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

fn tiny_y4m() -> Vec<u8> {
    let mut out = b"YUV4MPEG2 W8 H8 F25:1 Ip A1:1 C420jpeg\n".to_vec();
    for f in 0..2u8 {
        out.extend_from_slice(b"FRAME\n");
        out.extend((0..96u8).map(|i| i.wrapping_mul(3).wrapping_add(f)));
    }
    out
}

#[tokio::test(flavor = "multi_thread")]
async fn uploads_round_trip_and_respect_the_cap() {
    let h = harness_with(1, small_corpus(), 4096);
    let bytes = tiny_y4m();
    let req = Request::post("/api/inputs?name=tiny").body(Body::from(bytes.clone())).unwrap();
    let (s, b) = call(&h.app, req).await;
    assert_eq!(s, StatusCode::CREATED);
    let info: Value = serde_json::from_slice(&b).unwrap();
    assert_eq!((info["width"].clone(), info["frame_count"].clone()), (json!(8), json!(2)));
    let (s, back) = get(&h.app, &format!("/api/inputs/{}", info["input_id"].as_str().unwrap())).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(back, bytes);
    assert_eq!(input_id(&h.app, "tiny").await, info["input_id"].as_str().unwrap());

    let req = Request::post("/api/inputs").body(Body::from(b"not a video".to_vec())).unwrap();
    assert_eq!(call(&h.app, req).await.0, StatusCode::UNPROCESSABLE_ENTITY);
    let req = Request::post("/api/inputs").body(Body::from(vec![0u8; 8192])).unwrap();
    assert_eq!(call(&h.app, req).await.0, StatusCode::PAYLOAD_TOO_LARGE);
}

#[tokio::test(flavor = "multi_thread")]
async fn catalog_latency_under_render_load() {
    let corpus = CorpusOptions { width: 320, height: 180, frames: 24, fps: Rational::integer(24) };
    let h = harness_with(1, corpus, 1 << 20);
    let input = input_id(&h.app, "blob-motion").await;
    let req = json!({"demo_id": "flow-hs", "input_id": input, "params": {"frames": 4, "iterations": 2000}});
    let (_, v) = post_json(&h.app, "/api/renders", req).await;
    let job = v["job_id"].as_str().unwrap().to_string();
    while get_json(&h.app, &format!("/api/renders/{job}")).await.1["state"] == "queued" {
        tokio::time::sleep(Duration::from_millis(1)).await;
    }
    let mut samples = Vec::new();
    for _ in 0..200 {
        let t = Instant::now();
        let (s, _) = get(&h.app, "/api/catalog").await;
        samples.push(t.elapsed());
        assert_eq!(s, StatusCode::OK);
    }
    assert_eq!(get_json(&h.app, &format!("/api/renders/{job}")).await.1["state"], "running");
    samples.sort();
    let p99 = samples[samples.len() * 99 / 100 - 1];
    assert!(p99 < Duration::from_millis(50), "p99 {p99:?}");
}
