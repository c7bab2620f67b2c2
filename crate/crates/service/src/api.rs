use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{channel, Sender};
use std::sync::{Arc, Mutex, MutexGuard};

use axum::body::{Body, Bytes};
use axum::extract::rejection::JsonRejection;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use vip_core::engine::{catalog, descriptor, generate_clip, resolve_params, CorpusClip, InputKind, ENGINE_VERSION};
use vip_core::video::{convert_color, write_y4m};
use vip_core::{Frame, FrameFormat};

use crate::cache::{CacheKey, RenderCache};
use crate::config::Config;
use crate::error::ApiError;
use crate::inputs::InputStore;
use crate::jobs::{JobState, JobTable, RenderJob, RenderRequest};
use crate::worker::spawn_workers;

pub(crate) struct Inner {
    pub(crate) config: Config,
    catalog_json: Bytes,
    jobs: Mutex<JobTable>,
    pub(crate) cache: RenderCache,
    pub(crate) inputs: InputStore,
    queue: Mutex<Sender<String>>,
    pub(crate) cache_hits: AtomicU64,
    pub(crate) renders: AtomicU64,
}

impl Inner {
    pub(crate) fn jobs(&self) -> MutexGuard<'_, JobTable> {
        self.jobs.lock().unwrap_or_else(|e| e.into_inner())
    }
}

/// Shared service state; cheap to clone.
#[derive(Clone)]
pub struct AppState(pub(crate) Arc<Inner>);

impl AppState {
    /// Open the data directory, register the corpus and start the workers.
    pub fn start(config: Config) -> std::io::Result<AppState> {
        let cache = RenderCache::open(config.data_dir.join("cache"))?;
        let inputs = InputStore::open(config.data_dir.join("inputs"))?;
        if let Some(opts) = &config.seed_corpus {
            for c in CorpusClip::ALL {
                let clip = generate_clip(c, opts).map_err(std::io::Error::other)?;
                let mut bytes = Vec::new();
                write_y4m(&clip, &mut bytes).map_err(std::io::Error::other)?;
                inputs.add(&bytes, Some(c.name().into())).map_err(|e| std::io::Error::other(e.message))?;
            }
        }
        let catalog_json = serde_json::to_vec(&json!({
            "engine_version": ENGINE_VERSION,
            "categories": catalog(),
        }))
        .map_err(std::io::Error::other)?;
        let (tx, rx) = channel();
        let workers = config.workers.max(1);
        let inner = Arc::new(Inner {
            config,
            catalog_json: Bytes::from(catalog_json),
            jobs: Mutex::new(JobTable::default()),
            cache,
            inputs,
            queue: Mutex::new(tx),
            cache_hits: AtomicU64::new(0),
            renders: AtomicU64::new(0),
        });
        spawn_workers(inner.clone(), rx, workers)?;
        Ok(AppState(inner))
    }

    /// Submissions answered from a finished render without recomputing.
    pub fn cache_hits(&self) -> u64 {
        self.0.cache_hits.load(Ordering::Relaxed)
    }

    /// Engine invocations so far.
    pub fn renders(&self) -> u64 {
        self.0.renders.load(Ordering::Relaxed)
    }

    pub fn job(&self, id: &str) -> Option<RenderJob> {
        self.0.jobs().get(id).cloned()
    }
}

pub fn router(state: AppState) -> Router {
    let cap = state.0.config.max_upload_bytes;
    Router::new()
        .route("/api/catalog", get(get_catalog))
        .route("/api/stats", get(get_stats))
        .route("/api/renders", axum::routing::post(submit))
        .route("/api/renders/{job_id}", get(get_job))
        .route("/api/renders/{job_id}/frames/{n}", get(get_frame))
        .route("/api/renders/{job_id}/video.y4m", get(get_video))
        .route("/api/inputs", get(list_inputs).post(upload_input).layer(DefaultBodyLimit::max(cap)))
        .route("/api/inputs/{input_id}", get(get_input))
        .with_state(state)
}

async fn get_catalog(State(s): State<AppState>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], s.0.catalog_json.clone()).into_response()
}

async fn get_stats(State(s): State<AppState>) -> Json<serde_json::Value> {
    Json(json!({ "cache_hits": s.cache_hits(), "renders": s.renders() }))
}

async fn submit(
    State(s): State<AppState>,
    body: Result<Json<RenderRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    let Json(req) = body.map_err(|e| ApiError::invalid("body", e.body_text()))?;
    let desc = descriptor(&req.demo_id)
        .ok_or_else(|| ApiError::not_found("unknown_demo", format!("unknown demo `{}`", req.demo_id)))?;
    let input_id = match desc.input_kind {
        InputKind::Clip => {
            let id = req.input_id.ok_or_else(|| ApiError::invalid("input_id", "this demo needs an input clip"))?;
            if s.0.inputs.get(&id).is_none() {
                return Err(ApiError::not_found("unknown_input", format!("unknown input `{id}`")));
            }
            Some(id)
        }
        InputKind::None => None,
    };
    let params = resolve_params(&desc.param_schema, &req.params)?;
    let seed = if desc.stochastic {
        Some(req.seed.ok_or_else(|| ApiError::invalid("seed", "this demo is stochastic and needs a seed"))?)
    } else {
        None
    };
    let key = CacheKey::new(&desc.id, input_id.as_deref(), &params, seed);
    let request = RenderRequest { demo_id: desc.id.clone(), input_id, params, seed };

    let inner = &s.0;
    let mut jobs = inner.jobs();
    if let Some(job) = jobs.for_key(&key) {
        match job.state {
            JobState::Done => {
                inner.cache_hits.fetch_add(1, Ordering::Relaxed);
                return Ok(done_response(job));
            }
            JobState::Queued | JobState::Running => {
                return Ok((StatusCode::ACCEPTED, Json(json!({"job_id": job.job_id, "state": job.state}))).into_response())
            }
            JobState::Failed => {}
        }
    }
    if let Some(manifest) = inner.cache.lookup(&key) {
        inner.cache_hits.fetch_add(1, Ordering::Relaxed);
        let job = jobs.insert(key, request, JobState::Done, Some(manifest));
        return Ok(done_response(job));
    }
    let job_id = jobs.insert(key, request, JobState::Queued, None).job_id.clone();
    drop(jobs);
    inner
        .queue
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .send(job_id.clone())
        .map_err(|_| ApiError::internal("render workers are gone"))?;
    Ok((StatusCode::ACCEPTED, Json(json!({"job_id": job_id, "state": JobState::Queued}))).into_response())
}

fn done_response(job: &RenderJob) -> Response {
    (StatusCode::OK, Json(json!({"job_id": job.job_id, "state": job.state, "manifest": job.manifest}))).into_response()
}

fn find_job(s: &AppState, id: &str) -> Result<RenderJob, ApiError> {
    s.job(id).ok_or_else(|| ApiError::not_found("unknown_job", format!("unknown job `{id}`")))
}

fn finished(job: &RenderJob) -> Result<&vip_core::engine::RenderManifest, ApiError> {
    match (&job.state, &job.manifest) {
        (JobState::Done, Some(m)) => Ok(m),
        _ => Err(ApiError::new(
            StatusCode::CONFLICT,
            "not_ready",
            format!("job `{}` is {:?}", job.job_id, job.state),
        )),
    }
}

async fn get_job(State(s): State<AppState>, Path(id): Path<String>) -> Result<Json<RenderJob>, ApiError> {
    Ok(Json(find_job(&s, &id)?))
}

async fn get_frame(State(s): State<AppState>, Path((id, n)): Path<(String, usize)>) -> Result<Response, ApiError> {
    let job = find_job(&s, &id)?;
    let m = finished(&job)?.clone();
    if n >= m.frame_count {
        return Err(ApiError::not_found(
            "frame_out_of_range",
            format!("frame {n} is past the last frame {}", m.frame_count - 1),
        ));
    }
    let png = tokio::task::spawn_blocking(move || -> Result<Vec<u8>, ApiError> {
        let yuv = s.0.cache.read_frame(&job.key, &m, n)?;
        let Frame::Rgb24(rgb) = convert_color(&Frame::Y420(yuv), FrameFormat::Rgb24)? else {
            unreachable!("conversion target is RGB")
        };
        encode_png(rgb.width(), rgb.height(), rgb.data()).map_err(|e| ApiError::internal(e.to_string()))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(([(header::CONTENT_TYPE, "image/png")], png).into_response())
}

fn encode_png(w: usize, h: usize, rgb: &[u8]) -> Result<Vec<u8>, png::EncodingError> {
    let mut out = Vec::new();
    let mut enc = png::Encoder::new(&mut out, w as u32, h as u32);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    enc.write_header()?.write_image_data(rgb)?;
    Ok(out)
}

async fn stream_file(path: std::path::PathBuf, content_type: &'static str) -> Result<Response, ApiError> {
    let file = tokio::fs::File::open(&path).await?;
    let len = file.metadata().await?.len();
    let body = Body::from_stream(tokio_util::io::ReaderStream::new(file));
    Ok(([(header::CONTENT_TYPE, content_type.to_string()), (header::CONTENT_LENGTH, len.to_string())], body)
        .into_response())
}

async fn get_video(State(s): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let job = find_job(&s, &id)?;
    finished(&job)?;
    stream_file(s.0.cache.video_path(&job.key), "video/x-yuv4mpeg").await
}

async fn list_inputs(State(s): State<AppState>) -> Result<Response, ApiError> {
    Ok(Json(json!({ "inputs": s.0.inputs.list()? })).into_response())
}

#[derive(Deserialize)]
struct UploadQuery {
    name: Option<String>,
}

async fn upload_input(
    State(s): State<AppState>,
    Query(q): Query<UploadQuery>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let info = tokio::task::spawn_blocking(move || s.0.inputs.add(&body, q.name))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok((StatusCode::CREATED, Json(info)).into_response())
}

async fn get_input(State(s): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let unknown = || ApiError::not_found("unknown_input", format!("unknown input `{id}`"));
    s.0.inputs.get(&id).ok_or_else(unknown)?;
    let path = s.0.inputs.path(&id).ok_or_else(unknown)?;
    stream_file(path, "video/x-yuv4mpeg").await
}
