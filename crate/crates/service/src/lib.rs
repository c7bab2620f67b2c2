//! HTTP facade over the demo catalog and render engine.
//!
//! Renders run on a fixed pool of worker threads; finished renders are
//! stored on disk under their cache key and served from there.

mod api;
mod cache;
mod config;
mod error;
mod inputs;
mod jobs;
mod worker;

pub use api::{router, AppState};
pub use cache::CacheKey;
pub use config::Config;
pub use error::ApiError;
pub use inputs::InputInfo;
pub use jobs::{JobState, RenderJob, RenderRequest};

/// Bind, serve until Ctrl-C, then stop accepting requests.
pub async fn serve(config: Config) -> std::io::Result<()> {
    let bind = config.bind;
    let state = AppState::start(config)?;
    let listener = tokio::net::TcpListener::bind(bind).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
