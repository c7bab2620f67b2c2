use std::net::SocketAddr;
use std::path::PathBuf;

use vip_core::engine::CorpusOptions;

#[derive(Debug, Clone)]
pub struct Config {
    pub data_dir: PathBuf,
    pub bind: SocketAddr,
    pub workers: usize,
    /// Upload size cap in bytes.
    pub max_upload_bytes: usize,
    /// Corpus clips registered as inputs at startup, if any.
    pub seed_corpus: Option<CorpusOptions>,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get().saturating_sub(1).max(1))
}

impl Config {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        Config {
            data_dir: data_dir.into(),
            bind: SocketAddr::from(([127, 0, 0, 1], 8080)),
            workers: default_workers(),
            max_upload_bytes: 512 << 20,
            seed_corpus: Some(CorpusOptions::default()),
        }
    }

    /// `VIP_DATA_DIR`, `VIP_BIND`, `VIP_WORKERS` and `VIP_MAX_UPLOAD_BYTES`
    /// override the defaults.
    pub fn from_env() -> Result<Self, String> {
        let var = |k: &str| std::env::var(k).ok().filter(|v| !v.is_empty());
        let mut c = Config::new(var("VIP_DATA_DIR").unwrap_or_else(|| "vip-data".into()));
        if let Some(b) = var("VIP_BIND") {
            c.bind = b.parse().map_err(|e| format!("VIP_BIND={b:?}: {e}"))?;
        }
        if let Some(w) = var("VIP_WORKERS") {
            c.workers = w.parse().ok().filter(|&n| n > 0).ok_or(format!("VIP_WORKERS={w:?} is not a positive integer"))?;
        }
        if let Some(m) = var("VIP_MAX_UPLOAD_BYTES") {
            c.max_upload_bytes = m.parse().map_err(|e| format!("VIP_MAX_UPLOAD_BYTES={m:?}: {e}"))?;
        }
        Ok(c)
    }
}
