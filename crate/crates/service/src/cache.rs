use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;
use sha2::{Digest, Sha256};
use vip_core::engine::{ParamMap, RenderManifest, RenderOutput};
use vip_core::video::write_y4m;
use vip_core::YuvFrame;

/// SHA-256 over the canonical JSON of `(demo_id, input checksum, params,
/// seed)`. Parameters must already be resolved so that defaults and number
/// spellings are normalized; the map keeps them sorted by name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey(String);

#[derive(Serialize)]
struct KeyMaterial<'a> {
    demo_id: &'a str,
    input_checksum: Option<&'a str>,
    params: &'a ParamMap,
    seed: Option<u64>,
}

impl CacheKey {
    pub fn new(demo_id: &str, input_checksum: Option<&str>, params: &ParamMap, seed: Option<u64>) -> Self {
        let material = serde_json::to_vec(&KeyMaterial { demo_id, input_checksum, params, seed })
            .expect("key material serializes");
        CacheKey(hex::encode(Sha256::digest(material)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) const VIDEO_FILE: &str = "demo.y4m";
pub(crate) const MANIFEST_FILE: &str = "manifest.json";

/// Write `bytes` to `path` via a synced temporary sibling and a rename.
pub(crate) fn write_atomic(path: &Path, write: impl FnOnce(&mut BufWriter<&File>) -> io::Result<()>) -> io::Result<()> {
    static SEQ: AtomicU64 = AtomicU64::new(0);
    let dir = path.parent().expect("cache paths have a parent");
    let tmp = dir.join(format!(
        ".tmp-{}-{}",
        std::process::id(),
        SEQ.fetch_add(1, Ordering::Relaxed)
    ));
    let result = (|| {
        let file = File::create(&tmp)?;
        {
            let mut w = BufWriter::new(&file);
            write(&mut w)?;
            w.flush()?;
        }
        file.sync_all()?;
        fs::rename(&tmp, path)?;
        File::open(dir)?.sync_all()
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Finished renders, one directory per cache key holding `demo.y4m` and
/// `manifest.json`. The manifest is written last so its presence marks a
/// complete entry.
#[derive(Debug, Clone)]
pub(crate) struct RenderCache {
    root: PathBuf,
}

impl RenderCache {
    pub(crate) fn open(root: PathBuf) -> io::Result<Self> {
        fs::create_dir_all(&root)?;
        Ok(RenderCache { root })
    }

    fn dir(&self, key: &CacheKey) -> PathBuf {
        self.root.join(key.as_str())
    }

    pub(crate) fn video_path(&self, key: &CacheKey) -> PathBuf {
        self.dir(key).join(VIDEO_FILE)
    }

    pub(crate) fn lookup(&self, key: &CacheKey) -> Option<RenderManifest> {
        let text = fs::read_to_string(self.dir(key).join(MANIFEST_FILE)).ok()?;
        serde_json::from_str(&text).ok()
    }

    /// Publish a render. An existing entry must carry the same content
    /// checksum; anything else is a coherence violation.
    pub(crate) fn store(&self, key: &CacheKey, out: &RenderOutput) -> io::Result<()> {
        if let Some(existing) = self.lookup(key) {
            if existing.content_checksum != out.manifest.content_checksum {
                return Err(io::Error::other(format!(
                    "cache coherence violated for {}: {} != {}",
                    key.as_str(),
                    existing.content_checksum,
                    out.manifest.content_checksum
                )));
            }
            return Ok(());
        }
        let dir = self.dir(key);
        fs::create_dir_all(&dir)?;
        write_atomic(&dir.join(VIDEO_FILE), |w| {
            write_y4m(&out.clip, w).map(|_| ()).map_err(io::Error::other)
        })?;
        let json = serde_json::to_vec_pretty(&out.manifest).map_err(io::Error::other)?;
        write_atomic(&dir.join(MANIFEST_FILE), |w| w.write_all(&json))
    }

    /// Frame `n` of a cached render, read straight from the `.y4m` file.
    pub(crate) fn read_frame(&self, key: &CacheKey, m: &RenderManifest, n: usize) -> io::Result<YuvFrame> {
        let mut f = File::open(self.video_path(key))?;
        let mut head = [0u8; 256];
        let got = f.read(&mut head)?;
        let header_len = head[..got]
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| io::Error::other("cached stream has no header line"))?
            + 1;
        let payload = m.frame_payload_len;
        f.seek(SeekFrom::Start((header_len + n * (6 + payload) + 6) as u64))?;
        let mut buf = vec![0u8; payload];
        f.read_exact(&mut buf)?;
        let (w, h) = (m.width, m.height);
        let luma = w * h;
        let chroma = (payload - luma) / 2;
        YuvFrame::new(w, h, buf[..luma].to_vec(), buf[luma..luma + chroma].to_vec(), buf[luma + chroma..].to_vec())
            .map_err(io::Error::other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use vip_core::engine::ParamValue;

    #[test]
    fn key_is_order_and_whitespace_independent() {
        let a: ParamMap = serde_json::from_str(r#"{"b": 2, "a": 1.5}"#).unwrap();
        let b: ParamMap = serde_json::from_str("{\"a\":1.5,\n  \"b\":2}").unwrap();
        assert_eq!(CacheKey::new("x", None, &a, None), CacheKey::new("x", None, &b, None));
        let mut c = a.clone();
        c.insert("b".into(), ParamValue::Int(3));
        assert_ne!(CacheKey::new("x", None, &a, None), CacheKey::new("x", None, &c, None));
        assert_ne!(CacheKey::new("x", None, &a, Some(1)), CacheKey::new("x", None, &a, None));
        assert_ne!(CacheKey::new("x", Some("i"), &a, None), CacheKey::new("x", None, &a, None));
        assert_eq!(CacheKey::new("x", None, &a, None).as_str().len(), 64);
    }
}
