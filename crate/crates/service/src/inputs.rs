use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use vip_core::video::{read_y4m, read_y4m_file};
use vip_core::{Rational, VideoClip};

use crate::cache::write_atomic;
use crate::error::ApiError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    /// SHA-256 of the uploaded bytes.
    pub input_id: String,
    pub name: Option<String>,
    pub width: usize,
    pub height: usize,
    pub frame_count: usize,
    pub fps: Rational,
    pub bytes: usize,
}

/// Uploaded `.y4m` clips stored by content hash, each with a JSON sidecar.
#[derive(Debug, Clone)]
pub(crate) struct InputStore {
    root: PathBuf,
}

fn valid_id(id: &str) -> bool {
    id.len() == 64 && id.bytes().all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase())
}

impl InputStore {
    pub(crate) fn open(root: PathBuf) -> io::Result<Self> {
        fs::create_dir_all(&root)?;
        Ok(InputStore { root })
    }

    pub(crate) fn path(&self, id: &str) -> Option<PathBuf> {
        valid_id(id).then(|| self.root.join(format!("{id}.y4m")))
    }

    pub(crate) fn get(&self, id: &str) -> Option<InputInfo> {
        if !valid_id(id) {
            return None;
        }
        let text = fs::read_to_string(self.root.join(format!("{id}.json"))).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub(crate) fn load_clip(&self, id: &str) -> vip_core::Result<VideoClip> {
        let path = self.path(id).ok_or_else(|| vip_core::Error::InvalidData(format!("bad input id {id:?}")))?;
        read_y4m_file(path)
    }

    /// Validate and store a clip; re-uploading identical bytes is a no-op.
    pub(crate) fn add(&self, bytes: &[u8], name: Option<String>) -> Result<InputInfo, ApiError> {
        let clip = read_y4m(bytes)
            .map_err(|e| ApiError::new(axum::http::StatusCode::UNPROCESSABLE_ENTITY, "invalid_input", e.to_string()))?;
        let id = hex::encode(Sha256::digest(bytes));
        if let Some(existing) = self.get(&id) {
            return Ok(existing);
        }
        let info = InputInfo {
            input_id: id.clone(),
            name,
            width: clip.width(),
            height: clip.height(),
            frame_count: clip.len(),
            fps: clip.fps(),
            bytes: bytes.len(),
        };
        write_atomic(&self.root.join(format!("{id}.y4m")), |w| w.write_all(bytes))?;
        let json = serde_json::to_vec_pretty(&info).map_err(io::Error::other)?;
        write_atomic(&self.root.join(format!("{id}.json")), |w| w.write_all(&json))?;
        Ok(info)
    }

    /// Stored inputs ordered by name, then id.
    pub(crate) fn list(&self) -> io::Result<Vec<InputInfo>> {
        let mut out = Vec::new();
        for entry in fs::read_dir(&self.root)? {
            let name = entry?.file_name();
            let name = name.to_string_lossy();
            if let Some(id) = name.strip_suffix(".json") {
                if let Some(info) = self.get(id) {
                    out.push(info);
                }
            }
        }
        out.sort_by(|a, b| (&a.name, &a.input_id).cmp(&(&b.name, &b.input_id)));
        Ok(out)
    }
}
