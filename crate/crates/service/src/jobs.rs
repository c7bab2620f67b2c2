use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use vip_core::engine::{ParamMap, RenderManifest};

use crate::cache::CacheKey;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderRequest {
    pub demo_id: String,
    #[serde(default)]
    pub input_id: Option<String>,
    #[serde(default)]
    pub params: ParamMap,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobState {
    Queued,
    Running,
    Done,
    Failed,
}

impl JobState {
    /// Allowed moves: queued to running or failed, running to done or failed.
    pub fn can_advance_to(self, next: JobState) -> bool {
        use JobState::*;
        matches!((self, next), (Queued, Running) | (Queued, Failed) | (Running, Done) | (Running, Failed))
    }

    pub fn is_live(self) -> bool {
        matches!(self, JobState::Queued | JobState::Running)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RenderJob {
    pub job_id: String,
    /// The request after parameter resolution.
    pub request: RenderRequest,
    pub state: JobState,
    pub progress: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RenderManifest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub(crate) key: CacheKey,
}

impl RenderJob {
    fn advance(&mut self, next: JobState) {
        assert!(self.state.can_advance_to(next), "job {} cannot move {:?} -> {:?}", self.job_id, self.state, next);
        self.state = next;
    }
}

/// Every job ever submitted plus the newest job per cache key.
#[derive(Debug, Default)]
pub(crate) struct JobTable {
    jobs: HashMap<String, RenderJob>,
    by_key: HashMap<CacheKey, String>,
    next: u64,
}

impl JobTable {
    pub(crate) fn get(&self, id: &str) -> Option<&RenderJob> {
        self.jobs.get(id)
    }

    pub(crate) fn for_key(&self, key: &CacheKey) -> Option<&RenderJob> {
        self.by_key.get(key).and_then(|id| self.jobs.get(id))
    }

    pub(crate) fn insert(
        &mut self,
        key: CacheKey,
        request: RenderRequest,
        state: JobState,
        manifest: Option<RenderManifest>,
    ) -> &RenderJob {
        self.next += 1;
        let job_id = format!("job-{:06}-{}", self.next, &key.as_str()[..12]);
        let progress = if state == JobState::Done { 1.0 } else { 0.0 };
        let job = RenderJob { job_id: job_id.clone(), request, state, progress, manifest, error: None, key: key.clone() };
        self.by_key.insert(key, job_id.clone());
        self.jobs.entry(job_id).or_insert(job)
    }

    /// Move a queued job to running; returns what the worker needs.
    pub(crate) fn start(&mut self, id: &str) -> Option<(RenderRequest, CacheKey)> {
        let job = self.jobs.get_mut(id)?;
        job.advance(JobState::Running);
        Some((job.request.clone(), job.key.clone()))
    }

    pub(crate) fn progress(&mut self, id: &str, fraction: f64) {
        if let Some(job) = self.jobs.get_mut(id) {
            if job.state == JobState::Running && fraction > job.progress {
                job.progress = fraction.min(1.0);
            }
        }
    }

    pub(crate) fn finish(&mut self, id: &str, result: Result<RenderManifest, String>) {
        let Some(job) = self.jobs.get_mut(id) else { return };
        match result {
            Ok(m) => {
                job.advance(JobState::Done);
                job.progress = 1.0;
                job.manifest = Some(m);
            }
            Err(e) => {
                job.advance(JobState::Failed);
                job.error = Some(if e.is_empty() { "render failed".into() } else { e });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transitions_never_regress() {
        use JobState::*;
        let all = [Queued, Running, Done, Failed];
        let rank = |s: JobState| all.iter().position(|&x| x == s).unwrap().min(2);
        for a in all {
            for b in all {
                if a.can_advance_to(b) {
                    assert!(rank(b) > rank(a), "{a:?} -> {b:?}");
                }
            }
        }
        assert!(!Done.can_advance_to(Running));
        assert!(!Failed.can_advance_to(Queued));
    }

    #[test]
    fn failed_jobs_carry_an_error() {
        let mut t = JobTable::default();
        let key = CacheKey::new("d", None, &ParamMap::new(), None);
        let req = RenderRequest { demo_id: "d".into(), input_id: None, params: ParamMap::new(), seed: None };
        let id = t.insert(key, req, JobState::Queued, None).job_id.clone();
        t.start(&id).unwrap();
        t.progress(&id, 0.4);
        t.progress(&id, 0.2);
        assert_eq!(t.get(&id).unwrap().progress, 0.4);
        t.finish(&id, Err(String::new()));
        let job = t.get(&id).unwrap();
        assert_eq!(job.state, JobState::Failed);
        assert!(!job.error.as_deref().unwrap().is_empty());
    }
}
