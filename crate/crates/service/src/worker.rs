use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::mpsc::Receiver;
use std::sync::{Arc, Mutex};

use vip_core::engine::render_demo_with_progress;

use crate::api::Inner;

/// Spawn `n` render threads that take job ids from `queue` in FIFO order.
pub(crate) fn spawn_workers(state: Arc<Inner>, queue: Receiver<String>, n: usize) -> std::io::Result<()> {
    let queue = Arc::new(Mutex::new(queue));
    for i in 0..n {
        let (state, queue) = (state.clone(), queue.clone());
        std::thread::Builder::new().name(format!("vip-render-{i}")).spawn(move || loop {
            let next = queue.lock().unwrap_or_else(|e| e.into_inner()).recv();
            match next {
                Ok(id) => run_job(&state, &id),
                Err(_) => break,
            }
        })?;
    }
    Ok(())
}

fn run_job(state: &Inner, id: &str) {
    let Some((req, key)) = state.jobs().start(id) else { return };
    state.renders.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
    let outcome = catch_unwind(AssertUnwindSafe(|| -> Result<_, String> {
        let input = match &req.input_id {
            Some(input_id) => Some(state.inputs.load_clip(input_id).map_err(|e| e.to_string())?),
            None => None,
        };
        let out = render_demo_with_progress(&req.demo_id, input.as_ref(), &req.params, req.seed, &|f| {
            // Leave headroom for the cache write.
            state.jobs().progress(id, 0.99 * f)
        })
        .map_err(|e| e.to_string())?;
        state.cache.store(&key, &out).map_err(|e| format!("cache write failed: {e}"))?;
        Ok(out.manifest)
    }));
    let result = outcome.unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "render panicked".into());
        Err(format!("internal error: {msg}"))
    });
    if let Err(e) = &result {
        log::warn!("job {id} failed: {e}");
    }
    state.jobs().finish(id, result);
}
