//! Deterministic fork-join helpers.
//!
//! Results are returned in input order and reduced by the caller in that
//! order, so outputs are bitwise independent of the worker count. The
//! `SPIKELOC_THREADS` environment variable caps parallelism.

/// Effective worker count for `n` items.
pub fn worker_count(n: usize) -> usize {
    let hw = std::thread::available_parallelism()
        .map(|v| v.get())
        .unwrap_or(1);
    let cap = std::env::var("SPIKELOC_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or(hw);
    cap.min(hw.max(1)).min(n.max(1))
}

/// Applies `f` to every index in `0..n`, in parallel, returning results in
/// index order.
pub fn map_indexed<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    let workers = worker_count(n);
    if workers <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let chunk = n.div_ceil(workers);
    let mut slots: Vec<Option<R>> = (0..n).map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for (w, slot_chunk) in slots.chunks_mut(chunk).enumerate() {
            let f = &f;
            handles.push(scope.spawn(move || {
                for (i, slot) in slot_chunk.iter_mut().enumerate() {
                    *slot = Some(f(w * chunk + i));
                }
            }));
        }
        for h in handles {
            h.join().expect("worker panicked");
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("all slots filled"))
        .collect()
}
