//! Batch evaluation with deterministic early cancellation.
//!
//! A batch maps an index range through a fallible function and stops at the
//! first index whose result satisfies a stop predicate (or errors). Tasks
//! with a higher index than the lowest stop seen so far are skipped; tasks
//! with a lower index always run. The returned prefix is therefore the same
//! for every thread count and interleaving.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

/// Where batches run: inline on the caller's thread, or on a private pool.
pub struct Executor {
    pool: Option<rayon::ThreadPool>,
    threads: usize,
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Executor").field("threads", &self.threads).finish()
    }
}

/// Result of [`Executor::map_until`]: the computed prefix and, if the batch
/// stopped early, the index of the stopping element (the last in `items`).
#[derive(Debug)]
pub struct Batch<T> {
    pub items: Vec<T>,
    pub stopped_at: Option<usize>,
}

pub fn available_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl Executor {
    pub fn sequential() -> Self {
        Executor { pool: None, threads: 1 }
    }

    /// `None` means available parallelism.
    pub fn new(threads: Option<usize>) -> Self {
        let threads = threads.unwrap_or_else(available_threads).max(1);
        if threads == 1 {
            return Self::sequential();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => Executor { pool: Some(pool), threads },
            Err(e) => {
                log::warn!("falling back to sequential evaluation: {e}");
                Self::sequential()
            }
        }
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn map_until<T, E, F, S>(&self, n: usize, f: F, stop: S) -> Result<Batch<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync,
        S: Fn(&T) -> bool + Sync,
    {
        let Some(pool) = &self.pool else {
            let mut items = Vec::with_capacity(n);
            for i in 0..n {
                let item = f(i)?;
                let halt = stop(&item);
                items.push(item);
                if halt {
                    return Ok(Batch { items, stopped_at: Some(i) });
                }
            }
            return Ok(Batch { items, stopped_at: None });
        };

        let first_stop = AtomicUsize::new(usize::MAX);
        let slots: Vec<Option<Result<T, E>>> = pool.install(|| {
            (0..n)
                .into_par_iter()
                .map(|i| {
                    if first_stop.load(Ordering::Acquire) < i {
                        return None;
                    }
                    let r = f(i);
                    if r.as_ref().map_or(true, &stop) {
                        first_stop.fetch_min(i, Ordering::AcqRel);
                    }
                    Some(r)
                })
                .collect()
        });

        let cut = first_stop.into_inner();
        let end = if cut == usize::MAX { n } else { cut + 1 };
        let mut items = Vec::with_capacity(end);
        for slot in slots.into_iter().take(end) {
            // Every index at or below the lowest stop was evaluated.
            items.push(slot.expect("prefix task skipped")?);
        }
        Ok(Batch { items, stopped_at: (cut != usize::MAX).then_some(cut) })
    }

    pub fn map<T, E, F>(&self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync,
    {
        Ok(self.map_until(n, f, |_| false)?.items)
    }
}
