//! Scoped worker threads for independent ball pairs.

use std::sync::atomic::{AtomicUsize, Ordering};

use synchro_core::Executor;

/// Fixed-size pool of scoped threads pulling job indices from a shared
/// counter. Results come back in index order whatever the schedule.
#[derive(Debug, Clone, Copy)]
pub struct Threads {
    workers: usize,
}

impl Threads {
    /// `0` means one worker per available core.
    pub fn new(workers: usize) -> Self {
        let workers = if workers == 0 {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        } else {
            workers
        };
        Threads { workers }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }
}

impl Executor for Threads {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        let workers = self.workers.min(n);
        if workers <= 1 {
            return (0..n).map(f).collect();
        }
        let next = AtomicUsize::new(0);
        let mut parts: Vec<Vec<(usize, T)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|_| {
                    scope.spawn(|| {
                        let mut out = Vec::new();
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            if i >= n {
                                break out;
                            }
                            out.push((i, f(i)));
                        }
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
        for (i, v) in parts.iter_mut().flat_map(std::mem::take) {
            slots[i] = Some(v);
        }
        slots.into_iter().map(|v| v.expect("every index ran once")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        for w in [1, 2, 7] {
            let out = Threads::new(w).map(100, |i| i * i);
            assert_eq!(out, (0..100).map(|i| i * i).collect::<Vec<_>>());
        }
    }

    #[test]
    fn empty_job_list() {
        let out: Vec<u8> = Threads::new(4).map(0, |_| 0);
        assert!(out.is_empty());
    }
}
