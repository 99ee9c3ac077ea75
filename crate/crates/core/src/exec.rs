//! Data-parallel evaluation of independent tasks.
//!
//! With the `parallel` feature (default) tasks run on the rayon pool; without
//! it every [`Execution`] falls back to a plain sequential loop. Results are
//! always returned in task-index order, so output never depends on scheduling.

/// How a batch of independent tasks is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon work-stealing; sequential when built without `parallel`.
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run tasks in parallel.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Evaluates `task(0..count)` and collects results in index order.
pub fn map_indexed<T, F>(count: usize, execution: Execution, task: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if execution == Execution::Parallel {
        use rayon::prelude::*;
        return (0..count).into_par_iter().map(task).collect();
    }
    let _ = execution;
    (0..count).map(task).collect()
}

/// Like [`map_indexed`] over a slice.
pub fn map_slice<S, T, F>(items: &[S], execution: Execution, task: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    map_indexed(items.len(), execution, |k| task(&items[k]))
}
