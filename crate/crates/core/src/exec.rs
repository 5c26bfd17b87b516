//! Sequential / data-parallel execution switch.
//!
//! Batch operations (grid searches, profile sweeps, Monte Carlo replicates)
//! take an [`Execution`] so callers and benchmarks can pick the strategy at
//! run time. Without the `parallel` feature, [`Execution::Parallel`] silently
//! runs sequentially. Results are always returned in index order.

/// How a batch of independent evaluations is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// True when this build can actually fan work out across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Evaluates `f(0..len)` and returns the results in index order.
pub(crate) fn map_range<T, F>(exec: Execution, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

/// Maps a slice element-wise, preserving order.
pub(crate) fn map_slice<S, T, F>(exec: Execution, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    map_range(exec, items.len(), |i| f(&items[i]))
}

/// Index and value of the smallest `f(i)` over `0..len`. Non-finite values
/// count as +∞; ties go to the smaller index, so the answer does not depend
/// on the reduction order.
pub(crate) fn argmin_range<F>(exec: Execution, len: usize, f: F) -> (usize, f64)
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let eval = |i: usize| {
        let v = f(i);
        (i, if v.is_finite() { v } else { f64::INFINITY })
    };
    let pick = |a: (usize, f64), b: (usize, f64)| {
        if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    };
    let init = (usize::MAX, f64::INFINITY);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len)
            .into_par_iter()
            .map(eval)
            .reduce(|| init, pick);
    }
    let _ = exec;
    (0..len).map(eval).fold(init, pick)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_strategies_preserve_order() {
        let seq = map_range(Execution::Sequential, 1000, |i| i * i);
        let par = map_range(Execution::Parallel, 1000, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[31], 961);
    }

    #[test]
    fn argmin_ties_break_low() {
        let f = |i: usize| if i % 7 == 3 { -1.0 } else { (i as f64).sin() };
        for exec in [Execution::Sequential, Execution::Parallel] {
            assert_eq!(argmin_range(exec, 10_000, f), (3, -1.0));
            assert_eq!(argmin_range(exec, 5, |_| f64::NAN).0, 0);
        }
    }
}
