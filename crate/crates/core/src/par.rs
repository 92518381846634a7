// SPDX-License-Identifier: Apache-2.0

//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) work is spread over the rayon
//! pool. Results are always returned in index order, so any reduction done by
//! the caller is independent of the schedule.

/// How a batch of independent jobs is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Falls back to sequential execution when built without `parallel`.
    #[default]
    Parallel,
}

/// Evaluate `f(0..len)` and collect the results in index order.
pub fn map_indexed<T, F>(len: usize, exec: Exec, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..len).into_par_iter().map(f).collect()
        }
        _ => (0..len).map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let a = map_indexed(1000, Exec::Parallel, |i| i * i);
        let b = map_indexed(1000, Exec::Sequential, |i| i * i);
        assert_eq!(a, b);
    }
}
