//! Per-cell data parallelism.
//!
//! With the `parallel` feature the [`Exec::Parallel`] mode maps over cells
//! on the rayon pool; without it every mode runs sequentially. Results are
//! collected in index order either way, so output is bitwise identical.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution mode for per-cell loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Below this many items the rayon overhead dominates.
#[cfg(feature = "parallel")]
const MIN_PARALLEL_LEN: usize = 64;

impl Exec {
    /// Evaluates `f(0..n)` and collects the results in order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel if n >= MIN_PARALLEL_LEN => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Like [`Exec::map`] but stops at the first error (lowest index wins).
    pub fn try_map<T, E, F>(self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel if n >= MIN_PARALLEL_LEN => {
                // collect every result so the reported error does not depend on scheduling
                let all: Vec<Result<T, E>> = (0..n).into_par_iter().map(f).collect();
                all.into_iter().collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let f = |i: usize| (i as f64).sqrt().sin();
        let a = Exec::Sequential.map(1000, f);
        let b = Exec::Parallel.map(1000, f);
        assert_eq!(a, b);
    }

    #[test]
    fn first_error_is_lowest_index() {
        let r: Result<Vec<usize>, usize> = Exec::Parallel.try_map(500, |i| if i % 97 == 13 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(13));
    }
}
