//! Data-parallel helpers with a sequential fallback.
//!
//! Kernels that loop over independent items (series coefficients, matrix
//! rows, Laurent monomials) go through [`map_range`] or [`for_each_mut`].
//! With the `parallel` feature the [`Exec::Parallel`] strategy dispatches to
//! rayon; without it every strategy runs sequentially and produces the same
//! output in the same order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for data-parallel kernels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
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

// Below this many items the rayon overhead dominates.
#[cfg(feature = "parallel")]
const MIN_PARALLEL_LEN: usize = 16;

/// `(start..end).map(f).collect()`, order-preserving.
pub fn map_range<T, F>(exec: Exec, start: usize, end: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel if end.saturating_sub(start) >= MIN_PARALLEL_LEN => (start..end).into_par_iter().map(f).collect(),
        _ => (start..end).map(f).collect(),
    }
}

/// Map over a slice, order-preserving.
pub fn map_slice<S, T, F>(exec: Exec, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel if items.len() >= MIN_PARALLEL_LEN => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Mutate every element of a slice with access to its index.
pub fn for_each_mut<T, F>(exec: Exec, items: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel if items.len() >= MIN_PARALLEL_LEN => {
            items.par_iter_mut().enumerate().for_each(|(i, x)| f(i, x))
        }
        _ => items.iter_mut().enumerate().for_each(|(i, x)| f(i, x)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let seq = map_range(Exec::Sequential, 3, 200, |i| i * i);
        let par = map_range(Exec::Parallel, 3, 200, |i| i * i);
        assert_eq!(seq, par);
        let mut a: Vec<usize> = (0..100).collect();
        let mut b = a.clone();
        for_each_mut(Exec::Sequential, &mut a, |i, x| *x += i);
        for_each_mut(Exec::Parallel, &mut b, |i, x| *x += i);
        assert_eq!(a, b);
    }
}
