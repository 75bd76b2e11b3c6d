//! Data-parallel sweep drivers with a sequential fallback.
//!
//! The exhaustive suites and benchmarks all reduce to "apply a pure check
//! to every index of a family and combine". With the `parallel` feature
//! (default) the indexed drivers fan out over rayon; without it they run a
//! plain loop. Results are identical either way: the checks are pure and
//! the combining operations commutative.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Count the indices in `0..n` satisfying `pred`.
pub fn count_where<F>(n: u64, pred: F) -> u64
where
    F: Fn(u64) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().filter(|&i| pred(i)).count() as u64
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).filter(|&i| pred(i)).count() as u64
    }
}

/// Sequential twin of [`count_where`], available regardless of features —
/// benchmarks compare the two.
pub fn count_where_seq<F>(n: u64, pred: F) -> u64
where
    F: Fn(u64) -> bool,
{
    (0..n).filter(|&i| pred(i)).count() as u64
}

/// First index (in no particular order) where `check` reports a violation,
/// or `None` if all pass.
pub fn find_violation<F, V>(n: u64, check: F) -> Option<(u64, V)>
where
    F: Fn(u64) -> Option<V> + Sync + Send,
    V: Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().find_map_any(|i| check(i).map(|v| (i, v)))
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).find_map(|i| check(i).map(|v| (i, v)))
    }
}

/// Map every index and collect, preserving index order.
pub fn map_collect<T, F>(n: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> T + Sync + Send,
    T: Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential twin of [`map_collect`].
pub fn map_collect_seq<T, F>(n: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let pred = |i: u64| i % 7 == 0;
        assert_eq!(count_where(1000, pred), count_where_seq(1000, pred));
        let f = |i: u64| i * i;
        assert_eq!(map_collect(100, f), map_collect_seq(100, f));
    }

    #[test]
    fn find_violation_spots_the_failure() {
        let check = |i: u64| if i == 123 { Some("bad") } else { None };
        assert_eq!(find_violation(1000, check), Some((123, "bad")));
        assert_eq!(find_violation(100, check), None);
    }
}
