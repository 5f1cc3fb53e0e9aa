//! Deterministic work partitioning.
//!
//! Every parallel site in the crate maps a fixed, input-derived partition
//! range and collects results in partition order, so outputs are bitwise
//! identical whatever the worker count. With the `parallel` feature off the
//! same partitions run on the calling thread.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to every partition index in `0..parts` and returns the results
/// in index order.
#[cfg(feature = "parallel")]
pub(crate) fn map_partitions<T, F>(parts: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..parts).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_partitions<T, F>(parts: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..parts).map(f).collect()
}

/// Number of accumulator chunks for scatter-style reductions.
///
/// A pure function of the problem size (never of the worker count) so that
/// chunk boundaries, and therefore floating-point merge order, are fixed.
/// Bounded so dense per-chunk accumulators of `n^2` entries stay small.
pub(crate) fn scatter_chunks(parts: usize, n: usize) -> usize {
    let by_memory = (4_000_000 / (n * n).max(1)).max(1);
    parts.min(32).min(by_memory).max(1)
}

/// Splits `0..parts` into `chunks` contiguous ranges of near-equal length.
pub(crate) fn chunk_ranges(parts: usize, chunks: usize) -> Vec<std::ops::Range<usize>> {
    let chunks = chunks.min(parts.max(1));
    let base = parts / chunks;
    let extra = parts % chunks;
    let mut out = Vec::with_capacity(chunks);
    let mut start = 0;
    for c in 0..chunks {
        let len = base + usize::from(c < extra);
        out.push(start..start + len);
        start += len;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunk_ranges_cover_everything() {
        for parts in [0usize, 1, 5, 17, 64] {
            for chunks in [1usize, 2, 7, 32] {
                let ranges = chunk_ranges(parts, chunks);
                let mut next = 0;
                for r in &ranges {
                    assert_eq!(r.start, next);
                    next = r.end;
                }
                assert_eq!(next, parts);
            }
        }
    }

    #[test]
    fn map_partitions_preserves_order() {
        let out = map_partitions(100, |i| i * i);
        assert_eq!(out, (0..100).map(|i| i * i).collect::<Vec<_>>());
    }
}
