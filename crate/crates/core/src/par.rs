//! Slab-parallel helpers. With the `parallel` feature these dispatch to
//! rayon, otherwise they run the same closures in order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Calls `f(slab_index, slab)` on consecutive chunks of `slab_len` elements.
pub(crate) fn for_each_slab<T, F>(data: &mut [T], slab_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(slab_len)
        .enumerate()
        .for_each(|(k, s)| f(k, s));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(slab_len)
        .enumerate()
        .for_each(|(k, s)| f(k, s));
}

/// Evaluates `f` for every index in `0..count`, preserving order.
pub(crate) fn map_indices<R, F>(count: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

const PAIRWISE_BLOCK: usize = 32;

/// Fixed-shape pairwise summation. The tree depends only on the length of
/// the input, never on scheduling.
pub(crate) fn pairwise_sum<const K: usize>(values: &[[f64; K]]) -> [f64; K] {
    if values.len() <= PAIRWISE_BLOCK {
        let mut acc = [0.0; K];
        for v in values {
            for c in 0..K {
                acc[c] += v[c];
            }
        }
        return acc;
    }
    let mid = values.len() / 2;
    let a = pairwise_sum(&values[..mid]);
    let b = pairwise_sum(&values[mid..]);
    let mut out = [0.0; K];
    for c in 0..K {
        out[c] = a[c] + b[c];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_exact_integer_sums() {
        let v: Vec<[f64; 2]> = (0..1000).map(|i| [i as f64, 1.0]).collect();
        assert_eq!(pairwise_sum(&v), [499500.0, 1000.0]);
        assert_eq!(pairwise_sum::<1>(&[]), [0.0]);
    }

    #[test]
    fn map_indices_keeps_order() {
        let v = map_indices(100, |i| i * 2);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i));
    }
}
