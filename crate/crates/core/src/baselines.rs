//! ROC-1 and ROC-2: clustering codecs built from random order coding plus
//! explicitly transmitted cluster sizes.
//!
//! ROC-1 sends clusters in increasing order of their smallest element. Each
//! cluster is a ROC-coded set followed by its size, coded uniformly over
//! `1..=n - N_i` where `N_i` counts the elements the decoder has already
//! recovered. ROC-2 additionally lets the stack pick the cluster order (a
//! bits-back draw over the remaining clusters) and sends `k` uniformly over
//! `1..=n`.

use crate::ans::{ByteCodec, Coder};
use crate::clustering::Clustering;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::perm::{log2_factorial, log_class_size};
use crate::pool::SortedPool;
use crate::rcc::{check_width, finish_decode};
use crate::roc::{roc_decode_set, roc_encode_set};

/// Prefix sums `N_i = sum_{j<i} n_j` of a size sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizePrefix {
    pub cumulative: Vec<u64>,
}

impl SizePrefix {
    pub fn new(sizes: &[u64]) -> Self {
        let cumulative = sizes
            .iter()
            .scan(0u64, |acc, &s| {
                let before = *acc;
                *acc += s;
                Some(before)
            })
            .collect();
        SizePrefix { cumulative }
    }
}

pub fn roc1_encode<C: Coder + ?Sized>(
    clustering: &Clustering,
    stack: &mut C,
    codec: ByteCodec,
) -> Result<()> {
    check_width(clustering, codec)?;
    let n = clustering.n() as u64;
    // The decoder recovers clusters in ascending order, so push descending.
    let mut remaining = 0u64;
    for cluster in clustering.clusters() {
        let size = cluster.len() as u64;
        remaining += size;
        roc_encode_set(cluster, stack, codec)?;
        // remaining == n - N_i for this cluster
        stack.push_uniform(size - 1, remaining)?;
    }
    debug_assert_eq!(remaining, n);
    Ok(())
}

pub fn roc1_decode<C: Coder + ?Sized>(
    stack: &mut C,
    n: usize,
    codec: ByteCodec,
) -> Result<Clustering> {
    let n = n as u64;
    let mut decoded = 0u64;
    let mut clusters = Vec::new();
    while decoded < n {
        let size = stack.pop_uniform(n - decoded)? + 1;
        let pool = roc_decode_set(stack, size as usize, codec)?;
        clusters.push(pool.into_sorted_vec());
        decoded += size;
    }
    finish_decode(codec, clusters)
}

pub fn roc2_encode<C: Coder + ?Sized>(
    clustering: &Clustering,
    stack: &mut C,
    codec: ByteCodec,
) -> Result<()> {
    check_width(clustering, codec)?;
    let n = clustering.n() as u64;
    let k = clustering.k() as u64;
    if n == 0 {
        return Ok(());
    }
    stack.push_uniform(k - 1, n)?;
    // Pool ranks follow ascending minima, the reverse of canonical order.
    let clusters = clustering.clusters();
    let mut pool = SortedPool::from_sorted((0..k as u32).collect()).expect("positions are sorted");
    let mut remaining = n;
    while !pool.is_empty() {
        let pick = stack.pop_uniform(pool.len() as u64)?;
        let rank = pool
            .remove_at(pick as usize)
            .expect("index below pool size");
        let cluster = &clusters[clusters.len() - 1 - rank as usize];
        let size = cluster.len() as u64;
        let after = remaining - size;
        roc_encode_set(cluster, stack, codec)?;
        // The decoder will have recovered `after` elements when it reads this.
        stack.push_uniform(size - 1, n - after)?;
        remaining = after;
    }
    Ok(())
}

pub fn roc2_decode<C: Coder + ?Sized>(
    stack: &mut C,
    n: usize,
    codec: ByteCodec,
) -> Result<Clustering> {
    let n = n as u64;
    if n == 0 {
        return Clustering::empty(codec.width());
    }
    let mut decoded = 0u64;
    let mut pool: SortedPool<Vec<Element>> = SortedPool::new();
    while decoded < n {
        let size = stack.pop_uniform(n - decoded)? + 1;
        let cluster = roc_decode_set(stack, size as usize, codec)?.into_sorted_vec();
        let index = pool
            .insert(cluster)
            .map_err(|_| Error::Corrupt("cluster decoded twice".into()))?;
        stack.push_uniform(index as u64, pool.len() as u64)?;
        decoded += size;
    }
    let k = stack.pop_uniform(n)? + 1;
    if k != pool.len() as u64 {
        return Err(Error::Corrupt(format!(
            "cluster count {k} disagrees with {} decoded clusters",
            pool.len()
        )));
    }
    finish_decode(codec, pool.into_sorted_vec())
}

/// Bits saved by ROC-1 relative to a plain sequence, with sizes in
/// transmission order: `sum_i log2(n_i!) - log2(n - N_i)`.
pub fn delta_roc1(sizes: &[u64]) -> f64 {
    let n: u64 = sizes.iter().sum();
    let prefix = SizePrefix::new(sizes);
    sizes
        .iter()
        .zip(&prefix.cumulative)
        .map(|(&s, &before)| log2_factorial(s) - ((n - before) as f64).log2())
        .sum()
}

/// `delta_roc1 + log2(k!) - log2(n)`.
pub fn delta_roc2(sizes: &[u64]) -> f64 {
    let n: u64 = sizes.iter().sum();
    if n == 0 {
        return 0.0;
    }
    delta_roc1(sizes) + log2_factorial(sizes.len() as u64) - (n as f64).log2()
}

/// Sizes in the order ROC-1 transmits them (ascending smallest element).
pub fn roc1_size_order(clustering: &Clustering) -> Vec<u64> {
    clustering
        .ascending_by_min()
        .map(|c| c.len() as u64)
        .collect()
}

/// Rate gap to the optimum in percent: `(log2|Pi| - delta) / log2|Pi| * 100`.
pub fn gap_percent(sizes: &[u64], delta: f64) -> f64 {
    let optimum = log_class_size(sizes);
    (optimum - delta) / optimum * 100.0
}
