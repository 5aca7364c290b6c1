//! Permutations, cycle notation and Foata's bijection.
//!
//! Rankings here are 1-based, as in one-line notation `[i_1, ..., i_n]`
//! where `sigma(j) = i_j`. File formats elsewhere in the crate are 0-based.

use std::fmt::Debug;

use crate::error::{Error, Result};

/// A permutation of `{1..n}` in one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    oneline: Vec<usize>,
}

impl Permutation {
    pub fn new(oneline: Vec<usize>) -> Result<Self> {
        let n = oneline.len();
        let mut seen = vec![false; n + 1];
        for &v in &oneline {
            if v == 0 || v > n || seen[v] {
                return Err(Error::InvalidPartition(format!(
                    "{oneline:?} is not a permutation of 1..={n}"
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation { oneline })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            oneline: (1..=n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.oneline.len()
    }

    pub fn is_empty(&self) -> bool {
        self.oneline.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.oneline
    }

    /// `sigma(j)` for `j` in `1..=n`.
    pub fn image(&self, j: usize) -> usize {
        self.oneline[j - 1]
    }
}

/// Disjoint cycles of a permutation. Each cycle lists `c_1, sigma(c_1), ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycleDecomposition {
    pub cycles: Vec<Vec<usize>>,
}

impl CycleDecomposition {
    pub fn sizes(&self) -> Vec<u64> {
        self.cycles.iter().map(|c| c.len() as u64).collect()
    }

    /// The cycles as an unordered partition: each cycle sorted ascending and
    /// the cycles sorted by their smallest member.
    pub fn as_partition(&self) -> Vec<Vec<usize>> {
        let mut p: Vec<Vec<usize>> = self
            .cycles
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort_unstable();
                c
            })
            .collect();
        p.sort_unstable();
        p
    }
}

/// Ordered clusters of rankings in Foata canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalClustering {
    pub lists: Vec<Vec<usize>>,
}

impl CanonicalClustering {
    /// Drops the cluster boundaries, giving a permutation in one-line form.
    pub fn flatten(&self) -> Permutation {
        Permutation {
            oneline: self.lists.iter().flatten().copied().collect(),
        }
    }
}

/// Replaces every item of `sequence` by its 1-based rank among all items.
pub fn induced_permutation<T: Ord + Debug>(sequence: &[T]) -> Result<Permutation> {
    let mut order: Vec<usize> = (0..sequence.len()).collect();
    order.sort_unstable_by(|&a, &b| sequence[a].cmp(&sequence[b]));
    for w in order.windows(2) {
        if sequence[w[0]] == sequence[w[1]] {
            return Err(Error::DuplicateElement(format!("{:?}", sequence[w[0]])));
        }
    }
    let mut oneline = vec![0; sequence.len()];
    for (rank, &pos) in order.iter().enumerate() {
        oneline[pos] = rank + 1;
    }
    Ok(Permutation { oneline })
}

/// Cycles with the smallest member first, ordered by that member ascending.
pub fn cycle_decomposition(p: &Permutation) -> CycleDecomposition {
    let n = p.len();
    let mut visited = vec![false; n + 1];
    let mut cycles = Vec::new();
    for start in 1..=n {
        if visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut j = start;
        while !visited[j] {
            visited[j] = true;
            cycle.push(j);
            j = p.image(j);
        }
        cycles.push(cycle);
    }
    CycleDecomposition { cycles }
}

/// Builds the permutation whose cycles are exactly `cycles`, each read as
/// `c_1 -> c_2 -> ... -> c_1`.
pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Permutation> {
    let mut oneline = vec![0; n];
    for cycle in cycles {
        for (i, &c) in cycle.iter().enumerate() {
            let next = cycle[(i + 1) % cycle.len()];
            if c == 0 || c > n || oneline[c - 1] != 0 {
                return Err(Error::InvalidPartition(format!("bad cycle entry {c}")));
            }
            oneline[c - 1] = next;
        }
    }
    Permutation::new(oneline)
}

/// Foata's bijection: write cycles smallest-first, order them by decreasing
/// first element and drop the parentheses.
pub fn foata_map(p: &Permutation) -> Permutation {
    let mut cycles = cycle_decomposition(p).cycles;
    cycles.reverse();
    Permutation {
        oneline: cycles.into_iter().flatten().collect(),
    }
}

/// Splits `p` at its left-to-right minima, reading each piece as a cycle.
pub fn foata_cycles(p: &Permutation) -> Vec<Vec<usize>> {
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut min = usize::MAX;
    for &v in p.as_slice() {
        if v < min {
            min = v;
            cycles.push(vec![v]);
        } else {
            cycles.last_mut().expect("first value is a minimum").push(v);
        }
    }
    cycles
}

pub fn foata_inverse(p: &Permutation) -> Permutation {
    from_cycles(p.len(), &foata_cycles(p)).expect("pieces of a permutation are disjoint cycles")
}

/// Sorts each cluster ascending and the clusters by decreasing head.
/// No validation beyond rejecting empty clusters.
pub fn foata_order<T: Ord>(mut clusters: Vec<Vec<T>>) -> Result<Vec<Vec<T>>> {
    if clusters.iter().any(|c| c.is_empty()) {
        return Err(Error::EmptyCluster);
    }
    for c in clusters.iter_mut() {
        c.sort_unstable();
    }
    clusters.sort_unstable_by(|a, b| b[0].cmp(&a[0]));
    Ok(clusters)
}

/// Foata canonical form of a partition of `{1..n}`.
pub fn canonicalize(clusters: &[Vec<usize>]) -> Result<CanonicalClustering> {
    let n: usize = clusters.iter().map(Vec::len).sum();
    let mut seen = vec![false; n + 1];
    for &v in clusters.iter().flatten() {
        if v == 0 || v > n {
            return Err(Error::InvalidPartition(format!("{v} outside 1..={n}")));
        }
        if seen[v] {
            return Err(Error::InvalidPartition(format!("{v} appears twice")));
        }
        seen[v] = true;
    }
    Ok(CanonicalClustering {
        lists: foata_order(clusters.to_vec())?,
    })
}

const EXACT_FACTORIALS: usize = 21;

fn factorial_table() -> &'static [u64; EXACT_FACTORIALS] {
    static TABLE: std::sync::OnceLock<[u64; EXACT_FACTORIALS]> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1u64; EXACT_FACTORIALS];
        for i in 1..EXACT_FACTORIALS {
            t[i] = t[i - 1] * i as u64;
        }
        t
    })
}

/// `log2(n!)`: exact integer factorial for `n <= 20`, log-gamma above.
pub fn log2_factorial(n: u64) -> f64 {
    if (n as usize) < EXACT_FACTORIALS {
        (factorial_table()[n as usize] as f64).log2()
    } else {
        libm::lgamma(n as f64 + 1.0) / std::f64::consts::LN_2
    }
}

/// `log2 |Pi| = sum_i log2((n_i - 1)!)`, the number of orderings whose
/// induced-permutation cycles realize a clustering with these sizes. Empty
/// input gives 0.
pub fn log_class_size(cluster_sizes: &[u64]) -> f64 {
    cluster_sizes
        .iter()
        .map(|&s| {
            debug_assert!(s >= 1, "cluster sizes must be positive");
            log2_factorial(s.saturating_sub(1))
        })
        .sum()
}
