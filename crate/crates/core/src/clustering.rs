use crate::element::Element;
use crate::error::{Error, Result};
use crate::perm::foata_order;

/// A set of disjoint, non-empty clusters of distinct fixed-width elements.
///
/// Stored in Foata canonical order: every cluster ascending, clusters by
/// decreasing smallest element. Two clusterings are equal iff they are equal
/// as sets of sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clustering {
    width: usize,
    clusters: Vec<Vec<Element>>,
}

impl Clustering {
    pub fn new(width: usize, clusters: Vec<Vec<Element>>) -> Result<Self> {
        if width == 0 {
            return Err(Error::ZeroWidth);
        }
        for e in clusters.iter().flatten() {
            if e.width() != width {
                return Err(Error::WidthMismatch {
                    expected: width,
                    found: e.width(),
                });
            }
        }
        let clusters = foata_order(clusters)?;
        let mut all: Vec<&Element> = clusters.iter().flatten().collect();
        all.sort_unstable();
        if let Some(w) = all.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateElement(w[0].to_hex()));
        }
        Ok(Clustering { width, clusters })
    }

    pub fn empty(width: usize) -> Result<Self> {
        Self::new(width, Vec::new())
    }

    /// Convenience constructor from integers, each stored big-endian in
    /// `width` bytes.
    pub fn from_u64s(width: usize, clusters: &[Vec<u64>]) -> Result<Self> {
        Self::new(
            width,
            clusters
                .iter()
                .map(|c| c.iter().map(|&v| Element::from_u64(v, width)).collect())
                .collect(),
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Total number of elements.
    pub fn n(&self) -> usize {
        self.clusters.iter().map(Vec::len).sum()
    }

    /// Number of clusters.
    pub fn k(&self) -> usize {
        self.clusters.len()
    }

    /// Cluster sizes in canonical order.
    pub fn sizes(&self) -> Vec<u64> {
        self.clusters.iter().map(|c| c.len() as u64).collect()
    }

    /// Clusters in canonical order.
    pub fn clusters(&self) -> &[Vec<Element>] {
        &self.clusters
    }

    pub fn into_clusters(self) -> Vec<Vec<Element>> {
        self.clusters
    }

    /// The canonical sequence: clusters concatenated in canonical order.
    pub fn canonical_sequence(&self) -> impl Iterator<Item = &Element> {
        self.clusters.iter().flatten()
    }

    /// Clusters ordered by increasing smallest element.
    pub fn ascending_by_min(&self) -> impl DoubleEndedIterator<Item = &Vec<Element>> {
        self.clusters.iter().rev()
    }
}
