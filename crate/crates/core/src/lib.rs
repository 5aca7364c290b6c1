//! Lossless compression of clustered data via Random Cycle Coding.
//!
//! A clustering of `n` distinct elements into `k` clusters is sent as a
//! single ordering of the elements whose induced permutation has exactly one
//! disjoint cycle per cluster. Bits-back coding on an ANS stack picks that
//! ordering, so the cluster assignments cost nothing beyond the elements
//! themselves and the encoder reclaims `sum_i log2((n_i - 1)!)` bits.
//!
//! Module map:
//!
//! * [`ans`]: the stack coder (exact big-integer and streaming rANS backends).
//! * [`perm`]: permutations, cycles, Foata's bijection and canonical order.
//! * [`roc`]: random order coding of a set, the bits-back subroutine.
//! * [`rcc`]: random cycle coding of a clustering.
//! * [`baselines`]: ROC-1 and ROC-2 clustering codecs.
//! * [`analysis`]: closed-form savings, synthetic workloads and benchmarks.
//! * [`container`] and [`format`]: compressed container and clustering files.

pub mod analysis;
pub mod ans;
pub mod baselines;
pub mod clustering;
pub mod container;
pub mod element;
pub mod error;
pub mod format;
pub mod perm;
pub mod pool;
pub mod rcc;
pub mod roc;

pub use ans::{AnsStack, Backend, ByteCodec, Coder};
pub use clustering::Clustering;
pub use container::CodecId;
pub use element::Element;
pub use error::{Error, Result};
