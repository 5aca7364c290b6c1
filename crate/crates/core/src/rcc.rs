//! Random cycle coding.
//!
//! A clustering is transmitted as one ordering of its elements. The encoder
//! walks the Foata-canonical lists from the one with the smallest head to the
//! one with the largest; for each it ROC-encodes every member except the
//! head, then pushes the head. Because stacks are LIFO, the decoder sees each
//! list head first followed by its members, and every member is larger than
//! its head while the next head is smaller. That comparison alone recovers
//! the cluster boundaries, so neither `k` nor the sizes are sent.

use crate::ans::{ByteCodec, Coder};
use crate::clustering::Clustering;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::perm::{log2_factorial, log_class_size};
use crate::pool::SortedPool;
use crate::roc::{insert_and_restore, roc_encode_set};

pub fn rcc_encode<C: Coder + ?Sized>(
    clustering: &Clustering,
    stack: &mut C,
    codec: ByteCodec,
) -> Result<()> {
    check_width(clustering, codec)?;
    for list in clustering.clusters().iter().rev() {
        let (head, members) = list.split_first().expect("clusters are non-empty");
        roc_encode_set(members, stack, codec)?;
        stack.push_bytes(head, codec)?;
    }
    Ok(())
}

pub fn rcc_decode<C: Coder + ?Sized>(
    stack: &mut C,
    n: usize,
    codec: ByteCodec,
) -> Result<Clustering> {
    let mut clusters: Vec<Vec<Element>> = Vec::new();
    let mut members = SortedPool::new();
    for _ in 0..n {
        let element = stack.pop_bytes(codec)?;
        match clusters.last_mut() {
            Some(list) if element > list[0] => {
                insert_and_restore(&mut members, element, stack)?;
            }
            Some(list) if element == list[0] => {
                return Err(Error::Corrupt(format!("element {element} decoded twice")));
            }
            last => {
                if let Some(list) = last {
                    members.drain_into(list);
                }
                clusters.push(vec![element]);
            }
        }
    }
    if let Some(list) = clusters.last_mut() {
        members.drain_into(list);
    }
    finish_decode(codec, clusters)
}

/// Validates decoded clusters; anything that is not a clustering means the
/// stream was corrupt.
pub(crate) fn finish_decode(codec: ByteCodec, clusters: Vec<Vec<Element>>) -> Result<Clustering> {
    Clustering::new(codec.width(), clusters).map_err(|e| match e {
        Error::DuplicateElement(x) => Error::Corrupt(format!("element {x} decoded twice")),
        other => other,
    })
}

pub(crate) fn check_width(clustering: &Clustering, codec: ByteCodec) -> Result<()> {
    if clustering.width() != codec.width() {
        return Err(Error::WidthMismatch {
            expected: codec.width(),
            found: clustering.width(),
        });
    }
    Ok(())
}

/// `-log2 Q(Pi | X) = log2(n!) - sum_i log2((n_i - 1)!)`: the information
/// the cluster assignments carry under the model RCC implies.
pub fn implied_log_prob(sizes: &[u64]) -> f64 {
    let n: u64 = sizes.iter().sum();
    log2_factorial(n) - log_class_size(sizes)
}

/// Plain-sequence codec: the canonical sequence pushed with no bits-back.
/// Decodes with the same head rule as RCC and costs exactly `8wn` bits.
pub fn sequence_encode<C: Coder + ?Sized>(
    clustering: &Clustering,
    stack: &mut C,
    codec: ByteCodec,
) -> Result<()> {
    check_width(clustering, codec)?;
    let seq: Vec<&Element> = clustering.canonical_sequence().collect();
    for e in seq.into_iter().rev() {
        stack.push_bytes(e, codec)?;
    }
    Ok(())
}

pub fn sequence_decode<C: Coder + ?Sized>(
    stack: &mut C,
    n: usize,
    codec: ByteCodec,
) -> Result<Clustering> {
    let mut clusters: Vec<Vec<Element>> = Vec::new();
    for _ in 0..n {
        let element = stack.pop_bytes(codec)?;
        match clusters.last_mut() {
            Some(list) if element > list[0] => {
                if element <= *list.last().expect("non-empty") {
                    return Err(Error::Corrupt("cluster members out of order".into()));
                }
                list.push(element);
            }
            Some(list) if element == list[0] => {
                return Err(Error::Corrupt(format!("element {element} decoded twice")));
            }
            _ => clusters.push(vec![element]),
        }
    }
    finish_decode(codec, clusters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ans::{AnsStack, Backend, Counted, ExactStack};
    use num_bigint::BigUint;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn deep_exact(seed: u64) -> ExactStack {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let digits: Vec<u8> = (0..128).map(|_| rng.gen()).collect();
        ExactStack::from_state(BigUint::from_bytes_be(&digits) | (BigUint::from(1u8) << 1030u32))
    }

    fn cost<F>(initial: &ExactStack, f: F) -> f64
    where
        F: FnOnce(&mut ExactStack),
    {
        let mut s = initial.clone();
        f(&mut s);
        s.bits() - initial.bits()
    }

    #[test]
    fn all_singletons_cost_a_plain_sequence() {
        let c = Clustering::from_u64s(1, &[vec![9], vec![3], vec![200], vec![17]]).unwrap();
        let codec = ByteCodec::new(1).unwrap();
        let initial = deep_exact(1);
        let rcc = cost(&initial, |s| rcc_encode(&c, s, codec).unwrap());
        assert!((rcc - 32.0).abs() < 1e-6);
        // from an empty stack the integer is exactly the canonical sequence
        let mut s = ExactStack::new();
        rcc_encode(&c, &mut s, codec).unwrap();
        assert_eq!(s.state(), &BigUint::from(0x03_09_11_c8u32));
    }

    #[test]
    fn shared_cluster_saves_one_bit() {
        let c = Clustering::from_u64s(1, &[vec![2, 4, 6], vec![8]]).unwrap();
        let codec = ByteCodec::new(1).unwrap();
        let initial = deep_exact(2);
        let rcc = cost(&initial, |s| rcc_encode(&c, s, codec).unwrap());
        let seq = cost(&initial, |s| sequence_encode(&c, s, codec).unwrap());
        assert!((seq - 32.0).abs() < 1e-6);
        assert!((seq - rcc - 1.0).abs() < 1e-6, "savings {}", seq - rcc);
    }

    #[test]
    fn single_cluster_decodes_minimum_first() {
        let c = Clustering::from_u64s(2, &[vec![700, 5, 90, 3000, 41]]).unwrap();
        let codec = ByteCodec::new(2).unwrap();
        let mut s = deep_exact(3);
        rcc_encode(&c, &mut s, codec).unwrap();
        let mut peek = s.clone();
        assert_eq!(peek.pop_bytes(codec).unwrap(), Element::from_u64(5, 2));
        assert_eq!(rcc_decode(&mut s, 5, codec).unwrap(), c);
    }

    #[test]
    fn empty_clustering_leaves_stack_untouched() {
        let c = Clustering::empty(4).unwrap();
        let codec = ByteCodec::new(4).unwrap();
        let initial = deep_exact(4);
        let mut s = initial.clone();
        rcc_encode(&c, &mut s, codec).unwrap();
        assert_eq!(s, initial);
        assert_eq!(rcc_decode(&mut s, 0, codec).unwrap(), c);
    }

    #[test]
    fn width_mismatch_is_reported() {
        let c = Clustering::from_u64s(2, &[vec![1]]).unwrap();
        let mut s = ExactStack::new();
        assert!(matches!(
            rcc_encode(&c, &mut s, ByteCodec::new(3).unwrap()),
            Err(Error::WidthMismatch { .. })
        ));
    }

    #[test]
    fn implied_model_examples() {
        for n in 1..30u64 {
            assert!((implied_log_prob(&[n]) - (n as f64).log2()).abs() < 1e-9);
        }
        assert!((implied_log_prob(&[1; 6]) - 720f64.log2()).abs() < 1e-9);
        assert!((implied_log_prob(&[3, 2]) - 60f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn selection_pops_match_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let codec = ByteCodec::new(2).unwrap();
        let sizes = [1usize, 5, 2, 9, 1, 3];
        let mut next = 0u64;
        let clusters: Vec<Vec<u64>> = sizes
            .iter()
            .map(|&s| {
                (0..s)
                    .map(|_| {
                        next += rng.gen_range(1..50);
                        next
                    })
                    .collect()
            })
            .collect();
        let c = Clustering::from_u64s(2, &clusters).unwrap();
        let mut s = Counted::new(AnsStack::new(Backend::Streaming));
        rcc_encode(&c, &mut s, codec).unwrap();
        let members: u64 = sizes.iter().map(|&s| s as u64 - 1).sum();
        let nontrivial: u64 = sizes.iter().map(|&s| (s as u64).saturating_sub(2)).sum();
        assert_eq!(s.counts.pop_uniform, members);
        assert_eq!(s.counts.pop_uniform_nontrivial, nontrivial);
        assert_eq!(s.counts.push_bytes, 21);
    }

    #[test]
    fn sequence_codec_roundtrip() {
        let c = Clustering::from_u64s(1, &[vec![2, 4, 6], vec![8], vec![1, 7]]).unwrap();
        let codec = ByteCodec::new(1).unwrap();
        let mut s = ExactStack::new();
        sequence_encode(&c, &mut s, codec).unwrap();
        assert_eq!(s.state().to_bytes_be(), vec![7, 1, 6, 4, 2, 8]);
        assert_eq!(sequence_decode(&mut s, 6, codec).unwrap(), c);
        assert!(s.is_empty());
    }
}
