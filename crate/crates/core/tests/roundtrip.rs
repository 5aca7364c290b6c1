use proptest::prelude::*;
use rcc::ans::Coder;
use rcc::container::{compress, decompress};
use rcc::format::{self, FileFormat};
use rcc::{AnsStack, Backend, ByteCodec, Clustering, CodecId, Element};
use std::collections::BTreeSet;

/// Random clustering of distinct width-2 elements.
fn clustering() -> impl Strategy<Value = Clustering> {
    (
        prop::collection::btree_set(any::<u16>(), 0..60),
        prop::collection::vec(1usize..8, 60),
    )
        .prop_map(|(set, cuts)| {
            let elems: Vec<u64> = set.into_iter().map(u64::from).collect();
            let mut clusters = Vec::new();
            let mut rest = &elems[..];
            let mut cuts = cuts.into_iter();
            while !rest.is_empty() {
                let take = cuts.next().unwrap_or(1).min(rest.len());
                clusters.push(rest[..take].to_vec());
                rest = &rest[take..];
            }
            Clustering::from_u64s(2, &clusters).unwrap()
        })
}

fn backend() -> impl Strategy<Value = Backend> {
    prop_oneof![Just(Backend::Exact), Just(Backend::Streaming)]
}

fn codec() -> impl Strategy<Value = CodecId> {
    prop::sample::select(CodecId::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn container_roundtrip(c in clustering(), codec in codec(), backend in backend()) {
        let out = compress(&c, codec, backend).unwrap();
        let (header, back) = decompress(&out.bytes).unwrap();
        prop_assert_eq!(header.codec, codec);
        prop_assert_eq!(back, c);
    }

    #[test]
    fn decoding_restores_a_prefilled_stack(
        c in clustering(),
        codec in codec(),
        backend in backend(),
        prefix in prop::collection::vec(any::<u8>(), 0..40),
    ) {
        let bc = ByteCodec::new(1).unwrap();
        let mut stack = AnsStack::new(backend);
        for &b in &prefix {
            stack.push_bytes(&Element::from(vec![b]), bc).unwrap();
        }
        let before = stack.serialize();
        codec.encode(&c, &mut stack, ByteCodec::new(2).unwrap()).unwrap();
        let back = codec.decode(&mut stack, c.n(), ByteCodec::new(2).unwrap()).unwrap();
        prop_assert_eq!(back, c);
        prop_assert_eq!(stack.serialize(), before);
    }

    #[test]
    fn stack_serialization_roundtrip(c in clustering(), backend in backend()) {
        let out = compress(&c, CodecId::Rcc, backend).unwrap();
        let bytes = out.stack.serialize();
        prop_assert_eq!(AnsStack::deserialize(&bytes).unwrap().serialize(), bytes);
    }

    #[test]
    fn file_formats_agree(c in clustering()) {
        let text = format::write(&c, FileFormat::Text).unwrap();
        let bin = format::write(&c, FileFormat::Binary).unwrap();
        let from_text = format::parse_any(&text, 2).unwrap();
        let from_bin = format::parse_any(&bin, 2).unwrap();
        prop_assert_eq!(&from_text, &c);
        prop_assert_eq!(&from_bin, &c);
        prop_assert_eq!(format::write(&from_bin, FileFormat::Text).unwrap(), text);
    }

    #[test]
    fn canonical_form_ignores_input_order(c in clustering(), seed in any::<u64>()) {
        // Shuffle members and clusters deterministically, then rebuild.
        let mut clusters: Vec<Vec<Element>> = c.clusters().to_vec();
        let mut s = seed | 1;
        let mut next = |m: usize| { s ^= s << 13; s ^= s >> 7; s ^= s << 17; (s % m as u64) as usize };
        for list in &mut clusters {
            for i in (1..list.len()).rev() { let j = next(i + 1); list.swap(i, j); }
        }
        for i in (1..clusters.len()).rev() { let j = next(i + 1); clusters.swap(i, j); }
        let rebuilt = Clustering::new(2, clusters).unwrap();
        prop_assert_eq!(&rebuilt, &c);
        let a = compress(&rebuilt, CodecId::Rcc, Backend::Exact).unwrap();
        let b = compress(&c, CodecId::Rcc, Backend::Exact).unwrap();
        prop_assert_eq!(a.bytes, b.bytes);
        // each list starts at its minimum; heads decrease
        let heads: Vec<&Element> = c.clusters().iter().map(|l| &l[0]).collect();
        prop_assert!(heads.windows(2).all(|w| w[0] > w[1]));
        prop_assert!(c.clusters().iter().all(|l| l.iter().all(|e| e >= &l[0])));
        let all: BTreeSet<&Element> = c.clusters().iter().flatten().collect();
        prop_assert_eq!(all.len(), c.n());
    }
}

#[test]
fn corrupted_containers_are_rejected_not_panicking() {
    let c = Clustering::from_u64s(2, &[vec![1, 2, 3], vec![9, 10], vec![400]]).unwrap();
    for backend in [Backend::Exact, Backend::Streaming] {
        for codec in CodecId::ALL {
            let bytes = compress(&c, codec, backend).unwrap().bytes;
            for cut in 0..bytes.len() {
                assert!(decompress(&bytes[..cut]).is_err());
            }
            for i in 0..bytes.len() {
                for bit in 0..8 {
                    let mut bad = bytes.clone();
                    bad[i] ^= 1 << bit;
                    // may decode to some other clustering, but must not panic
                    let _ = decompress(&bad);
                }
            }
        }
    }
}
