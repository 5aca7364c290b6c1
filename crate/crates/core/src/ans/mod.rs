//! Stack-like ANS entropy coder.
//!
//! Two interchangeable backends share the [`Coder`] interface:
//!
//! * [`ExactStack`] keeps the state as one arbitrary-precision integer. Uniform
//!   pushes are `s -> s * m + i`, pops are the inverse divmod. This backend is
//!   the reference: its rates match the information content of each symbol
//!   to within rounding of the final integer.
//! * [`StreamingStack`] is a 64-bit-head rANS coder spilling 32-bit words.
//!
//! Both start from an empty state. Popping from an empty or shallow stack is
//! well defined (the exact backend yields index 0), so bits-back sampling
//! never needs a seeded prefix.

mod exact;
mod streaming;

pub use exact::ExactStack;
pub use streaming::{StreamingStack, MAX_PRECISION as STREAMING_MAX_PRECISION};

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::element::Element;
use crate::error::{Error, Result};

/// Magic bytes of a serialized stack.
pub const STACK_MAGIC: &[u8; 4] = b"RCCS";

/// Uniform byte-string codec for elements of a fixed width.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ByteCodec {
    width: usize,
}

impl ByteCodec {
    pub fn new(width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::ZeroWidth);
        }
        Ok(ByteCodec { width })
    }

    pub fn width(self) -> usize {
        self.width
    }

    /// Cost of one element in bits.
    pub fn bits_per_element(self) -> f64 {
        8.0 * self.width as f64
    }

    pub(crate) fn check(self, element: &Element) -> Result<()> {
        if element.width() != self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                found: element.width(),
            });
        }
        Ok(())
    }
}

pub(crate) fn check_uniform(index: u64, precision: u64) -> Result<()> {
    if precision == 0 {
        return Err(Error::ZeroPrecision);
    }
    if index >= precision {
        return Err(Error::IndexOutOfRange { index, precision });
    }
    Ok(())
}

/// The operations every codec in this crate is written against.
pub trait Coder {
    /// Encodes `index` uniformly over `0..precision`.
    fn push_uniform(&mut self, index: u64, precision: u64) -> Result<()>;

    /// Decodes (or, on a stack that did not receive a matching push, samples)
    /// an index in `0..precision`.
    fn pop_uniform(&mut self, precision: u64) -> Result<u64>;

    fn push_bytes(&mut self, element: &Element, codec: ByteCodec) -> Result<()>;

    fn pop_bytes(&mut self, codec: ByteCodec) -> Result<Element>;
}

impl<C: Coder + ?Sized> Coder for &mut C {
    fn push_uniform(&mut self, index: u64, precision: u64) -> Result<()> {
        (**self).push_uniform(index, precision)
    }
    fn pop_uniform(&mut self, precision: u64) -> Result<u64> {
        (**self).pop_uniform(precision)
    }
    fn push_bytes(&mut self, element: &Element, codec: ByteCodec) -> Result<()> {
        (**self).push_bytes(element, codec)
    }
    fn pop_bytes(&mut self, codec: ByteCodec) -> Result<Element> {
        (**self).pop_bytes(codec)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    #[serde(rename = "stream", alias = "streaming")]
    Streaming,
}

impl Backend {
    pub fn id(self) -> u8 {
        match self {
            Backend::Exact => 0,
            Backend::Streaming => 1,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(Backend::Exact),
            1 => Some(Backend::Streaming),
            _ => None,
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Streaming => "stream",
        })
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Backend::Exact),
            "stream" | "streaming" => Ok(Backend::Streaming),
            other => Err(format!("unknown backend {other:?} (expected exact|stream)")),
        }
    }
}

/// An ANS stack on either backend.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AnsStack {
    Exact(ExactStack),
    Streaming(StreamingStack),
}

macro_rules! dispatch {
    ($self:expr, $s:ident => $body:expr) => {
        match $self {
            AnsStack::Exact($s) => $body,
            AnsStack::Streaming($s) => $body,
        }
    };
}

impl AnsStack {
    pub fn new(backend: Backend) -> Self {
        match backend {
            Backend::Exact => AnsStack::Exact(ExactStack::new()),
            Backend::Streaming => AnsStack::Streaming(StreamingStack::new()),
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            AnsStack::Exact(_) => Backend::Exact,
            AnsStack::Streaming(_) => Backend::Streaming,
        }
    }

    pub fn is_empty(&self) -> bool {
        dispatch!(self, s => s.is_empty())
    }

    /// Fractional size in bits: `log2(state + 1)` on the exact backend,
    /// `log2(head + 1) + 32 * |spill|` on the streaming one.
    pub fn bits(&self) -> f64 {
        dispatch!(self, s => s.bits())
    }

    /// Integer size in bits: significant bits of the state (exact) or the
    /// serialized payload size (streaming).
    pub fn ceil_bits(&self) -> u64 {
        dispatch!(self, s => s.ceil_bits())
    }

    /// Pushes `n_bytes` uniformly random bytes, giving later bits-back pops
    /// something to draw from.
    pub fn push_random_bytes<R: Rng + ?Sized>(&mut self, n_bytes: usize, rng: &mut R) {
        let codec = ByteCodec { width: 1 };
        for _ in 0..n_bytes {
            let b: u8 = rng.gen();
            // width always matches
            let _ = self.push_bytes(&Element::from(vec![b]), codec);
        }
    }

    /// Serializes to the `RCCS` container: magic, backend id, u64 LE payload
    /// length, payload. The exact payload is the minimal big-endian magnitude;
    /// the streaming payload is the head (8 bytes LE) then spill words
    /// (4 bytes LE each, bottom of the stack first). Empty stacks have an
    /// empty payload.
    pub fn serialize(&self) -> Vec<u8> {
        let payload = match self {
            AnsStack::Exact(s) if s.is_empty() => Vec::new(),
            AnsStack::Exact(s) => s.state().to_bytes_be(),
            AnsStack::Streaming(s) if s.is_empty() => Vec::new(),
            AnsStack::Streaming(s) => {
                let mut out = Vec::with_capacity(8 + 4 * s.spill().len());
                out.extend_from_slice(&s.head().to_le_bytes());
                for w in s.spill() {
                    out.extend_from_slice(&w.to_le_bytes());
                }
                out
            }
        };
        let mut out = Vec::with_capacity(13 + payload.len());
        out.extend_from_slice(STACK_MAGIC);
        out.push(self.backend().id());
        out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
        out.extend_from_slice(&payload);
        out
    }

    /// Parses one `RCCS` container from the front of `bytes`, returning the
    /// stack and the number of bytes consumed.
    pub fn deserialize_prefix(bytes: &[u8]) -> Result<(Self, usize)> {
        if bytes.len() < 13 || &bytes[..4] != STACK_MAGIC {
            return Err(Error::Corrupt("missing RCCS stack header".into()));
        }
        let backend = Backend::from_id(bytes[4])
            .ok_or_else(|| Error::Corrupt(format!("unknown backend id {}", bytes[4])))?;
        let len = u64::from_le_bytes(bytes[5..13].try_into().expect("8 bytes"));
        let end = usize::try_from(len)
            .ok()
            .and_then(|l| l.checked_add(13))
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| Error::Corrupt("stack payload truncated".into()))?;
        let payload = &bytes[13..end];
        let stack = match backend {
            Backend::Exact => {
                if payload.first() == Some(&0) {
                    return Err(Error::Corrupt("non-minimal exact payload".into()));
                }
                AnsStack::Exact(ExactStack::from_state(BigUint::from_bytes_be(payload)))
            }
            Backend::Streaming if payload.is_empty() => AnsStack::Streaming(StreamingStack::new()),
            Backend::Streaming => {
                if payload.len() < 8 || !(payload.len() - 8).is_multiple_of(4) {
                    return Err(Error::Corrupt(format!(
                        "streaming payload of {} bytes",
                        payload.len()
                    )));
                }
                let head = u64::from_le_bytes(payload[..8].try_into().expect("8 bytes"));
                let spill = payload[8..]
                    .chunks_exact(4)
                    .map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes")))
                    .collect();
                let s = StreamingStack::from_parts(head, spill)?;
                if s.is_empty() {
                    return Err(Error::Corrupt("empty stack with non-empty payload".into()));
                }
                AnsStack::Streaming(s)
            }
        };
        Ok((stack, end))
    }

    /// Parses a complete `RCCS` container; trailing bytes are an error.
    pub fn deserialize(bytes: &[u8]) -> Result<Self> {
        let (stack, used) = Self::deserialize_prefix(bytes)?;
        if used != bytes.len() {
            return Err(Error::Corrupt(format!(
                "{} trailing bytes after stack",
                bytes.len() - used
            )));
        }
        Ok(stack)
    }
}

impl Coder for AnsStack {
    fn push_uniform(&mut self, index: u64, precision: u64) -> Result<()> {
        dispatch!(self, s => s.push_uniform(index, precision))
    }
    fn pop_uniform(&mut self, precision: u64) -> Result<u64> {
        dispatch!(self, s => s.pop_uniform(precision))
    }
    fn push_bytes(&mut self, element: &Element, codec: ByteCodec) -> Result<()> {
        dispatch!(self, s => s.push_bytes(element, codec))
    }
    fn pop_bytes(&mut self, codec: ByteCodec) -> Result<Element> {
        dispatch!(self, s => s.pop_bytes(codec))
    }
}

/// Per-operation call counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub push_uniform: u64,
    pub pop_uniform: u64,
    /// Pops with precision greater than one (the ones that move bits).
    pub pop_uniform_nontrivial: u64,
    pub push_bytes: u64,
    pub pop_bytes: u64,
}

/// Wraps a coder and counts the calls made through it.
#[derive(Clone, Debug)]
pub struct Counted<C> {
    pub inner: C,
    pub counts: OpCounts,
}

impl<C> Counted<C> {
    pub fn new(inner: C) -> Self {
        Counted {
            inner,
            counts: OpCounts::default(),
        }
    }
}

impl<C: Coder> Coder for Counted<C> {
    fn push_uniform(&mut self, index: u64, precision: u64) -> Result<()> {
        self.counts.push_uniform += 1;
        self.inner.push_uniform(index, precision)
    }
    fn pop_uniform(&mut self, precision: u64) -> Result<u64> {
        self.counts.pop_uniform += 1;
        if precision > 1 {
            self.counts.pop_uniform_nontrivial += 1;
        }
        self.inner.pop_uniform(precision)
    }
    fn push_bytes(&mut self, element: &Element, codec: ByteCodec) -> Result<()> {
        self.counts.push_bytes += 1;
        self.inner.push_bytes(element, codec)
    }
    fn pop_bytes(&mut self, codec: ByteCodec) -> Result<Element> {
        self.counts.pop_bytes += 1;
        self.inner.pop_bytes(codec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_stacks_serialize_header_only() {
        for backend in [Backend::Exact, Backend::Streaming] {
            let bytes = AnsStack::new(backend).serialize();
            assert_eq!(bytes.len(), 13);
            assert_eq!(&bytes[..4], b"RCCS");
            assert_eq!(bytes[4], backend.id());
            assert_eq!(&bytes[5..], &[0u8; 8]);
            assert_eq!(
                AnsStack::deserialize(&bytes).unwrap(),
                AnsStack::new(backend)
            );
        }
    }

    #[test]
    fn exact_payload_is_minimal_big_endian() {
        let mut s = AnsStack::Exact(ExactStack::from_state(BigUint::from(0x01_0203u32)));
        let bytes = s.serialize();
        assert_eq!(&bytes[5..13], &3u64.to_le_bytes());
        assert_eq!(&bytes[13..], &[1, 2, 3]);
        s.push_uniform(0, 1).unwrap();
        assert_eq!(s.serialize(), bytes);
    }

    #[test]
    fn malformed_containers_are_rejected() {
        let good = AnsStack::Exact(ExactStack::from_state(BigUint::from(77u8))).serialize();
        assert!(AnsStack::deserialize(&good[..12]).is_err());
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(AnsStack::deserialize(&bad).is_err());
        let mut bad = good.clone();
        bad[4] = 9;
        assert!(AnsStack::deserialize(&bad).is_err());
        let mut bad = good.clone();
        bad.push(0);
        assert!(AnsStack::deserialize(&bad).is_err());
        // non-minimal magnitude
        let mut bad = good[..5].to_vec();
        bad.extend_from_slice(&2u64.to_le_bytes());
        bad.extend_from_slice(&[0, 77]);
        assert!(AnsStack::deserialize(&bad).is_err());
        // streaming payload not head + whole words
        let mut bad = b"RCCS\x01".to_vec();
        bad.extend_from_slice(&10u64.to_le_bytes());
        bad.extend_from_slice(&[1; 10]);
        assert!(AnsStack::deserialize(&bad).is_err());
    }

    #[test]
    fn counted_tallies_calls() {
        let mut c = Counted::new(AnsStack::new(Backend::Exact));
        c.push_uniform(1, 3).unwrap();
        c.pop_uniform(1).unwrap();
        c.pop_uniform(3).unwrap();
        let codec = ByteCodec::new(1).unwrap();
        c.push_bytes(&Element::from(vec![9]), codec).unwrap();
        c.pop_bytes(codec).unwrap();
        assert_eq!(
            c.counts,
            OpCounts {
                push_uniform: 1,
                pop_uniform: 2,
                pop_uniform_nontrivial: 1,
                push_bytes: 1,
                pop_bytes: 1
            }
        );
    }

    #[test]
    fn random_prefix_grows_by_eight_bits_per_byte() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut s = AnsStack::new(Backend::Exact);
        s.push_random_bytes(32, &mut rng);
        assert!(s.ceil_bits() <= 256 && s.ceil_bits() > 240);
    }

    #[test]
    fn backend_names() {
        assert_eq!("exact".parse::<Backend>().unwrap(), Backend::Exact);
        assert_eq!("stream".parse::<Backend>().unwrap(), Backend::Streaming);
        assert!("fast".parse::<Backend>().is_err());
        assert_eq!(Backend::from_id(1), Some(Backend::Streaming));
        assert_eq!(Backend::from_id(2), None);
    }
}
