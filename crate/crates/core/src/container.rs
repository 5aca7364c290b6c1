//! The `RCC1` compressed container.
//!
//! Layout: magic `RCC1`, u8 codec id, u8 element width, u64 LE element count
//! `n`, then one serialized stack (`RCCS`, see [`crate::ans`]). The stack is
//! encoded starting from the empty state, so a well-formed container decodes
//! back to an empty stack.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ans::{AnsStack, Backend, ByteCodec, Coder};
use crate::baselines::{roc1_decode, roc1_encode, roc2_decode, roc2_encode};
use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::rcc::{rcc_decode, rcc_encode, sequence_decode, sequence_encode};

pub const CONTAINER_MAGIC: &[u8; 4] = b"RCC1";
const HEADER_LEN: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodecId {
    Rcc,
    Roc1,
    Roc2,
    #[serde(rename = "seq")]
    Sequence,
}

impl CodecId {
    pub const ALL: [CodecId; 4] = [
        CodecId::Rcc,
        CodecId::Roc1,
        CodecId::Roc2,
        CodecId::Sequence,
    ];

    pub fn id(self) -> u8 {
        match self {
            CodecId::Rcc => 0,
            CodecId::Roc1 => 1,
            CodecId::Roc2 => 2,
            CodecId::Sequence => 3,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        CodecId::ALL.into_iter().find(|c| c.id() == id)
    }

    pub fn encode<C: Coder + ?Sized>(
        self,
        clustering: &Clustering,
        stack: &mut C,
        codec: ByteCodec,
    ) -> Result<()> {
        match self {
            CodecId::Rcc => rcc_encode(clustering, stack, codec),
            CodecId::Roc1 => roc1_encode(clustering, stack, codec),
            CodecId::Roc2 => roc2_encode(clustering, stack, codec),
            CodecId::Sequence => sequence_encode(clustering, stack, codec),
        }
    }

    pub fn decode<C: Coder + ?Sized>(
        self,
        stack: &mut C,
        n: usize,
        codec: ByteCodec,
    ) -> Result<Clustering> {
        match self {
            CodecId::Rcc => rcc_decode(stack, n, codec),
            CodecId::Roc1 => roc1_decode(stack, n, codec),
            CodecId::Roc2 => roc2_decode(stack, n, codec),
            CodecId::Sequence => sequence_decode(stack, n, codec),
        }
    }
}

impl fmt::Display for CodecId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodecId::Rcc => "rcc",
            CodecId::Roc1 => "roc1",
            CodecId::Roc2 => "roc2",
            CodecId::Sequence => "seq",
        })
    }
}

impl FromStr for CodecId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CodecId::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| format!("unknown codec {s:?} (expected rcc|roc1|roc2|seq)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub codec: CodecId,
    pub width: usize,
    pub n: u64,
}

/// Result of [`compress`]: the container and the stack it wraps.
#[derive(Clone, Debug)]
pub struct Compressed {
    pub bytes: Vec<u8>,
    pub stack: AnsStack,
}

pub fn compress(clustering: &Clustering, codec: CodecId, backend: Backend) -> Result<Compressed> {
    let width = clustering.width();
    let width_byte = u8::try_from(width).map_err(|_| Error::WidthMismatch {
        expected: u8::MAX as usize,
        found: width,
    })?;
    let mut stack = AnsStack::new(backend);
    codec.encode(clustering, &mut stack, ByteCodec::new(width)?)?;
    let mut bytes = Vec::with_capacity(HEADER_LEN + 13);
    bytes.extend_from_slice(CONTAINER_MAGIC);
    bytes.push(codec.id());
    bytes.push(width_byte);
    bytes.extend_from_slice(&(clustering.n() as u64).to_le_bytes());
    bytes.extend_from_slice(&stack.serialize());
    Ok(Compressed { bytes, stack })
}

pub fn read_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Corrupt(format!(
            "container of {} bytes is shorter than its header",
            bytes.len()
        )));
    }
    if &bytes[..4] != CONTAINER_MAGIC {
        return Err(Error::Corrupt("missing RCC1 magic".into()));
    }
    let codec = CodecId::from_id(bytes[4])
        .ok_or_else(|| Error::Corrupt(format!("unknown codec id {}", bytes[4])))?;
    let width = bytes[5] as usize;
    if width == 0 {
        return Err(Error::Corrupt("zero element width".into()));
    }
    let n = u64::from_le_bytes(bytes[6..14].try_into().expect("8 bytes"));
    Ok(Header { codec, width, n })
}

pub fn decompress(bytes: &[u8]) -> Result<(Header, Clustering)> {
    let header = read_header(bytes)?;
    let mut stack = AnsStack::deserialize(&bytes[HEADER_LEN..])?;
    let n =
        usize::try_from(header.n).map_err(|_| Error::Corrupt("element count overflow".into()))?;
    // n distinct elements cost at least n * log2(e) bits under any of the
    // codecs, so a count far above the payload size cannot be genuine.
    let payload_bits = 8 * (bytes.len() - HEADER_LEN) as u64;
    if header.n > payload_bits + 64 {
        return Err(Error::Truncated {
            decoded: 0,
            expected: header.n,
        });
    }
    let clustering = header
        .codec
        .decode(&mut stack, n, ByteCodec::new(header.width)?)?;
    if !stack.is_empty() {
        return Err(Error::Corrupt("stack not exhausted after decoding".into()));
    }
    Ok((header, clustering))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let c = Clustering::from_u64s(2, &[vec![1, 2], vec![7]]).unwrap();
        let out = compress(&c, CodecId::Roc2, Backend::Exact).unwrap();
        assert_eq!(&out.bytes[..4], b"RCC1");
        assert_eq!(out.bytes[4], 2);
        assert_eq!(out.bytes[5], 2);
        assert_eq!(&out.bytes[6..14], &3u64.to_le_bytes());
        assert_eq!(&out.bytes[14..18], b"RCCS");
        let (h, d) = decompress(&out.bytes).unwrap();
        assert_eq!(
            h,
            Header {
                codec: CodecId::Roc2,
                width: 2,
                n: 3
            }
        );
        assert_eq!(d, c);
    }

    #[test]
    fn empty_clustering_is_header_only() {
        let c = Clustering::empty(4).unwrap();
        for backend in [Backend::Exact, Backend::Streaming] {
            let out = compress(&c, CodecId::Rcc, backend).unwrap();
            assert_eq!(out.bytes.len(), HEADER_LEN + 13);
            assert_eq!(decompress(&out.bytes).unwrap().1, c);
        }
    }

    #[test]
    fn codec_names() {
        for c in CodecId::ALL {
            assert_eq!(c.to_string().parse::<CodecId>().unwrap(), c);
            assert_eq!(CodecId::from_id(c.id()), Some(c));
        }
        assert!("zstd".parse::<CodecId>().is_err());
    }

    #[test]
    fn corruption_is_detected() {
        let c = Clustering::from_u64s(1, &[vec![10, 20, 30], vec![5, 40]]).unwrap();
        let out = compress(&c, CodecId::Rcc, Backend::Exact).unwrap();
        assert!(decompress(&out.bytes[..10]).is_err());
        let mut bad = out.bytes.clone();
        bad[4] = 7;
        assert!(matches!(decompress(&bad), Err(Error::Corrupt(_))));
        // claiming more elements than were encoded
        let mut bad = out.bytes.clone();
        bad[6] = 9;
        assert!(decompress(&bad).is_err());
    }
}
