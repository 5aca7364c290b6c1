use std::fmt;

/// A fixed-width byte string. Elements of equal width compare
/// lexicographically, which is the total order every codec sorts by.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(Box<[u8]>);

impl Element {
    pub fn new(bytes: impl Into<Box<[u8]>>) -> Self {
        Element(bytes.into())
    }

    /// Big-endian encoding of `value` in exactly `width` bytes, truncating
    /// high-order bytes that do not fit.
    pub fn from_u64(value: u64, width: usize) -> Self {
        let be = value.to_be_bytes();
        let mut bytes = vec![0u8; width];
        let take = width.min(8);
        bytes[width - take..].copy_from_slice(&be[8 - take..]);
        Element(bytes.into_boxed_slice())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Parses lowercase or uppercase hex; the width is half the digit count.
    pub fn from_hex(s: &str) -> Option<Self> {
        if s.is_empty() || !s.len().is_multiple_of(2) {
            return None;
        }
        let bytes = (0..s.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(s.get(i..i + 2)?, 16).ok())
            .collect::<Option<Vec<u8>>>()?;
        Some(Element(bytes.into_boxed_slice()))
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", self.to_hex())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl From<&[u8]> for Element {
    fn from(b: &[u8]) -> Self {
        Element(b.into())
    }
}

impl From<Vec<u8>> for Element {
    fn from(b: Vec<u8>) -> Self {
        Element(b.into_boxed_slice())
    }
}
