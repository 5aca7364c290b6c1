use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::ans::{check_uniform, ByteCodec, Coder};
use crate::element::Element;
use crate::error::{Error, Result};

/// Bytes that fit in a single u64 multiply-add.
const CHUNK: usize = 7;

/// Arbitrary-precision ANS stack. The state is a single natural number;
/// pushing `index` with `precision` maps `s` to `s * precision + index`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExactStack {
    state: BigUint,
}

impl ExactStack {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_state(state: BigUint) -> Self {
        ExactStack { state }
    }

    pub fn state(&self) -> &BigUint {
        &self.state
    }

    pub fn into_state(self) -> BigUint {
        self.state
    }

    pub fn is_empty(&self) -> bool {
        self.state.is_zero()
    }

    /// `ceil(log2(state + 1))`: the number of significant bits.
    pub fn ceil_bits(&self) -> u64 {
        self.state.bits()
    }

    /// `log2(state + 1)` as a real number.
    pub fn bits(&self) -> f64 {
        let b = self.state.bits();
        if b <= 52 {
            return (self.state.to_u64().unwrap_or(0) as f64 + 1.0).log2();
        }
        let shift = b - 64.min(b);
        let top = (&self.state >> shift).to_u64().unwrap_or(u64::MAX);
        (top as f64).log2() + shift as f64
    }

    fn mul_add(&mut self, precision: u64, index: u64) {
        self.state *= precision;
        self.state += index;
    }

    fn div_rem(&mut self, precision: u64) -> u64 {
        if self.state.is_zero() {
            return 0;
        }
        let index = (&self.state % precision).to_u64().unwrap_or(0);
        self.state /= precision;
        index
    }
}

fn chunk_value(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0u64, |acc, &b| (acc << 8) | b as u64)
}

impl Coder for ExactStack {
    fn push_uniform(&mut self, index: u64, precision: u64) -> Result<()> {
        check_uniform(index, precision)?;
        if precision > 1 {
            self.mul_add(precision, index);
        }
        Ok(())
    }

    fn pop_uniform(&mut self, precision: u64) -> Result<u64> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        if precision == 1 {
            return Ok(0);
        }
        Ok(self.div_rem(precision))
    }

    fn push_bytes(&mut self, element: &Element, codec: ByteCodec) -> Result<()> {
        codec.check(element)?;
        // Most-significant chunk first, so the element ends up as the low
        // base-256 digits of the state in big-endian order.
        for chunk in element.as_bytes().chunks(CHUNK) {
            self.mul_add(1u64 << (8 * chunk.len()), chunk_value(chunk));
        }
        Ok(())
    }

    fn pop_bytes(&mut self, codec: ByteCodec) -> Result<Element> {
        let width = codec.width();
        let mut bytes = vec![0u8; width];
        let full = width / CHUNK;
        let tail = width % CHUNK;
        let mut end = width;
        let mut take = |len: usize, stack: &mut Self| {
            let v = stack.div_rem(1u64 << (8 * len));
            let start = end - len;
            for (i, b) in bytes[start..end].iter_mut().enumerate() {
                *b = (v >> (8 * (len - 1 - i))) as u8;
            }
            end = start;
        };
        if tail > 0 {
            // chunks() put the short chunk last, so it comes off first
            take(tail, self);
        }
        for _ in 0..full {
            take(CHUNK, self);
        }
        Ok(Element::from(bytes))
    }
}
