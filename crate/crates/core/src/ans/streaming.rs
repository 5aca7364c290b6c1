use crate::ans::{check_uniform, ByteCodec, Coder};
use crate::element::Element;
use crate::error::{Error, Result};

/// Lower bound of the normalized head interval `[2^32, 2^64)`.
const HEAD_MIN: u64 = 1 << 32;
/// Slots per coding step. Keeping it well below `HEAD_MIN` bounds the
/// rounding loss of each step by about `2^-8` bits.
const SCALE_BITS: u32 = 24;
/// Precisions above this are split into `DIRECT` balanced buckets.
const DIRECT: u64 = 1 << 12;

/// Largest precision the streaming backend accepts for a uniform symbol.
pub const MAX_PRECISION: u64 = (1 << 32) - 1;

/// Fixed-word rANS stack: a 64-bit head and a LIFO spill of 32-bit words.
///
/// Each step codes one symbol on a scale of `2^24` slots. A uniform symbol
/// over `m <= 2^12` values owns the slots `[floor(i 2^24 / m),
/// floor((i + 1) 2^24 / m))`. Larger precisions are split into `2^12`
/// buckets of near-equal size: the bucket is coded with slots proportional
/// to its size, then the offset inside it, recursively. Push and pop are
/// exact inverses on every reachable state, including the shallow regime
/// where the spill is empty and the head sits below `2^32`: refills are
/// skipped there instead of underflowing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct StreamingStack {
    head: u64,
    spill: Vec<u32>,
}

/// `floor(j 2^24 / m)`; exact in 64 bits since `j <= m < 2^32`.
#[inline]
fn cdf(j: u64, precision: u64) -> u64 {
    (j << SCALE_BITS) / precision
}

#[inline]
fn freq_cdf(index: u64, precision: u64) -> (u64, u64) {
    let lo = cdf(index, precision);
    (cdf(index + 1, precision) - lo, lo)
}

/// The index whose slot range contains `slot`.
#[inline]
fn slot_index(slot: u64, precision: u64) -> u64 {
    ((slot + 1) * precision - 1) >> SCALE_BITS
}

/// Splits `0..precision` into `DIRECT` buckets, the first `precision mod
/// DIRECT` of them one larger.
#[derive(Clone, Copy)]
struct Buckets {
    size: u64,
    larger: u64,
}

impl Buckets {
    fn new(precision: u64) -> Self {
        Buckets {
            size: precision / DIRECT,
            larger: precision % DIRECT,
        }
    }

    fn start(self, h: u64) -> u64 {
        h * self.size + h.min(self.larger)
    }

    fn len(self, h: u64) -> u64 {
        self.size + u64::from(h < self.larger)
    }

    fn of(self, index: u64) -> u64 {
        let wide = self.larger * (self.size + 1);
        if index < wide {
            index / (self.size + 1)
        } else {
            self.larger + (index - wide) / self.size
        }
    }
}

impl StreamingStack {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds a stack from its parts. The head must be normalized whenever
    /// the spill is non-empty.
    pub fn from_parts(head: u64, spill: Vec<u32>) -> Result<Self> {
        if !spill.is_empty() && head < HEAD_MIN {
            return Err(Error::Corrupt(format!(
                "head {head:#x} below 2^32 with non-empty spill"
            )));
        }
        Ok(StreamingStack { head, spill })
    }

    pub fn head(&self) -> u64 {
        self.head
    }

    pub fn spill(&self) -> &[u32] {
        &self.spill
    }

    pub fn is_empty(&self) -> bool {
        self.head == 0 && self.spill.is_empty()
    }

    /// Serialized size in bits: 64 for the head plus 32 per spill word, or 0
    /// for an empty stack.
    pub fn ceil_bits(&self) -> u64 {
        if self.is_empty() {
            0
        } else {
            64 + 32 * self.spill.len() as u64
        }
    }

    /// `log2(head + 1) + 32 * |spill|`.
    pub fn bits(&self) -> f64 {
        (self.head as f64 + 1.0).log2() + 32.0 * self.spill.len() as f64
    }

    #[inline]
    fn encode(&mut self, freq: u64, cdf: u64) {
        let x_max = freq << (64 - SCALE_BITS);
        if self.head >= x_max {
            self.spill.push(self.head as u32);
            self.head >>= 32;
        }
        self.head = ((self.head / freq) << SCALE_BITS) + self.head % freq + cdf;
    }

    #[inline]
    fn slot(&self) -> u64 {
        self.head & ((1 << SCALE_BITS) - 1)
    }

    /// Removes the symbol owning `slot`, which must lie in `[cdf, cdf + freq)`.
    #[inline]
    fn advance(&mut self, freq: u64, cdf: u64, slot: u64) {
        self.head = freq * (self.head >> SCALE_BITS) + slot - cdf;
        if self.head < HEAD_MIN {
            if let Some(word) = self.spill.pop() {
                self.head = (self.head << 32) | word as u64;
            }
        }
    }

    #[inline]
    fn decode(&mut self, precision: u64) -> u64 {
        let slot = self.slot();
        let index = slot_index(slot, precision);
        let (freq, cdf) = freq_cdf(index, precision);
        self.advance(freq, cdf, slot);
        index
    }

    fn push_index(&mut self, index: u64, precision: u64) {
        if precision <= DIRECT {
            if precision > 1 {
                let (freq, cdf) = freq_cdf(index, precision);
                self.encode(freq, cdf);
            }
            return;
        }
        let b = Buckets::new(precision);
        let h = b.of(index);
        let start = b.start(h);
        self.push_index(index - start, b.len(h));
        let lo = cdf(start, precision);
        self.encode(cdf(start + b.len(h), precision) - lo, lo);
    }

    fn pop_index(&mut self, precision: u64) -> u64 {
        if precision <= DIRECT {
            return if precision > 1 {
                self.decode(precision)
            } else {
                0
            };
        }
        let b = Buckets::new(precision);
        let slot = self.slot();
        let h = b.of(slot_index(slot, precision));
        let start = b.start(h);
        let lo = cdf(start, precision);
        self.advance(cdf(start + b.len(h), precision) - lo, lo, slot);
        start + self.pop_index(b.len(h))
    }

    fn check_precision(precision: u64) -> Result<()> {
        if precision > MAX_PRECISION {
            return Err(Error::PrecisionTooLarge {
                precision,
                max: MAX_PRECISION,
            });
        }
        Ok(())
    }
}

impl Coder for StreamingStack {
    fn push_uniform(&mut self, index: u64, precision: u64) -> Result<()> {
        check_uniform(index, precision)?;
        Self::check_precision(precision)?;
        self.push_index(index, precision);
        Ok(())
    }

    fn pop_uniform(&mut self, precision: u64) -> Result<u64> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        Self::check_precision(precision)?;
        Ok(self.pop_index(precision))
    }

    fn push_bytes(&mut self, element: &Element, codec: ByteCodec) -> Result<()> {
        codec.check(element)?;
        for &b in element.as_bytes() {
            let (freq, cdf) = freq_cdf(b as u64, 256);
            self.encode(freq, cdf);
        }
        Ok(())
    }

    fn pop_bytes(&mut self, codec: ByteCodec) -> Result<Element> {
        let mut bytes = vec![0u8; codec.width()];
        for b in bytes.iter_mut().rev() {
            *b = self.decode(256) as u8;
        }
        Ok(Element::from(bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quantized_frequencies_cover_the_scale() {
        for m in [2u64, 3, 7, 256, 1000, DIRECT] {
            let (f, c) = freq_cdf(m - 1, m);
            assert_eq!(f + c, 1 << SCALE_BITS, "m={m}");
            for i in 0..m {
                let (f, c) = freq_cdf(i, m);
                assert!(f >= (1 << SCALE_BITS) / m);
                assert_eq!(slot_index(c, m), i);
                assert_eq!(slot_index(c + f - 1, m), i);
            }
        }
    }

    #[test]
    fn buckets_partition_the_range() {
        for m in [DIRECT + 1, 3 * DIRECT + 5, 1 << 20, MAX_PRECISION] {
            let b = Buckets::new(m);
            assert_eq!(b.start(DIRECT), m);
            for h in [0, 1, b.larger.saturating_sub(1), b.larger, DIRECT - 1] {
                let (start, len) = (b.start(h), b.len(h));
                assert!(len >= 1);
                assert_eq!(b.of(start), h);
                assert_eq!(b.of(start + len - 1), h);
                // every bucket keeps at least 2^11 slots
                assert!(cdf(start + len, m) - cdf(start, m) >= 1 << 11);
            }
        }
    }

    #[test]
    fn shallow_regime_roundtrips_without_underflow() {
        let mut s = StreamingStack::new();
        assert_eq!(s.pop_uniform(9).unwrap(), 0);
        assert!(s.is_empty());
        s.push_uniform(3, 4).unwrap();
        s.push_uniform(1, 2).unwrap();
        assert!(s.spill().is_empty());
        assert_eq!(s.pop_uniform(2).unwrap(), 1);
        assert_eq!(s.pop_uniform(4).unwrap(), 3);
        assert!(s.is_empty());
    }

    #[test]
    fn bytes_roundtrip_from_empty_stack() {
        let codec = ByteCodec::new(2).unwrap();
        let e = Element::from(vec![0xab, 0xcd]);
        let mut s = StreamingStack::new();
        s.push_bytes(&e, codec).unwrap();
        assert_eq!(s.pop_bytes(codec).unwrap(), e);
        assert!(s.is_empty());
    }

    #[test]
    fn precision_limit() {
        let mut s = StreamingStack::new();
        assert!(matches!(
            s.push_uniform(0, 1 << 32),
            Err(Error::PrecisionTooLarge { .. })
        ));
        assert!(s.push_uniform(5, MAX_PRECISION).is_ok());
    }

    #[test]
    fn head_stays_normalized_once_spilled() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut s = StreamingStack::new();
        let mut trace = Vec::new();
        for _ in 0..5000 {
            let m = rng.gen_range(1..=MAX_PRECISION);
            let i = rng.gen_range(0..m);
            s.push_uniform(i, m).unwrap();
            trace.push((i, m));
            if !s.spill().is_empty() {
                assert!(s.head() >= HEAD_MIN);
            }
        }
        for &(i, m) in trace.iter().rev() {
            assert_eq!(s.pop_uniform(m).unwrap(), i);
            if !s.spill().is_empty() {
                assert!(s.head() >= HEAD_MIN);
            }
        }
        assert!(s.is_empty());
    }

    #[test]
    fn pop_then_push_restores_arbitrary_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let spill: Vec<u32> = (0..rng.gen_range(0..4)).map(|_| rng.gen()).collect();
            let head = if spill.is_empty() {
                rng.gen()
            } else {
                rng.gen_range(HEAD_MIN..=u64::MAX)
            };
            let original = StreamingStack::from_parts(head, spill).unwrap();
            let mut s = original.clone();
            let m = rng.gen_range(1..=MAX_PRECISION);
            let i = s.pop_uniform(m).unwrap();
            assert!(i < m);
            s.push_uniform(i, m).unwrap();
            assert_eq!(s, original);
        }
    }

    #[test]
    fn split_precisions_cost_log2_m() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for m in [DIRECT + 1, 3 << 30, MAX_PRECISION, 100_003, 255, 3] {
            let mut s = StreamingStack::from_parts(u64::MAX / 3, vec![7; 4]).unwrap();
            let before = s.bits();
            let trace: Vec<u64> = (0..2000).map(|_| rng.gen_range(0..m)).collect();
            for &i in &trace {
                s.push_uniform(i, m).unwrap();
            }
            let excess = s.bits() - before - 2000.0 * (m as f64).log2();
            assert!(excess.abs() < 2.0, "m={m}: excess {excess}");
            for &i in trace.iter().rev() {
                assert_eq!(s.pop_uniform(m).unwrap(), i);
            }
            assert_eq!(s.bits(), before);
        }
    }

    #[test]
    fn rejects_unnormalized_parts() {
        assert!(StreamingStack::from_parts(5, vec![1]).is_err());
    }
}
