//! Random order coding of a set of distinct elements.
//!
//! The encoder lets the stack choose the transmission order: it repeatedly
//! pops an index uniform over the remaining pool and pushes the element at
//! that index. Each pop reclaims `log2(|pool|)` bits, so a set of `n`
//! elements costs `log2(n!)` bits less than the same elements as a sequence.
//! The decoder pushes the indices back, restoring the stack it started from.

use crate::ans::{ByteCodec, Coder};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::pool::SortedPool;

/// Sorts an arbitrary collection into a set, rejecting duplicates.
pub fn sorted_set(mut elements: Vec<Element>) -> Result<Vec<Element>> {
    elements.sort_unstable();
    if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateElement(w[0].to_hex()));
    }
    Ok(elements)
}

/// Encodes a set given as a sorted slice of distinct elements.
pub fn roc_encode_set<C: Coder + ?Sized>(
    set: &[Element],
    stack: &mut C,
    codec: ByteCodec,
) -> Result<()> {
    if set.is_empty() {
        return Ok(());
    }
    // Only ranks matter to the encoder, so the pool holds positions.
    let mut pool =
        SortedPool::from_sorted((0..set.len() as u32).collect()).expect("positions are sorted");
    while !pool.is_empty() {
        let index = stack.pop_uniform(pool.len() as u64)?;
        let position = pool
            .remove_at(index as usize)
            .expect("index below pool size");
        stack.push_bytes(&set[position as usize], codec)?;
    }
    Ok(())
}

/// Decodes a set of `count` elements.
pub fn roc_decode_set<C: Coder + ?Sized>(
    stack: &mut C,
    count: usize,
    codec: ByteCodec,
) -> Result<SortedPool<Element>> {
    let mut pool = SortedPool::new();
    for _ in 0..count {
        let element = stack.pop_bytes(codec)?;
        insert_and_restore(&mut pool, element, stack)?;
    }
    Ok(pool)
}

/// Inserts a freshly decoded element and pushes its rank back, undoing the
/// encoder's selection pop.
pub(crate) fn insert_and_restore<C: Coder + ?Sized>(
    pool: &mut SortedPool<Element>,
    element: Element,
    stack: &mut C,
) -> Result<()> {
    let index = pool
        .insert(element)
        .map_err(|e| Error::Corrupt(format!("element {e} decoded twice")))?;
    stack.push_uniform(index as u64, pool.len() as u64)
}
