//! Clustering files.
//!
//! Text: one cluster per line, elements as fixed-width hex separated by
//! spaces. Blank lines are ignored.
//!
//! Binary: magic `RCCC`, u8 width, u64 LE `n`, u64 LE `k`, `k` u64 LE cluster
//! sizes, then the `n` elements back to back. Writers emit clusters in
//! canonical order.

use std::fmt::Write as _;

use crate::clustering::Clustering;
use crate::element::Element;
use crate::error::{Error, Result};

pub const CLUSTERING_MAGIC: &[u8; 4] = b"RCCC";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileFormat {
    Text,
    Binary,
}

impl std::str::FromStr for FileFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" | "txt" => Ok(FileFormat::Text),
            "bin" | "binary" => Ok(FileFormat::Binary),
            other => Err(format!("unknown format {other:?} (expected text|bin)")),
        }
    }
}

/// Parses the text format. `default_width` applies to files with no
/// elements.
pub fn parse_text(text: &str, default_width: usize) -> Result<Clustering> {
    let mut width: Option<usize> = None;
    let mut clusters = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut cluster = Vec::new();
        for token in line.split_whitespace() {
            let e = Element::from_hex(token).ok_or_else(|| Error::Parse {
                line: lineno + 1,
                msg: format!("{token:?} is not an even-length hex string"),
            })?;
            match width {
                None => width = Some(e.width()),
                Some(w) if w != e.width() => {
                    return Err(Error::WidthMismatch {
                        expected: w,
                        found: e.width(),
                    })
                }
                _ => {}
            }
            cluster.push(e);
        }
        clusters.push(cluster);
    }
    Clustering::new(width.unwrap_or(default_width), clusters)
}

pub fn write_text(clustering: &Clustering) -> String {
    let mut out = String::new();
    for cluster in clustering.clusters() {
        for (i, e) in cluster.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{e}");
        }
        out.push('\n');
    }
    out
}

pub fn write_binary(clustering: &Clustering) -> Result<Vec<u8>> {
    let width = u8::try_from(clustering.width()).map_err(|_| Error::WidthMismatch {
        expected: u8::MAX as usize,
        found: clustering.width(),
    })?;
    let mut out = Vec::with_capacity(21 + 8 * clustering.k() + clustering.width() * clustering.n());
    out.extend_from_slice(CLUSTERING_MAGIC);
    out.push(width);
    out.extend_from_slice(&(clustering.n() as u64).to_le_bytes());
    out.extend_from_slice(&(clustering.k() as u64).to_le_bytes());
    for s in clustering.sizes() {
        out.extend_from_slice(&s.to_le_bytes());
    }
    for e in clustering.canonical_sequence() {
        out.extend_from_slice(e.as_bytes());
    }
    Ok(out)
}

fn read_u64(bytes: &[u8], at: usize) -> Result<u64> {
    bytes
        .get(at..at + 8)
        .map(|b| u64::from_le_bytes(b.try_into().expect("8 bytes")))
        .ok_or(Error::Parse {
            line: 0,
            msg: format!("binary clustering truncated at byte {at}"),
        })
}

pub fn parse_binary(bytes: &[u8]) -> Result<Clustering> {
    let parse_err = |msg: String| Error::Parse { line: 0, msg };
    if bytes.len() < 21 || &bytes[..4] != CLUSTERING_MAGIC {
        return Err(parse_err("missing RCCC header".into()));
    }
    let width = bytes[4] as usize;
    let n = read_u64(bytes, 5)?;
    let k = read_u64(bytes, 13)?;
    let sizes_end = k
        .checked_mul(8)
        .and_then(|s| s.checked_add(21))
        .filter(|&e| e <= bytes.len() as u64)
        .ok_or_else(|| parse_err(format!("{k} cluster sizes do not fit the file")))?
        as usize;
    let sizes: Vec<u64> = bytes[21..sizes_end]
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    let total = sizes
        .iter()
        .try_fold(0u64, |acc, &s| acc.checked_add(s))
        .ok_or_else(|| parse_err("cluster sizes overflow".into()))?;
    if total != n {
        return Err(parse_err(format!(
            "sizes sum to {total}, header says n = {n}"
        )));
    }
    let expected_len = (n as u128) * (width as u128) + sizes_end as u128;
    if expected_len != bytes.len() as u128 {
        return Err(parse_err(format!(
            "expected {expected_len} bytes for {n} elements of width {width}, found {}",
            bytes.len()
        )));
    }
    let mut elements = bytes[sizes_end..]
        .chunks_exact(width.max(1))
        .map(Element::from);
    let clusters = sizes
        .iter()
        .map(|&s| elements.by_ref().take(s as usize).collect())
        .collect();
    Clustering::new(width, clusters)
}

/// Parses either format, detected by the binary magic.
pub fn parse_any(bytes: &[u8], default_width: usize) -> Result<Clustering> {
    if bytes.starts_with(CLUSTERING_MAGIC) {
        parse_binary(bytes)
    } else {
        let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
            line: 0,
            msg: format!("not UTF-8 text: {e}"),
        })?;
        parse_text(text, default_width)
    }
}

pub fn write(clustering: &Clustering, format: FileFormat) -> Result<Vec<u8>> {
    match format {
        FileFormat::Text => Ok(write_text(clustering).into_bytes()),
        FileFormat::Binary => write_binary(clustering),
    }
}
