use std::collections::HashSet;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{SavingsReport, SizeProfile};
use crate::ans::{AnsStack, Backend, ByteCodec};
use crate::baselines::{delta_roc1, delta_roc2, roc1_size_order};
use crate::clustering::Clustering;
use crate::container::CodecId;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::perm::log_class_size;

/// Random bytes under every rate measurement, so that bits-back pops draw
/// from a stack that is already full.
pub const PREFIX_BYTES: usize = 128;

/// A synthetic clustering with sizes from `profile` and distinct pseudo-random
/// elements. The same seed always gives the same clustering.
pub fn gen_clustering(profile: &SizeProfile, width: usize, seed: u64) -> Result<Clustering> {
    if width == 0 {
        return Err(Error::ZeroWidth);
    }
    let sizes = profile.sizes()?;
    let n: u64 = sizes.iter().sum();
    // keep the universe at least 4n so rejection sampling stays cheap
    let roomy = width >= 8 || (n as u128) * 4 <= 1u128 << (8 * width);
    if !roomy {
        return Err(Error::WidthTooSmall { width, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(n as usize);
    let mut elements = Vec::with_capacity(n as usize);
    while elements.len() < n as usize {
        let e = if width <= 8 {
            let bound = if width == 8 {
                u64::MAX
            } else {
                (1u64 << (8 * width)) - 1
            };
            Element::from_u64(rng.gen_range(0..=bound), width)
        } else {
            let mut bytes = vec![0u8; width];
            rng.fill(&mut bytes[..]);
            Element::from(bytes)
        };
        if seen.insert(e.clone()) {
            elements.push(e);
        }
    }
    let mut it = elements.into_iter();
    let clusters = sizes
        .iter()
        .map(|&s| it.by_ref().take(s as usize).collect())
        .collect();
    Clustering::new(width, clusters)
}

/// One codec run on one clustering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub codec: CodecId,
    pub backend: Backend,
    /// Growth of the stack, in bits, while encoding on top of a random prefix.
    pub cost_bits: f64,
    /// Plain-sequence cost minus `cost_bits`.
    pub measured_savings_bits: f64,
    /// What the closed form predicts for `measured_savings_bits`.
    pub formula_savings_bits: f64,
}

fn formula_savings(codec: CodecId, clustering: &Clustering) -> f64 {
    match codec {
        CodecId::Rcc => log_class_size(&clustering.sizes()),
        CodecId::Roc1 => delta_roc1(&roc1_size_order(clustering)),
        CodecId::Roc2 => delta_roc2(&roc1_size_order(clustering)),
        CodecId::Sequence => 0.0,
    }
}

/// Encodes on top of `initial`, decodes, and checks that both the clustering
/// and the stack come back unchanged. Returns the cost in bits.
fn encode_cost(clustering: &Clustering, codec: CodecId, initial: &AnsStack) -> Result<f64> {
    let bytes = ByteCodec::new(clustering.width())?;
    let mut stack = initial.clone();
    codec.encode(clustering, &mut stack, bytes)?;
    let cost = stack.bits() - initial.bits();
    let decoded = codec.decode(&mut stack, clustering.n(), bytes)?;
    if decoded != *clustering {
        return Err(Error::RoundtripMismatch(format!(
            "{codec} decoded a different clustering"
        )));
    }
    if stack != *initial {
        return Err(Error::RoundtripMismatch(format!(
            "{codec} did not restore the initial stack"
        )));
    }
    Ok(cost)
}

/// Measures every codec in `codecs` on one clustering. All codecs start from
/// the same random stack.
pub fn measure(
    clustering: &Clustering,
    codecs: &[CodecId],
    backend: Backend,
    seed: u64,
) -> Result<Vec<Measurement>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut initial = AnsStack::new(backend);
    initial.push_random_bytes(PREFIX_BYTES, &mut rng);
    let seq = encode_cost(clustering, CodecId::Sequence, &initial)?;
    codecs
        .iter()
        .map(|&codec| {
            let cost = if codec == CodecId::Sequence {
                seq
            } else {
                encode_cost(clustering, codec, &initial)?
            };
            Ok(Measurement {
                codec,
                backend,
                cost_bits: cost,
                measured_savings_bits: seq - cost,
                formula_savings_bits: formula_savings(codec, clustering),
            })
        })
        .collect()
}

/// Generates `trials` clusterings from `profile` (seeds `seed`, `seed + 1`,
/// ...), runs each codec, and reports formula and measured savings. Any
/// roundtrip failure aborts with [`Error::RoundtripMismatch`].
pub fn run_rate_benchmark(
    profile: &SizeProfile,
    codecs: &[CodecId],
    backend: Backend,
    width: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<SavingsReport>> {
    (0..trials as u64)
        .map(|t| {
            let clustering = gen_clustering(profile, width, seed.wrapping_add(t))?;
            let mut report =
                SavingsReport::from_sizes(profile.to_string(), &roc1_size_order(&clustering))?;
            report.measured = measure(&clustering, codecs, backend, seed.wrapping_add(t))?;
            Ok(report)
        })
        .collect()
}

/// Median encode+decode wall time for one grid cell and codec.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub n: u64,
    pub k: u64,
    pub codec: CodecId,
    pub backend: Backend,
    pub repeats: usize,
    pub median_seconds: f64,
    /// Serialized stack size when encoding from an empty stack.
    pub stack_bits: u64,
}

/// One encode+decode from an empty stack. Returns seconds and the stack size
/// between the two.
fn time_once(clustering: &Clustering, codec: CodecId, backend: Backend) -> Result<(f64, u64)> {
    let bytes = ByteCodec::new(clustering.width())?;
    let start = Instant::now();
    let mut stack = AnsStack::new(backend);
    codec.encode(clustering, &mut stack, bytes)?;
    let stack_bits = stack.ceil_bits();
    let decoded = codec.decode(&mut stack, clustering.n(), bytes)?;
    let seconds = start.elapsed().as_secs_f64();
    if decoded != *clustering || !stack.is_empty() {
        return Err(Error::RoundtripMismatch(format!(
            "{codec} failed to roundtrip"
        )));
    }
    Ok((seconds, stack_bits))
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// Median times for each codec on one clustering. Codecs take turns within
/// every repeat so that drift affects all of them alike.
pub fn time_codecs(
    clustering: &Clustering,
    codecs: &[CodecId],
    backend: Backend,
    repeats: usize,
) -> Result<Vec<(f64, u64)>> {
    let repeats = repeats.max(1);
    let mut times = vec![Vec::with_capacity(repeats); codecs.len()];
    let mut bits = vec![0; codecs.len()];
    for _ in 0..repeats {
        for (i, &codec) in codecs.iter().enumerate() {
            let (t, b) = time_once(clustering, codec, backend)?;
            times[i].push(t);
            bits[i] = b;
        }
    }
    Ok(times.into_iter().map(median).zip(bits).collect())
}

/// Times every codec on an Equal-profile clustering for each `(n, k)` in
/// `grid`. Cells run on up to `jobs` threads; the work inside a cell is
/// sequential. Rows come back in grid order, codecs in the given order.
pub fn run_time_benchmark(
    grid: &[(u64, u64)],
    codecs: &[CodecId],
    backend: Backend,
    width: usize,
    repeats: usize,
    seed: u64,
    jobs: usize,
) -> Result<Vec<TimingRow>> {
    let cell = |&(n, k): &(u64, u64)| -> Result<Vec<TimingRow>> {
        let clustering = gen_clustering(&SizeProfile::Equal { n, k }, width, seed)?;
        let medians = time_codecs(&clustering, codecs, backend, repeats)?;
        Ok(codecs
            .iter()
            .zip(medians)
            .map(|(&codec, (median_seconds, stack_bits))| TimingRow {
                n,
                k,
                codec,
                backend,
                repeats: repeats.max(1),
                median_seconds,
                stack_bits,
            })
            .collect())
    };
    let rows: Vec<Result<Vec<TimingRow>>> = if jobs <= 1 {
        grid.iter().map(cell).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Io(e.to_string()))?;
        pool.install(|| grid.par_iter().map(cell).collect())
    };
    rows.into_iter().try_fold(Vec::new(), |mut all, r| {
        all.extend(r?);
        Ok(all)
    })
}

/// Flat per-codec row of a rate benchmark, for CSV output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub profile: String,
    pub n: u64,
    pub k: u64,
    pub codec: CodecId,
    pub backend: Backend,
    pub log_class_size_bits: f64,
    pub formula_savings_bits: f64,
    pub measured_savings_bits: f64,
    pub cost_bits: f64,
}

impl RateRow {
    pub fn from_reports(reports: &[SavingsReport]) -> Vec<RateRow> {
        reports
            .iter()
            .flat_map(|r| {
                r.measured.iter().map(move |m| RateRow {
                    profile: r.profile.clone(),
                    n: r.n,
                    k: r.k,
                    codec: m.codec,
                    backend: m.backend,
                    log_class_size_bits: r.log_class_size_bits,
                    formula_savings_bits: m.formula_savings_bits,
                    measured_savings_bits: m.measured_savings_bits,
                    cost_bits: m.cost_bits,
                })
            })
            .collect()
    }
}

/// Writes rows as CSV with a header taken from the field names.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic_and_exact() {
        let p = SizeProfile::Equal { n: 1000, k: 7 };
        let a = gen_clustering(&p, 2, 11).unwrap();
        let b = gen_clustering(&p, 2, 11).unwrap();
        let c = gen_clustering(&p, 2, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let mut sizes = a.sizes();
        sizes.sort_unstable();
        let mut want = p.sizes().unwrap();
        want.sort_unstable();
        assert_eq!(sizes, want);
        let singles = gen_clustering(&SizeProfile::Equal { n: 50, k: 50 }, 1, 0).unwrap();
        assert!(singles.sizes().iter().all(|&s| s == 1));
        let wide = gen_clustering(&SizeProfile::OneBig { n: 20, k: 3 }, 12, 5).unwrap();
        assert_eq!(wide.width(), 12);
    }

    #[test]
    fn generation_needs_headroom() {
        let p = SizeProfile::Equal { n: 65, k: 5 };
        assert!(matches!(
            gen_clustering(&p, 1, 0),
            Err(Error::WidthTooSmall { .. })
        ));
        assert!(gen_clustering(&SizeProfile::Equal { n: 64, k: 5 }, 1, 0).is_ok());
        assert!(matches!(gen_clustering(&p, 0, 0), Err(Error::ZeroWidth)));
    }

    #[test]
    fn rate_benchmark_tracks_formulas() {
        let p = SizeProfile::Equal { n: 2000, k: 40 };
        let reports = run_rate_benchmark(&p, &CodecId::ALL, Backend::Exact, 4, 2, 3).unwrap();
        assert_eq!(reports.len(), 2);
        for r in &reports {
            for m in &r.measured {
                let tol = if m.codec == CodecId::Roc2 { 3.0 } else { 2.0 };
                assert!(
                    (m.measured_savings_bits - m.formula_savings_bits).abs() <= tol,
                    "{m:?}"
                );
            }
            let saved = |c| {
                r.measured
                    .iter()
                    .find(|m| m.codec == c)
                    .unwrap()
                    .measured_savings_bits
            };
            assert!(saved(CodecId::Roc1) < saved(CodecId::Roc2));
            assert!(saved(CodecId::Roc2) < saved(CodecId::Rcc));
        }
        let rows = RateRow::from_reports(&reports);
        assert_eq!(rows.len(), 8);
        let mut csv = Vec::new();
        write_csv(&rows, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("profile,n,k,codec,backend,"));
        assert_eq!(text.lines().count(), 9);
    }

    #[test]
    fn singletons_save_nothing() {
        let p = SizeProfile::Equal { n: 300, k: 300 };
        for backend in [Backend::Exact, Backend::Streaming] {
            let r = &run_rate_benchmark(&p, &[CodecId::Rcc], backend, 2, 1, 9).unwrap()[0];
            assert!(r.measured[0].measured_savings_bits.abs() <= 1.0);
        }
    }

    #[test]
    fn time_benchmark_rows() {
        let grid = [(200, 10), (400, 20)];
        let codecs = [CodecId::Rcc, CodecId::Roc2];
        let rows = run_time_benchmark(&grid, &codecs, Backend::Streaming, 4, 3, 1, 2).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[0].n, rows[0].codec), (200, CodecId::Rcc));
        assert_eq!((rows[3].n, rows[3].codec), (400, CodecId::Roc2));
        assert!(rows
            .iter()
            .all(|r| r.median_seconds > 0.0 && r.stack_bits > 0));
    }
}
