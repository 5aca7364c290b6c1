//! Closed-form savings and an empirical benchmark harness.
//!
//! Savings are in bytes per element unless a name says bits. The closed forms
//! work on cluster sizes alone; [`bench`] generates synthetic clusterings and
//! measures what the codecs actually achieve.

mod bench;

pub use bench::{
    gen_clustering, measure, run_rate_benchmark, run_time_benchmark, time_codecs, write_csv,
    Measurement, RateRow, TimingRow, PREFIX_BYTES,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{delta_roc1, delta_roc2, gap_percent};
use crate::error::{Error, Result};
use crate::perm::{log2_factorial, log_class_size};

/// How `n` elements are split into `k` clusters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SizeProfile {
    /// Sizes differ by at most one: `n_i = n / k + [i < n mod k]`.
    Equal {
        n: u64,
        k: u64,
    },
    /// One cluster of `n - k + 1` elements, the rest singletons.
    OneBig {
        n: u64,
        k: u64,
    },
    Explicit {
        sizes: Vec<u64>,
    },
}

impl SizeProfile {
    pub fn id(&self) -> &'static str {
        match self {
            SizeProfile::Equal { .. } => "equal",
            SizeProfile::OneBig { .. } => "onebig",
            SizeProfile::Explicit { .. } => "explicit",
        }
    }

    /// Parses a profile name together with `n` and `k`. `explicit` is not
    /// accepted here since it needs a size list.
    pub fn from_name(name: &str, n: u64, k: u64) -> Result<Self> {
        let p = match name {
            "equal" => SizeProfile::Equal { n, k },
            "onebig" | "one-big" => SizeProfile::OneBig { n, k },
            other => {
                return Err(Error::InvalidProfile(format!(
                    "unknown profile {other:?} (expected equal|onebig)"
                )))
            }
        };
        p.validate()?;
        Ok(p)
    }

    pub fn n(&self) -> u64 {
        match self {
            SizeProfile::Equal { n, .. } | SizeProfile::OneBig { n, .. } => *n,
            SizeProfile::Explicit { sizes } => sizes.iter().sum(),
        }
    }

    pub fn k(&self) -> u64 {
        match self {
            SizeProfile::Equal { k, .. } | SizeProfile::OneBig { k, .. } => *k,
            SizeProfile::Explicit { sizes } => sizes.len() as u64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SizeProfile::Equal { n, k } | SizeProfile::OneBig { n, k } => check_nk(*n, *k),
            SizeProfile::Explicit { sizes } => {
                if sizes.contains(&0) {
                    Err(Error::InvalidProfile(
                        "cluster sizes must be positive".into(),
                    ))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn sizes(&self) -> Result<Vec<u64>> {
        self.validate()?;
        Ok(match self {
            SizeProfile::Equal { n, k } => {
                if *k == 0 {
                    return Ok(Vec::new());
                }
                let (q, r) = (n / k, n % k);
                (0..*k).map(|i| q + u64::from(i < r)).collect()
            }
            SizeProfile::OneBig { n, k } => {
                if *k == 0 {
                    return Ok(Vec::new());
                }
                let mut sizes = vec![1; *k as usize];
                sizes[0] = n - k + 1;
                sizes
            }
            SizeProfile::Explicit { sizes } => sizes.clone(),
        })
    }
}

impl fmt::Display for SizeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizeProfile::Explicit { sizes } => {
                write!(f, "explicit(n={}, k={})", self.n(), sizes.len())
            }
            _ => write!(f, "{}(n={}, k={})", self.id(), self.n(), self.k()),
        }
    }
}

fn check_nk(n: u64, k: u64) -> Result<()> {
    if k > n || (k == 0 && n > 0) {
        return Err(Error::InvalidProfile(format!(
            "need 1 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    Ok(())
}

/// `log2|Pi|` for the Equal profile without materializing the sizes.
fn equal_log_class_size(n: u64, k: u64) -> f64 {
    let (q, r) = (n / k, n % k);
    // r clusters of q + 1 contribute log2(q!), the others log2((q - 1)!)
    r as f64 * log2_factorial(q) + (k - r) as f64 * log2_factorial(q.saturating_sub(1))
}

/// Smallest possible savings for `k` clusters over `n` elements, reached when
/// the sizes are as equal as possible.
pub fn min_savings(n: u64, k: u64) -> Result<f64> {
    check_nk(n, k)?;
    if n == 0 {
        return Ok(0.0);
    }
    Ok(equal_log_class_size(n, k) / (8.0 * n as f64))
}

/// Largest possible savings: `n - k + 1` elements in one cluster.
pub fn max_savings(n: u64, k: u64) -> Result<f64> {
    check_nk(n, k)?;
    if n == 0 {
        return Ok(0.0);
    }
    Ok(log2_factorial(n - k) / (8.0 * n as f64))
}

/// Savings with `k = round(sqrt(n))` equal clusters.
pub fn sqrt_n_profile_savings(n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let k = ((n as f64).sqrt().round() as u64).clamp(1, n);
    equal_log_class_size(n, k) / (8.0 * n as f64)
}

/// How element ids are stored next to the vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdScheme {
    /// Ids `0..n` costing `log2 n` bits each, all of which RCC removes.
    Sequential,
    /// Eight-byte external ids kept under RCC as well.
    External8,
}

impl FromStr for IdScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sequential" | "seq" => Ok(IdScheme::Sequential),
            "external8" | "external" => Ok(IdScheme::External8),
            other => Err(format!("unknown id scheme {other:?}")),
        }
    }
}

/// Percentage of the per-element storage saved by RCC with `k ~ sqrt(n)`
/// clusters, for elements of `elem_bytes` bytes.
pub fn percent_savings(n: u64, elem_bytes: f64, ids: IdScheme) -> f64 {
    let s = sqrt_n_profile_savings(n);
    match ids {
        IdScheme::Sequential => {
            let id_bytes = (n as f64).log2() / 8.0;
            (id_bytes + s) / (elem_bytes + id_bytes) * 100.0
        }
        IdScheme::External8 => s / (elem_bytes + 8.0) * 100.0,
    }
}

/// Formula values for one size vector, plus optional measurements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SavingsReport {
    pub profile: String,
    pub n: u64,
    pub k: u64,
    pub log_class_size_bits: f64,
    /// With sizes in ROC-1 transmission order.
    pub delta_roc1_bits: f64,
    pub delta_roc2_bits: f64,
    pub bytes_per_element: f64,
    pub min_bytes_per_element: f64,
    pub max_bytes_per_element: f64,
    pub gap_roc1_percent: Option<f64>,
    pub gap_roc2_percent: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub measured: Vec<Measurement>,
}

impl SavingsReport {
    /// Builds the formula fields. `sizes` must be in ROC-1 transmission order
    /// for the ROC deltas to describe what the codecs do.
    pub fn from_sizes(profile: impl Into<String>, sizes: &[u64]) -> Result<Self> {
        if sizes.contains(&0) {
            return Err(Error::InvalidProfile(
                "cluster sizes must be positive".into(),
            ));
        }
        let n: u64 = sizes.iter().sum();
        let k = sizes.len() as u64;
        let log_pi = log_class_size(sizes);
        let d1 = delta_roc1(sizes);
        let d2 = delta_roc2(sizes);
        let per_elem = |bits: f64| if n == 0 { 0.0 } else { bits / (8.0 * n as f64) };
        let gap = |d: f64| (log_pi > 0.0).then(|| gap_percent(sizes, d));
        Ok(SavingsReport {
            profile: profile.into(),
            n,
            k,
            log_class_size_bits: log_pi,
            delta_roc1_bits: d1,
            delta_roc2_bits: d2,
            bytes_per_element: per_elem(log_pi),
            min_bytes_per_element: min_savings(n, k)?,
            max_bytes_per_element: max_savings(n, k)?,
            gap_roc1_percent: gap(d1),
            gap_roc2_percent: gap(d2),
            measured: Vec::new(),
        })
    }

    pub fn from_profile(profile: &SizeProfile) -> Result<Self> {
        Self::from_sizes(profile.to_string(), &profile.sizes()?)
    }
}

impl fmt::Display for SavingsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pct = |g: Option<f64>| g.map_or("-".to_string(), |g| format!("{g:.2}%"));
        writeln!(f, "profile            {}", self.profile)?;
        writeln!(f, "n                  {}", self.n)?;
        writeln!(f, "k                  {}", self.k)?;
        writeln!(f, "log2|Pi|           {:.3} bits", self.log_class_size_bits)?;
        writeln!(f, "bytes/element      {:.4}", self.bytes_per_element)?;
        writeln!(
            f,
            "min / max          {:.4} / {:.4}",
            self.min_bytes_per_element, self.max_bytes_per_element
        )?;
        writeln!(
            f,
            "delta ROC-1        {:.3} bits (gap {})",
            self.delta_roc1_bits,
            pct(self.gap_roc1_percent)
        )?;
        write!(
            f,
            "delta ROC-2        {:.3} bits (gap {})",
            self.delta_roc2_bits,
            pct(self.gap_roc2_percent)
        )?;
        for m in &self.measured {
            write!(
                f,
                "\n{:<6} {:<6}      cost {:.3} bits, saved {:.3} (formula {:.3})",
                m.codec.to_string(),
                m.backend.to_string(),
                m.cost_bits,
                m.measured_savings_bits,
                m.formula_savings_bits
            )?;
        }
        Ok(())
    }
}
