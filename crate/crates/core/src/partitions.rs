//! Counting the ways to split a database into `K` unordered blocks of equal
//! size, and the ancilla bits needed to label them.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Largest `N` for which the count is computed exactly by default.
pub const DEFAULT_EXACT_CAP: u64 = 10_000;

/// `P(N, K) = N!/((b!)^K·K!)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionCount {
    pub n_items: u64,
    pub n_blocks: u64,
    /// Exact value, absent in log-only mode.
    #[serde(serialize_with = "serialize_decimal")]
    pub exact: Option<BigUint>,
    pub log2_value: f64,
}

fn serialize_decimal<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&x.to_str_radix(10)),
        None => s.serialize_none(),
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut r = BigUint::one();
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// `log₂` of a positive big integer, accurate to double precision.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().unwrap_or(f64::NAN).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
    top.log2() + shift as f64
}

fn check_divides(n_items: u64, n_blocks: u64) -> Result<()> {
    if n_items == 0 || n_blocks == 0 || !n_items.is_multiple_of(n_blocks) {
        return Err(Error::Domain(format!(
            "equal partitions need K | N with both positive, got N = {n_items}, K = {n_blocks}"
        )));
    }
    Ok(())
}

/// `log₂ P(N, K)` through the log-gamma function.
pub fn log2_partition_count(n_items: u64, n_blocks: u64) -> Result<f64> {
    check_divides(n_items, n_blocks)?;
    let b = (n_items / n_blocks) as f64;
    let (n, k) = (n_items as f64, n_blocks as f64);
    let ln = ln_gamma(n + 1.0) - k * ln_gamma(b + 1.0) - ln_gamma(k + 1.0);
    Ok(ln / std::f64::consts::LN_2)
}

pub fn partition_count(n_items: u64, n_blocks: u64) -> Result<PartitionCount> {
    partition_count_with_cap(n_items, n_blocks, DEFAULT_EXACT_CAP)
}

/// Exact count when `N ≤ exact_cap`, otherwise only its logarithm.
pub fn partition_count_with_cap(n_items: u64, n_blocks: u64, exact_cap: u64) -> Result<PartitionCount> {
    check_divides(n_items, n_blocks)?;
    if n_items > exact_cap {
        return Ok(PartitionCount {
            n_items,
            n_blocks,
            exact: None,
            log2_value: log2_partition_count(n_items, n_blocks)?,
        });
    }
    let b = n_items / n_blocks;
    // Place the lowest unplaced item's block first: C(remaining − 1, b − 1) ways.
    let mut p = BigUint::one();
    for i in 0..n_blocks {
        p *= binomial((n_blocks - i) * b - 1, b - 1);
    }
    let log2_value = log2_big(&p);
    Ok(PartitionCount {
        n_items,
        n_blocks,
        exact: Some(p),
        log2_value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AncillaBits {
    /// `⌈log₂ P(N, K)⌉`.
    pub exact_bits: u64,
    /// Whether `exact_bits` came from the exact count rather than its logarithm.
    pub from_exact_count: bool,
    /// `N·log₂K − log₂K!`.
    pub asymptotic_bits: f64,
}

pub fn ancilla_bits(n_items: u64, n_blocks: u64) -> Result<AncillaBits> {
    let count = partition_count(n_items, n_blocks)?;
    let (exact_bits, from_exact_count) = match &count.exact {
        Some(p) if p.is_zero() => unreachable!("partition count is at least one"),
        Some(p) => ((p - 1u32).bits(), true),
        None => (count.log2_value.ceil() as u64, false),
    };
    let k = n_blocks as f64;
    let asymptotic_bits =
        n_items as f64 * k.log2() - ln_gamma(k + 1.0) / std::f64::consts::LN_2;
    Ok(AncillaBits {
        exact_bits,
        from_exact_count,
        asymptotic_bits,
    })
}
