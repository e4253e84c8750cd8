//! Segmented sieve of Eratosthenes and windowed prime storage with
//! natural-log weights.
//!
//! Windows are half-open intervals (x-h, x]; the three windows of the
//! ternary problem are (N-2y, N-y], (y, 2y] and (0, U]. Prime powers are
//! never weighted: the sums here use log p over primes only.

use crate::error::{Error, Result};
use std::io::{Read, Write};
use std::path::Path;

/// Default ceiling on any sieved value; ranges beyond it are refused
/// rather than silently attempted.
pub const DEFAULT_SIEVE_CAP: u64 = 1 << 34;

/// Default segment length for the segmented sieve.
pub const DEFAULT_SEGMENT_LEN: usize = 1 << 20;

/// Primes p with p <= limit, by a plain sieve. Used for base primes and
/// small bulk work.
pub fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Primes in the half-open range (lo, hi], segment by segment.
pub fn sieve_range(lo: u64, hi: u64) -> Result<Vec<u64>> {
    sieve_range_with(lo, hi, DEFAULT_SIEVE_CAP, DEFAULT_SEGMENT_LEN)
}

pub fn sieve_range_with(lo: u64, hi: u64, cap: u64, segment_len: usize) -> Result<Vec<u64>> {
    if hi > cap {
        return Err(Error::SieveLimit { lo, hi, cap });
    }
    if hi <= lo || hi < 2 {
        return Ok(Vec::new());
    }
    let segment_len = segment_len.max(64) as u64;
    let sqrt = (hi as f64).sqrt() as u64 + 1;
    let base = simple_sieve(sqrt);
    let mut primes = Vec::new();
    let start = (lo + 1).max(2);
    let mut seg_lo = start;
    let mut mark = vec![false; segment_len as usize];
    while seg_lo <= hi {
        let seg_hi = (seg_lo + segment_len - 1).min(hi);
        let len = (seg_hi - seg_lo + 1) as usize;
        mark[..len].fill(false);
        for &p in &base {
            if p * p > seg_hi {
                break;
            }
            // First multiple of p in [seg_lo, seg_hi] that is >= p^2.
            let mut m = seg_lo.div_ceil(p) * p;
            if m < p * p {
                m = p * p;
            }
            while m <= seg_hi {
                mark[(m - seg_lo) as usize] = true;
                m += p;
            }
        }
        for i in 0..len {
            if !mark[i] {
                primes.push(seg_lo + i as u64);
            }
        }
        seg_lo = seg_hi + 1;
    }
    Ok(primes)
}

/// Which of the three generating-function windows a set of parameters
/// selects: the main window (N-2y, N-y], the dyadic window (y, 2y], or
/// the restricted-prime window (0, U].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowRole {
    Main,
    Dyadic,
    Restricted,
}

enum Offsets {
    /// Offsets from x-h stored in 32 bits; valid whenever h < 2^32.
    Narrow(Vec<u32>),
    Wide(Vec<u64>),
}

/// The primes of a window (x-h, x], stored as offsets from the window
/// base x-h, together with their natural-log weights.
pub struct PrimeWindow {
    x: u64,
    h: u64,
    offsets: Offsets,
    weights: Vec<f64>,
}

impl PrimeWindow {
    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    /// Window base x - h; primes are base + offset.
    pub fn base(&self) -> u64 {
        self.x - self.h
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn prime(&self, i: usize) -> u64 {
        let base = self.base();
        match &self.offsets {
            Offsets::Narrow(v) => base + v[i] as u64,
            Offsets::Wide(v) => base + v[i],
        }
    }

    /// ln p for the i-th prime, fixed at construction.
    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len()).map(move |i| self.prime(i))
    }

    /// Sum of weights, compensated; equals S(x, h, 0).
    pub fn weight_sum(&self) -> f64 {
        let mut k = crate::util::Kahan::new();
        for &w in &self.weights {
            k.add(w);
        }
        k.value()
    }
}

/// Sieve the window (x-h, x]. Requires h <= x.
pub fn make_window(x: u64, h: u64) -> Result<PrimeWindow> {
    make_window_with_cap(x, h, DEFAULT_SIEVE_CAP)
}

pub fn make_window_with_cap(x: u64, h: u64, cap: u64) -> Result<PrimeWindow> {
    if h > x {
        return Err(Error::InvalidParams(format!(
            "window (x-h, x] needs h <= x, got x={x}, h={h}"
        )));
    }
    let primes = sieve_range_with(x - h, x, cap, DEFAULT_SEGMENT_LEN)?;
    let base = x - h;
    let weights: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
    let offsets = if h < u32::MAX as u64 {
        Offsets::Narrow(primes.iter().map(|&p| (p - base) as u32).collect())
    } else {
        Offsets::Wide(primes.iter().map(|&p| p - base).collect())
    };
    Ok(PrimeWindow {
        x,
        h,
        offsets,
        weights,
    })
}

/// The window for one factor of the ternary representation, given the
/// problem parameters. Rejects out-of-order parameters (U > y or y > N/2).
pub fn window_for(role: WindowRole, n: u64, y: u64, u: u64) -> Result<PrimeWindow> {
    window_for_with_cap(role, n, y, u, DEFAULT_SIEVE_CAP)
}

pub fn window_for_with_cap(
    role: WindowRole,
    n: u64,
    y: u64,
    u: u64,
    cap: u64,
) -> Result<PrimeWindow> {
    if u > y || 2 * y > n || y == 0 {
        return Err(Error::WindowOrder { n, y, u });
    }
    match role {
        WindowRole::Main => make_window_with_cap(n - y, y, cap),
        WindowRole::Dyadic => make_window_with_cap(2 * y, y, cap),
        WindowRole::Restricted => make_window_with_cap(u, u, cap),
    }
}

/// Write a sieved range to a binary cache: a little-endian header
/// {lo, hi, count} of 64-bit words followed by count primes, 64-bit
/// little-endian each.
pub fn write_cache(path: &Path, lo: u64, hi: u64, primes: &[u64]) -> Result<()> {
    let mut buf = Vec::with_capacity(24 + primes.len() * 8);
    buf.extend_from_slice(&lo.to_le_bytes());
    buf.extend_from_slice(&hi.to_le_bytes());
    buf.extend_from_slice(&(primes.len() as u64).to_le_bytes());
    for &p in primes {
        buf.extend_from_slice(&p.to_le_bytes());
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(&buf)?;
    Ok(())
}

/// Read a binary cache written by `write_cache`, validating the header
/// against the payload length and the range ordering.
pub fn read_cache(path: &Path) -> Result<(u64, u64, Vec<u64>)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let fail = |reason: &str| Error::Cache {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    if bytes.len() < 24 {
        return Err(fail("truncated header"));
    }
    let word = |i: usize| u64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().unwrap());
    let (lo, hi, count) = (word(0), word(1), word(2));
    if hi < lo {
        return Err(fail("header range is reversed"));
    }
    if bytes.len() as u64 != 24 + 8 * count {
        return Err(fail("payload length disagrees with header count"));
    }
    let mut primes = Vec::with_capacity(count as usize);
    let mut prev = lo;
    for i in 0..count as usize {
        let p = word(3 + i);
        if p <= prev.max(1) || p > hi {
            return Err(fail("primes not strictly increasing within (lo, hi]"));
        }
        prev = p;
        primes.push(p);
    }
    Ok((lo, hi, primes))
}
