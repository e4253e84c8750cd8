//! Exact ternary representation counts with a restricted third prime.
//!
//! A representation of N is p1 + p2 + p3 = N with p1 in (N-2y, N-y],
//! p2 in (y, 2y], and p3 <= U. The unweighted count and the
//! log-weighted mass (sum of ln p1 ln p2 ln p3) are computed exactly;
//! a trial-division brute-force path serves as the independent oracle.

use crate::error::{Error, Result};
use crate::primes::{window_for_with_cap, WindowRole, DEFAULT_SIEVE_CAP};
use crate::util::{par_chunk_map, Kahan};

/// Problem parameters. The standing assumption U <= y <= N/2 is
/// enforced at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Params {
    n: u64,
    y: u64,
    u: u64,
}

impl Params {
    pub fn new(n: u64, y: u64, u: u64) -> Result<Params> {
        if n == 0 || y == 0 || u == 0 || u > y || 2 * y > n {
            return Err(Error::WindowOrder { n, y, u });
        }
        Ok(Params { n, y, u })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    pub fn u(&self) -> u64 {
        self.u
    }
}

/// Counting result. `triples` is populated only when enumeration was
/// requested and the count stayed under the retention cap; triples are
/// sorted lexicographically as (p1, p2, p3).
#[derive(Clone, Debug)]
pub struct RepCount {
    pub params: Params,
    pub unweighted: u64,
    pub weighted: f64,
    pub triples: Option<Vec<(u64, u64, u64)>>,
}

#[derive(Clone, Copy, Debug)]
pub struct CountOptions {
    pub keep_triples: bool,
    /// Triples are dropped (count still exact) past this many.
    pub triple_cap: usize,
    pub sieve_cap: u64,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            keep_triples: false,
            triple_cap: 1_000_000,
            sieve_cap: DEFAULT_SIEVE_CAP,
        }
    }
}

/// Count representations by sieving the three windows and membership-
/// testing p1 = N - p2 - p3 against a bitset of the main window.
/// Parallel over chunks of the restricted primes, folded in fixed order.
pub fn count_reps(p: &Params) -> Result<RepCount> {
    count_reps_with(p, &CountOptions::default())
}

pub fn count_reps_with(p: &Params, opts: &CountOptions) -> Result<RepCount> {
    let main = window_for_with_cap(WindowRole::Main, p.n, p.y, p.u, opts.sieve_cap)?;
    let dyadic = window_for_with_cap(WindowRole::Dyadic, p.n, p.y, p.u, opts.sieve_cap)?;
    let restricted = window_for_with_cap(WindowRole::Restricted, p.n, p.y, p.u, opts.sieve_cap)?;

    // Bitset over offsets in (N-2y, N-y]; offset 0 is the excluded base.
    let base = main.base();
    let mut member = vec![0u64; (p.y as usize + 64) / 64 + 1];
    for q in main.primes() {
        let off = (q - base) as usize;
        member[off / 64] |= 1 << (off % 64);
    }
    let is_main_prime = |cand: u64| -> bool {
        if cand <= base || cand > main.x() {
            return false;
        }
        let off = (cand - base) as usize;
        member[off / 64] >> (off % 64) & 1 == 1
    };

    struct Partial {
        count: u64,
        mass: Kahan,
        triples: Vec<(u64, u64, u64)>,
    }

    let p2s: Vec<(u64, f64)> = (0..dyadic.len())
        .map(|i| (dyadic.prime(i), dyadic.weight(i)))
        .collect();
    let chunk = 8.max(restricted.len() / 64);
    let partials = par_chunk_map(restricted.len(), chunk, |range| {
        let mut part = Partial {
            count: 0,
            mass: Kahan::new(),
            triples: Vec::new(),
        };
        for i in range {
            let p3 = restricted.prime(i);
            let w3 = restricted.weight(i);
            for &(p2, w2) in &p2s {
                let Some(p1) = p.n.checked_sub(p2 + p3) else {
                    continue;
                };
                if is_main_prime(p1) {
                    part.count += 1;
                    part.mass.add((p1 as f64).ln() * w2 * w3);
                    if opts.keep_triples {
                        part.triples.push((p1, p2, p3));
                    }
                }
            }
        }
        part
    });

    let mut unweighted = 0u64;
    let mut mass = Kahan::new();
    let mut triples = opts.keep_triples.then(Vec::new);
    for part in partials {
        unweighted += part.count;
        mass.merge(part.mass);
        if let Some(ts) = triples.as_mut() {
            ts.extend(part.triples);
        }
    }
    if let Some(ts) = triples.as_mut() {
        if ts.len() > opts.triple_cap {
            triples = None;
        } else {
            ts.sort_unstable();
        }
    }
    Ok(RepCount {
        params: *p,
        unweighted,
        weighted: if unweighted == 0 { 0.0 } else { mass.value() },
        triples,
    })
}

/// Trial-division primality; the oracle-side primitive, deliberately
/// sharing nothing with the sieve.
pub fn trial_is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Primes in (lo, hi] by trial division.
pub fn trial_primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.saturating_add(1)..=hi)
        .filter(|&n| trial_is_prime(n))
        .collect()
}

/// Brute-force oracle: same contract as `count_reps`, but every prime
/// list comes from trial division and membership is a plain set probe.
/// Intended for N up to about 10^6.
pub fn brute_force_reps(p: &Params) -> Result<RepCount> {
    if p.n > 1_000_000 {
        return Err(Error::InvalidParams(format!(
            "brute-force oracle is for N <= 10^6, got N={}",
            p.n
        )));
    }
    let l1: std::collections::HashSet<u64> = trial_primes_in(p.n - 2 * p.y, p.n - p.y)
        .into_iter()
        .collect();
    let l2 = trial_primes_in(p.y, 2 * p.y);
    let l3 = trial_primes_in(0, p.u);
    let mut unweighted = 0u64;
    let mut mass = Kahan::new();
    let mut triples = Vec::new();
    for &p3 in &l3 {
        for &p2 in &l2 {
            let Some(p1) = p.n.checked_sub(p2 + p3) else {
                continue;
            };
            if l1.contains(&p1) {
                unweighted += 1;
                mass.add((p1 as f64).ln() * (p2 as f64).ln() * (p3 as f64).ln());
                triples.push((p1, p2, p3));
            }
        }
    }
    triples.sort_unstable();
    Ok(RepCount {
        params: *p,
        unweighted,
        weighted: if unweighted == 0 { 0.0 } else { mass.value() },
        triples: Some(triples),
    })
}

/// The normalized ratio unweighted * ln U * ln y * ln N / weighted; the
/// weighted and unweighted counts are asymptotically related through
/// exactly this factor, so the ratio is the diagnostic that should
/// drift toward 1.
pub fn weighted_ratio(p: &Params) -> Result<f64> {
    let rep = count_reps(p)?;
    ratio_of(&rep)
}

/// Same ratio from an existing count, avoiding a recount.
pub fn ratio_of(rep: &RepCount) -> Result<f64> {
    if rep.weighted == 0.0 {
        return Err(Error::ZeroCount);
    }
    let p = &rep.params;
    Ok(
        rep.unweighted as f64 * (p.u as f64).ln() * (p.y as f64).ln() * (p.n as f64).ln()
            / rep.weighted,
    )
}
