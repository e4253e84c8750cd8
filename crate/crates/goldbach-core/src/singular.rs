//! The arithmetic factor of the main term ("singular series"), reached
//! by two independent routes: a truncated sum over moduli of
//! Ramanujan-type sums, and an Euler product over primes with a
//! rigorous tail bound. The two routes converging to each other is one
//! of the stronger end-to-end checks in the crate, since they share no
//! code beyond integer utilities.

use crate::arith::{gcd, mobius, totient, MultTables};
use crate::error::{Error, Result};
use crate::primes::simple_sieve;
use crate::util::{par_chunk_map, Kahan};

/// Ceiling on the series truncation; the modulus tables are sieved up
/// to this point, so it bounds memory, not mathematics.
pub const MAX_SERIES_CUTOFF: f64 = 10_000_000.0;

/// Ceiling on the Euler-product prime cutoff (sieve memory bound).
pub const MAX_EULER_CUTOFF: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    TruncatedSeries,
    EulerProduct,
}

/// A singular-series value with its provenance: which route produced
/// it and how far that route was taken. `tail_bound` is a rigorous
/// overestimate of the neglected tail (Euler route only).
#[derive(Clone, Copy, Debug)]
pub struct SingularValue {
    pub value: f64,
    pub route: Route,
    pub cutoff: f64,
    pub tail_bound: Option<f64>,
}

/// The complete exponential sum over reduced residues a mod q of
/// e(-Na/q), by the classical closed form mu(q/d) phi(q) / phi(q/d)
/// with d = gcd(q, N). Exact integer arithmetic throughout.
pub fn ramanujan_f(q: u64, n: u64) -> i64 {
    assert!(q >= 1);
    let d = gcd(q, n);
    let m = mobius(q / d);
    if m == 0 {
        return 0;
    }
    let ratio = totient(q) / totient(q / d); // exact: phi(q/d) | phi(q)
    m as i64 * ratio as i64
}

/// Truncated series: sum over q <= cutoff of mu(q) f(q) / phi(q)^3.
/// mu and phi come from a linear sieve; the q-sum runs over fixed
/// chunks in parallel and the chunk results are folded in index order,
/// so the value is bit-stable across thread counts.
pub fn singular_truncated(n: u64, cutoff: f64) -> SingularValue {
    assert!(
        (1.0..=MAX_SERIES_CUTOFF).contains(&cutoff),
        "series cutoff must lie in [1, 10^7]"
    );
    let pf = cutoff.floor() as usize;
    let tables = MultTables::up_to(pf);
    let chunk = 1 << 14;
    let partials = par_chunk_map(pf, chunk, |range| {
        let mut acc = Kahan::new();
        for q0 in range {
            let q = q0 + 1;
            let mu = tables.mu[q];
            if mu == 0 {
                continue;
            }
            let d = gcd(q as u64, n) as usize;
            let mu_qd = tables.mu[q / d];
            if mu_qd == 0 {
                continue;
            }
            let f = mu_qd as f64 * (tables.phi[q] / tables.phi[q / d]) as f64;
            let phi = tables.phi[q] as f64;
            acc.add(mu as f64 * f / (phi * phi * phi));
        }
        acc.value()
    });
    let mut total = Kahan::new();
    for p in partials {
        total.add(p);
    }
    SingularValue {
        value: total.value(),
        route: Route::TruncatedSeries,
        cutoff: pf as f64,
        tail_bound: None,
    }
}

/// Euler product: over primes p <= prime_cutoff, the factor is
/// 1 + 1/(p-1)^3 when p does not divide N and 1 - 1/(p-1)^2 when it
/// does; every prime factor of N beyond the cutoff is forced into the
/// product as well, so the even-N zero and the odd-N positivity are
/// exact regardless of cutoff.
///
/// The neglected primes satisfy
///   sum over p > T of 1/(p-1)^3 <= integral from T of dt/(t-1)^3
///                               = 1/(2(T-1)^2),
/// treating every integer beyond T as prime (a safe overestimate), so
/// tail_bound = value * (exp(1/(2(T-1)^2)) - 1).
pub fn singular_euler(n: u64, prime_cutoff: u64) -> Result<SingularValue> {
    if prime_cutoff < 2 {
        return Err(Error::InvalidParams(
            "euler-product cutoff must be at least 2".into(),
        ));
    }
    if prime_cutoff > MAX_EULER_CUTOFF {
        return Err(Error::InvalidParams(format!(
            "euler-product cutoff {prime_cutoff} exceeds the sieve bound {MAX_EULER_CUTOFF}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParams(
            "singular series is for positive N".into(),
        ));
    }
    let primes = simple_sieve(prime_cutoff);
    let mut value = 1.0f64;
    for &p in &primes {
        let pm1 = (p - 1) as f64;
        if n % p == 0 {
            value *= 1.0 - 1.0 / (pm1 * pm1);
        } else {
            value *= 1.0 + 1.0 / (pm1 * pm1 * pm1);
        }
    }
    // prime factors of N beyond the cutoff still zero out / damp the
    // product; find them by trial division against the sieve primes,
    // then whatever remains is prime itself
    let mut rest = n;
    for &p in &primes {
        while rest % p == 0 {
            rest /= p;
        }
        if p * p > rest {
            break;
        }
    }
    if rest > prime_cutoff {
        // rest is a product of primes > cutoff; peel it fully
        let mut m = rest;
        let mut q = prime_cutoff + 1;
        // n <= 2^64 has at most three factors above 10^6, and desk-scale
        // callers pass cutoffs at least that large; the loop below is
        // a safety net for small cutoffs, costing sqrt(rest) at worst
        while q * q <= m {
            if m % q == 0 {
                let pm1 = (q - 1) as f64;
                value *= 1.0 - 1.0 / (pm1 * pm1);
                while m % q == 0 {
                    m /= q;
                }
            }
            q += 1;
        }
        if m > 1 {
            let pm1 = (m - 1) as f64;
            value *= 1.0 - 1.0 / (pm1 * pm1);
        }
    }
    let t = prime_cutoff as f64;
    let tail = value.abs() * (1.0 / (2.0 * (t - 1.0) * (t - 1.0))).exp_m1();
    Ok(SingularValue {
        value,
        route: Route::EulerProduct,
        cutoff: primes.last().copied().unwrap_or(0) as f64,
        tail_bound: Some(tail),
    })
}

#[derive(Clone, Copy, Debug)]
pub struct DecayRow {
    pub cutoff: f64,
    /// |truncated(N, cutoff) - euler(N)|.
    pub error: f64,
}

#[derive(Clone, Debug)]
pub struct DecayScan {
    pub rows: Vec<DecayRow>,
    /// Log-log least-squares slope of error against cutoff.
    pub slope: f64,
    pub reference: SingularValue,
}

/// How fast the truncated series approaches the Euler product as the
/// truncation grows: per-cutoff absolute errors and their fitted
/// log-log decay exponent. The reference value is computed with a
/// tail bound below 1e-9.
pub fn truncation_decay_scan(n: u64, cutoffs: &[f64]) -> Result<DecayScan> {
    if cutoffs.len() < 2 || cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParams(
            "decay scan needs at least two strictly ascending cutoffs".into(),
        ));
    }
    let reference = singular_euler(n, 200_000)?;
    debug_assert!(reference.tail_bound.unwrap() < 1e-9);
    let rows: Vec<DecayRow> = cuts_to_rows(n, cutoffs, reference.value);
    // floor the errors at 1e-300 so an exact hit cannot poison the log
    let xs: Vec<f64> = rows.iter().map(|r| r.cutoff.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.error.max(1e-300).ln()).collect();
    let k = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    Ok(DecayScan {
        rows,
        slope,
        reference,
    })
}

fn cuts_to_rows(n: u64, cutoffs: &[f64], reference: f64) -> Vec<DecayRow> {
    cutoffs
        .iter()
        .map(|&c| DecayRow {
            cutoff: c,
            error: (singular_truncated(n, c).value - reference).abs(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::KahanComplex;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    /// Direct complex summation over reduced residues, rounded to the
    /// nearest integer: the definition, with no closed form.
    fn ramanujan_direct(q: u64, n: u64) -> i64 {
        let mut acc = KahanComplex::new();
        for a in 1..=q {
            if gcd(a, q) != 1 {
                continue;
            }
            let r = (n % q) as u128 * a as u128 % q as u128;
            let angle = -TAU * (r as f64 / q as f64);
            acc.add(Complex64::new(angle.cos(), angle.sin()));
        }
        let v = acc.value();
        assert!(v.im.abs() < 1e-6, "Ramanujan sum should be real");
        assert!((v.re - v.re.round()).abs() < 1e-6);
        v.re.round() as i64
    }

    #[test]
    fn ramanujan_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..5 {
            assert_eq!(ramanujan_f(1, rng.gen()), 1);
        }
        assert_eq!(ramanujan_f(3, 6), 2); // p | N: p - 1
        assert_eq!(ramanujan_f(3, 7), -1); // p does not divide N
        assert_eq!(ramanujan_f(4, 1), 0); // mu(4) = 0
    }

    #[test]
    fn ramanujan_closed_form_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let ns: Vec<u64> = (0..3).map(|_| rng.gen()).collect();
        for q in 1..=2000u64 {
            for &n in &ns {
                assert_eq!(ramanujan_f(q, n), ramanujan_direct(q, n), "q={q} n={n}");
            }
        }
    }

    #[test]
    fn ramanujan_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let mut done = 0;
        while done < 200 {
            let q = rng.gen_range(1u64..1000);
            let r = rng.gen_range(1u64..1000);
            if gcd(q, r) != 1 {
                continue;
            }
            let n: u64 = rng.gen_range(1..1_000_000);
            assert_eq!(
                ramanujan_f(q * r, n),
                ramanujan_f(q, n) * ramanujan_f(r, n),
                "q={q} r={r} n={n}"
            );
            done += 1;
        }
    }

    #[test]
    fn truncated_series_examples() {
        assert_eq!(singular_truncated(21, 1.0).value, 1.0);
        assert_eq!(singular_truncated(9, 1.0).value, 1.0);
        // q = 2 term for odd N: mu(2) f(2,N) / phi(2)^3 = (-1)(-1)/1 = 1
        assert_eq!(singular_truncated(21, 2.0).value, 2.0);
    }

    #[test]
    fn series_is_supported_on_squarefree_moduli() {
        // same sum, skipping non-squarefree q by an independent test
        let n = 10_007u64;
        let cutoff = 3000usize;
        let tables = MultTables::up_to(cutoff);
        let mut acc = Kahan::new();
        for q in 1..=cutoff {
            if tables.mu[q] == 0 {
                continue; // squarefree support
            }
            let f = ramanujan_f(q as u64, n) as f64;
            let phi = tables.phi[q] as f64;
            acc.add(tables.mu[q] as f64 * f / (phi * phi * phi));
        }
        let via_scan = singular_truncated(n, cutoff as f64).value;
        assert!((acc.value() - via_scan).abs() <= 1e-15 * via_scan.abs());
    }

    #[test]
    fn euler_product_parity() {
        // even N: the p = 2 factor is exactly zero
        assert_eq!(singular_euler(4, 100).unwrap().value, 0.0);
        assert_eq!(singular_euler(1_000_000, 10_000).unwrap().value, 0.0);
        // odd N: bounded below by 1/2
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..20 {
            let n = rng.gen_range(5_000u64..1_000_000) | 1;
            let v = singular_euler(n, 100_000).unwrap();
            assert!(v.value > 0.5, "n={n} value={}", v.value);
            assert!(v.tail_bound.unwrap() >= 0.0);
        }
    }

    #[test]
    fn euler_product_forces_large_prime_factors() {
        // N = 2 * 1_000_003: the big factor must enter even with a
        // cutoff of 10, and the even factor zeroes the product anyway
        assert_eq!(singular_euler(2 * 1_000_003, 10).unwrap().value, 0.0);
        // odd N with a forced large factor: same small-prime pattern as
        // N = 3, so the two products differ by exactly that one factor
        let with_forced = singular_euler(3 * 1_000_003, 10).unwrap().value;
        let base = singular_euler(3, 10).unwrap().value;
        let forced = 1.0 - 1.0 / (1_000_002.0f64 * 1_000_002.0);
        assert!(with_forced < base);
        assert!((with_forced - base * forced).abs() < 1e-15);
    }

    #[test]
    fn routes_agree() {
        let e = singular_euler(21, 1_000_000).unwrap();
        assert!((e.value - 1.484_491_319_168_030).abs() < 1e-12);
        let t = singular_truncated(21, 100_000.0);
        assert!((e.value - t.value).abs() < 1e-3);
        assert!((e.value - t.value).abs() < 1e-9); // actually far tighter
    }

    #[test]
    fn decay_scan_odd() {
        let scan = truncation_decay_scan(100_003, &[100.0, 1000.0, 10_000.0]).unwrap();
        assert!(scan.rows[0].error > scan.rows[1].error);
        assert!(scan.rows[1].error > scan.rows[2].error);
        assert!(scan.slope <= -0.8, "slope {}", scan.slope);
        assert!((scan.reference.value - 2.300_961_544_473_698).abs() < 1e-9);
    }

    #[test]
    fn decay_scan_even() {
        let scan = truncation_decay_scan(100, &[10.0, 100.0, 1000.0]).unwrap();
        assert_eq!(scan.reference.value, 0.0);
        assert!(scan.rows[0].error > scan.rows[1].error);
        assert!(scan.rows[1].error > scan.rows[2].error);
        assert!(scan.rows[2].error < 1e-6);
    }

    #[test]
    fn decay_scan_validates_grid() {
        assert!(truncation_decay_scan(21, &[100.0]).is_err());
        assert!(truncation_decay_scan(21, &[100.0, 100.0]).is_err());
        assert!(truncation_decay_scan(21, &[1000.0, 100.0]).is_err());
    }

    #[test]
    fn euler_cutoff_validation() {
        assert!(singular_euler(21, 1).is_err());
        assert!(singular_euler(21, MAX_EULER_CUTOFF + 1).is_err());
        assert!(singular_euler(0, 100).is_err());
    }
}
