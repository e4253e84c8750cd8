//! The window generating function S(x,h,a) = sum of ln(p) e(p a) over
//! primes in (x-h, x], its smooth model v(x,h,b) = sum of e(n b) over
//! all integers in the window, and the model error
//! D = S - (mu(q)/phi(q)) v at a point a/q + b near a rational.
//!
//! Phases are never formed as one big float product: p*a is split into
//! an exact hi/lo pair (and p mod q handles the rational part exactly),
//! so e(p a) keeps full precision even at p ~ 10^8, where the naive
//! product has already lost eight digits.

use crate::arith::{mobius, totient, RationalPoint};
use crate::error::{Error, Result};
use crate::primes::PrimeWindow;
use crate::util::{two_product, KahanComplex};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

/// Default ceiling for the shift scan in the reduction check.
pub const DEFAULT_SHIFT_SCAN_CAP: u64 = 100_000;

/// A point of the unit circle: either a bare real alpha, or a reduced
/// rational a/q tagged with a real offset beta, meaning alpha = a/q + beta.
/// Tagged offsets are normalized into [-1/2, 1/2] on construction.
#[derive(Clone, Copy, Debug)]
pub enum UnitPoint {
    Raw(f64),
    NearRational { center: RationalPoint, offset: f64 },
}

impl UnitPoint {
    pub fn raw(alpha: f64) -> UnitPoint {
        UnitPoint::Raw(alpha)
    }

    pub fn near(center: RationalPoint, offset: f64) -> UnitPoint {
        UnitPoint::NearRational {
            center,
            offset: normalize_offset(offset),
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            UnitPoint::Raw(a) => *a,
            UnitPoint::NearRational { center, offset } => center.value() + offset,
        }
    }
}

/// Reduce into [-1/2, 1/2] (same point modulo 1).
fn normalize_offset(beta: f64) -> f64 {
    let b = beta - beta.round();
    debug_assert!(b.abs() <= 0.5);
    b
}

/// e(t) for a phase split t = hi + lo, |lo| small; hi is reduced
/// modulo 1 exactly (fract of a float is exact) before the single
/// rounding of the addition.
#[inline]
fn unit_exp_split(hi: f64, lo: f64) -> Complex64 {
    let t = hi.fract() + lo;
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// S(x,h,alpha): compensated sum of ln(p) e(p alpha) over the window.
pub fn prime_sum(w: &PrimeWindow, at: &UnitPoint) -> Complex64 {
    let mut acc = KahanComplex::new();
    match at {
        UnitPoint::Raw(alpha) => {
            for i in 0..w.len() {
                let (hi, lo) = two_product(w.prime(i) as f64, *alpha);
                acc.add(w.weight(i) * unit_exp_split(hi, lo));
            }
        }
        UnitPoint::NearRational { center, offset } => {
            let (a, q) = (center.numer(), center.denom());
            for i in 0..w.len() {
                let p = w.prime(i);
                // p * a/q modulo 1, numerator first, all exact.
                let r = ((p % q) as u128 * a as u128 % q as u128) as u64;
                let rational_part = r as f64 / q as f64;
                let (hi, lo) = two_product(p as f64, *offset);
                acc.add(w.weight(i) * unit_exp_split(hi, lo + rational_part));
            }
        }
    }
    acc.value()
}

/// v(x,h,beta): the geometric sum over all integers of (x-h, x], in
/// closed form. Exactly h when beta is an integer. The closed form is
///
///   v = e(beta (2x - h + 1) / 2) * sin(pi h beta) / sin(pi beta),
///
/// with both large phase products split exactly and reduced modulo
/// the relevant period before any trig call.
pub fn geometric_sum(x: u64, h: u64, beta: f64) -> Complex64 {
    assert!(h <= x, "window (x-h, x] needs h <= x");
    let b = normalize_offset(beta);
    if b == 0.0 {
        return Complex64::new(h as f64, 0.0);
    }
    // sin(pi t) has period 2 in t; reduce t = h b into [0, 2) exactly.
    let red2 = |hi: f64, lo: f64| -> f64 {
        let r = hi - 2.0 * (hi / 2.0).floor();
        r + lo
    };
    let (nhi, nlo) = two_product(h as f64, b);
    let ratio = (PI * red2(nhi, nlo)).sin() / (PI * b).sin();
    let m2 = 2 * x - h + 1;
    let (phi_hi, phi_lo) = two_product(m2 as f64, b);
    let t = red2(phi_hi, phi_lo);
    let (s, c) = (PI * t).sin_cos();
    ratio * Complex64::new(c, s)
}

/// D(x,h,a/q+beta) = S(x,h,a/q+beta) - (mu(q)/phi(q)) v(x,h,beta).
pub fn model_error(w: &PrimeWindow, center: &RationalPoint, beta: f64) -> Complex64 {
    let s = prime_sum(w, &UnitPoint::near(*center, beta));
    let mu = mobius(center.denom());
    if mu == 0 {
        return s;
    }
    let coeff = mu as f64 / totient(center.denom()) as f64;
    s - coeff * geometric_sum(w.x(), w.h(), normalize_offset(beta))
}

#[derive(Clone, Copy, Debug)]
pub struct ReductionReport {
    /// |D(x,h,a/q+beta)|.
    pub lhs: f64,
    /// (1 + |beta| h) max over 0 < t <= h of |D(x,t,a/q)|.
    pub rhs: f64,
    pub ok: bool,
}

/// Check the reduction of the off-center error to on-center errors:
/// |D(x,h,a/q+beta)| <= (1+|beta|h) max_{0<t<=h} |D(x,t,a/q)|.
/// The max is found by an exhaustive scan over window suffixes, growing
/// the t-window one integer at a time.
pub fn model_error_reduction_check(
    w: &PrimeWindow,
    center: &RationalPoint,
    beta: f64,
) -> Result<ReductionReport> {
    model_error_reduction_check_with_cap(w, center, beta, DEFAULT_SHIFT_SCAN_CAP)
}

pub fn model_error_reduction_check_with_cap(
    w: &PrimeWindow,
    center: &RationalPoint,
    beta: f64,
    scan_cap: u64,
) -> Result<ReductionReport> {
    let h = w.h();
    if h > scan_cap {
        return Err(Error::ScanTooLarge { h, cap: scan_cap });
    }
    let beta = normalize_offset(beta);
    let lhs = model_error(w, center, beta).norm();

    // Membership by offset from the window base, so the t-scan does one
    // array probe per integer.
    let mut is_prime_off = vec![false; h as usize + 1];
    let base = w.base();
    for p in w.primes() {
        is_prime_off[(p - base) as usize] = true;
    }
    let (a, q) = (center.numer(), center.denom());
    let mu = mobius(q);
    let coeff = if mu == 0 {
        0.0
    } else {
        mu as f64 / totient(q) as f64
    };
    let x = w.x();
    let mut running = KahanComplex::new();
    let mut max_center_err = 0.0f64;
    for t in 1..=h {
        let n = x - t + 1;
        if is_prime_off[(n - base) as usize] {
            let r = ((n % q) as u128 * a as u128 % q as u128) as u64;
            let angle = TAU * (r as f64 / q as f64);
            let (s, c) = angle.sin_cos();
            running.add((n as f64).ln() * Complex64::new(c, s));
        }
        let delta_t = running.value() - coeff * t as f64;
        max_center_err = max_center_err.max(delta_t.norm());
    }
    let rhs = (1.0 + beta.abs() * h as f64) * max_center_err;
    let ok = lhs <= rhs + 1e-9 * (1.0 + rhs);
    Ok(ReductionReport { lhs, rhs, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::make_window;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Term-by-term oracle for v, no closed form.
    fn geometric_sum_direct(x: u64, h: u64, beta: f64) -> Complex64 {
        let mut acc = KahanComplex::new();
        for n in (x - h + 1)..=x {
            let (hi, lo) = two_product(n as f64, beta);
            acc.add(unit_exp_split(hi, lo));
        }
        acc.value()
    }

    /// Term-by-term oracle for S with naive phases; fine at small x.
    fn prime_sum_direct(w: &PrimeWindow, alpha: f64) -> Complex64 {
        let mut acc = KahanComplex::new();
        for i in 0..w.len() {
            let t = (w.prime(i) as f64 * alpha).rem_euclid(1.0);
            acc.add(w.weight(i) * Complex64::new((TAU * t).cos(), (TAU * t).sin()));
        }
        acc.value()
    }

    #[test]
    fn prime_sum_at_zero_is_log_mass() {
        let w = make_window(10, 10).unwrap();
        let s = prime_sum(&w, &UnitPoint::raw(0.0));
        assert!((s.re - 5.347_107_530_717_468).abs() < 1e-12); // ln 210
        assert_eq!(s.im, 0.0);
    }

    #[test]
    fn prime_sum_at_half_alternates() {
        let w = make_window(10, 10).unwrap();
        let s = prime_sum(&w, &UnitPoint::raw(0.5));
        // e(p/2) = (-1)^p: + for p = 2, - for odd primes.
        assert!((s.re - (-3.960_813_169_597_578)).abs() < 1e-12);
        assert!(s.im.abs() < 1e-12);
    }

    #[test]
    fn prime_sum_periodicity() {
        let w = make_window(1000, 1000).unwrap();
        // Exactly representable alpha: alpha + 1 is also exact, so the
        // two evaluations agree to the last bit of the phase pipeline.
        let a = prime_sum(&w, &UnitPoint::raw(0.140625));
        let b = prime_sum(&w, &UnitPoint::raw(1.140625));
        assert!((a - b).norm() <= 1e-10 * a.norm());
    }

    #[test]
    fn prime_sum_conjugate_symmetry() {
        let w = make_window(5000, 2000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let alpha: f64 = rng.gen_range(-1.0..1.0);
            let plus = prime_sum(&w, &UnitPoint::raw(alpha));
            let minus = prime_sum(&w, &UnitPoint::raw(-alpha));
            assert!((minus - plus.conj()).norm() <= 1e-9 * (1.0 + plus.norm()));
        }
    }

    #[test]
    fn tagged_and_raw_points_agree() {
        let w = make_window(10_000, 3_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..40 {
            let q = rng.gen_range(1u64..50);
            let a = rng.gen_range(1..=q);
            let Ok(center) = RationalPoint::reduce(a as i64, q) else {
                continue;
            };
            let beta: f64 = rng.gen_range(-1e-3..1e-3);
            let tagged = prime_sum(&w, &UnitPoint::near(center, beta));
            let raw = prime_sum(&w, &UnitPoint::raw(center.value() + beta));
            assert!((tagged - raw).norm() <= 1e-8 * (1.0 + tagged.norm()));
        }
    }

    #[test]
    fn triangle_bound() {
        let w = make_window(3_000, 1_000).unwrap();
        let cap = prime_sum(&w, &UnitPoint::raw(0.0)).re;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let alpha: f64 = rng.gen_range(0.0..1.0);
            assert!(prime_sum(&w, &UnitPoint::raw(alpha)).norm() <= cap * (1.0 + 1e-12));
        }
    }

    #[test]
    fn geometric_sum_integers() {
        assert_eq!(geometric_sum(20, 5, 0.0), Complex64::new(5.0, 0.0));
        assert_eq!(geometric_sum(20, 5, 3.0), Complex64::new(5.0, 0.0));
        // Four alternating signs cancel.
        assert!(geometric_sum(20, 4, 0.5).norm() < 1e-12);
    }

    #[test]
    fn geometric_sum_matches_direct_summation() {
        let v = geometric_sum(1_000_000, 1_000, 1e-7);
        let direct = geometric_sum_direct(1_000_000, 1_000, 1e-7);
        assert!((v - direct).norm() <= 1e-10 * direct.norm());

        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..300 {
            let h = rng.gen_range(1u64..10_000);
            let x = h + rng.gen_range(0u64..1_000_000);
            let beta: f64 = rng.gen_range(-0.5..0.5);
            let v = geometric_sum(x, h, beta);
            let direct = geometric_sum_direct(x, h, beta);
            assert!(
                (v - direct).norm() <= 1e-9 * direct.norm().max(1.0),
                "x={x} h={h} beta={beta}"
            );
        }
    }

    #[test]
    fn geometric_bound_holds() {
        // |v| <= min(h, 1/(2 dist(beta, Z))), the sharp-constant form.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let h = rng.gen_range(1u64..10_000);
            let x = h + rng.gen_range(0u64..100_000);
            let beta: f64 = rng.gen_range(-0.5..0.5);
            let dist = (beta - beta.round()).abs();
            let bound = if dist > 0.0 {
                (h as f64).min(1.0 / (2.0 * dist))
            } else {
                h as f64
            };
            let v = geometric_sum(x, h, beta).norm();
            assert!(v <= bound * (1.0 + 1e-12), "x={x} h={h} beta={beta}");
        }
    }

    #[test]
    fn model_error_square_modulus_center() {
        // mu(4) = 0, so the smooth model vanishes and D = S.
        let w = make_window(100, 50).unwrap();
        let center = RationalPoint::new(1, 4).unwrap();
        let d = model_error(&w, &center, 0.0);
        let s = prime_sum(&w, &UnitPoint::near(center, 0.0));
        assert_eq!(d, s);
    }

    #[test]
    fn model_error_at_one() {
        // q = 1, beta = 0: D = ln 210 - 10 over (0, 10].
        let w = make_window(10, 10).unwrap();
        let center = RationalPoint::new(1, 1).unwrap();
        let d = model_error(&w, &center, 0.0);
        assert!((d.re - (-4.652_892_469_282_532)).abs() < 1e-12);
        assert!(d.im.abs() < 1e-12);
    }

    #[test]
    fn model_error_empty_window() {
        // No primes in (24, 25]: S = 0 and D = -(mu/phi) v.
        let w = make_window(25, 1).unwrap();
        assert_eq!(w.len(), 0);
        let center = RationalPoint::new(1, 2).unwrap();
        let d = model_error(&w, &center, 0.25);
        let v = geometric_sum(25, 1, 0.25);
        assert!((d - v).norm() < 1e-15); // mu(2)/phi(2) = -1
    }

    #[test]
    fn reduction_check_examples() {
        let w = make_window(10_000, 1_000).unwrap();
        let third = RationalPoint::new(1, 3).unwrap();
        let r = model_error_reduction_check(&w, &third, 1e-4).unwrap();
        assert!(r.ok, "lhs={} rhs={}", r.lhs, r.rhs);
        let two_fifths = RationalPoint::new(2, 5).unwrap();
        let r = model_error_reduction_check(&w, &two_fifths, -1e-4).unwrap();
        assert!(r.ok, "lhs={} rhs={}", r.lhs, r.rhs);
        // beta = 0: the t = h term itself is a candidate for the max.
        let r = model_error_reduction_check(&w, &third, 0.0).unwrap();
        assert!(r.lhs <= r.rhs + 1e-9);
    }

    #[test]
    fn reduction_check_is_capped() {
        let w = make_window(10_000, 1_000).unwrap();
        let c = RationalPoint::new(1, 3).unwrap();
        assert!(matches!(
            model_error_reduction_check_with_cap(&w, &c, 0.0, 100),
            Err(Error::ScanTooLarge { .. })
        ));
    }

    #[test]
    fn reduction_check_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let w = make_window(20_000, 2_000).unwrap();
        for _ in 0..20 {
            let q = rng.gen_range(1u64..30);
            let a = rng.gen_range(1..=q);
            let Ok(center) = RationalPoint::reduce(a as i64, q) else {
                continue;
            };
            let beta: f64 = rng.gen_range(-1e-3..1e-3);
            let r = model_error_reduction_check(&w, &center, beta).unwrap();
            assert!(
                r.ok,
                "center={center} beta={beta} lhs={} rhs={}",
                r.lhs, r.rhs
            );
        }
    }

    #[test]
    fn naive_oracle_agrees_at_small_scale() {
        let w = make_window(2_000, 1_500).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let alpha: f64 = rng.gen_range(-2.0..2.0);
            let fast = prime_sum(&w, &UnitPoint::raw(alpha));
            let slow = prime_sum_direct(&w, alpha);
            assert!((fast - slow).norm() <= 1e-9 * (1.0 + slow.norm()));
        }
    }
}
